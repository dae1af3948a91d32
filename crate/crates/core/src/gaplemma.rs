//! Newhouse and Astels Gap Lemma checkers.
//!
//! A checker evaluates the hypotheses of a Gap Lemma on concrete interval
//! unions and states what the lemma then predicts about the sum set. The
//! prediction can be compared against the exact Minkowski sum with
//! [`verify_prediction`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::setalg::{minkowski_sum_all, thickness, ExtReal, Interval, IntervalUnion};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GapLemmaError {
    #[error("need at least 2 sets, got {0}")]
    TooFewSets(usize),
}

/// Relative slack allowed when comparing a thickness lower bound against an
/// exactly computed thickness (both go through a handful of f64 divisions).
pub const LOWER_BOUND_REL_SLACK: f64 = 1e-12;

/// Largest input for which the ordering search enumerates permutations.
pub const MAX_ORDERING_SEARCH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapLemmaVerdict {
    pub hypotheses_hold: bool,
    pub failed_conditions: Vec<String>,
    pub conditions: Vec<Condition>,
    pub taus: Vec<ExtReal>,
    pub gammas: Vec<f64>,
    pub diams: Vec<f64>,
    /// `S = Σ τᵢ/(τᵢ+1)`, `+∞` thickness contributing `1`.
    pub astels_sum: f64,
    pub predicted_interval: Option<Interval>,
    pub predicted_tau_lower_bound: Option<f64>,
    /// Order in which the inputs were indexed when checking the conditions.
    pub ordering: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstelsOptions {
    /// Also try every ordering of the inputs when the given one fails.
    pub search_orderings: bool,
}

struct SetStats {
    tau: ExtReal,
    gamma: f64,
    diam: f64,
    inf: f64,
    sup: f64,
}

fn stats(k: &IntervalUnion) -> SetStats {
    let r = thickness(k);
    SetStats { tau: r.tau, gamma: r.gamma, diam: r.diam, inf: k.inf(), sup: k.sup() }
}

fn hull_of_sum(ks: &[&SetStats]) -> Interval {
    let lo = ks.iter().fold(0.0, |acc, s| acc + s.inf);
    let hi = ks.iter().fold(0.0, |acc, s| acc + s.sup);
    Interval { lo, hi }
}

fn astels_sum(ks: &[&SetStats]) -> f64 {
    ks.iter().map(|s| s.tau.saturation()).sum()
}

/// Two-set Gap Lemma.
pub fn check_newhouse(k1: &IntervalUnion, k2: &IntervalUnion) -> GapLemmaVerdict {
    let a = stats(k1);
    let b = stats(k2);
    let product = a.tau.mul(b.tau);
    let conditions = vec![
        Condition {
            name: "hull(K1) meets hull(K2)".into(),
            holds: a.inf.max(b.inf) <= a.sup.min(b.sup),
        },
        Condition { name: "Gamma(K2) <= diam(K1)".into(), holds: b.gamma <= a.diam },
        Condition { name: "Gamma(K1) <= diam(K2)".into(), holds: a.gamma <= b.diam },
        Condition { name: "tau(K1)*tau(K2) >= 1".into(), holds: product.ge(1.0) },
    ];
    let hypotheses_hold = conditions.iter().all(|c| c.holds);
    let failed_conditions =
        conditions.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
    let refs = [&a, &b];
    GapLemmaVerdict {
        hypotheses_hold,
        failed_conditions,
        conditions,
        taus: vec![a.tau, b.tau],
        gammas: vec![a.gamma, b.gamma],
        diams: vec![a.diam, b.diam],
        astels_sum: astels_sum(&refs),
        predicted_interval: hypotheses_hold.then(|| hull_of_sum(&refs)),
        predicted_tau_lower_bound: None,
        ordering: vec![0, 1],
    }
}

/// The two families of Γ/diameter inequalities, for the sets in the given order.
fn astels_conditions(ks: &[&SetStats]) -> Vec<Condition> {
    let d = ks.len();
    let mut out = Vec::new();
    for i in 1..d {
        for j in 0..i {
            out.push(Condition {
                name: format!("Gamma(K{}) <= diam(K{})", j + 1, i + 1),
                holds: ks[j].gamma <= ks[i].diam,
            });
        }
    }
    let mut prefix = 0.0;
    for i in 1..d {
        prefix += ks[i - 1].diam;
        out.push(Condition {
            name: if i == 1 {
                format!("Gamma(K2) <= diam(K1)")
            } else {
                format!("Gamma(K{}) <= diam(K1)+...+diam(K{})", i + 1, i)
            },
            holds: ks[i].gamma <= prefix,
        });
    }
    out
}

fn astels_verdict(all: &[SetStats], ordering: Vec<usize>) -> GapLemmaVerdict {
    let ks: Vec<&SetStats> = ordering.iter().map(|&i| &all[i]).collect();
    let conditions = astels_conditions(&ks);
    let hypotheses_hold = conditions.iter().all(|c| c.holds);
    let failed_conditions =
        conditions.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
    let s = astels_sum(&ks);
    let (predicted_interval, predicted_tau_lower_bound) = match (hypotheses_hold, s >= 1.0) {
        (true, true) => (Some(hull_of_sum(&ks)), None),
        (true, false) => (None, Some(s / (1.0 - s))),
        (false, _) => (None, None),
    };
    GapLemmaVerdict {
        hypotheses_hold,
        failed_conditions,
        conditions,
        taus: ks.iter().map(|s| s.tau).collect(),
        gammas: ks.iter().map(|s| s.gamma).collect(),
        diams: ks.iter().map(|s| s.diam).collect(),
        astels_sum: s,
        predicted_interval,
        predicted_tau_lower_bound,
        ordering,
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // Heap's algorithm, then sorted for a deterministic lexicographic order.
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    out.push(a.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out.sort();
    out
}

/// d-set Gap Lemma, conditions checked for the inputs in the order given.
pub fn check_astels(ks: &[IntervalUnion]) -> Result<GapLemmaVerdict, GapLemmaError> {
    check_astels_with(ks, AstelsOptions::default())
}

pub fn check_astels_with(
    ks: &[IntervalUnion],
    opts: AstelsOptions,
) -> Result<GapLemmaVerdict, GapLemmaError> {
    if ks.len() < 2 {
        return Err(GapLemmaError::TooFewSets(ks.len()));
    }
    let all: Vec<SetStats> = ks.iter().map(stats).collect();
    let literal = astels_verdict(&all, (0..ks.len()).collect());
    if literal.hypotheses_hold || !opts.search_orderings || ks.len() > MAX_ORDERING_SEARCH {
        return Ok(literal);
    }
    let found = permutations(ks.len()).into_par_iter().find_first(|p| {
        let refs: Vec<&SetStats> = p.iter().map(|&i| &all[i]).collect();
        astels_conditions(&refs).iter().all(|c| c.holds)
    });
    Ok(match found {
        Some(p) => astels_verdict(&all, p),
        None => literal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationStatus {
    Pass,
    NoPrediction,
    /// The oracle contradicts a proved prediction: an implementation bug.
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: GapLemmaVerdict,
    pub oracle_sum: IntervalUnion,
    pub oracle_tau: ExtReal,
    pub interval_matches: Option<bool>,
    pub tau_bound_holds: Option<bool>,
    pub status: VerificationStatus,
}

/// Run the Astels checker and compare its prediction with the exact sum.
pub fn verify_prediction(ks: &[IntervalUnion]) -> Result<VerificationReport, GapLemmaError> {
    verify_prediction_with(ks, AstelsOptions::default())
}

pub fn verify_prediction_with(
    ks: &[IntervalUnion],
    opts: AstelsOptions,
) -> Result<VerificationReport, GapLemmaError> {
    let verdict = check_astels_with(ks, opts)?;
    let oracle = minkowski_sum_all(ks).expect("at least two sets");
    let oracle_tau = thickness(&oracle).tau;

    let interval_matches = verdict.predicted_interval.map(|iv| {
        oracle.is_interval() && oracle.inf() == iv.lo && oracle.sup() == iv.hi
    });
    let tau_bound_holds = verdict.predicted_tau_lower_bound.map(|bound| match oracle_tau {
        ExtReal::Infinite => true,
        ExtReal::Finite(t) => t >= bound * (1.0 - LOWER_BOUND_REL_SLACK),
    });
    let status = match (interval_matches, tau_bound_holds) {
        (None, None) => VerificationStatus::NoPrediction,
        (Some(false), _) | (_, Some(false)) => VerificationStatus::Failure,
        _ => VerificationStatus::Pass,
    };
    Ok(VerificationReport {
        verdict,
        oracle_sum: oracle,
        oracle_tau,
        interval_matches,
        tau_bound_holds,
        status,
    })
}

//! Sums of almost Mathieu spectra: the spectrum of a separable operator in
//! `d` dimensions is `Σ₁ + ⋯ + Σ_d`. This module computes the factors,
//! runs the Gap Lemma checker on them and compares with the exact sum.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amo::{default_gap_close_tol, spectrum_irrational, AmoError, SpectrumResult, DEFAULT_EDGE_TOL};
use crate::dioph::FrequencySpec;
use crate::gaplemma::{check_astels, GapLemmaError, GapLemmaVerdict};
use crate::setalg::{minkowski_sum_all, thickness, ExtReal, IntervalUnion};

pub const DEFAULT_APPROX_ORDER: usize = 7;
pub const DEFAULT_LABEL_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Validation(String),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("at couplings {lambdas:?}: {source}")]
    Spectrum { lambdas: Vec<f64>, source: AmoError },
    #[error("at couplings {lambdas:?}: {source}")]
    GapLemma { lambdas: Vec<f64>, source: GapLemmaError },
    #[error("predicate is constant over the probed range: {0}")]
    NoSwitchFound(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_edge_tol")]
    pub edge_tol: f64,
    /// Filled from the largest coupling in the sweep when absent.
    #[serde(default)]
    pub gap_close_tol: Option<f64>,
    #[serde(default = "default_label_tol")]
    pub label_tol: f64,
}

fn default_edge_tol() -> f64 {
    DEFAULT_EDGE_TOL
}

fn default_label_tol() -> f64 {
    DEFAULT_LABEL_TOL
}

fn default_approx_order() -> usize {
    DEFAULT_APPROX_ORDER
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { edge_tol: DEFAULT_EDGE_TOL, gap_close_tol: None, label_tol: DEFAULT_LABEL_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dims: usize,
    pub freq_specs: Vec<FrequencySpec>,
    /// Coupling sweep per dimension; the experiment runs their Cartesian product.
    pub lambdas: Vec<Vec<f64>>,
    #[serde(default = "default_approx_order")]
    pub approx_order: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seeds: u64,
}

impl ExperimentConfig {
    /// Check the invariants and fill derived defaults.
    pub fn validate(mut self) -> Result<Self, ConfigError> {
        let bad = |m: String| Err(ConfigError::Validation(m));
        if self.dims < 2 {
            return bad(format!("dims must be >= 2, got {}", self.dims));
        }
        if self.freq_specs.len() != self.dims {
            return bad(format!("dims = {} but {} freq_specs given", self.dims, self.freq_specs.len()));
        }
        if self.lambdas.len() != self.dims {
            return bad(format!("dims = {} but {} coupling lists given", self.dims, self.lambdas.len()));
        }
        for (k, list) in self.lambdas.iter().enumerate() {
            if list.is_empty() {
                return bad(format!("coupling list {k} is empty"));
            }
            if let Some(l) = list.iter().find(|l| !(l.abs() > 0.0) || !l.is_finite()) {
                return bad(format!("coupling {l} in list {k} violates the hypothesis 0<|λ_k|"));
            }
        }
        if self.approx_order < 1 {
            return bad("approx_order must be >= 1".into());
        }
        let t = &self.tolerances;
        if !(t.edge_tol > 0.0) || !(t.label_tol > 0.0) || t.gap_close_tol.is_some_and(|g| !(g >= 0.0)) {
            return bad("tolerances must be positive".into());
        }
        if self.tolerances.gap_close_tol.is_none() {
            let max = self.lambdas.iter().flatten().fold(0.0f64, |m, l| m.max(l.abs()));
            self.tolerances.gap_close_tol = Some(default_gap_close_tol(max));
        }
        Ok(self)
    }

    fn gap_close_tol(&self) -> f64 {
        self.tolerances.gap_close_tol.expect("filled by validate")
    }

    /// Every coupling tuple of the sweep, first dimension varying slowest.
    pub fn tuples(&self) -> Vec<Vec<f64>> {
        self.lambdas.iter().fold(vec![Vec::new()], |acc, list| {
            acc.iter()
                .flat_map(|prefix| {
                    list.iter().map(move |&l| {
                        let mut t = prefix.clone();
                        t.push(l);
                        t
                    })
                })
                .collect()
        })
    }
}

/// Strict parse: unknown keys are errors and defaults are filled in.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSummary {
    pub dim: usize,
    pub lambda: f64,
    pub parts: usize,
    pub closed_gaps: usize,
    pub tau: ExtReal,
    pub gamma: f64,
    pub diam: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleRecord {
    pub lambdas: Vec<f64>,
    pub factors: Vec<FactorSummary>,
    pub verdict: GapLemmaVerdict,
    pub oracle_sum: IntervalUnion,
    pub oracle_parts: usize,
    pub oracle_tau: ExtReal,
    /// Read off the exact sum, never from the verdict.
    pub is_interval: bool,
    /// The verdict predicted something the exact sum contradicts.
    pub contradiction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub dim: usize,
    pub lambda: f64,
    pub spectrum: SpectrumResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub spectra: Vec<SpectrumEntry>,
    pub records: Vec<TupleRecord>,
    /// Largest `max_k |λ_k|` such that every tuple at or below it gave an interval.
    pub empirical_threshold: Option<f64>,
    pub contradictions: usize,
}

impl ExperimentReport {
    /// One row per tuple: couplings, thicknesses, Astels sum, prediction,
    /// exact-sum part count and interval flag.
    pub fn to_csv(&self) -> String {
        let d = self.config.dims;
        let mut header: Vec<String> = (1..=d).map(|k| format!("lambda_{k}")).collect();
        header.extend((1..=d).map(|k| format!("tau_{k}")));
        header.extend(["astels_sum", "predicted_interval", "oracle_parts", "is_interval"].map(String::from));
        let mut out = header.join(",") + "\n";
        for r in &self.records {
            let mut row: Vec<String> = r.lambdas.iter().map(|l| format!("{l:?}")).collect();
            row.extend(r.factors.iter().map(|f| f.tau.to_string()));
            row.push(format!("{:?}", r.verdict.astels_sum));
            row.push(r.verdict.predicted_interval.is_some().to_string());
            row.push(r.oracle_parts.to_string());
            row.push(r.is_interval.to_string());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn evaluate_tuple(lambdas: &[f64], sets: &[&SpectrumResult]) -> Result<TupleRecord, GapLemmaError> {
    let unions: Vec<IntervalUnion> = sets.iter().map(|s| s.union.clone()).collect();
    let verdict = check_astels(&unions)?;
    let oracle = minkowski_sum_all(&unions).expect("dims >= 2");
    let oracle_tau = thickness(&oracle).tau;
    let factors = sets
        .iter()
        .enumerate()
        .map(|(dim, s)| {
            let th = thickness(&s.union);
            FactorSummary {
                dim,
                lambda: lambdas[dim],
                parts: s.union.len(),
                closed_gaps: s.closed_gaps,
                tau: th.tau,
                gamma: th.gamma,
                diam: th.diam,
            }
        })
        .collect();
    let is_interval = oracle.is_interval();
    let interval_wrong = verdict
        .predicted_interval
        .is_some_and(|iv| !(is_interval && oracle.inf() == iv.lo && oracle.sup() == iv.hi));
    let tau_wrong = verdict.predicted_tau_lower_bound.is_some_and(|b| match oracle_tau {
        ExtReal::Infinite => false,
        ExtReal::Finite(t) => t < b * (1.0 - crate::gaplemma::LOWER_BOUND_REL_SLACK),
    });
    Ok(TupleRecord {
        lambdas: lambdas.to_vec(),
        factors,
        verdict,
        oracle_parts: oracle.len(),
        oracle_sum: oracle,
        oracle_tau,
        is_interval,
        contradiction: interval_wrong || tau_wrong,
    })
}

type SpectrumKey = (usize, u64);

fn compute_spectra(
    config: &ExperimentConfig,
    order: usize,
    wanted: &[(usize, f64)],
) -> Result<BTreeMap<SpectrumKey, SpectrumResult>, PipelineError> {
    let results: Vec<(SpectrumKey, Result<SpectrumResult, AmoError>)> = wanted
        .par_iter()
        .map(|&(dim, lambda)| {
            let r = spectrum_irrational(
                lambda,
                &config.freq_specs[dim],
                order,
                config.tolerances.edge_tol,
                config.gap_close_tol(),
            );
            ((dim, lambda.to_bits()), r)
        })
        .collect();
    results
        .into_iter()
        .map(|(key, r)| {
            r.map(|s| (key, s))
                .map_err(|source| PipelineError::Spectrum { lambdas: vec![f64::from_bits(key.1)], source })
        })
        .collect()
}

/// Compute the factors, the Astels verdict and the exact sum for every
/// coupling tuple of the sweep.
pub fn run_main_theorem(config: &ExperimentConfig) -> Result<ExperimentReport, PipelineError> {
    let config = config.clone().validate()?;
    let mut wanted: Vec<(usize, f64)> = config
        .lambdas
        .iter()
        .enumerate()
        .flat_map(|(dim, list)| list.iter().map(move |&l| (dim, l)))
        .collect();
    wanted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    wanted.dedup_by(|a, b| a.0 == b.0 && a.1.to_bits() == b.1.to_bits());
    let spectra = compute_spectra(&config, config.approx_order, &wanted)?;

    let records: Vec<TupleRecord> = config
        .tuples()
        .par_iter()
        .map(|tuple| {
            let sets: Vec<&SpectrumResult> =
                tuple.iter().enumerate().map(|(dim, l)| &spectra[&(dim, l.to_bits())]).collect();
            evaluate_tuple(tuple, &sets)
                .map_err(|source| PipelineError::GapLemma { lambdas: tuple.clone(), source })
        })
        .collect::<Result<_, _>>()?;

    let contradictions = records.iter().filter(|r| r.contradiction).count();
    let empirical_threshold = empirical_threshold(&records);
    let spectra = spectra
        .into_iter()
        .map(|((dim, bits), spectrum)| SpectrumEntry { dim, lambda: f64::from_bits(bits), spectrum })
        .collect();
    Ok(ExperimentReport { config, spectra, records, empirical_threshold, contradictions })
}

fn empirical_threshold(records: &[TupleRecord]) -> Option<f64> {
    let mut by_size: Vec<(f64, bool)> = records
        .iter()
        .map(|r| (r.lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs())), r.is_interval))
        .collect();
    by_size.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut threshold = None;
    let mut i = 0;
    while i < by_size.len() {
        let size = by_size[i].0;
        let mut j = i;
        while j < by_size.len() && by_size[j].0 == size {
            if !by_size[j].1 {
                return threshold;
            }
            j += 1;
        }
        threshold = Some(size);
        i = j;
    }
    threshold
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProbe {
    pub lambda: f64,
    pub oracle_parts: usize,
    pub is_interval: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub approx_order: usize,
    pub range: (f64, f64),
    /// Midpoint of the final bracket.
    pub lambda_star: f64,
    /// Last coupling seen to give an interval and first seen to give gaps.
    pub bracket: (f64, f64),
    pub bisection_steps: usize,
    /// Uniform probes of the range, then bisection probes, in evaluation order.
    pub probes: Vec<ThresholdProbe>,
    /// An interval was seen above a gapped coupling among the uniform probes.
    pub non_monotone: bool,
}

pub const THRESHOLD_GRID: usize = 9;

/// Bisect on a common coupling `λ₁ = ⋯ = λ_d = λ` for the switch of
/// "the exact sum is an interval" over `range`.
pub fn find_threshold(
    config: &ExperimentConfig,
    range: (f64, f64),
    bisection_steps: usize,
) -> Result<ThresholdReport, PipelineError> {
    let config = config.clone().validate()?;
    if bisection_steps < 4 {
        return Err(PipelineError::InvalidArgument("bisection_steps must be >= 4".into()));
    }
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(PipelineError::InvalidArgument(format!("range must satisfy 0 < lo < hi, got {range:?}")));
    }
    let probe = |lambda: f64| -> Result<ThresholdProbe, PipelineError> {
        let wanted: Vec<(usize, f64)> = (0..config.dims).map(|d| (d, lambda)).collect();
        let spectra = compute_spectra(&config, config.approx_order, &wanted)?;
        let sets: Vec<&IntervalUnion> = spectra.values().map(|s| &s.union).collect();
        let owned: Vec<IntervalUnion> = sets.into_iter().cloned().collect();
        let sum = minkowski_sum_all(&owned).expect("dims >= 2");
        Ok(ThresholdProbe { lambda, oracle_parts: sum.len(), is_interval: sum.is_interval() })
    };
    let grid: Vec<f64> = (0..THRESHOLD_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (THRESHOLD_GRID - 1) as f64)
        .collect();
    let mut probes: Vec<ThresholdProbe> = grid.iter().map(|&l| probe(l)).collect::<Result<_, _>>()?;
    let first_gapped = probes.iter().position(|p| !p.is_interval);
    let first_interval = probes.iter().position(|p| p.is_interval);
    let (Some(g), Some(_)) = (first_gapped, first_interval) else {
        let state = if probes[0].is_interval { "interval" } else { "gapped" };
        let parts: Vec<String> = probes.iter().map(|p| format!("{}:{}", p.lambda, p.oracle_parts)).collect();
        return Err(PipelineError::NoSwitchFound(format!(
            "all {THRESHOLD_GRID} probes on [{lo}, {hi}] at order {} are {state} (lambda:parts {})",
            config.approx_order,
            parts.join(" ")
        )));
    };
    let non_monotone = probes[g..].iter().any(|p| p.is_interval) || g == 0;
    if g == 0 {
        // gapped at the low end: bracket the first switch from gapped to interval
        let i = first_interval.expect("checked");
        return bisect(&probe, &mut probes, (grid[i - 1], grid[i]), false, bisection_steps, &config, range, non_monotone);
    }
    bisect(&probe, &mut probes, (grid[g - 1], grid[g]), true, bisection_steps, &config, range, non_monotone)
}

#[allow(clippy::too_many_arguments)]
fn bisect<P>(
    probe: &P,
    probes: &mut Vec<ThresholdProbe>,
    bracket: (f64, f64),
    low_is_interval: bool,
    steps: usize,
    config: &ExperimentConfig,
    range: (f64, f64),
    non_monotone: bool,
) -> Result<ThresholdReport, PipelineError>
where
    P: Fn(f64) -> Result<ThresholdProbe, PipelineError>,
{
    let (mut a, mut b) = bracket;
    for _ in 0..steps {
        let m = 0.5 * (a + b);
        let p = probe(m)?;
        if p.is_interval == low_is_interval {
            a = m;
        } else {
            b = m;
        }
        probes.push(p);
    }
    Ok(ThresholdReport {
        approx_order: config.approx_order,
        range,
        lambda_star: 0.5 * (a + b),
        bracket: (a, b),
        bisection_steps: steps,
        probes: std::mem::take(probes),
        non_monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub tau: ExtReal,
    pub gamma: f64,
    pub diam: f64,
    pub parts: usize,
    pub closed_gaps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessSweep {
    pub freq_spec: FrequencySpec,
    pub approx_order: usize,
    pub edge_tol: f64,
    pub rows: Vec<SweepRow>,
    /// Whether τ strictly increases along the (descending) sweep.
    pub increasing: bool,
}

/// `τ(Σ_λ)` for each `λ` (nonzero, sorted descending) at a fixed order.
pub fn thickness_sweep(
    spec: &FrequencySpec,
    lambdas: &[f64],
    approx_order: usize,
    edge_tol: f64,
) -> Result<ThicknessSweep, PipelineError> {
    if lambdas.is_empty() {
        return Err(PipelineError::InvalidArgument("empty coupling list".into()));
    }
    if lambdas.iter().any(|l| !(l.abs() > 0.0)) {
        return Err(PipelineError::InvalidArgument("couplings must be nonzero (0<|λ|)".into()));
    }
    if lambdas.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(PipelineError::InvalidArgument("couplings must be sorted descending".into()));
    }
    let rows: Vec<SweepRow> = lambdas
        .par_iter()
        .map(|&lambda| {
            let s = spectrum_irrational(lambda, spec, approx_order, edge_tol, default_gap_close_tol(lambda))
                .map_err(|source| PipelineError::Spectrum { lambdas: vec![lambda], source })?;
            let th = thickness(&s.union);
            Ok(SweepRow {
                lambda,
                tau: th.tau,
                gamma: th.gamma,
                diam: th.diam,
                parts: s.union.len(),
                closed_gaps: s.closed_gaps,
            })
        })
        .collect::<Result<_, PipelineError>>()?;
    let increasing = rows.windows(2).all(|w| w[1].tau > w[0].tau);
    Ok(ThicknessSweep { freq_spec: spec.clone(), approx_order, edge_tol, rows, increasing })
}

//! Evaluators for the perturbation, gap-length and thickness bounds, and
//! empirical fits of the constants they depend on.
//!
//! The constants are existence-quantified in the theory; every evaluation here
//! is conditional on the parameters being in the small-coupling regime.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::LabelReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("invalid bound parameters: {0}")]
    InvalidParams(String),
    #[error("coupling {lambda} has {found} usable labeled gaps, at least 3 needed")]
    InsufficientLabels { lambda: f64, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Number of frequencies.
    pub b: u32,
    pub c: f64,
    pub t: f64,
    pub c_h: f64,
    /// Hölder exponent.
    pub h: f64,
    /// Gap-decay rate.
    pub c_e: f64,
    /// Gap-decay prefactor `C(λ)`.
    pub c_lambda: f64,
    /// `|v|_{r0}`.
    pub v_norm: f64,
    pub r0: f64,
    pub r: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self { b: 1, c: 1.0, t: 2.0, c_h: 1.0, h: 0.5, c_e: 1.0, c_lambda: 1.0, v_norm: 1e-3, r0: 1.0, r: 0.5 }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), BoundsError> {
        let bad = |what: &str| Err(BoundsError::InvalidParams(what.to_string()));
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if self.b < 1 {
            return bad("b must be >= 1");
        }
        if !pos(self.c) {
            return bad("c must be > 0");
        }
        if !(self.t > self.b as f64 && self.t.is_finite()) {
            return bad("t must be > b");
        }
        if !pos(self.c_h) {
            return bad("C_H must be > 0");
        }
        if !(self.h > 0.0 && self.h <= 1.0) {
            return bad("h must lie in (0, 1]");
        }
        if !pos(self.c_e) {
            return bad("C_E must be > 0");
        }
        if !pos(self.c_lambda) {
            return bad("C_lambda must be > 0");
        }
        if !pos(self.v_norm) {
            return bad("v_norm must be > 0");
        }
        if !pos(self.r0) {
            return bad("r0 must be > 0");
        }
        if !(self.r > 0.0 && self.r < self.r0) {
            return bad("r must lie in (0, r0)");
        }
        Ok(())
    }
}

/// `(2|λ|, 4|λ|)`: bounds on the Hausdorff distance of the spectrum to
/// `[−2, 2]` and on `|diam − 4|`, from `‖V‖ = 2|λ|`.
pub fn perturbation_bounds(lambda: f64) -> (f64, f64) {
    (2.0 * lambda.abs(), 4.0 * lambda.abs())
}

/// `|v|_{r0}^{2/3} · e^{−2πr‖n‖}` for a label `n ∈ ℤ^b \ {0}`, with the
/// Euclidean norm.
pub fn gap_length_bound(params: &BoundParams, n: &[i64]) -> Result<f64, BoundsError> {
    params.validate()?;
    if n.len() != params.b as usize {
        return Err(BoundsError::InvalidArgument(format!("label has {} entries, b = {}", n.len(), params.b)));
    }
    if n.iter().all(|&k| k == 0) {
        return Err(BoundsError::InvalidArgument("label must be nonzero".into()));
    }
    let norm = n.iter().map(|&k| (k as f64).powi(2)).sum::<f64>().sqrt();
    Ok(params.v_norm.powf(2.0 / 3.0) * (-2.0 * std::f64::consts::PI * params.r * norm).exp())
}

/// `(c/C_H)^{1/h} / (C(λ)·e^{−C_E κ}·(2κ)^{(t−1)/h})`.
pub fn thickness_lower_bound(params: &BoundParams, kappa: f64) -> Result<f64, BoundsError> {
    params.validate()?;
    if !(kappa > 0.0) {
        return Err(BoundsError::InvalidArgument(format!("kappa must be > 0, got {kappa}")));
    }
    let num = (params.c / params.c_h).powf(1.0 / params.h);
    let den = params.c_lambda
        * (-params.c_e * kappa).exp()
        * (2.0 * kappa).powf((params.t - 1.0) / params.h);
    Ok(num / den)
}

/// `κ = −ln(gap_length / C(λ)) / C_E`, so that `gap_length = C(λ)·e^{−C_E κ}`.
pub fn kappa(params: &BoundParams, gap_length: f64) -> Result<f64, BoundsError> {
    params.validate()?;
    if !(gap_length > 0.0) {
        return Err(BoundsError::InvalidArgument(format!("gap length must be > 0, got {gap_length}")));
    }
    Ok(-(gap_length / params.c_lambda).ln() / params.c_e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub lambda: f64,
    /// Rate fitted to this coupling alone.
    pub rate: f64,
    /// Smallest prefactor with `len ≤ C(λ)·e^{−C_E |n|}` on every pair, at the shared rate.
    pub c_lambda: f64,
    /// Raw `(|n|, gap length)` pairs.
    pub pairs: Vec<(u64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapDecayFit {
    /// Shared rate `C_E`, least squares of `ln(len)` on `|n|` with a separate
    /// intercept per coupling.
    pub c_e: f64,
    pub rows: Vec<DecayRow>,
    /// Whether `C(λ)` decreases as `|λ|` decreases along the sweep.
    pub c_lambda_decreasing: bool,
}

/// Fit `len ≤ C(λ)·e^{−C_E |n|}` to labeled gaps at several couplings.
pub fn fit_gap_decay(sweep: &[(f64, LabelReport)]) -> Result<GapDecayFit, BoundsError> {
    if sweep.len() < 3 {
        return Err(BoundsError::InvalidArgument(format!("need labeled spectra for >= 3 couplings, got {}", sweep.len())));
    }
    let mut rows: Vec<(f64, Vec<(u64, f64)>)> = Vec::with_capacity(sweep.len());
    for (lambda, report) in sweep {
        let pairs: Vec<(u64, f64)> = report
            .labeled
            .iter()
            .filter(|a| a.gap.len() > 0.0)
            .map(|a| (a.label_n.unsigned_abs(), a.gap.len()))
            .collect();
        if pairs.len() < 3 {
            return Err(BoundsError::InsufficientLabels { lambda: *lambda, found: pairs.len() });
        }
        rows.push((*lambda, pairs));
    }
    let centered = |pairs: &[(u64, f64)]| -> (f64, f64) {
        let m = pairs.len() as f64;
        let mx = pairs.iter().map(|p| p.0 as f64).sum::<f64>() / m;
        let my = pairs.iter().map(|p| p.1.ln()).sum::<f64>() / m;
        let sxx: f64 = pairs.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
        let sxy: f64 = pairs.iter().map(|p| (p.0 as f64 - mx) * (p.1.ln() - my)).sum();
        (sxx, sxy)
    };
    let (sxx, sxy) = rows
        .iter()
        .map(|(_, p)| centered(p))
        .fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
    if sxx == 0.0 {
        return Err(BoundsError::InvalidArgument("all labels share one |n|; no rate can be fitted".into()));
    }
    let c_e = -sxy / sxx;
    if !(c_e > 0.0) {
        return Err(BoundsError::InvalidArgument(format!("fitted rate {c_e} is not positive")));
    }
    let rows: Vec<DecayRow> = rows
        .into_iter()
        .map(|(lambda, pairs)| {
            let (sxx, sxy) = centered(&pairs);
            let rate = if sxx > 0.0 { -sxy / sxx } else { f64::NAN };
            let c_lambda = pairs
                .iter()
                .map(|&(n, len)| len * (c_e * n as f64).exp())
                .fold(0.0, f64::max);
            DecayRow { lambda, rate, c_lambda, pairs }
        })
        .collect();
    let mut by_coupling: Vec<&DecayRow> = rows.iter().collect();
    by_coupling.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()));
    let c_lambda_decreasing = by_coupling.windows(2).all(|w| w[0].c_lambda <= w[1].c_lambda);
    Ok(GapDecayFit { c_e, rows, c_lambda_decreasing })
}

//! Integrated density of states by Sturm counting on Dirichlet truncations.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amo::SpectrumResult;
use crate::dioph::{frac_multiples, DiophError, FrequencySpec};
use crate::setalg::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Hölder fit needs at least two pairs with distinct nonzero increments, got {0}")]
    DegenerateFit(usize),
    #[error(transparent)]
    Dioph(#[from] DiophError),
}

pub const DEFAULT_PHASE_AVG: usize = 8;
pub const DEFAULT_N_MAX: u64 = 60;

/// Default labeling tolerance `max(5/N, 1e-4)`.
pub fn default_label_tol(volume: usize) -> f64 {
    (5.0 / volume as f64).max(1e-4)
}

/// Operator parameters for the IDS. The frequency may be irrational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdsParams {
    pub lambda: f64,
    pub freq: FrequencySpec,
    pub phase: f64,
}

impl IdsParams {
    pub fn new(lambda: f64, freq: FrequencySpec, phase: f64) -> Self {
        Self { lambda, freq, phase }
    }

    /// Diagonal `a_k = 2λ cos(2π(kα + ω))` for `k = 1..=n`.
    fn diagonal(&self, n: usize, phase: f64) -> Vec<f64> {
        let two_lambda = 2.0 * self.lambda;
        match &self.freq {
            FrequencySpec::Rational(r) => {
                let r = r.mod_one();
                (1..=n as i64)
                    .map(|k| {
                        let m = (k as i128 * r.p as i128).rem_euclid(r.q as i128) as f64;
                        two_lambda * (2.0 * PI * (m / r.q as f64 + phase)).cos()
                    })
                    .collect()
            }
            spec => {
                let alpha = spec.to_f64().rem_euclid(1.0);
                (1..=n)
                    .map(|k| two_lambda * (2.0 * PI * ((k as f64 * alpha).fract() + phase)).cos())
                    .collect()
            }
        }
    }
}

/// Number of eigenvalues `≤ x` of the symmetric tridiagonal matrix with
/// diagonal `diag` and unit off-diagonals.
///
/// A zero pivot means `x` is an eigenvalue of a leading block; it is replaced
/// by `-1e-300`, which counts it as `≤ x`.
pub fn sturm_count(diag: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (k, &a) in diag.iter().enumerate() {
        d = if k == 0 { a - x } else { a - x - 1.0 / d };
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// `(#eigenvalues ≤ x of the N×N Dirichlet truncation) / N` at phase `params.phase`.
pub fn count_below(params: &IdsParams, volume: usize, x: f64) -> Result<f64, IdsError> {
    check_volume(volume)?;
    let diag = params.diagonal(volume, params.phase);
    Ok(sturm_count(&diag, x) as f64 / volume as f64)
}

fn check_volume(volume: usize) -> Result<(), IdsError> {
    if volume < 2 {
        return Err(IdsError::InvalidArgument(format!("volume must be >= 2, got {volume}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdsCurve {
    pub params: IdsParams,
    pub volume: usize,
    pub phase_avg: usize,
    pub samples: Vec<(f64, f64)>,
}

impl IdsCurve {
    /// Value at `x`, linearly interpolated between samples and clamped
    /// outside the sampled range.
    pub fn value_at(&self, x: f64) -> f64 {
        let s = &self.samples;
        let i = s.partition_point(|p| p.0 < x);
        if i < s.len() && s[i].0 == x {
            return s[i].1;
        }
        if i == 0 {
            return s[0].1;
        }
        if i == s.len() {
            return s[s.len() - 1].1;
        }
        let (x0, y0) = s[i - 1];
        let (x1, y1) = s[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// CSV with columns `x,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in &self.samples {
            out.push_str(&format!("{x:?},{v:?}\n"));
        }
        out
    }
}

/// IDS on `grid`, averaged over `phase_avg` phases `ω + j/phase_avg`.
pub fn ids_curve(params: &IdsParams, volume: usize, phase_avg: usize, grid: &[f64]) -> Result<IdsCurve, IdsError> {
    check_volume(volume)?;
    if phase_avg < 1 {
        return Err(IdsError::InvalidArgument("phase_avg must be >= 1".into()));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(IdsError::InvalidArgument("grid must be sorted".into()));
    }
    let diags: Vec<Vec<f64>> = (0..phase_avg)
        .map(|j| params.diagonal(volume, params.phase + j as f64 / phase_avg as f64))
        .collect();
    let total = (volume * phase_avg) as f64;
    let samples = grid
        .par_iter()
        .map(|&x| {
            let c: usize = diags.iter().map(|d| sturm_count(d, x)).sum();
            (x, c as f64 / total)
        })
        .collect();
    Ok(IdsCurve { params: params.clone(), volume, phase_avg, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapLabelAssignment {
    pub gap_index: usize,
    pub gap: Interval,
    pub label_n: i64,
    pub ids_value: f64,
    pub residual: f64,
}

/// A bounded gap for which no `|n| ≤ n_max` met the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoLabel {
    pub gap_index: usize,
    pub gap: Interval,
    pub ids_value: f64,
    pub best_n: i64,
    pub best_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelReport {
    pub n_max: u64,
    pub tol: f64,
    pub labeled: Vec<GapLabelAssignment>,
    pub unlabeled: Vec<NoLabel>,
}

/// Label every bounded gap of `spectrum` by the `n` minimizing
/// `|N(midpoint) − frac(nα)|`, with `α` the curve's frequency.
/// Ties go to the smaller `|n|`, then to positive `n`.
pub fn label_gaps(spectrum: &SpectrumResult, curve: &IdsCurve, n_max: u64, tol: f64) -> Result<LabelReport, IdsError> {
    if n_max < 1 {
        return Err(IdsError::InvalidArgument("n_max must be >= 1".into()));
    }
    let mut targets = frac_multiples(&curve.params.freq, n_max)?;
    targets.sort_by_key(|&(n, _)| (n.abs(), -n));
    let mut labeled = Vec::new();
    let mut unlabeled = Vec::new();
    for (gap_index, gap) in spectrum.union.bounded_gaps().into_iter().enumerate() {
        let ids_value = curve.value_at(gap.midpoint());
        let (best_n, best_residual) = targets
            .iter()
            .map(|&(n, v)| (n, (ids_value - v).abs()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        if best_residual <= tol {
            labeled.push(GapLabelAssignment { gap_index, gap, label_n: best_n, ids_value, residual: best_residual });
        } else {
            unlabeled.push(NoLabel { gap_index, gap, ids_value, best_n, best_residual });
        }
    }
    Ok(LabelReport { n_max, tol, labeled, unlabeled })
}

/// IDS sampled at the gap midpoints of `spectrum`, ready for [`label_gaps`].
pub fn ids_at_gaps(params: &IdsParams, spectrum: &SpectrumResult, volume: usize, phase_avg: usize) -> Result<IdsCurve, IdsError> {
    let grid: Vec<f64> = spectrum.union.bounded_gaps().iter().map(Interval::midpoint).collect();
    ids_curve(params, volume, phase_avg, &grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderSampling {
    /// Both points uniform in the hull.
    Uniform,
    /// One point at a hull edge, the other at a log-uniform distance inside.
    EdgeConcentrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub c_h: f64,
    pub h: f64,
    pub pairs_used: usize,
    pub sampling: HolderSampling,
}

/// Fit `|N(x) − N(y)| ≈ C_H |x − y|^h` over random pairs.
///
/// `h` is the least-squares slope in log-log coordinates over pairs with a
/// nonzero increment; `C_H` is then the smallest constant with
/// `|N(x) − N(y)| ≤ C_H |x − y|^h` on every sampled pair.
pub fn estimate_holder(
    sweep: &[(IdsParams, Interval)],
    volume: usize,
    phase_avg: usize,
    pairs: usize,
    sampling: HolderSampling,
    seed: u64,
) -> Result<HolderFit, IdsError> {
    if pairs < 100 {
        return Err(IdsError::InvalidArgument(format!("pairs must be >= 100, got {pairs}")));
    }
    if sweep.is_empty() {
        return Err(IdsError::InvalidArgument("empty parameter sweep".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<(usize, f64, f64)> = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let k = i % sweep.len();
        let hull = sweep[k].1;
        let (x, y) = match sampling {
            HolderSampling::Uniform => (rng.gen_range(hull.lo..=hull.hi), rng.gen_range(hull.lo..=hull.hi)),
            HolderSampling::EdgeConcentrated => {
                let width = hull.len();
                let d = width * 10f64.powf(rng.gen_range(-4.0..-1.0));
                if rng.gen_bool(0.5) {
                    (hull.lo, hull.lo + d)
                } else {
                    (hull.hi - d, hull.hi)
                }
            }
        };
        points.push((k, x, y));
    }
    let curves: Vec<IdsCurve> = sweep
        .iter()
        .enumerate()
        .map(|(k, (params, _))| {
            let mut grid: Vec<f64> =
                points.iter().filter(|p| p.0 == k).flat_map(|p| [p.1, p.2]).collect();
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            ids_curve(params, volume, phase_avg, &grid)
        })
        .collect::<Result<_, _>>()?;
    let obs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(k, x, y)| ((x - y).abs(), (curves[k].value_at(x) - curves[k].value_at(y)).abs()))
        .filter(|&(dx, dn)| dx > 0.0 && dn > 0.0)
        .collect();
    if obs.len() < 2 {
        return Err(IdsError::DegenerateFit(obs.len()));
    }
    let logs: Vec<(f64, f64)> = obs.iter().map(|&(dx, dn)| (dx.ln(), dn.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(IdsError::DegenerateFit(obs.len()));
    }
    let h = sxy / sxx;
    let c_h = obs.iter().map(|&(dx, dn)| dn / dx.powf(h)).fold(0.0, f64::max);
    Ok(HolderFit { c_h, h, pairs_used: obs.len(), sampling })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dioph::Rational;

    fn free() -> IdsParams {
        IdsParams::new(0.0, FrequencySpec::golden_mean(), 0.0)
    }

    #[test]
    fn outside_the_hull() {
        let p = IdsParams::new(0.7, FrequencySpec::golden_mean(), 0.1);
        assert_eq!(count_below(&p, 500, -3.41).unwrap(), 0.0);
        assert_eq!(count_below(&p, 500, 3.41).unwrap(), 1.0);
    }

    #[test]
    fn free_half_filling() {
        for n in [2, 10, 1000, 20000] {
            assert_eq!(count_below(&free(), n, 0.0).unwrap(), 0.5, "N = {n}");
        }
    }

    #[test]
    fn free_profile_matches_arccos() {
        // free IDS is 1 − arccos(x/2)/π; the Dirichlet truncation differs by O(1/N)
        let n = 4000;
        for x in [-1.5, -0.7, 0.3, 1.2] {
            let want = 1.0 - (x / 2.0f64).acos() / PI;
            let got = count_below(&free(), n, x).unwrap();
            assert!((got - want).abs() <= 2.0 / n as f64, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn zero_pivot_counts_as_at_or_below() {
        // diag (0, 0): eigenvalues ±1; at x = 1 both are ≤ x
        assert_eq!(sturm_count(&[0.0, 0.0], 1.0), 2);
        assert_eq!(sturm_count(&[0.0, 0.0], -1.0), 1);
        assert_eq!(sturm_count(&[0.0], 0.0), 1);
    }

    #[test]
    fn curve_clamps_and_is_monotone() {
        let p = IdsParams::new(0.4, FrequencySpec::golden_mean(), 0.0);
        let grid: Vec<f64> = (0..=60).map(|i| -4.0 + 8.0 * i as f64 / 60.0).collect();
        let c = ids_curve(&p, 400, 4, &grid).unwrap();
        assert_eq!(c.samples[0].1, 0.0);
        assert_eq!(c.samples.last().unwrap().1, 1.0);
        assert!(c.samples.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(ids_curve(&p, 400, 4, &[1.0, 0.0]).is_err());
        assert!(c.to_csv().starts_with("x,value\n-4.0,0.0\n"));
    }

    #[test]
    fn value_at_interpolates() {
        let c = IdsCurve { params: free(), volume: 2, phase_avg: 1, samples: vec![(0.0, 0.0), (1.0, 0.5)] };
        assert_eq!(c.value_at(0.5), 0.25);
        assert_eq!(c.value_at(-1.0), 0.0);
        assert_eq!(c.value_at(2.0), 0.5);
        assert_eq!(c.value_at(1.0), 0.5);
    }

    #[test]
    fn rational_labels_quantize() {
        let f = Rational::new(2, 5).unwrap();
        let s = crate::amo::spectrum_rational(0.5, f, 1e-10, 1e-8).unwrap();
        let p = IdsParams::new(0.5, FrequencySpec::Rational(f), 0.0);
        let c = ids_at_gaps(&p, &s, 5000, 8).unwrap();
        let r = label_gaps(&s, &c, 10, default_label_tol(5000)).unwrap();
        assert_eq!(r.labeled.len(), 4);
        let mut classes: Vec<i64> = r.labeled.iter().map(|a| (a.label_n * 2).rem_euclid(5)).collect();
        for a in &r.labeled {
            let v = (a.ids_value * 5.0).round();
            assert!((a.ids_value - v / 5.0).abs() <= default_label_tol(5000));
            assert!(v >= 1.0 && v <= 4.0);
        }
        classes.sort();
        assert_eq!(classes, vec![1, 2, 3, 4]);
    }

    #[test]
    fn holder_free_edges() {
        let sweep = vec![(free(), Interval { lo: -2.0, hi: 2.0 })];
        let fit = estimate_holder(&sweep, 4000, 4, 200, HolderSampling::EdgeConcentrated, 7).unwrap();
        assert!(fit.h > 0.0 && fit.h <= 0.55, "{fit:?}");
        assert!(estimate_holder(&sweep, 4000, 4, 10, HolderSampling::Uniform, 7).is_err());
        let u = estimate_holder(&sweep, 1000, 2, 100, HolderSampling::Uniform, 7).unwrap();
        assert!(u.h > 0.0);
    }
}

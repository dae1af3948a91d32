//! Almost Mathieu spectra at rational frequencies.
//!
//! For `α = p/q` the operator
//! `(Hψ)(n) = ψ(n+1) + ψ(n−1) + 2λ cos(2π(nα + ω)) ψ(n)` is `q`-periodic and
//! its spectrum is `{E : |t(E, ω)| ≤ 2}`, where `t` is the trace of the
//! period transfer matrix. The trace splits as
//! `t(E, ω) = Δ(E) + A cos(2πqω) + B sin(2πqω)` with `Δ` a monic degree-`q`
//! polynomial, so the union over all phases is `{E : |Δ(E)| ≤ 2 + √(A²+B²)}`.
//!
//! Band edges are found by a sign-change scan followed by bisection. The
//! Bloch-matrix eigenvalue sweep in [`bloch_oracle`] computes the same sets
//! by a route that never touches the trace.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dioph::{convergent, DiophError, FrequencySpec, Rational};
use crate::setalg::{make_union, Interval, IntervalUnion};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmoError {
    #[error("band-edge search failed: {0}")]
    EdgeFindingFailure(String),
    #[error("trace model residual {residual:e} exceeds bound {bound:e}")]
    ModelMismatch { residual: f64, bound: f64 },
    #[error("|lambda| = {lambda} > 1 with q = {q} > 40 overflows the transfer products")]
    UnsupportedCoupling { lambda: f64, q: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Dioph(#[from] DiophError),
}

pub const DEFAULT_EDGE_TOL: f64 = 1e-10;

/// Default gap-closing tolerance, `1e-9·(4 + 4|λ|)`.
pub fn default_gap_close_tol(lambda: f64) -> f64 {
    1e-9 * (4.0 + 4.0 * lambda.abs())
}

/// Largest period for which `|λ| > 1` is accepted.
pub const MAX_Q_STRONG_COUPLING: i64 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmoParams {
    pub lambda: f64,
    /// Frequency, reduced into `[0, 1)`.
    pub freq: Rational,
    /// Phase `ω ∈ [0, 1)`.
    pub phase: f64,
}

impl AmoParams {
    pub fn new(lambda: f64, freq: Rational, phase: f64) -> Self {
        Self { lambda, freq: freq.mod_one(), phase: phase.rem_euclid(1.0) }
    }

    /// `2λ cos(2π(nα + ω))`, with `nα mod 1` reduced exactly.
    pub fn potential(&self, n: i64) -> f64 {
        let r = (n as i128 * self.freq.p as i128).rem_euclid(self.freq.q as i128) as f64;
        2.0 * self.lambda * (2.0 * PI * (r / self.freq.q as f64 + self.phase)).cos()
    }
}

pub type Mat2 = [[f64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// One-step transfer matrix `[[E − V(n), −1], [1, 0]]`.
pub fn transfer_matrix(energy: f64, params: &AmoParams, n: i64) -> Mat2 {
    [[energy - params.potential(n), -1.0], [1.0, 0.0]]
}

/// `T(q)···T(1)`.
pub fn period_matrix(energy: f64, params: &AmoParams) -> Mat2 {
    (1..=params.freq.q).fold([[1.0, 0.0], [0.0, 1.0]], |acc, n| {
        mat_mul(&transfer_matrix(energy, params, n), &acc)
    })
}

/// `t(E, ω) = tr[T(q)···T(1)]`, via the scalar recursion on both columns.
pub fn period_trace(energy: f64, params: &AmoParams) -> f64 {
    // columns (u_n, u_{n-1}) starting from e1 and e2
    let (mut a1, mut a0) = (1.0, 0.0);
    let (mut b1, mut b0) = (0.0, 1.0);
    for n in 1..=params.freq.q {
        let d = energy - params.potential(n);
        (a1, a0) = (d * a1 - a0, a1);
        (b1, b0) = (d * b1 - b0, b1);
    }
    a1 + b0
}

/// Period trace with an estimate of its rounding error and its derivative
/// in `E`.
///
/// The error estimate is `8·(q+1)·ε` times the largest intermediate value of
/// the recursion: each step rounds relative to the values it produces.
pub fn period_trace_with_error(energy: f64, params: &AmoParams) -> (f64, f64, f64) {
    let (mut a1, mut a0) = (1.0, 0.0);
    let (mut b1, mut b0) = (0.0, 1.0);
    let (mut da1, mut da0) = (0.0, 0.0);
    let (mut db1, mut db0) = (0.0, 0.0);
    let mut peak = 1.0f64;
    for n in 1..=params.freq.q {
        let d = energy - params.potential(n);
        (da1, da0) = (a1 + d * da1 - da0, da1);
        (db1, db0) = (b1 + d * db1 - db0, db1);
        (a1, a0) = (d * a1 - a0, a1);
        (b1, b0) = (d * b1 - b0, b1);
        peak = peak.max(a1.abs()).max(b1.abs());
    }
    let err = 8.0 * (params.freq.q as f64 + 1.0) * f64::EPSILON * peak;
    (a1 + b0, err, da1 + db0)
}

fn check_regime(lambda: f64, freq: &Rational) -> Result<(), AmoError> {
    if !lambda.is_finite() {
        return Err(AmoError::InvalidArgument(format!("lambda must be finite, got {lambda}")));
    }
    if freq.q > MAX_Q_STRONG_COUPLING && lambda.abs() > 1.0 {
        return Err(AmoError::UnsupportedCoupling { lambda, q: freq.q });
    }
    Ok(())
}

/// Phase sample points where `cos(2πqω)` is `1`, `0`, `−1` and `sin` is `0`, `1`, `0`.
fn phase_triple(q: i64) -> [f64; 3] {
    let q = q as f64;
    [0.0, 1.0 / (4.0 * q), 1.0 / (2.0 * q)]
}

/// `(Δ(E), A, B)` from the trace at the three reference phases.
fn trace_components(energy: f64, lambda: f64, freq: Rational) -> (f64, f64, f64) {
    let [w0, w1, w2] = phase_triple(freq.q);
    let t0 = period_trace(energy, &AmoParams::new(lambda, freq, w0));
    let t1 = period_trace(energy, &AmoParams::new(lambda, freq, w1));
    let t2 = period_trace(energy, &AmoParams::new(lambda, freq, w2));
    let delta = 0.5 * (t0 + t2);
    (delta, 0.5 * (t0 - t2), t1 - delta)
}

/// Phase-independent part of the period trace, evaluated directly.
pub fn delta(energy: f64, lambda: f64, freq: Rational) -> f64 {
    let [w0, _, w2] = phase_triple(freq.q);
    0.5 * (period_trace(energy, &AmoParams::new(lambda, freq, w0))
        + period_trace(energy, &AmoParams::new(lambda, freq, w2)))
}

fn delta_eval(energy: f64, lambda: f64, freq: Rational) -> TraceEval {
    let [w0, _, w2] = phase_triple(freq.q);
    let (t0, e0, d0) = period_trace_with_error(energy, &AmoParams::new(lambda, freq, w0));
    let (t2, e2, d2) = period_trace_with_error(energy, &AmoParams::new(lambda, freq, w2));
    TraceEval {
        value: 0.5 * (t0 + t2),
        err: 0.5 * (e0 + e2) + f64::EPSILON * (t0.abs() + t2.abs()),
        slope: 0.5 * (d0 + d2),
    }
}

fn trace_eval(energy: f64, params: &AmoParams) -> TraceEval {
    let (value, err, slope) = period_trace_with_error(energy, params);
    TraceEval { value, err, slope }
}

/// `Δ(E)` as a Chebyshev interpolant plus the phase amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceModel {
    pub lambda: f64,
    pub freq: Rational,
    /// Monomial coefficients of `Δ`, constant term first.
    pub delta_coeffs: Vec<f64>,
    /// Chebyshev coefficients of `Δ` on `[-domain, domain]`.
    pub cheb_coeffs: Vec<f64>,
    pub domain: f64,
    pub a: f64,
    pub b: f64,
    pub amp: f64,
    pub fit_residual: f64,
    pub residual_bound: f64,
}

impl TraceModel {
    /// Clenshaw evaluation of the interpolant.
    pub fn delta(&self, energy: f64) -> f64 {
        let x = energy / self.domain;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.cheb_coeffs.iter().skip(1).rev() {
            (b1, b2) = (2.0 * x * b1 - b2 + c, b1);
        }
        x * b1 - b2 + self.cheb_coeffs[0]
    }

    pub fn trace(&self, energy: f64, phase: f64) -> f64 {
        let arg = 2.0 * PI * self.freq.q as f64 * phase;
        self.delta(energy) + self.a * arg.cos() + self.b * arg.sin()
    }
}

/// Pick `(A, B)` at the energy where the three-phase differences are best
/// conditioned, and report their spread across the probe energies.
fn phase_coefficients(lambda: f64, freq: Rational, probes: &[f64]) -> (f64, f64, f64) {
    let comps: Vec<(f64, f64, f64)> =
        probes.iter().map(|&e| trace_components(e, lambda, freq)).collect();
    let best = comps
        .iter()
        .min_by(|x, y| (x.0.abs() + x.1.abs()).total_cmp(&(y.0.abs() + y.1.abs())))
        .expect("at least one probe");
    let spread = comps
        .iter()
        .map(|c| ((c.1 - best.1).abs() + (c.2 - best.2).abs()) / (1.0 + c.0.abs()))
        .fold(0.0, f64::max);
    (best.1, best.2, spread)
}

/// Fit `t(E, ω) = Δ(E) + A cos(2πqω) + B sin(2πqω)` and validate it on random
/// `(E, ω)` samples in the spectral hull.
///
/// The residual bound is `1e-8·(1+|λ|)^q`, scaled by `max(1, |t|)` over the
/// validation set since `t` itself is only known to relative precision.
pub fn fit_trace_model(lambda: f64, freq: Rational) -> Result<TraceModel, AmoError> {
    let freq = freq.mod_one();
    check_regime(lambda, &freq)?;
    let q = freq.q as usize;
    let domain = 2.0 + 2.0 * lambda.abs();
    let nodes: Vec<f64> =
        (0..=q).map(|k| domain * (PI * (k as f64 + 0.5) / (q as f64 + 1.0)).cos()).collect();
    let comps: Vec<(f64, f64, f64)> =
        nodes.iter().map(|&e| trace_components(e, lambda, freq)).collect();

    // Chebyshev coefficients from values at the first-kind nodes
    let m = q + 1;
    let cheb_coeffs: Vec<f64> = (0..m)
        .map(|j| {
            let s: f64 = comps
                .iter()
                .enumerate()
                .map(|(k, c)| c.0 * (PI * j as f64 * (k as f64 + 0.5) / m as f64).cos())
                .sum();
            if j == 0 {
                s / m as f64
            } else {
                2.0 * s / m as f64
            }
        })
        .collect();
    let delta_coeffs = chebyshev_to_monomial(&cheb_coeffs, domain);

    let (a, b, _) = phase_coefficients(lambda, freq, &nodes);
    let mut model = TraceModel {
        lambda,
        freq,
        delta_coeffs,
        cheb_coeffs,
        domain,
        a,
        b,
        amp: a.hypot(b),
        fit_residual: 0.0,
        residual_bound: 0.0,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ freq.q as u64);
    let mut residual = 0.0f64;
    let mut scale = 1.0f64;
    for _ in 0..64 {
        let e = rng.gen_range(-domain..=domain);
        let w = rng.gen_range(0.0..1.0);
        let t = period_trace(e, &AmoParams::new(lambda, freq, w));
        residual = residual.max((t - model.trace(e, w)).abs());
        scale = scale.max(t.abs());
    }
    let bound = 1e-8 * (1.0 + lambda.abs()).powi(q as i32) * scale;
    model.fit_residual = residual;
    model.residual_bound = bound;
    if !(residual <= bound) {
        return Err(AmoError::ModelMismatch { residual, bound });
    }
    Ok(model)
}

/// Convert Chebyshev coefficients on `[-r, r]` to monomial coefficients in `E`.
fn chebyshev_to_monomial(cheb: &[f64], r: f64) -> Vec<f64> {
    let n = cheb.len();
    let mut out = vec![0.0; n];
    // T_k(x) polynomials in x, built by recurrence
    let mut t_prev = vec![0.0; n];
    let mut t_cur = vec![0.0; n];
    t_prev[0] = 1.0;
    if n > 1 {
        t_cur[1] = 1.0;
    }
    for (k, &c) in cheb.iter().enumerate() {
        let tk = if k == 0 { &t_prev } else { &t_cur };
        for (o, &t) in out.iter_mut().zip(tk) {
            *o += c * t;
        }
        if k >= 1 && k + 1 < n {
            let mut next = vec![0.0; n];
            for i in 0..n - 1 {
                next[i + 1] += 2.0 * t_cur[i];
            }
            for i in 0..n {
                next[i] -= t_prev[i];
            }
            t_prev = std::mem::replace(&mut t_cur, next);
        }
    }
    // substitute x = E / r
    let mut s = 1.0;
    for o in out.iter_mut() {
        *o *= s;
        s /= r;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub params: AmoParams,
    /// Convergent index the frequency was taken from; `0` for a rational input.
    pub approx_order: usize,
    /// The frequency as specified, when it came from a frequency spec.
    pub freq_spec: Option<String>,
    pub union: IntervalUnion,
    /// True when the set is the union over all phases.
    pub phase_union: bool,
    pub edge_tol: f64,
    pub gap_close_tol: f64,
    /// Amplitude of the phase-dependent part of the trace.
    pub amp: f64,
    /// Gaps narrower than `gap_close_tol` that were merged.
    pub closed_gaps: usize,
}

/// Value, rounding-error bound and derivative of a trace polynomial.
#[derive(Debug, Clone, Copy)]
struct TraceEval {
    value: f64,
    err: f64,
    slope: f64,
}

/// `{E ∈ [lo, hi] : |f(E)| ≤ level}` for a monic degree-`q` trace polynomial.
///
/// A periodic discriminant has `q − 1` real critical points and is monotone
/// between them, so the set meets each monotone piece in one interval whose
/// ends are found by bisection. Critical points are bracketed by sign changes
/// of `f'` on a grid of `max(1024, 64q)` nodes; the grid is refined (up to
/// three times) until exactly `q − 1` are found.
///
/// A critical value that clears `level` by less than its rounding-error bound
/// cannot be told apart from a tangency; such gaps are closed and counted in
/// the second return value.
fn level_set<F>(f: F, q: i64, level: f64, lo: f64, hi: f64, edge_tol: f64) -> Result<(Vec<Interval>, usize), AmoError>
where
    F: Fn(f64) -> TraceEval + Sync,
{
    let crit = critical_points(&f, q, lo, hi)?;
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(crit);
    knots.push(hi);
    let mut unresolved = 0;
    let vals: Vec<f64> = knots
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let e = f(x);
            let interior = i > 0 && i + 1 < knots.len();
            if interior && e.value.abs() > level && e.value.abs() - level <= e.err {
                unresolved += 1;
                level.copysign(e.value)
            } else {
                e.value
            }
        })
        .collect();
    for (end, v) in [(lo, vals[0]), (hi, vals[vals.len() - 1])] {
        if v.abs() <= level {
            return Err(AmoError::EdgeFindingFailure(format!("|f({end})| = {} inside the level set", v.abs())));
        }
    }

    let solve = |a: f64, b: f64, va: f64, target: f64| -> f64 {
        // f - target changes sign on [a, b]; va is f(a)
        let below_at_a = va < target;
        let (mut a, mut b) = (a, b);
        while b - a > edge_tol {
            let m = 0.5 * (a + b);
            if (f(m).value < target) == below_at_a {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let pieces: Vec<Option<Interval>> = (0..knots.len() - 1)
        .into_par_iter()
        .map(|i| {
            let (a, b, va, vb) = (knots[i], knots[i + 1], vals[i], vals[i + 1]);
            let (vmin, vmax) = (va.min(vb), va.max(vb));
            if vmax < -level || vmin > level {
                return None;
            }
            let increasing = vb >= va;
            // ends where the monotone piece enters and leaves [-level, level]
            let enter_target = if increasing { -level } else { level };
            let leave_target = if increasing { level } else { -level };
            let start = if va.abs() <= level { a } else { solve(a, b, va, enter_target) };
            let end = if vb.abs() <= level { b } else { solve(a, b, va, leave_target) };
            Some(Interval { lo: start, hi: end.max(start) })
        })
        .collect();
    Ok((pieces.into_iter().flatten().collect(), unresolved))
}

/// The `q − 1` zeros of `f'` in `(lo, hi)`, ascending.
fn critical_points<F>(f: &F, q: i64, lo: f64, hi: f64) -> Result<Vec<f64>, AmoError>
where
    F: Fn(f64) -> TraceEval + Sync,
{
    let want = (q - 1).max(0) as usize;
    if want == 0 {
        return Ok(Vec::new());
    }
    let base_nodes = (64 * q as usize).max(1024);
    let mut found = 0;
    for refine in 0..4 {
        let nodes = base_nodes << (2 * refine);
        let h = (hi - lo) / nodes as f64;
        let xs: Vec<f64> = (0..=nodes).map(|i| lo + h * i as f64).collect();
        let slopes: Vec<f64> = xs.par_iter().map(|&x| f(x).slope).collect();
        if slopes.iter().any(|v| !v.is_finite()) {
            return Err(AmoError::EdgeFindingFailure("non-finite derivative on the scan grid".into()));
        }
        let brackets: Vec<usize> =
            (0..nodes).filter(|&i| (slopes[i] < 0.0) != (slopes[i + 1] < 0.0)).collect();
        found = brackets.len();
        if found != want {
            continue;
        }
        return Ok(brackets
            .par_iter()
            .map(|&i| {
                let (mut a, mut b) = (xs[i], xs[i + 1]);
                let neg_at_a = slopes[i] < 0.0;
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if (f(m).slope < 0.0) == neg_at_a {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                0.5 * (a + b)
            })
            .collect());
    }
    Err(AmoError::EdgeFindingFailure(format!(
        "found {found} critical points of a degree-{q} discriminant, expected {want}"
    )))
}

fn scan_window(lambda: f64) -> (f64, f64) {
    let r = 2.0 + 2.0 * lambda.abs() + 1.0;
    (-r, r)
}

fn finish(
    params: AmoParams,
    bands: Vec<Interval>,
    phase_union: bool,
    edge_tol: f64,
    gap_close_tol: f64,
    amp: f64,
    unresolved: usize,
) -> Result<SpectrumResult, AmoError> {
    let raw = make_union(bands).map_err(|e| AmoError::EdgeFindingFailure(e.to_string()))?;
    let (union, closed) = raw.close_gaps(gap_close_tol);
    let closed_gaps = closed + unresolved;
    if union.len() as i64 > params.freq.q {
        return Err(AmoError::EdgeFindingFailure(format!(
            "{} bands for period {}",
            union.len(),
            params.freq.q
        )));
    }
    Ok(SpectrumResult {
        params,
        approx_order: 0,
        freq_spec: None,
        union,
        phase_union,
        edge_tol,
        gap_close_tol,
        amp,
        closed_gaps,
    })
}

fn check_tols(edge_tol: f64, gap_close_tol: f64) -> Result<(), AmoError> {
    if !(edge_tol > 0.0) {
        return Err(AmoError::InvalidArgument(format!("edge_tol must be positive, got {edge_tol}")));
    }
    if !(gap_close_tol >= 0.0) {
        return Err(AmoError::InvalidArgument(format!(
            "gap_close_tol must be non-negative, got {gap_close_tol}"
        )));
    }
    Ok(())
}

/// Amplitude of the phase-dependent part of the trace.
pub fn phase_amplitude(lambda: f64, freq: Rational) -> f64 {
    let (lo, hi) = (-2.0 - 2.0 * lambda.abs(), 2.0 + 2.0 * lambda.abs());
    let probes: Vec<f64> = (0..9).map(|i| lo + (hi - lo) * i as f64 / 8.0).collect();
    let (a, b, _) = phase_coefficients(lambda, freq.mod_one(), &probes);
    a.hypot(b)
}

/// Union over all phases of the spectra at `α = p/q`.
pub fn spectrum_rational(
    lambda: f64,
    freq: Rational,
    edge_tol: f64,
    gap_close_tol: f64,
) -> Result<SpectrumResult, AmoError> {
    check_tols(edge_tol, gap_close_tol)?;
    let freq = freq.mod_one();
    check_regime(lambda, &freq)?;
    let amp = phase_amplitude(lambda, freq);
    let (lo, hi) = scan_window(lambda);
    let (bands, unresolved) =
        level_set(|e| delta_eval(e, lambda, freq), freq.q, 2.0 + amp, lo, hi, edge_tol)?;
    finish(AmoParams::new(lambda, freq, 0.0), bands, true, edge_tol, gap_close_tol, amp, unresolved)
}

/// Spectrum at a single phase, `{E : |t(E, ω)| ≤ 2}`.
pub fn spectrum_fixed_phase(
    lambda: f64,
    freq: Rational,
    phase: f64,
    edge_tol: f64,
) -> Result<SpectrumResult, AmoError> {
    check_tols(edge_tol, 0.0)?;
    let freq = freq.mod_one();
    check_regime(lambda, &freq)?;
    let params = AmoParams::new(lambda, freq, phase);
    let amp = phase_amplitude(lambda, freq);
    let (lo, hi) = scan_window(lambda);
    let (bands, unresolved) =
        level_set(|e| trace_eval(e, &params), freq.q, 2.0, lo, hi, edge_tol)?;
    finish(params, bands, false, edge_tol, 0.0, amp, unresolved)
}

/// `{E : |Δ(E)| ≤ 2 − amp}`, the energies in the spectrum for every phase.
/// `None` when the amplitude reaches 2.
pub fn phase_intersection(
    lambda: f64,
    freq: Rational,
    edge_tol: f64,
) -> Result<Option<IntervalUnion>, AmoError> {
    let freq = freq.mod_one();
    check_regime(lambda, &freq)?;
    let amp = phase_amplitude(lambda, freq);
    if amp >= 2.0 {
        return Ok(None);
    }
    let (lo, hi) = scan_window(lambda);
    let (bands, _) = level_set(|e| delta_eval(e, lambda, freq), freq.q, 2.0 - amp, lo, hi, edge_tol)?;
    Ok(Some(make_union(bands).map_err(|e| AmoError::EdgeFindingFailure(e.to_string()))?))
}

/// Upper bound on the Hausdorff distance between any two fixed-phase spectra
/// at `(λ, p/q)`: every fixed-phase set lies between the phase intersection
/// and the phase union.
pub fn fixed_phase_distance_bound(lambda: f64, freq: Rational, edge_tol: f64) -> Result<f64, AmoError> {
    let union = spectrum_rational(lambda, freq, edge_tol, 0.0)?.union;
    match phase_intersection(lambda, freq, edge_tol)? {
        Some(inner) => {
            let sup = union
                .parts()
                .iter()
                .flat_map(|p| [p.lo, p.hi])
                .chain(union.bounded_gaps().iter().map(Interval::midpoint))
                .chain(inner.bounded_gaps().iter().map(Interval::midpoint).filter(|&m| union.contains(m)))
                .map(|x| inner.dist(x))
                .fold(0.0, f64::max);
            Ok(sup + 2.0 * edge_tol)
        }
        None => Ok(union.diameter()),
    }
}

/// Phase-union spectrum at the `order`-th convergent of `spec`.
pub fn spectrum_irrational(
    lambda: f64,
    spec: &FrequencySpec,
    order: usize,
    edge_tol: f64,
    gap_close_tol: f64,
) -> Result<SpectrumResult, AmoError> {
    if order < 1 {
        return Err(AmoError::InvalidArgument("approximation order must be >= 1".into()));
    }
    let freq = convergent(spec, order)?;
    let mut res = spectrum_rational(lambda, freq, edge_tol, gap_close_tol)?;
    res.approx_order = order;
    res.freq_spec = Some(spec.to_string());
    Ok(res)
}

/// Number of eigenvalues `< x` of the `q×q` Bloch matrix with diagonal `diag`,
/// unit hopping and boundary phase `θ`, by `LDLᴴ` inertia.
///
/// Elimination without pivoting on the cyclic tridiagonal matrix only fills
/// the last column, so one pass is `O(q)`.
pub fn bloch_count(diag: &[f64], theta: f64, x: f64) -> usize {
    const NUDGE: f64 = 1e-300;
    let nudge = |p: f64| if p == 0.0 { NUDGE } else { p };
    let q = diag.len();
    let corner = Complex64::from_polar(1.0, -theta);
    match q {
        0 => 0,
        1 => usize::from(diag[0] + 2.0 * theta.cos() - x < 0.0),
        2 => {
            let p = nudge(diag[0] - x);
            let off = Complex64::new(1.0, 0.0) + corner;
            let s = diag[1] - x - off.norm_sqr() / p;
            usize::from(p < 0.0) + usize::from(s < 0.0)
        }
        _ => {
            let mut count = 0;
            let mut p = nudge(diag[0] - x);
            let mut w = corner; // entry (k, q-1) of the partially reduced matrix
            let mut s = diag[q - 1] - x;
            for k in 0..q - 2 {
                count += usize::from(p < 0.0);
                s -= w.norm_sqr() / p;
                let fill = if k + 1 == q - 2 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                w = fill - w / p;
                p = nudge(diag[k + 1] - x - 1.0 / p);
            }
            count += usize::from(p < 0.0);
            s -= w.norm_sqr() / p;
            count + usize::from(s < 0.0)
        }
    }
}

/// All eigenvalues of a Hermitian matrix given its inertia counter.
fn bisect_all<C: Fn(f64) -> usize>(count: C, n: usize, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let mut lower = vec![lo; n];
    let mut upper = vec![hi; n];
    let mut eig = Vec::with_capacity(n);
    for k in 0..n {
        let (mut a, mut b) = (lower[k], upper[k]);
        while b - a > tol {
            let m = 0.5 * (a + b);
            let c = count(m);
            if c > k {
                b = m;
                for u in upper.iter_mut().take(c).skip(k + 1) {
                    *u = u.min(m);
                }
            } else {
                a = m;
                for l in lower.iter_mut().skip(c.max(k + 1)) {
                    *l = l.max(m);
                }
            }
        }
        eig.push(0.5 * (a + b));
    }
    eig
}

/// Phase-union spectrum from eigenvalues of `q×q` Bloch matrices.
///
/// Phases `ω` run over `omega_grid` uniform points of `[0, 1/q)` (a shift
/// of `ω` by `1/q` is a lattice translation), Bloch phases `θ` over
/// `theta_grid` uniform points of `[0, π]` (`θ` and `−θ` give complex
/// conjugate matrices), endpoints included. For each `ω` the `k`-th band is
/// the range of the `k`-th eigenvalue over `θ`; the result is the union of all
/// such ranges, with sub-`1e-9·(4+4|λ|)` gaps closed.
pub fn bloch_oracle(
    lambda: f64,
    freq: Rational,
    omega_grid: usize,
    theta_grid: usize,
) -> Result<IntervalUnion, AmoError> {
    if omega_grid < 8 || theta_grid < 8 {
        return Err(AmoError::InvalidArgument("oracle grids must have at least 8 points".into()));
    }
    let freq = freq.mod_one();
    let q = freq.q as usize;
    let bound = 2.0 + 2.0 * lambda.abs() + 1e-9;
    let tol = 1e-12 * bound;
    let bands: Vec<Interval> = (0..omega_grid)
        .into_par_iter()
        .flat_map_iter(|j| {
            let omega = j as f64 / (omega_grid as f64 * q as f64);
            let params = AmoParams::new(lambda, freq, omega);
            let diag: Vec<f64> = (1..=q as i64).map(|n| params.potential(n)).collect();
            let mut lo = vec![f64::INFINITY; q];
            let mut hi = vec![f64::NEG_INFINITY; q];
            for i in 0..theta_grid {
                let theta = PI * i as f64 / (theta_grid - 1) as f64;
                let eig = bisect_all(|x| bloch_count(&diag, theta, x), q, -bound, bound, tol);
                for (k, e) in eig.into_iter().enumerate() {
                    lo[k] = lo[k].min(e);
                    hi[k] = hi[k].max(e);
                }
            }
            lo.into_iter().zip(hi).map(|(lo, hi)| Interval { lo, hi }).collect::<Vec<_>>()
        })
        .collect();
    let union = make_union(bands).map_err(|e| AmoError::EdgeFindingFailure(e.to_string()))?;
    Ok(union.close_gaps(default_gap_close_tol(lambda)).0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButterflyRow {
    pub freq: Rational,
    pub union: IntervalUnion,
}

/// Phase-union spectra for every reduced `p/q ∈ [0, 1)` with `q ≤ q_max`.
pub fn butterfly(lambda: f64, q_max: i64, edge_tol: f64) -> Result<Vec<ButterflyRow>, AmoError> {
    if q_max < 2 {
        return Err(AmoError::InvalidArgument("q_max must be >= 2".into()));
    }
    let freqs: Vec<Rational> = (1..=q_max)
        .flat_map(|q| (0..q).map(move |p| (p, q)))
        .filter(|&(p, q)| num_integer::gcd(p, q) == 1)
        .map(|(p, q)| Rational { p, q })
        .collect();
    freqs
        .into_par_iter()
        .map(|f| {
            spectrum_rational(lambda, f, edge_tol, default_gap_close_tol(lambda))
                .map(|r| ButterflyRow { freq: f, union: r.union })
        })
        .collect()
}

/// Butterfly rows as CSV with columns `p,q,band_index,lo,hi`.
pub fn butterfly_csv(rows: &[ButterflyRow]) -> String {
    let mut out = String::from("p,q,band_index,lo,hi\n");
    for row in rows {
        for (i, band) in row.union.parts().iter().enumerate() {
            out.push_str(&format!("{},{},{},{:?},{:?}\n", row.freq.p, row.freq.q, i, band.lo, band.hi));
        }
    }
    out
}

//! Finite unions of closed intervals.
//!
//! Every spectrum and every Cantor-set approximation in this crate is an
//! [`IntervalUnion`]: a non-empty, strictly ordered list of disjoint closed
//! intervals. Gaps, planks, thickness, Hausdorff distance and Minkowski sums
//! are all computed exactly from the endpoints.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod cantor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("an interval union needs at least one interval")]
    EmptyInput,
    #[error("bad interval [{lo}, {hi}]: endpoints must be finite with lo <= hi")]
    BadInterval { lo: f64, hi: f64 },
}

/// A closed interval `[lo, hi]`. Degenerate points (`lo == hi`) are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SetError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(SetError::BadInterval { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = SetError;
    fn try_from(v: [f64; 2]) -> Result<Self, SetError> {
        Interval::new(v[0], v[1])
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Non-negative extended real: a finite value or `+∞`.
///
/// Serialized as a JSON number, or as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    /// `f64` view, mapping `+∞` to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match *self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    /// `τ / (τ + 1)`, with `+∞` contributing its limit `1`.
    pub fn saturation(&self) -> f64 {
        match *self {
            ExtReal::Finite(t) => t / (t + 1.0),
            ExtReal::Infinite => 1.0,
        }
    }

    /// Product of two thicknesses. `0 · ∞` is taken as `0`.
    pub fn mul(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a * b),
            (ExtReal::Finite(a), ExtReal::Infinite) | (ExtReal::Infinite, ExtReal::Finite(a)) => {
                if a == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::Infinite
                }
            }
            (ExtReal::Infinite, ExtReal::Infinite) => ExtReal::Infinite,
        }
    }

    pub fn ge(&self, v: f64) -> bool {
        match *self {
            ExtReal::Finite(a) => a >= v,
            ExtReal::Infinite => true,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            ExtReal::Finite(v) => s.serialize_f64(v),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal::Finite(v)),
            Raw::Str(s) if s == "inf" || s == "+inf" => Ok(ExtReal::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad extended real {s:?}"))),
        }
    }
}

/// Canonical finite union of disjoint closed intervals.
///
/// Invariant: `parts` is non-empty and `parts[i].hi < parts[i + 1].lo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUnion")]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUnion {
    parts: Vec<Interval>,
}

impl TryFrom<RawUnion> for IntervalUnion {
    type Error = SetError;
    fn try_from(raw: RawUnion) -> Result<Self, SetError> {
        make_union(raw.parts)
    }
}

/// Sort and merge overlapping or touching intervals.
pub fn make_union(mut raw: Vec<Interval>) -> Result<IntervalUnion, SetError> {
    if raw.is_empty() {
        return Err(SetError::EmptyInput);
    }
    for i in &raw {
        if !(i.lo.is_finite() && i.hi.is_finite() && i.lo <= i.hi) {
            return Err(SetError::BadInterval { lo: i.lo, hi: i.hi });
        }
    }
    raw.sort_unstable_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut parts: Vec<Interval> = Vec::with_capacity(raw.len());
    for iv in raw {
        match parts.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => parts.push(iv),
        }
    }
    Ok(IntervalUnion { parts })
}

/// Per-gap plank breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// The open gap, stored by its endpoints.
    pub gap: Interval,
    pub left_plank_len: f64,
    pub right_plank_len: f64,
    pub local_tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessReport {
    pub tau: ExtReal,
    /// Longest bounded gap, `0` for an interval.
    pub gamma: f64,
    pub diam: f64,
    pub gaps: Vec<GapReport>,
}

impl IntervalUnion {
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, SetError> {
        let raw = pairs
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        make_union(raw)
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self, SetError> {
        Ok(Self { parts: vec![Interval::new(lo, hi)?] })
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn inf(&self) -> f64 {
        self.parts[0].lo
    }

    pub fn sup(&self) -> f64 {
        self.parts[self.parts.len() - 1].hi
    }

    pub fn hull(&self) -> Interval {
        Interval { lo: self.inf(), hi: self.sup() }
    }

    pub fn diameter(&self) -> f64 {
        self.sup() - self.inf()
    }

    pub fn is_interval(&self) -> bool {
        self.parts.len() == 1
    }

    /// Total Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.parts.partition_point(|p| p.hi < x);
        i < self.parts.len() && self.parts[i].lo <= x
    }

    /// The bounded gaps, in increasing order, as `(parts[i].hi, parts[i+1].lo)`.
    pub fn bounded_gaps(&self) -> Vec<Interval> {
        self.parts
            .windows(2)
            .map(|w| Interval { lo: w[0].hi, hi: w[1].lo })
            .collect()
    }

    /// `Γ(K)`: length of the longest bounded gap, `0` when there is none.
    pub fn gamma(&self) -> f64 {
        self.parts.windows(2).map(|w| w[1].lo - w[0].hi).fold(0.0, f64::max)
    }

    /// Distance from `x` to the set.
    pub fn dist(&self, x: f64) -> f64 {
        let i = self.parts.partition_point(|p| p.hi < x);
        let mut d = f64::INFINITY;
        if i < self.parts.len() {
            d = (self.parts[i].lo - x).max(0.0);
        }
        if i > 0 {
            d = d.min(x - self.parts[i - 1].hi);
        }
        d
    }

    /// Merge gaps of length strictly below `tol`. Returns the new union and the
    /// number of gaps closed.
    pub fn close_gaps(&self, tol: f64) -> (IntervalUnion, usize) {
        let mut parts: Vec<Interval> = Vec::with_capacity(self.parts.len());
        let mut closed = 0;
        for &iv in &self.parts {
            match parts.last_mut() {
                Some(last) if iv.lo - last.hi < tol => {
                    last.hi = iv.hi;
                    closed += 1;
                }
                _ => parts.push(iv),
            }
        }
        (IntervalUnion { parts }, closed)
    }

    /// Apply `x ↦ scale·x + shift` with `scale > 0`.
    pub fn affine(&self, scale: f64, shift: f64) -> IntervalUnion {
        assert!(scale > 0.0, "affine map must preserve orientation");
        IntervalUnion {
            parts: self
                .parts
                .iter()
                .map(|p| Interval { lo: scale * p.lo + shift, hi: scale * p.hi + shift })
                .collect(),
        }
    }

    /// Reflection `x ↦ -x`.
    pub fn reflect(&self) -> IntervalUnion {
        IntervalUnion {
            parts: self.parts.iter().rev().map(|p| Interval { lo: -p.hi, hi: -p.lo }).collect(),
        }
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(" ∪ "))
    }
}

pub fn bounded_gaps(k: &IntervalUnion) -> Vec<Interval> {
    k.bounded_gaps()
}

pub fn diameter(k: &IntervalUnion) -> f64 {
    k.diameter()
}

pub fn is_interval(k: &IntervalUnion) -> bool {
    k.is_interval()
}

/// Thickness with the full plank breakdown.
///
/// The left plank of gap `U` runs from `U.lo` down to the right end of the
/// nearest gap on the left whose length is `>= length(U)` (or to `inf K`);
/// the right plank is symmetric. Both searches use a monotone stack, so the
/// whole report is linear in the number of gaps.
pub fn thickness(k: &IntervalUnion) -> ThicknessReport {
    let gaps = k.bounded_gaps();
    let m = gaps.len();
    let lens: Vec<f64> = gaps.iter().map(Interval::len).collect();

    let mut left_stop = vec![k.inf(); m];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..m {
        while let Some(&j) = stack.last() {
            if lens[j] < lens[i] {
                stack.pop();
            } else {
                break;
            }
        }
        if let Some(&j) = stack.last() {
            left_stop[i] = gaps[j].hi;
        }
        stack.push(i);
    }

    let mut right_stop = vec![k.sup(); m];
    stack.clear();
    for i in (0..m).rev() {
        while let Some(&j) = stack.last() {
            if lens[j] < lens[i] {
                stack.pop();
            } else {
                break;
            }
        }
        if let Some(&j) = stack.last() {
            right_stop[i] = gaps[j].lo;
        }
        stack.push(i);
    }

    let mut tau = ExtReal::Infinite;
    let mut gamma = 0.0f64;
    let reports = (0..m)
        .map(|i| {
            let left = gaps[i].lo - left_stop[i];
            let right = right_stop[i] - gaps[i].hi;
            let local = left.min(right) / lens[i];
            tau = match tau {
                ExtReal::Infinite => ExtReal::Finite(local),
                ExtReal::Finite(t) => ExtReal::Finite(t.min(local)),
            };
            gamma = gamma.max(lens[i]);
            GapReport { gap: gaps[i], left_plank_len: left, right_plank_len: right, local_tau: local }
        })
        .collect();

    ThicknessReport { tau, gamma, diam: k.diameter(), gaps: reports }
}

/// Exact sum set `{x + y}`.
pub fn minkowski_sum(a: &IntervalUnion, b: &IntervalUnion) -> IntervalUnion {
    let mut raw = Vec::with_capacity(a.len() * b.len());
    for p in &a.parts {
        for r in &b.parts {
            raw.push(Interval { lo: p.lo + r.lo, hi: p.hi + r.hi });
        }
    }
    make_union(raw).expect("sum of non-empty canonical unions")
}

/// Iterated Minkowski sum of a non-empty list.
pub fn minkowski_sum_all(sets: &[IntervalUnion]) -> Option<IntervalUnion> {
    let (first, rest) = sets.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, k| minkowski_sum(&acc, k)))
}

fn directed_hausdorff(a: &IntervalUnion, b: &IntervalUnion) -> f64 {
    // dist(·, b) is piecewise linear with local maxima only at gap midpoints of b,
    // so on each part of `a` the sup sits at an endpoint or at such a midpoint.
    let mut best = 0.0f64;
    for p in &a.parts {
        best = best.max(b.dist(p.lo)).max(b.dist(p.hi));
    }
    for g in b.bounded_gaps() {
        let mid = g.midpoint();
        if a.contains(mid) {
            best = best.max(b.dist(mid));
        }
    }
    best
}

/// Exact Hausdorff distance between two canonical unions.
pub fn hausdorff_distance(a: &IntervalUnion, b: &IntervalUnion) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

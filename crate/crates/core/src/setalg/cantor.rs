//! Finite-stage central Cantor constructions.
//!
//! The `_grid` variants live on integer coordinates `[0, (2·keep + gap)^level]`
//! so every endpoint, gap and plank is exact in `f64` (as long as the scale
//! stays below 2^53).

use super::{make_union, Interval, IntervalUnion};

/// Level-`level` central Cantor set on the integer grid: each piece of length
/// `(2k + g)·s` keeps its outer `k·s` pieces and drops the middle `g·s`.
/// Thickness is `keep / gap` at every level.
pub fn central_cantor_grid(level: u32, keep: u64, gap: u64) -> IntervalUnion {
    assert!(keep > 0, "keep must be positive");
    let base = 2 * keep + gap;
    let total = base.checked_pow(level).expect("grid scale overflow");
    assert!(total < (1u64 << 53), "grid scale exceeds exact f64 range");
    let mut pieces: Vec<(u64, u64)> = vec![(0, total)];
    let mut width = total;
    for _ in 0..level {
        width /= base;
        pieces = pieces
            .into_iter()
            .flat_map(|(lo, hi)| [(lo, lo + keep * width), (hi - keep * width, hi)])
            .collect();
    }
    let raw = pieces
        .into_iter()
        .map(|(lo, hi)| Interval { lo: lo as f64, hi: hi as f64 })
        .collect();
    make_union(raw).expect("non-empty construction")
}

/// Same construction rescaled to `[0, 1]`.
pub fn central_cantor(level: u32, keep: u64, gap: u64) -> IntervalUnion {
    let k = central_cantor_grid(level, keep, gap);
    let scale = k.sup();
    let raw = k
        .parts()
        .iter()
        .map(|p| Interval { lo: p.lo / scale, hi: p.hi / scale })
        .collect();
    make_union(raw).expect("non-empty construction")
}

/// Middle-thirds Cantor set at stage `level`, on `[0, 1]`.
pub fn middle_thirds(level: u32) -> IntervalUnion {
    central_cantor(level, 1, 1)
}

/// Middle-thirds Cantor set at stage `level`, on `[0, 3^level]`.
pub fn middle_thirds_grid(level: u32) -> IntervalUnion {
    central_cantor_grid(level, 1, 1)
}

/// Keep the first and last quarter of each piece (thickness 1/2), on `[0, 1]`.
pub fn middle_halves(level: u32) -> IntervalUnion {
    central_cantor(level, 1, 2)
}

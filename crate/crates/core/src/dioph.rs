//! Continued fractions, frequency specifications and Diophantine constants.
//!
//! Frequencies are exact objects: a rational, a quadratic irrational given by
//! an eventually periodic continued fraction, or a decimal string with known
//! precision. Every quantity that depends on `qα mod 1` for large `q` is
//! evaluated with big-integer arithmetic against an exact rational
//! approximant whose error is far below `f64` resolution.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiophError {
    #[error("cannot parse frequency {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("decimal precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("rational frequency {0} has Diophantine constant 0")]
    RationalInput(Rational),
    #[error("integer overflow in convergent recurrence at index {0}")]
    Overflow(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Reduced fraction `p/q` with `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rational {
    pub p: i64,
    pub q: i64,
}

impl Rational {
    pub fn new(p: i64, q: i64) -> Result<Self, DiophError> {
        if q == 0 {
            return Err(DiophError::InvalidArgument(format!("zero denominator in {p}/{q}")));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        Ok(Self { p, q })
    }

    /// The same frequency reduced into `[0, 1)`.
    pub fn mod_one(&self) -> Rational {
        Rational { p: self.p.rem_euclid(self.q), q: self.q }
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Rational {
    type Err = DiophError;
    fn from_str(s: &str) -> Result<Self, DiophError> {
        let err = |reason: &str| DiophError::Parse { input: s.to_string(), reason: reason.into() };
        let (a, b) = s.trim().split_once('/').ok_or_else(|| err("expected p/q"))?;
        let p: i64 = a.trim().parse().map_err(|_| err("bad numerator"))?;
        let q: i64 = b.trim().parse().map_err(|_| err("bad denominator"))?;
        if q == 0 {
            return Err(err("denominator must be nonzero"));
        }
        Rational::new(p, q)
    }
}

/// How a frequency is specified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FrequencySpec {
    Rational(Rational),
    /// Eventually periodic continued fraction `[a0; preamble.., (repeating..)]`.
    /// `preamble[0]` is `a0`.
    Quadratic { preamble: Vec<i64>, repeating: Vec<i64> },
    /// Decimal expansion, exact to the last digit given.
    Decimal { digits: String },
}

impl FrequencySpec {
    /// `(√5 − 1)/2 = [0; 1, 1, 1, …]`.
    pub fn golden_mean() -> Self {
        FrequencySpec::Quadratic { preamble: vec![0], repeating: vec![1] }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, FrequencySpec::Rational(_))
    }

    /// Number of digits after the decimal point, for decimal specs.
    pub fn decimal_places(&self) -> Option<u32> {
        match self {
            FrequencySpec::Decimal { digits } => {
                Some(digits.split_once('.').map_or(0, |(_, f)| f.len() as u32))
            }
            _ => None,
        }
    }

    /// Exact rational `(num, den)`: the value itself for rationals and
    /// decimals, a convergent with error below `1/den²` for quadratics where
    /// `den >= min_den`.
    fn exact_approximant(&self, min_den: &BigInt) -> (BigInt, BigInt) {
        match self {
            FrequencySpec::Rational(r) => (BigInt::from(r.p), BigInt::from(r.q)),
            FrequencySpec::Decimal { digits } => parse_decimal(digits).expect("validated at parse"),
            FrequencySpec::Quadratic { .. } => {
                let mut quotients = self.partial_quotients();
                let (mut p0, mut p1) = (BigInt::zero(), BigInt::one());
                let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
                loop {
                    let a = BigInt::from(quotients.next().expect("quadratic CF is infinite"));
                    let p2 = &a * &p1 + &p0;
                    let q2 = &a * &q1 + &q0;
                    p0 = std::mem::replace(&mut p1, p2);
                    q0 = std::mem::replace(&mut q1, q2);
                    if &q1 >= min_den {
                        return (p1, q1);
                    }
                }
            }
        }
    }

    fn partial_quotients(&self) -> Box<dyn Iterator<Item = i64> + '_> {
        match self {
            FrequencySpec::Quadratic { preamble, repeating } => {
                Box::new(preamble.iter().copied().chain(repeating.iter().copied().cycle()))
            }
            _ => unreachable!("only quadratic specs have a fixed quotient list"),
        }
    }

    /// Double-precision value of the frequency.
    pub fn to_f64(&self) -> f64 {
        let (num, den) = self.exact_approximant(&BigInt::from(10u64).pow(20));
        big_ratio_to_f64(&num, &den)
    }
}

impl fmt::Display for FrequencySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencySpec::Rational(r) => write!(f, "{r}"),
            FrequencySpec::Decimal { digits } => f.write_str(digits),
            FrequencySpec::Quadratic { preamble, repeating } => {
                write!(f, "[{}", preamble[0])?;
                let mut sep = ";";
                for a in &preamble[1..] {
                    write!(f, "{sep}{a}")?;
                    sep = ",";
                }
                let rep: Vec<String> = repeating.iter().map(|a| a.to_string()).collect();
                write!(f, "{sep}({})]", rep.join(","))
            }
        }
    }
}

impl From<FrequencySpec> for String {
    fn from(s: FrequencySpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for FrequencySpec {
    type Error = DiophError;
    fn try_from(s: String) -> Result<Self, DiophError> {
        s.parse()
    }
}

fn parse_decimal(s: &str) -> Option<(BigInt, BigInt)> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut num = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    if neg {
        num = -num;
    }
    let den = BigInt::from(10u64).pow(frac.len() as u32);
    Some((num, den))
}

impl FromStr for FrequencySpec {
    type Err = DiophError;

    /// Grammar: `p/q` | `[a0;a1,...,(b1,...,bk)]` | decimal such as `0.618033988…`.
    /// A bracketed list without a parenthesized tail is a finite continued
    /// fraction, i.e. a rational.
    fn from_str(s: &str) -> Result<Self, DiophError> {
        let t = s.trim();
        let err = |reason: &str| DiophError::Parse { input: s.to_string(), reason: reason.into() };
        if let Some(inner) = t.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| err("missing ']'"))?;
            let (head, tail) = match inner.split_once(';') {
                Some((h, r)) => (h, r),
                None => (inner, ""),
            };
            let a0: i64 = head.trim().parse().map_err(|_| err("bad a0"))?;
            let (pre_str, rep_str) = match tail.find('(') {
                Some(i) => {
                    let rep = tail[i + 1..]
                        .trim_end()
                        .strip_suffix(')')
                        .ok_or_else(|| err("periodic block must close with ')' at the end"))?;
                    (&tail[..i], Some(rep))
                }
                None => (tail, None),
            };
            let parse_list = |txt: &str| -> Result<Vec<i64>, DiophError> {
                txt.split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(|x| match x.parse::<i64>() {
                        Ok(v) if v >= 1 => Ok(v),
                        _ => Err(err("partial quotients after a0 must be positive integers")),
                    })
                    .collect()
            };
            let mut preamble = vec![a0];
            preamble.extend(parse_list(pre_str)?);
            match rep_str {
                Some(r) => {
                    let repeating = parse_list(r)?;
                    if repeating.is_empty() {
                        return Err(err("periodic block is empty"));
                    }
                    Ok(FrequencySpec::Quadratic { preamble, repeating })
                }
                None => {
                    let (mut p0, mut p1) = (0i64, 1i64);
                    let (mut q0, mut q1) = (1i64, 0i64);
                    for &a in &preamble {
                        let p2 = a.checked_mul(p1).and_then(|v| v.checked_add(p0));
                        let q2 = a.checked_mul(q1).and_then(|v| v.checked_add(q0));
                        let (p2, q2) = p2.zip(q2).ok_or_else(|| err("overflow"))?;
                        (p0, p1, q0, q1) = (p1, p2, q1, q2);
                    }
                    Ok(FrequencySpec::Rational(Rational::new(p1, q1)?))
                }
            }
        } else if t.contains('/') {
            Ok(FrequencySpec::Rational(t.parse()?))
        } else {
            parse_decimal(t).ok_or_else(|| err("not p/q, [a0;...] or a decimal"))?;
            Ok(FrequencySpec::Decimal { digits: t.to_string() })
        }
    }
}

/// Convert `num/den` to `f64` with full double precision.
fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let neg = num.sign() == Sign::Minus;
    let n = num.abs();
    let shift = (den.bits() as i64 - n.bits() as i64 + 64).max(0);
    let quo = (n << shift as usize) / den;
    let v = quo.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-(shift as i32));
    if neg {
        -v
    } else {
        v
    }
}

fn cf_step(num: &BigInt, den: &BigInt) -> (BigInt, BigInt, BigInt) {
    // floor(num/den) and the reciprocal of the remainder
    let (a, r) = num.div_mod_floor(den);
    (a, den.clone(), r)
}

/// The first `depth` convergents `p_k/q_k`, `k = 0, 1, …`.
///
/// Rational inputs stop at their last convergent. Decimal inputs stop with
/// [`DiophError::PrecisionExhausted`] once the two ends of the uncertainty
/// interval disagree on the next partial quotient.
pub fn convergents(spec: &FrequencySpec, depth: usize) -> Result<Vec<Rational>, DiophError> {
    if depth == 0 {
        return Err(DiophError::InvalidArgument("depth must be >= 1".into()));
    }
    let quotients: Vec<BigInt> = match spec {
        FrequencySpec::Quadratic { .. } => {
            spec.partial_quotients().take(depth).map(BigInt::from).collect()
        }
        FrequencySpec::Rational(r) => {
            let (mut n, mut d) = (BigInt::from(r.p), BigInt::from(r.q));
            let mut out = Vec::new();
            while !d.is_zero() && out.len() < depth {
                let (a, nn, nd) = cf_step(&n, &d);
                out.push(a);
                (n, d) = (nn, nd);
            }
            out
        }
        FrequencySpec::Decimal { digits } => {
            let (num, den) = parse_decimal(digits).expect("validated at parse");
            // the true value lies within one unit of the last digit
            let (mut ln, mut ld) = (&num - 1, den.clone());
            let (mut hn, mut hd) = (&num + 1, den);
            let mut out = Vec::new();
            while out.len() < depth {
                if ld.is_zero() || hd.is_zero() {
                    break;
                }
                let (a, nln, nld) = cf_step(&ln, &ld);
                let (b, nhn, nhd) = cf_step(&hn, &hd);
                if a != b {
                    return Err(DiophError::PrecisionExhausted(format!(
                        "{} digits certify only {} partial quotients, {depth} requested",
                        digits.len(),
                        out.len()
                    )));
                }
                out.push(a);
                (ln, ld, hn, hd) = (nln, nld, nhn, nhd);
            }
            out
        }
    };

    let (mut p0, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q0, mut q1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(quotients.len());
    for (k, a) in quotients.iter().enumerate() {
        let p2 = a * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        let p = p2.to_i64().ok_or(DiophError::Overflow(k))?;
        let q = q2.to_i64().ok_or(DiophError::Overflow(k))?;
        out.push(Rational { p, q });
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    Ok(out)
}

/// The `order`-th convergent, counting from 1: order 1 is `a0/1`, so the
/// golden mean has 0/1, 1/1, 1/2, 2/3, 3/5, 5/8, 8/13 at orders 1 through 7.
pub fn convergent(spec: &FrequencySpec, order: usize) -> Result<Rational, DiophError> {
    if order < 1 {
        return Err(DiophError::InvalidArgument("convergent order must be >= 1".into()));
    }
    let cs = convergents(spec, order)?;
    if cs.len() < order {
        return Err(DiophError::InvalidArgument(format!(
            "{spec} has only {} convergents, order {order} requested",
            cs.len()
        )));
    }
    Ok(cs[order - 1])
}

/// Which Diophantine condition to measure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcVariant {
    /// `|qα − p| >= c / q^(t−1)`
    #[default]
    Plain,
    /// `|qα − 2πp| >= c / q^(t−1)`
    TwoPi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcReport {
    pub freq: String,
    pub variant: DcVariant,
    pub t: f64,
    pub q_max: u64,
    pub c_best: f64,
    pub argmin_q: u64,
}

// π to 50 decimal places.
const PI_DIGITS: &str = "3.14159265358979323846264338327950288419716939937510";

/// Exact `(num, den)` with `x = num/den` standing in for α (or α/2π).
fn scan_fraction(spec: &FrequencySpec, q_max: u64, variant: DcVariant) -> (BigInt, BigInt) {
    let min_den = BigInt::from(q_max) * BigInt::from(10u64).pow(25);
    let (num, den) = spec.exact_approximant(&min_den);
    match variant {
        DcVariant::Plain => (num, den),
        DcVariant::TwoPi => {
            let (pn, pd) = parse_decimal(PI_DIGITS).expect("constant");
            (num * pd, den * pn * 2)
        }
    }
}

fn dist_to_integers(r: &BigInt, den: &BigInt) -> f64 {
    let other = den - r;
    big_ratio_to_f64(if r <= &other { r } else { &other }, den)
}

/// Minimum of `q^(t−1)·dist(qα, ℤ)` over `1 <= q <= q_max` (or the `2π` form).
pub fn dc_constants(
    spec: &FrequencySpec,
    t: f64,
    q_max: u64,
    variant: DcVariant,
) -> Result<DcReport, DiophError> {
    if !(t > 1.0) {
        return Err(DiophError::InvalidArgument(format!("t must exceed 1, got {t}")));
    }
    if q_max < 1 {
        return Err(DiophError::InvalidArgument("q_max must be >= 1".into()));
    }
    if let FrequencySpec::Rational(r) = spec {
        return Err(DiophError::RationalInput(*r));
    }
    if let Some(places) = spec.decimal_places() {
        // dist(qα, ℤ) is uncertain by q·10^-places; keep that far below anything reported
        let needed = (q_max as f64).log10() + 20.0;
        if (places as f64) < needed {
            return Err(DiophError::PrecisionExhausted(format!(
                "{places} decimal places cannot certify q up to {q_max}; need {}",
                needed.ceil()
            )));
        }
    }
    let (num, den) = scan_fraction(spec, q_max, variant);
    let num = num.mod_floor(&den);
    let scale = match variant {
        DcVariant::Plain => 1.0,
        DcVariant::TwoPi => 2.0 * std::f64::consts::PI,
    };

    const CHUNK: u64 = 4096;
    let chunks = q_max.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK + 1;
            let end = ((c + 1) * CHUNK).min(q_max);
            let mut r = (BigInt::from(start) * &num).mod_floor(&den);
            let mut best = (f64::INFINITY, start);
            for q in start..=end {
                let v = (q as f64).powf(t - 1.0) * scale * dist_to_integers(&r, &den);
                if v < best.0 {
                    best = (v, q);
                }
                r += &num;
                if r >= den {
                    r -= &den;
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    if best.0 == 0.0 {
        return Err(DiophError::PrecisionExhausted(format!(
            "dist(qα, Z) vanished at q = {}; the input is numerically rational",
            best.1
        )));
    }
    Ok(DcReport {
        freq: spec.to_string(),
        variant,
        t,
        q_max,
        c_best: best.0,
        argmin_q: best.1,
    })
}

/// `frac(nα)` for `n = −n_max..n_max`, `n ≠ 0`, skipping multiples with
/// `nα ∈ ℤ`. Returned as `(n, value)` pairs in increasing `n`.
pub fn frac_multiples(spec: &FrequencySpec, n_max: u64) -> Result<Vec<(i64, f64)>, DiophError> {
    if n_max < 1 {
        return Err(DiophError::InvalidArgument("n_max must be >= 1".into()));
    }
    let (num, den) = scan_fraction(spec, n_max, DcVariant::Plain);
    let n_max = n_max as i64;
    Ok((-n_max..=n_max)
        .filter(|&n| n != 0)
        .filter_map(|n| {
            let r = (BigInt::from(n) * &num).mod_floor(&den);
            (!r.is_zero()).then(|| (n, big_ratio_to_f64(&r, &den)))
        })
        .collect())
}

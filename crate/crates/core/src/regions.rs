//! Open rational boxes: the neighbourhoods attached to regular points.
//!
//! Boxes are axis-aligned with rational or infinite endpoints, so membership
//! and intersection are exact. Sampling draws rational points with dyadic
//! denominators that grow as more distinct points are requested.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::rng;

/// Point with rational coordinates.
pub type Point = Vec<Rational>;

pub fn fmt_point(p: &Point) -> String {
    let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("({})", coords.join(", "))
}

/// Interval endpoint: a rational or an infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Endpoint {
    NegInf,
    Value(Rational),
    PosInf,
}

impl Endpoint {
    fn below(&self, x: &Rational) -> bool {
        match self {
            Endpoint::NegInf => true,
            Endpoint::Value(v) => v < x,
            Endpoint::PosInf => false,
        }
    }

    fn above(&self, x: &Rational) -> bool {
        match self {
            Endpoint::NegInf => false,
            Endpoint::Value(v) => v > x,
            Endpoint::PosInf => true,
        }
    }

    /// Total order with NegInf minimal and PosInf maximal.
    fn cmp_ep(&self, other: &Endpoint) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        use Endpoint::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Equal,
            (NegInf, _) | (_, PosInf) => Less,
            (_, NegInf) | (PosInf, _) => Greater,
            (Value(a), Value(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => write!(f, "-inf"),
            Endpoint::Value(v) => write!(f, "{v}"),
            Endpoint::PosInf => write!(f, "+inf"),
        }
    }
}

impl Serialize for Endpoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Endpoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "-inf" => Ok(Endpoint::NegInf),
            "+inf" | "inf" => Ok(Endpoint::PosInf),
            other => Ok(Endpoint::Value(
                other.parse().map_err(serde::de::Error::custom)?,
            )),
        }
    }
}

/// Nonempty open interval (lo, hi) with lo < hi.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(Endpoint, Endpoint)", into = "(Endpoint, Endpoint)")]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
}

impl Interval {
    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Self> {
        let ok = match (&lo, &hi) {
            (Endpoint::PosInf, _) | (_, Endpoint::NegInf) => false,
            (Endpoint::NegInf, _) | (_, Endpoint::PosInf) => true,
            (Endpoint::Value(a), Endpoint::Value(b)) => a < b,
        };
        if !ok {
            return Err(Error::EmptyInterval);
        }
        Ok(Interval { lo, hi })
    }

    pub fn bounded(lo: Rational, hi: Rational) -> Result<Self> {
        Interval::new(Endpoint::Value(lo), Endpoint::Value(hi))
    }

    pub fn full() -> Self {
        Interval {
            lo: Endpoint::NegInf,
            hi: Endpoint::PosInf,
        }
    }

    pub fn lo(&self) -> &Endpoint {
        &self.lo
    }

    pub fn hi(&self) -> &Endpoint {
        &self.hi
    }

    /// Strict membership.
    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.below(x) && self.hi.above(x)
    }

    /// None when the overlap is empty (open intervals: touching endpoints do
    /// not intersect).
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo.cmp_ep(&other.lo).is_ge() {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi.cmp_ep(&other.hi).is_le() {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        Interval::new(lo, hi).ok()
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            (&self.lo, &self.hi),
            (Endpoint::Value(_), Endpoint::Value(_))
        )
    }

    /// hi - lo for bounded intervals.
    pub fn length(&self) -> Result<Rational> {
        match (&self.lo, &self.hi) {
            (Endpoint::Value(a), Endpoint::Value(b)) => Ok(b - a),
            _ => Err(Error::UnboundedBox),
        }
    }
}

impl From<Interval> for (Endpoint, Endpoint) {
    fn from(iv: Interval) -> Self {
        (iv.lo, iv.hi)
    }
}

impl TryFrom<(Endpoint, Endpoint)> for Interval {
    type Error = Error;
    fn try_from((lo, hi): (Endpoint, Endpoint)) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Nonempty open box: a product of open intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpenBox {
    intervals: Vec<Interval>,
}

impl OpenBox {
    pub fn new(intervals: Vec<Interval>) -> Self {
        assert!(!intervals.is_empty(), "zero-dimensional box");
        OpenBox { intervals }
    }

    /// The whole space in the given dimension.
    pub fn full(dim: usize) -> Self {
        OpenBox::new(vec![Interval::full(); dim])
    }

    /// One-dimensional (lo, hi).
    pub fn segment(lo: Rational, hi: Rational) -> Result<Self> {
        Ok(OpenBox::new(vec![Interval::bounded(lo, hi)?]))
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_full(&self) -> bool {
        self.intervals.iter().all(|iv| *iv == Interval::full())
    }

    /// Strict coordinatewise membership.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::dim(self.dim(), x.len()));
        }
        Ok(self
            .intervals
            .iter()
            .zip(x)
            .all(|(iv, xi)| iv.contains(xi)))
    }

    /// Coordinatewise intersection; None when empty.
    pub fn intersect(&self, other: &OpenBox) -> Option<OpenBox> {
        assert_eq!(self.dim(), other.dim(), "box dimension mismatch");
        let mut intervals = Vec::with_capacity(self.dim());
        for (a, b) in self.intervals.iter().zip(&other.intervals) {
            intervals.push(a.intersect(b)?);
        }
        Some(OpenBox::new(intervals))
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(Interval::is_bounded)
    }
}

impl fmt::Display for OpenBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Sum of interval lengths of one-dimensional bounded boxes: an upper bound
/// for the measure of their union.
pub fn box_length_sum(boxes: &[OpenBox]) -> Result<Rational> {
    let mut sum = Rational::zero();
    for b in boxes {
        if b.dim() != 1 {
            return Err(Error::dim(1, b.dim()));
        }
        sum = sum + b.intervals[0].length()?;
    }
    Ok(sum)
}

/// `k` pairwise distinct rational points of `b`, deterministic in `seed`.
pub fn sample_box(b: &OpenBox, k: usize, seed: u64) -> Vec<Point> {
    let mut rng = rng::split(seed, 0xb0c5);
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    let mut out = Vec::with_capacity(k);
    let mut bits = 4u32;
    let mut attempts = 0u64;
    while out.len() < k {
        let p: Point = b
            .intervals
            .iter()
            .map(|iv| sample_interval(iv, bits, &mut rng))
            .collect();
        if seen.insert(p.clone()) {
            out.push(p);
        }
        attempts += 1;
        if attempts.is_multiple_of(8) && bits < 52 {
            // Finer dyadic grid once collisions start to matter.
            bits += 1;
        }
        assert!(
            attempts < 100_000 + 64 * k as u64,
            "sampling stalled; box admits infinitely many rationals"
        );
    }
    out
}

fn sample_interval(iv: &Interval, bits: u32, rng: &mut impl Rng) -> Rational {
    let den = 1i64 << bits;
    let frac = Rational::ratio(rng.gen_range(1..den), den); // in (0,1)
    match (&iv.lo, &iv.hi) {
        (Endpoint::Value(a), Endpoint::Value(b)) => a + &((b - a) * frac),
        (Endpoint::Value(a), Endpoint::PosInf) => {
            a + &(Rational::from_int(rng.gen_range(0..8)) + frac)
        }
        (Endpoint::NegInf, Endpoint::Value(b)) => {
            b - &(Rational::from_int(rng.gen_range(0..8)) + frac)
        }
        (Endpoint::NegInf, Endpoint::PosInf) => Rational::from_int(rng.gen_range(-8..8)) + frac,
        _ => unreachable!("invalid interval"),
    }
}

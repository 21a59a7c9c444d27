//! Countable chart family with constant components on shrinking intervals.
//!
//! The anchors enumerate the rationals of a one-dimensional domain; chart
//! `n` is the open interval around anchor `n` with radius
//! `min(epsilon * 2^-(n+1), d_n / 2)` where `d_n` is the distance to the
//! nearest earlier anchor. The radius rule certifies that no earlier anchor
//! lies in a later chart, and keeps the total interval length below
//! `2 * epsilon` no matter how wild the constants are.
//!
//! The enumeration interleaves a breadth-first walk of the positive-rational
//! tree (signed, filtered to the domain) with a dyadic sequence converging
//! to the first anchor. The dyadic strand revisits the first neighbourhood
//! early, so overlapping chart pairs (which exist for every enumeration, but
//! may appear astronomically late in a plain tree walk) show up within the
//! first few dozen anchors.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Rational, ValueAlgebra, ValueE};
use crate::error::{Error, Result};
use crate::regions::{Endpoint, OpenBox};
use crate::terms::PolyTerm;

use super::Chart;

/// How many enumeration steps a single probe may consume before giving up.
/// Points deeper in the enumeration are finitely describable but not worth
/// materializing.
const ENUM_BUDGET: usize = 20_000;

/// Rule assigning the constant component value to anchor index n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstRule<E: ValueAlgebra> {
    /// Explicit values, repeated cyclically.
    Enumerated(Vec<E>),
    /// c_n = n (injective).
    Index,
    /// c_n = n! (injective, outgrows every polynomial in n).
    Factorial,
    /// c_n = 0.
    Zero,
}

impl<E: ValueAlgebra> ConstRule<E> {
    pub fn value(&self, n: usize) -> E {
        match self {
            ConstRule::Enumerated(vs) => vs[n % vs.len()].clone(),
            ConstRule::Index => E::from_int(n as i64),
            ConstRule::Factorial => E::from_rational(Rational::factorial(n as u64)),
            ConstRule::Zero => E::zero(),
        }
    }

    /// Distinct indices are guaranteed distinct values.
    pub fn is_injective(&self) -> bool {
        matches!(self, ConstRule::Index | ConstRule::Factorial)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ConstRepr {
    Enumerated { values: Vec<ValueE> },
    Index,
    Factorial,
    Zero,
}

impl<E: ValueAlgebra> Serialize for ConstRule<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            ConstRule::Enumerated(vs) => ConstRepr::Enumerated {
                values: vs.iter().map(|v| v.clone().into_value()).collect(),
            },
            ConstRule::Index => ConstRepr::Index,
            ConstRule::Factorial => ConstRepr::Factorial,
            ConstRule::Zero => ConstRepr::Zero,
        };
        repr.serialize(s)
    }
}

impl<'de, E: ValueAlgebra> Deserialize<'de> for ConstRule<E> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ConstRepr::deserialize(d)? {
            ConstRepr::Enumerated { values } => {
                if values.is_empty() {
                    return Err(serde::de::Error::custom("enumerated constants are empty"));
                }
                let vs = values
                    .iter()
                    .map(E::from_value)
                    .collect::<Result<Vec<_>>>()
                    .map_err(serde::de::Error::custom)?;
                Ok(ConstRule::Enumerated(vs))
            }
            ConstRepr::Index => Ok(ConstRule::Index),
            ConstRepr::Factorial => Ok(ConstRule::Factorial),
            ConstRepr::Zero => Ok(ConstRule::Zero),
        }
    }
}

/// Parameters of the generated family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
pub struct Example112<E: ValueAlgebra> {
    pub constants: ConstRule<E>,
    pub epsilon: Rational,
    pub domain: OpenBox,
}

impl<E: ValueAlgebra> Example112<E> {
    pub fn new(constants: ConstRule<E>, epsilon: Rational, domain: OpenBox) -> Result<Self> {
        if epsilon <= Rational::zero() {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
        if domain.dim() != 1 {
            return Err(Error::dim(1, domain.dim()));
        }
        if matches!(&constants, ConstRule::Enumerated(vs) if vs.is_empty()) {
            return Err(Error::Precondition("enumerated constants are empty".into()));
        }
        Ok(Example112 {
            constants,
            epsilon,
            domain,
        })
    }

    /// The first `count` anchors x_0 .. x_{count-1}.
    pub fn anchors(&self, count: usize) -> Result<Vec<Rational>> {
        let mut walk = Enumeration::new(&self.domain)?;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            out.push(walk.next_anchor()?);
        }
        Ok(out)
    }

    /// Enumeration index of `x`, or an error when `x` is not reached within
    /// the probe budget.
    pub fn index_of(&self, x: &Rational) -> Result<usize> {
        if !self.domain.contains(&vec![x.clone()])? {
            return Err(Error::UncoveredPoint(format!("({x})")));
        }
        let mut walk = Enumeration::new(&self.domain)?;
        let mut n = 0;
        loop {
            if walk.next_anchor()? == *x {
                return Ok(n);
            }
            n += 1;
        }
    }

    /// Radius of chart `n` given the anchor prefix: the dyadic cap or half
    /// the distance to the nearest earlier anchor, whichever is smaller.
    pub fn radius(&self, n: usize, anchors: &[Rational]) -> Rational {
        let cap = &self.epsilon * &Rational::pow2_neg(n as u64 + 1);
        let Some(nearest) = anchors[..n]
            .iter()
            .map(|a| (a - &anchors[n]).abs())
            .min()
        else {
            return cap;
        };
        let half = nearest * Rational::ratio(1, 2);
        if half < cap {
            half
        } else {
            cap
        }
    }

    /// Chart of anchor index `n` given the anchor prefix (length > n).
    pub fn chart(&self, n: usize, anchors: &[Rational]) -> Chart<E> {
        let r = self.radius(n, anchors);
        let lo = &anchors[n] - &r;
        let hi = &anchors[n] + &r;
        Chart {
            region: OpenBox::segment(lo, hi).expect("positive radius"),
            term: PolyTerm::constant(1, self.constants.value(n)),
        }
    }

    /// The first `count` charts.
    pub fn charts(&self, count: usize) -> Result<Vec<Chart<E>>> {
        let anchors = self.anchors(count)?;
        Ok((0..count).map(|n| self.chart(n, &anchors)).collect())
    }

    /// Chart assigned to the rational point `x` (which is anchor number
    /// `index_of(x)`).
    pub fn chart_at(&self, x: &Rational) -> Result<Chart<E>> {
        let n = self.index_of(x)?;
        let anchors = self.anchors(n + 1)?;
        Ok(self.chart(n, &anchors))
    }
}

/// Signed breadth-first walk of the positive-rational tree: 1, 1/2, 2, 1/3,
/// 3/2, 2/3, 3, ... via the successor map q -> 1 / (2 floor(q) - q + 1).
struct TreeWalk {
    next: Option<Rational>,
    pending_negative: Option<Rational>,
}

impl TreeWalk {
    fn new() -> Self {
        TreeWalk {
            next: Some(Rational::from_int(0)),
            pending_negative: None,
        }
    }
}

impl Iterator for TreeWalk {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        if let Some(neg) = self.pending_negative.take() {
            return Some(neg);
        }
        let current = self.next.take().expect("infinite walk");
        if !current.is_zero() {
            self.pending_negative = Some(-current.clone());
        }
        // Successor q -> 1 / (2 floor(q) - q + 1); applied to the seed 0 it
        // yields 1, the root of the positive tree.
        let two_floor = Rational::from_bigint(current.floor_int() * BigInt::from(2));
        let denom = two_floor - current.clone() + Rational::from_int(1);
        self.next = Some(Rational::from_int(1) / denom);
        Some(current)
    }
}

/// Interleaves the filtered tree walk with a dyadic strand converging to the
/// first anchor, deduplicating as it goes.
struct Enumeration<'a> {
    domain: &'a OpenBox,
    tree: TreeWalk,
    seen: BTreeSet<Rational>,
    first: Option<Rational>,
    dyadic_step: Rational,
    dyadic_scale: Rational,
    take_dyadic: bool,
    raw_steps: usize,
}

impl<'a> Enumeration<'a> {
    fn new(domain: &'a OpenBox) -> Result<Self> {
        Ok(Enumeration {
            domain,
            tree: TreeWalk::new(),
            seen: BTreeSet::new(),
            first: None,
            dyadic_step: Rational::one(),
            dyadic_scale: Rational::one(),
            take_dyadic: true,
            raw_steps: 0,
        })
    }

    fn budget(&mut self) -> Result<()> {
        self.raw_steps += 1;
        if self.raw_steps > ENUM_BUDGET {
            return Err(Error::EnumerationBudget(format!(
                "more than {ENUM_BUDGET} enumeration steps"
            )));
        }
        Ok(())
    }

    fn next_tree_in_domain(&mut self) -> Result<Rational> {
        loop {
            self.budget()?;
            let candidate = self.tree.next().expect("infinite walk");
            if self.domain.contains(&vec![candidate.clone()])? && !self.seen.contains(&candidate) {
                return Ok(candidate);
            }
        }
    }

    fn next_dyadic(&mut self) -> Result<Rational> {
        let first = self.first.clone().expect("dyadic strand needs an anchor");
        loop {
            self.budget()?;
            self.dyadic_step = &self.dyadic_step * &Rational::ratio(1, 2);
            let candidate = &first + &(&self.dyadic_scale * &self.dyadic_step);
            debug_assert!(self.domain.contains(&vec![candidate.clone()]).unwrap());
            if !self.seen.contains(&candidate) {
                return Ok(candidate);
            }
        }
    }

    fn next_anchor(&mut self) -> Result<Rational> {
        let value = match &self.first {
            None => {
                let x0 = self.next_tree_in_domain()?;
                // The dyadic strand approaches x0 from above, scaled into the
                // domain when the upper endpoint is finite.
                self.dyadic_scale = match self.domain.intervals()[0].hi() {
                    Endpoint::Value(hi) => hi - &x0,
                    _ => Rational::one(),
                };
                self.first = Some(x0.clone());
                x0
            }
            Some(_) => {
                let take_dyadic = self.take_dyadic;
                self.take_dyadic = !self.take_dyadic;
                if take_dyadic {
                    self.next_dyadic()?
                } else {
                    self.next_tree_in_domain()?
                }
            }
        };
        self.seen.insert(value.clone());
        Ok(value)
    }
}

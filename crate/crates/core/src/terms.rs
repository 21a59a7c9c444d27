//! Sparse multivariate polynomials over the value algebra: the symbolic
//! component functions carried by every chart.
//!
//! Coefficients live in an arbitrary [`ValueAlgebra`] instance, so products
//! are order-sensitive in the matrix instance. Derivatives are formal and
//! exact; a term all of whose derivatives vanish at a point is the zero
//! polynomial, which is what makes vanishing conditions decidable here.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{Rational, ValueAlgebra, ValueE};
use crate::error::{Error, Result};
use crate::regions::Point;

/// Derivative multi-index p in N^n.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The i-th unit index e_i.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |p|, the total derivative order.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    fn checked_sub(&self, rhs: &MultiIndex) -> Option<MultiIndex> {
        if self.dim() != rhs.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&rhs.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    fn add(&self, rhs: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// Smoothness grade: a finite differentiability cap, or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SmoothGrade {
    Finite(u32),
    Infinity,
}

impl SmoothGrade {
    pub fn min(self, other: SmoothGrade) -> SmoothGrade {
        std::cmp::min(self, other)
    }

    /// Grade after differentiating `order` times, floored at 0.
    pub fn lowered(self, order: u32) -> SmoothGrade {
        match self {
            SmoothGrade::Finite(l) => SmoothGrade::Finite(l.saturating_sub(order)),
            SmoothGrade::Infinity => SmoothGrade::Infinity,
        }
    }
}

impl fmt::Display for SmoothGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothGrade::Finite(l) => write!(f, "{l}"),
            SmoothGrade::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for SmoothGrade {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SmoothGrade::Finite(l) => s.serialize_u32(*l),
            SmoothGrade::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SmoothGrade {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(l) => Ok(SmoothGrade::Finite(l)),
            Repr::Tag(t) if t == "inf" => Ok(SmoothGrade::Infinity),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!("invalid grade: {t:?}"))),
        }
    }
}

/// Sparse polynomial with coefficients in `E`.
///
/// Canonical form: no zero coefficients are stored, and the zero polynomial
/// carries grade `Infinity`. The grade is an artificial differentiability
/// cap; genuine polynomials are unbounded.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyTerm<E: ValueAlgebra> {
    dim: usize,
    grade: SmoothGrade,
    monomials: BTreeMap<MultiIndex, E>,
}

impl<E: ValueAlgebra> PolyTerm<E> {
    pub fn zero(dim: usize) -> Self {
        PolyTerm {
            dim,
            grade: SmoothGrade::Infinity,
            monomials: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: E) -> Self {
        Self::from_monomials(dim, SmoothGrade::Infinity, vec![(MultiIndex::zero(dim), c)])
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, E::one())
    }

    /// The coordinate polynomial X_{i+1}.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        Self::from_monomials(dim, SmoothGrade::Infinity, vec![(MultiIndex::unit(dim, i), E::one())])
    }

    /// Canonicalizing constructor: merges duplicate indices, drops zero
    /// coefficients, normalizes the grade of the zero polynomial.
    pub fn from_monomials(
        dim: usize,
        grade: SmoothGrade,
        entries: Vec<(MultiIndex, E)>,
    ) -> Self {
        let mut monomials: BTreeMap<MultiIndex, E> = BTreeMap::new();
        for (p, c) in entries {
            assert_eq!(p.dim(), dim, "multi-index dimension mismatch");
            let entry = monomials.entry(p).or_insert_with(E::zero);
            *entry = entry.clone() + c;
        }
        monomials.retain(|_, c| !c.is_zero());
        let grade = if monomials.is_empty() {
            SmoothGrade::Infinity
        } else {
            grade
        };
        PolyTerm {
            dim,
            grade,
            monomials,
        }
    }

    /// Same monomials under an artificial smoothness cap.
    pub fn with_grade(&self, grade: SmoothGrade) -> Self {
        Self::from_monomials(
            self.dim,
            grade,
            self.monomials
                .iter()
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> SmoothGrade {
        self.grade
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&MultiIndex, &E)> {
        self.monomials.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Maximal total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.monomials.keys().map(MultiIndex::order).max()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dim(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let mut entries: Vec<(MultiIndex, E)> = self
            .monomials
            .iter()
            .map(|(p, c)| (p.clone(), c.clone()))
            .collect();
        entries.extend(rhs.monomials.iter().map(|(p, c)| (p.clone(), c.clone())));
        Ok(Self::from_monomials(
            self.dim,
            self.grade.min(rhs.grade),
            entries,
        ))
    }

    pub fn neg(&self) -> Self {
        PolyTerm {
            dim: self.dim,
            grade: self.grade,
            monomials: self
                .monomials
                .iter()
                .map(|(p, c)| (p.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    /// Order-sensitive product: coefficients multiply as self * rhs.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let mut entries = Vec::with_capacity(self.monomials.len() * rhs.monomials.len());
        for (p, a) in &self.monomials {
            for (q, b) in &rhs.monomials {
                entries.push((p.add(q), a.clone() * b.clone()));
            }
        }
        Ok(Self::from_monomials(
            self.dim,
            self.grade.min(rhs.grade),
            entries,
        ))
    }

    /// Scale on the left by q · 1.
    pub fn scale(&self, q: &Rational) -> Self {
        Self::from_monomials(
            self.dim,
            self.grade,
            self.monomials
                .iter()
                .map(|(p, c)| (p.clone(), E::from_rational(q.clone()) * c.clone()))
                .collect(),
        )
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &Point) -> Result<E> {
        if x.len() != self.dim {
            return Err(Error::dim(self.dim, x.len()));
        }
        let mut acc = E::zero();
        for (p, c) in &self.monomials {
            let mut pow = Rational::one();
            for (xi, &ei) in x.iter().zip(&p.0) {
                if ei > 0 {
                    pow = pow * xi.pow_u(ei);
                }
            }
            acc = acc + c.clone() * E::from_rational(pow);
        }
        Ok(acc)
    }

    /// Formal partial derivative D^p. Lowers a finite grade by |p|.
    pub fn derive(&self, p: &MultiIndex) -> Result<Self> {
        if p.dim() != self.dim {
            return Err(Error::dim(self.dim, p.dim()));
        }
        let mut entries = Vec::new();
        for (q, c) in &self.monomials {
            let Some(rest) = q.checked_sub(p) else {
                continue;
            };
            // Falling-factorial factor prod_i q_i (q_i - 1) ... (q_i - p_i + 1).
            let mut factor = BigInt::one();
            for (&qi, &pi) in q.0.iter().zip(&p.0) {
                for step in 0..pi {
                    factor *= BigInt::from(qi - step);
                }
            }
            entries.push((
                rest,
                c.clone() * E::from_rational(Rational::from_bigint(factor)),
            ));
        }
        Ok(Self::from_monomials(
            self.dim,
            self.grade.lowered(p.order()),
            entries,
        ))
    }
}

impl<E: ValueAlgebra> fmt::Display for PolyTerm<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.monomials {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if p.order() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})")?;
                for (i, &e) in p.0.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => write!(f, "*X{}", i + 1)?,
                        _ => write!(f, "*X{}^{}", i + 1, e)?,
                    }
                }
            }
        }
        Ok(())
    }
}

impl<E: ValueAlgebra> fmt::Debug for PolyTerm<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (grade {})", self.grade)
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialRepr {
    p: MultiIndex,
    c: ValueE,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    dim: usize,
    grade: SmoothGrade,
    monomials: Vec<MonomialRepr>,
}

impl<E: ValueAlgebra> Serialize for PolyTerm<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // BTreeMap iteration gives the lexicographic monomial order required
        // for canonical output.
        TermRepr {
            dim: self.dim,
            grade: self.grade,
            monomials: self
                .monomials
                .iter()
                .map(|(p, c)| MonomialRepr {
                    p: p.clone(),
                    c: c.clone().into_value(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, E: ValueAlgebra> Deserialize<'de> for PolyTerm<E> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TermRepr::deserialize(d)?;
        let mut entries = Vec::with_capacity(repr.monomials.len());
        for m in repr.monomials {
            if m.p.dim() != repr.dim {
                return Err(serde::de::Error::custom(Error::dim(repr.dim, m.p.dim())));
            }
            let c = E::from_value(&m.c).map_err(serde::de::Error::custom)?;
            entries.push((m.p, c));
        }
        Ok(PolyTerm::from_monomials(repr.dim, repr.grade, entries))
    }
}

/// All multi-indices of the given dimension with order at most `max_order`.
pub fn multi_indices_up_to(dim: usize, max_order: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    fn rec(current: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<MultiIndex>) {
        if pos == current.len() {
            out.push(MultiIndex(current.clone()));
            return;
        }
        for v in 0..=budget {
            current[pos] = v;
            rec(current, pos + 1, budget - v, out);
        }
        current[pos] = 0;
    }
    rec(&mut current, 0, max_order, &mut out);
    out
}

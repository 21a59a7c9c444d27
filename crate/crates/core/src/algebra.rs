//! The value algebra `E`: exact rational scalars and 2x2 rational matrices.
//!
//! Everything downstream is generic over [`ValueAlgebra`]. The commutative
//! instance is [`Rational`]; [`Mat2`] is the minimal exact instance with
//! non-commuting elements. [`ValueE`] is the variant-tagged form used at
//! serialization boundaries, where mixing the two instances is a runtime
//! error rather than a type error.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number, always in canonical form: reduced, positive
/// denominator. Equality is syntactic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// p/q from machine integers; `q` must be nonzero.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Exact non-negative integer power.
    pub fn pow_u(&self, e: u32) -> Self {
        Rational(num_traits::pow::pow(self.0.clone(), e as usize))
    }

    /// n! as a rational.
    pub fn factorial(n: u64) -> Self {
        let mut acc = BigInt::one();
        for k in 2..=n {
            acc *= BigInt::from(k);
        }
        Rational::from_bigint(acc)
    }

    /// 2^-k.
    pub fn pow2_neg(k: u64) -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    /// Largest integer not exceeding the value.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses "p" or "p/q" with optional sign on either part.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |_| Error::Parse(format!("invalid rational: {s:?}"));
        match s.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(
                BigInt::from_str(s).map_err(bad)?,
            ))),
            Some((p, q)) => {
                let numer = BigInt::from_str(p.trim()).map_err(bad)?;
                let denom = BigInt::from_str(q.trim()).map_err(bad)?;
                Rational::new(numer, denom)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(BigRational::one())
    }
}

/// 2x2 matrix over [`Rational`], row-major entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2(pub [Rational; 4]);

impl Mat2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Mat2([a, b, c, d])
    }

    pub fn diag(a: Rational, d: Rational) -> Self {
        Mat2([a, Rational::zero(), Rational::zero(), d])
    }

    /// q times the identity.
    pub fn scalar(q: Rational) -> Self {
        Mat2::diag(q.clone(), q)
    }

    pub fn entries(&self) -> &[Rational; 4] {
        &self.0
    }

    /// A pair of matrices with `AB != BA`.
    pub fn non_commuting_pair() -> (Mat2, Mat2) {
        let one = Rational::one;
        let zero = Rational::zero;
        (
            Mat2::new(zero(), one(), zero(), zero()),
            Mat2::new(zero(), zero(), one(), zero()),
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = rhs.0;
        Mat2([a + e, b + f, c + g, d + h])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        let [a, b, c, d] = self.0;
        Mat2([-a, -b, -c, -d])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &rhs.0;
        Mat2([
            a * e + b * g,
            a * f + b * h,
            c * e + d * g,
            c * f + d * h,
        ])
    }
}

impl Zero for Mat2 {
    fn zero() -> Self {
        Mat2::scalar(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }
}

impl One for Mat2 {
    fn one() -> Self {
        Mat2::diag(Rational::one(), Rational::one())
    }
}

impl Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = <[Rational; 4]>::deserialize(d)?;
        Ok(Mat2(entries))
    }
}

/// Which instance of the value algebra a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EVariant {
    Scalar,
    Mat2,
}

impl EVariant {
    pub fn name(self) -> &'static str {
        match self {
            EVariant::Scalar => "scalar",
            EVariant::Mat2 => "mat2",
        }
    }

    /// The scalar instance commutes; the matrix instance does not.
    pub fn is_commutative(self) -> bool {
        matches!(self, EVariant::Scalar)
    }
}

/// Variant-tagged element of the value algebra, as used on the wire and at
/// the CLI boundary. Arithmetic requires both operands from the same
/// instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueE {
    Scalar(Rational),
    Mat2(Mat2),
}

impl ValueE {
    pub fn variant(&self) -> EVariant {
        match self {
            ValueE::Scalar(_) => EVariant::Scalar,
            ValueE::Mat2(_) => EVariant::Mat2,
        }
    }

    pub fn is_commutative(&self) -> bool {
        self.variant().is_commutative()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ValueE::Scalar(q) => q.is_zero(),
            ValueE::Mat2(m) => m.is_zero(),
        }
    }

    pub fn zero_of(variant: EVariant) -> ValueE {
        match variant {
            EVariant::Scalar => ValueE::Scalar(Rational::zero()),
            EVariant::Mat2 => ValueE::Mat2(Mat2::zero()),
        }
    }

    pub fn one_of(variant: EVariant) -> ValueE {
        match variant {
            EVariant::Scalar => ValueE::Scalar(Rational::one()),
            EVariant::Mat2 => ValueE::Mat2(Mat2::one()),
        }
    }

    pub fn try_add(&self, rhs: &ValueE) -> Result<ValueE> {
        match (self, rhs) {
            (ValueE::Scalar(a), ValueE::Scalar(b)) => Ok(ValueE::Scalar(a + b)),
            (ValueE::Mat2(a), ValueE::Mat2(b)) => Ok(ValueE::Mat2(a.clone() + b.clone())),
            _ => Err(Error::VariantMismatch(
                self.variant().name(),
                rhs.variant().name(),
            )),
        }
    }

    pub fn try_mul(&self, rhs: &ValueE) -> Result<ValueE> {
        match (self, rhs) {
            (ValueE::Scalar(a), ValueE::Scalar(b)) => Ok(ValueE::Scalar(a * b)),
            (ValueE::Mat2(a), ValueE::Mat2(b)) => Ok(ValueE::Mat2(a.clone() * b.clone())),
            _ => Err(Error::VariantMismatch(
                self.variant().name(),
                rhs.variant().name(),
            )),
        }
    }

    pub fn neg(&self) -> ValueE {
        match self {
            ValueE::Scalar(a) => ValueE::Scalar(-a),
            ValueE::Mat2(a) => ValueE::Mat2(-a.clone()),
        }
    }
}

impl fmt::Display for ValueE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueE::Scalar(q) => write!(f, "{q}"),
            ValueE::Mat2(m) => write!(f, "{m}"),
        }
    }
}

/// Coefficient algebra the symbolic layer is generic over: an exact unital
/// ring with an embedding of the rationals into its center.
pub trait ValueAlgebra:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    const VARIANT: EVariant;

    /// q · 1, a central element.
    fn from_rational(q: Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }

    fn into_value(self) -> ValueE;

    /// Fails with a variant-mismatch error on the wrong instance.
    fn from_value(v: &ValueE) -> Result<Self>;

    fn is_commutative() -> bool {
        Self::VARIANT.is_commutative()
    }
}

impl ValueAlgebra for Rational {
    const VARIANT: EVariant = EVariant::Scalar;

    fn from_rational(q: Rational) -> Self {
        q
    }

    fn into_value(self) -> ValueE {
        ValueE::Scalar(self)
    }

    fn from_value(v: &ValueE) -> Result<Self> {
        match v {
            ValueE::Scalar(q) => Ok(q.clone()),
            other => Err(Error::VariantMismatch("scalar", other.variant().name())),
        }
    }
}

impl ValueAlgebra for Mat2 {
    const VARIANT: EVariant = EVariant::Mat2;

    fn from_rational(q: Rational) -> Self {
        Mat2::scalar(q)
    }

    fn into_value(self) -> ValueE {
        ValueE::Mat2(self)
    }

    fn from_value(v: &ValueE) -> Result<Self> {
        match v {
            ValueE::Mat2(m) => Ok(m.clone()),
            other => Err(Error::VariantMismatch("mat2", other.variant().name())),
        }
    }
}

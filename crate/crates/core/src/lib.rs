//! Exact-arithmetic algebras of locally defined functions.
//!
//! The crate builds, over a value algebra `E` of exact rational scalars or
//! 2x2 rational matrices, the tower
//!
//! * symbolic polynomial components with exact evaluation and formal
//!   partial derivatives ([`terms`]),
//! * open rational boxes as neighbourhoods ([`regions`]),
//! * decidable singularity-set descriptors and directed families of them
//!   ([`sing_sets`]),
//! * locally defined functions given by chart families over the regular
//!   points, with compatibility checking, the global-function embedding,
//!   vanishing ideals and restriction maps ([`local_fun`]),
//! * direct-limit equivalence classes over a directed family of
//!   singularity sets, with the smoothness filtration ([`limits`]),
//! * index-sequenced nets of local functions, the vanishing-certificate
//!   ideal and the resulting reduced-power quotient with termwise
//!   derivations ([`nets`]).
//!
//! All arithmetic is exact; there is no floating point anywhere. Core types
//! are generic over the coefficient algebra through [`algebra::ValueAlgebra`];
//! the two concrete instances are [`Rational`] (commutative) and [`Mat2`]
//! (non-commutative), with type aliases for both towers below.

pub mod algebra;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod limits;
pub mod local_fun;
pub mod nets;
pub mod regions;
pub mod report;
pub mod rng;
pub mod sing_sets;
pub mod suites;
pub mod terms;

pub use algebra::{EVariant, Mat2, Rational, ValueAlgebra, ValueE};
pub use error::{Error, Result};
pub use regions::{Endpoint, Interval, OpenBox, Point};
pub use sing_sets::{SFamily, SingSet};
pub use terms::{MultiIndex, PolyTerm, SmoothGrade};

/// Polynomial component with exact rational coefficients.
pub type ScalarTerm = terms::PolyTerm<Rational>;
/// Polynomial component with 2x2 rational matrix coefficients.
pub type Mat2Term = terms::PolyTerm<Mat2>;

/// Locally defined function over the commutative instance.
pub type ScalarLocalFun = local_fun::LocalFun<Rational>;
/// Locally defined function over the non-commutative instance.
pub type Mat2LocalFun = local_fun::LocalFun<Mat2>;

/// Direct-limit class over the commutative instance.
pub type ScalarClass = limits::EquivClass<Rational>;
/// Direct-limit class over the non-commutative instance.
pub type Mat2Class = limits::EquivClass<Mat2>;

/// Reduced-power element over the commutative instance.
pub type ScalarGenFun = nets::GenFun<Rational>;
/// Reduced-power element over the non-commutative instance.
pub type Mat2GenFun = nets::GenFun<Mat2>;








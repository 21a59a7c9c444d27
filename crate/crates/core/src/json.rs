//! Variant dispatch for stored payloads.
//!
//! Wire formats tag every coefficient with its instance, so a file's
//! instance is only known at parse time. Parsing probes the scalar instance
//! first and falls back to the matrix instance; mixed-instance files fail
//! both probes with a variant-mismatch error.

use crate::algebra::{Mat2, Rational, ValueE};
use crate::error::{Error, Result};
use crate::local_fun::LocalFun;
use crate::nets::{GenFun, Lambda};
use crate::regions::Point;
use crate::terms::MultiIndex;

pub enum DynLocalFun {
    Scalar(LocalFun<Rational>),
    Mat2(LocalFun<Mat2>),
}

pub enum DynGenFun {
    Scalar(GenFun<Rational>),
    Mat2(GenFun<Mat2>),
}

/// A stored evaluation subject: either a local function or a net element.
pub enum EvalInput {
    Fun(DynLocalFun),
    Net(DynGenFun),
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_eval_input(json: &str) -> Result<EvalInput> {
    let value: serde_json::Value = serde_json::from_str(json).map_err(parse_err)?;
    if value.get("net").is_some() {
        match serde_json::from_value::<GenFun<Rational>>(value.clone()) {
            Ok(g) => Ok(EvalInput::Net(DynGenFun::Scalar(g))),
            Err(scalar_err) => serde_json::from_value::<GenFun<Mat2>>(value)
                .map(|g| EvalInput::Net(DynGenFun::Mat2(g)))
                .map_err(|_| parse_err(scalar_err)),
        }
    } else {
        match serde_json::from_value::<LocalFun<Rational>>(value.clone()) {
            Ok(f) => Ok(EvalInput::Fun(DynLocalFun::Scalar(f))),
            Err(scalar_err) => serde_json::from_value::<LocalFun<Mat2>>(value)
                .map(|f| EvalInput::Fun(DynLocalFun::Mat2(f)))
                .map_err(|_| parse_err(scalar_err)),
        }
    }
}

impl DynLocalFun {
    pub fn eval(&self, x: &Point, derive: Option<&MultiIndex>) -> Result<ValueE> {
        match self {
            DynLocalFun::Scalar(f) => eval_fun(f, x, derive).map(ValueE::Scalar),
            DynLocalFun::Mat2(f) => eval_fun(f, x, derive).map(ValueE::Mat2),
        }
    }
}

fn eval_fun<E: crate::algebra::ValueAlgebra>(
    f: &LocalFun<E>,
    x: &Point,
    derive: Option<&MultiIndex>,
) -> Result<E> {
    match derive {
        Some(p) => f.derive(p)?.eval(x),
        None => f.eval(x),
    }
}

impl DynGenFun {
    /// Evaluates the component at index `lambda`.
    pub fn eval(&self, lambda: Lambda, x: &Point, derive: Option<&MultiIndex>) -> Result<ValueE> {
        match self {
            DynGenFun::Scalar(g) => {
                eval_fun(&g.component(lambda)?, x, derive).map(ValueE::Scalar)
            }
            DynGenFun::Mat2(g) => eval_fun(&g.component(lambda)?, x, derive).map(ValueE::Mat2),
        }
    }
}

impl EvalInput {
    pub fn eval(
        &self,
        lambda: Lambda,
        x: &Point,
        derive: Option<&MultiIndex>,
    ) -> Result<ValueE> {
        match self {
            EvalInput::Fun(f) => f.eval(x, derive),
            EvalInput::Net(g) => g.eval(lambda, x, derive),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_fun::ConstRule;
    use crate::regions::OpenBox;
    use crate::sing_sets::{SFamily, SingSet};
    use crate::terms::PolyTerm;
    use std::sync::Arc;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn dispatches_on_coefficient_variant() {
        let scalar = LocalFun::global(PolyTerm::<Rational>::var(1, 0), SingSet::CoRational);
        let json = serde_json::to_string(&scalar).unwrap();
        let parsed = parse_eval_input(&json).unwrap();
        assert!(matches!(parsed, EvalInput::Fun(DynLocalFun::Scalar(_))));
        assert_eq!(
            parsed.eval(0, &vec![q("3/2")], None).unwrap(),
            ValueE::Scalar(q("3/2"))
        );

        let mat = LocalFun::global(
            PolyTerm::constant(1, Mat2::non_commuting_pair().0),
            SingSet::CoRational,
        );
        let json = serde_json::to_string(&mat).unwrap();
        assert!(matches!(
            parse_eval_input(&json).unwrap(),
            EvalInput::Fun(DynLocalFun::Mat2(_))
        ));
    }

    #[test]
    fn net_elements_evaluate_components() {
        let family = Arc::new(SFamily::singleton(SingSet::CoRational));
        let demo = crate::nets::build_dense_singular_demo(
            q("1/1000"),
            ConstRule::Factorial,
            OpenBox::full(1),
        )
        .unwrap();
        let json = serde_json::to_string(&demo).unwrap();
        let parsed = parse_eval_input(&json).unwrap();
        let ex = match &parsed {
            EvalInput::Net(DynGenFun::Scalar(g)) => g.component(0).unwrap(),
            _ => panic!("expected a scalar net element"),
        };
        let x5 = ex.generator().unwrap().anchors(6).unwrap()[5].clone();
        assert_eq!(
            parsed.eval(3, &vec![x5], None).unwrap(),
            ValueE::Scalar(Rational::factorial(5))
        );
        let _ = family;
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(matches!(parse_eval_input("not json"), Err(Error::Parse(_))));
        assert!(matches!(parse_eval_input("{}"), Err(Error::Parse(_))));
    }
}

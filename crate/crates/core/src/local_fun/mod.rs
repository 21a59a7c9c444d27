//! Locally defined functions: chart families over the regular points of a
//! singularity set.
//!
//! A value assigns to each regular rational point a chart (an open box
//! containing the point plus a polynomial component). Finite families
//! assign the first chart whose box contains the point; generated families
//! assign by rule. The weak compatibility condition — agreement of two
//! charts whenever each anchor lies in the other's box — is verified at
//! witness scale by [`LocalFun::check_compat`]; the strong variant
//! (agreement on any overlap) is checked by
//! [`LocalFun::check_strong_compat`] and genuinely fails for the generated
//! dense-anchor family.
//!
//! Note that a finite first-match family satisfies the weak condition by
//! construction: if the first box containing `y` is listed after a box that
//! also contains `y`, the assignment would have picked the earlier one.
//! The checker still verifies it pair by pair, both because generated
//! families carry no such argument and because the reports feed the CLI.

mod example112;

pub use example112::{ConstRule, Example112};

use serde::{Deserialize, Serialize};

use crate::algebra::{Rational, ValueAlgebra};
use crate::error::{Error, Result};
use crate::regions::{fmt_point, OpenBox, Point};
use crate::sing_sets::{regular_sample, subset_leq, SingSet};
use crate::terms::{MultiIndex, PolyTerm, SmoothGrade};

/// Fixed stream id for the ideal-membership probe draws.
const IDEAL_PROBE_SEED: u64 = 0x1dea;

/// One neighbourhood with its component function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
pub struct Chart<E: ValueAlgebra> {
    #[serde(rename = "box")]
    pub region: OpenBox,
    pub term: PolyTerm<E>,
}

/// Generated chart families: the dense-anchor construction plus the closure
/// of families under the algebra operations and differentiation.
#[derive(Debug, Clone, PartialEq)]
pub enum GenRule<E: ValueAlgebra> {
    Example112(Example112<E>),
    Add(Box<LocalFun<E>>, Box<LocalFun<E>>),
    Mul(Box<LocalFun<E>>, Box<LocalFun<E>>),
    Neg(Box<LocalFun<E>>),
    Derive(Box<LocalFun<E>>, MultiIndex),
}

impl<E: ValueAlgebra> GenRule<E> {
    fn chart_at(&self, x: &Point) -> Result<Chart<E>> {
        match self {
            GenRule::Example112(ex) => ex.chart_at(&x[0]),
            GenRule::Add(f, g) => combine(f, g, x, PolyTerm::add),
            GenRule::Mul(f, g) => combine(f, g, x, PolyTerm::mul),
            GenRule::Neg(f) => {
                let c = f.chart_at(x)?;
                Ok(Chart {
                    region: c.region,
                    term: c.term.neg(),
                })
            }
            GenRule::Derive(f, p) => {
                let c = f.chart_at(x)?;
                Ok(Chart {
                    region: c.region,
                    term: c.term.derive(p)?,
                })
            }
        }
    }

    fn grade(&self) -> SmoothGrade {
        match self {
            GenRule::Example112(_) => SmoothGrade::Infinity,
            GenRule::Add(f, g) | GenRule::Mul(f, g) => f.grade().min(g.grade()),
            GenRule::Neg(f) => f.grade(),
            GenRule::Derive(f, p) => f.grade().lowered(p.order()),
        }
    }
}

fn combine<E: ValueAlgebra>(
    f: &LocalFun<E>,
    g: &LocalFun<E>,
    x: &Point,
    op: fn(&PolyTerm<E>, &PolyTerm<E>) -> Result<PolyTerm<E>>,
) -> Result<Chart<E>> {
    let a = f.chart_at(x)?;
    let b = g.chart_at(x)?;
    let region = a
        .region
        .intersect(&b.region)
        .expect("both boxes contain the probed point");
    Ok(Chart {
        region,
        term: op(&a.term, &b.term)?,
    })
}

/// Chart assignment of a local function.
#[derive(Debug, Clone, PartialEq)]
pub enum Charts<E: ValueAlgebra> {
    /// First chart whose box contains the point.
    Finite(Vec<Chart<E>>),
    Generated(GenRule<E>),
}

/// A locally defined function over the regular points of `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFun<E: ValueAlgebra> {
    sigma: SingSet,
    dim: usize,
    charts: Charts<E>,
}

/// Vanishing locus for ideal membership: an open box or finitely many
/// rational points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZSet {
    Box(OpenBox),
    Points(Vec<Point>),
}

impl ZSet {
    pub fn contains(&self, x: &Point) -> Result<bool> {
        match self {
            ZSet::Box(b) => b.contains(x),
            ZSet::Points(ps) => Ok(ps.iter().any(|p| p == x)),
        }
    }

    /// Z minus the singular set must be nonempty.
    pub fn has_regular_point(&self, sigma: &SingSet) -> bool {
        match self {
            ZSet::Box(b) => regular_sample(sigma, b, 1, IDEAL_PROBE_SEED).is_ok(),
            ZSet::Points(ps) => ps.iter().any(|p| !sigma.is_singular(p)),
        }
    }
}

/// Outcome of a compatibility check over a witness set.
#[derive(Debug, Clone, Serialize)]
pub struct CompatReport {
    pub holds: bool,
    pub pairs_checked: usize,
    pub violations: Vec<CompatViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatViolation {
    pub x: Point,
    pub y: Point,
    pub term_x: String,
    pub term_y: String,
}

impl<E: ValueAlgebra> LocalFun<E> {
    /// The embedding of a globally defined function: one chart over the
    /// whole space.
    pub fn global(term: PolyTerm<E>, sigma: SingSet) -> Self {
        let dim = term.dim();
        LocalFun {
            sigma,
            dim,
            charts: Charts::Finite(vec![Chart {
                region: OpenBox::full(dim),
                term,
            }]),
        }
    }

    /// The zero function over `sigma`.
    pub fn zero(dim: usize, sigma: SingSet) -> Self {
        Self::global(PolyTerm::zero(dim), sigma)
    }

    pub fn finite(sigma: SingSet, dim: usize, charts: Vec<Chart<E>>) -> Result<Self> {
        for c in &charts {
            if c.region.dim() != dim || c.term.dim() != dim {
                return Err(Error::dim(dim, c.region.dim().max(c.term.dim())));
            }
        }
        Ok(LocalFun {
            sigma,
            dim,
            charts: Charts::Finite(charts),
        })
    }

    /// The countable dense-anchor family with constant components; its
    /// singularity set is the co-rational set, so every rational point of
    /// the domain is regular.
    pub fn example_1_1_2(
        constants: ConstRule<E>,
        epsilon: Rational,
        domain: OpenBox,
    ) -> Result<Self> {
        let gen = Example112::new(constants, epsilon, domain)?;
        Ok(LocalFun {
            sigma: SingSet::CoRational,
            dim: 1,
            charts: Charts::Generated(GenRule::Example112(gen)),
        })
    }

    pub fn sigma(&self) -> &SingSet {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn charts(&self) -> &Charts<E> {
        &self.charts
    }

    /// The generator parameters when this is the dense-anchor family.
    pub fn generator(&self) -> Option<&Example112<E>> {
        match &self.charts {
            Charts::Generated(GenRule::Example112(ex)) => Some(ex),
            _ => None,
        }
    }

    /// Minimum smoothness grade over the (structurally reachable) charts.
    pub fn grade(&self) -> SmoothGrade {
        match &self.charts {
            Charts::Finite(cs) => cs
                .iter()
                .map(|c| c.term.grade())
                .min()
                .unwrap_or(SmoothGrade::Infinity),
            Charts::Generated(rule) => rule.grade(),
        }
    }

    /// The chart assigned to a regular rational point.
    pub fn chart_at(&self, x: &Point) -> Result<Chart<E>> {
        if x.len() != self.dim {
            return Err(Error::dim(self.dim, x.len()));
        }
        if self.sigma.is_singular(x) {
            return Err(Error::SingularPoint(fmt_point(x)));
        }
        match &self.charts {
            Charts::Finite(cs) => {
                for c in cs {
                    if c.region.contains(x)? {
                        return Ok(c.clone());
                    }
                }
                Err(Error::UncoveredPoint(fmt_point(x)))
            }
            Charts::Generated(rule) => {
                let c = rule.chart_at(x)?;
                debug_assert!(c.region.contains(x).unwrap_or(false));
                Ok(c)
            }
        }
    }

    /// Value of the assigned component at its anchor point.
    pub fn eval(&self, x: &Point) -> Result<E> {
        self.chart_at(x)?.term.eval(x)
    }

    /// Is this structurally the embedding of a global function?
    pub fn is_global(&self) -> Option<&PolyTerm<E>> {
        match &self.charts {
            Charts::Finite(cs) if cs.len() == 1 && cs[0].region.is_full() => Some(&cs[0].term),
            _ => None,
        }
    }

    fn check_operand(&self, rhs: &Self) -> Result<()> {
        if self.sigma != rhs.sigma {
            return Err(Error::Precondition(
                "singularity sets differ; restrict to a common one first".into(),
            ));
        }
        if self.dim != rhs.dim {
            return Err(Error::dim(self.dim, rhs.dim));
        }
        Ok(())
    }

    fn pairwise(
        &self,
        rhs: &Self,
        op: fn(&PolyTerm<E>, &PolyTerm<E>) -> Result<PolyTerm<E>>,
    ) -> Result<Option<Vec<Chart<E>>>> {
        let (Charts::Finite(a), Charts::Finite(b)) = (&self.charts, &rhs.charts) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for ca in a {
            for cb in b {
                if let Some(region) = ca.region.intersect(&cb.region) {
                    out.push(Chart {
                        region,
                        term: op(&ca.term, &cb.term)?,
                    });
                }
            }
        }
        Ok(Some(out))
    }

    fn with_charts(&self, charts: Charts<E>) -> Self {
        LocalFun {
            sigma: self.sigma.clone(),
            dim: self.dim,
            charts,
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_operand(rhs)?;
        Ok(match self.pairwise(rhs, PolyTerm::add)? {
            Some(charts) => self.with_charts(Charts::Finite(charts)),
            None => self.with_charts(Charts::Generated(GenRule::Add(
                Box::new(self.clone()),
                Box::new(rhs.clone()),
            ))),
        })
    }

    /// Order-sensitive product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_operand(rhs)?;
        Ok(match self.pairwise(rhs, PolyTerm::mul)? {
            Some(charts) => self.with_charts(Charts::Finite(charts)),
            None => self.with_charts(Charts::Generated(GenRule::Mul(
                Box::new(self.clone()),
                Box::new(rhs.clone()),
            ))),
        })
    }

    pub fn neg(&self) -> Self {
        match &self.charts {
            Charts::Finite(cs) => self.with_charts(Charts::Finite(
                cs.iter()
                    .map(|c| Chart {
                        region: c.region.clone(),
                        term: c.term.neg(),
                    })
                    .collect(),
            )),
            Charts::Generated(_) => {
                self.with_charts(Charts::Generated(GenRule::Neg(Box::new(self.clone()))))
            }
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    /// Chartwise formal derivative.
    pub fn derive(&self, p: &MultiIndex) -> Result<Self> {
        if p.dim() != self.dim {
            return Err(Error::dim(self.dim, p.dim()));
        }
        Ok(match &self.charts {
            Charts::Finite(cs) => self.with_charts(Charts::Finite(
                cs.iter()
                    .map(|c| {
                        Ok(Chart {
                            region: c.region.clone(),
                            term: c.term.derive(p)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            )),
            Charts::Generated(_) => self.with_charts(Charts::Generated(GenRule::Derive(
                Box::new(self.clone()),
                p.clone(),
            ))),
        })
    }

    /// Re-index the family over a larger certified singularity set. The
    /// charts are untouched; only the regular set shrinks.
    pub fn restrict(&self, sigma: &SingSet) -> Result<Self> {
        if !subset_leq(&self.sigma, sigma) {
            return Err(Error::UncertifiedRestriction);
        }
        Ok(LocalFun {
            sigma: sigma.clone(),
            dim: self.dim,
            charts: self.charts.clone(),
        })
    }

    fn compat_over(&self, witnesses: &[Point], strong: bool) -> Result<CompatReport> {
        let mut assigned = Vec::with_capacity(witnesses.len());
        for w in witnesses {
            assigned.push((w.clone(), self.chart_at(w)?));
        }
        let mut violations = Vec::new();
        let mut pairs = 0;
        for (i, (x, cx)) in assigned.iter().enumerate() {
            for (y, cy) in assigned.iter().skip(i + 1) {
                pairs += 1;
                let triggered = if strong {
                    cx.region.intersect(&cy.region).is_some()
                } else {
                    cx.region.contains(y)? && cy.region.contains(x)?
                };
                if triggered && cx.term != cy.term {
                    violations.push(CompatViolation {
                        x: x.clone(),
                        y: y.clone(),
                        term_x: cx.term.to_string(),
                        term_y: cy.term.to_string(),
                    });
                }
            }
        }
        Ok(CompatReport {
            holds: violations.is_empty(),
            pairs_checked: pairs,
            violations,
        })
    }

    /// Weak compatibility at witness scale: triggered when each anchor lies
    /// in the other's box. Polynomial components agree on a nonempty open
    /// overlap exactly when they are syntactically equal.
    pub fn check_compat(&self, witnesses: &[Point]) -> Result<CompatReport> {
        self.compat_over(witnesses, false)
    }

    /// Strong compatibility: triggered by any nonempty box overlap.
    pub fn check_strong_compat(&self, witnesses: &[Point]) -> Result<CompatReport> {
        self.compat_over(witnesses, true)
    }

    /// Membership in the vanishing ideal of `z`: the assigned component
    /// evaluates to zero at every witness. For finite families over a box,
    /// extra deterministic probes (one more than the maximal degree) refute
    /// membership whenever some assigned component is visibly nonzero.
    pub fn in_ideal(&self, z: &ZSet, witnesses: &[Point]) -> Result<bool> {
        if !z.has_regular_point(&self.sigma) {
            return Err(Error::Precondition(
                "vanishing locus contains no regular point".into(),
            ));
        }
        for w in witnesses {
            if !z.contains(w)? || self.sigma.is_singular(w) {
                return Err(Error::Precondition(format!(
                    "witness {} is not a regular point of the locus",
                    fmt_point(w)
                )));
            }
        }
        for w in witnesses {
            if !self.eval(w)?.is_zero() {
                return Ok(false);
            }
        }
        if let (Charts::Finite(cs), ZSet::Box(zb)) = (&self.charts, z) {
            if self.dim == 1 {
                // A nonzero univariate component of degree d cannot vanish
                // at d+1 distinct regular points.
                let max_deg = cs
                    .iter()
                    .filter_map(|c| c.term.total_degree())
                    .max()
                    .unwrap_or(0);
                let probes =
                    regular_sample(&self.sigma, zb, max_deg as usize + 1, IDEAL_PROBE_SEED)?;
                for p in probes {
                    match self.chart_at(&p) {
                        Ok(c) => {
                            if !c.term.eval(&p)?.is_zero() {
                                return Ok(false);
                            }
                        }
                        Err(Error::UncoveredPoint(_)) => continue,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(true)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[serde(bound(serialize = "", deserialize = ""))]
enum BodyRepr<E: ValueAlgebra> {
    Charts(Vec<Chart<E>>),
    Example112(Example112<E>),
    Add {
        lhs: Box<LocalFun<E>>,
        rhs: Box<LocalFun<E>>,
    },
    Mul {
        lhs: Box<LocalFun<E>>,
        rhs: Box<LocalFun<E>>,
    },
    Neg {
        of: Box<LocalFun<E>>,
    },
    Derive {
        of: Box<LocalFun<E>>,
        p: MultiIndex,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
struct LocalFunRepr<E: ValueAlgebra> {
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<SingSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(flatten)]
    body: BodyRepr<E>,
}

impl<E: ValueAlgebra> Serialize for LocalFun<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let body = match &self.charts {
            Charts::Finite(cs) => BodyRepr::Charts(cs.clone()),
            Charts::Generated(GenRule::Example112(ex)) => BodyRepr::Example112(ex.clone()),
            Charts::Generated(GenRule::Add(f, g)) => BodyRepr::Add {
                lhs: f.clone(),
                rhs: g.clone(),
            },
            Charts::Generated(GenRule::Mul(f, g)) => BodyRepr::Mul {
                lhs: f.clone(),
                rhs: g.clone(),
            },
            Charts::Generated(GenRule::Neg(f)) => BodyRepr::Neg { of: f.clone() },
            Charts::Generated(GenRule::Derive(f, p)) => BodyRepr::Derive {
                of: f.clone(),
                p: p.clone(),
            },
        };
        LocalFunRepr {
            sigma: Some(self.sigma.clone()),
            dim: Some(self.dim),
            body,
        }
        .serialize(s)
    }
}

impl<'de, E: ValueAlgebra> Deserialize<'de> for LocalFun<E> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LocalFunRepr::<E>::deserialize(d)?;
        lift_repr(repr).map_err(serde::de::Error::custom)
    }
}

fn lift_repr<E: ValueAlgebra>(repr: LocalFunRepr<E>) -> Result<LocalFun<E>> {
    match repr.body {
        BodyRepr::Charts(cs) => {
            let sigma = repr
                .sigma
                .ok_or_else(|| Error::Parse("finite family needs a sigma".into()))?;
            let dim = repr
                .dim
                .or_else(|| cs.first().map(|c| c.region.dim()))
                .ok_or_else(|| {
                    Error::Parse("finite family needs a dim or at least one chart".into())
                })?;
            LocalFun::finite(sigma, dim, cs)
        }
        BodyRepr::Example112(ex) => {
            let f = LocalFun::example_1_1_2(ex.constants, ex.epsilon, ex.domain)?;
            match repr.sigma {
                None => Ok(f),
                Some(SingSet::CoRational) => Ok(f),
                Some(s) => f.restrict(&s),
            }
        }
        BodyRepr::Add { lhs, rhs } => lhs.add(&rhs),
        BodyRepr::Mul { lhs, rhs } => lhs.mul(&rhs),
        BodyRepr::Neg { of } => Ok(of.neg()),
        BodyRepr::Derive { of, p } => of.derive(&p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Mat2;
    use crate::fixtures;
    use num_traits::Zero;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pt(s: &str) -> Point {
        vec![q(s)]
    }

    fn x_sq() -> PolyTerm<Rational> {
        let x = PolyTerm::var(1, 0);
        x.mul(&x).unwrap()
    }

    fn dense_family(constants: ConstRule<Rational>) -> LocalFun<Rational> {
        LocalFun::example_1_1_2(constants, q("1/1000"), OpenBox::full(1)).unwrap()
    }

    #[test]
    fn global_chart_covers_everything() {
        let f = LocalFun::global(x_sq(), SingSet::CoRational);
        for s in ["0", "3/2", "-17/5"] {
            let c = f.chart_at(&pt(s)).unwrap();
            assert!(c.region.is_full());
            assert_eq!(c.term, x_sq());
        }
        assert_eq!(f.eval(&pt("3/2")).unwrap(), q("9/4"));
        assert_eq!(f.is_global(), Some(&x_sq()));
    }

    #[test]
    fn zero_family_evaluates_to_zero() {
        let z = LocalFun::<Rational>::zero(1, SingSet::Empty);
        assert!(z.eval(&pt("7/3")).unwrap().is_zero());
    }

    #[test]
    fn singular_point_is_rejected() {
        let sigma = SingSet::finite(vec![pt("1/2")]);
        let f = LocalFun::global(x_sq(), sigma);
        assert!(matches!(
            f.chart_at(&pt("1/2")),
            Err(Error::SingularPoint(_))
        ));
        assert!(f.chart_at(&pt("1/3")).is_ok());
    }

    #[test]
    fn uncovered_point_is_reported() {
        let f = LocalFun::finite(
            SingSet::Empty,
            1,
            vec![Chart {
                region: OpenBox::segment(q("0"), q("1")).unwrap(),
                term: PolyTerm::<Rational>::one(1),
            }],
        )
        .unwrap();
        assert!(matches!(f.chart_at(&pt("2")), Err(Error::UncoveredPoint(_))));
        assert!(f.is_global().is_none());
    }

    #[test]
    fn dense_family_charts() {
        let f = dense_family(ConstRule::Index);
        let ex = f.generator().unwrap();
        let anchors = ex.anchors(30).unwrap();
        for (n, a) in anchors.iter().enumerate() {
            let c = f.chart_at(&vec![a.clone()]).unwrap();
            assert!(c.region.contains(&vec![a.clone()]).unwrap());
            assert_eq!(c.term, PolyTerm::constant(1, Rational::from_int(n as i64)));
            assert_eq!(
                f.eval(&vec![a.clone()]).unwrap(),
                Rational::from_int(n as i64)
            );
        }
        assert!(f.is_global().is_none());
    }

    #[test]
    fn dense_family_restricted_singular_anchor() {
        let f = dense_family(ConstRule::Index);
        let x5 = f.generator().unwrap().anchors(6).unwrap()[5].clone();
        let bigger = SingSet::union(vec![
            SingSet::CoRational,
            SingSet::finite(vec![vec![x5.clone()]]),
        ]);
        let g = f.restrict(&bigger).unwrap();
        assert!(matches!(g.chart_at(&vec![x5]), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn weak_compat_holds_on_dense_family() {
        let f = dense_family(ConstRule::Index);
        let anchors: Vec<Point> = f
            .generator()
            .unwrap()
            .anchors(60)
            .unwrap()
            .into_iter()
            .map(|a| vec![a])
            .collect();
        let report = f.check_compat(&anchors).unwrap();
        assert!(report.holds, "violations: {:?}", report.violations);
    }

    #[test]
    fn strong_compat_fails_on_dense_family_with_injective_constants() {
        let f = dense_family(ConstRule::Index);
        let anchors: Vec<Point> = f
            .generator()
            .unwrap()
            .anchors(60)
            .unwrap()
            .into_iter()
            .map(|a| vec![a])
            .collect();
        let report = f.check_strong_compat(&anchors).unwrap();
        assert!(!report.holds);
        let v = &report.violations[0];
        assert_ne!(v.term_x, v.term_y);
    }

    #[test]
    fn first_match_families_satisfy_weak_compat_by_construction() {
        // Overlapping boxes with different constants: the would-be
        // counterexample. First-match assignment keeps the weak hypothesis
        // vacuous, while the strong check flags the overlap.
        let f = LocalFun::finite(
            SingSet::Empty,
            1,
            vec![
                Chart {
                    region: OpenBox::segment(q("-1"), q("1")).unwrap(),
                    term: PolyTerm::constant(1, q("1")),
                },
                Chart {
                    region: OpenBox::segment(q("-2"), q("2")).unwrap(),
                    term: PolyTerm::constant(1, q("2")),
                },
            ],
        )
        .unwrap();
        let witnesses = vec![pt("0"), pt("3/2")];
        assert!(f.check_compat(&witnesses).unwrap().holds);
        assert!(!f.check_strong_compat(&witnesses).unwrap().holds);
    }

    #[test]
    fn lc_embedding_is_a_homomorphism() {
        let mut rng = crate::rng::root(41);
        let sigma = SingSet::CoRational;
        for _ in 0..20 {
            let a = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let b = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let fa = LocalFun::global(a.clone(), sigma.clone());
            let fb = LocalFun::global(b.clone(), sigma.clone());
            let sum = fa.add(&fb).unwrap();
            let prod = fa.mul(&fb).unwrap();
            // Structural: the embedding commutes with the operations.
            assert_eq!(sum, LocalFun::global(a.add(&b).unwrap(), sigma.clone()));
            assert_eq!(prod, LocalFun::global(a.mul(&b).unwrap(), sigma.clone()));
            let x = fixtures::random_point(&mut rng, 1);
            assert_eq!(
                sum.eval(&x).unwrap(),
                fa.eval(&x).unwrap() + fb.eval(&x).unwrap()
            );
            assert_eq!(
                prod.eval(&x).unwrap(),
                fa.eval(&x).unwrap() * fb.eval(&x).unwrap()
            );
        }
    }

    #[test]
    fn embedding_is_injective() {
        let mut rng = crate::rng::root(43);
        for _ in 0..50 {
            let a = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let b = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let fa = LocalFun::global(a.clone(), SingSet::CoRational);
            let fb = LocalFun::global(b.clone(), SingSet::CoRational);
            assert_eq!(fa == fb, a == b);
            assert_eq!(fa.is_global(), Some(&a));
        }
    }

    #[test]
    fn finite_ops_follow_first_match_assignments() {
        let f = LocalFun::finite(
            SingSet::Empty,
            1,
            vec![
                Chart {
                    region: OpenBox::segment(q("0"), q("2")).unwrap(),
                    term: PolyTerm::constant(1, q("1")),
                },
                Chart {
                    region: OpenBox::segment(q("1"), q("4")).unwrap(),
                    term: PolyTerm::constant(1, q("10")),
                },
            ],
        )
        .unwrap();
        let g = LocalFun::global(x_sq(), SingSet::Empty);
        let sum = f.add(&g).unwrap();
        let prod = f.mul(&g).unwrap();
        for s in ["1/2", "3/2", "3"] {
            let x = pt(s);
            assert_eq!(
                sum.eval(&x).unwrap(),
                f.eval(&x).unwrap() + g.eval(&x).unwrap()
            );
            assert_eq!(
                prod.eval(&x).unwrap(),
                f.eval(&x).unwrap() * g.eval(&x).unwrap()
            );
            assert!(sum.chart_at(&x).unwrap().region.contains(&x).unwrap());
        }
    }

    #[test]
    fn additive_inverse_at_witnesses() {
        let f = dense_family(ConstRule::Factorial);
        let sum = f.add(&f.neg()).unwrap();
        for a in f.generator().unwrap().anchors(10).unwrap() {
            assert!(sum.eval(&vec![a]).unwrap().is_zero());
        }
    }

    #[test]
    fn mat2_local_products_do_not_commute() {
        let (a, b) = Mat2::non_commuting_pair();
        let sigma = SingSet::CoRational;
        let fa = LocalFun::global(PolyTerm::constant(1, a), sigma.clone());
        let fb = LocalFun::global(PolyTerm::constant(1, b), sigma);
        let ab = fa.mul(&fb).unwrap();
        let ba = fb.mul(&fa).unwrap();
        let x = pt("1/3");
        assert_ne!(ab.eval(&x).unwrap(), ba.eval(&x).unwrap());
    }

    #[test]
    fn sigma_mismatch_is_structural() {
        let f = LocalFun::global(x_sq(), SingSet::Empty);
        let g = LocalFun::global(x_sq(), SingSet::CoRational);
        assert!(matches!(f.add(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn restriction_identity_and_composition() {
        let f = dense_family(ConstRule::Index);
        assert_eq!(f.restrict(f.sigma()).unwrap(), f);
        let s1 = SingSet::union(vec![SingSet::CoRational, SingSet::finite(vec![pt("1")])]);
        let s2 = SingSet::union(vec![
            SingSet::CoRational,
            SingSet::finite(vec![pt("1"), pt("2")]),
        ]);
        let direct = f.restrict(&s2).unwrap();
        let composed = f.restrict(&s1).unwrap().restrict(&s2).unwrap();
        assert_eq!(direct, composed);
        assert!(matches!(
            direct.restrict(&SingSet::CoRational),
            Err(Error::UncertifiedRestriction)
        ));
    }

    #[test]
    fn restriction_commutes_with_addition() {
        let mut rng = crate::rng::root(99);
        let sigma = SingSet::CoRational;
        let bigger = SingSet::union(vec![SingSet::CoRational, SingSet::finite(vec![pt("1")])]);
        for _ in 0..20 {
            let a = LocalFun::global(
                fixtures::random_term::<Rational>(&mut rng, 1, 3),
                sigma.clone(),
            );
            let b = LocalFun::global(
                fixtures::random_term::<Rational>(&mut rng, 1, 3),
                sigma.clone(),
            );
            let lhs = a.add(&b).unwrap().restrict(&bigger).unwrap();
            let rhs = a
                .restrict(&bigger)
                .unwrap()
                .add(&b.restrict(&bigger).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
            for x in ["1/2", "5/3"] {
                assert_eq!(lhs.eval(&pt(x)).unwrap(), rhs.eval(&pt(x)).unwrap());
            }
        }
    }

    #[test]
    fn ideal_membership() {
        let z = ZSet::Box(OpenBox::segment(q("1"), q("2")).unwrap());
        let witnesses = vec![pt("3/2"), pt("5/4"), pt("7/4")];
        let zero = LocalFun::<Rational>::zero(1, SingSet::CoRational);
        assert!(zero.in_ideal(&z, &witnesses).unwrap());
        let x = LocalFun::global(PolyTerm::<Rational>::var(1, 0), SingSet::CoRational);
        assert!(!x.in_ideal(&z, &witnesses).unwrap());
        // Shortcut refutes hidden nonzero components even when every
        // explicit witness vanishes.
        let shifted = LocalFun::global(
            PolyTerm::var(1, 0)
                .sub(&PolyTerm::constant(1, q("3/2")))
                .unwrap(),
            SingSet::CoRational,
        );
        assert!(!shifted.in_ideal(&z, &vec![pt("3/2")]).unwrap());
    }

    #[test]
    fn ideal_membership_preconditions() {
        let z = ZSet::Points(vec![pt("1/2")]);
        let f = LocalFun::<Rational>::zero(1, SingSet::finite(vec![pt("1/2")]));
        assert!(matches!(f.in_ideal(&z, &[]), Err(Error::Precondition(_))));
        let z2 = ZSet::Box(OpenBox::segment(q("0"), q("1")).unwrap());
        assert!(matches!(
            f.in_ideal(&z2, &[pt("2")]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn anchored_vanishing_fixture_is_in_point_ideal() {
        let anchors = vec![pt("1/4"), pt("1/2"), pt("3/4")];
        let charts = anchors
            .iter()
            .map(|a| Chart {
                region: OpenBox::segment(&a[0] - &q("1/16"), &a[0] + &q("1/16")).unwrap(),
                term: PolyTerm::var(1, 0)
                    .sub(&PolyTerm::constant(1, a[0].clone()))
                    .unwrap(),
            })
            .collect();
        let f = LocalFun::finite(SingSet::CoRational, 1, charts).unwrap();
        let z = ZSet::Points(anchors.clone());
        assert!(f.in_ideal(&z, &anchors).unwrap());
        // Ideal absorption at the witnesses, in both multiplication orders.
        let mut rng = crate::rng::root(17);
        for _ in 0..10 {
            let a = LocalFun::global(
                fixtures::random_term::<Rational>(&mut rng, 1, 3),
                SingSet::CoRational,
            );
            assert!(a.mul(&f).unwrap().in_ideal(&z, &anchors).unwrap());
            assert!(f.mul(&a).unwrap().in_ideal(&z, &anchors).unwrap());
        }
    }

    #[test]
    fn mat2_ideal_absorption_both_orders() {
        let mut rng = crate::rng::root(18);
        let anchor = pt("1/2");
        let vanishing = LocalFun::global(
            PolyTerm::var(1, 0)
                .sub(&PolyTerm::constant(1, Mat2::from_rational(q("1/2"))))
                .unwrap(),
            SingSet::CoRational,
        );
        let z = ZSet::Points(vec![anchor.clone()]);
        assert!(vanishing.in_ideal(&z, &[anchor.clone()]).unwrap());
        for _ in 0..10 {
            let a = LocalFun::global(
                fixtures::random_term::<Mat2>(&mut rng, 1, 2),
                SingSet::CoRational,
            );
            assert!(a
                .mul(&vanishing)
                .unwrap()
                .in_ideal(&z, &[anchor.clone()])
                .unwrap());
            assert!(vanishing
                .mul(&a)
                .unwrap()
                .in_ideal(&z, &[anchor.clone()])
                .unwrap());
        }
    }

    #[test]
    fn derivative_of_dense_family_is_zero_constants() {
        let f = dense_family(ConstRule::Factorial);
        let d = f.derive(&MultiIndex(vec![1])).unwrap();
        for a in f.generator().unwrap().anchors(8).unwrap() {
            assert!(d.eval(&vec![a]).unwrap().is_zero());
        }
        assert_eq!(d.grade(), SmoothGrade::Infinity);
    }

    #[test]
    fn json_round_trips() {
        let f = dense_family(ConstRule::Factorial);
        let s = serde_json::to_string(&f).unwrap();
        let back: LocalFun<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);

        let g = LocalFun::global(x_sq(), SingSet::CoRational);
        let s = serde_json::to_string(&g).unwrap();
        let back: LocalFun<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);

        let sum = f.add(&g).unwrap();
        let s = serde_json::to_string(&sum).unwrap();
        let back: LocalFun<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sum);

        // Disjoint operands produce a family with no charts; it still
        // round-trips.
        let left = LocalFun::finite(
            SingSet::Empty,
            1,
            vec![Chart {
                region: OpenBox::segment(q("0"), q("1")).unwrap(),
                term: PolyTerm::one(1),
            }],
        )
        .unwrap();
        let right = LocalFun::finite(
            SingSet::Empty,
            1,
            vec![Chart {
                region: OpenBox::segment(q("2"), q("3")).unwrap(),
                term: PolyTerm::one(1),
            }],
        )
        .unwrap();
        let empty = left.mul(&right).unwrap();
        let s = serde_json::to_string(&empty).unwrap();
        let back: LocalFun<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, empty);

        // The generator's documented shorthand: no explicit sigma.
        let shorthand = r#"{"example112":{"constants":{"kind":"index"},"epsilon":"1/1000","domain":[["-inf","+inf"]]}}"#;
        let parsed: LocalFun<Rational> = serde_json::from_str(shorthand).unwrap();
        assert_eq!(parsed, dense_family(ConstRule::Index));
    }
}

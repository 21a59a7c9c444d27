//! Direct limits over a directed family of singularity sets.
//!
//! Two local functions over members of the family are identified when they
//! restrict to the same family over some member containing both singularity
//! sets. Equality and arithmetic on classes work on representatives: join
//! the singularity sets, restrict, operate. Representative independence is
//! property-tested, not assumed.
//!
//! The smoothness filtration tags each class with the minimum grade of its
//! reachable charts; membership in the graded subalgebra just compares
//! grades.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::ValueAlgebra;
use crate::error::{Error, Result};
use crate::local_fun::{LocalFun, ZSet};
use crate::regions::Point;
use crate::sing_sets::SFamily;
use crate::terms::{MultiIndex, PolyTerm, SmoothGrade};

/// Smoothness tag of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GradeTag {
    pub grade: SmoothGrade,
}

impl GradeTag {
    /// Membership in the grade-`l` filtration layer.
    pub fn admits(&self, l: SmoothGrade) -> bool {
        self.grade >= l
    }
}

/// Do `f` and `g` become equal after restriction to a common member?
/// Structural equality decides immediately; otherwise the assigned chart
/// terms are compared at every witness that is regular for the joined
/// singularity set. With no usable witnesses the answer is conservative.
pub fn approx_equiv<E: ValueAlgebra>(
    f: &LocalFun<E>,
    g: &LocalFun<E>,
    family: &SFamily,
    witnesses: &[Point],
) -> Result<bool> {
    if !family.contains(f.sigma()) || !family.contains(g.sigma()) {
        return Err(Error::NotAMember);
    }
    let joined = family.join(f.sigma(), g.sigma())?.clone();
    let fr = f.restrict(&joined)?;
    let gr = g.restrict(&joined)?;
    if fr == gr {
        return Ok(true);
    }
    let usable: Vec<&Point> = witnesses
        .iter()
        .filter(|w| !joined.is_singular(w))
        .collect();
    if usable.is_empty() {
        return Ok(false);
    }
    for w in usable {
        if fr.chart_at(w)?.term != gr.chart_at(w)?.term {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Equivalence class of a local function in the direct limit over `family`.
#[derive(Debug, Clone)]
pub struct EquivClass<E: ValueAlgebra> {
    family: Arc<SFamily>,
    rep: LocalFun<E>,
}

impl<E: ValueAlgebra> EquivClass<E> {
    pub fn new(rep: LocalFun<E>, family: Arc<SFamily>) -> Result<Self> {
        if !family.contains(rep.sigma()) {
            return Err(Error::NotAMember);
        }
        Ok(EquivClass { family, rep })
    }

    pub fn rep(&self) -> &LocalFun<E> {
        &self.rep
    }

    pub fn family(&self) -> &Arc<SFamily> {
        &self.family
    }

    fn check_family(&self, rhs: &Self) -> Result<()> {
        if *self.family != *rhs.family {
            return Err(Error::Precondition(
                "classes live in different direct limits".into(),
            ));
        }
        Ok(())
    }

    /// Class equality at witness scale.
    pub fn equal_at(&self, rhs: &Self, witnesses: &[Point]) -> Result<bool> {
        self.check_family(rhs)?;
        approx_equiv(&self.rep, &rhs.rep, &self.family, witnesses)
    }

    fn binary(
        &self,
        rhs: &Self,
        op: fn(&LocalFun<E>, &LocalFun<E>) -> Result<LocalFun<E>>,
    ) -> Result<Self> {
        self.check_family(rhs)?;
        let joined = self.family.join(self.rep.sigma(), rhs.rep.sigma())?.clone();
        let a = self.rep.restrict(&joined)?;
        let b = rhs.rep.restrict(&joined)?;
        Ok(EquivClass {
            family: self.family.clone(),
            rep: op(&a, &b)?,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.binary(rhs, LocalFun::add)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.binary(rhs, LocalFun::mul)
    }

    pub fn neg(&self) -> Self {
        EquivClass {
            family: self.family.clone(),
            rep: self.rep.neg(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn derive(&self, p: &MultiIndex) -> Result<Self> {
        Ok(EquivClass {
            family: self.family.clone(),
            rep: self.rep.derive(p)?,
        })
    }

    /// Does the class have a structurally global representative, i.e. does
    /// it lie in the embedded copy of the globally defined functions?
    pub fn has_global_rep(&self) -> bool {
        self.rep.is_global().is_some()
    }

    /// The global polynomial when the class is certified global.
    pub fn global_term(&self) -> Option<&PolyTerm<E>> {
        self.rep.is_global()
    }

    /// Membership in the direct-limit vanishing ideal of `z`. Requires `z`
    /// to keep a regular point against every member of the family.
    pub fn in_vanishing_ideal(&self, z: &ZSet, witnesses: &[Point]) -> Result<bool> {
        for member in self.family.members() {
            if !z.has_regular_point(member) {
                return Err(Error::Precondition(format!(
                    "vanishing locus misses the regular set of member {member}"
                )));
            }
        }
        self.rep.in_ideal(z, witnesses)
    }

    /// Minimum smoothness grade over the representative's charts.
    pub fn grade(&self) -> GradeTag {
        GradeTag {
            grade: self.rep.grade(),
        }
    }

    /// Membership in the grade-`l` layer of the embedded global range.
    pub fn in_graded_global_range(&self, l: SmoothGrade) -> bool {
        self.has_global_rep() && self.grade().admits(l)
    }

    /// Membership in the grade-`l` layer of the vanishing ideal.
    pub fn in_graded_ideal(&self, l: SmoothGrade, z: &ZSet, witnesses: &[Point]) -> Result<bool> {
        Ok(self.grade().admits(l) && self.in_vanishing_ideal(z, witnesses)?)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
struct ClassRepr<E: ValueAlgebra> {
    family: SFamily,
    rep: LocalFun<E>,
}

impl<E: ValueAlgebra> serde::Serialize for EquivClass<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ClassRepr {
            family: (*self.family).clone(),
            rep: self.rep.clone(),
        }
        .serialize(s)
    }
}

impl<'de, E: ValueAlgebra> serde::Deserialize<'de> for EquivClass<E> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ClassRepr::<E>::deserialize(d)?;
        EquivClass::new(repr.rep, Arc::new(repr.family)).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Mat2, Rational};
    use crate::fixtures::{self, ValueSample};
    use crate::local_fun::{Chart, ConstRule};
    use crate::regions::OpenBox;
    use crate::sing_sets::SingSet;
    use num_traits::Zero;
    use rand::Rng;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pt(s: &str) -> Point {
        vec![q(s)]
    }

    fn two_member_family() -> Arc<SFamily> {
        Arc::new(
            SFamily::new(vec![
                SingSet::CoRational,
                SingSet::union(vec![SingSet::CoRational, SingSet::finite(vec![pt("1")])]),
            ])
            .unwrap(),
        )
    }

    fn witnesses() -> Vec<Point> {
        ["1/2", "1/3", "-2/5", "7/4", "0"].iter().map(|s| pt(s)).collect()
    }

    #[test]
    fn reflexive_for_any_representative() {
        let fam = two_member_family();
        let f = LocalFun::example_1_1_2(ConstRule::<Rational>::Index, q("1/100"), OpenBox::full(1))
            .unwrap();
        assert!(approx_equiv(&f, &f, &fam, &witnesses()).unwrap());
    }

    #[test]
    fn same_term_different_members_are_identified() {
        let fam = two_member_family();
        let t = PolyTerm::<Rational>::var(1, 0);
        let f = LocalFun::global(t.clone(), fam.members()[0].clone());
        let g = LocalFun::global(t, fam.members()[1].clone());
        assert!(approx_equiv(&f, &g, &fam, &witnesses()).unwrap());
    }

    #[test]
    fn distinct_globals_are_separated() {
        let fam = two_member_family();
        let x = PolyTerm::<Rational>::var(1, 0);
        let f = LocalFun::global(x.clone(), SingSet::CoRational);
        let g = LocalFun::global(x.add(&PolyTerm::one(1)).unwrap(), SingSet::CoRational);
        assert!(!approx_equiv(&f, &g, &fam, &witnesses()).unwrap());
    }

    #[test]
    fn membership_is_checked() {
        let fam = two_member_family();
        let f = LocalFun::global(PolyTerm::<Rational>::var(1, 0), SingSet::Empty);
        assert!(matches!(
            approx_equiv(&f, &f, &fam, &witnesses()),
            Err(Error::NotAMember)
        ));
        assert!(EquivClass::new(f, fam).is_err());
    }

    #[test]
    fn singleton_family_degenerates_to_plain_arithmetic() {
        let fam = Arc::new(SFamily::singleton(SingSet::CoRational));
        let mut rng = crate::rng::root(52);
        for _ in 0..20 {
            let a = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let b = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let fa = LocalFun::global(a.clone(), SingSet::CoRational);
            let fb = LocalFun::global(b.clone(), SingSet::CoRational);
            let ca = EquivClass::new(fa.clone(), fam.clone()).unwrap();
            let cb = EquivClass::new(fb.clone(), fam.clone()).unwrap();
            // Class arithmetic equals plain arithmetic structurally.
            assert_eq!(ca.add(&cb).unwrap().rep(), &fa.add(&fb).unwrap());
            assert_eq!(ca.mul(&cb).unwrap().rep(), &fa.mul(&fb).unwrap());
        }
    }

    #[test]
    fn embedding_respects_products() {
        let fam = two_member_family();
        let mut rng = crate::rng::root(53);
        let w = witnesses();
        for _ in 0..20 {
            let a = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let b = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let ca = EquivClass::new(
                LocalFun::global(a.clone(), SingSet::CoRational),
                fam.clone(),
            )
            .unwrap();
            let cb = EquivClass::new(
                LocalFun::global(b.clone(), SingSet::CoRational),
                fam.clone(),
            )
            .unwrap();
            let prod = ca.mul(&cb).unwrap();
            let embedded = EquivClass::new(
                LocalFun::global(a.mul(&b).unwrap(), SingSet::CoRational),
                fam.clone(),
            )
            .unwrap();
            assert!(prod.equal_at(&embedded, &w).unwrap());
        }
    }

    #[test]
    fn additive_inverse_gives_zero_class() {
        let fam = two_member_family();
        let a = EquivClass::new(
            LocalFun::global(PolyTerm::<Rational>::var(1, 0), SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        let zero = EquivClass::new(
            LocalFun::zero(1, SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        let sum = a.add(&a.neg()).unwrap();
        assert!(sum.equal_at(&zero, &witnesses()).unwrap());
    }

    #[test]
    fn commutativity_matches_the_value_algebra() {
        let fam = two_member_family();
        let mut rng = crate::rng::root(54);
        let w = witnesses();
        // Scalar instance commutes on random pairs.
        for _ in 0..50 {
            let a = EquivClass::new(
                LocalFun::global(
                    fixtures::random_term::<Rational>(&mut rng, 1, 3),
                    SingSet::CoRational,
                ),
                fam.clone(),
            )
            .unwrap();
            let b = EquivClass::new(
                LocalFun::global(
                    fixtures::random_term::<Rational>(&mut rng, 1, 3),
                    SingSet::CoRational,
                ),
                fam.clone(),
            )
            .unwrap();
            assert!(a
                .mul(&b)
                .unwrap()
                .equal_at(&b.mul(&a).unwrap(), &w)
                .unwrap());
        }
        // Matrix instance has an explicit non-commuting witness.
        let (ma, mb) = Mat2::non_commuting_pair();
        let ca = EquivClass::new(
            LocalFun::global(PolyTerm::constant(1, ma), SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        let cb = EquivClass::new(
            LocalFun::global(PolyTerm::constant(1, mb), SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        assert!(!ca
            .mul(&cb)
            .unwrap()
            .equal_at(&cb.mul(&ca).unwrap(), &w)
            .unwrap());
    }

    #[test]
    fn global_range_membership() {
        let fam = two_member_family();
        let lc = EquivClass::new(
            LocalFun::global(PolyTerm::<Rational>::var(1, 0), SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        assert!(lc.has_global_rep());
        let zero = EquivClass::new(
            LocalFun::<Rational>::zero(1, SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        assert!(zero.has_global_rep());
        let dense = EquivClass::new(
            LocalFun::example_1_1_2(ConstRule::<Rational>::Index, q("1/100"), OpenBox::full(1))
                .unwrap(),
            fam.clone(),
        )
        .unwrap();
        assert!(!dense.has_global_rep());
    }

    #[test]
    fn vanishing_ideal_membership() {
        let fam = two_member_family();
        let z = ZSet::Box(OpenBox::segment(q("1"), q("2")).unwrap());
        let w = vec![pt("3/2"), pt("5/4")];
        let zero = EquivClass::new(
            LocalFun::<Rational>::zero(1, SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        assert!(zero.in_vanishing_ideal(&z, &w).unwrap());
        let x = EquivClass::new(
            LocalFun::global(PolyTerm::<Rational>::var(1, 0), SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        assert!(!x.in_vanishing_ideal(&z, &w).unwrap());

        // X1^2 + 1 is strictly positive at rational witnesses of (0,1).
        let xsq1 = PolyTerm::<Rational>::var(1, 0)
            .mul(&PolyTerm::var(1, 0))
            .unwrap()
            .add(&PolyTerm::one(1))
            .unwrap();
        let cls = EquivClass::new(LocalFun::global(xsq1, SingSet::CoRational), fam.clone())
            .unwrap();
        let unit_z = ZSet::Box(OpenBox::segment(q("0"), q("1")).unwrap());
        let uw = vec![pt("1/2"), pt("1/3"), pt("2/3")];
        assert!(!cls.in_vanishing_ideal(&unit_z, &uw).unwrap());

        // The anchored-vanishing fixture is accepted over its anchor set.
        let anchors = vec![pt("1/4"), pt("1/2")];
        let charts = anchors
            .iter()
            .map(|a| Chart {
                region: OpenBox::segment(&a[0] - &q("1/32"), &a[0] + &q("1/32")).unwrap(),
                term: PolyTerm::<Rational>::var(1, 0)
                    .sub(&PolyTerm::constant(1, a[0].clone()))
                    .unwrap(),
            })
            .collect();
        let fixture = EquivClass::new(
            LocalFun::finite(SingSet::CoRational, 1, charts).unwrap(),
            fam.clone(),
        )
        .unwrap();
        assert!(fixture
            .in_vanishing_ideal(&ZSet::Points(anchors.clone()), &anchors)
            .unwrap());
        assert!(!fixture.has_global_rep());
    }

    #[test]
    fn embedding_diagram_commutes_at_witnesses() {
        // Embedding a global function and then passing to its class agrees,
        // at every witness, with the function itself; and the two routes
        // through different family members meet in the same class.
        let fam = two_member_family();
        let mut rng = crate::rng::root(58);
        let w = witnesses();
        for _ in 0..100 {
            let t = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let via_small = EquivClass::new(
                LocalFun::global(t.clone(), fam.members()[0].clone()),
                fam.clone(),
            )
            .unwrap();
            let via_large = EquivClass::new(
                LocalFun::global(t.clone(), fam.members()[1].clone()),
                fam.clone(),
            )
            .unwrap();
            assert!(via_small.equal_at(&via_large, &w).unwrap());
            for x in &w {
                if !fam.members()[1].is_singular(x) {
                    assert_eq!(via_large.rep().eval(x).unwrap(), t.eval(x).unwrap());
                }
            }
        }
    }

    #[test]
    fn grades_and_filtration() {
        let fam = two_member_family();
        let x = PolyTerm::<Rational>::var(1, 0);
        let plain = EquivClass::new(
            LocalFun::global(x.clone(), SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        assert_eq!(plain.grade().grade, SmoothGrade::Infinity);
        assert!(plain.grade().admits(SmoothGrade::Finite(7)));
        assert!(plain.grade().admits(SmoothGrade::Infinity));

        let capped = EquivClass::new(
            LocalFun::finite(
                SingSet::CoRational,
                1,
                vec![
                    Chart {
                        region: OpenBox::segment(q("0"), q("1")).unwrap(),
                        term: x.with_grade(SmoothGrade::Finite(2)),
                    },
                    Chart {
                        region: OpenBox::full(1),
                        term: x.clone(),
                    },
                ],
            )
            .unwrap(),
            fam.clone(),
        )
        .unwrap();
        assert_eq!(capped.grade().grade, SmoothGrade::Finite(2));
        assert!(capped.grade().admits(SmoothGrade::Finite(2)));
        assert!(!capped.grade().admits(SmoothGrade::Finite(3)));

        // Products cannot drop below the minimum of the operand grades.
        let prod = capped.mul(&plain).unwrap();
        assert!(prod.grade().grade >= capped.grade().grade.min(plain.grade().grade));

        // Differentiation lowers the tag monotonically.
        let d = capped.derive(&MultiIndex(vec![1])).unwrap();
        assert!(d.grade().grade >= SmoothGrade::Finite(1));

        // Graded memberships are the conjunction of the grade test with the
        // respective membership.
        assert!(plain.in_graded_global_range(SmoothGrade::Infinity));
        assert!(!capped.in_graded_global_range(SmoothGrade::Finite(3)));
        let z = ZSet::Box(OpenBox::segment(q("0"), q("1")).unwrap());
        let w = vec![pt("1/2")];
        let zero = EquivClass::new(
            LocalFun::<Rational>::zero(1, SingSet::CoRational),
            fam.clone(),
        )
        .unwrap();
        assert!(zero.in_graded_ideal(SmoothGrade::Infinity, &z, &w).unwrap());
        assert!(!plain.in_graded_ideal(SmoothGrade::Finite(0), &z, &w).unwrap());
    }

    #[test]
    fn representative_independence_of_arithmetic() {
        let fam = two_member_family();
        let bigger = fam.members()[1].clone();
        let mut rng = crate::rng::root(55);
        let w = witnesses();
        let usable: Vec<Point> = w
            .iter()
            .filter(|p| !bigger.is_singular(p))
            .cloned()
            .collect();
        for _ in 0..30 {
            let a = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let b = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let ca = EquivClass::new(
                LocalFun::global(a.clone(), SingSet::CoRational),
                fam.clone(),
            )
            .unwrap();
            let cb = EquivClass::new(
                LocalFun::global(b.clone(), SingSet::CoRational),
                fam.clone(),
            )
            .unwrap();
            // Perturb representatives within their classes: restrict to a
            // larger member, or append a shadowed duplicate chart.
            let ca2 = EquivClass::new(ca.rep().restrict(&bigger).unwrap(), fam.clone()).unwrap();
            let cb2 = EquivClass::new(
                fixtures::shadowed_variant(cb.rep()),
                fam.clone(),
            )
            .unwrap();
            assert!(ca.equal_at(&ca2, &usable).unwrap());
            assert!(cb.equal_at(&cb2, &usable).unwrap());
            let op: fn(&EquivClass<Rational>, &EquivClass<Rational>) -> _ =
                if rng.gen_bool(0.5) { EquivClass::add } else { EquivClass::mul };
            let direct = op(&ca, &cb).unwrap();
            let perturbed = op(&ca2, &cb2).unwrap();
            assert!(direct.equal_at(&perturbed, &usable).unwrap());
        }
    }

    #[test]
    fn class_json_round_trips() {
        let fam = two_member_family();
        let c = EquivClass::new(
            LocalFun::global(PolyTerm::<Rational>::var(1, 0), SingSet::CoRational),
            fam,
        )
        .unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: EquivClass<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back.rep(), c.rep());
        assert_eq!(**back.family(), **c.family());
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let fam1 = two_member_family();
        let fam2 = Arc::new(SFamily::singleton(SingSet::CoRational));
        let a = EquivClass::new(LocalFun::<Rational>::zero(1, SingSet::CoRational), fam1).unwrap();
        let b = EquivClass::new(LocalFun::<Rational>::zero(1, SingSet::CoRational), fam2).unwrap();
        assert!(matches!(a.add(&b), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_diff_means_equal() {
        let fam = two_member_family();
        let mut rng = crate::rng::root(56);
        let w = witnesses();
        for _ in 0..10 {
            let t = fixtures::random_term::<Rational>(&mut rng, 1, 3);
            let c = EquivClass::new(LocalFun::global(t, SingSet::CoRational), fam.clone()).unwrap();
            let diff = c.sub(&c).unwrap();
            for x in &w {
                assert!(diff.rep().eval(x).unwrap().is_zero());
            }
        }
        let _ = Mat2::sample(&mut rng);
    }
}

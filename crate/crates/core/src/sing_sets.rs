//! Singularity-set descriptors and directed families of them.
//!
//! A descriptor decides membership at every rational-coordinate point. The
//! `CoRational` descriptor (all points with at least one irrational
//! coordinate) contains no rational point at all, so every rational point is
//! regular for it; its complement is dense even though the set itself has
//! strictly larger cardinality. No descriptor covers the whole space: the
//! singular rational points of any descriptor form a finite set.
//!
//! Containment checking is deliberately conservative: `subset_leq` returns
//! true only on structurally certified containments.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regions::{fmt_point, sample_box, OpenBox, Point};

/// Decidable singularity-set descriptor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SingSet {
    Empty,
    /// Finitely many rational singular points.
    FiniteRational(Vec<Point>),
    /// All points with at least one irrational coordinate.
    CoRational,
    Union(Vec<SingSet>),
}

impl SingSet {
    pub fn empty() -> Self {
        SingSet::Empty
    }

    pub fn corational() -> Self {
        SingSet::CoRational
    }

    /// Canonicalizing constructor for a finite rational set.
    pub fn finite(mut points: Vec<Point>) -> Self {
        points.sort();
        points.dedup();
        if points.is_empty() {
            SingSet::Empty
        } else {
            SingSet::FiniteRational(points)
        }
    }

    /// Canonicalizing union: flattens, merges finite parts, drops Empty,
    /// keeps at most one CoRational, unwraps singletons.
    pub fn union(parts: Vec<SingSet>) -> Self {
        let mut points: Vec<Point> = Vec::new();
        let mut corational = false;
        for p in parts {
            match p.canonical() {
                SingSet::Empty => {}
                SingSet::FiniteRational(ps) => points.extend(ps),
                SingSet::CoRational => corational = true,
                SingSet::Union(ms) => {
                    for m in ms {
                        match m {
                            SingSet::FiniteRational(ps) => points.extend(ps),
                            SingSet::CoRational => corational = true,
                            SingSet::Empty => {}
                            SingSet::Union(_) => unreachable!("canonical unions are flat"),
                        }
                    }
                }
            }
        }
        let fin = SingSet::finite(points);
        match (fin, corational) {
            (f, false) => f,
            (SingSet::Empty, true) => SingSet::CoRational,
            (f, true) => SingSet::Union(vec![f, SingSet::CoRational]),
        }
    }

    /// Canonical form; the smart constructors already produce it.
    pub fn canonical(&self) -> SingSet {
        match self {
            SingSet::Empty => SingSet::Empty,
            SingSet::CoRational => SingSet::CoRational,
            SingSet::FiniteRational(ps) => SingSet::finite(ps.clone()),
            SingSet::Union(ms) => SingSet::union(ms.clone()),
        }
    }

    /// Is the rational point `x` singular?
    pub fn is_singular(&self, x: &Point) -> bool {
        match self {
            SingSet::Empty => false,
            SingSet::FiniteRational(ps) => ps.iter().any(|p| p == x),
            // Rational points never lie in the irrational-coordinate set.
            SingSet::CoRational => false,
            SingSet::Union(ms) => ms.iter().any(|m| m.is_singular(x)),
        }
    }

    fn contains_corational(&self) -> bool {
        match self {
            SingSet::CoRational => true,
            SingSet::Union(ms) => ms.iter().any(SingSet::contains_corational),
            _ => false,
        }
    }
}

impl fmt::Display for SingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingSet::Empty => write!(f, "{{}}"),
            SingSet::FiniteRational(ps) => {
                let items: Vec<String> = ps.iter().map(fmt_point).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            SingSet::CoRational => write!(f, "co-rational"),
            SingSet::Union(ms) => {
                let items: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
                write!(f, "{}", items.join(" u "))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EmptyObj {}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SingSetRepr {
    Empty(EmptyObj),
    Finite(Vec<Point>),
    Corational(EmptyObj),
    Union(Vec<SingSetRepr>),
}

impl From<&SingSet> for SingSetRepr {
    fn from(s: &SingSet) -> Self {
        match s {
            SingSet::Empty => SingSetRepr::Empty(EmptyObj {}),
            SingSet::FiniteRational(ps) => SingSetRepr::Finite(ps.clone()),
            SingSet::CoRational => SingSetRepr::Corational(EmptyObj {}),
            SingSet::Union(ms) => SingSetRepr::Union(ms.iter().map(Into::into).collect()),
        }
    }
}

impl From<SingSetRepr> for SingSet {
    fn from(r: SingSetRepr) -> Self {
        match r {
            SingSetRepr::Empty(_) => SingSet::Empty,
            SingSetRepr::Finite(ps) => SingSet::finite(ps),
            SingSetRepr::Corational(_) => SingSet::CoRational,
            SingSetRepr::Union(ms) => {
                SingSet::union(ms.into_iter().map(SingSet::from).collect())
            }
        }
    }
}

impl Serialize for SingSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SingSetRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SingSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(SingSetRepr::deserialize(d)?.into())
    }
}

/// Certified structural containment. `true` implies containment; `false`
/// may mean unknown.
pub fn subset_leq(s: &SingSet, t: &SingSet) -> bool {
    if s == t {
        return true;
    }
    match s {
        SingSet::Empty => true,
        // Finite rational sets embed exactly: every point must be singular
        // in the target.
        SingSet::FiniteRational(ps) => ps.iter().all(|p| t.is_singular(p)),
        SingSet::CoRational => t.contains_corational(),
        SingSet::Union(ms) => ms.iter().all(|m| subset_leq(m, t)),
    }
}

/// `k` regular rational points of `b`, deterministic in `seed`. Singular
/// draws are skipped and resampled.
pub fn regular_sample(s: &SingSet, b: &OpenBox, k: usize, seed: u64) -> Result<Vec<Point>> {
    let mut request = k;
    loop {
        let regular: Vec<Point> = sample_box(b, request, seed)
            .into_iter()
            .filter(|p| !s.is_singular(p))
            .take(k)
            .collect();
        if regular.len() == k {
            return Ok(regular);
        }
        if request > 4096 + 16 * k {
            return Err(Error::NoRegularPoint(format!(
                "descriptor {s} over {b} yielded {} of {k} requested points",
                regular.len()
            )));
        }
        request *= 2;
    }
}

/// Directed family of singularity sets, closed under pairwise union at
/// construction: any two members have a member containing both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SFamily {
    members: Vec<SingSet>,
}

impl SFamily {
    /// Builds the family generated by `seeds`, adding canonical pairwise
    /// unions until the directedness condition holds.
    pub fn new(seeds: Vec<SingSet>) -> Result<SFamily> {
        if seeds.is_empty() {
            return Err(Error::Precondition("family must be nonempty".into()));
        }
        let mut members: Vec<SingSet> = Vec::new();
        for s in seeds {
            let c = s.canonical();
            if !members.contains(&c) {
                members.push(c);
            }
        }
        let mut i = 0;
        while i < members.len() {
            for j in 0..=i {
                let (a, b) = (members[i].clone(), members[j].clone());
                let covered = members
                    .iter()
                    .any(|m| subset_leq(&a, m) && subset_leq(&b, m));
                if !covered {
                    let u = SingSet::union(vec![a, b]);
                    if !members.contains(&u) {
                        members.push(u);
                    }
                }
            }
            i += 1;
        }
        Ok(SFamily { members })
    }

    /// The one-member family.
    pub fn singleton(sigma: SingSet) -> SFamily {
        SFamily {
            members: vec![sigma.canonical()],
        }
    }

    pub fn members(&self) -> &[SingSet] {
        &self.members
    }

    pub fn contains(&self, s: &SingSet) -> bool {
        self.members.contains(s)
    }

    /// A member containing both `s` and `t`; exists for any two members by
    /// the construction-time closure.
    pub fn join(&self, s: &SingSet, t: &SingSet) -> Result<&SingSet> {
        if !self.contains(s) || !self.contains(t) {
            return Err(Error::NotAMember);
        }
        self.members
            .iter()
            .find(|m| subset_leq(s, m) && subset_leq(t, m))
            .ok_or(Error::NotAMember)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pt(s: &str) -> Point {
        vec![q(s)]
    }

    #[test]
    fn rational_points_are_regular_for_corational() {
        assert!(!SingSet::CoRational.is_singular(&pt("1/3")));
        assert!(!SingSet::CoRational.is_singular(&pt("0")));
    }

    #[test]
    fn finite_membership() {
        let s = SingSet::finite(vec![pt("0")]);
        assert!(s.is_singular(&pt("0")));
        assert!(!s.is_singular(&pt("1")));
        assert!(!SingSet::Empty.is_singular(&pt("0")));
    }

    #[test]
    fn union_membership() {
        let u = SingSet::union(vec![SingSet::finite(vec![pt("1/2")]), SingSet::CoRational]);
        assert!(u.is_singular(&pt("1/2")));
        assert!(!u.is_singular(&pt("1/3")));
    }

    #[test]
    fn canonical_forms() {
        // Unions flatten, merge finite parts, drop Empty, unwrap singletons.
        let u = SingSet::union(vec![
            SingSet::Empty,
            SingSet::finite(vec![pt("1"), pt("0")]),
            SingSet::union(vec![SingSet::finite(vec![pt("0")]), SingSet::CoRational]),
        ]);
        assert_eq!(
            u,
            SingSet::Union(vec![
                SingSet::FiniteRational(vec![pt("0"), pt("1")]),
                SingSet::CoRational
            ])
        );
        assert_eq!(SingSet::union(vec![SingSet::Empty]), SingSet::Empty);
        assert_eq!(SingSet::union(vec![SingSet::CoRational]), SingSet::CoRational);
        assert_eq!(SingSet::finite(vec![]), SingSet::Empty);
    }

    #[test]
    fn subset_rules() {
        let fin0 = SingSet::finite(vec![pt("0")]);
        let fin01 = SingSet::finite(vec![pt("0"), pt("1")]);
        let u = SingSet::union(vec![fin01.clone(), SingSet::CoRational]);
        assert!(subset_leq(&SingSet::Empty, &SingSet::CoRational));
        assert!(subset_leq(&fin0, &u));
        assert!(subset_leq(&fin0, &fin01));
        assert!(!subset_leq(&SingSet::CoRational, &fin0));
        assert!(!subset_leq(&fin01, &fin0));
        assert!(subset_leq(&SingSet::CoRational, &u));
    }

    #[test]
    fn subset_reflexive_and_transitive() {
        let descriptors = [
            SingSet::Empty,
            SingSet::finite(vec![pt("0")]),
            SingSet::finite(vec![pt("0"), pt("1")]),
            SingSet::CoRational,
            SingSet::union(vec![SingSet::finite(vec![pt("0")]), SingSet::CoRational]),
            SingSet::union(vec![
                SingSet::finite(vec![pt("0"), pt("1"), pt("-1/2")]),
                SingSet::CoRational,
            ]),
        ];
        for a in &descriptors {
            assert!(subset_leq(a, a));
            for b in &descriptors {
                for c in &descriptors {
                    if subset_leq(a, b) && subset_leq(b, c) {
                        assert!(subset_leq(a, c), "{a} <= {b} <= {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn regular_sampling() {
        let b = OpenBox::segment(q("0"), q("1")).unwrap();
        let pts = regular_sample(&SingSet::CoRational, &b, 10, 5).unwrap();
        assert_eq!(pts.len(), 10);
        for p in &pts {
            assert!(b.contains(p).unwrap());
        }
        let avoid = SingSet::finite(vec![pt("1/2")]);
        let pts = regular_sample(&avoid, &b, 5, 5).unwrap();
        for p in &pts {
            assert_ne!(p, &pt("1/2"));
        }
        assert_eq!(
            regular_sample(&SingSet::CoRational, &b, 10, 5).unwrap(),
            regular_sample(&SingSet::CoRational, &b, 10, 5).unwrap()
        );
    }

    #[test]
    fn singleton_family_join() {
        let sigma = SingSet::CoRational;
        let fam = SFamily::singleton(sigma.clone());
        assert_eq!(fam.join(&sigma, &sigma).unwrap(), &sigma);
    }

    #[test]
    fn closure_produces_joins() {
        let fin0 = SingSet::finite(vec![pt("0")]);
        let fam = SFamily::new(vec![
            SingSet::Empty,
            fin0.clone(),
            SingSet::CoRational,
        ])
        .unwrap();
        let j = fam.join(&fin0, &SingSet::CoRational).unwrap();
        assert_eq!(
            j,
            &SingSet::union(vec![fin0.clone(), SingSet::CoRational])
        );
        // Joins never fail on any member pair, and certify both containments.
        for a in fam.members() {
            for b in fam.members() {
                let m = fam.join(a, b).unwrap();
                assert!(subset_leq(a, m));
                assert!(subset_leq(b, m));
            }
        }
    }

    #[test]
    fn join_requires_membership() {
        let fam = SFamily::singleton(SingSet::Empty);
        assert_eq!(
            fam.join(&SingSet::CoRational, &SingSet::Empty),
            Err(Error::NotAMember)
        );
    }

    #[test]
    fn descriptor_json() {
        let u = SingSet::union(vec![SingSet::finite(vec![pt("1/2")]), SingSet::CoRational]);
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, r#"{"union":[{"finite":[["1/2"]]},{"corational":{}}]}"#);
        let back: SingSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
        assert_eq!(
            serde_json::to_string(&SingSet::Empty).unwrap(),
            r#"{"empty":{}}"#
        );
    }
}

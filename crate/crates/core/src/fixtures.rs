//! Deterministic random fixtures for property campaigns and tests.
//!
//! All generators draw from a caller-supplied RNG so campaigns can split
//! streams per case; values are kept small so exact arithmetic stays cheap.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{Mat2, Rational, ValueAlgebra};
use crate::limits::EquivClass;
use crate::local_fun::{Chart, Charts, LocalFun};
use crate::nets::{GenFun, Net, VanishCert};
use crate::regions::{OpenBox, Point};
use crate::sing_sets::{SFamily, SingSet};
use crate::terms::{MultiIndex, PolyTerm};

/// Random small elements of a value algebra.
pub trait ValueSample: ValueAlgebra {
    fn sample<R: Rng>(rng: &mut R) -> Self;
}

impl ValueSample for Rational {
    fn sample<R: Rng>(rng: &mut R) -> Self {
        Rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9))
    }
}

impl ValueSample for Mat2 {
    fn sample<R: Rng>(rng: &mut R) -> Self {
        Mat2::new(
            Rational::sample(rng),
            Rational::sample(rng),
            Rational::sample(rng),
            Rational::sample(rng),
        )
    }
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize) -> Point {
    (0..dim).map(|_| Rational::sample(rng)).collect()
}

/// Sparse random polynomial with up to three monomials of per-variable
/// degree at most `max_deg`. May be zero.
pub fn random_term<E: ValueSample>(rng: &mut impl Rng, dim: usize, max_deg: u32) -> PolyTerm<E> {
    let count = rng.gen_range(0..=3);
    let entries = (0..count)
        .map(|_| {
            let p = MultiIndex((0..dim).map(|_| rng.gen_range(0..=max_deg)).collect());
            (p, E::sample(rng))
        })
        .collect();
    PolyTerm::from_monomials(dim, crate::terms::SmoothGrade::Infinity, entries)
}

pub fn random_nonzero_term<E: ValueSample>(
    rng: &mut impl Rng,
    dim: usize,
    max_deg: u32,
) -> PolyTerm<E> {
    loop {
        let t = random_term::<E>(rng, dim, max_deg);
        if !t.is_zero() {
            return t;
        }
    }
}

/// A structurally different representative of the same class: a duplicate
/// of the first chart appended at the end, where first-match never reaches
/// it.
pub fn shadowed_variant<E: ValueAlgebra>(f: &LocalFun<E>) -> LocalFun<E> {
    match f.charts() {
        Charts::Finite(cs) if !cs.is_empty() => {
            let mut charts = cs.clone();
            charts.push(cs[0].clone());
            LocalFun::finite(f.sigma().clone(), f.dim(), charts).expect("same dims")
        }
        _ => f.clone(),
    }
}

/// Random one-dimensional local function over `sigma`: either a global
/// polynomial or a piecewise family (sub-box charts with a full-space
/// fallback, so every regular point stays covered).
pub fn random_local_fun<E: ValueSample>(
    rng: &mut impl Rng,
    sigma: &SingSet,
    max_deg: u32,
) -> LocalFun<E> {
    let fallback = random_term::<E>(rng, 1, max_deg);
    if rng.gen_bool(0.6) {
        return LocalFun::global(fallback, sigma.clone());
    }
    let mut charts = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let lo = Rational::ratio(rng.gen_range(-8..=7), 2);
        let hi = &lo + &Rational::ratio(rng.gen_range(1..=4), 1);
        charts.push(Chart {
            region: OpenBox::segment(lo, hi).expect("lo < hi"),
            term: random_term::<E>(rng, 1, max_deg),
        });
    }
    charts.push(Chart {
        region: OpenBox::full(1),
        term: fallback,
    });
    LocalFun::finite(sigma.clone(), 1, charts).expect("consistent dims")
}

/// The directed family used by the campaigns: the co-rational set, two
/// finite enlargements, and their join.
pub fn campaign_family() -> Arc<SFamily> {
    let one = vec![Rational::from_int(1)];
    let two = vec![Rational::from_int(2)];
    Arc::new(
        SFamily::new(vec![
            SingSet::CoRational,
            SingSet::union(vec![SingSet::CoRational, SingSet::finite(vec![one])]),
            SingSet::union(vec![SingSet::CoRational, SingSet::finite(vec![two])]),
        ])
        .expect("nonempty seeds"),
    )
}

/// Random class over a random member of `family`.
pub fn random_class<E: ValueSample>(
    rng: &mut impl Rng,
    family: &Arc<SFamily>,
    max_deg: u32,
) -> EquivClass<E> {
    let members = family.members();
    let sigma = members[rng.gen_range(0..members.len())].clone();
    let mut rep = random_local_fun::<E>(rng, &sigma, max_deg);
    if rng.gen_bool(0.25) {
        rep = shadowed_variant(&rep);
    }
    EquivClass::new(rep, family.clone()).expect("member sigma")
}

/// Random net-algebra element over `family`, with a structural or
/// generated body.
pub fn random_genfun<E: ValueSample>(
    rng: &mut impl Rng,
    family: &Arc<SFamily>,
    max_deg: u32,
) -> GenFun<E> {
    let members = family.members();
    let sigma = members[rng.gen_range(0..members.len())].clone();
    let net = match rng.gen_range(0..3) {
        0 => Net::constant(random_local_fun::<E>(rng, &sigma, max_deg)).expect("grade"),
        1 => {
            let tail = LocalFun::global(random_term::<E>(rng, 1, max_deg), sigma.clone());
            let prefix = (0..rng.gen_range(1..=3))
                .map(|_| {
                    (
                        rng.gen_range(0..6) as u64,
                        LocalFun::global(random_term::<E>(rng, 1, max_deg), sigma.clone()),
                    )
                })
                .collect::<std::collections::BTreeMap<u64, _>>()
                .into_iter()
                .collect();
            Net::eventually(prefix, tail).expect("consistent prefix")
        }
        _ => Net::scaled_term(random_term::<E>(rng, 1, max_deg), sigma).expect("grade"),
    };
    GenFun::new(net, family.clone(), None).expect("member sigma")
}

/// A different representative of the same class: restricted to a larger
/// member of the family, possibly with a shadowed duplicate chart.
pub fn equivalent_variant<E: ValueSample>(
    rng: &mut impl Rng,
    f: &LocalFun<E>,
    family: &Arc<SFamily>,
) -> crate::error::Result<LocalFun<E>> {
    let members = family.members();
    let m = &members[rng.gen_range(0..members.len())];
    let target = family.join(f.sigma(), m)?.clone();
    let g = f.restrict(&target)?;
    Ok(if rng.gen_bool(0.5) {
        shadowed_variant(&g)
    } else {
        g
    })
}

/// Random certified member of the vanishing net ideal, together with its
/// certificate: junk before a cutoff index, the zero family afterwards.
pub fn random_vanishing_member<E: ValueSample>(
    rng: &mut impl Rng,
    family: &Arc<SFamily>,
    probe_depth: u32,
) -> GenFun<E> {
    let members = family.members();
    let sigma = members[rng.gen_range(0..members.len())].clone();
    let tail = LocalFun::zero(1, sigma.clone());
    let cutoff;
    let net = if rng.gen_bool(0.3) {
        cutoff = 0;
        Net::constant(tail).expect("grade")
    } else {
        let prefix: Vec<(u64, LocalFun<E>)> = (0..rng.gen_range(1..=3) as u64)
            .map(|i| {
                (
                    i,
                    LocalFun::global(random_term::<E>(rng, 1, 3), sigma.clone()),
                )
            })
            .collect();
        cutoff = prefix.iter().map(|(i, _)| i + 1).max().unwrap_or(0);
        Net::eventually(prefix, tail).expect("consistent prefix")
    };
    GenFun::new(net, family.clone(), None)
        .expect("member sigma")
        .with_cert(VanishCert::uniform(cutoff, probe_depth))
}

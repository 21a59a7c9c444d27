//! Property campaigns: the randomized verification suites behind the CLI
//! `check` command and the acceptance tests.
//!
//! Every campaign is deterministic in its seed. Case `i` of suite `s` draws
//! from stream `(s << 32) | i`, so a failing case can be replayed in
//! isolation.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Mat2, Rational, ValueE};
use crate::error::Result;
use crate::fixtures::{
    campaign_family, equivalent_variant, random_class, random_genfun, random_local_fun,
    random_nonzero_term, random_vanishing_member, ValueSample,
};
use crate::limits::{approx_equiv, EquivClass};
use crate::local_fun::{Chart, CompatViolation, ConstRule, LocalFun, ZSet};
use crate::nets::{in_vanishing_net_ideal, moderate_for_degree, Net, VanishCert};
use crate::regions::{box_length_sum, OpenBox, Point};
use crate::report::SuiteReport;
use crate::rng::{derive, split};
use crate::sing_sets::{regular_sample, SFamily, SingSet};
use crate::terms::{MultiIndex, PolyTerm, SmoothGrade};

/// Knobs shared by all campaigns; all runs are deterministic in `seed`.
#[derive(Debug, Clone, Copy)]
pub struct CampaignConfig {
    pub seed: u64,
    pub cases: usize,
    pub witnesses: usize,
    pub probe_depth: u32,
}

impl CampaignConfig {
    pub fn new(seed: u64, cases: usize) -> Self {
        CampaignConfig {
            seed,
            cases,
            witnesses: 20,
            probe_depth: 8,
        }
    }
}

const AXIOMS: u64 = 1;
const OFFDIAG: u64 = 2;
const IDEAL: u64 = 3;
const LEIBNIZ: u64 = 4;
const RESTRICT: u64 = 5;
const EQUIV: u64 = 6;
const DEMO: u64 = 7;

fn stream(suite: u64, case: usize) -> u64 {
    (suite << 32) | case as u64
}

fn witness_box() -> OpenBox {
    OpenBox::segment(Rational::from_int(-4), Rational::from_int(4)).expect("valid box")
}

/// A member containing every member of the family.
fn top_member(family: &SFamily) -> Result<SingSet> {
    let mut top = family.members()[0].clone();
    for m in family.members() {
        top = family.join(&top, m)?.clone();
    }
    Ok(top)
}

fn witnesses_for(
    sigma: &SingSet,
    count: usize,
    seed: u64,
    suite: u64,
    case: usize,
) -> Result<Vec<Point>> {
    regular_sample(
        sigma,
        &witness_box(),
        count,
        derive(seed, stream(suite, case) ^ 0x317),
    )
}

/// Unital-algebra axioms on random class triples, with the commutativity
/// biconditional: the scalar instance commutes everywhere, the matrix
/// instance is refuted by an explicit witness.
pub fn axioms_suite(cfg: &CampaignConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("axioms", cfg.seed);
    let family = campaign_family();
    let top = top_member(&family)?;
    for case in 0..cfg.cases {
        let mut rng = split(cfg.seed, stream(AXIOMS, case));
        let w = witnesses_for(&top, cfg.witnesses, cfg.seed, AXIOMS, case)?;
        axiom_case::<Rational>(&mut report, case, &mut rng, &family, &w, true, "")?;
        axiom_case::<Mat2>(&mut report, case, &mut rng, &family, &w, false, "_mat2")?;
    }
    // The biconditional needs an explicit refutation on the matrix side.
    let (a, b) = Mat2::non_commuting_pair();
    let ca = EquivClass::new(
        LocalFun::global(PolyTerm::constant(1, a), SingSet::CoRational),
        family.clone(),
    )?;
    let cb = EquivClass::new(
        LocalFun::global(PolyTerm::constant(1, b), SingSet::CoRational),
        family.clone(),
    )?;
    let w = witnesses_for(&top, cfg.witnesses, cfg.seed, AXIOMS, cfg.cases)?;
    let refuted = !ca.mul(&cb)?.equal_at(&cb.mul(&ca)?, &w)?;
    report.push(
        cfg.cases,
        "mat2_commutativity_refuted_by_witness",
        refuted,
        Some("matrix instance commuted on the canonical witness pair".into()),
    );
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn axiom_case<E: ValueSample>(
    report: &mut SuiteReport,
    case: usize,
    rng: &mut impl Rng,
    family: &Arc<SFamily>,
    w: &[Point],
    commutative: bool,
    tag: &str,
) -> Result<()> {
    let a = random_class::<E>(rng, family, 3);
    let b = random_class::<E>(rng, family, 3);
    let c = random_class::<E>(rng, family, 3);
    let one = EquivClass::new(
        LocalFun::global(PolyTerm::<E>::one(1), SingSet::CoRational),
        family.clone(),
    )?;
    let zero = EquivClass::new(
        LocalFun::<E>::zero(1, SingSet::CoRational),
        family.clone(),
    )?;

    let push = |report: &mut SuiteReport, name: &str, pass: bool| {
        report.push(case, format!("{name}{tag}"), pass, None);
    };

    let add_assoc = a
        .add(&b)?
        .add(&c)?
        .equal_at(&a.add(&b.add(&c)?)?, w)?;
    push(report, "add_assoc", add_assoc);

    let mul_assoc = a
        .mul(&b)?
        .mul(&c)?
        .equal_at(&a.mul(&b.mul(&c)?)?, w)?;
    push(report, "mul_assoc", mul_assoc);

    let left_distrib = a
        .mul(&b.add(&c)?)?
        .equal_at(&a.mul(&b)?.add(&a.mul(&c)?)?, w)?;
    push(report, "left_distrib", left_distrib);

    let right_distrib = a
        .add(&b)?
        .mul(&c)?
        .equal_at(&a.mul(&c)?.add(&b.mul(&c)?)?, w)?;
    push(report, "right_distrib", right_distrib);

    let unital =
        one.mul(&a)?.equal_at(&a, w)? && a.mul(&one)?.equal_at(&a, w)?;
    push(report, "unit_neutral", unital);

    let add_inverse = a.add(&a.neg())?.equal_at(&zero, w)?;
    push(report, "add_inverse", add_inverse);

    let add_comm = a.add(&b)?.equal_at(&b.add(&a)?, w)?;
    push(report, "add_comm", add_comm);

    if commutative {
        let mul_comm = a.mul(&b)?.equal_at(&b.mul(&a)?, w)?;
        push(report, "mul_comm", mul_comm);
    }
    Ok(())
}

/// Off-diagonality of the direct-limit vanishing ideal and of the net
/// ideal: no nonzero embedded global function is accepted, and certified
/// intersection elements are syntactically zero.
pub fn offdiag_suite(cfg: &CampaignConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("offdiag", cfg.seed);
    let family = campaign_family();
    let z_box = OpenBox::segment(Rational::from_int(0), Rational::from_int(1))?;
    let z = ZSet::Box(z_box.clone());
    for case in 0..cfg.cases {
        let mut rng = split(cfg.seed, stream(OFFDIAG, case));
        offdiag_case::<Rational>(&mut report, case, &mut rng, &family, &z, &z_box, cfg, "")?;
        offdiag_case::<Mat2>(&mut report, case, &mut rng, &family, &z, &z_box, cfg, "_mat2")?;
    }
    // The zero class is the one element of the intersection, and its global
    // term is syntactically zero.
    let zero = EquivClass::new(
        LocalFun::<Rational>::zero(1, SingSet::CoRational),
        family.clone(),
    )?;
    let wit = regular_sample(
        &SingSet::CoRational,
        &z_box,
        cfg.witnesses,
        derive(cfg.seed, stream(OFFDIAG, cfg.cases)),
    )?;
    report.push(
        cfg.cases,
        "zero_class_in_ideal_and_global",
        zero.in_vanishing_ideal(&z, &wit)? && zero.has_global_rep(),
        None,
    );
    report.push(
        cfg.cases,
        "zero_class_term_is_zero",
        zero.global_term().is_some_and(PolyTerm::is_zero),
        None,
    );
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn offdiag_case<E: ValueSample>(
    report: &mut SuiteReport,
    case: usize,
    rng: &mut impl Rng,
    family: &Arc<SFamily>,
    z: &ZSet,
    z_box: &OpenBox,
    cfg: &CampaignConfig,
    tag: &str,
) -> Result<()> {
    let g = random_nonzero_term::<E>(rng, 1, 6);
    let degree = g.total_degree().unwrap_or(0) as usize;
    let wit = regular_sample(
        &SingSet::CoRational,
        z_box,
        (degree + 1).max(3),
        derive(cfg.seed, stream(OFFDIAG, case) ^ 0x0ff),
    )?;
    let class = EquivClass::new(
        LocalFun::global(g.clone(), SingSet::CoRational),
        family.clone(),
    )?;
    // A nonzero polynomial of degree d cannot vanish at d+1 distinct
    // regular witnesses.
    let rejected = !class.in_vanishing_ideal(z, &wit)?;
    report.push(
        case,
        format!("nonzero_global_rejected_from_ideal{tag}"),
        rejected,
        Some(format!("accepted: {g}")),
    );
    // Certified in both the ideal and the embedded range means zero term.
    let in_both = class.in_vanishing_ideal(z, &wit)? && class.has_global_rep();
    report.push(
        case,
        format!("intersection_forces_zero_term{tag}"),
        !in_both || class.global_term().is_some_and(PolyTerm::is_zero),
        None,
    );
    // Net-level: the constant net of a nonzero global is never certified.
    let net = Net::constant(LocalFun::global(g, SingSet::CoRational))?;
    let cert = VanishCert::uniform(rng.gen_range(0..5), cfg.probe_depth);
    let net_rejected = !in_vanishing_net_ideal(&net, &cert, &wit)?;
    report.push(
        case,
        format!("nonzero_constant_net_rejected{tag}"),
        net_rejected,
        None,
    );
    Ok(())
}

/// Ideal structure: the vanishing net ideal absorbs products from both
/// sides with transformed certificates and is closed under addition and
/// differentiation; the pointwise vanishing ideal absorbs products at
/// witness scale.
pub fn ideal_suite(cfg: &CampaignConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("ideal", cfg.seed);
    let family = campaign_family();
    for case in 0..cfg.cases {
        let mut rng = split(cfg.seed, stream(IDEAL, case));
        ideal_case::<Rational>(&mut report, case, &mut rng, &family, cfg, "")?;
        ideal_case::<Mat2>(&mut report, case, &mut rng, &family, cfg, "_mat2")?;
        anchored_ideal_case(&mut report, case, &mut rng, cfg)?;
    }
    Ok(report)
}

fn ideal_case<E: ValueSample>(
    report: &mut SuiteReport,
    case: usize,
    rng: &mut impl Rng,
    family: &Arc<SFamily>,
    cfg: &CampaignConfig,
    tag: &str,
) -> Result<()> {
    let member = random_vanishing_member::<E>(rng, family, cfg.probe_depth);
    let other = random_genfun::<E>(rng, family, 3);
    let left = other.mul(&member)?;
    let right = member.mul(&other)?;
    let wit = regular_sample(
        left.net().sigma(),
        &witness_box(),
        cfg.witnesses,
        derive(cfg.seed, stream(IDEAL, case) ^ 0xab5),
    )?;
    let cert_l = left.cert().expect("certified factor").clone();
    let cert_r = right.cert().expect("certified factor").clone();
    report.push(
        case,
        format!("absorbs_left{tag}"),
        in_vanishing_net_ideal(left.net(), &cert_l, &wit)?,
        None,
    );
    report.push(
        case,
        format!("absorbs_right{tag}"),
        in_vanishing_net_ideal(right.net(), &cert_r, &wit)?,
        None,
    );
    // Closed under addition, with the merged certificate.
    let second = random_vanishing_member::<E>(rng, family, cfg.probe_depth);
    let sum = member.add(&second)?;
    let wit2 = regular_sample(
        sum.net().sigma(),
        &witness_box(),
        cfg.witnesses,
        derive(cfg.seed, stream(IDEAL, case) ^ 0xadd),
    )?;
    report.push(
        case,
        format!("closed_under_addition{tag}"),
        in_vanishing_net_ideal(sum.net(), sum.cert().expect("merged"), &wit2)?,
        None,
    );
    Ok(())
}

/// Pointwise vanishing ideal absorption on the anchored fixture.
fn anchored_ideal_case(
    report: &mut SuiteReport,
    case: usize,
    rng: &mut impl Rng,
    cfg: &CampaignConfig,
) -> Result<()> {
    let anchors: Vec<Point> = regular_sample(
        &SingSet::CoRational,
        &witness_box(),
        3,
        derive(cfg.seed, stream(IDEAL, case) ^ 0xa2c),
    )?;
    let radius = Rational::ratio(1, 1_000_000);
    let charts = anchors
        .iter()
        .map(|a| {
            Ok(Chart {
                region: OpenBox::segment(&a[0] - &radius, &a[0] + &radius)?,
                term: PolyTerm::<Rational>::var(1, 0)
                    .sub(&PolyTerm::constant(1, a[0].clone()))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let vanishing = LocalFun::finite(SingSet::CoRational, 1, charts)?;
    let z = ZSet::Points(anchors.clone());
    let factor = random_local_fun::<Rational>(rng, &SingSet::CoRational, 3);
    let ok = vanishing.in_ideal(&z, &anchors)?
        && factor.mul(&vanishing)?.in_ideal(&z, &anchors)?
        && vanishing.mul(&factor)?.in_ideal(&z, &anchors)?;
    report.push(case, "pointwise_ideal_absorbs", ok, None);
    Ok(())
}

/// Termwise derivation: the net algebra is closed under derivatives, the
/// ideal is closed with unchanged certificates, and the product rule holds
/// syntactically on probed components.
pub fn leibniz_suite(cfg: &CampaignConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("leibniz", cfg.seed);
    let family = campaign_family();
    let e = MultiIndex(vec![1]);
    for case in 0..cfg.cases {
        let mut rng = split(cfg.seed, stream(LEIBNIZ, case));
        leibniz_case::<Rational>(&mut report, case, &mut rng, &family, cfg, &e, "")?;
        leibniz_case::<Mat2>(&mut report, case, &mut rng, &family, cfg, &e, "_mat2")?;
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn leibniz_case<E: ValueSample>(
    report: &mut SuiteReport,
    case: usize,
    rng: &mut impl Rng,
    family: &Arc<SFamily>,
    cfg: &CampaignConfig,
    e: &MultiIndex,
    tag: &str,
) -> Result<()> {
    let u = random_genfun::<E>(rng, family, 3);
    let v = random_genfun::<E>(rng, family, 3);
    let lhs = u.mul(&v)?.derive(e)?;
    let rhs = u
        .derive(e)?
        .mul(&v)?
        .add(&u.mul(&v.derive(e)?)?)?;
    let wit = regular_sample(
        lhs.net().sigma(),
        &witness_box(),
        4,
        derive(cfg.seed, stream(LEIBNIZ, case) ^ 0x1e1),
    )?;
    let mut syntactic = true;
    'probe: for lambda in [0u64, 1, 2, rng.gen_range(3..8)] {
        let cl = lhs.component(lambda)?;
        let cr = rhs.component(lambda)?;
        for x in &wit {
            let a = cl.chart_at(x)?;
            let b = cr.chart_at(x)?;
            if a.term != b.term || a.region != b.region {
                syntactic = false;
                break 'probe;
            }
        }
    }
    report.push(case, format!("product_rule_syntactic{tag}"), syntactic, None);

    // Derivatives keep certified members certified, with the same
    // certificate.
    let member = random_vanishing_member::<E>(rng, family, cfg.probe_depth);
    let derived = member.derive(e)?;
    let wit2 = regular_sample(
        derived.net().sigma(),
        &witness_box(),
        cfg.witnesses,
        derive(cfg.seed, stream(LEIBNIZ, case) ^ 0xdee),
    )?;
    let cert = member.cert().expect("fixture carries a certificate");
    let closed = in_vanishing_net_ideal(derived.net(), cert, &wit2)?
        && derived.cert() == Some(cert);
    report.push(case, format!("ideal_closed_under_derivation{tag}"), closed, None);
    Ok(())
}

/// Restriction maps: identity and composition laws, structurally and at
/// witnesses.
pub fn restrict_suite(cfg: &CampaignConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("restrict", cfg.seed);
    let family = campaign_family();
    for case in 0..cfg.cases {
        let mut rng = split(cfg.seed, stream(RESTRICT, case));
        let members = family.members();
        let m1 = &members[rng.gen_range(0..members.len())];
        let m2 = family.join(m1, &members[rng.gen_range(0..members.len())])?;
        let m3 = family.join(m2, &members[rng.gen_range(0..members.len())])?;
        let f = random_local_fun::<Rational>(&mut rng, m1, 3);

        let identity = f.restrict(m1)? == f;
        report.push(case, "restrict_identity", identity, None);

        let composed = f.restrict(m2)?.restrict(m3)?;
        let direct = f.restrict(m3)?;
        report.push(case, "restrict_composition", composed == direct, None);

        let wit = regular_sample(
            m3,
            &witness_box(),
            cfg.witnesses,
            derive(cfg.seed, stream(RESTRICT, case) ^ 0x0e5),
        )?;
        let mut agrees = true;
        for x in &wit {
            if direct.eval(x)? != f.eval(x)? {
                agrees = false;
                break;
            }
        }
        report.push(case, "restrict_preserves_values", agrees, None);

        // Restriction is an algebra homomorphism.
        let g = random_local_fun::<Rational>(&mut rng, m1, 3);
        let hom = f.add(&g)?.restrict(m3)? == f.restrict(m3)?.add(&g.restrict(m3)?)?
            && f.mul(&g)?.restrict(m3)? == f.restrict(m3)?.mul(&g.restrict(m3)?)?;
        report.push(case, "restrict_is_homomorphism", hom, None);
    }
    Ok(report)
}

/// The restriction-agreement relation is an equivalence at witness scale:
/// reflexive, symmetric, and transitive via joins.
pub fn equiv_suite(cfg: &CampaignConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("equiv", cfg.seed);
    let family = campaign_family();
    let top = top_member(&family)?;
    for case in 0..cfg.cases {
        let mut rng = split(cfg.seed, stream(EQUIV, case));
        let wit = witnesses_for(&top, cfg.witnesses, cfg.seed, EQUIV, case)?;

        let f = random_local_fun::<Rational>(&mut rng, &SingSet::CoRational, 3);
        let g = equivalent_variant(&mut rng, &f, &family)?;
        let h = equivalent_variant(&mut rng, &g, &family)?;

        report.push(
            case,
            "reflexive",
            approx_equiv(&f, &f, &family, &wit)?,
            None,
        );
        let fg = approx_equiv(&f, &g, &family, &wit)?;
        let gf = approx_equiv(&g, &f, &family, &wit)?;
        report.push(case, "symmetric", fg == gf && fg, None);
        let gh = approx_equiv(&g, &h, &family, &wit)?;
        let fh = approx_equiv(&f, &h, &family, &wit)?;
        report.push(case, "transitive", !(fg && gh) || fh, None);

        // Distinct elements stay separated: shifting by one changes the
        // value at every witness.
        let shifted = f.add(&LocalFun::global(
            PolyTerm::<Rational>::one(1),
            SingSet::CoRational,
        ))?;
        report.push(
            case,
            "separates_distinct",
            !approx_equiv(&f, &shifted, &family, &wit)?,
            None,
        );
    }
    Ok(report)
}

/// Parameters of the dense-anchor showcase.
#[derive(Debug, Clone)]
pub struct DemoConfig {
    pub epsilon: Rational,
    pub charts: usize,
    pub witnesses: usize,
    pub seed: u64,
    pub constants: ConstRule<Rational>,
    pub domain: OpenBox,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            epsilon: Rational::ratio(1, 1000),
            charts: 200,
            witnesses: 20,
            seed: 0,
            constants: ConstRule::Index,
            domain: OpenBox::full(1),
        }
    }
}

/// Structured payload accompanying the demo checklist.
#[derive(Debug, Clone, Serialize)]
pub struct DemoDetails {
    pub epsilon: Rational,
    pub chart_count: usize,
    pub length_sum: Rational,
    pub length_bound: Rational,
    pub first_anchors: Vec<Rational>,
    pub sample_values: Vec<(Rational, ValueE)>,
    pub weak_violations: usize,
    pub strong_violation: Option<CompatViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moderateness_failures: Option<Vec<u32>>,
}

/// Builds the dense-anchor family and verifies its checklist: dense regular
/// set, arbitrary constants, measure bound, open neighbourhoods, constant
/// components, avoidance of earlier anchors, weak compatibility, and the
/// failure of strong compatibility for injective constants.
pub fn demo_example112(cfg: &DemoConfig) -> Result<(SuiteReport, DemoDetails)> {
    let mut report = SuiteReport::new("demo-example112", cfg.seed);
    let f = LocalFun::example_1_1_2(cfg.constants.clone(), cfg.epsilon.clone(), cfg.domain.clone())?;
    let generator = f.generator().expect("generated family");
    let anchors = generator.anchors(cfg.charts)?;
    let charts: Vec<Chart<Rational>> = (0..cfg.charts)
        .map(|n| generator.chart(n, &anchors))
        .collect();
    let anchor_points: Vec<Point> = anchors.iter().map(|a| vec![a.clone()]).collect();

    // Fact 1: the regular set is dense (witnessed by sampling arbitrarily
    // many regular rational points in the domain).
    let density = regular_sample(
        f.sigma(),
        &cfg.domain,
        cfg.witnesses.max(1),
        derive(cfg.seed, stream(DEMO, 0)),
    );
    report.push(0, "regular_set_dense", density.is_ok(), None);

    // Fact 2: the constants are arbitrary, and the family takes exactly
    // those values at its anchors.
    let values_match = anchor_points
        .iter()
        .enumerate()
        .all(|(n, x)| match f.eval(x) {
            Ok(v) => v == cfg.constants.value(n),
            Err(_) => false,
        });
    report.push(0, "constants_arbitrary_and_exact", values_match, None);

    // Fact 3: the total interval length stays below twice epsilon.
    let boxes: Vec<OpenBox> = charts.iter().map(|c| c.region.clone()).collect();
    let length_sum = box_length_sum(&boxes)?;
    let length_bound = Rational::from_int(2) * cfg.epsilon.clone();
    report.push(
        0,
        "measure_bound",
        length_sum <= length_bound,
        Some(format!("total {length_sum} exceeds {length_bound}")),
    );

    // Fact 4: open neighbourhoods of their anchors.
    let open_neighbourhoods = charts
        .iter()
        .zip(&anchor_points)
        .all(|(c, x)| c.region.contains(x).unwrap_or(false));
    report.push(0, "open_neighbourhoods", open_neighbourhoods, None);

    // Fact 5: components are constants, maximally smooth.
    let constant_components = charts.iter().all(|c| {
        c.term.total_degree().unwrap_or(0) == 0 && c.term.grade() == SmoothGrade::Infinity
    });
    report.push(0, "components_constant", constant_components, None);

    // Avoidance: no earlier anchor lies in a later chart.
    let mut avoid = true;
    'outer: for (m, c) in charts.iter().enumerate() {
        for x in anchor_points.iter().take(m) {
            if c.region.contains(x)? {
                avoid = false;
                break 'outer;
            }
        }
    }
    report.push(0, "earlier_anchors_avoided", avoid, None);

    // Weak compatibility holds; strong compatibility fails when the
    // constants are injective.
    let weak = f.check_compat(&anchor_points)?;
    report.push(
        0,
        "weak_compat_holds",
        weak.holds,
        Some(format!("{} violations", weak.violations.len())),
    );
    let strong = f.check_strong_compat(&anchor_points)?;
    if cfg.constants.is_injective() {
        report.push(
            0,
            "strong_compat_fails_with_witness",
            !strong.holds,
            Some("no overlapping pair with distinct constants found".into()),
        );
    }

    // The factorial contrast: no polynomial bound of degree up to 6
    // moderates the constants over the probed range.
    let moderateness_failures = if cfg.constants == ConstRule::Factorial {
        let values: Vec<Rational> = (0..cfg.charts).map(|n| cfg.constants.value(n)).collect();
        let failing: Vec<u32> = (0..=6)
            .filter(|&d| !moderate_for_degree(&values, d))
            .collect();
        report.push(
            0,
            "growth_defeats_polynomial_moderateness",
            failing.len() == 7,
            Some(format!("degrees failing: {failing:?}")),
        );
        Some(failing)
    } else {
        None
    };

    let preview = 10.min(cfg.charts);
    let details = DemoDetails {
        epsilon: cfg.epsilon.clone(),
        chart_count: cfg.charts,
        length_sum,
        length_bound,
        first_anchors: anchors.iter().take(preview).cloned().collect(),
        sample_values: anchors
            .iter()
            .take(preview)
            .enumerate()
            .map(|(n, a)| (a.clone(), ValueE::Scalar(cfg.constants.value(n))))
            .collect(),
        weak_violations: weak.violations.len(),
        strong_violation: strong.violations.first().cloned(),
        moderateness_failures,
    };
    Ok((report, details))
}

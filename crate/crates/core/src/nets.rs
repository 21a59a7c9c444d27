//! Index-sequenced nets of local functions and the reduced-power quotient.
//!
//! A net assigns to every index (natural numbers with their usual order) a
//! maximally smooth local function over one fixed singularity set. The
//! vanishing ideal collects nets whose components become the zero chart at
//! every regular point from some index on; since components are
//! polynomial, "all derivatives vanish at the point" is equivalent to "the
//! chart term is the zero polynomial", which is what certificates check.
//!
//! Membership is certificate-carrying: a threshold rule maps each probed
//! point to the index past which charts must be zero. Constant and
//! eventually-constant bodies are verified structurally for all later
//! indices; generated bodies are probed `probe_depth` indices deep.
//!
//! The quotient of the power algebra by the vanishing ideal carries
//! termwise derivations: differentiation maps certified nets to certified
//! nets with the same threshold rule, because the zero chart stays zero
//! under any derivative.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Rational, ValueAlgebra};
use crate::error::{Error, Result};
use crate::local_fun::{ConstRule, LocalFun};
use crate::regions::{fmt_point, OpenBox, Point};
use crate::sing_sets::{SFamily, SingSet};
use crate::terms::{MultiIndex, PolyTerm, SmoothGrade};

/// Net index; the index set is the naturals with their directed total order.
pub type Lambda = u64;

/// Generated net bodies: a global component scaled by the index, and the
/// closure under the algebra operations and differentiation.
#[derive(Debug, Clone, PartialEq)]
pub enum NetRule<E: ValueAlgebra> {
    /// lambda -> the global function lambda * term.
    ScaledTerm(PolyTerm<E>),
    Add(Box<Net<E>>, Box<Net<E>>),
    Mul(Box<Net<E>>, Box<Net<E>>),
    Neg(Box<Net<E>>),
    Derive(Box<Net<E>>, MultiIndex),
}

/// Body of a net.
#[derive(Debug, Clone, PartialEq)]
pub enum NetBody<E: ValueAlgebra> {
    /// The same local function at every index: an element of the diagonal.
    Constant(LocalFun<E>),
    /// Explicit components at the listed indices, the tail elsewhere.
    Eventually {
        prefix: Vec<(Lambda, LocalFun<E>)>,
        tail: LocalFun<E>,
    },
    Generated(NetRule<E>),
}

/// A net of local functions over one fixed singularity set.
#[derive(Debug, Clone, PartialEq)]
pub struct Net<E: ValueAlgebra> {
    sigma: SingSet,
    dim: usize,
    body: NetBody<E>,
}

fn require_infinite_grade<E: ValueAlgebra>(f: &LocalFun<E>) -> Result<()> {
    if f.grade() != SmoothGrade::Infinity {
        return Err(Error::GradeViolation);
    }
    Ok(())
}

impl<E: ValueAlgebra> Net<E> {
    pub fn constant(f: LocalFun<E>) -> Result<Self> {
        require_infinite_grade(&f)?;
        Ok(Net {
            sigma: f.sigma().clone(),
            dim: f.dim(),
            body: NetBody::Constant(f),
        })
    }

    pub fn eventually(prefix: Vec<(Lambda, LocalFun<E>)>, tail: LocalFun<E>) -> Result<Self> {
        require_infinite_grade(&tail)?;
        let mut seen = BTreeSet::new();
        for (i, f) in &prefix {
            if !seen.insert(*i) {
                return Err(Error::Precondition(format!("duplicate prefix index {i}")));
            }
            if f.sigma() != tail.sigma() || f.dim() != tail.dim() {
                return Err(Error::Precondition(
                    "prefix components must match the tail's singularity set and dimension".into(),
                ));
            }
            require_infinite_grade(f)?;
        }
        let mut prefix = prefix;
        prefix.sort_by_key(|(i, _)| *i);
        Ok(Net {
            sigma: tail.sigma().clone(),
            dim: tail.dim(),
            body: NetBody::Eventually { prefix, tail },
        })
    }

    /// lambda -> lambda * term as a global function over `sigma`.
    pub fn scaled_term(term: PolyTerm<E>, sigma: SingSet) -> Result<Self> {
        if term.grade() != SmoothGrade::Infinity {
            return Err(Error::GradeViolation);
        }
        Ok(Net {
            sigma,
            dim: term.dim(),
            body: NetBody::Generated(NetRule::ScaledTerm(term)),
        })
    }

    pub fn sigma(&self) -> &SingSet {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn body(&self) -> &NetBody<E> {
        &self.body
    }

    /// Materialize the component at one index.
    pub fn component(&self, lambda: Lambda) -> Result<LocalFun<E>> {
        match &self.body {
            NetBody::Constant(f) => Ok(f.clone()),
            NetBody::Eventually { prefix, tail } => Ok(prefix
                .iter()
                .find(|(i, _)| *i == lambda)
                .map(|(_, f)| f.clone())
                .unwrap_or_else(|| tail.clone())),
            NetBody::Generated(rule) => match rule {
                NetRule::ScaledTerm(t) => Ok(LocalFun::global(
                    t.scale(&Rational::from_bigint(lambda.into())),
                    self.sigma.clone(),
                )),
                NetRule::Add(u, v) => u.component(lambda)?.add(&v.component(lambda)?),
                NetRule::Mul(u, v) => u.component(lambda)?.mul(&v.component(lambda)?),
                NetRule::Neg(u) => Ok(u.component(lambda)?.neg()),
                NetRule::Derive(u, p) => u.component(lambda)?.derive(p),
            },
        }
    }

    /// Re-index every component over a larger certified singularity set.
    pub fn restrict(&self, sigma: &SingSet) -> Result<Self> {
        let body = match &self.body {
            NetBody::Constant(f) => NetBody::Constant(f.restrict(sigma)?),
            NetBody::Eventually { prefix, tail } => NetBody::Eventually {
                prefix: prefix
                    .iter()
                    .map(|(i, f)| Ok((*i, f.restrict(sigma)?)))
                    .collect::<Result<Vec<_>>>()?,
                tail: tail.restrict(sigma)?,
            },
            NetBody::Generated(rule) => NetBody::Generated(match rule {
                NetRule::ScaledTerm(t) => {
                    if !crate::sing_sets::subset_leq(&self.sigma, sigma) {
                        return Err(Error::UncertifiedRestriction);
                    }
                    NetRule::ScaledTerm(t.clone())
                }
                NetRule::Add(u, v) => {
                    NetRule::Add(Box::new(u.restrict(sigma)?), Box::new(v.restrict(sigma)?))
                }
                NetRule::Mul(u, v) => {
                    NetRule::Mul(Box::new(u.restrict(sigma)?), Box::new(v.restrict(sigma)?))
                }
                NetRule::Neg(u) => NetRule::Neg(Box::new(u.restrict(sigma)?)),
                NetRule::Derive(u, p) => NetRule::Derive(Box::new(u.restrict(sigma)?), p.clone()),
            }),
        };
        Ok(Net {
            sigma: sigma.clone(),
            dim: self.dim,
            body,
        })
    }

    fn explicit_indices(&self) -> Option<BTreeSet<Lambda>> {
        match &self.body {
            NetBody::Constant(_) => Some(BTreeSet::new()),
            NetBody::Eventually { prefix, .. } => {
                Some(prefix.iter().map(|(i, _)| *i).collect())
            }
            NetBody::Generated(_) => None,
        }
    }

    fn tail_component(&self) -> Option<&LocalFun<E>> {
        match &self.body {
            NetBody::Constant(f) => Some(f),
            NetBody::Eventually { tail, .. } => Some(tail),
            NetBody::Generated(_) => None,
        }
    }

    fn check_operand(&self, rhs: &Self) -> Result<()> {
        if self.sigma != rhs.sigma {
            return Err(Error::Precondition(
                "nets live over different singularity sets".into(),
            ));
        }
        if self.dim != rhs.dim {
            return Err(Error::dim(self.dim, rhs.dim));
        }
        Ok(())
    }

    fn binary(&self, rhs: &Self, mul: bool) -> Result<Self> {
        self.check_operand(rhs)?;
        let structural = match (self.explicit_indices(), rhs.explicit_indices()) {
            (Some(a), Some(b)) => Some(a.union(&b).copied().collect::<Vec<_>>()),
            _ => None,
        };
        let Some(indices) = structural else {
            let rule = if mul {
                NetRule::Mul(Box::new(self.clone()), Box::new(rhs.clone()))
            } else {
                NetRule::Add(Box::new(self.clone()), Box::new(rhs.clone()))
            };
            return Ok(Net {
                sigma: self.sigma.clone(),
                dim: self.dim,
                body: NetBody::Generated(rule),
            });
        };
        let op = if mul { LocalFun::mul } else { LocalFun::add };
        let tail = op(
            self.tail_component().expect("structural body"),
            rhs.tail_component().expect("structural body"),
        )?;
        if indices.is_empty() {
            return Net::constant(tail);
        }
        let prefix = indices
            .into_iter()
            .map(|i| Ok((i, op(&self.component(i)?, &rhs.component(i)?)?)))
            .collect::<Result<Vec<_>>>()?;
        Net::eventually(prefix, tail)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.binary(rhs, false)
    }

    /// Componentwise order-sensitive product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.binary(rhs, true)
    }

    pub fn neg(&self) -> Self {
        let body = match &self.body {
            NetBody::Constant(f) => NetBody::Constant(f.neg()),
            NetBody::Eventually { prefix, tail } => NetBody::Eventually {
                prefix: prefix.iter().map(|(i, f)| (*i, f.neg())).collect(),
                tail: tail.neg(),
            },
            NetBody::Generated(_) => NetBody::Generated(NetRule::Neg(Box::new(self.clone()))),
        };
        Net {
            sigma: self.sigma.clone(),
            dim: self.dim,
            body,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    /// Termwise derivative: differentiates every component's charts.
    pub fn derive(&self, p: &MultiIndex) -> Result<Self> {
        let body = match &self.body {
            NetBody::Constant(f) => NetBody::Constant(f.derive(p)?),
            NetBody::Eventually { prefix, tail } => NetBody::Eventually {
                prefix: prefix
                    .iter()
                    .map(|(i, f)| Ok((*i, f.derive(p)?)))
                    .collect::<Result<Vec<_>>>()?,
                tail: tail.derive(p)?,
            },
            NetBody::Generated(_) => {
                NetBody::Generated(NetRule::Derive(Box::new(self.clone()), p.clone()))
            }
        };
        Ok(Net {
            sigma: self.sigma.clone(),
            dim: self.dim,
            body,
        })
    }
}

/// Certificate for membership in the vanishing ideal: a per-point threshold
/// index and a probe depth for generated bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishCert {
    pub thresholds: Vec<(Point, Lambda)>,
    pub default: Lambda,
    #[serde(rename = "probeDepth")]
    pub probe_depth: u32,
}

impl VanishCert {
    pub fn uniform(default: Lambda, probe_depth: u32) -> Self {
        VanishCert {
            thresholds: Vec::new(),
            default,
            probe_depth,
        }
    }

    pub fn threshold(&self, x: &Point) -> Lambda {
        self.thresholds
            .iter()
            .find(|(p, _)| p == x)
            .map(|(_, l)| *l)
            .unwrap_or(self.default)
    }

    /// Pointwise maximum, as used when combining operand certificates.
    pub fn merge_max(&self, other: &VanishCert) -> VanishCert {
        let mut points: Vec<Point> = self
            .thresholds
            .iter()
            .chain(&other.thresholds)
            .map(|(p, _)| p.clone())
            .collect();
        points.sort();
        points.dedup();
        VanishCert {
            thresholds: points
                .into_iter()
                .map(|p| {
                    let l = self.threshold(&p).max(other.threshold(&p));
                    (p, l)
                })
                .collect(),
            default: self.default.max(other.default),
            probe_depth: self.probe_depth.max(other.probe_depth),
        }
    }
}

/// Does the certificate verify the net's membership in the vanishing ideal
/// at every witness? For constant and eventually bodies the check covers
/// all indices past the threshold; generated bodies are probed
/// `probe_depth` indices deep.
pub fn in_vanishing_net_ideal<E: ValueAlgebra>(
    net: &Net<E>,
    cert: &VanishCert,
    witnesses: &[Point],
) -> Result<bool> {
    for w in witnesses {
        if net.sigma.is_singular(w) {
            return Err(Error::Precondition(format!(
                "witness {} is singular",
                fmt_point(w)
            )));
        }
    }
    for w in witnesses {
        let from = cert.threshold(w);
        let zero_chart = |f: &LocalFun<E>| -> Result<bool> { Ok(f.chart_at(w)?.term.is_zero()) };
        let ok = match &net.body {
            NetBody::Constant(f) => zero_chart(f)?,
            NetBody::Eventually { prefix, tail } => {
                let listed = prefix
                    .iter()
                    .filter(|(i, _)| *i >= from)
                    .map(|(_, f)| zero_chart(f))
                    .collect::<Result<Vec<_>>>()?;
                listed.into_iter().all(|b| b) && zero_chart(tail)?
            }
            NetBody::Generated(_) => {
                let mut all = true;
                for mu in from..from + cert.probe_depth as Lambda {
                    if !zero_chart(&net.component(mu)?)? {
                        all = false;
                        break;
                    }
                }
                all
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Element of the reduced-power algebra: a net modulo the vanishing ideal,
/// optionally carrying the certificate that witnesses ideal membership
/// claims.
#[derive(Debug, Clone)]
pub struct GenFun<E: ValueAlgebra> {
    family: Arc<SFamily>,
    net: Net<E>,
    cert: Option<VanishCert>,
}

impl<E: ValueAlgebra> GenFun<E> {
    pub fn new(net: Net<E>, family: Arc<SFamily>, cert: Option<VanishCert>) -> Result<Self> {
        if !family.contains(&net.sigma) {
            return Err(Error::NotAMember);
        }
        Ok(GenFun { family, net, cert })
    }

    /// The constant net of `f`: the image of the diagonal embedding.
    pub fn diagonal(f: LocalFun<E>, family: Arc<SFamily>) -> Result<Self> {
        let net = Net::constant(f)?;
        GenFun::new(net, family, None)
    }

    pub fn net(&self) -> &Net<E> {
        &self.net
    }

    pub fn family(&self) -> &Arc<SFamily> {
        &self.family
    }

    pub fn cert(&self) -> Option<&VanishCert> {
        self.cert.as_ref()
    }

    pub fn with_cert(mut self, cert: VanishCert) -> Self {
        self.cert = Some(cert);
        self
    }

    pub fn component(&self, lambda: Lambda) -> Result<LocalFun<E>> {
        self.net.component(lambda)
    }

    fn check_family(&self, rhs: &Self) -> Result<()> {
        if *self.family != *rhs.family {
            return Err(Error::Precondition(
                "elements live over different families".into(),
            ));
        }
        Ok(())
    }

    fn joined_nets(&self, rhs: &Self) -> Result<(Net<E>, Net<E>)> {
        let joined = self.family.join(&self.net.sigma, &rhs.net.sigma)?.clone();
        Ok((self.net.restrict(&joined)?, rhs.net.restrict(&joined)?))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_family(rhs)?;
        let (a, b) = self.joined_nets(rhs)?;
        let cert = match (&self.cert, &rhs.cert) {
            (Some(c), Some(d)) => Some(c.merge_max(d)),
            _ => None,
        };
        Ok(GenFun {
            family: self.family.clone(),
            net: a.add(&b)?,
            cert,
        })
    }

    /// Order-sensitive product. A certificate on either factor survives
    /// with thresholds raised to the pointwise maximum: past the threshold
    /// the certified factor's chart is the zero polynomial, and the product
    /// chart term vanishes with it on either side.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_family(rhs)?;
        let (a, b) = self.joined_nets(rhs)?;
        let cert = match (&self.cert, &rhs.cert) {
            (Some(c), Some(d)) => Some(c.merge_max(d)),
            (Some(c), None) | (None, Some(c)) => Some(c.clone()),
            (None, None) => None,
        };
        Ok(GenFun {
            family: self.family.clone(),
            net: a.mul(&b)?,
            cert,
        })
    }

    pub fn neg(&self) -> Self {
        GenFun {
            family: self.family.clone(),
            net: self.net.neg(),
            cert: self.cert.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    /// Termwise derivation. Certificates survive unchanged: the zero chart
    /// stays zero under every derivative.
    pub fn derive(&self, p: &MultiIndex) -> Result<Self> {
        Ok(GenFun {
            family: self.family.clone(),
            net: self.net.derive(p)?,
            cert: self.cert.clone(),
        })
    }

    /// Quotient equality: the difference lies in the vanishing ideal,
    /// verified by `cert` at the witnesses.
    pub fn equal_mod_ideal(
        &self,
        rhs: &Self,
        cert: &VanishCert,
        witnesses: &[Point],
    ) -> Result<bool> {
        let diff = self.sub(rhs)?;
        in_vanishing_net_ideal(&diff.net, cert, witnesses)
    }
}

/// The showcase element: the diagonal of a dense-anchor family whose
/// constants follow `growth`, over the one-member co-rational family. Its
/// singular set has strictly larger cardinality than its regular set, and
/// nothing constrains the constants near the singularities.
pub fn build_dense_singular_demo(
    epsilon: Rational,
    growth: ConstRule<Rational>,
    domain: OpenBox,
) -> Result<GenFun<Rational>> {
    let f = LocalFun::example_1_1_2(growth, epsilon, domain)?;
    let family = Arc::new(SFamily::singleton(SingSet::CoRational));
    GenFun::diagonal(f, family)
}

/// Colombeau-style polynomial moderateness probe over a finite index range:
/// fits the best constant on the first half of `values` and asks whether
/// twice that constant still bounds the second half against `(1 + n)^degree`.
/// Factorial growth fails this for every fixed degree; polynomially bounded
/// sequences pass.
pub fn moderate_for_degree(values: &[Rational], degree: u32) -> bool {
    if values.len() < 4 {
        return true;
    }
    let half = values.len() / 2;
    let weight = |n: usize| Rational::from_int(1 + n as i64).pow_u(degree);
    let mut best = Rational::from_int(0);
    for (n, v) in values.iter().enumerate().take(half) {
        let ratio = v.abs() / weight(n);
        if ratio > best {
            best = ratio;
        }
    }
    let bound = Rational::from_int(2) * best;
    values
        .iter()
        .enumerate()
        .skip(half)
        .all(|(n, v)| v.abs() <= &bound * &weight(n))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[serde(bound(serialize = "", deserialize = ""))]
enum RuleRepr<E: ValueAlgebra> {
    Scaledterm { term: PolyTerm<E> },
    Add { lhs: Box<Net<E>>, rhs: Box<Net<E>> },
    Mul { lhs: Box<Net<E>>, rhs: Box<Net<E>> },
    Neg { of: Box<Net<E>> },
    Derive { of: Box<Net<E>>, p: MultiIndex },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[serde(bound(serialize = "", deserialize = ""))]
enum NetBodyRepr<E: ValueAlgebra> {
    Constant(LocalFun<E>),
    Eventually {
        prefix: Vec<(Lambda, LocalFun<E>)>,
        tail: LocalFun<E>,
    },
    Generated(RuleRepr<E>),
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
struct NetRepr<E: ValueAlgebra> {
    sigma: SingSet,
    body: NetBodyRepr<E>,
}

impl<E: ValueAlgebra> Serialize for Net<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        fn rule_repr<E: ValueAlgebra>(rule: &NetRule<E>) -> RuleRepr<E> {
            match rule {
                NetRule::ScaledTerm(t) => RuleRepr::Scaledterm { term: t.clone() },
                NetRule::Add(u, v) => RuleRepr::Add {
                    lhs: u.clone(),
                    rhs: v.clone(),
                },
                NetRule::Mul(u, v) => RuleRepr::Mul {
                    lhs: u.clone(),
                    rhs: v.clone(),
                },
                NetRule::Neg(u) => RuleRepr::Neg { of: u.clone() },
                NetRule::Derive(u, p) => RuleRepr::Derive {
                    of: u.clone(),
                    p: p.clone(),
                },
            }
        }
        let body = match &self.body {
            NetBody::Constant(f) => NetBodyRepr::Constant(f.clone()),
            NetBody::Eventually { prefix, tail } => NetBodyRepr::Eventually {
                prefix: prefix.clone(),
                tail: tail.clone(),
            },
            NetBody::Generated(rule) => NetBodyRepr::Generated(rule_repr(rule)),
        };
        NetRepr {
            sigma: self.sigma.clone(),
            body,
        }
        .serialize(s)
    }
}

impl<'de, E: ValueAlgebra> Deserialize<'de> for Net<E> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = NetRepr::<E>::deserialize(d)?;
        let net = match repr.body {
            NetBodyRepr::Constant(f) => Net::constant(f),
            NetBodyRepr::Eventually { prefix, tail } => Net::eventually(prefix, tail),
            NetBodyRepr::Generated(rule) => match rule {
                RuleRepr::Scaledterm { term } => Net::scaled_term(term, repr.sigma.clone()),
                RuleRepr::Add { lhs, rhs } => lhs.add(&rhs),
                RuleRepr::Mul { lhs, rhs } => lhs.mul(&rhs),
                RuleRepr::Neg { of } => Ok(of.neg()),
                RuleRepr::Derive { of, p } => of.derive(&p),
            },
        }
        .map_err(serde::de::Error::custom)?;
        if net.sigma != repr.sigma {
            return Err(serde::de::Error::custom(
                "net sigma does not match its components",
            ));
        }
        Ok(net)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "", deserialize = ""))]
struct GenFunRepr<E: ValueAlgebra> {
    family: SFamily,
    net: Net<E>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cert: Option<VanishCert>,
}

impl<E: ValueAlgebra> Serialize for GenFun<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GenFunRepr {
            family: (*self.family).clone(),
            net: self.net.clone(),
            cert: self.cert.clone(),
        }
        .serialize(s)
    }
}

impl<'de, E: ValueAlgebra> Deserialize<'de> for GenFun<E> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GenFunRepr::<E>::deserialize(d)?;
        GenFun::new(repr.net, Arc::new(repr.family), repr.cert).map_err(serde::de::Error::custom)
    }
}

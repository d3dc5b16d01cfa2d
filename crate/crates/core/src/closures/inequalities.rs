//! Numerical checks of the tail bounds behind the limit theorems.
//!
//! For `a ∈ ri(mu)` and `0 < r < s < rho(a)` the sets
//! `A = {x : <theta, x - a> >= s |theta|}` carry mass bounded below, which
//! gives
//!
//! * `Lambda(theta) - <theta, a> - s|theta| >= ln mu(A)` pointwise, and
//! * `<theta, b - a> >= r|theta| - C e^{-s|theta|} (r|theta| e^{r|theta|} + 1)`
//!   with `b` the mean and `C = mu(R^d) / mu(A)`.
//!
//! Every side is an interval; a check only counts as passed when the
//! intervals separate the right way round. Means are needed, so the suite
//! accepts finitely many atoms only.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::rat::{ser_rat, Rat, RatVec};
use crate::expfam::divergence::{divergence, variation_distance, Extended};
use crate::expfam::eval::Tilt;
use crate::expfam::member::FamilyMember;
use crate::faces::{enumerate_faces, support_value};
use crate::interval::Interval;
use crate::measure::{convex_support, MixedMeasure};

use super::classify::{classify_sequence, Alternative};

const EPS: f64 = 1e-12;
const COROLLARY_SEQUENCES: usize = 20;
const SEQUENCE_LEN: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Holds,
    Violated,
    /// The enclosures overlap.
    Undecided,
}

impl Check {
    /// `lhs >= rhs`.
    fn ge(lhs: Interval, rhs: Interval) -> Check {
        if lhs.lo >= rhs.hi {
            Check::Holds
        } else if lhs.hi < rhs.lo {
            Check::Violated
        } else {
            Check::Undecided
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundProbe {
    pub a: RatVec,
    #[serde(serialize_with = "ser_rat")]
    pub s: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub r: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeSample {
    pub theta: RatVec,
    /// `mu(A)`.
    pub mass: Interval,
    pub constant: Option<Interval>,
    pub pointwise: Check,
    pub mean_bound: Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryCheck {
    pub direction: RatVec,
    pub face_dim: Option<usize>,
    pub check: Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct PinskerCheck {
    pub variation: Interval,
    pub divergence: Extended,
    pub check: Check,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub holds: usize,
    pub violated: usize,
    pub undecided: usize,
}

impl Tally {
    fn of<'a>(checks: impl Iterator<Item = &'a Check>) -> Tally {
        let mut t = Tally::default();
        for c in checks {
            match c {
                Check::Holds => t.holds += 1,
                Check::Violated => t.violated += 1,
                Check::Undecided => t.undecided += 1,
            }
        }
        t
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub rho: Interval,
    pub samples: Vec<ProbeSample>,
    pub corollary: Vec<CorollaryCheck>,
    pub pinsker: Vec<PinskerCheck>,
    pub pointwise: Tally,
    pub mean_bound: Tally,
    pub corollary_tally: Tally,
    pub pinsker_tally: Tally,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        [self.pointwise, self.mean_bound, self.corollary_tally, self.pinsker_tally]
            .iter()
            .all(|t| t.violated == 0 && t.undecided == 0)
    }
}

fn finite_only(mu: &MixedMeasure) -> Result<()> {
    if mu.families.is_empty() {
        Ok(())
    } else {
        Err(Error::Unsupported("inequality checks need finitely many atoms".into()))
    }
}

fn norm(v: &RatVec) -> Interval {
    Interval::from_rat(&v.dot(v)).sqrt()
}

/// Facets of `cs(mu)` inside `aff(mu)`: normals in `lin(mu)` and offsets.
fn facets(mu: &MixedMeasure) -> Result<Vec<(RatVec, Rat)>> {
    let cs = convex_support(mu)?.polyhedron()?.canonical()?;
    let lin = mu.lin();
    Ok(cs.inequalities.iter().map(|i| (lin.project(&i.normal), i.offset.clone())).filter(|(n, _)| !n.is_zero()).collect())
}

/// Distance from `a` to `aff(mu) \ cs(mu)`; infinite if the support is the
/// whole affine hull.
pub fn rho(mu: &MixedMeasure, a: &RatVec) -> Result<Interval> {
    let cs = convex_support(mu)?.polyhedron()?.canonical()?;
    if !cs.ri_query()?.contains(a) {
        return Err(Error::ProbeOutOfRange("a is not in the relative interior of the support".into()));
    }
    let mut best = Interval::point(f64::INFINITY);
    for (n, b) in facets(mu)? {
        let slack = Interval::from_rat(&(b - n.dot(a)));
        let d = slack / norm(&n);
        best = Interval::new(best.lo.min(d.lo), best.hi.min(d.hi));
    }
    Ok(best)
}

/// Is `x` in `A = {<theta, x - a> >= s |theta|}`? Exact.
fn in_cap(theta: &RatVec, x: &RatVec, a: &RatVec, s: &Rat) -> bool {
    let lhs = theta.dot(&x.sub(a));
    if lhs < Rat::from_integer(0.into()) {
        return false;
    }
    &lhs * &lhs >= s * s * theta.dot(theta)
}

fn total_mass(mu: &MixedMeasure) -> Interval {
    mu.atoms.iter().fold(Interval::ZERO, |acc, x| acc + x.weight.value())
}

fn sample_check(mu: &MixedMeasure, probe: &BoundProbe, theta: &RatVec) -> Result<ProbeSample> {
    let a = &probe.a;
    let mass = mu
        .atoms
        .iter()
        .filter(|x| in_cap(theta, &x.point, a, &probe.s))
        .fold(Interval::ZERO, |acc, x| acc + x.weight.value());
    if theta.is_zero() {
        // A is everything and both bounds collapse to trivial statements
        return Ok(ProbeSample {
            theta: theta.clone(),
            mass,
            constant: Some(Interval::ONE),
            pointwise: Check::Holds,
            mean_bound: Check::Holds,
        });
    }
    let member = FamilyMember::top(mu, theta)?;
    let lz = member.log_partition(EPS)?;
    let t = norm(theta);
    let s = Interval::from_rat(&probe.s);
    let r = Interval::from_rat(&probe.r);
    let ta = Interval::from_rat(&theta.dot(a));
    if mass.hi <= 0.0 {
        return Ok(ProbeSample { theta: theta.clone(), mass, constant: None, pointwise: Check::Violated, mean_bound: Check::Undecided });
    }
    let pointwise = Check::ge(lz - ta - s * t, mass.ln());
    let c = total_mass(mu) / mass;
    // <theta, b - a> = sum_x p(x) <theta, x - a>
    let mut lhs = Interval::ZERO;
    for x in &mu.atoms {
        let p = (x.weight.ln() + Interval::from_rat(&theta.dot(&x.point)) - lz).exp();
        lhs = lhs + p * Interval::from_rat(&theta.dot(&x.point.sub(a)));
    }
    let rt = r * t;
    let rhs = rt - c * (-(s * t)).exp() * (rt * rt.exp() + Interval::ONE);
    Ok(ProbeSample { theta: theta.clone(), mass, constant: Some(c), pointwise, mean_bound: Check::ge(lhs, rhs) })
}

/// `<tau, b - a> >= rho(a) |tau|` for the mean `b` of a limit exposed by
/// `tau`; `<tau, b>` is the support value there, so the check is exact.
fn corollary_check(mu: &MixedMeasure, a: &RatVec, tau: &RatVec) -> Result<Check> {
    let gap = support_value(mu, tau)? - tau.dot(a);
    if gap < Rat::from_integer(0.into()) {
        return Ok(Check::Violated);
    }
    let tt = tau.dot(tau);
    let gap2 = &gap * &gap;
    // rho = min slack/|n|: the bound holds iff some facet has
    // slack^2 |tau|^2 <= gap^2 |n|^2
    let fs = facets(mu)?;
    if fs.is_empty() {
        return Ok(Check::Holds);
    }
    let ok = fs.iter().any(|(n, b)| {
        let slack = b - n.dot(a);
        (&slack * &slack * &tt).cmp(&(&gap2 * n.dot(n))) != Ordering::Greater
    });
    Ok(if ok { Check::Holds } else { Check::Violated })
}

/// `|P - Q|^2 <= 2 D(P || Q)`.
pub fn pinsker_check(p: &FamilyMember, q: &FamilyMember) -> Result<PinskerCheck> {
    let variation = variation_distance(p, q, EPS)?;
    let divergence = divergence(p, q, EPS)?;
    let check = match divergence {
        Extended::PosInf => Check::Holds,
        // D >= 0, so a certified zero distance settles it
        Extended::Finite(_) if variation.hi <= 0.0 => Check::Holds,
        Extended::Finite(d) => Check::ge(d.scale(2.0), variation.sqr()),
    };
    Ok(PinskerCheck { variation, divergence, check })
}

fn random_in_lin(mu: &MixedMeasure, rng: &mut ChaCha8Rng, spread: i64) -> RatVec {
    let d = mu.dim;
    let v = RatVec((0..d).map(|_| Rat::new(rng.gen_range(-spread * 20..=spread * 20).into(), 20.into())).collect());
    mu.lin().project(&v)
}

/// Runs every check on `samples` random parameters drawn from `seed`.
pub fn inequality_suite(mu: &MixedMeasure, probe: &BoundProbe, samples: usize, seed: u64) -> Result<InequalityReport> {
    finite_only(mu)?;
    if probe.a.dim() != mu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, got: probe.a.dim() });
    }
    let zero = Rat::from_integer(0.into());
    if !(probe.r > zero && probe.s > probe.r) {
        return Err(Error::ProbeOutOfRange("need 0 < r < s".into()));
    }
    let rho = rho(mu, &probe.a)?;
    if !(Interval::from_rat(&probe.s).hi < rho.lo) {
        return Err(Error::ProbeOutOfRange("s must stay below rho(a)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thetas = vec![RatVec::zeros(mu.dim)];
    while thetas.len() < samples.max(1) {
        thetas.push(random_in_lin(mu, &mut rng, 10));
    }
    let sample_results = thetas.iter().map(|t| sample_check(mu, probe, t)).collect::<Result<Vec<_>>>()?;

    let mut corollary = Vec::new();
    for _ in 0..COROLLARY_SEQUENCES {
        let tau = random_in_lin(mu, &mut rng, 5);
        if tau.is_zero() {
            continue;
        }
        let offset = random_in_lin(mu, &mut rng, 2);
        let seq: Vec<RatVec> =
            (1..=SEQUENCE_LEN).map(|n| offset.axpy(&Rat::from_integer(n.into()), &tau)).collect();
        let report = classify_sequence(mu, &seq, false)?;
        corollary.push(match report.alternative {
            Alternative::Boundary { direction, face_dim, .. } => {
                let check = corollary_check(mu, &probe.a, &direction)?;
                CorollaryCheck { direction, face_dim: Some(face_dim), check }
            }
            _ => CorollaryCheck { direction: tau, face_dim: None, check: Check::Undecided },
        });
    }

    let faces = enumerate_faces(mu)?;
    let mut pinsker = Vec::new();
    for _ in 0..samples.max(1) {
        let f = faces[rng.gen_range(0..faces.len())].clone();
        let p = FamilyMember::new(f, Tilt::exact(&random_in_lin(mu, &mut rng, 3)))?;
        let q = FamilyMember::top(mu, &random_in_lin(mu, &mut rng, 3))?;
        pinsker.push(pinsker_check(&p, &q)?);
    }

    Ok(InequalityReport {
        rho,
        pointwise: Tally::of(sample_results.iter().map(|s| &s.pointwise)),
        mean_bound: Tally::of(sample_results.iter().map(|s| &s.mean_bound)),
        corollary_tally: Tally::of(corollary.iter().map(|c| &c.check)),
        pinsker_tally: Tally::of(pinsker.iter().map(|c| &c.check)),
        samples: sample_results,
        corollary,
        pinsker,
    })
}

//! Finite-prefix diagnosis of parameter sequences.
//!
//! A sequence either has a convergent tail (limit in `Theta`) or norms
//! running off to infinity along a stable direction. A prefix only gives
//! evidence, so the thresholds below decide what counts as evidence. Limits
//! are extrapolated as `(N x_N - h x_h) / (N - h)`, which is exact for
//! sequences of the form `c + v/n` and linear ones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::rat::{rat_to_f64, Rat, RatVec};
use crate::expfam::divergence::{divergence, variation_distance, Extended};
use crate::expfam::eval::Tilt;
use crate::expfam::member::{condition, integrability, FamilyMember};
use crate::faces::{expose, FaceHandle};
use crate::interval::Interval;
use crate::measure::MixedMeasure;

use super::catalog::{minimal_dominated_face, Dominated};

const MIN_LEN: usize = 4;
const BOUNDARY_NORM: f64 = 10.0;
const GROWTH: f64 = 1.5;
const DIRECTION_COS: f64 = 1.0 - 1e-3;
/// Relative disagreement allowed between two extrapolated limits.
const LIMIT_TOL: f64 = 1e-3;
const SNAP_DENOM: i64 = 256;
const SNAP_TOL: f64 = 1e-2;
const DIAG_EPS: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct LimitMember {
    pub face_chain: Vec<RatVec>,
    pub face_dim: usize,
    pub theta: RatVec,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "alternative")]
pub enum Alternative {
    Interior { limit: RatVec, lambda_limit: Interval },
    Boundary { direction: RatVec, face_dim: usize, limit: LimitMember },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub norms: Vec<f64>,
    pub lambda: Vec<Option<Interval>>,
    /// Variation distance to the limit member.
    pub variation: Vec<Option<Interval>>,
    /// `D(limit || Q_n)` for interior limits.
    pub divergence: Vec<Option<Extended>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceReport {
    #[serde(flatten)]
    pub alternative: Alternative,
    pub diagnostics: Diagnostics,
}

impl SequenceReport {
    /// The limit as a member, when one was found.
    pub fn limit_member(&self, mu: &MixedMeasure) -> Result<Option<FamilyMember>> {
        match &self.alternative {
            Alternative::Interior { limit, .. } => Ok(Some(FamilyMember::top(mu, limit)?)),
            Alternative::Boundary { limit, .. } => Ok(Some(limit_to_member(mu, limit)?)),
            Alternative::Undetermined { .. } => Ok(None),
        }
    }
}

fn limit_to_member(mu: &MixedMeasure, l: &LimitMember) -> Result<FamilyMember> {
    let mut f = FaceHandle::top(mu);
    for tau in &l.face_chain {
        f = expose(&f, tau)?;
    }
    FamilyMember::new(f, Tilt::exact(&l.theta))
}

fn norm(v: &RatVec) -> f64 {
    v.iter().map(|x| rat_to_f64(x).powi(2)).sum::<f64>().sqrt()
}

fn cosine(a: &RatVec, b: &RatVec) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    rat_to_f64(&a.dot(b)) / (na * nb)
}

fn richardson(seq: &[RatVec], n: usize, h: usize) -> RatVec {
    // 1-based indices
    let (nn, hh) = (Rat::from_integer(n.into()), Rat::from_integer(h.into()));
    seq[n - 1].scale(&nn).sub(&seq[h - 1].scale(&hh)).scale(&(nn - hh).recip())
}

/// A small-denominator direction close to `v`, or `v` itself.
fn snap(v: &RatVec) -> RatVec {
    let m = v.iter().map(|x| rat_to_f64(x).abs()).fold(0.0, f64::max);
    if m == 0.0 {
        return v.clone();
    }
    let u: Vec<f64> = v.iter().map(|x| rat_to_f64(x) / m).collect();
    for q in 1..=SNAP_DENOM {
        let qf = q as f64;
        if u.iter().all(|x| (x * qf - (x * qf).round()).abs() <= SNAP_TOL) {
            let ints: Vec<i64> = u.iter().map(|x| (x * qf).round() as i64).collect();
            let s = RatVec::from_ints(&ints);
            if !s.is_zero() {
                return s;
            }
        }
    }
    v.primitive()
}

/// The direction of escape, if the tail runs off to infinity.
fn escape_direction(seq: &[RatVec]) -> Option<RatVec> {
    let n = seq.len();
    let h = n / 2;
    let norms: Vec<f64> = seq.iter().map(norm).collect();
    let tail = &norms[h - 1..];
    if tail.windows(2).any(|w| w[1] < w[0]) || norms[n - 1] < BOUNDARY_NORM || norms[n - 1] < GROWTH * norms[h - 1] {
        return None;
    }
    let d1 = seq[n - 1].sub(&seq[h - 1]);
    let d2 = seq[n - 1].sub(&seq[(n + h) / 2 - 1]);
    (cosine(&d1, &d2) >= DIRECTION_COS).then_some(d1)
}

/// The limit of a convergent tail.
fn interior_limit(seq: &[RatVec]) -> std::result::Result<RatVec, String> {
    let n = seq.len();
    let h = n / 2;
    let steps: Vec<f64> = seq.windows(2).map(|w| norm(&w[1].sub(&w[0]))).collect();
    let (first, last) = (steps[h - 1], steps[n - 2]);
    if last > 0.0 && last > 0.5 * first {
        return Err("steps do not shrink".into());
    }
    let l = richardson(seq, n, h);
    let l2 = richardson(seq, n, (n + h) / 2);
    if norm(&l.sub(&l2)) > LIMIT_TOL * (1.0 + norm(&l)) {
        return Err("extrapolated limits disagree".into());
    }
    Ok(l)
}

/// Diagnoses `params`, each of which must lie in `Theta`.
pub fn classify_sequence(mu: &MixedMeasure, params: &[RatVec], with_diagnostics: bool) -> Result<SequenceReport> {
    let members = params.iter().map(|p| FamilyMember::top(mu, p)).collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = params.iter().map(norm).collect();
    let mut diagnostics = Diagnostics { norms, ..Default::default() };
    let undetermined = |reason: &str, diagnostics: Diagnostics| SequenceReport {
        alternative: Alternative::Undetermined { reason: reason.into() },
        diagnostics,
    };
    if params.len() < MIN_LEN {
        return Ok(undetermined("sequence too short", diagnostics));
    }
    let mut face = FaceHandle::top(mu);
    let mut seq: Vec<RatVec> = params.iter().map(|p| face.lin().project(p)).collect();
    let mut directions: Vec<RatVec> = Vec::new();
    while face.dim() > 0 {
        let Some(d) = escape_direction(&seq) else { break };
        let tau = snap(&face.lin().project(&d));
        let tau = face.lin().project(&tau);
        if tau.is_zero() {
            break;
        }
        face = match expose(&face, &tau) {
            Ok(g) => g,
            Err(Error::UnboundedDirection) => return Ok(undetermined("escape direction is not exposing", diagnostics)),
            Err(e) => return Err(e),
        };
        directions.push(tau);
        seq = seq.iter().map(|p| face.lin().project(p)).collect();
    }
    let limit = match interior_limit(&seq) {
        Ok(l) => face.lin().project(&l),
        Err(reason) => return Ok(undetermined(&reason, diagnostics)),
    };
    let target = match FamilyMember::new(face.clone(), Tilt::exact(&limit)) {
        Ok(m) => m,
        Err(Error::DomainViolation) => return Ok(undetermined("limit outside the parameter domain", diagnostics)),
        Err(e) => return Err(e),
    };
    if with_diagnostics {
        for m in &members {
            diagnostics.lambda.push(m.log_partition(DIAG_EPS).ok());
            diagnostics.variation.push(variation_distance(m, &target, DIAG_EPS).ok());
            if directions.is_empty() {
                diagnostics.divergence.push(divergence(&target, m, DIAG_EPS).ok());
            }
        }
    }
    let alternative = match directions.first() {
        None => Alternative::Interior { limit, lambda_limit: target.log_partition(DIAG_EPS)? },
        Some(first) => Alternative::Boundary {
            direction: first.clone(),
            face_dim: face.dim(),
            limit: LimitMember { face_chain: directions.clone(), face_dim: face.dim(), theta: limit },
        },
    };
    Ok(SequenceReport { alternative, diagnostics })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtReport {
    /// Chain of the smallest face carrying the limit.
    pub face_chain: Vec<RatVec>,
    pub face_dim: usize,
    /// `F ⊆ F_n` per index.
    pub contained: Vec<bool>,
    /// Diagnosis of the conditioned sequence inside the limit's component.
    pub conditioned: Option<SequenceReport>,
    /// `D(P || Q_n)`.
    pub divergence: Vec<Option<Extended>>,
    /// `theta_n ∈ theta + M(P)`, which is when the divergence is finite.
    pub finite_predicted: Vec<Option<bool>>,
}

/// Checks a sequence of members of `ext(E)` against a candidate limit `p`.
pub fn ext_sequence_analysis(mu: &MixedMeasure, members: &[FamilyMember], p: &FamilyMember) -> Result<ExtReport> {
    let f = minimal_dominated_face(mu, Dominated::Member(p))?;
    let contained: Vec<bool> = members.iter().map(|q| f.is_subface_of(&q.face)).collect();
    if let Some(false) = contained.last() {
        return Err(Error::FaceContainmentViolated(members.len()));
    }
    let conditioned: Option<Vec<RatVec>> = members
        .iter()
        .zip(&contained)
        .filter(|(_, c)| **c)
        .map(|(q, _)| condition(q, &f).ok().and_then(|c| c.exact_theta().cloned()))
        .collect();
    let conditioned = match conditioned {
        Some(seq) if seq.len() >= MIN_LEN => Some(classify_sequence(&f.restricted, &seq, false)?),
        _ => None,
    };
    let profile = integrability(p, DIAG_EPS)?;
    let theta = p.exact_theta();
    let mut div = Vec::with_capacity(members.len());
    let mut finite_predicted = Vec::with_capacity(members.len());
    for q in members {
        div.push(divergence(p, q, DIAG_EPS).ok());
        finite_predicted.push(match (theta, q.exact_theta()) {
            (Some(t), Some(s)) if f.is_subface_of(&q.face) => Some(profile.contains(&s.sub(t))),
            (_, _) if !f.is_subface_of(&q.face) => Some(false),
            _ => None,
        });
    }
    Ok(ExtReport {
        face_chain: f.chain.clone(),
        face_dim: f.dim(),
        contained,
        conditioned,
        divergence: div,
        finite_predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rat::{int, rat};
    use crate::faces::verify_access_sequence;

    fn seg() -> MixedMeasure {
        MixedMeasure::finite(&[RatVec::from_ints(&[0]), RatVec::from_ints(&[1])]).validate().unwrap()
    }

    fn tri() -> MixedMeasure {
        MixedMeasure::finite(&[RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[2, 0]), RatVec::from_ints(&[0, 2])])
            .validate()
            .unwrap()
    }

    #[test]
    fn triangle_to_vertex() {
        let mu = tri();
        let params: Vec<RatVec> = (1..=50).map(|n| RatVec::from_ints(&[n, -n])).collect();
        let r = classify_sequence(&mu, &params, true).unwrap();
        let Alternative::Boundary { direction, limit, face_dim } = &r.alternative else { panic!("{r:?}") };
        assert_eq!(direction, &RatVec::from_ints(&[1, -1]));
        assert_eq!(*face_dim, 0);
        let m = limit_to_member(&mu, limit).unwrap();
        assert_eq!(m.measure().atoms[0].point, RatVec::from_ints(&[2, 0]));
        // closed form: 1 - softmax weight of (2,0) at n = 50
        let v = r.diagnostics.variation.last().unwrap().unwrap();
        let exact = 2.0 * (1.0 + (-100f64).exp()) / ((100f64).exp() + 1.0 + (-100f64).exp());
        assert!(v.hi < 1e-6 && (v.mid() - exact).abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn segment_alternatives() {
        let mu = seg();
        let down: Vec<RatVec> = (1..=30).map(|n| RatVec::from_ints(&[-n])).collect();
        let r = classify_sequence(&mu, &down, false).unwrap();
        let Alternative::Boundary { limit, .. } = &r.alternative else { panic!("{r:?}") };
        assert_eq!(limit_to_member(&mu, limit).unwrap().measure().atoms[0].point, RatVec::zeros(1));

        let inner: Vec<RatVec> = (1..=30).map(|n| RatVec(vec![rat(1, n)])).collect();
        let r = classify_sequence(&mu, &inner, true).unwrap();
        let Alternative::Interior { limit, lambda_limit } = &r.alternative else { panic!("{r:?}") };
        assert_eq!(limit, &RatVec::zeros(1));
        assert!(lambda_limit.contains(2f64.ln()));
        let d = r.diagnostics.divergence.last().unwrap().unwrap().finite().unwrap();
        assert!(d.hi < 1e-3);
    }

    #[test]
    fn edge_limit_and_undetermined() {
        let mu = tri();
        // n(1,1) plus a vanishing wobble along the edge
        let params: Vec<RatVec> = (1..=40)
            .map(|n| RatVec(vec![int(n) + rat(1, n), int(n) - rat(1, n)]))
            .collect();
        let r = classify_sequence(&mu, &params, false).unwrap();
        let Alternative::Boundary { limit, face_dim, .. } = &r.alternative else { panic!("{r:?}") };
        assert_eq!(*face_dim, 1);
        assert!(limit.theta.is_zero());
        let wobble: Vec<RatVec> = (1..=40).map(|n| RatVec::from_ints(&[if n % 2 == 0 { 1 } else { -1 }, 0])).collect();
        assert!(matches!(classify_sequence(&mu, &wobble, false).unwrap().alternative, Alternative::Undetermined { .. }));
    }

    #[test]
    fn ext_sequences() {
        let mu = tri();
        let edge = verify_access_sequence(&mu, &[RatVec::from_ints(&[1, 1])]).unwrap();
        let p = FamilyMember::new(edge.clone(), Tilt::exact(&RatVec::zeros(2))).unwrap();
        let qs: Vec<FamilyMember> = (1..=20)
            .map(|n| FamilyMember::new(edge.clone(), Tilt::exact(&RatVec(vec![rat(1, n), rat(-1, n)]))).unwrap())
            .collect();
        let r = ext_sequence_analysis(&mu, &qs, &p).unwrap();
        assert!(r.contained.iter().all(|c| *c));
        assert!(matches!(r.conditioned.as_ref().unwrap().alternative, Alternative::Interior { .. }));
        let last = r.divergence.last().unwrap().unwrap().finite().unwrap();
        assert!(last.hi < 1e-2);
        assert!(r.finite_predicted.iter().all(|x| *x == Some(true)));

        let tops: Vec<FamilyMember> = (1..=20).map(|n| FamilyMember::top(&mu, &RatVec::from_ints(&[n, n])).unwrap()).collect();
        let r = ext_sequence_analysis(&mu, &tops, &p).unwrap();
        assert_eq!(r.face_dim, 1);
        let d: Vec<Interval> = r.divergence.iter().map(|x| x.unwrap().finite().unwrap()).collect();
        // D = ln(1 + e^{-2n}/2)
        for (n, v) in d.iter().enumerate().take(8) {
            assert!(v.contains((0.5 * (-2.0 * (n as f64 + 1.0)).exp()).ln_1p()), "{n} {v:?}");
        }
        assert!(d[..8].windows(2).all(|w| w[1].hi < w[0].lo) && d[19].hi < 1e-10);

        let vertex = verify_access_sequence(&mu, &[RatVec::from_ints(&[1, -1])]).unwrap();
        let dv = FamilyMember::new(vertex, Tilt::exact(&RatVec::zeros(2))).unwrap();
        let r = ext_sequence_analysis(&mu, &vec![dv.clone(); 5], &dv).unwrap();
        assert_eq!(r.face_dim, 0);
        assert!(r.divergence.iter().all(|x| *x == Some(Extended::Finite(Interval::ZERO))));
        assert_eq!(ext_sequence_analysis(&mu, &vec![dv; 3], &p).unwrap_err(), Error::FaceContainmentViolated(3));
    }
}

//! Seeded randomized checks behind `efc verify`.
//!
//! Each suite draws its samples from one ChaCha generator and compares the
//! engine against an independent computation or a structural property. The
//! divergence suite carries its own plain `f64` series evaluation.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::poly::HPolyhedron;
use crate::exactgeom::rat::{rat_to_f64, Rat, RatVec};
use crate::expfam::divergence::{divergence, ln_face_mass, variation_distance, Extended};
use crate::expfam::domain::domain;
use crate::expfam::eval::{Moment, Tilt};
use crate::expfam::member::{condition, directional_derivative, log_partition, FamilyMember};
use crate::expfam::param::ParamSet;
use crate::faces::{enumerate_faces, expose, FaceHandle};
use crate::measure::{convex_support, MixedMeasure};

use super::classify::{classify_sequence, Alternative};
use super::inequalities::{inequality_suite, pinsker_check, rho, BoundProbe, Check};
use super::neat::witness_sequence;
use super::verdict::variation_closure;

pub const SUITES: [&str; 6] = ["pinsker", "lemma4", "lemma5", "inequalities", "corollary1", "theorem2"];

const FD_STEP: (i64, i64) = (1, 10_000);
const FD_REL_TOL: f64 = 1e-5;
const DETECT: f64 = 1e-6;
const WITNESS_EPS: f64 = 1e-4;
const WITNESS_LEN: usize = 60;
const COMPLETENESS_SAMPLES: usize = 20;
const SEQ_LEN: usize = 40;
const MAX_FAILURES: usize = 10;

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub precision: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { trials: 50, seed: 7, precision: 1e-9 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub precision: f64,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub max_error: Option<f64>,
    pub counts: BTreeMap<String, usize>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, cfg: &SuiteConfig) -> Self {
        SuiteReport {
            suite: suite.into(),
            trials: cfg.trials,
            seed: cfg.seed,
            precision: cfg.precision,
            passed: 0,
            failed: 0,
            skipped: 0,
            max_error: None,
            counts: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn error(&mut self, e: f64) {
        self.max_error = Some(self.max_error.map_or(e, |m| m.max(e)));
    }

    fn bump(&mut self, key: &str) {
        *self.counts.entry(key.into()).or_default() += 1;
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

/// Runs a named suite. `theorem2` needs a parameter set; `inequalities`
/// takes an optional probe and picks one otherwise.
pub fn run_suite(
    name: &str,
    mu: &MixedMeasure,
    xi: Option<&ParamSet>,
    probe: Option<&BoundProbe>,
    cfg: &SuiteConfig,
) -> Result<SuiteReport> {
    match name {
        "lemma4" => lemma4_suite(mu, cfg),
        "lemma5" => lemma5_suite(mu, cfg),
        "pinsker" => pinsker_suite(mu, cfg),
        "corollary1" => corollary1_suite(mu, cfg),
        "theorem2" => {
            let owned;
            let xi = match xi {
                Some(x) => x,
                None => {
                    owned = ParamSet::theta(mu)?;
                    &owned
                }
            };
            theorem2_suite(mu, xi, cfg)
        }
        "inequalities" => {
            let probe = match probe {
                Some(p) => p.clone(),
                None => default_probe(mu)?,
            };
            let rep = inequality_suite(mu, &probe, cfg.trials, cfg.seed)?;
            let mut out = SuiteReport::new(name, cfg);
            let all = rep
                .samples
                .iter()
                .flat_map(|s| [s.pointwise, s.mean_bound])
                .chain(rep.corollary.iter().map(|c| c.check))
                .chain(rep.pinsker.iter().map(|c| c.check));
            for (i, c) in all.enumerate() {
                out.record(c == Check::Holds, || format!("check {i}: {c:?}"));
            }
            Ok(out)
        }
        other => Err(Error::InvalidInput(format!("unknown suite '{other}'"))),
    }
}

/// A probe at the interior point of the support with `s` a quarter of
/// `rho(a)` and `r = s/2`.
pub fn default_probe(mu: &MixedMeasure) -> Result<BoundProbe> {
    let cs = convex_support(mu)?.polyhedron()?.canonical()?;
    let a = cs.ri_query()?.point;
    let rho = rho(mu, &a)?;
    let cap = if rho.lo.is_finite() { rho.lo / 4.0 } else { 1.0 };
    let s = Rat::new(((cap * 1000.0).floor() as i64).max(1).into(), 1000.into());
    let r = &s / Rat::from_integer(2.into());
    Ok(BoundProbe { a, s, r })
}

fn rand_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rat {
    Rat::new(rng.gen_range(lo * den..=hi * den).into(), den.into())
}

/// A random point of `p` from its generators.
fn sample_closed(p: &HPolyhedron, rng: &mut ChaCha8Rng) -> Result<RatVec> {
    let g = p.generators()?;
    let mut x = RatVec::zeros(p.dim);
    if !g.points.is_empty() {
        let ws: Vec<i64> = g.points.iter().map(|_| rng.gen_range(1..=8)).collect();
        let total = Rat::from_integer(ws.iter().sum::<i64>().into());
        for (w, q) in ws.iter().zip(&g.points) {
            x = x.axpy(&(Rat::from_integer((*w).into()) / &total), q);
        }
    }
    for r in &g.rays {
        x = x.axpy(&rand_rat(rng, 0, 3, 4), r);
    }
    for l in &g.lines {
        x = x.axpy(&rand_rat(rng, -3, 3, 4), l);
    }
    Ok(x)
}

/// A random point of `ri(p)`: a point of `p` averaged with an interior one.
fn sample_ri(p: &HPolyhedron, rng: &mut ChaCha8Rng) -> Result<RatVec> {
    let ri = p.ri_query()?.point;
    Ok(sample_closed(p, rng)?.add(&ri).scale(&Rat::new(1.into(), 2.into())))
}

/// A nonzero direction in the span of `basis`, scaled to max-norm 1.
fn sample_direction(basis: &[RatVec], d: usize, rng: &mut ChaCha8Rng) -> Option<RatVec> {
    if basis.is_empty() {
        return None;
    }
    for _ in 0..32 {
        let v = basis.iter().fold(RatVec::zeros(d), |acc, b| acc.axpy(&rand_rat(rng, -4, 4, 1), b));
        let m = v.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero);
        if !m.is_zero() {
            return Some(v.scale(&m.recip()));
        }
    }
    None
}

fn in_dom(mu: &MixedMeasure, v: &RatVec) -> Result<bool> {
    domain(mu).contains(&Tilt::exact(v))
}

/// Faces to draw members from: all of them when enumerable, the accessible
/// ones otherwise.
fn sample_faces(mu: &MixedMeasure) -> Result<Vec<FaceHandle>> {
    match enumerate_faces(mu) {
        Ok(f) => Ok(f),
        Err(Error::Unsupported(_)) => Ok(chain_faces(mu)),
        Err(e) => Err(e),
    }
}

/// Faces reached by chains of directions with entries in {-1, 0, 1}; the
/// known part of the lattice when it cannot be enumerated.
fn chain_faces(mu: &MixedMeasure) -> Vec<FaceHandle> {
    let d = mu.dim;
    let dirs: Vec<RatVec> = (1..3usize.pow(d as u32))
        .map(|mut c| {
            RatVec(
                (0..d)
                    .map(|_| {
                        let v = (c % 3) as i64 - 1;
                        c /= 3;
                        Rat::from_integer(v.into())
                    })
                    .collect(),
            )
        })
        .filter(|v| !v.is_zero())
        .collect();
    let mut found = vec![FaceHandle::top(mu)];
    let mut i = 0;
    while i < found.len() {
        let f = found[i].clone();
        for tau in &dirs {
            if let Ok(g) = expose(&f, tau) {
                if !found.iter().any(|h| h.same_face(&g)) {
                    found.push(g);
                }
            }
        }
        i += 1;
    }
    found
}

fn face_member(face: &FaceHandle, rng: &mut ChaCha8Rng) -> Result<FamilyMember> {
    let theta_f = ParamSet::theta(&face.restricted)?;
    for _ in 0..16 {
        let t = sample_ri(&theta_f.closure, rng)?;
        if let Ok(m) = FamilyMember::new(face.clone(), Tilt::exact(&t)) {
            return Ok(m);
        }
    }
    Err(Error::InvalidInput("could not sample a face parameter".into()))
}

fn lemma4_suite(mu: &MixedMeasure, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("lemma4", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta = ParamSet::theta(mu)?;
    let h = Rat::new(FD_STEP.0.into(), FD_STEP.1.into());
    let hf = rat_to_f64(&h);
    let basis = mu.lin().basis;
    for _ in 0..cfg.trials {
        let t = sample_ri(&theta.closure, &mut rng)?;
        let Some(tau) = sample_direction(&basis, mu.dim, &mut rng) else {
            out.skipped += 1;
            continue;
        };
        let (up, down) = (t.axpy(&h, &tau), t.axpy(&-h.clone(), &tau));
        if !in_dom(mu, &up)? || !in_dom(mu, &down)? {
            out.skipped += 1;
            continue;
        }
        let m = match directional_derivative(mu, &Tilt::exact(&t), &tau, cfg.precision)? {
            Moment::Finite(m) => m.mid(),
            other => {
                out.record(false, || format!("theta {t:?}: derivative {other:?}"));
                continue;
            }
        };
        // an error e in each value moves the difference by e/h
        let lam_eps = 1e-12;
        let lu = log_partition(mu, &Tilt::exact(&up), lam_eps)?.mid();
        let ld = log_partition(mu, &Tilt::exact(&down), lam_eps)?.mid();
        let fd = (lu - ld) / (2.0 * hf);
        let rel = (fd - m).abs() / m.abs().max(1.0);
        out.error(rel);
        out.record(rel <= FD_REL_TOL, || format!("theta {t:?} tau {tau:?}: derivative {m} vs difference {fd}"));
    }
    Ok(out)
}

/// Atoms of a measure with log-weights, in `f64`, enumerating families
/// until every listed parameter gives negligible terms.
fn brute_atoms(mu: &MixedMeasure, params: &[Vec<f64>]) -> Vec<(Vec<f64>, f64)> {
    let to_f = |v: &RatVec| v.iter().map(rat_to_f64).collect::<Vec<f64>>();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut out: Vec<(Vec<f64>, f64)> = mu.atoms.iter().map(|a| (to_f(&a.point), a.weight.ln().mid())).collect();
    for f in &mu.families {
        let (base, lin, quad) = (to_f(&f.base), to_f(&f.lin), to_f(&f.quad));
        let (ln_c, ln_rho, alpha) = (rat_to_f64(&f.scale).ln(), rat_to_f64(&f.rho).ln(), rat_to_f64(&f.alpha));
        let mut peak = vec![f64::NEG_INFINITY; params.len()];
        let mut prev = vec![f64::NEG_INFINITY; params.len()];
        for k in 1..=2_000_000u64 {
            let kf = k as f64;
            let x: Vec<f64> = (0..base.len()).map(|i| base[i] + kf * lin[i] + kf * kf * quad[i]).collect();
            let lw = ln_c + kf * ln_rho - alpha * kf.ln();
            let mut done = true;
            for (j, p) in params.iter().enumerate() {
                let term = lw + dot(p, &x);
                peak[j] = peak[j].max(term);
                if !(term < peak[j] - 60.0 && term < prev[j]) {
                    done = false;
                }
                prev[j] = term;
            }
            out.push((x, lw));
            if done {
                break;
            }
        }
    }
    out
}

fn ln_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `D(P || Q)` summed directly over the atoms of `P`.
fn brute_divergence(p_atoms: &[(Vec<f64>, f64)], q_atoms: &[(Vec<f64>, f64)], tp: &[f64], tq: &[f64]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let lp = ln_sum_exp(p_atoms.iter().map(|(x, w)| w + dot(tp, x)));
    let lq = ln_sum_exp(q_atoms.iter().map(|(x, w)| w + dot(tq, x)));
    p_atoms
        .iter()
        .map(|(x, w)| {
            let lnp = w + dot(tp, x) - lp;
            lnp.exp() * (dot(tp, x) - lp - dot(tq, x) + lq)
        })
        .sum()
}

fn lemma5_suite(mu: &MixedMeasure, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("lemma5", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta = ParamSet::theta(mu)?;
    let faces = sample_faces(mu)?;
    let tol = 4.0 * cfg.precision;
    for _ in 0..cfg.trials {
        let face = faces[rng.gen_range(0..faces.len())].clone();
        let p = face_member(&face, &mut rng)?;
        let q = FamilyMember::top(mu, &sample_ri(&theta.closure, &mut rng)?)?;
        let (tp, tq) = (p.exact_theta().expect("exact").clone(), q.exact_theta().expect("exact").clone());
        let (fp, fq): (Vec<f64>, Vec<f64>) = (tp.iter().map(rat_to_f64).collect(), tq.iter().map(rat_to_f64).collect());
        let q_atoms = brute_atoms(mu, &[fp.clone(), fq.clone()]);
        let p_atoms = brute_atoms(&face.restricted, &[fp.clone(), fq.clone()]);
        let brute = brute_divergence(&p_atoms, &q_atoms, &fp, &fq);
        let formula = match divergence(&p, &q, cfg.precision)? {
            Extended::Finite(v) => v,
            Extended::PosInf => {
                out.record(false, || format!("infinite divergence for interior pair {tp:?} {tq:?}"));
                continue;
            }
        };
        let err = (formula.lo - brute).max(brute - formula.hi).max(0.0);
        out.error(err);
        let mut ok = err <= tol;
        if !face.is_top() {
            out.bump("identity_checked");
            let inner = divergence(&p, &condition(&q, &face)?, cfg.precision)?.finite();
            let lm = ln_face_mass(&q, &face.flat, cfg.precision)?;
            if let Some(inner) = inner {
                let residual = (brute - (inner.mid() - lm.mid())).abs();
                out.error(residual);
                ok &= residual <= tol;
            }
        }
        out.record(ok, || format!("P {tp:?} on face of dim {} vs Q {tq:?}: formula {formula:?} series {brute}", face.dim()));
    }
    Ok(out)
}

fn pinsker_suite(mu: &MixedMeasure, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("pinsker", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta = ParamSet::theta(mu)?;
    let faces = sample_faces(mu)?;
    for _ in 0..cfg.trials {
        let face = faces[rng.gen_range(0..faces.len())].clone();
        let p = face_member(&face, &mut rng)?;
        let q = FamilyMember::top(mu, &sample_ri(&theta.closure, &mut rng)?)?;
        let c = pinsker_check(&p, &q)?;
        out.record(c.check == Check::Holds, || format!("{c:?}"));
    }
    Ok(out)
}

fn corollary1_suite(mu: &MixedMeasure, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("corollary1", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta = ParamSet::theta(mu)?;
    let basis = mu.lin().basis;
    let eps = cfg.precision;
    for _ in 0..cfg.trials {
        let t = sample_ri(&theta.closure, &mut rng)?;
        let Some(v) = sample_direction(&basis, mu.dim, &mut rng) else {
            out.skipped += 1;
            continue;
        };
        let v = v.scale(&Rat::new(1.into(), 8.into()));
        let seq: Vec<RatVec> = (1..=SEQ_LEN).map(|n| t.axpy(&Rat::new(1.into(), (n as i64).into()), &v)).collect();
        if !seq.iter().all(|s| in_dom(mu, s).unwrap_or(false)) {
            out.skipped += 1;
            continue;
        }
        let target = FamilyMember::top(mu, &t)?;
        let lam = target.log_partition(eps)?.mid();
        let mut var = Vec::new();
        let mut gap = Vec::new();
        for n in [1, 10, SEQ_LEN] {
            let q = FamilyMember::top(mu, &seq[n - 1])?;
            var.push(variation_distance(&q, &target, eps)?.mid());
            gap.push((q.log_partition(eps)?.mid() - lam).abs());
        }
        let limit_ok = matches!(
            classify_sequence(mu, &seq, false)?.alternative,
            Alternative::Interior { ref limit, .. } if *limit == t
        );
        let var_ok = var[2] < var[1] && var[1] < var[0] && var[2] < var[0] / 10.0;
        let gap_ok = gap[2] <= gap[0] && gap[2] < 1e-1 * gap[0].max(eps);
        // a sequence parked away from t converges to something else
        let parked = vec![t.add(&v); SEQ_LEN];
        let control_ok = match classify_sequence(mu, &parked, false)?.alternative {
            Alternative::Interior { limit, .. } => {
                limit != t && variation_distance(&FamilyMember::top(mu, &limit)?, &target, eps)?.lo > 0.0
            }
            _ => false,
        };
        out.record(limit_ok && var_ok && gap_ok && control_ok, || {
            format!("theta {t:?} v {v:?}: limit {limit_ok} variation {var:?} lambda {gap:?} control {control_ok}")
        });
    }
    Ok(out)
}

/// Soundness on random sequences in `Xi`, then completeness through
/// witness sequences for sampled members of the computed closure.
fn theorem2_suite(mu: &MixedMeasure, xi: &ParamSet, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("theorem2", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let closure = variation_closure(mu, xi)?;
    let rec = xi.recession()?.generators()?;
    let in_closure = |m: &FamilyMember| {
        let t = m.exact_theta().expect("exact limit");
        closure.iter().any(|c| c.face.same_face(&m.face) && c.parameters.iter().any(|p| p.contains(t)))
    };
    for _ in 0..cfg.trials {
        // half the runs start on the relative boundary of cl(Xi) and creep in
        let on_edge = rng.gen_bool(0.5);
        let ri = xi.closure.ri_query()?.point;
        let base = if on_edge { sample_closed(&xi.closure, &mut rng)? } else { sample_ri(&xi.closure, &mut rng)? };
        let mut dir = RatVec::zeros(mu.dim);
        if rng.gen_bool(0.5) {
            for r in &rec.rays {
                dir = dir.axpy(&rand_rat(&mut rng, 0, 2, 1), r);
            }
            for l in &rec.lines {
                dir = dir.axpy(&rand_rat(&mut rng, -2, 2, 1), l);
            }
            let m = dir.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero);
            if !m.is_zero() {
                dir = dir.scale(&(Rat::from_integer(rng.gen_range(1..=2).into()) / m));
            }
        }
        // amplitudes: visible to detection at n = 40 or not
        let amp = Rat::new(1.into(), [100_000i64, 100][rng.gen_range(0..2)].into());
        let wobble = if on_edge {
            ri.sub(&base)
        } else {
            sample_direction(&mu.lin().basis, mu.dim, &mut rng).unwrap_or_else(|| RatVec::zeros(mu.dim))
        };
        let wobble = wobble.scale(&amp);
        let mut seq: Vec<RatVec> = (1..=SEQ_LEN)
            .map(|n| base.axpy(&Rat::from_integer(n.into()), &dir).axpy(&Rat::new(1.into(), (n as i64).into()), &wobble))
            .collect();
        if !seq.iter().all(|s| xi.contains(s)) {
            if on_edge {
                out.skipped += 1;
                continue;
            }
            seq = (1..=SEQ_LEN).map(|n| base.axpy(&Rat::from_integer(n.into()), &dir)).collect();
        }
        let report = classify_sequence(mu, &seq, false)?;
        let Some(limit) = report.limit_member(mu)? else {
            out.bump("undetermined");
            out.record(true, String::new);
            continue;
        };
        let last = FamilyMember::top(mu, seq.last().expect("nonempty"))?;
        let v = variation_distance(&last, &limit, 1e-10)?;
        if v.hi >= DETECT {
            out.bump("not_detected");
            out.record(true, String::new);
            continue;
        }
        out.bump(if matches!(report.alternative, Alternative::Boundary { .. }) { "boundary_limits" } else { "interior_limits" });
        out.record(in_closure(&limit), || format!("limit on face {:?} at {:?} missing from the closure", limit.face.chain, limit.theta.describe()));
    }
    for i in 0..COMPLETENESS_SAMPLES {
        let comp = &closure[i % closure.len()];
        let piece = &comp.parameters[rng.gen_range(0..comp.parameters.len())];
        let mut member = None;
        for _ in 0..16 {
            let t = sample_ri(&piece.closed(), &mut rng)?;
            let t = if piece.contains(&t) { t } else { piece.ri_query()?.point };
            if let Ok(m) = FamilyMember::new(comp.face.clone(), Tilt::exact(&t)) {
                member = Some(m);
                break;
            }
        }
        let Some(member) = member else {
            out.skipped += 1;
            continue;
        };
        out.bump("completeness_samples");
        let w = witness_sequence(mu, xi, &member, WITNESS_EPS, WITNESS_LEN)?;
        if w.reached {
            out.bump("completeness_reached");
        }
        out.record(w.reached, || {
            format!("witness for face {:?} at {:?} stalled at {:?}", comp.face.chain, member.theta.describe(), w.entries.last().map(|e| e.distance))
        });
    }
    Ok(out)
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Library results are compared against oracles computed here from scratch:
//! plain f64 series for log-partition functions, divergences, variation
//! distances and face masses, brute-force exposure for face lattices, and
//! closed forms where they exist.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use efc_core::cli::execute;
use efc_core::closures::{
    classify_sequence, ext_sequence_analysis, in_i_closure, inequality_suite, neat_sequence, pinsker_check, run_suite,
    witness_sequence, Alternative, BoundProbe, Check, SuiteConfig,
};
use efc_core::exactgeom::lattice::face_lattice;
use efc_core::exactgeom::poly::{HPolyhedron, Inequality};
use efc_core::exactgeom::rat::{int, rat, rat_to_f64, Rat, RatVec};
use efc_core::expfam::divergence::{divergence, ln_face_mass, variation_distance, Extended};
use efc_core::expfam::eval::{Moment, Tilt};
use efc_core::expfam::member::{condition, directional_derivative, FamilyMember};
use efc_core::expfam::param::ParamSet;
use efc_core::faces::{enumerate_faces, verify_access_sequence, FaceHandle};
use efc_core::fixtures;
use efc_core::measure::MixedMeasure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T>(r: efc_core::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

// ---------------------------------------------------------------------------
// f64 oracles

const K_MAX: u64 = 200_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(x, ln w(x) + <theta, x>)` over the atoms, families truncated once the
/// terms are negligible and falling.
fn terms(mu: &MixedMeasure, theta: &[f64]) -> Vec<(Vec<f64>, f64)> {
    terms_to(mu, theta, 0)
}

/// As `terms`, with every family enumerated at least up to `min_k`.
fn terms_to(mu: &MixedMeasure, theta: &[f64], min_k: u64) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::new();
    for a in &mu.atoms {
        let p = a.point.to_f64();
        let lw = match a.weight.as_rational() {
            Some(q) => rat_to_f64(&q).ln(),
            None => a.weight.ln().mid(),
        };
        let t = lw + dot(theta, &p);
        out.push((p, t));
    }
    for f in &mu.families {
        let (b, l, q) = (f.base.to_f64(), f.lin.to_f64(), f.quad.to_f64());
        let (ls, lr, al) = (rat_to_f64(&f.scale).ln(), rat_to_f64(&f.rho).ln(), rat_to_f64(&f.alpha));
        let (mut peak, mut prev) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for k in 1..=K_MAX {
            let kf = k as f64;
            let x: Vec<f64> = (0..b.len()).map(|i| b[i] + kf * l[i] + kf * kf * q[i]).collect();
            let t = ls + kf * lr - al * kf.ln() + dot(theta, &x);
            out.push((x, t));
            peak = peak.max(t);
            if k > 4.max(min_k) && t < peak - 60.0 && t < prev {
                break;
            }
            assert!(k < K_MAX, "oracle series does not decay");
            prev = t;
        }
    }
    out
}

fn lse(ts: &[(Vec<f64>, f64)]) -> f64 {
    let m = ts.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    m + ts.iter().map(|t| (t.1 - m).exp()).sum::<f64>().ln()
}

fn brute_lambda(mu: &MixedMeasure, theta: &[f64]) -> f64 {
    lse(&terms(mu, theta))
}

fn key(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v * 4096.0).round() as i64).collect()
}

/// Points and log-probabilities of a member.
struct Pmf {
    theta: Vec<f64>,
    lz: f64,
    pts: Vec<(Vec<f64>, f64)>,
}

impl Pmf {
    fn of(m: &FamilyMember) -> Pmf {
        Pmf::covering(m, 0)
    }

    /// Enumerated far enough to contain every point `other` lists.
    fn covering(m: &FamilyMember, min_k: u64) -> Pmf {
        let theta = m.exact_theta().expect("rational parameter").to_f64();
        let ts = terms_to(m.measure(), &theta, min_k);
        let lz = lse(&ts);
        Pmf { theta, lz, pts: ts.into_iter().map(|(x, t)| (x, t - lz)).collect() }
    }

    fn map(&self) -> HashMap<Vec<i64>, f64> {
        self.pts.iter().map(|(x, lp)| (key(x), lp.exp())).collect()
    }
}

/// `D(P || Q)`, or `None` when `P` charges a point `Q` misses.
fn brute_divergence(p: &Pmf, q: &Pmf) -> Option<f64> {
    let qm = q.map();
    if p.pts.iter().any(|(x, lp)| lp.exp() > 1e-12 && !qm.contains_key(&key(x))) {
        return None;
    }
    let d: Vec<f64> = p.theta.iter().zip(&q.theta).map(|(a, b)| a - b).collect();
    Some(p.pts.iter().map(|(x, lp)| lp.exp() * dot(&d, x)).sum::<f64>() - p.lz + q.lz)
}

/// `sum |p - q|`.
fn brute_variation(p: &Pmf, q: &Pmf) -> f64 {
    let (pm, qm) = (p.map(), q.map());
    let mut v: f64 = qm.iter().map(|(k, qv)| (pm.get(k).copied().unwrap_or(0.0) - qv).abs()).sum();
    v += pm.iter().filter(|(k, _)| !qm.contains_key(*k)).map(|(_, pv)| pv).sum::<f64>();
    v
}

/// Every family of `mu` decays geometrically under `theta` (so moments and
/// the brute series converge fast).
fn strictly_decaying(mu: &MixedMeasure, theta: &RatVec) -> bool {
    mu.families.iter().all(|f| {
        let q = theta.dot(&f.quad);
        if q < int(0) {
            return true;
        }
        if q > int(0) {
            return false;
        }
        rat_to_f64(&theta.dot(&f.lin)) + rat_to_f64(&f.rho).ln() < -0.1
    })
}

// ---------------------------------------------------------------------------
// sampling

fn rr(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rat {
    rat(rng.gen_range(lo * den..=hi * den), den)
}

fn rvec(rng: &mut ChaCha8Rng, d: usize, lo: i64, hi: i64, den: i64) -> RatVec {
    RatVec((0..d).map(|_| rr(rng, lo, hi, den)).collect())
}

/// All faces, or for curve measures the faces reached by known chains.
fn faces_of(mu: &MixedMeasure) -> Result<Vec<FaceHandle>, String> {
    if !mu.has_curves() {
        return ok(enumerate_faces(mu), "enumerate");
    }
    let chains: [&[[i64; 3]]; 4] = [&[], &[[0, 0, 1]], &[[0, 0, 1], [1, 0, 0]], &[[0, 0, 1], [-1, 0, 0]]];
    chains
        .iter()
        .map(|c| ok(verify_access_sequence(mu, &c.iter().map(|v| RatVec::from_ints(v)).collect::<Vec<_>>()), "chain"))
        .collect()
}

/// A member on `face` whose families decay strictly.
fn sample_member(face: &FaceHandle, rng: &mut ChaCha8Rng) -> Result<FamilyMember, String> {
    for _ in 0..500 {
        let t = rvec(rng, face.restricted.dim, -3, 3, 16);
        if !strictly_decaying(&face.restricted, &t) {
            continue;
        }
        if let Ok(m) = FamilyMember::new(face.clone(), Tilt::exact(&t)) {
            if strictly_decaying(&face.restricted, m.exact_theta().expect("exact")) {
                return Ok(m);
            }
        }
    }
    Err(format!("no member sampled on face {:?}", face.chain))
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let mut argv = vec!["efc"];
    argv.extend_from_slice(args);
    let (code, out, err) = execute(argv);
    ensure!(code == 0, "efc {args:?} exited {code}: {err}");
    serde_json::from_str(&out).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// criteria

const EX3D_MEMBER: &str = r#"{"chain":[["0","0","1"],["1","0","0"]],"theta":["0","0","0"]}"#;

fn c1_example() -> Outcome {
    let start = Instant::now();
    let r = cli(&["-m", "ex3d", "inspect"])?;
    let want = serde_json::json!([["1*t2 < 0"], ["1*t2 = 0", "1*t1 <= 0"]]);
    ensure!(r["values"]["domain"] == want, "domain {}", r["values"]["domain"]);
    ensure!(r["values"]["theta_equals_domain"] == Value::Bool(true), "Theta differs from the domain");

    // the families are k^-2 e^{t2 k} and 2 k^-3 e^{t1 k + t2 k^2 - t3}
    let mu = fixtures::ex3d();
    let dom = efc_core::expfam::domain::domain(&mu);
    for a in -4..=4 {
        for b in -4..=4 {
            for c in [-1, 0, 2] {
                let t = RatVec::from_rats(&[(a, 2), (b, 3), (c, 1)]);
                let finite = b < 0 || (b == 0 && a <= 0);
                ensure!(ok(dom.contains(&Tilt::exact(&t)), "domain")? == finite, "domain test wrong at {:?}", t.to_f64());
            }
        }
    }

    let chain = r#"[["0","0","1"],["1","0","0"]]"#;
    let r = cli(&["-m", "ex3d", "faces", "--chain", chain])?;
    ensure!(r["decision"]["verified"] == Value::Bool(true), "chain rejected: {}", r["decision"]);
    let r = cli(&["-m", "ex3d", "accessible", "--xi", "theta", "--face", chain])?;
    ensure!(r["decision"]["adapted"] == Value::Bool(true), "not adapted to Theta: {}", r["decision"]);
    let r = cli(&["-m", "ex3d", "accessible", "--xi", "narrowed", "--face", chain])?;
    ensure!(
        r["decision"]["adapted"] == Value::Bool(false) && r["decision"]["failing_step"] == 2,
        "narrowed set: {}",
        r["decision"]
    );
    let r = cli(&["-m", "ex3d", "closure", "--kind", "v", "--member", EX3D_MEMBER])?;
    ensure!(r["decision"]["value"] == Value::Bool(true), "variation closure: {}", r["decision"]);
    let r = cli(&["-m", "ex3d", "closure", "--kind", "ri", "--member", EX3D_MEMBER])?;
    ensure!(r["decision"]["value"] == Value::Bool(false), "rI closure: {}", r["decision"]);
    let r = cli(&["-m", "ex3d", "eval", "--what", "mean", "--member", EX3D_MEMBER])?;
    let basis: Vec<Vec<f64>> = serde_json::from_value::<Vec<Vec<String>>>(r["values"]["m_basis"].clone())
        .map_err(|e| e.to_string())?
        .iter()
        .map(|v| v.iter().map(|s| rat_to_f64(&efc_core::exactgeom::rat::parse_rat(s).unwrap())).collect())
        .collect();
    let spans_e1_e3 = basis.len() == 2
        && basis.iter().all(|v| v[1] == 0.0)
        && (basis[0][0] * basis[1][2] - basis[0][2] * basis[1][0]).abs() > 0.0;
    ensure!(spans_e1_e3, "M(P) basis {basis:?}");
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "took {secs:.2} s");
    Ok(format!("domain, chain, adaptedness, closures and M(P) as expected in {secs:.2} s"))
}

fn c2_closure_oracle() -> Outcome {
    let start = Instant::now();
    let cfg = SuiteConfig { trials: 200, seed: 7, precision: 1e-9 };
    let mut lines = Vec::new();
    for name in ["seg", "tri", "ray"] {
        let mu = ok(fixtures::by_name(name), name)?;
        for (xi_name, xi) in ok(fixtures::param_sets(name, &mu), "parameter sets")? {
            let r = ok(run_suite("theorem2", &mu, Some(&xi), None, &cfg), "theorem2")?;
            let n = |k: &str| r.counts.get(k).copied().unwrap_or(0);
            ensure!(r.all_pass(), "{name}/{xi_name}: {:?}", r.failures);
            ensure!(n("undetermined") == 0, "{name}/{xi_name}: dichotomy broken {} times", n("undetermined"));
            ensure!(n("interior_limits") + n("boundary_limits") > 0, "{name}/{xi_name}: no limit detected");
            ensure!(
                n("completeness_samples") == 20 && n("completeness_reached") == 20,
                "{name}/{xi_name}: completeness {}/{}",
                n("completeness_reached"),
                n("completeness_samples")
            );
            lines.push(format!("{name}/{xi_name} {}i+{}b", n("interior_limits"), n("boundary_limits")));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1} s");
    Ok(format!("{} cases, 20/20 witnesses each [{}] in {secs:.1} s", lines.len(), lines.join(", ")))
}

/// Faces by iterated exposure of a truncated atom set. `fam[i]` is the step
/// of the family atom `i` belongs to, if any.
fn brute_faces(pts: &[Vec<f64>], fam: &[Option<Vec<f64>>], d: usize) -> usize {
    let mut dirs = vec![vec![]];
    for _ in 0..d {
        dirs = dirs.into_iter().flat_map(|v: Vec<f64>| (-4..=4).map(move |c| [v.clone(), vec![c as f64]].concat())).collect();
    }
    let top: BTreeSet<usize> = (0..pts.len()).collect();
    let mut seen = BTreeSet::from([top.clone()]);
    let mut todo = vec![top];
    while let Some(s) = todo.pop() {
        for tau in &dirs {
            if s.iter().any(|&i| fam[i].as_ref().is_some_and(|st| dot(tau, st) > 0.0)) {
                continue;
            }
            let m = s.iter().map(|&i| dot(tau, &pts[i])).fold(f64::NEG_INFINITY, f64::max);
            let f: BTreeSet<usize> = s.iter().copied().filter(|&i| dot(tau, &pts[i]) == m).collect();
            if seen.insert(f.clone()) {
                todo.push(f);
            }
        }
    }
    seen.len()
}

fn truncated(mu: &MixedMeasure, k: u64) -> (Vec<Vec<f64>>, Vec<Option<Vec<f64>>>) {
    let mut pts: Vec<Vec<f64>> = mu.atoms.iter().map(|a| a.point.to_f64()).collect();
    let mut fam = vec![None; pts.len()];
    for f in &mu.families {
        for j in 1..=k {
            pts.push(f.atom(j).to_f64());
            fam.push(Some(f.lin.to_f64()));
        }
    }
    (pts, fam)
}

fn c3_face_counts() -> Outcome {
    let mut got = Vec::new();
    for (name, want) in [("tri", 7), ("ray", 5)] {
        let mu = ok(fixtures::by_name(name), name)?;
        let n = ok(enumerate_faces(&mu), "enumerate")?.len();
        let (pts, fam) = truncated(&mu, 5);
        let oracle = brute_faces(&pts, &fam, mu.dim);
        ensure!(n == want && oracle == want, "{name}: library {n}, oracle {oracle}, expected {want}");
        got.push(format!("{name} {n}"));
    }
    let square = HPolyhedron::new(
        2,
        vec![
            Inequality::new(RatVec::from_ints(&[1, 0]), int(1)),
            Inequality::new(RatVec::from_ints(&[-1, 0]), int(0)),
            Inequality::new(RatVec::from_ints(&[0, 1]), int(1)),
            Inequality::new(RatVec::from_ints(&[0, -1]), int(0)),
        ],
        vec![],
    );
    let n = ok(face_lattice(&square), "face lattice")?.faces.len();
    let corners = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let oracle = brute_faces(&corners, &[None, None, None, None], 2);
    ensure!(n == 9 && oracle == 9, "square: library {n}, oracle {oracle}");
    got.push(format!("square {n}"));
    Ok(got.join(", "))
}

/// Parameters inside the domain with room for a finite difference step.
fn interior_theta(name: &str, rng: &mut ChaCha8Rng) -> RatVec {
    match name {
        "seg" => rvec(rng, 1, -3, 3, 16),
        "ray" => RatVec(vec![rr(rng, -3, 0, 16).min(rat(-1, 4)), rr(rng, -3, 3, 16)]),
        "ex3d" => RatVec(vec![rr(rng, -3, 3, 16), rr(rng, -2, 0, 16).min(rat(-1, 4)), rr(rng, -3, 3, 16)]),
        _ => rvec(rng, 2, -3, 3, 16),
    }
}

fn c4_derivatives() -> Outcome {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for name in fixtures::NAMES {
        let mu = ok(fixtures::by_name(name), name)?;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let theta = interior_theta(name, &mut rng);
            let tau = loop {
                let t = rvec(&mut rng, mu.dim, -2, 2, 1);
                if !t.is_zero() {
                    break t;
                }
            };
            let m = match ok(directional_derivative(&mu, &Tilt::exact(&theta), &tau, 1e-12), "derivative")? {
                Moment::Finite(v) => v.mid(),
                other => return Err(format!("{name}: derivative {other:?} at {:?}", theta.to_f64())),
            };
            let (t, u) = (theta.to_f64(), tau.to_f64());
            let shift = |s: f64| -> Vec<f64> { t.iter().zip(&u).map(|(a, b)| a + s * b).collect() };
            let fd = (brute_lambda(&mu, &shift(h)) - brute_lambda(&mu, &shift(-h))) / (2.0 * h);
            let rel = (m - fd).abs() / fd.abs().max(1.0);
            worst = worst.max(rel);
            ensure!(rel <= 1e-5, "{name}: derivative {m} vs difference quotient {fd} at {t:?} along {u:?}");
        }
    }
    Ok(format!("250 samples, worst relative error {worst:.1e}"))
}

/// Face pairs `(P face, Q face)`; a tenth of them with `P` off `Q`'s face.
fn sample_pair(faces: &[FaceHandle], rng: &mut ChaCha8Rng) -> Result<(FamilyMember, FamilyMember), String> {
    let fq = &faces[rng.gen_range(0..faces.len())];
    let inside: Vec<&FaceHandle> = faces.iter().filter(|f| f.is_subface_of(fq)).collect();
    let fp = if rng.gen_bool(0.9) { inside[rng.gen_range(0..inside.len())] } else { &faces[rng.gen_range(0..faces.len())] };
    Ok((sample_member(fp, rng)?, sample_member(fq, rng)?))
}

fn c5_divergence() -> Outcome {
    let tol = 4e-9;
    let (mut finite, mut infinite, mut worst, mut worst_res) = (0, 0, 0f64, 0f64);
    for name in fixtures::NAMES {
        let mu = ok(fixtures::by_name(name), name)?;
        let faces = faces_of(&mu)?;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (p, q) = sample_pair(&faces, &mut rng)?;
            let bp = Pmf::of(&p);
            let bq = Pmf::covering(&q, bp.pts.len() as u64);
            let lib = ok(divergence(&p, &q, 1e-9), "divergence")?;
            match (lib, brute_divergence(&bp, &bq)) {
                (Extended::PosInf, None) => infinite += 1,
                (Extended::Finite(v), Some(b)) => {
                    let err = (v.mid() - b).abs();
                    worst = worst.max(err);
                    ensure!(err <= tol, "{name}: D = {v:?} vs series {b} (faces {:?} / {:?})", p.face.chain, q.face.chain);
                    let qc = ok(condition(&q, &p.face), "condition")?;
                    let inner = ok(divergence(&p, &qc, 1e-9), "conditioned divergence")?;
                    let inner = inner.finite().ok_or("conditioned divergence infinite")?;
                    let lm = ok(ln_face_mass(&q, &p.face.flat, 1e-9), "face mass")?;
                    let res = (b - (inner.mid() - lm.mid())).abs();
                    worst_res = worst_res.max(res);
                    ensure!(res <= tol, "{name}: identity residual {res:e}");
                    finite += 1;
                }
                (l, b) => return Err(format!("{name}: library {l:?}, series {b:?}")),
            }
        }
    }
    Ok(format!("{finite} finite (max error {worst:.1e}, max residual {worst_res:.1e}), {infinite} infinite"))
}

fn c6_pinsker() -> Outcome {
    let mut n = 0;
    for name in fixtures::NAMES {
        let mu = ok(fixtures::by_name(name), name)?;
        let faces = faces_of(&mu)?;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let f1 = &faces[rng.gen_range(0..faces.len())];
            let f2 = &faces[rng.gen_range(0..faces.len())];
            let (p, q) = (sample_member(f1, &mut rng)?, sample_member(f2, &mut rng)?);
            let c = ok(pinsker_check(&p, &q), "pinsker")?;
            ensure!(c.check == Check::Holds, "{name}: {:?} on faces {:?} / {:?}", c, p.face.chain, q.face.chain);
            let bp = Pmf::of(&p);
            let bq = Pmf::covering(&q, bp.pts.len() as u64);
            let v = brute_variation(&bp, &bq);
            ensure!((c.variation.mid() - v).abs() <= 1e-6, "{name}: variation {:?} vs {v}", c.variation);
            if let Some(d) = brute_divergence(&bp, &bq) {
                ensure!(v * v <= 2.0 * d + 1e-12, "{name}: oracle sees |P-Q|^2 = {} > 2D = {}", v * v, 2.0 * d);
            }
            n += 1;
        }
    }
    Ok(format!("{n} pairs, zero violations"))
}

fn c7_neat() -> Outcome {
    let seg = fixtures::seg();
    let xi = ok(ParamSet::theta(&seg), "theta")?;
    let face = ok(verify_access_sequence(&seg, &[RatVec::from_ints(&[1])]), "seg chain")?;
    let steps = ok(neat_sequence(&seg, &xi, &face, &RatVec::from_ints(&[0]), 20), "neat")?;
    let delta = ok(FamilyMember::new(face, Tilt::exact(&RatVec::from_ints(&[0]))), "delta_1")?;
    for (j, s) in steps.iter().enumerate() {
        ensure!(s.param == RatVec::from_ints(&[j as i64 + 1]), "step {} is {:?}", j + 1, s.param.to_f64());
    }
    let last = ok(FamilyMember::top(&seg, &steps[19].param), "Q_20")?;
    let d = ok(divergence(&delta, &last, 1e-12), "divergence")?.finite().ok_or("infinite divergence")?;
    let closed = (-20f64).exp().ln_1p();
    ensure!(d.hi <= 1e-6, "D at j = 20 is {d:?}");
    ensure!(d.lo <= closed + 1e-15 && closed <= d.hi + 1e-15, "D {d:?} misses ln(1 + e^-20) = {closed:e}");

    let mu = fixtures::ex3d();
    let xi = ok(ParamSet::theta(&mu), "theta")?;
    let face = ok(verify_access_sequence(&mu, &fixtures::ex3d_chain()), "ex3d chain")?;
    let steps = ok(neat_sequence(&mu, &xi, &face, &RatVec::from_ints(&[0, -1, 0]), 12), "neat")?;
    ensure!(steps.windows(2).all(|w| w[1].ln_mass.lo > w[0].ln_mass.lo), "masses not increasing");
    for s in &steps {
        let ts = terms(&mu, &s.param.to_f64());
        let on_face: Vec<(Vec<f64>, f64)> = ts.iter().filter(|(x, _)| x[0] == 0.0 && x[2] == 0.0).cloned().collect();
        let lm = lse(&on_face) - lse(&ts);
        ensure!(
            s.ln_mass.lo - 1e-9 <= lm && lm <= s.ln_mass.hi + 1e-9,
            "mass {:?} vs series {lm} at {:?}",
            s.ln_mass,
            s.param.to_f64()
        );
    }
    let defect = -steps.last().expect("nonempty").ln_mass.lo.exp_m1();
    ensure!(defect < 1e-3, "mass defect {defect:e} after 12 steps");
    let target = ok(FamilyMember::new(face, Tilt::exact(&RatVec::zeros(3))), "(F, 0)")?;
    let w = ok(witness_sequence(&mu, &xi, &target, 1e-3, 60), "witness")?;
    let dist = w.entries.last().map(|e| e.distance.hi).unwrap_or(f64::INFINITY);
    ensure!(w.reached && dist < 1e-3, "two-level witness stalled at {dist:e}");
    Ok(format!(
        "seg D(j=20) <= {:.1e}; ex3d defect {defect:.1e}; two-level witness at {dist:.1e} after {} steps",
        d.hi,
        w.entries.len()
    ))
}

fn face_atoms(f: &FaceHandle) -> Vec<Vec<f64>> {
    assert!(f.restricted.families.is_empty());
    f.restricted.atoms.iter().map(|a| a.point.to_f64()).collect()
}

fn c8_classifier() -> Outcome {
    let tri = fixtures::tri();
    let seq: Vec<RatVec> = (1..=50).map(|n| RatVec::from_ints(&[n, -n])).collect();
    let r = ok(classify_sequence(&tri, &seq, true), "classify")?;
    ensure!(matches!(r.alternative, Alternative::Boundary { face_dim: 0, .. }), "tri: {:?}", r.alternative);
    let limit = ok(r.limit_member(&tri), "limit")?.ok_or("no limit")?;
    ensure!(face_atoms(&limit.face) == vec![vec![2.0, 0.0]], "limit face {:?}", face_atoms(&limit.face));
    let q50 = ok(FamilyMember::top(&tri, &seq[49]), "Q_50")?;
    let v = ok(variation_distance(&limit, &q50, 1e-9), "variation")?;
    // weights 1, e^{2n}, e^{-2n} on (0,0), (2,0), (0,2)
    let n = 50f64;
    let closed = 2.0 * (1.0 + (-2.0 * n).exp()) / (1.0 + (2.0 * n).exp() + (-2.0 * n).exp());
    ensure!(v.hi < 1e-6 && closed < 1e-6, "distance {v:?}, closed form {closed:e}");
    ensure!(v.lo <= closed && closed <= v.hi + 1e-15, "distance {v:?} misses {closed:e}");

    let seg = fixtures::seg();
    let seq: Vec<RatVec> = (1..=50).map(|n| RatVec::from_rats(&[(1, n)])).collect();
    let r = ok(classify_sequence(&seg, &seq, false), "classify")?;
    match &r.alternative {
        Alternative::Interior { limit, lambda_limit } => {
            ensure!(limit.is_zero(), "interior limit {:?}", limit.to_f64());
            ensure!(lambda_limit.contains(2f64.ln()), "Lambda limit {lambda_limit:?}");
        }
        a => return Err(format!("seg 1/n: {a:?}")),
    }
    let seq: Vec<RatVec> = (1..=50).map(|n| RatVec::from_ints(&[-n])).collect();
    let r = ok(classify_sequence(&seg, &seq, false), "classify")?;
    let limit = ok(r.limit_member(&seg), "limit")?.ok_or("no limit")?;
    ensure!(face_atoms(&limit.face) == vec![vec![0.0]], "seg -n limit face {:?}", face_atoms(&limit.face));

    // the dichotomy over the full oracle runs is checked in criterion 2;
    // here a smaller independent sweep with another seed
    let cfg = SuiteConfig { trials: 60, seed: 8, precision: 1e-9 };
    let mut undetermined = 0;
    for name in ["seg", "tri", "ray"] {
        let mu = ok(fixtures::by_name(name), name)?;
        for (_, xi) in ok(fixtures::param_sets(name, &mu), "parameter sets")? {
            let r = ok(run_suite("theorem2", &mu, Some(&xi), None, &cfg), "theorem2")?;
            undetermined += r.counts.get("undetermined").copied().unwrap_or(0);
        }
    }
    ensure!(undetermined == 0, "{undetermined} undetermined sequences");
    Ok(format!("tri -> vertex (2,0) at distance {:.1e}; seg 1/n -> Q_0; seg -n -> delta_0; dichotomy intact", v.hi))
}

fn c9_extension() -> Outcome {
    let tri = fixtures::tri();
    let edge = ok(verify_access_sequence(&tri, &[RatVec::from_ints(&[1, 1])]), "edge")?;
    let uniform = ok(FamilyMember::new(edge.clone(), Tilt::exact(&RatVec::zeros(2))), "uniform edge")?;
    let consistent = |r: &efc_core::closures::ExtReport| -> Result<(), String> {
        for i in 0..r.contained.len() {
            let fin = r.divergence[i].as_ref().map(Extended::is_finite);
            ensure!(
                fin == Some(r.contained[i]) && r.finite_predicted[i] == Some(r.contained[i]),
                "index {i}: contained {}, divergence {:?}, predicted {:?}",
                r.contained[i],
                r.divergence[i],
                r.finite_predicted[i]
            );
        }
        Ok(())
    };
    let trace = |r: &efc_core::closures::ExtReport, f: &dyn Fn(f64) -> f64, skip: usize| -> Result<(), String> {
        for (i, d) in r.divergence.iter().enumerate().skip(skip) {
            let d = d.and_then(|d| d.finite()).ok_or(format!("index {i}: no finite divergence"))?;
            let want = f((i - skip + 1) as f64);
            ensure!((d.mid() - want).abs() <= 1e-9, "index {i}: D {d:?} vs closed form {want:e}");
        }
        Ok(())
    };

    // (a) edge members (1/n)(1,-1) -> uniform edge: D = ln cosh(2/n)
    let members: Vec<FamilyMember> = (1..=30)
        .map(|n| FamilyMember::new(edge.clone(), Tilt::exact(&RatVec::from_rats(&[(1, n), (-1, n)]))).unwrap())
        .collect();
    let r = ok(ext_sequence_analysis(&tri, &members, &uniform), "scenario a")?;
    ensure!(r.face_dim == 1 && r.contained.iter().all(|c| *c), "a: face dim {}, contained {:?}", r.face_dim, r.contained);
    consistent(&r)?;
    trace(&r, &|n| (2.0 / n).cosh().ln(), 0)?;

    // (b) delta_(0,0), then full members n(1,1): D = ln(1 + e^{-2n}/2)
    let origin = ok(verify_access_sequence(&tri, &[RatVec::from_ints(&[-1, -1])]), "origin")?;
    let mut members = vec![ok(FamilyMember::new(origin, Tilt::exact(&RatVec::zeros(2))), "delta_0")?];
    members.extend((1..=30).map(|n| FamilyMember::top(&tri, &RatVec::from_ints(&[n, n])).unwrap()));
    let r = ok(ext_sequence_analysis(&tri, &members, &uniform), "scenario b")?;
    ensure!(r.face_dim == 1, "b: face dim {}", r.face_dim);
    ensure!(!r.contained[0] && r.contained[1..].iter().all(|c| *c), "b: contained {:?}", r.contained);
    ensure!(r.divergence[0] == Some(Extended::PosInf), "b: first divergence {:?}", r.divergence[0]);
    consistent(&r)?;
    trace(&r, &|n| (-2.0 * n).exp().mul_add(0.5, 0.0).ln_1p(), 1)?;

    // (c) constant delta_(2,0)
    let vertex = ok(verify_access_sequence(&tri, &[RatVec::from_ints(&[1, 0])]), "vertex")?;
    let delta = ok(FamilyMember::new(vertex, Tilt::exact(&RatVec::zeros(2))), "delta_(2,0)")?;
    let r = ok(ext_sequence_analysis(&tri, &vec![delta.clone(); 10], &delta), "scenario c")?;
    ensure!(r.face_dim == 0 && r.contained.iter().all(|c| *c), "c: face dim {}", r.face_dim);
    consistent(&r)?;
    trace(&r, &|_| 0.0, 0)?;
    Ok("edge, top-to-edge and vertex scenarios match closed-form traces".into())
}

fn c10_inequalities() -> Outcome {
    let start = Instant::now();
    let mu = fixtures::tri();
    let probe = BoundProbe { a: RatVec::from_rats(&[(2, 3), (2, 3)]), s: rat(1, 10), r: rat(1, 20) };
    let rep = ok(inequality_suite(&mu, &probe, 100, 10), "inequality suite")?;
    ensure!(rep.samples.len() == 100, "{} samples", rep.samples.len());
    ensure!(rep.pointwise.holds == 100, "pointwise {:?}", rep.pointwise);
    ensure!(rep.mean_bound.holds == 100, "mean bound {:?}", rep.mean_bound);
    let a = [2.0 / 3.0, 2.0 / 3.0];
    let (s, r) = (0.1, 0.05);
    let pts: Vec<Vec<f64>> = mu.atoms.iter().map(|x| x.point.to_f64()).collect();
    let mut min_gap = f64::INFINITY;
    for smp in &rep.samples {
        let t = smp.theta.to_f64();
        let nt = dot(&t, &t).sqrt();
        if nt == 0.0 {
            continue;
        }
        let in_a = |x: &Vec<f64>| dot(&t, &[x[0] - a[0], x[1] - a[1]]) >= s * nt;
        let mass = pts.iter().filter(|x| in_a(x)).count() as f64;
        ensure!(smp.mass.contains(mass), "mass {:?} vs {mass} at {t:?}", smp.mass);
        let lz = brute_lambda(&mu, &t);
        let lhs_point = lz - dot(&t, &a) - s * nt;
        ensure!(lhs_point >= mass.ln(), "oracle: pointwise bound fails at {t:?}");
        let c = pts.len() as f64 / mass;
        let b: Vec<f64> = (0..2).map(|i| pts.iter().map(|x| (dot(&t, x) - lz).exp() * x[i]).sum()).collect();
        let lhs_mean = dot(&t, &[b[0] - a[0], b[1] - a[1]]);
        let rhs_mean = r * nt - c * (-s * nt).exp() * (r * nt * (r * nt).exp() + 1.0);
        ensure!(lhs_mean >= rhs_mean, "oracle: mean bound fails at {t:?}");
        min_gap = min_gap.min((lhs_point - mass.ln()).min(lhs_mean - rhs_mean));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.2} s");
    Ok(format!("100/100 pointwise and mean bounds; oracle min slack {min_gap:.2e}; {secs:.2} s"))
}

fn c11_i_closure() -> Outcome {
    let seg = fixtures::seg();
    let user = HPolyhedron::new(1, vec![Inequality::strict(RatVec::from_ints(&[-1]), int(0))], vec![]);
    let xi = ok(ParamSet::new(&seg, user, true), "(0, inf)")?;
    let decide = |m: &FamilyMember| -> Result<bool, String> {
        ok(in_i_closure(&xi, m), "I-closure")?.as_bool().ok_or_else(|| "undecided".to_string())
    };
    for (n, d) in [(0, 1), (1, 2), (1, 1), (5, 1), (100, 1)] {
        let m = ok(FamilyMember::top(&seg, &RatVec::from_rats(&[(n, d)])), "member")?;
        ensure!(decide(&m)?, "Q_{n}/{d} excluded");
    }
    ensure!(!decide(&ok(FamilyMember::top(&seg, &RatVec::from_ints(&[-1])), "Q_-1")?)?, "Q_-1 included");
    for x in [1, 0] {
        let f = ok(verify_access_sequence(&seg, &[RatVec::from_ints(&[if x == 1 { 1 } else { -1 }])]), "vertex")?;
        let m = ok(FamilyMember::new(f, Tilt::exact(&RatVec::zeros(1))), "delta")?;
        ensure!(!decide(&m)?, "delta_{x} included");
    }
    for k in -24..=24 {
        let t = rat(k, 8);
        let m = ok(FamilyMember::top(&seg, &RatVec(vec![t.clone()])), "member")?;
        ensure!(decide(&m)? == (t >= int(0)), "wrong decision at {}", k as f64 / 8.0);
    }
    Ok("true exactly on [0, inf) over a 49-point sweep; Q_-1, delta_0, delta_1 excluded".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("example: domain, chain, adaptedness, closures", c1_example),
        ("variation closure oracle", c2_closure_oracle),
        ("face counts", c3_face_counts),
        ("directional derivatives", c4_derivatives),
        ("divergence formula and face identity", c5_divergence),
        ("pinsker", c6_pinsker),
        ("neat sequences", c7_neat),
        ("limit classifier", c8_classifier),
        ("extension sequences", c9_extension),
        ("inequality suite", c10_inequalities),
        ("information closure", c11_i_closure),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2} {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

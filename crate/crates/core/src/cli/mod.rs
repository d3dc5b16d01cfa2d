//! The `efc` command line: argument grammar, dispatch and JSON reports.
//!
//! Reports go to stdout, errors to stderr as `{"error": {...}}`. Exit codes:
//! 0 success (a negative verdict included), 2 invalid input, 3 unsupported,
//! 4 precision unreachable.

pub mod inputs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::closures::{
    classify_sequence, ext_sequence_analysis, extension_catalog, in_i_closure, in_ri_closure, in_variation_closure,
    run_suite, BoundProbe, ClosureVerdict, SuiteConfig, SUITES,
};
use crate::error::{Error, Result};
use crate::exactgeom::poly::Generators;
use crate::exactgeom::rat::parse_rat;
use crate::expfam::divergence::{divergence, variation_distance, Extended};
use crate::expfam::domain::{domain, PieceText};
use crate::expfam::member::{integrability, log_partition, pmf, FamilyMember};
use crate::expfam::param::ParamSet;
use crate::faces::{accessible_faces, enumerate_faces, is_accessible, is_adapted, verify_access_sequence, FaceHandle};
use crate::interval::Interval;
use crate::measure::{convex_support, parse_vec, Support};

use inputs::{load_measure, load_member, load_member_sequence, load_theta, load_vectors, load_xi, measure_canonical, LoadedMeasure};

#[derive(Parser, Debug)]
#[command(name = "efc", version, about = "Exact closures of discrete exponential families")]
pub struct Cli {
    /// Measure file, inline measure JSON, or a fixture: seg, tri, line, ray, ex3d.
    #[arg(short, long, global = true)]
    pub measure: Option<String>,
    /// Target width of certified numerical values.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub precision: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Support, domain of the log-partition function and canonical parameters.
    Inspect,
    /// Enumerate faces of the convex core, or verify an access sequence.
    Faces(FacesArgs),
    /// Accessibility of a face (or every accessible face) for a parameter set.
    Accessible {
        /// `theta`, `strip`, `halfline`, `narrowed`, a file or inline JSON.
        #[arg(long, default_value = "theta")]
        xi: String,
        /// Access sequence of the face.
        #[arg(long)]
        face: Option<String>,
    },
    /// Membership of a member of the extension in a closure.
    Closure {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        member: String,
        #[arg(long, default_value = "theta")]
        xi: String,
        /// Length of the witness prefix.
        #[arg(long, default_value_t = 12)]
        neat: usize,
    },
    /// Classify a parameter sequence of the full family.
    Limit {
        #[arg(long)]
        sequence: String,
    },
    /// Components of the extension, or a sequence in it checked against a limit.
    Extension {
        #[arg(long, requires = "member")]
        sequence: Option<String>,
        #[arg(long, requires = "sequence")]
        member: Option<String>,
    },
    /// Evaluate a quantity of one or two members.
    Eval {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        member: Option<String>,
        #[arg(long)]
        other: Option<String>,
        /// Point for `pmf`.
        #[arg(long)]
        at: Option<String>,
        /// Parameter of the full family for `logpartition`.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Seeded randomized checks.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        xi: Option<String>,
        /// `{"a": [...], "s": "p/q", "r": "p/q"}` for the inequality suite.
        #[arg(long)]
        probe: Option<String>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct FacesArgs {
    #[arg(long)]
    pub enumerate: bool,
    #[arg(long)]
    pub chain: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    V,
    I,
    Ri,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum What {
    Logpartition,
    Pmf,
    Mean,
    Divergence,
    Vardist,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Value>,
    pub witness: Value,
    pub diagnostics: Value,
    pub precision: f64,
    pub seed: Option<u64>,
}

/// Canonical inputs feeding the digest, in insertion order.
struct Inputs(Vec<(&'static str, String)>);

impl Inputs {
    fn add(&mut self, k: &'static str, v: impl Into<String>) {
        self.0.push((k, v.into()));
    }

    fn digest(&self, command: &str, precision: f64) -> String {
        let mut h = Sha256::new();
        h.update(format!("command={command}\nprecision={precision:e}\n"));
        for (k, v) in &self.0 {
            h.update(format!("{k}={v}\n"));
        }
        hex::encode(h.finalize())
    }
}

struct Out {
    decision: Option<Value>,
    values: Option<Value>,
    witness: Value,
    diagnostics: Value,
    seed: Option<u64>,
}

impl Out {
    fn values(v: Value) -> Self {
        Out { decision: None, values: Some(v), witness: Value::Null, diagnostics: Value::Null, seed: None }
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn generators_json(g: &Generators) -> Value {
    json!({"points": g.points, "rays": g.rays, "lines": g.lines})
}

fn face_json(f: &FaceHandle) -> Value {
    json!({
        "chain": f.chain,
        "dim": f.dim(),
        "atoms": f.restricted.atoms.iter().map(|a| &a.point).collect::<Vec<_>>(),
        "families": f.restricted.families.len(),
    })
}

fn pieces_json(ps: &[PieceText]) -> Value {
    to_json(&ps.iter().map(|p| &p.constraints).collect::<Vec<_>>())
}

fn extended_json(e: &Extended) -> Value {
    match e {
        Extended::Finite(v) => to_json(v),
        Extended::PosInf => json!(["inf", "inf"]),
    }
}

/// `[n, lo, hi]` rows, 1-based, skipping indices without a value.
fn trace(ds: &[Option<Extended>]) -> Value {
    let rows: Vec<Value> = ds
        .iter()
        .enumerate()
        .filter_map(|(i, d)| {
            d.as_ref().map(|d| match extended_json(d) {
                Value::Array(mut v) => {
                    v.insert(0, json!(i + 1));
                    Value::Array(v)
                }
                _ => unreachable!(),
            })
        })
        .collect();
    Value::Array(rows)
}

fn verdict_out(v: &ClosureVerdict) -> Out {
    let r = v.refutation.as_ref();
    Out {
        decision: Some(json!({
            "kind": v.kind,
            "value": v.as_bool(),
            "failing_step": r.and_then(|r| r.failing_step),
            "condition": r.map(|r| r.condition),
        })),
        values: None,
        witness: to_json(&v.witness),
        diagnostics: to_json(v),
        seed: None,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbe {
    a: Vec<String>,
    s: String,
    r: String,
}

fn need<'a>(x: &'a Option<String>, flag: &str, what: &str) -> Result<&'a str> {
    x.as_deref().ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for {what}")))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Inspect => "inspect",
        Command::Faces(_) => "faces",
        Command::Accessible { .. } => "accessible",
        Command::Closure { .. } => "closure",
        Command::Limit { .. } => "limit",
        Command::Extension { .. } => "extension",
        Command::Eval { .. } => "eval",
        Command::Verify { .. } => "verify",
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Report> {
    let arg = cli.measure.as_deref().ok_or_else(|| Error::InvalidInput("--measure is required".into()))?;
    if !(cli.precision > 0.0 && cli.precision < 1.0) {
        return Err(Error::InvalidInput("--precision must lie in (0, 1)".into()));
    }
    let lm = load_measure(arg)?;
    let mut inputs = Inputs(vec![("measure", measure_canonical(&lm.measure))]);
    let out = dispatch(&cli.command, &lm, cli.precision, &mut inputs)?;
    let command = command_name(&cli.command);
    Ok(Report {
        command: command.into(),
        inputs_digest: inputs.digest(command, cli.precision),
        decision: out.decision,
        values: out.values,
        witness: out.witness,
        diagnostics: out.diagnostics,
        precision: cli.precision,
        seed: out.seed,
    })
}

fn dispatch(cmd: &Command, lm: &LoadedMeasure, eps: f64, inputs: &mut Inputs) -> Result<Out> {
    let mu = &lm.measure;
    match cmd {
        Command::Inspect => {
            let support = match convex_support(mu)? {
                Support::Polyhedral(p) => {
                    let c = p.canonical()?;
                    json!({"polyhedral": true, "constraints": PieceText::of(&c).constraints, "generators": generators_json(&c.generators()?)})
                }
                Support::NonPolyhedral { flat, directions } => json!({
                    "polyhedral": false,
                    "affine_hull": {"base": flat.base, "basis": flat.basis},
                    "unbounded_directions": directions,
                }),
            };
            let theta = ParamSet::theta(mu)?;
            let theta_text: Vec<PieceText> = theta.pieces.iter().map(PieceText::of).collect();
            Ok(Out::values(json!({
                "dimension": mu.dim,
                "atoms": mu.atoms.len(),
                "families": mu.families.len(),
                "lin": mu.lin().basis,
                "support": support,
                "domain": pieces_json(&domain(mu).describe()?),
                "theta": pieces_json(&theta_text),
                "theta_closure": PieceText::of(&theta.closure).constraints,
                "theta_equals_domain": mu.lin().dim() == mu.dim,
            })))
        }
        Command::Faces(FacesArgs { enumerate: true, .. }) => {
            inputs.add("mode", "enumerate");
            let faces = enumerate_faces(mu)?;
            Ok(Out::values(json!({"count": faces.len(), "faces": faces.iter().map(face_json).collect::<Vec<_>>()})))
        }
        Command::Faces(FacesArgs { chain, .. }) => {
            let chain = load_vectors("chain", need(chain, "chain", "faces")?, mu.dim)?;
            inputs.add("chain", to_json(&chain).to_string());
            match verify_access_sequence(mu, &chain) {
                Ok(f) => Ok(Out {
                    decision: Some(json!({"verified": true})),
                    values: Some(json!({"face": face_json(&f)})),
                    witness: to_json(&chain),
                    diagnostics: Value::Null,
                    seed: None,
                }),
                Err(Error::AccessStep { index, source }) if source.exit_code() == 2 => Ok(Out {
                    decision: Some(json!({"verified": false, "failing_step": index, "reason": source.to_string()})),
                    values: None,
                    witness: Value::Null,
                    diagnostics: Value::Null,
                    seed: None,
                }),
                Err(e) => Err(e),
            }
        }
        Command::Accessible { xi, face } => {
            let (xi, canon) = load_xi(xi, lm)?;
            inputs.add("xi", canon);
            match face {
                Some(face) => {
                    let chain = load_vectors("face", face, mu.dim)?;
                    inputs.add("face", to_json(&chain).to_string());
                    let f = verify_access_sequence(mu, &chain)?;
                    let adapted = is_adapted(mu, &chain, &xi)?;
                    let acc = is_accessible(mu, &f, &xi)?;
                    Ok(Out {
                        decision: Some(json!({
                            "adapted": adapted.adapted,
                            "failing_step": adapted.failing_step,
                            "accessible": acc.is_accessible(),
                        })),
                        values: None,
                        witness: to_json(&acc),
                        diagnostics: json!({"steps": adapted.steps, "face": face_json(&f)}),
                        seed: None,
                    })
                }
                None => {
                    let faces = accessible_faces(mu, &xi)?;
                    let rows: Vec<Value> = faces.iter().map(|(f, c)| json!({"face": face_json(f), "access": c})).collect();
                    Ok(Out::values(json!({"count": rows.len(), "faces": rows})))
                }
            }
        }
        Command::Closure { kind, member, xi, neat } => {
            let (m, mc) = load_member(member, mu)?;
            let (xi, xc) = load_xi(xi, lm)?;
            inputs.add("kind", format!("{kind:?}"));
            inputs.add("member", mc);
            inputs.add("xi", xc);
            inputs.add("neat", neat.to_string());
            let v = match kind {
                Kind::V => in_variation_closure(mu, &xi, &m, *neat)?,
                Kind::I => in_i_closure(&xi, &m)?,
                Kind::Ri => in_ri_closure(mu, &xi, &m, *neat)?,
            };
            Ok(verdict_out(&v))
        }
        Command::Limit { sequence } => {
            let seq = load_vectors("sequence", sequence, mu.dim)?;
            if seq.is_empty() {
                return Err(Error::EmptyInput);
            }
            inputs.add("sequence", to_json(&seq).to_string());
            let r = classify_sequence(mu, &seq, true)?;
            let d = &r.diagnostics;
            Ok(Out {
                decision: None,
                values: Some(to_json(&r.alternative)),
                witness: Value::Null,
                diagnostics: json!({
                    "norms": d.norms,
                    "lambda": d.lambda,
                    "variation": d.variation,
                    "divergence": trace(&d.divergence),
                }),
                seed: None,
            })
        }
        Command::Extension { sequence: None, .. } => {
            let comps = extension_catalog(mu)?;
            let rows: Vec<Value> = comps
                .iter()
                .map(|c| {
                    json!({
                        "face": face_json(&c.face),
                        "theta_f": pieces_json(&c.describe()),
                        "exhausted_by_projection": c.exhausted_by_projection,
                    })
                })
                .collect();
            Ok(Out::values(json!({"count": rows.len(), "components": rows})))
        }
        Command::Extension { sequence: Some(seq), member } => {
            let (members, sc) = load_member_sequence(seq, mu)?;
            let (p, pc) = load_member(need(member, "member", "extension")?, mu)?;
            inputs.add("sequence", sc);
            inputs.add("member", pc);
            let r = ext_sequence_analysis(mu, &members, &p)?;
            Ok(Out {
                decision: Some(json!({"eventually_contained": r.contained.last().copied().unwrap_or(false)})),
                values: Some(json!({
                    "face_chain": r.face_chain,
                    "face_dim": r.face_dim,
                    "contained": r.contained,
                    "finite_predicted": r.finite_predicted,
                })),
                witness: to_json(&r.conditioned),
                diagnostics: json!({"divergence": trace(&r.divergence)}),
                seed: None,
            })
        }
        Command::Eval { what, member, other, at, theta } => eval(*what, lm, member, other, at, theta, eps, inputs),
        Command::Verify { suite, trials, seed, xi, probe } => {
            let xi = match xi {
                Some(x) => {
                    let (p, c) = load_xi(x, lm)?;
                    inputs.add("xi", c);
                    Some(p)
                }
                None => None,
            };
            let probe = match probe {
                Some(text) => {
                    let raw: RawProbe = serde_json::from_str(&inputs::read_text(text)?)
                        .map_err(|e| Error::InvalidInput(format!("probe: {e}")))?;
                    let p = BoundProbe { a: parse_vec("probe.a", &raw.a)?, s: parse_rat(&raw.s)?, r: parse_rat(&raw.r)? };
                    if p.a.dim() != mu.dim {
                        return Err(Error::DimensionMismatch { expected: mu.dim, got: p.a.dim() });
                    }
                    inputs.add("probe", to_json(&p).to_string());
                    Some(p)
                }
                None => None,
            };
            inputs.add("suite", suite.clone());
            inputs.add("trials", trials.to_string());
            inputs.add("seed", seed.to_string());
            let cfg = SuiteConfig { trials: *trials, seed: *seed, precision: eps };
            let r = run_suite(suite, mu, xi.as_ref(), probe.as_ref(), &cfg)?;
            Ok(Out {
                decision: Some(json!({"all_pass": r.all_pass()})),
                values: Some(to_json(&r)),
                witness: Value::Null,
                diagnostics: Value::Null,
                seed: Some(*seed),
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn eval(
    what: What,
    lm: &LoadedMeasure,
    member: &Option<String>,
    other: &Option<String>,
    at: &Option<String>,
    theta: &Option<String>,
    eps: f64,
    inputs: &mut Inputs,
) -> Result<Out> {
    let mu = &lm.measure;
    inputs.add("what", format!("{what:?}"));
    let mut load = |flag: &'static str, x: &Option<String>| -> Result<FamilyMember> {
        let (m, c) = load_member(need(x, flag, "this quantity")?, mu)?;
        inputs.add(flag, c);
        Ok(m)
    };
    let values = match what {
        What::Logpartition => {
            let v: Interval = match (theta, member) {
                (Some(t), _) => {
                    let t = load_theta(t, mu.dim)?;
                    let v = log_partition(mu, &t, eps)?;
                    inputs.add("theta", t.describe().join(","));
                    v
                }
                (None, Some(_)) => load("member", member)?.log_partition(eps)?,
                (None, None) => return Err(Error::InvalidInput("--theta or --member is required for logpartition".into())),
            };
            json!({"logpartition": v})
        }
        What::Pmf => {
            let m = load("member", member)?;
            let row: Vec<String> = serde_json::from_str(&inputs::read_text(need(at, "at", "pmf")?)?)
                .map_err(|e| Error::InvalidInput(format!("at: {e}")))?;
            let x = parse_vec("at", &row)?;
            if x.dim() != mu.dim {
                return Err(Error::DimensionMismatch { expected: mu.dim, got: x.dim() });
            }
            inputs.add("at", to_json(&x).to_string());
            json!({"pmf": pmf(&m, &x, eps)?})
        }
        What::Mean => {
            let m = load("member", member)?;
            let p = integrability(&m, eps)?;
            json!({
                "has_mean": p.constraints.is_empty(),
                "m_basis": p.space,
                "constraints": p.constraints,
                "partial_mean": p.partial_mean,
            })
        }
        What::Divergence => {
            let (p, q) = (load("member", member)?, load("other", other)?);
            json!({"divergence": extended_json(&divergence(&p, &q, eps)?)})
        }
        What::Vardist => {
            let (p, q) = (load("member", member)?, load("other", other)?);
            json!({"vardist": variation_distance(&p, &q, eps)?})
        }
    };
    Ok(Out::values(values))
}

/// Parses, runs and renders: `(exit code, stdout, stderr)`.
pub fn execute<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    match run(&cli) {
        Ok(r) => (0, serde_json::to_string_pretty(&r).expect("report serializes") + "\n", String::new()),
        Err(e) => {
            let code = e.exit_code();
            let body = json!({"error": {"exit_code": code, "message": e.to_string()}});
            (code, String::new(), serde_json::to_string_pretty(&body).expect("error serializes") + "\n")
        }
    }
}

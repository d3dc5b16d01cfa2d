//! Resolution of command-line inputs: files, inline JSON, fixture names.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactgeom::rat::{fmt_rat, parse_rat, Rat, RatVec};
use crate::expfam::eval::Tilt;
use crate::expfam::member::FamilyMember;
use crate::expfam::param::{ParamFile, ParamSet};
use crate::faces::verify_access_sequence;
use crate::fixtures;
use crate::measure::{parse_vec, MeasureFile};
use crate::measure::MixedMeasure;

/// Inline JSON when the argument looks like JSON, file contents otherwise.
pub fn read_text(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::InvalidInput(format!("{arg}: {e}")))
}

fn json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

pub struct LoadedMeasure {
    pub measure: MixedMeasure,
    /// Lowercase fixture name, when the measure is one.
    pub fixture: Option<String>,
}

/// A measure file, inline measure JSON or a fixture name.
pub fn load_measure(arg: &str) -> Result<LoadedMeasure> {
    let looks_inline = arg.trim_start().starts_with('{');
    if !looks_inline && !Path::new(arg).exists() {
        if let Ok(m) = fixtures::by_name(arg) {
            let name = arg.to_ascii_lowercase().trim_start_matches("fix-").to_string();
            return Ok(LoadedMeasure { measure: m, fixture: Some(name) });
        }
        return Err(Error::InvalidInput(format!("{arg}: neither a readable file nor a fixture ({})", fixtures::NAMES.join(", "))));
    }
    let measure = MeasureFile::from_json(&read_text(arg)?)?.to_measure()?;
    Ok(LoadedMeasure { measure, fixture: None })
}

pub fn measure_canonical(mu: &MixedMeasure) -> String {
    serde_json::to_string(&MeasureFile::from_measure(mu)).expect("measure serializes")
}

/// A parameter set: `theta`, `strip`, `halfline`, `narrowed`, or a file.
pub fn load_xi(arg: &str, lm: &LoadedMeasure) -> Result<(ParamSet, String)> {
    let mu = &lm.measure;
    let fixture = lm.fixture.as_deref().unwrap_or("");
    let xi = match arg {
        "theta" => ParamSet::theta(mu)?,
        "strip" if mu.dim == 2 => fixtures::strip(mu)?,
        "halfline" => fixtures::halfline(mu, &halfline_direction(fixture, mu.dim))?,
        "narrowed" if fixture == "ex3d" => fixtures::ex3d_narrowed(mu)?,
        "strip" | "narrowed" => return Err(Error::InvalidInput(format!("parameter set '{arg}' is not defined for this measure"))),
        _ => ParamFile::from_json(&read_text(arg)?)?.to_param_set(mu)?,
    };
    let canon = serde_json::to_string(&ParamFile::from_polyhedron(&xi.user)).expect("param file serializes");
    Ok((xi, canon))
}

fn halfline_direction(fixture: &str, d: usize) -> RatVec {
    let h = fixtures::default_halfline(fixture);
    if h.dim() == d {
        h
    } else {
        RatVec(vec![Rat::from_integer(1.into()); d])
    }
}

fn parse_rows(what: &str, rows: &[Vec<String>], dim: usize) -> Result<Vec<RatVec>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let v = parse_vec(&format!("{what}[{i}]"), r)?;
            if v.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.dim() });
            }
            Ok(v)
        })
        .collect()
}

/// A list of vectors `[["p/q", ...], ...]`.
pub fn load_vectors(what: &str, arg: &str, dim: usize) -> Result<Vec<RatVec>> {
    let rows: Vec<Vec<String>> = json(what, &read_text(arg)?)?;
    parse_rows(what, &rows, dim)
}

/// A single vector `["p/q", ...]`, with `ln(p/q)` entries allowed.
pub fn load_theta(arg: &str, dim: usize) -> Result<Tilt> {
    let row: Vec<String> = json("theta", &read_text(arg)?)?;
    parse_theta(&row, dim)
}

/// Rationals, or `ln(r)` ratios; a ratio vector may still hold exact zeros.
pub fn parse_theta(row: &[String], dim: usize) -> Result<Tilt> {
    if row.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
    }
    let logs: Vec<Option<&str>> =
        row.iter().map(|s| s.trim().strip_prefix("ln(").and_then(|r| r.strip_suffix(')'))).collect();
    if logs.iter().all(Option::is_none) {
        return Ok(Tilt::exact(&parse_vec("theta", row)?));
    }
    let mut ratios = Vec::with_capacity(dim);
    for (i, (s, l)) in row.iter().zip(&logs).enumerate() {
        let r = match l {
            Some(inner) => parse_rat(inner)?,
            None if parse_rat(s)? == Rat::from_integer(0.into()) => Rat::from_integer(1.into()),
            None => {
                return Err(Error::InvalidInput(format!("theta[{i}]: a nonzero rational cannot be mixed with ln(...) entries")))
            }
        };
        ratios.push(r);
    }
    Tilt::from_ratios(&ratios)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MemberFile {
    #[serde(default)]
    pub chain: Vec<Vec<String>>,
    pub theta: Vec<String>,
}

impl MemberFile {
    pub fn to_member(&self, mu: &MixedMeasure) -> Result<FamilyMember> {
        let chain = parse_rows("chain", &self.chain, mu.dim)?;
        let face = verify_access_sequence(mu, &chain)?;
        FamilyMember::new(face, parse_theta(&self.theta, mu.dim)?)
    }

    /// Same member, rationals in lowest terms.
    pub fn canonical(&self, mu: &MixedMeasure) -> Result<String> {
        let norm = |r: &[String]| -> Result<Vec<String>> {
            r.iter()
                .map(|s| match s.trim().strip_prefix("ln(").and_then(|x| x.strip_suffix(')')) {
                    Some(inner) => Ok(format!("ln({})", fmt_rat(&parse_rat(inner)?))),
                    None => Ok(fmt_rat(&parse_rat(s)?)),
                })
                .collect()
        };
        let c = MemberFile { chain: self.chain.iter().map(|r| norm(r)).collect::<Result<_>>()?, theta: norm(&self.theta)? };
        self.to_member(mu)?;
        Ok(serde_json::to_string(&c).expect("member serializes"))
    }
}

/// `{"chain": [...], "theta": [...]}`.
pub fn load_member(arg: &str, mu: &MixedMeasure) -> Result<(FamilyMember, String)> {
    let f: MemberFile = json("member", &read_text(arg)?)?;
    let canon = f.canonical(mu)?;
    Ok((f.to_member(mu)?, canon))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeqEntry {
    Vector(Vec<String>),
    Member(MemberFile),
}

/// Members of the extension: bare vectors are members of the full family.
pub fn load_member_sequence(arg: &str, mu: &MixedMeasure) -> Result<(Vec<FamilyMember>, String)> {
    let entries: Vec<SeqEntry> = json("sequence", &read_text(arg)?)?;
    let mut out = Vec::with_capacity(entries.len());
    let mut canon = Vec::with_capacity(entries.len());
    for e in entries {
        let f = match e {
            SeqEntry::Vector(theta) => MemberFile { chain: Vec::new(), theta },
            SeqEntry::Member(m) => m,
        };
        canon.push(f.canonical(mu)?);
        out.push(f.to_member(mu)?);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok((out, canon.join(";")))
}

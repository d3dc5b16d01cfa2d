//! The measure file schema. All numbers are rational strings.

use serde::{Deserialize, Serialize};

use super::{Atom, AtomFamily, MixedMeasure, Weight};
use crate::error::{Error, Result};
use crate::exactgeom::rat::{fmt_rat, parse_rat, Rat, RatVec};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    pub point: Vec<String>,
    pub weight: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawRay {
    pub base: Vec<String>,
    pub step: Vec<String>,
    pub rho: String,
    pub alpha: String,
    pub scale: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawCurve {
    pub base: Vec<String>,
    pub lin: Vec<String>,
    pub quad: Vec<String>,
    pub rho: String,
    pub alpha: String,
    pub scale: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub dimension: usize,
    #[serde(default)]
    pub atoms: Vec<RawAtom>,
    #[serde(default)]
    pub rays: Vec<RawRay>,
    #[serde(default)]
    pub curves: Vec<RawCurve>,
}

pub fn parse_vec(field: &str, xs: &[String]) -> Result<RatVec> {
    xs.iter()
        .map(|s| field_rat(field, s))
        .collect::<Result<Vec<Rat>>>()
        .map(RatVec)
}

fn field_rat(field: &str, s: &str) -> Result<Rat> {
    parse_rat(s).map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{field}: {m}")),
        other => other,
    })
}

impl MeasureFile {
    pub fn from_json(text: &str) -> Result<MeasureFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("measure file: {e}")))
    }

    /// Parses and validates.
    pub fn to_measure(&self) -> Result<MixedMeasure> {
        let mut atoms = Vec::new();
        for (i, a) in self.atoms.iter().enumerate() {
            atoms.push(Atom {
                point: parse_vec(&format!("atoms[{i}].point"), &a.point)?,
                weight: Weight::rational(field_rat(&format!("atoms[{i}].weight"), &a.weight)?),
            });
        }
        let mut families = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            let f = |n: &str| format!("rays[{i}].{n}");
            families.push(AtomFamily::ray(
                parse_vec(&f("base"), &r.base)?,
                parse_vec(&f("step"), &r.step)?,
                field_rat(&f("rho"), &r.rho)?,
                field_rat(&f("alpha"), &r.alpha)?,
                field_rat(&f("scale"), &r.scale)?,
            ));
        }
        for (i, c) in self.curves.iter().enumerate() {
            let f = |n: &str| format!("curves[{i}].{n}");
            let quad = parse_vec(&f("quad"), &c.quad)?;
            if quad.is_zero() {
                return Err(Error::InvalidInput(format!("{}: must be nonzero", f("quad"))));
            }
            families.push(AtomFamily::curve(
                parse_vec(&f("base"), &c.base)?,
                parse_vec(&f("lin"), &c.lin)?,
                quad,
                field_rat(&f("rho"), &c.rho)?,
                field_rat(&f("alpha"), &c.alpha)?,
                field_rat(&f("scale"), &c.scale)?,
            ));
        }
        MixedMeasure::new(self.dimension, atoms, families).validate()
    }

    pub fn from_measure(m: &MixedMeasure) -> MeasureFile {
        let strs = |v: &RatVec| v.to_strings();
        MeasureFile {
            dimension: m.dim,
            atoms: m
                .atoms
                .iter()
                .map(|a| RawAtom { point: strs(&a.point), weight: a.weight.to_string() })
                .collect(),
            rays: m
                .families
                .iter()
                .filter(|f| !f.is_curve())
                .map(|f| RawRay {
                    base: strs(&f.base),
                    step: strs(&f.lin),
                    rho: fmt_rat(&f.rho),
                    alpha: fmt_rat(&f.alpha),
                    scale: fmt_rat(&f.scale),
                })
                .collect(),
            curves: m
                .families
                .iter()
                .filter(|f| f.is_curve())
                .map(|f| RawCurve {
                    base: strs(&f.base),
                    lin: strs(&f.lin),
                    quad: strs(&f.quad),
                    rho: fmt_rat(&f.rho),
                    alpha: fmt_rat(&f.alpha),
                    scale: fmt_rat(&f.scale),
                })
                .collect(),
        }
    }
}

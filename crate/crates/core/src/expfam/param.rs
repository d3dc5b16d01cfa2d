//! Convex parameter sets `Xi` inside the canonical parameter space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactgeom::flat::AffineFlat;
use crate::exactgeom::poly::{hull_from_generators, Equality, Generators, HPolyhedron, Inequality};
use crate::exactgeom::rat::{fmt_rat, parse_rat, RatVec};
use crate::measure::{parse_vec, MixedMeasure};

use super::domain::domain;

/// `Xi = pi_lin(mu)(user) ∩ Theta`, stored as the union of its intersections
/// with the domain pieces, plus the closure.
#[derive(Clone, Debug)]
pub struct ParamSet {
    pub user: HPolyhedron,
    /// Nonempty semi-open pieces whose union is `Xi`.
    pub pieces: Vec<HPolyhedron>,
    /// `cl(Xi)`, canonical.
    pub closure: HPolyhedron,
}

impl ParamSet {
    pub fn new(mu: &MixedMeasure, user: HPolyhedron, intersect_theta: bool) -> Result<ParamSet> {
        if user.dim != mu.dim {
            return Err(Error::DimensionMismatch { expected: mu.dim, got: user.dim });
        }
        let lin = mu.lin();
        let projected = if lin.dim() == mu.dim { user.clone() } else { user.fm_project(&lin)? };
        let on_lin = HPolyhedron::from_flat(&lin);
        let plain = projected.intersect(&on_lin);
        let mut pieces = Vec::new();
        if intersect_theta {
            for d in &domain(mu).pieces()? {
                let p = plain.intersect(d);
                if !p.is_empty() {
                    pieces.push(p.canonical()?);
                }
            }
        } else {
            // taken as given, after checking it lies inside Theta
            for c in &domain(mu).complement_pieces()? {
                if !plain.intersect(c).is_empty() {
                    return Err(Error::InvalidInput("parameter set leaves the canonical parameter space".into()));
                }
            }
            if !plain.is_empty() {
                pieces.push(plain.canonical()?);
            }
        }
        ParamSet::from_pieces(user, pieces)
    }

    fn from_pieces(user: HPolyhedron, pieces: Vec<HPolyhedron>) -> Result<ParamSet> {
        if pieces.is_empty() {
            return Err(Error::Empty);
        }
        let mut gens = Generators::default();
        for p in &pieces {
            let g = p.closed().generators()?;
            gens.points.extend(g.points);
            gens.rays.extend(g.rays);
            gens.lines.extend(g.lines);
        }
        let closure = hull_from_generators(&gens)?.canonical()?;
        Ok(ParamSet { user, pieces, closure })
    }

    pub fn theta(mu: &MixedMeasure) -> Result<ParamSet> {
        ParamSet::new(mu, HPolyhedron::whole(mu.dim), true)
    }

    pub fn dim(&self) -> usize {
        self.user.dim
    }

    pub fn contains(&self, theta: &RatVec) -> bool {
        self.pieces.iter().any(|p| p.contains(theta))
    }

    pub fn closure_contains(&self, theta: &RatVec) -> bool {
        self.closure.contains(theta)
    }

    pub fn ri_contains(&self, theta: &RatVec) -> Result<bool> {
        Ok(self.closure.ri_query()?.contains(theta))
    }

    pub fn ri_point(&self) -> Result<RatVec> {
        Ok(self.closure.ri_query()?.point)
    }

    /// `rec(ri Xi) = rec(cl Xi)`.
    pub fn recession(&self) -> Result<HPolyhedron> {
        self.closure.recession_cone()
    }

    /// `cl(pi_flat(Xi))`, the projection onto `lin(flat)`.
    pub fn projected_closure(&self, flat: &AffineFlat) -> Result<HPolyhedron> {
        self.closure.fm_project(flat)
    }

    /// `Xi ∩ (theta + M)` for a linear subspace `M`; `Empty` if they miss.
    pub fn cut_by_translate(&self, theta: &RatVec, m: &AffineFlat) -> Result<ParamSet> {
        let translate = HPolyhedron::from_flat(&AffineFlat { base: theta.clone(), basis: m.basis.clone() });
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let q = p.intersect(&translate);
            if !q.is_empty() {
                pieces.push(q.canonical()?);
            }
        }
        ParamSet::from_pieces(self.user.intersect(&translate), pieces)
    }

    /// `ri(Xi)`: the canonical closure with every inequality made strict.
    pub fn relative_interior(&self) -> HPolyhedron {
        let mut p = self.closure.clone();
        for i in &mut p.inequalities {
            i.strict = true;
        }
        p
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawInequality {
    pub normal: Vec<String>,
    pub offset: String,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawEquality {
    pub normal: Vec<String>,
    pub offset: String,
}

fn yes() -> bool {
    true
}

/// Parameter-set file; inequalities read `<normal, theta> <= offset` (or `<`).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    #[serde(default)]
    pub inequalities: Vec<RawInequality>,
    #[serde(default)]
    pub equalities: Vec<RawEquality>,
    #[serde(default = "yes")]
    pub intersect_theta: bool,
}

impl ParamFile {
    pub fn from_json(text: &str) -> Result<ParamFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("parameter file: {e}")))
    }

    pub fn to_polyhedron(&self, dim: usize) -> Result<HPolyhedron> {
        let mut p = HPolyhedron::whole(dim);
        for (i, r) in self.inequalities.iter().enumerate() {
            let n = parse_vec(&format!("inequalities[{i}].normal"), &r.normal)?;
            check_dim(&n, dim)?;
            let o = parse_rat(&r.offset).map_err(|e| field_err(&format!("inequalities[{i}].offset"), e))?;
            p.inequalities.push(Inequality { normal: n, offset: o, strict: r.strict });
        }
        for (i, r) in self.equalities.iter().enumerate() {
            let n = parse_vec(&format!("equalities[{i}].normal"), &r.normal)?;
            check_dim(&n, dim)?;
            let o = parse_rat(&r.offset).map_err(|e| field_err(&format!("equalities[{i}].offset"), e))?;
            p.equalities.push(Equality::new(n, o));
        }
        Ok(p)
    }

    pub fn to_param_set(&self, mu: &MixedMeasure) -> Result<ParamSet> {
        ParamSet::new(mu, self.to_polyhedron(mu.dim)?, self.intersect_theta)
    }

    pub fn from_polyhedron(p: &HPolyhedron) -> ParamFile {
        ParamFile {
            inequalities: p
                .inequalities
                .iter()
                .map(|i| RawInequality { normal: i.normal.to_strings(), offset: fmt_rat(&i.offset), strict: i.strict })
                .collect(),
            equalities: p
                .equalities
                .iter()
                .map(|e| RawEquality { normal: e.normal.to_strings(), offset: fmt_rat(&e.offset) })
                .collect(),
            intersect_theta: true,
        }
    }
}

fn check_dim(n: &RatVec, dim: usize) -> Result<()> {
    if n.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: n.dim() });
    }
    Ok(())
}

fn field_err(field: &str, e: Error) -> Error {
    match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{field}: {m}")),
        other => other,
    }
}

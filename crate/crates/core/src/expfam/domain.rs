//! `dom(Lambda)`: where the Laplace transform of the measure is finite.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactgeom::poly::{Equality, HPolyhedron, Inequality};
use crate::exactgeom::rat::{fmt_rat, Rat, RatVec};
use crate::measure::{AtomFamily, MixedMeasure};

use super::eval::Tilt;

/// Convergence rule of one family: `<theta, quad> < 0`, or `<theta, quad> = 0`
/// and then `<theta, lin> + ln(rho) < 0`, or `= 0` when `closed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCondition {
    pub quad: Option<RatVec>,
    pub lin: RatVec,
    pub rho: Rat,
    /// Boundary of the ray rule belongs to the domain (`alpha > 1`).
    pub closed: bool,
}

impl FamilyCondition {
    fn of(f: &AtomFamily) -> Self {
        FamilyCondition {
            quad: f.is_curve().then(|| f.quad.clone()),
            lin: f.lin.clone(),
            rho: f.rho.clone(),
            closed: f.alpha > Rat::one(),
        }
    }

    pub fn admits(&self, theta: &Tilt) -> Result<bool> {
        if let Some(q) = &self.quad {
            match theta.sign_dot(q)? {
                Ordering::Less => return Ok(true),
                Ordering::Greater => return Ok(false),
                Ordering::Equal => {}
            }
        }
        Ok(match theta.sign_dot_plus_ln(&self.lin, &self.rho)? {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.closed,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub dim: usize,
    pub conditions: Vec<FamilyCondition>,
}

impl Domain {
    pub fn contains(&self, theta: &Tilt) -> Result<bool> {
        for c in &self.conditions {
            if !c.admits(theta)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_everything(&self) -> bool {
        self.conditions.is_empty()
    }

    /// The domain as a union of semi-open polyhedra, one per choice of the
    /// strict or the tied branch on each curve family. Empty pieces are
    /// dropped. Needs `rho = 1` everywhere (otherwise boundaries sit at the
    /// irrational offsets `-ln rho`).
    pub fn pieces(&self) -> Result<Vec<HPolyhedron>> {
        let mut base = HPolyhedron::whole(self.dim);
        let mut curves = Vec::new();
        for c in &self.conditions {
            if !c.rho.is_one() {
                return Err(Error::Unsupported("domain boundary at an irrational offset (rho < 1)".into()));
            }
            match &c.quad {
                None => base.inequalities.push(ray_rule(c)),
                Some(q) => curves.push((q.clone(), ray_rule(c))),
            }
        }
        let mut out = vec![base];
        for (q, rule) in curves {
            let mut next = Vec::new();
            for p in out {
                let mut strict = p.clone();
                strict.inequalities.push(Inequality::strict(q.clone(), Rat::zero()));
                let mut tied = p;
                tied.equalities.push(Equality::new(q.clone(), Rat::zero()));
                tied.inequalities.push(rule.clone());
                next.extend([strict, tied]);
            }
            out = next;
        }
        let mut kept: Vec<HPolyhedron> = Vec::new();
        for p in out {
            if p.is_empty() {
                continue;
            }
            let c = p.canonical()?;
            if !kept.contains(&c) {
                kept.push(c);
            }
        }
        Ok(kept)
    }

    /// Semi-open polyhedra covering the complement of the domain.
    pub fn complement_pieces(&self) -> Result<Vec<HPolyhedron>> {
        let mut out = Vec::new();
        for c in &self.conditions {
            if !c.rho.is_one() {
                return Err(Error::Unsupported("domain boundary at an irrational offset (rho < 1)".into()));
            }
            let beyond = if c.closed {
                Inequality::strict(c.lin.neg(), Rat::zero())
            } else {
                Inequality::new(c.lin.neg(), Rat::zero())
            };
            match &c.quad {
                None => out.push(HPolyhedron::new(self.dim, vec![beyond], vec![])),
                Some(q) => {
                    out.push(HPolyhedron::new(self.dim, vec![Inequality::strict(q.neg(), Rat::zero())], vec![]));
                    out.push(HPolyhedron::new(self.dim, vec![beyond], vec![Equality::new(q.clone(), Rat::zero())]));
                }
            }
        }
        Ok(out)
    }

    pub fn describe(&self) -> Result<Vec<PieceText>> {
        Ok(self.pieces()?.iter().map(PieceText::of).collect())
    }
}

fn ray_rule(c: &FamilyCondition) -> Inequality {
    if c.closed {
        Inequality::new(c.lin.clone(), Rat::zero())
    } else {
        Inequality::strict(c.lin.clone(), Rat::zero())
    }
}

pub fn domain(mu: &MixedMeasure) -> Domain {
    Domain { dim: mu.dim, conditions: mu.families.iter().map(FamilyCondition::of).collect() }
}

/// A polyhedron as constraint strings, e.g. `"1*t2 < 0"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceText {
    pub constraints: Vec<String>,
}

impl PieceText {
    pub fn of(p: &HPolyhedron) -> Self {
        let mut constraints: Vec<String> =
            p.equalities.iter().map(|e| format!("{} = {}", linear_text(&e.normal), fmt_rat(&e.offset))).collect();
        constraints.extend(p.inequalities.iter().map(|i| {
            format!("{} {} {}", linear_text(&i.normal), if i.strict { "<" } else { "<=" }, fmt_rat(&i.offset))
        }));
        PieceText { constraints }
    }
}

fn linear_text(n: &RatVec) -> String {
    let terms: Vec<String> = n
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("{}*t{}", fmt_rat(c), i + 1))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

//! H-polyhedra over the rationals, possibly with strict (excluded) facets.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::dd;
use super::flat::{affine_hull, AffineFlat};
use super::linalg;
use super::lp::{self, LpOutcome, Row};
use super::rat::{fmt_rat, Rat, RatVec};
use crate::error::{Error, Result};

/// Ambient dimension cap for double description and face lattices.
pub const DEFAULT_MAX_DIM: usize = 6;

/// `<normal, x> <= offset`, or `<` when `strict`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub normal: RatVec,
    pub offset: Rat,
    pub strict: bool,
}

impl Inequality {
    pub fn new(normal: RatVec, offset: Rat) -> Self {
        Inequality { normal, offset, strict: false }
    }
    pub fn strict(normal: RatVec, offset: Rat) -> Self {
        Inequality { normal, offset, strict: true }
    }
    pub fn holds(&self, x: &RatVec) -> bool {
        let v = self.normal.dot(x);
        if self.strict {
            v < self.offset
        } else {
            v <= self.offset
        }
    }
}

impl fmt::Debug for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.strict { "<" } else { "<=" };
        write!(f, "{:?}.x {op} {}", self.normal, fmt_rat(&self.offset))
    }
}

/// `<normal, x> = offset`
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equality {
    pub normal: RatVec,
    pub offset: Rat,
}

impl Equality {
    pub fn new(normal: RatVec, offset: Rat) -> Self {
        Equality { normal, offset }
    }
}

impl fmt::Debug for Equality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}.x = {}", self.normal, fmt_rat(&self.offset))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HPolyhedron {
    pub dim: usize,
    pub inequalities: Vec<Inequality>,
    pub equalities: Vec<Equality>,
}

/// V-representation: `conv(points) + cone(rays) + span(lines)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Generators {
    pub points: Vec<RatVec>,
    pub rays: Vec<RatVec>,
    pub lines: Vec<RatVec>,
}

impl Generators {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, RatVec::dim)
    }

    /// A point in the relative interior of the generated polyhedron.
    pub fn interior_point(&self) -> RatVec {
        let d = self.dim();
        let n = Rat::from_integer(self.points.len().into());
        let mut c = self
            .points
            .iter()
            .fold(RatVec::zeros(d), |acc, p| acc.add(p))
            .scale(&(Rat::one() / n));
        for r in &self.rays {
            c = c.add(r);
        }
        c
    }

    pub fn flat(&self) -> AffineFlat {
        let mut dirs = self.rays.clone();
        dirs.extend(self.lines.iter().cloned());
        affine_hull(&self.points, &dirs).expect("generators have a point")
    }
}

impl HPolyhedron {
    pub fn whole(dim: usize) -> Self {
        HPolyhedron { dim, inequalities: Vec::new(), equalities: Vec::new() }
    }

    pub fn new(dim: usize, inequalities: Vec<Inequality>, equalities: Vec<Equality>) -> Self {
        HPolyhedron { dim, inequalities, equalities }
    }

    /// The affine flat as a polyhedron.
    pub fn from_flat(flat: &AffineFlat) -> Self {
        let eqs = flat
            .normals()
            .into_iter()
            .map(|n| {
                let o = n.dot(&flat.base);
                Equality::new(n, o)
            })
            .collect();
        HPolyhedron::new(flat.ambient_dim(), Vec::new(), eqs)
    }

    pub fn closed(&self) -> HPolyhedron {
        let mut p = self.clone();
        for i in &mut p.inequalities {
            i.strict = false;
        }
        p
    }

    pub fn has_strict(&self) -> bool {
        self.inequalities.iter().any(|i| i.strict)
    }

    pub fn intersect(&self, other: &HPolyhedron) -> HPolyhedron {
        let mut p = self.clone();
        p.inequalities.extend(other.inequalities.iter().cloned());
        p.equalities.extend(other.equalities.iter().cloned());
        p
    }

    pub fn contains(&self, x: &RatVec) -> bool {
        self.equalities.iter().all(|e| e.normal.dot(x) == e.offset)
            && self.inequalities.iter().all(|i| i.holds(x))
    }

    pub fn contains_closed(&self, x: &RatVec) -> bool {
        self.closed().contains(x)
    }

    pub(crate) fn lp_rows(&self) -> (Vec<Row>, Vec<Row>) {
        let ineqs = self
            .inequalities
            .iter()
            .map(|i| (i.normal.clone(), i.offset.clone()))
            .collect();
        let eqs = self
            .equalities
            .iter()
            .map(|e| (e.normal.clone(), e.offset.clone()))
            .collect();
        (ineqs, eqs)
    }

    /// LP over the closure.
    pub fn maximize(&self, objective: &RatVec) -> LpOutcome {
        let (i, e) = self.lp_rows();
        lp::maximize(self.dim, &i, &e, objective)
    }

    pub fn is_empty_closed(&self) -> bool {
        let (i, e) = self.lp_rows();
        lp::feasible_point(self.dim, &i, &e).is_none()
    }

    /// Emptiness honoring strict inequalities.
    pub fn is_empty(&self) -> bool {
        if self.is_empty_closed() {
            return true;
        }
        // semi-open: empty iff some strict hyperplane contains the whole closure
        let closed = self.closed();
        self.inequalities.iter().filter(|i| i.strict).any(|i| {
            match closed.maximize(&i.normal.neg()) {
                LpOutcome::Optimal { value, .. } => -value >= i.offset,
                _ => false,
            }
        })
    }

    /// Generators of the closure.
    pub fn generators(&self) -> Result<Generators> {
        let d = self.dim;
        let eq_rows: Vec<RatVec> = self.equalities.iter().map(|e| e.normal.clone()).collect();
        let eq_rhs: Vec<Rat> = self.equalities.iter().map(|e| e.offset.clone()).collect();
        let (x0, basis) = linalg::solve_affine(&eq_rows, &eq_rhs, d).ok_or(Error::Empty)?;
        let m = basis.len();
        // homogenized constraints on y = (t, z):  t >= 0,  (b - a.x0) t - (a N) z >= 0
        let mut rows: Vec<RatVec> = vec![RatVec::unit(m + 1, 0)];
        for ineq in &self.inequalities {
            let mut r = vec![&ineq.offset - ineq.normal.dot(&x0)];
            r.extend(basis.iter().map(|b| -ineq.normal.dot(b)));
            rows.push(RatVec(r));
        }
        let lineality = linalg::nullspace(&rows, m + 1);
        let complement = linalg::orth_complement(&lineality, m + 1);
        let reduced: Vec<RatVec> = rows
            .iter()
            .map(|r| RatVec(complement.iter().map(|w| r.dot(w)).collect()))
            .collect();
        let k = complement.len();
        let ext = dd::extreme_rays(&reduced, k);
        let lift = |z: &[Rat]| -> RatVec {
            basis
                .iter()
                .zip(z)
                .fold(RatVec::zeros(d), |acc, (b, c)| acc.axpy(c, b))
        };
        let mut gens = Generators::default();
        for w in ext {
            let y = complement
                .iter()
                .zip(w.iter())
                .fold(RatVec::zeros(m + 1), |acc, (c, wi)| acc.axpy(wi, c));
            let t = y[0].clone();
            if t.is_positive() {
                let z: Vec<Rat> = y.0[1..].iter().map(|v| v / &t).collect();
                gens.points.push(x0.add(&lift(&z)));
            } else {
                gens.rays.push(lift(&y.0[1..]).primitive());
            }
        }
        if gens.points.is_empty() {
            return Err(Error::Empty);
        }
        gens.lines = lineality
            .iter()
            .map(|l| lift(&l.0[1..]).primitive())
            .filter(|l| !l.is_zero())
            .collect();
        gens.points.sort();
        gens.rays.sort();
        Ok(gens)
    }

    pub fn affine_hull(&self) -> Result<AffineFlat> {
        Ok(self.generators()?.flat())
    }

    /// Canonical form: redundancy removed, implicit equalities made explicit,
    /// normals primitive integer vectors in `lin(aff P)`, sorted.
    pub fn canonical(&self) -> Result<HPolyhedron> {
        let closed = self.closed();
        let gens = closed.generators()?;
        let mut canon = hull_from_generators(&gens)?;
        let flat = gens.flat();
        for s in self.inequalities.iter().filter(|i| i.strict) {
            let max = match closed.maximize(&s.normal) {
                LpOutcome::Optimal { value, .. } => value,
                _ => continue,
            };
            if max < s.offset {
                continue;
            }
            let n_lin = flat.project(&s.normal);
            if n_lin.is_zero() {
                return Err(Error::Empty);
            }
            let shift = s.normal.sub(&n_lin).dot(&flat.base);
            let (normal, offset) = scale_primitive(&n_lin, &(&s.offset - shift));
            if let Some(f) = canon
                .inequalities
                .iter_mut()
                .find(|f| f.normal == normal && f.offset == offset)
            {
                f.strict = true;
            } else {
                canon.inequalities.push(Inequality::strict(normal, offset));
            }
        }
        canon.inequalities.sort();
        canon.inequalities.dedup();
        Ok(canon)
    }

    /// Relative-interior query on the closure: a rational ri point and an exact test.
    pub fn ri_query(&self) -> Result<RelInterior> {
        if self.is_empty() {
            return Err(Error::Empty);
        }
        let canon = self.closed().canonical()?;
        let point = canon.generators()?.interior_point();
        Ok(RelInterior { canon, point })
    }

    pub fn recession_cone(&self) -> Result<HPolyhedron> {
        if self.is_empty_closed() {
            return Err(Error::Empty);
        }
        let cone = HPolyhedron {
            dim: self.dim,
            inequalities: self
                .inequalities
                .iter()
                .map(|i| Inequality::new(i.normal.clone(), Rat::zero()))
                .collect(),
            equalities: self
                .equalities
                .iter()
                .map(|e| Equality::new(e.normal.clone(), Rat::zero()))
                .collect(),
        };
        cone.canonical()
    }

    /// Orthogonal projection onto `lin(flat)` by Fourier-Motzkin elimination.
    pub fn fm_project(&self, flat: &AffineFlat) -> Result<HPolyhedron> {
        let d = self.dim;
        let keep = flat.basis.clone();
        let drop = flat.normals();
        let k = keep.len();
        let nvar = k + drop.len();
        // constraints over (y, z) with x = B y + N z
        let conv = |n: &RatVec| -> RatVec {
            RatVec(keep.iter().chain(drop.iter()).map(|b| n.dot(b)).collect())
        };
        let mut ineqs: Vec<Inequality> = self
            .inequalities
            .iter()
            .map(|i| Inequality { normal: conv(&i.normal), offset: i.offset.clone(), strict: i.strict })
            .collect();
        let mut eqs: Vec<Equality> = self
            .equalities
            .iter()
            .map(|e| Equality::new(conv(&e.normal), e.offset.clone()))
            .collect();
        for var in (k..nvar).rev() {
            if let Some(pos) = eqs.iter().position(|e| !e.normal[var].is_zero()) {
                let pivot = eqs.remove(pos);
                let c = pivot.normal[var].clone();
                let subst_n = |n: &RatVec| -> (RatVec, Rat) {
                    let f = &n[var] / &c;
                    (n.sub(&pivot.normal.scale(&f)), f)
                };
                for e in &mut eqs {
                    let (n, f) = subst_n(&e.normal);
                    e.offset = &e.offset - &pivot.offset * f;
                    e.normal = n;
                }
                for i in &mut ineqs {
                    let (n, f) = subst_n(&i.normal);
                    i.offset = &i.offset - &pivot.offset * f;
                    i.normal = n;
                }
            } else {
                let (zero, rest): (Vec<_>, Vec<_>) =
                    ineqs.into_iter().partition(|i| i.normal[var].is_zero());
                let (pos, neg): (Vec<_>, Vec<_>) =
                    rest.into_iter().partition(|i| i.normal[var].is_positive());
                let mut next = zero;
                for p in &pos {
                    for q in &neg {
                        let a = p.normal[var].clone();
                        let b = -q.normal[var].clone();
                        next.push(Inequality {
                            normal: p.normal.scale(&b).add(&q.normal.scale(&a)),
                            offset: &p.offset * &b + &q.offset * &a,
                            strict: p.strict || q.strict,
                        });
                    }
                }
                ineqs = remove_redundant(nvar, next, &eqs);
            }
        }
        // back to x-coordinates on lin(flat): y = G^{-1} B^T x
        let gram: Vec<RatVec> = (0..k)
            .map(|i| RatVec((0..k).map(|j| keep[i].dot(&keep[j])).collect()))
            .collect();
        let ginv = if k > 0 { linalg::inverse(&gram).expect("basis") } else { Vec::new() };
        let to_x = |n: &RatVec| -> Option<RatVec> {
            if (k..nvar).any(|v| !n[v].is_zero()) {
                return None;
            }
            let c: Vec<Rat> = (0..k)
                .map(|i| (0..k).fold(Rat::zero(), |acc, j| acc + &ginv[i][j] * &n[j]))
                .collect();
            Some(keep.iter().zip(&c).fold(RatVec::zeros(d), |acc, (b, ci)| acc.axpy(ci, b)))
        };
        let mut out = HPolyhedron::whole(d);
        for e in eqs {
            let n = to_x(&e.normal).expect("eliminated");
            if n.is_zero() {
                if !e.offset.is_zero() {
                    return Err(Error::Empty);
                }
                continue;
            }
            out.equalities.push(Equality::new(n, e.offset));
        }
        for i in ineqs {
            let n = to_x(&i.normal).expect("eliminated");
            if n.is_zero() {
                let ok = if i.strict { i.offset.is_positive() } else { !i.offset.is_negative() };
                if !ok {
                    return Err(Error::Empty);
                }
                continue;
            }
            out.inequalities.push(Inequality { normal: n, offset: i.offset, strict: i.strict });
        }
        for n in drop {
            out.equalities.push(Equality::new(n, Rat::zero()));
        }
        out.canonical()
    }

    pub fn is_subset_closed(&self, other: &HPolyhedron) -> bool {
        let Ok(g) = self.generators() else {
            return true;
        };
        let o = other.closed();
        g.points.iter().all(|p| o.contains(p))
            && g.rays.iter().all(|r| o.recession_contains(r))
            && g.lines.iter().all(|l| o.recession_contains(l) && o.recession_contains(&l.neg()))
    }

    /// `r` is in the recession cone of the closure.
    pub fn recession_contains(&self, r: &RatVec) -> bool {
        self.equalities.iter().all(|e| e.normal.dot(r).is_zero())
            && self.inequalities.iter().all(|i| !i.normal.dot(r).is_positive())
    }

    pub fn lp_sup(&self, objective: &RatVec) -> Option<Rat> {
        let (i, e) = self.lp_rows();
        lp::sup(self.dim, &i, &e, objective)
    }
}

fn scale_primitive(normal: &RatVec, offset: &Rat) -> (RatVec, Rat) {
    let p = normal.primitive();
    let idx = (0..normal.dim()).find(|&i| !normal[i].is_zero()).expect("nonzero");
    let f = &p[idx] / &normal[idx];
    (p, offset * f)
}

fn remove_redundant(nvar: usize, ineqs: Vec<Inequality>, eqs: &[Equality]) -> Vec<Inequality> {
    let mut uniq: Vec<Inequality> = Vec::new();
    for i in ineqs {
        if i.normal.is_zero() {
            uniq.push(i);
            continue;
        }
        let (n, o) = scale_primitive(&i.normal, &i.offset);
        let cand = Inequality { normal: n, offset: o, strict: i.strict };
        // same normal: keep the tighter
        if let Some(u) = uniq.iter_mut().find(|u| u.normal == cand.normal) {
            if cand.offset < u.offset || (cand.offset == u.offset && cand.strict) {
                *u = cand;
            }
        } else {
            uniq.push(cand);
        }
    }
    let eq_rows: Vec<Row> = eqs.iter().map(|e| (e.normal.clone(), e.offset.clone())).collect();
    let mut kept = uniq;
    let mut idx = 0;
    while idx < kept.len() {
        if kept[idx].normal.is_zero() {
            idx += 1;
            continue;
        }
        let others: Vec<Row> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, i)| (i.normal.clone(), i.offset.clone()))
            .collect();
        let redundant = match lp::maximize(nvar, &others, &eq_rows, &kept[idx].normal) {
            LpOutcome::Optimal { value, .. } => {
                if kept[idx].strict {
                    value < kept[idx].offset
                } else {
                    value <= kept[idx].offset
                }
            }
            LpOutcome::Infeasible { .. } => false,
            LpOutcome::Unbounded { .. } => false,
        };
        if redundant {
            kept.remove(idx);
        } else {
            idx += 1;
        }
    }
    kept
}

/// Closed canonical H-form of `conv(points) + cone(rays) + span(lines)`.
pub fn hull_from_generators(g: &Generators) -> Result<HPolyhedron> {
    let p0 = g.points.first().ok_or(Error::EmptyInput)?;
    let d = p0.dim();
    let flat = g.flat();
    let b = &flat.basis;
    let k = b.len();
    let mut eqs: Vec<Equality> = linalg::rref(
        &flat
            .normals()
            .into_iter()
            .map(|n| {
                let mut v = n.0.clone();
                v.push(n.dot(p0));
                RatVec(v)
            })
            .collect::<Vec<_>>(),
        d + 1,
    )
    .0
    .into_iter()
    .map(|row| {
        let n = RatVec(row.0[..d].to_vec());
        let (n, o) = scale_primitive(&n, &row[d]);
        Equality::new(n, o)
    })
    .collect();
    eqs.sort();
    let mut ineqs = Vec::new();
    if k > 0 {
        let coords = |v: &RatVec| linalg::solve_combination(b, v).expect("in flat");
        let mut vecs: Vec<RatVec> = Vec::new();
        for p in &g.points {
            let mut v = vec![Rat::one()];
            v.extend(coords(&p.sub(p0)));
            vecs.push(RatVec(v));
        }
        for r in &g.rays {
            let mut v = vec![Rat::zero()];
            v.extend(coords(r));
            vecs.push(RatVec(v));
        }
        for l in &g.lines {
            let mut v = vec![Rat::zero()];
            v.extend(coords(l));
            vecs.push(RatVec(v.clone()));
            vecs.push(RatVec(v).neg());
        }
        let gram: Vec<RatVec> = (0..k)
            .map(|i| RatVec((0..k).map(|j| b[i].dot(&b[j])).collect()))
            .collect();
        let ginv = linalg::inverse(&gram).expect("basis");
        for y in dd::extreme_rays(&vecs, k + 1) {
            let yz = &y.0[1..];
            if yz.iter().all(Zero::is_zero) {
                continue;
            }
            // y0 + <w, x - p0> >= 0 with w = B G^{-1} yz
            let c: Vec<Rat> = (0..k)
                .map(|i| (0..k).fold(Rat::zero(), |acc, j| acc + &ginv[i][j] * &yz[j]))
                .collect();
            let w = b.iter().zip(&c).fold(RatVec::zeros(d), |acc, (bi, ci)| acc.axpy(ci, bi));
            let normal = w.neg();
            let offset = &y[0] - w.dot(p0);
            let (n, o) = scale_primitive(&normal, &offset);
            ineqs.push(Inequality::new(n, o));
        }
    }
    ineqs.sort();
    ineqs.dedup();
    Ok(HPolyhedron { dim: d, inequalities: ineqs, equalities: eqs })
}

/// H-representation of `conv(points) + cone(rays)`, canonicalized.
pub fn hull_polyhedron(points: &[RatVec], rays: &[RatVec]) -> Result<HPolyhedron> {
    hull_polyhedron_capped(points, rays, DEFAULT_MAX_DIM)
}

pub fn hull_polyhedron_capped(points: &[RatVec], rays: &[RatVec], max_dim: usize) -> Result<HPolyhedron> {
    let d = points.first().ok_or(Error::EmptyInput)?.dim();
    if d > max_dim {
        return Err(Error::DimensionTooLarge { got: d, max: max_dim });
    }
    let g = Generators {
        points: points.to_vec(),
        rays: rays.iter().filter(|r| !r.is_zero()).cloned().collect(),
        lines: Vec::new(),
    };
    hull_from_generators(&g)
}

/// Exact relative-interior membership against a canonical closure.
#[derive(Clone, Debug)]
pub struct RelInterior {
    pub canon: HPolyhedron,
    pub point: RatVec,
}

impl RelInterior {
    pub fn contains(&self, x: &RatVec) -> bool {
        self.canon.equalities.iter().all(|e| e.normal.dot(x) == e.offset)
            && self.canon.inequalities.iter().all(|i| i.normal.dot(x) < i.offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rat::int;

    fn tri() -> HPolyhedron {
        hull_polyhedron(
            &[RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[2, 0]), RatVec::from_ints(&[0, 2])],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn triangle_h_form() {
        let t = tri();
        assert!(t.equalities.is_empty());
        let want = vec![
            Inequality::new(RatVec::from_ints(&[-1, 0]), int(0)),
            Inequality::new(RatVec::from_ints(&[0, -1]), int(0)),
            Inequality::new(RatVec::from_ints(&[1, 1]), int(2)),
        ];
        let mut want = want;
        want.sort();
        assert_eq!(t.inequalities, want);
    }

    #[test]
    fn fix_ray_hull() {
        let p = hull_polyhedron(
            &[RatVec::from_ints(&[0, 1]), RatVec::from_ints(&[1, 0])],
            &[RatVec::from_ints(&[1, 0])],
        )
        .unwrap();
        let mut want = vec![
            Inequality::new(RatVec::from_ints(&[0, -1]), int(0)),
            Inequality::new(RatVec::from_ints(&[0, 1]), int(1)),
            Inequality::new(RatVec::from_ints(&[-1, -1]), int(-1)),
        ];
        want.sort();
        assert_eq!(p.inequalities, want);
    }

    #[test]
    fn single_point_is_equalities() {
        let p = hull_polyhedron(&[RatVec::from_ints(&[3, -1])], &[]).unwrap();
        assert!(p.inequalities.is_empty());
        assert_eq!(p.equalities.len(), 2);
        assert!(p.contains(&RatVec::from_ints(&[3, -1])));
        assert!(!p.contains(&RatVec::from_ints(&[3, 0])));
    }

    #[test]
    fn dimension_guard() {
        let p = RatVec::zeros(7);
        assert!(matches!(hull_polyhedron(&[p], &[]), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn generators_roundtrip_with_lines() {
        // strip |x2| <= 1 in R^2
        let s = HPolyhedron::new(
            2,
            vec![
                Inequality::new(RatVec::from_ints(&[0, 1]), int(1)),
                Inequality::new(RatVec::from_ints(&[0, -1]), int(1)),
            ],
            vec![],
        );
        let g = s.generators().unwrap();
        assert_eq!(g.lines.len(), 1);
        assert_eq!(g.points.len(), 2);
        assert_eq!(hull_from_generators(&g).unwrap(), s.canonical().unwrap());
        let rec = s.recession_cone().unwrap();
        assert_eq!(rec.equalities, vec![Equality::new(RatVec::from_ints(&[0, 1]), int(0))]);
    }

    #[test]
    fn recession_examples() {
        let p = HPolyhedron::new(
            2,
            vec![
                Inequality::new(RatVec::from_ints(&[1, 0]), int(0)),
                Inequality::new(RatVec::from_ints(&[1, 1]), int(3)),
            ],
            vec![],
        );
        let r = p.recession_cone().unwrap();
        assert!(r.inequalities.iter().all(|i| i.offset.is_zero()));
        assert_eq!(r.inequalities.len(), 2);
        let rt = tri().recession_cone().unwrap();
        assert_eq!(rt.equalities.len(), 2);
    }

    #[test]
    fn fm_projection_examples() {
        let p = HPolyhedron::new(3, vec![Inequality::new(RatVec::from_ints(&[0, 1, 0]), int(0))], vec![]);
        let f = AffineFlat::new(RatVec::zeros(3), &[RatVec::from_ints(&[0, 1, 0])]);
        let q = p.fm_project(&f).unwrap();
        assert_eq!(q.inequalities, vec![Inequality::new(RatVec::from_ints(&[0, 1, 0]), int(0))]);
        assert_eq!(q.equalities.len(), 2);

        let f1 = AffineFlat::new(RatVec::zeros(2), &[RatVec::from_ints(&[1, 0])]);
        let q = tri().fm_project(&f1).unwrap();
        let g = q.generators().unwrap();
        assert_eq!(g.points, vec![RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[2, 0])]);
    }

    #[test]
    fn semi_open_canonical_and_emptiness() {
        let p = HPolyhedron::new(
            1,
            vec![
                Inequality::strict(RatVec::from_ints(&[-1]), int(0)),
                Inequality::new(RatVec::from_ints(&[1]), int(1)),
            ],
            vec![],
        );
        let c = p.canonical().unwrap();
        assert!(c.inequalities.iter().any(|i| i.strict));
        assert!(!c.contains(&int0()));
        let empty = HPolyhedron::new(
            1,
            vec![
                Inequality::strict(RatVec::from_ints(&[-1]), int(0)),
                Inequality::new(RatVec::from_ints(&[1]), int(0)),
            ],
            vec![],
        );
        assert!(empty.is_empty());
        assert!(!empty.is_empty_closed());
    }

    fn int0() -> RatVec {
        RatVec::from_ints(&[0])
    }

    #[test]
    fn ri_examples() {
        let seg = hull_polyhedron(&[RatVec::from_ints(&[0]), RatVec::from_ints(&[1])], &[]).unwrap();
        let ri = seg.ri_query().unwrap();
        assert_eq!(ri.point, RatVec::from_rats(&[(1, 2)]));
        assert!(ri.contains(&RatVec::from_rats(&[(1, 2)])));
        assert!(!ri.contains(&RatVec::from_ints(&[0])));
        let ri = tri().ri_query().unwrap();
        assert_eq!(ri.point, RatVec::from_rats(&[(2, 3), (2, 3)]));
        let pt = hull_polyhedron(&[RatVec::from_ints(&[1, 1])], &[]).unwrap();
        let ri = pt.ri_query().unwrap();
        assert!(ri.contains(&RatVec::from_ints(&[1, 1])));
    }
}

//! Exact two-phase simplex over the rationals (Bland's rule, dense tableau).
//!
//! Problems are stated over free variables `x`:
//! maximize `<c, x>` subject to `<a_i, x> <= b_i` and `<e_j, x> = f_j`.

use num_traits::{One, Signed, Zero};

use super::rat::{Rat, RatVec};

/// A constraint `<normal, x> (<= or =) offset`.
pub type Row = (RatVec, Rat);

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: RatVec, basis: Vec<usize> },
    /// `point` is feasible and `point + t * ray` stays feasible with unbounded objective.
    Unbounded { point: RatVec, ray: RatVec },
    /// Farkas witness: `y >= 0`, `z` free with `A^T y + E^T z = 0` and `<b,y> + <f,z> < 0`.
    Infeasible { ineq_multipliers: Vec<Rat>, eq_multipliers: Vec<Rat> },
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rat::one() / &self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `<cost, y>` over the current basis; columns in `barred` never enter.
    fn optimize(&mut self, cost: &[Rat], barred: &[bool]) -> Phase {
        loop {
            // reduced cost: c_j - sum_i c_B(i) * T[i][j]
            let mut entering = None;
            for j in 0..self.ncols {
                if barred[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        rc -= &cost[b] * &self.rows[i][j];
                    }
                }
                if rc.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return Phase::Unbounded(j),
                Some((i, _)) => self.pivot(i, j),
            }
        }
    }

    fn values(&self) -> Vec<Rat> {
        let mut y = vec![Rat::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            y[b] = self.rhs(i).clone();
        }
        y
    }
}

/// Maximize `<objective, x>` subject to the constraints, with `n` free variables.
pub fn maximize(n: usize, ineqs: &[Row], eqs: &[Row], objective: &RatVec) -> LpOutcome {
    let m = ineqs.len();
    let p = eqs.len();
    // columns: x+ (n), x- (n), slacks (m), artificials (m + p, some unused)
    let n_struct = 2 * n;
    let slack0 = n_struct;
    let art0 = slack0 + m;
    let ncols = art0 + m + p;
    let mut rows = Vec::with_capacity(m + p);
    let mut basis = Vec::with_capacity(m + p);
    let mut used_art = vec![false; ncols];

    let make_row = |a: &RatVec, sign: &Rat| -> Vec<Rat> {
        let mut r = vec![Rat::zero(); ncols + 1];
        for k in 0..n {
            r[k] = &a[k] * sign;
            r[n + k] = -(&a[k] * sign);
        }
        r
    };
    for (i, (a, b)) in ineqs.iter().enumerate() {
        let sign = if b.is_negative() { -Rat::one() } else { Rat::one() };
        let mut r = make_row(a, &sign);
        r[slack0 + i] = sign.clone();
        r[ncols] = b * &sign;
        if sign.is_positive() {
            basis.push(slack0 + i);
        } else {
            r[art0 + i] = Rat::one();
            used_art[art0 + i] = true;
            basis.push(art0 + i);
        }
        rows.push(r);
    }
    for (j, (a, b)) in eqs.iter().enumerate() {
        let sign = if b.is_negative() { -Rat::one() } else { Rat::one() };
        let mut r = make_row(a, &sign);
        r[ncols] = b * &sign;
        r[art0 + m + j] = Rat::one();
        used_art[art0 + m + j] = true;
        basis.push(art0 + m + j);
        rows.push(r);
    }
    let mut t = Tableau { rows, basis, ncols };

    // phase 1
    let is_art = |j: usize| j >= art0;
    let cost1: Vec<Rat> = (0..ncols)
        .map(|j| if is_art(j) && used_art[j] { -Rat::one() } else { Rat::zero() })
        .collect();
    let barred1: Vec<bool> = (0..ncols).map(|j| is_art(j) && !used_art[j]).collect();
    t.optimize(&cost1, &barred1);
    let infeasible = t
        .basis
        .iter()
        .enumerate()
        .any(|(i, &b)| is_art(b) && t.rhs(i).is_positive());
    if infeasible {
        let (y, z) = farkas(n, ineqs, eqs);
        return LpOutcome::Infeasible { ineq_multipliers: y, eq_multipliers: z };
    }
    // drive remaining (zero-valued) artificials out of the basis
    let mut i = 0;
    while i < t.rows.len() {
        if is_art(t.basis[i]) {
            if let Some(j) = (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
                i += 1;
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    // phase 2
    let mut cost2 = vec![Rat::zero(); ncols];
    for k in 0..n {
        cost2[k] = objective[k].clone();
        cost2[n + k] = -objective[k].clone();
    }
    let barred2: Vec<bool> = (0..ncols).map(is_art).collect();
    let phase = t.optimize(&cost2, &barred2);
    let y = t.values();
    let to_x = |y: &[Rat]| RatVec((0..n).map(|k| &y[k] - &y[n + k]).collect());
    let point = to_x(&y);
    match phase {
        Phase::Optimal => LpOutcome::Optimal {
            value: objective.dot(&point),
            point,
            basis: t.basis.clone(),
        },
        Phase::Unbounded(j) => {
            let mut d = vec![Rat::zero(); ncols];
            d[j] = Rat::one();
            for (i, &b) in t.basis.iter().enumerate() {
                d[b] = -t.rows[i][j].clone();
            }
            LpOutcome::Unbounded { point, ray: to_x(&d) }
        }
    }
}

/// Farkas multipliers for an infeasible system (found by solving the alternative system).
fn farkas(n: usize, ineqs: &[Row], eqs: &[Row]) -> (Vec<Rat>, Vec<Rat>) {
    let m = ineqs.len();
    let p = eqs.len();
    let nv = m + p;
    let mut alt_eqs: Vec<Row> = (0..n)
        .map(|k| {
            let mut r: Vec<Rat> = ineqs.iter().map(|(a, _)| a[k].clone()).collect();
            r.extend(eqs.iter().map(|(a, _)| a[k].clone()));
            (RatVec(r), Rat::zero())
        })
        .collect();
    let mut last: Vec<Rat> = ineqs.iter().map(|(_, b)| b.clone()).collect();
    last.extend(eqs.iter().map(|(_, f)| f.clone()));
    alt_eqs.push((RatVec(last), -Rat::one()));
    let alt_ineqs: Vec<Row> = (0..m)
        .map(|i| (RatVec::unit(nv, i).neg(), Rat::zero()))
        .collect();
    match maximize(nv, &alt_ineqs, &alt_eqs, &RatVec::zeros(nv)) {
        LpOutcome::Optimal { point, .. } => {
            let v = point.0;
            (v[..m].to_vec(), v[m..].to_vec())
        }
        other => unreachable!("Farkas alternative must be feasible, got {other:?}"),
    }
}

pub fn feasible_point(n: usize, ineqs: &[Row], eqs: &[Row]) -> Option<RatVec> {
    match maximize(n, ineqs, eqs, &RatVec::zeros(n)) {
        LpOutcome::Optimal { point, .. } => Some(point),
        LpOutcome::Unbounded { point, .. } => Some(point),
        LpOutcome::Infeasible { .. } => None,
    }
}

/// Supremum of `<objective, x>`: `Some(value)` when finite, `None` when unbounded or infeasible.
pub fn sup(n: usize, ineqs: &[Row], eqs: &[Row], objective: &RatVec) -> Option<Rat> {
    match maximize(n, ineqs, eqs, objective) {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rat::int;

    fn triangle() -> Vec<Row> {
        vec![
            (RatVec::from_ints(&[-1, 0]), int(0)),
            (RatVec::from_ints(&[0, -1]), int(0)),
            (RatVec::from_ints(&[1, 1]), int(2)),
        ]
    }

    #[test]
    fn max_x1_over_triangle() {
        match maximize(2, &triangle(), &[], &RatVec::from_ints(&[1, 0])) {
            LpOutcome::Optimal { value, point, .. } => {
                assert_eq!(value, int(2));
                assert_eq!(point, RatVec::from_ints(&[2, 0]));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn unbounded_ray() {
        // {x2 >= 0, x2 <= 1, x1 + x2 >= 1}
        let rows = vec![
            (RatVec::from_ints(&[0, -1]), int(0)),
            (RatVec::from_ints(&[0, 1]), int(1)),
            (RatVec::from_ints(&[-1, -1]), int(-1)),
        ];
        match maximize(2, &rows, &[], &RatVec::from_ints(&[1, 0])) {
            LpOutcome::Unbounded { ray, point } => {
                assert_eq!(ray.primitive(), RatVec::from_ints(&[1, 0]));
                for (a, b) in &rows {
                    assert!(a.dot(&point) <= *b);
                    assert!(a.dot(&ray) <= Rat::zero());
                }
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        // x <= 0, x >= 1
        let rows = vec![(RatVec::from_ints(&[1]), int(0)), (RatVec::from_ints(&[-1]), int(-1))];
        match maximize(1, &rows, &[], &RatVec::from_ints(&[0])) {
            LpOutcome::Infeasible { ineq_multipliers: y, .. } => {
                assert!(y.iter().all(|v| !v.is_negative()));
                let combo: Rat = rows.iter().zip(&y).map(|((a, _), yi)| &a[0] * yi).sum();
                assert!(combo.is_zero());
                let rhs: Rat = rows.iter().zip(&y).map(|((_, b), yi)| b * yi).sum();
                assert!(rhs.is_negative());
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn equalities_respected() {
        let eqs = vec![(RatVec::from_ints(&[1, 1]), int(1))];
        let ineqs = vec![(RatVec::from_ints(&[-1, 0]), int(0)), (RatVec::from_ints(&[0, -1]), int(0))];
        match maximize(2, &ineqs, &eqs, &RatVec::from_ints(&[0, 1])) {
            LpOutcome::Optimal { value, point, .. } => {
                assert_eq!(value, int(1));
                assert_eq!(point, RatVec::from_ints(&[0, 1]));
            }
            o => panic!("{o:?}"),
        }
    }
}

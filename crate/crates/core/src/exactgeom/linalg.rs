//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use super::rat::{Rat, RatVec};

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[RatVec], ncols: usize) -> (Vec<RatVec>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|r| r.0.clone()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m.into_iter().map(RatVec).collect(), pivots)
}

pub fn rank(rows: &[RatVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : <row, x> = 0 for all rows}`.
pub fn nullspace(rows: &[RatVec], ncols: usize) -> Vec<RatVec> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = RatVec::zeros(ncols);
            v[f] = Rat::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Echelon basis of the span of `vectors`.
pub fn span_basis(vectors: &[RatVec], ncols: usize) -> Vec<RatVec> {
    rref(vectors, ncols).0
}

pub fn orth_complement(basis: &[RatVec], d: usize) -> Vec<RatVec> {
    nullspace(basis, d)
}

pub fn in_span(v: &RatVec, basis: &[RatVec]) -> bool {
    let d = v.dim();
    let mut rows = basis.to_vec();
    let r0 = rank(&rows, d);
    rows.push(v.clone());
    rank(&rows, d) == r0
}

/// Solves `sum_i c_i * cols[i] = v`, returning one solution if any exists.
pub fn solve_combination(cols: &[RatVec], v: &RatVec) -> Option<Vec<Rat>> {
    let d = v.dim();
    let n = cols.len();
    // rows of the augmented system [cols | v]
    let rows: Vec<RatVec> = (0..d)
        .map(|i| {
            let mut r: Vec<Rat> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(v[i].clone());
            RatVec(r)
        })
        .collect();
    let (r, pivots) = rref(&rows, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut sol = vec![Rat::zero(); n];
    for (row, &p) in r.iter().zip(&pivots) {
        sol[p] = row[n].clone();
    }
    Some(sol)
}

/// Solves `A x = b` with `A` given by rows. Returns a particular solution and
/// a nullspace basis, or `None` when inconsistent.
pub fn solve_affine(rows: &[RatVec], rhs: &[Rat], ncols: usize) -> Option<(RatVec, Vec<RatVec>)> {
    let aug: Vec<RatVec> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.0.clone();
            v.push(b.clone());
            RatVec(v)
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = RatVec::zeros(ncols);
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some((x, nullspace(rows, ncols)))
}

/// Orthogonal projection of `v` onto the span of `basis` (any spanning set).
pub fn project_onto_span(v: &RatVec, basis: &[RatVec]) -> RatVec {
    let d = v.dim();
    let b = span_basis(basis, d);
    if b.is_empty() {
        return RatVec::zeros(d);
    }
    // Gram system G c = B^T v
    let k = b.len();
    let gram: Vec<RatVec> = (0..k)
        .map(|i| RatVec((0..k).map(|j| b[i].dot(&b[j])).collect()))
        .collect();
    let rhs: Vec<Rat> = b.iter().map(|bi| bi.dot(v)).collect();
    let (c, _) = solve_affine(&gram, &rhs, k).expect("Gram matrix of a basis is nonsingular");
    b.iter()
        .zip(c.iter())
        .fold(RatVec::zeros(d), |acc, (bi, ci)| acc.axpy(ci, bi))
}

/// Inverse of a square matrix given by rows, if nonsingular.
pub fn inverse(rows: &[RatVec]) -> Option<Vec<RatVec>> {
    let n = rows.len();
    let aug: Vec<RatVec> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.0.clone();
            v.extend(RatVec::unit(n, i).0);
            RatVec(v)
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| RatVec(row.0[n..].to_vec())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rat::{int, rat};

    #[test]
    fn nullspace_of_plane() {
        let rows = vec![RatVec::from_ints(&[1, 1, 1])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(rows[0].dot(v).is_zero());
        }
    }

    #[test]
    fn projection_examples() {
        let p = project_onto_span(&RatVec::from_ints(&[1, 1]), &[RatVec::from_ints(&[1, 0])]);
        assert_eq!(p, RatVec::from_ints(&[1, 0]));
        let p = project_onto_span(
            &RatVec::from_ints(&[1, 1, 1]),
            &[RatVec::from_ints(&[1, 0, 0]), RatVec::from_ints(&[0, 1, 0])],
        );
        assert_eq!(p, RatVec::from_ints(&[1, 1, 0]));
        let p = project_onto_span(&RatVec::from_ints(&[1, 1]), &[RatVec::from_ints(&[1, -1])]);
        assert!(p.is_zero());
        let p = project_onto_span(&RatVec::from_ints(&[2, 0]), &[RatVec::from_ints(&[1, 1])]);
        assert_eq!(p, RatVec::from_ints(&[1, 1]));
        assert!(project_onto_span(&RatVec::from_ints(&[3, 4]), &[]).is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = vec![RatVec::from_ints(&[2, 1]), RatVec::from_ints(&[1, 1])];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[0], RatVec(vec![int(1), int(-1)]));
        assert_eq!(inv[1], RatVec(vec![int(-1), int(2)]));
        assert!(inverse(&[RatVec::from_ints(&[1, 2]), RatVec::from_ints(&[2, 4])]).is_none());
        let _ = rat(1, 2);
    }
}

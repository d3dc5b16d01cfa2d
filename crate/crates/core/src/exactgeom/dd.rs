//! Double description: extreme rays of a pointed cone `{y : <a_i, y> >= 0}`.

use num_traits::{Signed, Zero};

use super::linalg;
use super::rat::{Rat, RatVec};

struct Ray {
    v: RatVec,
    zeros: Vec<usize>,
}

/// Extreme rays of `{y in R^dim : <a, y> >= 0 for a in constraints}`.
///
/// The constraint matrix must have rank `dim` (the cone is pointed); rays are
/// returned as primitive integer vectors in sorted order.
pub fn extreme_rays(constraints: &[RatVec], dim: usize) -> Vec<RatVec> {
    if dim == 0 {
        return Vec::new();
    }
    // greedy independent initial rows
    let mut init: Vec<usize> = Vec::new();
    let mut chosen: Vec<RatVec> = Vec::new();
    for (i, a) in constraints.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        chosen.push(a.clone());
        if linalg::rank(&chosen, dim) == chosen.len() {
            init.push(i);
            if init.len() == dim {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    assert_eq!(init.len(), dim, "extreme_rays requires a pointed cone");
    let inv = linalg::inverse(&chosen).expect("independent rows");
    // columns of the inverse
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let v = RatVec((0..dim).map(|i| inv[i][j].clone()).collect());
            let zeros = init.iter().copied().filter(|&k| constraints[k].dot(&v).is_zero()).collect();
            Ray { v: v.primitive(), zeros }
        })
        .collect();
    let mut processed: Vec<usize> = init.clone();

    for (i, a) in constraints.iter().enumerate() {
        if init.contains(&i) {
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|r| a.dot(&r.v)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zeros.push(i);
                }
            }
            processed.push(i);
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for (r, v) in rays.iter().zip(&vals) {
            if !v.is_negative() {
                let mut zeros = r.zeros.clone();
                if v.is_zero() {
                    zeros.push(i);
                }
                next.push(Ray { v: r.v.clone(), zeros });
            }
        }
        for (p, vp) in rays.iter().zip(&vals).filter(|(_, v)| v.is_positive()) {
            for (q, vq) in rays.iter().zip(&vals).filter(|(_, v)| v.is_negative()) {
                let common: Vec<usize> =
                    p.zeros.iter().copied().filter(|k| q.zeros.contains(k)).collect();
                if common.len() + 2 < dim {
                    continue;
                }
                let rows: Vec<RatVec> = common.iter().map(|&k| constraints[k].clone()).collect();
                if linalg::rank(&rows, dim) != dim - 2 {
                    continue;
                }
                // <a, new> = 0
                let v = q.v.scale(vp).sub(&p.v.scale(vq)).primitive();
                let mut zeros = common;
                zeros.push(i);
                next.push(Ray { v, zeros });
            }
        }
        rays = next;
        processed.push(i);
    }
    let mut out: Vec<RatVec> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_cone() {
        // homogenized unit square: t >= 0 implied by x >= 0, t - x >= 0
        let cons = vec![
            RatVec::from_ints(&[0, 1, 0]),
            RatVec::from_ints(&[0, 0, 1]),
            RatVec::from_ints(&[1, -1, 0]),
            RatVec::from_ints(&[1, 0, -1]),
        ];
        let rays = extreme_rays(&cons, 3);
        assert_eq!(rays.len(), 4);
        assert!(rays.contains(&RatVec::from_ints(&[1, 1, 1])));
        assert!(rays.contains(&RatVec::from_ints(&[1, 0, 0])));
    }

    #[test]
    fn orthant() {
        let cons: Vec<RatVec> = (0..3).map(|i| RatVec::unit(3, i)).collect();
        assert_eq!(extreme_rays(&cons, 3), {
            let mut v: Vec<RatVec> = (0..3).map(|i| RatVec::unit(3, i)).collect();
            v.sort();
            v
        });
    }
}

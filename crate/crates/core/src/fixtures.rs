//! Named measures and parameter sets shared by the CLI, the suites and tests.

use crate::error::{Error, Result};
use crate::exactgeom::poly::{Equality, HPolyhedron, Inequality};
use crate::exactgeom::rat::{int, RatVec};
use crate::expfam::param::ParamSet;
use crate::measure::{Atom, AtomFamily, MixedMeasure, Weight};

pub const NAMES: [&str; 5] = ["seg", "tri", "line", "ray", "ex3d"];

/// Atoms 0 and 1.
pub fn seg() -> MixedMeasure {
    MixedMeasure::finite(&[RatVec::from_ints(&[0]), RatVec::from_ints(&[1])]).validate().expect("valid fixture")
}

/// Atoms (0,0), (2,0), (0,2).
pub fn tri() -> MixedMeasure {
    MixedMeasure::finite(&[RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[2, 0]), RatVec::from_ints(&[0, 2])])
        .validate()
        .expect("valid fixture")
}

/// Atoms (0,0), (1,1): a family of lower dimension than the space.
pub fn line() -> MixedMeasure {
    MixedMeasure::finite(&[RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[1, 1])]).validate().expect("valid fixture")
}

/// Atom (0,1) and the ray (k,0) with weights 1/k^2.
pub fn ray() -> MixedMeasure {
    MixedMeasure::new(
        2,
        vec![Atom { point: RatVec::from_ints(&[0, 1]), weight: Weight::one() }],
        vec![AtomFamily::ray(RatVec::zeros(2), RatVec::from_ints(&[1, 0]), int(1), int(2), int(1))],
    )
    .validate()
    .expect("valid fixture")
}

/// Atom (-1,0,0), the ray (0,k,0) with weights 1/k^2 and the curve
/// (k, k^2, -1) with weights 2/k^3.
pub fn ex3d() -> MixedMeasure {
    MixedMeasure::new(
        3,
        vec![Atom { point: RatVec::from_ints(&[-1, 0, 0]), weight: Weight::one() }],
        vec![
            AtomFamily::ray(RatVec::zeros(3), RatVec::from_ints(&[0, 1, 0]), int(1), int(2), int(1)),
            AtomFamily::curve(
                RatVec::from_ints(&[0, 0, -1]),
                RatVec::from_ints(&[1, 0, 0]),
                RatVec::from_ints(&[0, 1, 0]),
                int(1),
                int(3),
                int(2),
            ),
        ],
    )
    .validate()
    .expect("valid fixture")
}

pub fn by_name(name: &str) -> Result<MixedMeasure> {
    match name.to_ascii_lowercase().trim_start_matches("fix-") {
        "seg" => Ok(seg()),
        "tri" => Ok(tri()),
        "line" => Ok(line()),
        "ray" => Ok(ray()),
        "ex3d" => Ok(ex3d()),
        other => Err(Error::InvalidInput(format!("unknown fixture '{other}'"))),
    }
}

/// The access chain to the non-exposed face `{(0,t,0)}` of `ex3d`.
pub fn ex3d_chain() -> Vec<RatVec> {
    vec![RatVec::from_ints(&[0, 0, 1]), RatVec::from_ints(&[1, 0, 0])]
}

/// `{(t1, 0, t3) : t1 <= 0}`.
pub fn ex3d_narrowed(mu: &MixedMeasure) -> Result<ParamSet> {
    let user = HPolyhedron::new(
        3,
        vec![Inequality::new(RatVec::from_ints(&[1, 0, 0]), int(0))],
        vec![Equality::new(RatVec::from_ints(&[0, 1, 0]), int(0))],
    );
    ParamSet::new(mu, user, true)
}

/// `{|t2| <= 1}`.
pub fn strip(mu: &MixedMeasure) -> Result<ParamSet> {
    let user = HPolyhedron::new(
        2,
        vec![
            Inequality::new(RatVec::from_ints(&[0, 1]), int(1)),
            Inequality::new(RatVec::from_ints(&[0, -1]), int(1)),
        ],
        vec![],
    );
    ParamSet::new(mu, user, true)
}

/// `{t h : t >= 0}`.
pub fn halfline(mu: &MixedMeasure, h: &RatVec) -> Result<ParamSet> {
    let d = h.dim();
    let mut eqs = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            // h_j x_i - h_i x_j = 0 pins x to the line through h
            let mut n = RatVec::zeros(d);
            n.0[i] = h[j].clone();
            n.0[j] = -h[i].clone();
            if !n.is_zero() {
                eqs.push(Equality::new(n, int(0)));
            }
        }
    }
    let user = HPolyhedron::new(d, vec![Inequality::new(h.neg(), int(0))], eqs);
    ParamSet::new(mu, user, true)
}

/// The half-line used for each fixture in the oracle runs.
pub fn default_halfline(name: &str) -> RatVec {
    match name {
        "seg" => RatVec::from_ints(&[1]),
        "ray" => RatVec::from_ints(&[-1, 1]),
        "ex3d" => RatVec::from_ints(&[0, -1, 0]),
        _ => RatVec::from_ints(&[1, 1]),
    }
}

/// Named parameter sets for a fixture: `theta`, `halfline` and, in the
/// plane, `strip`.
pub fn param_sets(name: &str, mu: &MixedMeasure) -> Result<Vec<(&'static str, ParamSet)>> {
    let mut out = vec![("theta", ParamSet::theta(mu)?), ("halfline", halfline(mu, &default_halfline(name))?)];
    if mu.dim == 2 {
        out.push(("strip", strip(mu)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        for n in NAMES {
            let mu = by_name(n).unwrap();
            assert!(param_sets(n, &mu).unwrap().len() >= 2);
        }
        assert!(by_name("FIX-TRI").is_ok());
        assert!(by_name("nope").is_err());
        let s = seg();
        let h = halfline(&s, &RatVec::from_ints(&[1])).unwrap();
        assert!(h.contains(&RatVec::from_ints(&[3])) && !h.contains(&RatVec::from_ints(&[-1])));
        let t = tri();
        let h = halfline(&t, &RatVec::from_ints(&[1, 1])).unwrap();
        assert!(h.contains(&RatVec::from_ints(&[2, 2])) && !h.contains(&RatVec::from_ints(&[2, 1])));
    }
}

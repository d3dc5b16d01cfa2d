use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::rat::{Rat, RatVec};
use crate::measure::{convex_support, AtomFamily, MixedMeasure};

use super::FaceHandle;

/// `sup_k <tau, atom(k)>` for one family with the maximizing index, or
/// `None` if unbounded. `Some((v, None))` means the value is attained for
/// every `k`.
fn family_sup(f: &AtomFamily, tau: &RatVec) -> Option<(Rat, Option<Vec<u64>>)> {
    let c0 = tau.dot(&f.base);
    let c1 = tau.dot(&f.lin);
    let c2 = tau.dot(&f.quad);
    let g = |k: u64| {
        let kr = Rat::from_integer(BigInt::from(k));
        &c0 + &c1 * &kr + &c2 * &kr * &kr
    };
    match c2.cmp(&Rat::zero()) {
        Ordering::Greater => None,
        Ordering::Equal => match c1.cmp(&Rat::zero()) {
            Ordering::Greater => None,
            Ordering::Equal => Some((c0, None)),
            Ordering::Less => Some((g(1), Some(vec![1]))),
        },
        Ordering::Less => {
            // concave in k: the best integers sit next to -c1 / (2 c2)
            let vertex = -&c1 / (Rat::from_integer(2.into()) * &c2);
            let lo = vertex.floor().to_integer();
            let mut cands: Vec<u64> = [lo.clone(), lo + BigInt::one()]
                .iter()
                .map(|k| if k < &BigInt::one() { 1 } else { k.to_u64().unwrap_or(u64::MAX) })
                .collect();
            cands.push(1);
            cands.sort_unstable();
            cands.dedup();
            let best = cands.iter().map(|&k| g(k)).max().expect("candidates");
            let ks = cands.into_iter().filter(|&k| g(k) == best).collect();
            Some((best, Some(ks)))
        }
    }
}

/// `max <tau, x>` over the atoms of the measure.
pub fn support_value(mu: &MixedMeasure, tau: &RatVec) -> Result<Rat> {
    let mut best: Option<Rat> = mu.atoms.iter().map(|a| tau.dot(&a.point)).max();
    for f in &mu.families {
        let (v, _) = family_sup(f, tau).ok_or(Error::UnboundedDirection)?;
        best = Some(match best {
            Some(b) if b >= v => b,
            _ => v,
        });
    }
    best.ok_or(Error::EmptyInput)
}

/// The face of `face` maximizing `<tau, .>`.
pub fn expose(face: &FaceHandle, tau: &RatVec) -> Result<FaceHandle> {
    let mu = &face.restricted;
    if tau.dim() != mu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, got: tau.dim() });
    }
    if tau.is_zero() {
        return Err(Error::ZeroDirection);
    }
    if !face.flat.lin_contains(tau) {
        return Err(Error::NotInLin);
    }
    let m = support_value(mu, tau)?;
    let cut = face.flat.intersect_hyperplane(tau, &m).expect("the maximum is attained");
    let restricted = mu.restrict(&cut)?;
    let flat = restricted.affine_hull();
    let mut chain = face.chain.clone();
    chain.push(tau.clone());
    Ok(FaceHandle { chain, restricted, flat })
}

/// Folds `expose` over the directions starting from the whole core.
pub fn verify_access_sequence(mu: &MixedMeasure, seq: &[RatVec]) -> Result<FaceHandle> {
    let mut f = FaceHandle::top(mu);
    for (i, tau) in seq.iter().enumerate() {
        f = expose(&f, tau).map_err(|e| Error::AccessStep { index: i + 1, source: Box::new(e) })?;
    }
    Ok(f)
}

/// All faces of the convex core, top first, by decreasing dimension. Each
/// face is reached through facets of the supports of the faces above it.
pub fn enumerate_faces(mu: &MixedMeasure) -> Result<Vec<FaceHandle>> {
    if mu.has_curves() {
        return Err(Error::Unsupported("face enumeration needs a polyhedral support".into()));
    }
    let top = FaceHandle::top(mu);
    let mut found: Vec<FaceHandle> = vec![top.clone()];
    let mut queue = VecDeque::from([top]);
    while let Some(f) = queue.pop_front() {
        if f.dim() == 0 {
            continue;
        }
        let cs = convex_support(&f.restricted)?.polyhedron()?.canonical()?;
        for ineq in &cs.inequalities {
            let g = expose(&f, &ineq.normal)?;
            if !found.iter().any(|h| h.same_face(&g)) {
                found.push(g.clone());
                queue.push_back(g);
            }
        }
    }
    found.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.chain.cmp(&b.chain)));
    Ok(found)
}

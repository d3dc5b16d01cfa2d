use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactgeom::rat::{fmt_rat, Rat};
use crate::interval::{Interval, LogAcc};

/// One summand `coef * k^(-alpha)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Term {
    k: u64,
    alpha: Rat,
    coef: Rat,
}

/// A positive atom weight `sum coef_i * k_i^(-alpha_i)`; plain rationals have a
/// single term with `k = 1`. Family atoms with fractional `alpha` need the
/// power factor, which is irrational.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    terms: Vec<Term>,
}

impl Weight {
    pub fn rational(q: Rat) -> Self {
        Weight { terms: vec![Term { k: 1, alpha: Rat::zero(), coef: q }] }
    }

    /// `coef * k^(-alpha)`, folded to a rational when exact.
    pub fn power(coef: Rat, k: u64, alpha: &Rat) -> Self {
        let mut w = Weight { terms: vec![Term { k, alpha: alpha.clone(), coef }] };
        w.normalize();
        w
    }

    fn normalize(&mut self) {
        for t in &mut self.terms {
            if t.k == 1 || t.alpha.is_zero() {
                t.k = 1;
                t.alpha = Rat::zero();
            } else if t.alpha.is_integer() {
                let e = t.alpha.to_integer();
                let kb = BigInt::from(t.k);
                let p = num_traits::pow(kb, e.abs().to_usize().expect("small exponent"));
                let p = Rat::from_integer(p);
                t.coef = if e.is_positive() { &t.coef / p } else { &t.coef * p };
                t.k = 1;
                t.alpha = Rat::zero();
            }
        }
        self.terms.sort_by(|a, b| (a.k, &a.alpha).cmp(&(b.k, &b.alpha)));
        let mut out: Vec<Term> = Vec::new();
        for t in self.terms.drain(..) {
            match out.last_mut() {
                Some(l) if l.k == t.k && l.alpha == t.alpha => l.coef += t.coef,
                _ => out.push(t),
            }
        }
        self.terms = out;
    }

    pub fn add(&self, o: &Weight) -> Weight {
        let mut w = Weight { terms: self.terms.iter().chain(&o.terms).cloned().collect() };
        w.normalize();
        w
    }

    pub fn is_positive(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(|t| t.coef.is_positive())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        match self.terms.as_slice() {
            [t] if t.k == 1 => Some(t.coef.clone()),
            _ => None,
        }
    }

    /// Enclosure of `ln(weight)`.
    pub fn ln(&self) -> Interval {
        let mut acc = LogAcc::zero();
        for t in &self.terms {
            let mut l = Interval::from_rat(&t.coef).ln();
            if t.k != 1 {
                l = l - Interval::from_rat(&t.alpha) * Interval::point(t.k as f64).ln();
            }
            acc.add_log(l);
        }
        acc.ln()
    }

    pub fn value(&self) -> Interval {
        self.ln().exp()
    }

    pub fn one() -> Self {
        Weight::rational(Rat::one())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                if t.k == 1 {
                    fmt_rat(&t.coef)
                } else {
                    format!("{}*{}^(-{})", fmt_rat(&t.coef), t.k, fmt_rat(&t.alpha))
                }
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

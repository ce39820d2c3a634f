//! Nickel's singularity locus and the modular invariant of the Ising model.

use num_traits::{One, Zero};

use super::LatticeError;
use crate::exactalg::{
    int, invert_mod, kernel_basis, AlgebraicPoint, InvertError, Location, Poly, RatMatrix,
    Rational,
};

/// The `k`-th cyclotomic polynomial.
fn cyclotomic(k: usize) -> Poly {
    let mut p = &Poly::monomial(Rational::one(), k) - &Poly::one();
    for d in 1..k {
        if k % d == 0 {
            p = p.exact_div(&cyclotomic(d)).expect("cyclotomic divisor");
        }
    }
    p
}

/// Minimal polynomial over Q of `t` in the field `Q[x]/(modulus)`.
fn minimal_polynomial(t: &Poly, modulus: &Poly) -> Poly {
    let d = modulus.deg().unwrap();
    let mut powers = vec![Poly::one()];
    loop {
        let next = (&powers[powers.len() - 1] * t).rem(modulus);
        powers.push(next);
        let m = RatMatrix::from_fn(d.max(1), powers.len(), |i, j| powers[j].coeff(i));
        if let Some(v) = kernel_basis(&m).first() {
            return Poly::new(v.clone()).normalized_factor();
        }
    }
}

/// Finite solutions of `1/w = u^k + u^-k + u^m + u^-m` with `u^(2n+1) = 1`,
/// `-n <= k, m <= n`, `(k, m) != (0, 0)`. Rational points come first in
/// increasing order, then conjugate sets by degree.
pub fn nickel_singularities(n: usize) -> Vec<Location> {
    assert!(n >= 1, "n must be at least 1");
    let order = 2 * n + 1;
    let phi = cyclotomic(order);
    let ni = n as i64;
    let mut polys: Vec<Poly> = Vec::new();
    for k in -ni..=ni {
        for m in -ni..=ni {
            if k == 0 && m == 0 {
                continue;
            }
            let pw = |e: i64| {
                Poly::monomial(Rational::one(), e.rem_euclid(order as i64) as usize).rem(&phi)
            };
            let t = &(&pw(k) + &pw(-k)) + &(&pw(m) + &pw(-m));
            let t = t.rem(&phi);
            // w = 1/t: reverse the minimal polynomial of t; t = 0 is w = ∞.
            let mt = minimal_polynomial(&t, &phi);
            if mt.coeff(0).is_zero() {
                continue;
            }
            let d = mt.deg().unwrap();
            let mw = mt.reversed(d + 1).normalized_factor();
            if !polys.contains(&mw) {
                polys.push(mw);
            }
        }
    }
    let mut out: Vec<Location> = polys
        .into_iter()
        .map(|p| {
            if p.deg() == Some(1) {
                Location::Finite(-p.coeff(0) / p.coeff(1))
            } else {
                Location::Algebraic(AlgebraicPoint::new(&p))
            }
        })
        .collect();
    out.sort();
    out
}

/// Value of the modular invariant, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModularValue {
    Finite(Rational),
    Infinity,
}

fn modular_parts() -> (Poly, Poly) {
    let q = Poly::from_ints(&[1, 0, -16, 0, 16]);
    let num = q.pow(3);
    let den = Poly::monomial(int(1728), 8) * Poly::from_ints(&[1, 0, -16]);
    (num, den)
}

/// `M = (1 - 16w² + 16w⁴)³ / (1728 w⁸ (1 - 16w²))`. At an algebraic point the
/// value is computed in `Q[w]/(min_poly)` and must be a scalar.
pub fn modular_invariant(pt: &Location) -> Result<ModularValue, LatticeError> {
    let (num, den) = modular_parts();
    match pt {
        Location::Infinity => Ok(ModularValue::Infinity),
        Location::Finite(w) => {
            let d = den.eval(w);
            if d.is_zero() {
                Ok(ModularValue::Infinity)
            } else {
                Ok(ModularValue::Finite(num.eval(w) / d))
            }
        }
        Location::Algebraic(a) => {
            let p = &a.min_poly;
            match invert_mod(&den.rem(p), p) {
                Ok(inv) => {
                    let r = (&num * &inv).rem(p);
                    if r.is_constant() {
                        Ok(ModularValue::Finite(r.coeff(0)))
                    } else {
                        Err(LatticeError::NonScalarResidue(r.to_string()))
                    }
                }
                Err(InvertError::ZeroDivisor) => Ok(ModularValue::Infinity),
                Err(InvertError::DiscoveredFactor(f)) => Err(LatticeError::MixedPoint(f.to_string())),
            }
        }
    }
}

use num_traits::{One, Signed, ToPrimitive};

use super::{analyze, FrobeniusError, PointKind};
use crate::diffop::{DiffOp, RatFunc};
use crate::exactalg::{kernel_basis, Location, Poly, RatMatrix, Rational};

/// Basis of the rational-function solutions of `L y = 0`.
///
/// The denominator is bounded by the most negative integer exponent at each
/// finite singular point, the numerator degree by the smallest integer
/// exponent at infinity; the numerator then solves a linear system.
pub fn rational_solutions(l: &DiffOp) -> Result<Vec<RatFunc>, FrobeniusError> {
    let a = analyze(l)?;
    let q = l.order().unwrap();
    let mut den = Poly::one();
    let mut inf_min: Option<Rational> = None;
    for p in &a.points {
        if p.kind == PointKind::Irregular {
            return Err(FrobeniusError::Irregular(p.location.clone()));
        }
        let min_int = p
            .exponents
            .iter()
            .map(|(r, _)| r)
            .filter(|r| r.is_integer())
            .min()
            .cloned();
        match &p.location {
            Location::Infinity => inf_min = min_int,
            loc => {
                let Some(e) = min_int else { continue };
                if !e.is_negative() {
                    continue;
                }
                let f = match loc {
                    Location::Finite(r) => Poly::linear(-r.clone(), Rational::one()),
                    Location::Algebraic(pt) => pt.min_poly.clone(),
                    Location::Infinity => unreachable!(),
                };
                let k = (-e).to_integer().to_u32().expect("small exponent");
                den = &den * &f.pow(k);
            }
        }
    }
    let Some(e_inf) = inf_min else {
        return Ok(vec![]);
    };
    // N/D ~ w^(deg N − deg D) = v^(−ρ∞)
    let bound = den.deg().unwrap() as i64 - e_inf.to_integer().to_i64().expect("small exponent");
    if bound < 0 {
        return Ok(vec![]);
    }
    let n = bound as usize + 1;
    let dd = den.derivative();
    let dpow: Vec<Poly> = (0..=q).map(|k| den.pow(k as u32)).collect();
    let columns: Vec<Poly> = (0..n)
        .map(|i| {
            // (N/D)^(k) = T_k / D^(k+1), T_{k+1} = T_k' D − (k+1) T_k D'
            let mut t = Poly::monomial(Rational::one(), i);
            let mut acc = Poly::zero();
            for k in 0..=q {
                acc = &acc + &(&(&l.coeff(k) * &t) * &dpow[q - k]);
                let kk = Rational::from_integer(((k + 1) as i64).into());
                t = &(&t.derivative() * &den) - &(&t * &dd).scale(&kk);
            }
            acc
        })
        .collect();
    let rows = columns.iter().filter_map(|c| c.deg()).max().map_or(0, |d| d + 1);
    let m = RatMatrix::from_fn(rows, n, |r, c| columns[c].coeff(r));
    let mut out: Vec<RatFunc> = kernel_basis(&m)
        .into_iter()
        .map(|v| RatFunc::new(Poly::new(v), den.clone()))
        .collect();
    out.retain(|f| !f.is_zero());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_with_rational_solution() {
        // y = 1/(1 − 2w)²: (1 − 2w) y' − 4 y = 0
        let l = DiffOp::from_ints(&[&[-4], &[1, -2]]);
        let sols = rational_solutions(&l).unwrap();
        assert_eq!(sols.len(), 1);
        let expected = RatFunc::new(Poly::one(), Poly::from_ints(&[1, -4, 4]));
        assert_eq!(sols[0].denominator(), expected.denominator());
        assert!(sols[0].numerator().is_constant());
        assert!(!sols[0].numerator().is_zero());
    }

    #[test]
    fn no_rational_solution_for_sqrt() {
        // y = √(1 − w): 2(1 − w) y' + y = 0
        let l = DiffOp::from_ints(&[&[1], &[2, -2]]);
        assert!(rational_solutions(&l).unwrap().is_empty());
    }
}

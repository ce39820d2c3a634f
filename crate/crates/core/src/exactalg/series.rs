use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Poly, Rational};

/// Truncated power series: the coefficients of `w^0 .. w^N` are known, nothing
/// beyond. Binary operations keep the smaller truncation of their inputs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    /// Series known through `w^(coeffs.len() - 1)`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Series { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Series::new(coeffs.iter().map(|&c| super::int(c)).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Series::new(coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Expansion of a polynomial known through `w^order`.
    pub fn from_poly(p: &Poly, order: usize) -> Self {
        Series::new((0..=order).map(|i| p.coeff(i)).collect())
    }

    /// Expansion of `num/den` through `w^order`; `den(0)` must be nonzero.
    pub fn from_ratio(num: &Poly, den: &Poly, order: usize) -> Self {
        Series::from_poly(num, order)
            .div(&Series::from_poly(den, order))
            .expect("denominator invertible at 0")
    }

    pub fn zero(order: usize) -> Self {
        Series::new(vec![Rational::zero(); order + 1])
    }

    /// The truncation order `N`, or `None` when no coefficient is known.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of known coefficients (`N + 1`).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Series {
        Series::new(self.coeffs.iter().take(order + 1).cloned().collect())
    }

    pub fn scale(&self, c: &Rational) -> Series {
        Series::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `w^k`; the truncation order grows by `k`.
    pub fn shift_up(&self, k: usize) -> Series {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Series::new(coeffs)
    }

    /// d/dw. The truncation order drops by one.
    pub fn derivative(&self) -> Series {
        Series::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Multiplicative inverse; `None` when the constant term vanishes.
    pub fn inverse(&self) -> Option<Series> {
        let c0 = self.coeffs.first()?;
        if c0.is_zero() {
            return None;
        }
        let inv0 = c0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[n - k];
                }
            }
            out.push(-acc * &inv0);
        }
        Some(Series::new(out))
    }

    pub fn div(&self, other: &Series) -> Option<Series> {
        Some(self * &other.inverse()?)
    }

    /// `Σ c_n x^n` over the known coefficients.
    pub fn partial_sum_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", super::format_rational(c))?;
        }
        write!(f, "; O(w^{})]", self.coeffs.len())
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        Series::new(
            self.coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        Series::new(
            self.coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    #[test]
    fn geometric_inverse() {
        let one_minus_w = Series::from_ints(&[1, -1, 0, 0, 0]);
        let inv = one_minus_w.inverse().unwrap();
        assert_eq!(inv, Series::from_ints(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn truncation_propagates_pessimistically() {
        let a = Series::from_ints(&[1, 2, 3, 4]);
        let b = Series::from_ints(&[1, 1]);
        assert_eq!((&a * &b).order(), Some(1));
        assert_eq!((&a + &b).order(), Some(1));
        assert_eq!(a.derivative().order(), Some(2));
        assert_eq!(Series::from_ints(&[5]).derivative().order(), None);
    }

    #[test]
    fn ratio_expansion() {
        // w / (1 - 4w) = w + 4w^2 + 16w^3 + ...
        let s = Series::from_ratio(&Poly::from_ints(&[0, 1]), &Poly::from_ints(&[1, -4]), 4);
        assert_eq!(s, Series::from_ints(&[0, 1, 4, 16, 64]));
        assert_eq!(s.scale(&int(2)).coeff(4), &int(128));
    }
}

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{clear_to_integers, denominator_lcm, format_rational, rational_content, Rational};

/// Degree of a polynomial. The zero polynomial has degree [`Degree::NegInfinity`],
/// which sorts below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::NegInfinity, Degree::NegInfinity) => Ordering::Equal,
            (Degree::NegInfinity, _) => Ordering::Less,
            (_, Degree::NegInfinity) => Ordering::Greater,
            (Degree::Finite(a), Degree::Finite(b)) => a.cmp(b),
        }
    }
}

/// Dense univariate polynomial over the rationals; `coeffs[i]` multiplies `w^i`.
/// Trailing zeros are always trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| super::int(c)).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Poly::new(coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The variable `w`.
    pub fn x() -> Self {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// `a + b w`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `w^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::NegInfinity
        } else {
            Degree::Finite(self.coeffs.len() - 1)
        }
    }

    /// Degree as an option, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    /// Lowest index with a nonzero coefficient (`None` for zero).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `w^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `p^{(j)} / j!`, the j-th Taylor coefficient map.
    pub fn hasse_derivative(&self, j: usize) -> Poly {
        if j == 0 {
            return self.clone();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(j)
                .map(|(i, c)| c * Rational::from_integer(binomial(i, j)))
                .collect(),
        )
    }

    /// `p(w + a)`.
    pub fn taylor_shift(&self, a: &Rational) -> Poly {
        // Horner in the shifted variable.
        let step = Poly::linear(a.clone(), Rational::one());
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &step) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `w^deg p(1/w)`, padded to `len` coefficients when `len > deg + 1`.
    pub fn reversed(&self, len: usize) -> Poly {
        let mut c = self.coeffs.clone();
        c.resize(len.max(c.len()), Rational::zero());
        c.reverse();
        Poly::new(c)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.deg().expect("division by the zero polynomial");
        let lead_inv = d.leading().recip();
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); n - dd];
        for i in (0..n - dd).rev() {
            let c = &r[i + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = &r[i + j] - &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient, `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Positive rational content: `self / content` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        rational_content(&self.coeffs)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    /// Coprime integer coefficients with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let ints = clear_to_integers(&self.coeffs);
        let sign = if ints.last().unwrap().is_negative() { -1 } else { 1 };
        Poly::new(
            ints.into_iter()
                .map(|c| Rational::from_integer(c * sign))
                .collect(),
        )
    }

    /// Coprime integer coefficients with positive lowest nonzero coefficient,
    /// the form factors like `1 - 4w` are usually written in.
    pub fn normalized_factor(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let p = self.primitive();
        let low = p.coeffs[p.valuation().unwrap()].clone();
        if low.is_negative() {
            -&p
        } else {
            p
        }
    }

    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Monic greatest common divisor (zero only when both inputs vanish).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        let mut x = int_primitive(&clear_to_integers(&a.coeffs));
        let mut y = int_primitive(&clear_to_integers(&b.coeffs));
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        // Primitive pseudo-remainder sequence over Z.
        while !y.is_empty() {
            let r = int_pseudo_rem(&x, &y);
            x = y;
            y = int_primitive(&r);
        }
        Poly::from_bigints(&x).monic()
    }

    pub fn lcm(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let g = Poly::gcd(a, b);
        (a * &b.exact_div(&g).expect("gcd divides")).monic()
    }

    /// Extended Euclid: `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn xgcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.leading().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    /// Composition `self(q(w))`.
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Human-readable form in the variable `var`, e.g. `1 + 3*w + 4*w^2`.
    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = format_rational(&c.abs());
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                out.push_str(&mag);
            } else if mag == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("w"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn int_primitive(c: &[BigInt]) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = c.to_vec();
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = if v.last().unwrap().is_negative() { -1 } else { 1 };
    v.into_iter().map(|x| x / &g * sign).collect()
}

/// Pseudo-remainder of integer polynomials (`b` nonzero).
fn int_pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for x in r.iter_mut() {
            *x *= lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &lr * bc;
        }
        r.pop();
        while r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
        // Keep the size in check.
        let g = r.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in r.iter_mut() {
                *x /= &g;
            }
        }
    }
    r
}

fn mul_coeffs(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Integer convolution after clearing denominators.
    let la = denominator_lcm(a);
    let lb = denominator_lcm(b);
    let ia: Vec<BigInt> = a
        .iter()
        .map(|r| r.numer() * (&la / r.denom()))
        .collect();
    let ib: Vec<BigInt> = b
        .iter()
        .map(|r| r.numer() * (&lb / r.denom()))
        .collect();
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in ia.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in ib.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    let den = la * lb;
    out.into_iter()
        .map(|c| Rational::new(c, den.clone()))
        .collect()
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        Poly::new(mul_coeffs(&self.coeffs, &o.coeffs))
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    #[test]
    fn zero_degree_is_below_every_constant() {
        assert_eq!(Poly::zero().degree(), Degree::NegInfinity);
        assert!(Poly::zero().degree() < Poly::one().degree());
        assert_eq!(Poly::from_ints(&[1, 2, 0, 0]).degree(), Degree::Finite(1));
    }

    #[test]
    fn division_identity() {
        let a = Poly::from_ints(&[3, -1, 4, 1, 5]);
        let d = Poly::from_ints(&[2, 0, 7]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.deg().unwrap() < 2);
    }

    #[test]
    fn gcd_of_products() {
        let f = Poly::from_ints(&[1, -4]);
        let g = Poly::from_ints(&[1, 3, 4]);
        let a = &(&f * &g) * &Poly::from_ints(&[0, 1]);
        let b = &(&f * &f) * &g.pow(2);
        assert_eq!(Poly::gcd(&a, &b), (&f * &g).monic());
    }

    #[test]
    fn taylor_shift_and_hasse() {
        let p = Poly::from_ints(&[1, 2, 3]);
        let shifted = p.taylor_shift(&int(1));
        assert_eq!(shifted, Poly::from_ints(&[6, 8, 3]));
        assert_eq!(p.hasse_derivative(1).eval(&int(1)), shifted.coeff(1));
        assert_eq!(p.hasse_derivative(2), Poly::from_ints(&[3]));
    }

    #[test]
    fn xgcd_bezout() {
        let a = Poly::from_ints(&[-2, 0, 1]);
        let b = Poly::from_ints(&[0, 1]);
        let (g, s, t) = Poly::xgcd(&a, &b);
        assert!(g.is_one());
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn normalized_factor_prefers_positive_constant() {
        let p = Poly::new(vec![rat(-1, 2), int(2)]);
        assert_eq!(p.normalized_factor(), Poly::from_ints(&[1, -4]));
        assert_eq!(p.primitive(), Poly::from_ints(&[-1, 4]));
    }

    #[test]
    fn display_form() {
        assert_eq!(Poly::from_ints(&[1, 3, 4]).to_string(), "1 + 3*w + 4*w^2");
        assert_eq!(Poly::from_ints(&[0, -1]).to_string(), "-w");
    }
}

//! Linear differential operators `Σ aₖ(w) dᵏ/dwᵏ` with polynomial
//! coefficients: action on series, composition, adjoints, Euclidean division
//! and Wronskians.

mod ratfunc;

pub use ratfunc::{hyperexponential_closed_form, PowerProduct, RatFunc};

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactalg::{format_rational, parse_rational, Poly, Rational, Series};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiffOpError {
    #[error("operator file, line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// `Σₖ coeffs[k](w) · dᵏ/dwᵏ`. Trailing zero coefficients are trimmed, so the
/// zero operator has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffOp {
    coeffs: Vec<Poly>,
}

/// Result of a division with a polynomial multiplier `μ` that keeps every
/// coefficient polynomial. For [`DiffOp::right_divide`]
/// `μ·A = Q·B + R`; for [`DiffOp::left_divide`] `A·μ = B·Q + R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    pub quotient: DiffOp,
    pub remainder: DiffOp,
    pub multiplier: Poly,
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut b = Rational::one();
    for i in 0..k {
        b = b * Rational::from_integer((n - i).into()) / Rational::from_integer((i + 1).into());
    }
    b
}

impl DiffOp {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    /// Integer coefficient lists, lowest degree first, one per derivative order.
    pub fn from_ints(coeffs: &[&[i64]]) -> Self {
        DiffOp::new(coeffs.iter().map(|c| Poly::from_ints(c)).collect())
    }

    pub fn zero() -> Self {
        DiffOp { coeffs: Vec::new() }
    }

    /// Multiplication by the polynomial `p` (an order-0 operator).
    pub fn from_poly(p: Poly) -> Self {
        DiffOp::new(vec![p])
    }

    /// `dᵏ/dwᵏ`.
    pub fn d_pow(k: usize) -> Self {
        let mut c = vec![Poly::zero(); k + 1];
        c[k] = Poly::one();
        DiffOp::new(c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order of the operator; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Poly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Poly {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Largest coefficient degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(Poly::deg).max()
    }

    /// The content `c` and primitive part `P` with `self = c·P`: the coefficients
    /// of `P` are coprime integers and the top coefficient of its leading
    /// polynomial is positive.
    pub fn content_and_primitive(&self) -> (Rational, DiffOp) {
        if self.is_zero() {
            return (Rational::zero(), DiffOp::zero());
        }
        let all: Vec<Rational> = self.coeffs.iter().flat_map(|c| c.coeffs().to_vec()).collect();
        let mut c = Poly::new(all).content();
        if self.leading().leading().is_negative() {
            c = -c;
        }
        let inv = c.recip();
        (c, self.scale(&inv))
    }

    pub fn canonical(&self) -> DiffOp {
        self.content_and_primitive().1
    }

    /// Equality up to a nonzero rational factor.
    pub fn same_up_to_content(&self, o: &DiffOp) -> bool {
        self.canonical() == o.canonical()
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        DiffOp::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// `p·L`.
    pub fn left_mul_poly(&self, p: &Poly) -> DiffOp {
        DiffOp::new(self.coeffs.iter().map(|c| p * c).collect())
    }

    /// `L∘p`.
    pub fn right_mul_poly(&self, p: &Poly) -> DiffOp {
        self.mul(&DiffOp::from_poly(p.clone()))
    }

    pub fn add(&self, o: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(o.coeffs.len());
        DiffOp::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(o.coeffs.len());
        DiffOp::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    /// `Σ aₖ f⁽ᵏ⁾`, exact through order `trunc(f) − q`.
    pub fn apply(&self, f: &Series) -> Series {
        let q = self.order().unwrap_or(0);
        let n = f.order().expect("nonempty series");
        assert!(n >= q, "series truncation {n} is below the operator order {q}");
        let len = n - q + 1;
        let mut out = vec![Rational::zero(); len];
        let mut deriv = f.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                deriv = deriv.derivative();
            }
            for (j, c) in a.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for m in j..len {
                    let t = deriv.coeff(m - j);
                    if !t.is_zero() {
                        out[m] += c * t;
                    }
                }
            }
        }
        Series::new(out)
    }

    /// Composition `self ∘ o` via `dⁱ·b = Σₗ C(i,l) b⁽ˡ⁾ dⁱ⁻ˡ`.
    pub fn mul(&self, o: &DiffOp) -> DiffOp {
        if self.is_zero() || o.is_zero() {
            return DiffOp::zero();
        }
        let p = self.coeffs.len() - 1;
        let q = o.coeffs.len() - 1;
        // derivs[j][l] = (b_j)^(l)
        let derivs: Vec<Vec<Poly>> = o
            .coeffs
            .iter()
            .map(|b| {
                let mut v = vec![b.clone()];
                for _ in 0..p {
                    let next = v.last().unwrap().derivative();
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = vec![Poly::zero(); p + q + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, dj) in derivs.iter().enumerate() {
                for (l, bl) in dj.iter().enumerate().take(i + 1) {
                    if bl.is_zero() {
                        continue;
                    }
                    let term = (a * bl).scale(&binomial(i, l));
                    out[i - l + j] = &out[i - l + j] + &term;
                }
            }
        }
        DiffOp::new(out)
    }

    /// `Σ (−d)ᵏ ∘ aₖ` in standard form.
    pub fn adjoint(&self) -> DiffOp {
        let mut out = vec![Poly::zero(); self.coeffs.len()];
        for (k, a) in self.coeffs.iter().enumerate() {
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            let mut der = a.clone();
            for l in 0..=k {
                if l > 0 {
                    der = der.derivative();
                }
                if der.is_zero() {
                    break;
                }
                let term = der.scale(&(&sign * binomial(k, l)));
                out[k - l] = &out[k - l] + &term;
            }
        }
        DiffOp::new(out)
    }

    /// Right division `μ·self = Q·b + R` with `ord R < ord b`. The multiplier
    /// is a product of divisors of the leading coefficient of `b`; `R = 0`
    /// exactly when `b` is a right factor over the rational-function field.
    pub fn right_divide(&self, b: &DiffOp) -> Division {
        let qb = b.order().expect("division by the zero operator");
        let lb = b.leading();
        let mut rem = self.clone();
        let mut quot = DiffOp::zero();
        let mut mult = Poly::one();
        while let Some(r) = rem.order().filter(|&r| r >= qb) {
            let m = r - qb;
            let a = rem.leading();
            let g = Poly::gcd(&a, &lb);
            let f = lb.exact_div(&g).expect("gcd divides");
            let h = a.exact_div(&g).expect("gcd divides");
            let step = DiffOp::d_pow(m).left_mul_poly(&h);
            rem = rem.left_mul_poly(&f).sub(&step.mul(b));
            quot = quot.left_mul_poly(&f).add(&step);
            mult = &mult * &f;
            debug_assert!(rem.order().map_or(true, |o| o < r));
            // Keep the numbers small: drop the common content of all three.
            let mut all: Vec<Rational> = mult.coeffs().to_vec();
            for p in quot.coeffs.iter().chain(rem.coeffs.iter()) {
                all.extend(p.coeffs().iter().cloned());
            }
            let c = Poly::new(all).content();
            if !c.is_one() && !c.is_zero() {
                let inv = c.recip();
                rem = rem.scale(&inv);
                quot = quot.scale(&inv);
                mult = mult.scale(&inv);
            }
        }
        Division {
            quotient: quot,
            remainder: rem,
            multiplier: mult,
        }
    }

    /// Left division `self·μ = b·Q + R` with `ord R < ord b`, obtained by
    /// dualizing the right division of the adjoints.
    pub fn left_divide(&self, b: &DiffOp) -> Division {
        let d = self.adjoint().right_divide(&b.adjoint());
        Division {
            quotient: d.quotient.adjoint(),
            remainder: d.remainder.adjoint(),
            multiplier: d.multiplier,
        }
    }

    /// Abel's identity: `W'/W = −a_{q−1}/a_q`.
    pub fn wronskian_logderiv(&self) -> RatFunc {
        let q = self.order().expect("zero operator");
        assert!(q >= 1, "Wronskian of an order-0 operator");
        RatFunc::new(-&self.coeffs[q - 1], self.coeffs[q].clone())
    }

    /// Divides out the polynomial gcd of all coefficients, then normalizes.
    pub fn strip_common_factor(&self) -> DiffOp {
        let g = self.coeffs.iter().fold(Poly::zero(), |acc, c| Poly::gcd(&acc, c));
        if g.is_zero() || g.is_constant() {
            return self.canonical();
        }
        DiffOp::new(self.coeffs.iter().map(|c| c.exact_div(&g).unwrap()).collect()).canonical()
    }

    /// A polynomial-coefficient operator proportional (on the left, by a
    /// rational function) to `L∘μ⁻¹`; it has the same solutions. Canonical.
    pub fn right_mul_inverse_poly(&self, mu: &Poly) -> DiffOp {
        let Some(q) = self.order() else {
            return DiffOp::zero();
        };
        // (μ⁻¹)^(j) = P_j / μ^(j+1), P_{j+1} = P_j' μ − (j+1) P_j μ'
        let dmu = mu.derivative();
        let mut p = vec![Poly::one()];
        for j in 0..q {
            let next = &(&p[j].derivative() * mu) - &(&p[j] * &dmu).scale(&Rational::from_integer((j as i64 + 1).into()));
            p.push(next);
        }
        let mu_pows: Vec<Poly> = (0..=q).map(|k| mu.pow(k as u32)).collect();
        // dᵏ∘μ⁻¹ = Σ_j C(k,j) (μ⁻¹)^(j) d^(k−j), everything times μ^(q+1)
        let mut out = vec![Poly::zero(); q + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            for j in 0..=k {
                let term = (&(c * &p[j]) * &mu_pows[q - j]).scale(&binomial(k, j));
                out[k - j] = &out[k - j] + &term;
            }
        }
        DiffOp::new(out).strip_common_factor()
    }

    /// `d − r`, cleared of denominators and made primitive: annihilates every
    /// function whose logarithmic derivative is `r`.
    pub fn first_order_from_solution(logderiv: &RatFunc) -> DiffOp {
        DiffOp::new(vec![-logderiv.numerator(), logderiv.denominator().clone()]).canonical()
    }

    /// The operator in the local variable `t = w − a`.
    pub fn shift(&self, a: &Rational) -> DiffOp {
        DiffOp::new(self.coeffs.iter().map(|c| c.taylor_shift(a)).collect())
    }

    /// The operator in `v = 1/w`, cleared to polynomial coefficients with any
    /// common power of `v` removed. Applying it twice returns the original
    /// operator up to content.
    pub fn reciprocal(&self) -> DiffOp {
        if self.is_zero() {
            return DiffOp::zero();
        }
        let top = self.degree().unwrap_or(0);
        // d/dw = −v² d/dv
        let dw = DiffOp::new(vec![Poly::zero(), Poly::from_ints(&[0, 0, -1])]);
        let mut power = DiffOp::from_poly(Poly::one());
        let mut out = DiffOp::zero();
        for a in &self.coeffs {
            if let Some(d) = a.deg() {
                let c = a.reversed(d + 1).shift_up(top - d);
                out = out.add(&power.left_mul_poly(&c));
            }
            power = dw.mul(&power);
        }
        let v = out
            .coeffs
            .iter()
            .filter_map(Poly::valuation)
            .min()
            .unwrap_or(0);
        let out = DiffOp::new(
            out.coeffs
                .iter()
                .map(|c| Poly::new(c.coeffs().iter().skip(v.min(c.coeffs().len())).cloned().collect()))
                .collect(),
        );
        out.canonical()
    }

    /// Plain-text form: `order=q`, then `k: c0 c1 ...` for each `k`.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("order={}\n", self.order().unwrap_or(0));
        let coeffs = if self.is_zero() { vec![Poly::zero()] } else { self.coeffs.clone() };
        for (k, c) in coeffs.iter().enumerate() {
            out.push_str(&format!("{k}:"));
            if c.is_zero() {
                out.push_str(" 0");
            }
            for x in c.coeffs() {
                out.push(' ');
                out.push_str(&format_rational(x));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<DiffOp, DiffOpError> {
        let err = |line: usize, m: &str| DiffOpError::Parse {
            line,
            message: m.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, first) = lines.next().ok_or_else(|| err(1, "empty operator file"))?;
        let q: usize = first
            .strip_prefix("order=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| err(ln, "expected `order=q`"))?;
        let mut coeffs = Vec::with_capacity(q + 1);
        for (ln, line) in lines {
            let (k, rest) = line.split_once(':').ok_or_else(|| err(ln, "expected `k: c0 c1 ...`"))?;
            let k: usize = k.trim().parse().map_err(|_| err(ln, "bad derivative index"))?;
            if k != coeffs.len() {
                return Err(err(ln, "derivative indices must run 0, 1, ..., q in order"));
            }
            let cs: Option<Vec<Rational>> = rest.split_whitespace().map(parse_rational).collect();
            let cs = cs.ok_or_else(|| err(ln, "bad coefficient"))?;
            coeffs.push(Poly::new(cs));
        }
        if coeffs.len() != q + 1 {
            return Err(err(ln, "number of coefficient lines does not match the order"));
        }
        let op = DiffOp::new(coeffs);
        if op.order().unwrap_or(0) != q {
            return Err(err(ln, "leading coefficient is zero"));
        }
        Ok(op)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*D")?,
                _ => write!(f, "({c})*D^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    #[test]
    fn inverse_on_the_right() {
        // (d∘w)∘w⁻¹ = d
        let l = DiffOp::d_pow(1).right_mul_poly(&Poly::x());
        assert_eq!(l.right_mul_inverse_poly(&Poly::x()), DiffOp::d_pow(1));
        let m = DiffOp::from_ints(&[&[1, 2], &[0, 1, 3], &[5]]);
        let mu = Poly::from_ints(&[1, 1]);
        assert!(m.right_mul_poly(&mu).right_mul_inverse_poly(&mu).same_up_to_content(&m));
    }

    #[test]
    fn geometric_annihilated() {
        let l = DiffOp::from_ints(&[&[-1], &[1, -1]]);
        let f = Series::from_ints(&[1; 20]);
        assert!(l.apply(&f).is_zero());
        assert!(DiffOp::d_pow(1).apply(&Series::from_ints(&[5, 0, 0])).is_zero());
    }

    #[test]
    fn leibniz() {
        let d = DiffOp::d_pow(1);
        let wd = DiffOp::from_ints(&[&[], &[0, 1]]);
        assert_eq!(d.mul(&wd), DiffOp::from_ints(&[&[], &[1], &[0, 1]]));
        let (a, b) = (int(2), int(3));
        let da = DiffOp::new(vec![Poly::constant(-a.clone()), Poly::one()]);
        let db = DiffOp::new(vec![Poly::constant(-b.clone()), Poly::one()]);
        assert_eq!(da.mul(&db), DiffOp::from_ints(&[&[6], &[-5], &[1]]));
    }

    #[test]
    fn hand_division() {
        let a = DiffOp::d_pow(2);
        let b = DiffOp::from_ints(&[&[-1], &[1]]);
        let div = a.right_divide(&b);
        assert_eq!(div.multiplier, Poly::one());
        assert_eq!(div.quotient, DiffOp::from_ints(&[&[1], &[1]]));
        assert_eq!(div.remainder, DiffOp::from_ints(&[&[1]]));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(DiffOp::d_pow(1).adjoint(), DiffOp::from_ints(&[&[], &[-1]]));
        let wd = DiffOp::from_ints(&[&[], &[0, 1]]);
        assert_eq!(wd.adjoint(), DiffOp::from_ints(&[&[-1], &[0, -1]]));
    }

    #[test]
    fn first_order_operators() {
        let w_1m4w = Poly::from_ints(&[0, 1, -4]);
        let l1 = DiffOp::first_order_from_solution(&RatFunc::new(Poly::one(), w_1m4w.clone()));
        assert_eq!(l1, DiffOp::new(vec![Poly::from_ints(&[1]), -&w_1m4w]).canonical());
        // S1 = w/(1-4w)
        let s1 = Series::from_ratio(&Poly::x(), &Poly::from_ints(&[1, -4]), 30);
        assert!(l1.apply(&s1).is_zero());
        assert_eq!(
            DiffOp::first_order_from_solution(&RatFunc::zero()),
            DiffOp::d_pow(1)
        );
        let w = l1.wronskian_logderiv();
        assert_eq!(w, RatFunc::new(Poly::one(), w_1m4w));
        let pp = hyperexponential_closed_form(&w).unwrap();
        assert_eq!(pp.exponent_of(&Poly::x()), Some(&int(1)));
        assert_eq!(pp.exponent_of(&Poly::from_ints(&[1, -4])), Some(&int(-1)));
        assert_eq!(
            pp.to_ratfunc().unwrap(),
            RatFunc::new(Poly::x(), Poly::from_ints(&[1, -4]))
        );
    }

    #[test]
    fn closed_form_rejects_double_poles_and_polynomial_parts() {
        let r = RatFunc::new(Poly::one(), Poly::from_ints(&[0, 0, 1]));
        assert!(hyperexponential_closed_form(&r).is_none());
        assert!(hyperexponential_closed_form(&RatFunc::from_poly(Poly::one())).is_none());
        assert_eq!(
            hyperexponential_closed_form(&RatFunc::zero()).unwrap().factors,
            vec![]
        );
    }

    #[test]
    fn file_round_trip() {
        let l = DiffOp::new(vec![Poly::zero(), Poly::from_ints(&[1, -1]).scale(&crate::exactalg::rat(1, 3))]);
        let text = l.to_file_string();
        assert_eq!(text, "order=1\n0: 0\n1: 1/3 -1/3\n");
        assert_eq!(DiffOp::parse(&text).unwrap(), l);
        assert!(DiffOp::parse("order=2\n0: 1\n1: 1\n").is_err());
    }
}

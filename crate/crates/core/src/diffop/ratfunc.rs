use std::fmt;

use num_traits::Zero;

use crate::exactalg::{invert_mod, split_by_value, Poly, Rational};

/// A rational function `numerator / denominator` in lowest terms with a
/// monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    numerator: Poly,
    denominator: Poly,
}

impl RatFunc {
    pub fn new(numerator: Poly, denominator: Poly) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        if numerator.is_zero() {
            return RatFunc::zero();
        }
        let g = Poly::gcd(&numerator, &denominator);
        let num = numerator.exact_div(&g).expect("gcd divides");
        let den = denominator.exact_div(&g).expect("gcd divides");
        let l = den.leading().recip();
        RatFunc {
            numerator: num.scale(&l),
            denominator: den.scale(&l),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            numerator: Poly::zero(),
            denominator: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc::new(p, Poly::one())
    }

    /// `p'/p`.
    pub fn log_derivative_of(p: &Poly) -> Self {
        RatFunc::new(p.derivative(), p.clone())
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.numerator * &o.denominator) + &(&o.numerator * &self.denominator),
            &self.denominator * &o.denominator,
        )
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            numerator: -&self.numerator,
            denominator: self.denominator.clone(),
        }
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(
            &self.numerator * &o.numerator,
            &self.denominator * &o.denominator,
        )
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        RatFunc::new(self.numerator.scale(c), self.denominator.clone())
    }

    pub fn derivative(&self) -> RatFunc {
        let (n, d) = (&self.numerator, &self.denominator);
        RatFunc::new(
            &(&n.derivative() * d) - &(n * &d.derivative()),
            d * d,
        )
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.denominator.eval(x);
        (!d.is_zero()).then(|| self.numerator.eval(x) / d)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Π factorᵢ^exponentᵢ` up to a multiplicative constant; factors are in
/// normalized form (coprime integers, positive constant term when nonzero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerProduct {
    pub factors: Vec<(Poly, Rational)>,
}

impl PowerProduct {
    pub fn exponent_of(&self, p: &Poly) -> Option<&Rational> {
        let p = p.normalized_factor();
        self.factors.iter().find(|(f, _)| *f == p).map(|(_, e)| e)
    }

    /// The log-derivative `Σ eᵢ fᵢ'/fᵢ`.
    pub fn log_derivative(&self) -> RatFunc {
        self.factors.iter().fold(RatFunc::zero(), |acc, (f, e)| {
            acc.add(&RatFunc::log_derivative_of(f).scale(e))
        })
    }

    /// The product as a rational function when every exponent is an integer.
    pub fn to_ratfunc(&self) -> Option<RatFunc> {
        let mut num = Poly::one();
        let mut den = Poly::one();
        for (f, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            let k = e.to_integer();
            let k_abs: u32 = k.magnitude().try_into().ok()?;
            if k > Zero::zero() {
                num = &num * &f.pow(k_abs);
            } else {
                den = &den * &f.pow(k_abs);
            }
        }
        Some(RatFunc::new(num, den))
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| format!("({})^({})", p, crate::exactalg::format_rational(e)))
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Recognizes `r` as the log-derivative of a product of polynomial powers:
/// every pole must be simple with a rational residue and there may be no
/// polynomial part. Roots of one irreducible factor with different residues
/// are separated by splitting that factor.
pub fn hyperexponential_closed_form(r: &RatFunc) -> Option<PowerProduct> {
    if r.is_zero() {
        return Some(PowerProduct { factors: vec![] });
    }
    let (n, m) = (r.numerator(), r.denominator());
    if n.deg() >= m.deg() {
        return None;
    }
    let dm = m.derivative();
    if !Poly::gcd(m, &dm).is_constant() {
        return None;
    }
    let inv = invert_mod(&dm.rem(m), m).ok()?;
    let residue = (n * &inv).rem(m);
    let mut factors: Vec<(Poly, Rational)> = split_by_value(m, &residue)?
        .into_iter()
        .filter(|(_, e)| !e.is_zero())
        .collect();
    factors.sort_by(|a, b| {
        a.0.deg()
            .cmp(&b.0.deg())
            .then_with(|| a.0.to_string().cmp(&b.0.to_string()))
    });
    // Normalization may flip a factor's sign, which leaves the log-derivative unchanged.
    debug_assert_eq!(PowerProduct { factors: factors.clone() }.log_derivative(), *r);
    Some(PowerProduct { factors })
}

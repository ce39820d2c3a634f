//! Exact arithmetic substrate: rationals, dense univariate polynomials,
//! truncated power series, quotient rings `Q[w]/(p)` and exact linear algebra.
//!
//! Everything here is immutable once built and free of interior mutability, so
//! values can be shared read-only between worker threads.

mod factor;
mod field;
mod matrix;
pub mod modp;
mod poly;
mod quotient;
mod roots;
mod series;

pub use factor::factor_integer;
pub use field::{FieldElem, Split};
pub use matrix::{kernel_basis, rank, RatMatrix};
pub use poly::{Degree, Poly};
pub use quotient::{invert_mod, AlgebraicPoint, InvertError, Location, Residue};
pub use roots::{rational_roots, split_by_value, squarefree_split};
pub use series::Series;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"123"`, `"-7"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Canonical text form: an integer, or `p/q` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of the denominators.
pub(crate) fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Scales `values` to coprime integers (sign untouched). All-zero input gives all zeros.
pub(crate) fn clear_to_integers(values: &[Rational]) -> Vec<BigInt> {
    let l = denominator_lcm(values);
    let ints: Vec<BigInt> = values
        .iter()
        .map(|r| (r * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Positive rational `c` with `values / c` coprime integers; zero if all values vanish.
pub(crate) fn rational_content(values: &[Rational]) -> Rational {
    let l = denominator_lcm(values);
    let g = values.iter().fold(BigInt::zero(), |acc, r| {
        acc.gcd(&(r * Rational::from_integer(l.clone())).to_integer())
    });
    if g.is_zero() {
        Rational::zero()
    } else {
        Rational::new(g.abs(), l)
    }
}

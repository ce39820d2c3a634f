use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use super::modp::{poly_inverse_mod_p, prime_stream, Crt, Zp};
use super::{FieldElem, Poly, Rational, Split};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InvertError {
    #[error("element is zero modulo the defining polynomial")]
    ZeroDivisor,
    #[error("non-invertible element; discovered factor {0}")]
    DiscoveredFactor(Poly),
}

/// Inverse of `a` modulo the squarefree polynomial `p`.
///
/// When `gcd(a, p)` is nontrivial the gcd comes back as
/// [`InvertError::DiscoveredFactor`]; the caller splits `p` and recurses.
pub fn invert_mod(a: &Poly, p: &Poly) -> Result<Poly, InvertError> {
    let a = a.rem(p);
    if a.is_zero() {
        return Err(InvertError::ZeroDivisor);
    }
    if p.deg().unwrap_or(0) > SMALL_MODULUS {
        if let Some(b) = invert_multimodular(&a, p) {
            return Ok(b);
        }
    }
    let (g, s, _) = Poly::xgcd(&a, p);
    if g.is_one() {
        Ok(s.rem(p))
    } else {
        Err(InvertError::DiscoveredFactor(g.normalized_factor()))
    }
}

/// Moduli up to this degree are inverted by the plain extended Euclid over Q.
const SMALL_MODULUS: usize = 4;

/// Inverse through word-size primes: Euclid modulo each prime, Chinese
/// remaindering, rational reconstruction, then an exact check `a·b ≡ 1`.
/// `None` when primes keep seeing a common factor, which the exact path then
/// confirms or refutes.
fn invert_multimodular(a: &Poly, p: &Poly) -> Option<Poly> {
    let n = p.deg()?;
    let mut crt = Crt::new(n);
    let (mut used, mut check_at, mut bad) = (0usize, 2usize, 0usize);
    for prime in prime_stream(62) {
        let zp = Zp::new(prime);
        let image = |q: &Poly| -> Option<Vec<u64>> { q.coeffs().iter().map(|c| zp.from_rational(c)).collect() };
        let (Some(am), Some(pm)) = (image(a), image(p)) else {
            continue;
        };
        if pm[n] == 0 {
            continue;
        }
        let Some(inv) = poly_inverse_mod_p(zp, &am, &pm) else {
            bad += 1;
            if bad >= 3 {
                return None;
            }
            continue;
        };
        crt.add(prime, &inv);
        used += 1;
        if used == check_at {
            check_at += check_at / 2 + 1;
            if let Some(r) = crt.rationals() {
                let b = Poly::new(r);
                if (a * &b).rem(p).is_one() {
                    return Some(b);
                }
            }
        }
        if used > 1 << 16 {
            return None;
        }
    }
    None
}

/// The set of roots of a squarefree polynomial, handled symbolically through
/// arithmetic in `Q[w]/(min_poly)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicPoint {
    pub min_poly: Poly,
    pub description: String,
}

impl AlgebraicPoint {
    pub fn new(p: &Poly) -> Self {
        let min_poly = p.normalized_factor();
        let description = format!("roots of {}", min_poly);
        AlgebraicPoint {
            min_poly,
            description,
        }
    }

    pub fn with_description(p: &Poly, description: impl Into<String>) -> Self {
        AlgebraicPoint {
            min_poly: p.normalized_factor(),
            description: description.into(),
        }
    }

    pub fn degree(&self) -> usize {
        self.min_poly.deg().unwrap_or(0)
    }

    /// The residue class of `w` itself.
    pub fn generator(&self) -> Residue {
        Residue::new(Poly::x(), Arc::new(self.min_poly.clone()))
    }

    /// The residue of `q(w)`.
    pub fn residue(&self, q: &Poly) -> Residue {
        Residue::new(q.clone(), Arc::new(self.min_poly.clone()))
    }
}

impl fmt::Display for AlgebraicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.description)
    }
}

/// A point of the projective w-line: rational, a conjugate set of algebraic
/// points, or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Finite(Rational),
    Algebraic(AlgebraicPoint),
    Infinity,
}

impl Location {
    /// Sort key: infinity last, rationals before algebraic sets.
    fn rank(&self) -> u8 {
        match self {
            Location::Finite(_) => 0,
            Location::Algebraic(_) => 1,
            Location::Infinity => 2,
        }
    }
}

impl PartialOrd for Location {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Location {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Location::Finite(a), Location::Finite(b)) => a.cmp(b),
            (Location::Algebraic(a), Location::Algebraic(b)) => a
                .degree()
                .cmp(&b.degree())
                .then_with(|| a.min_poly.to_string().cmp(&b.min_poly.to_string())),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Finite(r) => write!(f, "w = {}", super::format_rational(r)),
            Location::Algebraic(p) => write!(f, "{} = 0", p.min_poly),
            Location::Infinity => write!(f, "w = infinity"),
        }
    }
}

/// Element of `Q[w]/(modulus)`, stored as its reduced representative.
#[derive(Clone, PartialEq, Eq)]
pub struct Residue {
    value: Poly,
    modulus: Arc<Poly>,
}

impl Residue {
    pub fn new(value: Poly, modulus: Arc<Poly>) -> Self {
        let value = value.rem(&modulus);
        Residue { value, modulus }
    }

    pub fn value(&self) -> &Poly {
        &self.value
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    fn wrap(&self, value: Poly) -> Residue {
        Residue::new(value, self.modulus.clone())
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} mod {}]", self.value, self.modulus)
    }
}

impl FieldElem for Residue {
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Residue {
            value: &self.value + &o.value,
            modulus: self.modulus.clone(),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Residue {
            value: &self.value - &o.value,
            modulus: self.modulus.clone(),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        self.wrap(&self.value * &o.value)
    }
    fn neg(&self) -> Self {
        Residue {
            value: -&self.value,
            modulus: self.modulus.clone(),
        }
    }
    fn inv(&self) -> Result<Self, Split> {
        match invert_mod(&self.value, &self.modulus) {
            Ok(v) => Ok(self.wrap(v)),
            Err(InvertError::DiscoveredFactor(factor)) => Err(Split { factor }),
            Err(InvertError::ZeroDivisor) => panic!("inverse of zero residue"),
        }
    }
    fn lift(&self, r: &Rational) -> Self {
        Residue {
            value: if Zero::is_zero(r) {
                Poly::zero()
            } else {
                Poly::constant(r.clone())
            },
            modulus: self.modulus.clone(),
        }
    }
    fn as_rational(&self) -> Option<Rational> {
        self.value
            .is_constant()
            .then(|| self.value.coeff(0))
    }
    fn scale(&self, r: &Rational) -> Self {
        Residue {
            value: self.value.scale(r),
            modulus: self.modulus.clone(),
        }
    }
}

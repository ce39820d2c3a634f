use std::fmt::Debug;

use num_traits::{One, Zero};

use super::{Poly, Rational};

/// A zero divisor was met while inverting in `Q[w]/(p)`: `factor` is a
/// nontrivial factor of `p`, and the caller must split the point and retry on
/// each piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub factor: Poly,
}

/// Minimal field interface shared by [`Rational`] and quotient-ring residues,
/// so local analysis can run unchanged at rational and algebraic points.
/// Residue inversion may fail with a [`Split`] (dynamic evaluation).
pub trait FieldElem: Clone + Debug + PartialEq {
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Inverse of a nonzero element.
    fn inv(&self) -> Result<Self, Split>;
    /// Embeds a rational into the same ring as `self`.
    fn lift(&self, r: &Rational) -> Self;
    /// The rational value when the element is a scalar.
    fn as_rational(&self) -> Option<Rational>;

    fn scale(&self, r: &Rational) -> Self {
        self.mul(&self.lift(r))
    }

    fn zero_like(&self) -> Self {
        self.lift(&Rational::zero())
    }

    fn one_like(&self) -> Self {
        self.lift(&Rational::one())
    }
}

impl FieldElem for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, Split> {
        assert!(!Zero::is_zero(self), "inverse of zero");
        Ok(self.recip())
    }
    fn lift(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

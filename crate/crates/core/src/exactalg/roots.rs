use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::factor::divisors;
use super::{kernel_basis, Poly, RatMatrix, Rational};

/// Rational roots of a nonzero polynomial with their multiplicities, in
/// increasing order. Candidates are `±a/b` with `a | trailing` and
/// `b | leading` of the primitive integer form of the squarefree part.
pub fn rational_roots(p: &Poly) -> Vec<(Rational, usize)> {
    assert!(!p.is_zero(), "rational_roots of the zero polynomial");
    let mut out = Vec::new();
    let v = p.valuation().unwrap();
    if v > 0 {
        out.push((Rational::zero(), v));
    }
    let rest = Poly::new(p.coeffs()[v..].to_vec());
    if rest.is_constant() {
        return out;
    }
    let g = Poly::gcd(&rest, &rest.derivative());
    let sqf = rest.exact_div(&g).expect("gcd divides").primitive();
    let ints = sqf.integer_coeffs().expect("primitive form is integral");
    let lead = ints.last().unwrap().abs();
    let trail = ints[0].abs();
    let nums = divisors(&trail);
    let dens = divisors(&lead);
    let mut found: Vec<Rational> = Vec::new();
    let n = ints.len() - 1;
    for d in &dens {
        for a in &nums {
            if !a.gcd(d).is_one() {
                continue;
            }
            for sign in [1, -1] {
                let num = a * sign;
                if homogeneous_eval(&ints, &num, d).is_zero() {
                    found.push(Rational::new(num.clone(), d.clone()));
                    if found.len() == n {
                        break;
                    }
                }
            }
        }
    }
    for r in found {
        let lin = Poly::linear(-r.clone(), Rational::one());
        let mut m = 0;
        let mut q = rest.clone();
        while let Some(next) = q.exact_div(&lin) {
            q = next;
            m += 1;
        }
        out.push((r, m));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// `Σ c_i a^i b^(n-i)`, zero iff `a/b` is a root.
fn homogeneous_eval(c: &[BigInt], a: &BigInt, b: &BigInt) -> BigInt {
    let n = c.len() - 1;
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    // Horner in a with the b powers folded in.
    let mut b_powers = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        b_powers.push(bpow.clone());
        bpow *= b;
    }
    for (i, ci) in c.iter().enumerate().rev() {
        acc = acc * a + ci * &b_powers[n - i];
    }
    acc
}

/// Squarefree decomposition (Yun). Factors are primitive, normalized with a
/// positive lowest coefficient, pairwise coprime, ordered by decreasing
/// multiplicity; their product with multiplicities equals `p` up to a constant.
pub fn squarefree_split(p: &Poly) -> Vec<(Poly, usize)> {
    assert!(!p.is_zero(), "squarefree_split of the zero polynomial");
    let mut out = Vec::new();
    if p.is_constant() {
        return out;
    }
    let a = p.primitive();
    let b = a.derivative();
    let c = Poly::gcd(&a, &b);
    let mut w = a.exact_div(&c).unwrap();
    let mut y = b.exact_div(&c).unwrap();
    let mut z = &y - &w.derivative();
    let mut i = 1;
    while !w.is_constant() {
        let g = Poly::gcd(&w, &z);
        if !g.is_constant() {
            out.push((g.normalized_factor(), i));
        }
        w = w.exact_div(&g).unwrap();
        y = z.exact_div(&g).unwrap();
        z = &y - &w.derivative();
        i += 1;
    }
    out.sort_by(|a, b| b.1.cmp(&a.1));
    out
}

/// Splits the squarefree `p` by the values of the residue `r mod p` at its
/// roots. Returns `(factor, value)` pairs when every root gives a rational
/// value, `None` otherwise. A scalar residue returns `p` itself.
pub fn split_by_value(p: &Poly, r: &Poly) -> Option<Vec<(Poly, Rational)>> {
    let d = p.deg()?;
    let r = r.rem(p);
    if r.is_constant() {
        return Some(vec![(p.normalized_factor(), r.coeff(0))]);
    }
    // Minimal polynomial of r in Q[w]/(p) from the first dependence among its powers.
    let mut powers: Vec<Poly> = vec![Poly::one()];
    let minpoly = loop {
        let next = (&powers[powers.len() - 1] * &r).rem(p);
        powers.push(next);
        let k = powers.len();
        let m = RatMatrix::from_fn(d, k, |i, j| powers[j].coeff(i));
        let ker = kernel_basis(&m);
        if let Some(v) = ker.first() {
            break Poly::new(v.clone());
        }
        if k > d + 1 {
            return None;
        }
    };
    let roots = rational_roots(&minpoly);
    let mut out = Vec::new();
    let mut total = 0;
    for (c, _) in roots {
        let shifted = &r - &Poly::constant(c.clone());
        let g = Poly::gcd(p, &shifted);
        if let Some(dg) = g.deg().filter(|&dg| dg > 0) {
            total += dg;
            out.push((g.normalized_factor(), c));
        }
    }
    (total == d).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    fn lin(a: i64, b: i64) -> Poly {
        Poly::from_ints(&[a, b])
    }

    #[test]
    fn roots_of_the_leading_factor_list() {
        // w (1-4w)^5 (1+4w)^3 (1-w) (1+2w)
        let p = [lin(0, 1), lin(1, -4).pow(5), lin(1, 4).pow(3), lin(1, -1), lin(1, 2)]
            .iter()
            .fold(Poly::one(), |acc, f| &acc * f);
        let roots = rational_roots(&p);
        assert_eq!(
            roots,
            vec![
                (rat(-1, 2), 1),
                (rat(-1, 4), 3),
                (int(0), 1),
                (rat(1, 4), 5),
                (int(1), 1)
            ]
        );
    }

    #[test]
    fn irrational_or_complex_roots_are_skipped() {
        assert!(rational_roots(&Poly::from_ints(&[1, 0, 1])).is_empty());
        assert!(rational_roots(&Poly::from_ints(&[1, 3, 4])).is_empty());
    }

    #[test]
    fn squarefree_examples() {
        let p = &lin(1, -4).pow(2) * &lin(1, 1);
        assert_eq!(squarefree_split(&p), vec![(lin(1, -4), 2), (lin(1, 1), 1)]);
        assert_eq!(
            squarefree_split(&Poly::from_ints(&[0, 0, 0, 1])),
            vec![(lin(0, 1), 3)]
        );
    }

    #[test]
    fn split_quadratic_times_linear_by_value() {
        let q = Poly::from_ints(&[1, 3, 4]);
        let l = lin(1, -1);
        let p = &q * &l;
        // residue 5 on the quadratic, 7 at w = 1: r = 5 + 2 q / q(1)
        let r = &Poly::constant(int(5)) + &q.scale(&rat(2, 8));
        let mut parts = split_by_value(&p, &r).unwrap();
        parts.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(parts, vec![(q, int(5)), (l, int(7))]);
    }
}

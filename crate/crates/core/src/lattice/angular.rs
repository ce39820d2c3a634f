//! Exact bivariate angular expansions: power series in `w` whose coefficients
//! are Laurent polynomials in `z1 = e^{iφ1}`, `z2 = e^{iφ2}`.
//!
//! Cosines and sines are carried through `z + 1/z = 2cos φ` and
//! `z - 1/z = 2i sin φ`. A product of two sines is real, so the integrand is a
//! Laurent polynomial with rational coefficients and the angular average is
//! its constant harmonic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exactalg::{Rational, Series};

/// Truncated series `Σ_n w^n Σ_{k1,k2} c(n,k1,k2) z1^k1 z2^k2`.
///
/// Order `n` stores a dense `(2b+1)^2` grid with `b = bounds[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngularSeries {
    max_order: usize,
    bounds: Vec<usize>,
    data: Vec<Vec<Rational>>,
}

fn idx(b: usize, k1: i64, k2: i64) -> usize {
    let w = 2 * b + 1;
    (k1 + b as i64) as usize * w + (k2 + b as i64) as usize
}

impl AngularSeries {
    /// Zero series known through `w^max_order`, harmonic bound `bounds[n]` at order `n`.
    pub fn zero(max_order: usize, bounds: Vec<usize>) -> Self {
        assert_eq!(bounds.len(), max_order + 1);
        let data = bounds
            .iter()
            .map(|&b| vec![Rational::zero(); (2 * b + 1) * (2 * b + 1)])
            .collect();
        AngularSeries {
            max_order,
            bounds,
            data,
        }
    }

    /// A Laurent polynomial in the angles, constant in `w`.
    pub fn harmonic_poly(max_order: usize, terms: &[(i64, i64, Rational)]) -> Self {
        let b = terms
            .iter()
            .map(|(a, c, _)| a.unsigned_abs().max(c.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0);
        let mut bounds = vec![0; max_order + 1];
        bounds[0] = b;
        let mut s = AngularSeries::zero(max_order, bounds);
        for (k1, k2, c) in terms {
            let i = idx(b, *k1, *k2);
            s.data[0][i] += c;
        }
        s
    }

    /// The constant 1.
    pub fn one(max_order: usize) -> Self {
        AngularSeries::harmonic_poly(max_order, &[(0, 0, Rational::one())])
    }

    /// A single-angle series `Σ_n w^n Σ_k c_n[k] z^k` placed along the direction
    /// `z^k -> z1^(k a) z2^(k b)`. `coeffs[n][j]` holds harmonic `k = j - n`.
    pub fn along(coeffs: &[Vec<Rational>], a: i64, b: i64) -> Self {
        let max_order = coeffs.len() - 1;
        let scale = a.unsigned_abs().max(b.unsigned_abs()) as usize;
        let bounds: Vec<usize> = (0..=max_order).map(|n| n * scale).collect();
        let mut s = AngularSeries::zero(max_order, bounds);
        for (n, row) in coeffs.iter().enumerate() {
            assert_eq!(row.len(), 2 * n + 1);
            let bn = s.bounds[n];
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let k = j as i64 - n as i64;
                s.data[n][idx(bn, k * a, k * b)] = c.clone();
            }
        }
        s
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Harmonic bound at order `n`.
    pub fn bound(&self, n: usize) -> usize {
        self.bounds[n]
    }

    /// `c(n, k1, k2)`, zero outside the stored range.
    pub fn coeff(&self, n: usize, k1: i64, k2: i64) -> Rational {
        if n > self.max_order {
            panic!("coefficient beyond truncation order");
        }
        let b = self.bounds[n] as i64;
        if k1.abs() > b || k2.abs() > b {
            return Rational::zero();
        }
        self.data[n][idx(b as usize, k1, k2)].clone()
    }

    /// Shrinks every order's grid to its actual harmonic extent.
    pub fn trimmed(&self) -> Self {
        let mut bounds = Vec::with_capacity(self.bounds.len());
        let mut data = Vec::with_capacity(self.data.len());
        for (n, grid) in self.data.iter().enumerate() {
            let b = self.bounds[n];
            let mut ext = 0usize;
            for (k1, k2, c) in self.entries(n) {
                if !c.is_zero() {
                    ext = ext.max(k1.unsigned_abs() as usize).max(k2.unsigned_abs() as usize);
                }
            }
            let mut g = vec![Rational::zero(); (2 * ext + 1) * (2 * ext + 1)];
            for k1 in -(ext as i64)..=ext as i64 {
                for k2 in -(ext as i64)..=ext as i64 {
                    g[idx(ext, k1, k2)] = grid[idx(b, k1, k2)].clone();
                }
            }
            bounds.push(ext);
            data.push(g);
        }
        AngularSeries {
            max_order: self.max_order,
            bounds,
            data,
        }
    }

    fn entries(&self, n: usize) -> impl Iterator<Item = (i64, i64, &Rational)> + '_ {
        let b = self.bounds[n] as i64;
        let w = 2 * b + 1;
        self.data[n]
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i64 / w - b, i as i64 % w - b, c))
    }

    fn binary(&self, o: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let max_order = self.max_order.min(o.max_order);
        let bounds: Vec<usize> = (0..=max_order)
            .map(|n| self.bounds[n].max(o.bounds[n]))
            .collect();
        let mut out = AngularSeries::zero(max_order, bounds);
        for n in 0..=max_order {
            let b = out.bounds[n] as i64;
            for k1 in -b..=b {
                for k2 in -b..=b {
                    let v = f(&self.coeff(n, k1, k2), &o.coeff(n, k1, k2));
                    out.data[n][idx(b as usize, k1, k2)] = v;
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        self.binary(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.binary(o, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for grid in out.data.iter_mut() {
            for v in grid.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Product, truncated at the smaller order. Each order's operand grid is
    /// cleared to integers so the inner convolution runs over `BigInt`.
    pub fn mul(&self, o: &Self) -> Self {
        let max_order = self.max_order.min(o.max_order);
        let a = IntForm::new(self, max_order);
        let b = IntForm::new(o, max_order);
        let bounds: Vec<usize> = (0..=max_order)
            .map(|n| {
                (0..=n)
                    .filter(|&i| !a.terms[i].is_empty() && !b.terms[n - i].is_empty())
                    .map(|i| a.ext[i] + b.ext[n - i])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = AngularSeries::zero(max_order, bounds);
        for n in 0..=max_order {
            let bn = out.bounds[n];
            let side = 2 * bn + 1;
            for i in 0..=n {
                let (ta, tb) = (&a.terms[i], &b.terms[n - i]);
                if ta.is_empty() || tb.is_empty() {
                    continue;
                }
                let mut acc = vec![BigInt::zero(); side * side];
                for (k1, k2, x) in ta {
                    for (l1, l2, y) in tb {
                        acc[idx(bn, k1 + l1, k2 + l2)] += x * y;
                    }
                }
                let den = &a.den[i] * &b.den[n - i];
                for (slot, v) in out.data[n].iter_mut().zip(acc) {
                    if !v.is_zero() {
                        *slot += Rational::new(v, den.clone());
                    }
                }
            }
        }
        out
    }

    /// `1/(1 - u)` for `u` without constant term, as `Σ_m u^m`.
    pub fn geometric(u: &Self) -> Self {
        assert!(
            u.data[0].iter().all(|c| c.is_zero()),
            "geometric series needs a vanishing constant term"
        );
        let mut sum = AngularSeries::one(u.max_order);
        let mut power = AngularSeries::one(u.max_order);
        // u = O(w), so u^m contributes nothing past m > max_order.
        for _ in 0..u.max_order {
            power = power.mul(u);
            if power.data.iter().all(|g| g.iter().all(|c| c.is_zero())) {
                break;
            }
            sum = sum.add(&power);
        }
        sum.trimmed()
    }

    /// The angular average: the `(0,0)` harmonic at every order.
    pub fn constant_term(&self) -> Series {
        Series::new((0..=self.max_order).map(|n| self.coeff(n, 0, 0)).collect())
    }

    /// Swaps the two angles.
    pub fn swap_angles(&self) -> Self {
        let mut out = self.clone();
        for n in 0..=self.max_order {
            let b = self.bounds[n] as i64;
            for k1 in -b..=b {
                for k2 in -b..=b {
                    out.data[n][idx(b as usize, k1, k2)] = self.coeff(n, k2, k1);
                }
            }
        }
        out
    }
}

/// Integer view of an angular series: per order, the nonzero entries scaled by
/// the common denominator.
struct IntForm {
    terms: Vec<Vec<(i64, i64, BigInt)>>,
    den: Vec<BigInt>,
    ext: Vec<usize>,
}

impl IntForm {
    fn new(s: &AngularSeries, max_order: usize) -> Self {
        let mut terms = Vec::with_capacity(max_order + 1);
        let mut den = Vec::with_capacity(max_order + 1);
        let mut ext = Vec::with_capacity(max_order + 1);
        for n in 0..=max_order {
            let d = s.data[n]
                .iter()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let mut t = Vec::new();
            let mut e = 0usize;
            for (k1, k2, c) in s.entries(n) {
                if c.is_zero() {
                    continue;
                }
                e = e.max(k1.unsigned_abs() as usize).max(k2.unsigned_abs() as usize);
                t.push((k1, k2, c.numer() * (&d / c.denom())));
            }
            terms.push(t);
            den.push(d);
            ext.push(e);
        }
        IntForm { terms, den, ext }
    }
}

/// Single-angle coefficients: `rows[n][j]` is the coefficient of `w^n z^(j-n)`.
pub type SingleAngle = Vec<Vec<Rational>>;

/// Coefficients of `x̃` through `w^order`, from `x̃ = w (1 + (z + 1/z) x̃ + x̃^2)`,
/// the rearranged form of `x̃ + 1/x̃ = 1/w - 2cos φ`.
pub fn expand_x_tilde(order: usize) -> SingleAngle {
    assert!(order >= 1, "expansion order must be at least 1");
    let ints = x_tilde_ints(order);
    ints.into_iter()
        .map(|row| row.into_iter().map(Rational::from_integer).collect())
        .collect()
}

fn x_tilde_ints(order: usize) -> Vec<Vec<BigInt>> {
    let mut x: Vec<Vec<BigInt>> = (0..=order)
        .map(|n| vec![BigInt::zero(); 2 * n + 1])
        .collect();
    for n in 1..=order {
        let mut row = vec![BigInt::zero(); 2 * n + 1];
        if n == 1 {
            row[1] = BigInt::one();
        }
        // (z + 1/z) x_{n-1}
        for (j, c) in x[n - 1].iter().enumerate() {
            if !c.is_zero() {
                row[j] += c;
                row[j + 2] += c;
            }
        }
        // Σ_{a+b=n-1} x_a x_b
        for a in 1..n - 1 {
            let b = n - 1 - a;
            for (i, p) in x[a].iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for (j, q) in x[b].iter().enumerate() {
                    if q.is_zero() {
                        continue;
                    }
                    // harmonic (i - a) + (j - b) -> index (i + j - a - b) + n
                    row[i + j + 1] += p * q;
                }
            }
        }
        x[n] = row;
    }
    x
}

/// Coefficients of `ỹ = 2w (1 - 4w cos φ - 4w² sin² φ)^(-1/2)` through `w^order`,
/// by the binomial series `Σ_m C(2m,m)/4^m u^m`.
pub fn expand_y_tilde(order: usize) -> SingleAngle {
    assert!(order >= 1, "expansion order must be at least 1");
    // u = w (2z + 2/z) + w^2 (2 - z^2 - z^-2), rows indexed like SingleAngle.
    let mut u: SingleAngle = (0..=order)
        .map(|n| vec![Rational::zero(); 2 * n + 1])
        .collect();
    if order >= 1 {
        u[1][0] = Rational::from_integer(2.into());
        u[1][2] = Rational::from_integer(2.into());
    }
    if order >= 2 {
        u[2][0] = Rational::from_integer((-1).into());
        u[2][2] = Rational::from_integer(2.into());
        u[2][4] = Rational::from_integer((-1).into());
    }
    let mut total: SingleAngle = (0..=order)
        .map(|n| vec![Rational::zero(); 2 * n + 1])
        .collect();
    total[0][0] = Rational::one();
    let mut power = total.clone();
    let mut binom = Rational::one();
    for m in 1..order {
        power = single_mul(&power, &u);
        binom = binom * Rational::new(BigInt::from(2 * (2 * m - 1)), BigInt::from(4 * m));
        for (t, p) in total.iter_mut().zip(&power) {
            for (a, b) in t.iter_mut().zip(p) {
                if !b.is_zero() {
                    *a += &binom * b;
                }
            }
        }
    }
    // multiply by 2w
    let mut y: SingleAngle = (0..=order)
        .map(|n| vec![Rational::zero(); 2 * n + 1])
        .collect();
    let two = Rational::from_integer(2.into());
    for n in 1..=order {
        for (j, c) in total[n - 1].iter().enumerate() {
            y[n][j + 1] = c * &two;
        }
    }
    y
}

fn single_mul(a: &SingleAngle, b: &SingleAngle) -> SingleAngle {
    let order = a.len().min(b.len()) - 1;
    let mut out: SingleAngle = (0..=order)
        .map(|n| vec![Rational::zero(); 2 * n + 1])
        .collect();
    for n in 0..=order {
        for i in 0..=n {
            let k = n - i;
            for (p, x) in a[i].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (q, y) in b[k].iter().enumerate() {
                    if y.is_zero() {
                        continue;
                    }
                    out[n][p + q] += x * y;
                }
            }
        }
    }
    out
}

/// `χ̃^(3)/8` through `w^order` by direct expansion of the integrand as an
/// [`AngularSeries`]. Exact but expensive (roughly `order^6`); intended for
/// cross-checking the modular engine at small orders.
pub fn chi3_series_angular(order: usize) -> Series {
    chi3_integrand(order, false).constant_term().scale(&Rational::new(1.into(), 8.into()))
}

/// The full integrand `ỹ1ỹ2ỹ3 (1+X)/(1-X) H` with `X = x̃1x̃2x̃3` and
/// `H = f23 (f31 + f23/2)`. With `swapped`, the roles of `φ1` and `φ2` are
/// exchanged before expansion.
pub(crate) fn chi3_integrand(order: usize, swapped: bool) -> AngularSeries {
    let xs = expand_x_tilde(order);
    let ys = expand_y_tilde(order);
    let (d1, d2) = if swapped { ((0, 1), (1, 0)) } else { ((1, 0), (0, 1)) };
    let dirs = [d1, d2, (-1, -1)];
    let x: Vec<AngularSeries> = dirs.iter().map(|&(a, b)| AngularSeries::along(&xs, a, b)).collect();
    let y: Vec<AngularSeries> = dirs.iter().map(|&(a, b)| AngularSeries::along(&ys, a, b)).collect();
    let one = Rational::one();
    // d_j = z_j - 1/z_j = 2i sin φ_j
    let d: Vec<AngularSeries> = dirs
        .iter()
        .map(|&(a, b)| AngularSeries::harmonic_poly(order, &[(a, b, one.clone()), (-a, -b, -one.clone())]))
        .collect();
    let g = |i: usize, j: usize| {
        let p = x[i].mul(&x[j]);
        p.mul(&AngularSeries::geometric(&p))
    };
    let g23 = g(1, 2);
    let g31 = g(2, 0);
    let xx = x[0].mul(&x[1]).mul(&x[2]);
    let two = Rational::from_integer(2.into());
    // (1+X)/(1-X) = 2/(1-X) - 1
    let ratio = AngularSeries::geometric(&xx).scale(&two).sub(&AngularSeries::one(order));
    let d23 = d[1].sub(&d[2]);
    let d31 = d[2].sub(&d[0]);
    // sin products: (s_a - s_b)(s_c - s_d) = -(d_a - d_b)(d_c - d_d)/4
    let bracket = d31.mul(&g31).add(&d23.mul(&g23).scale(&Rational::new(1.into(), 2.into())));
    let h = d23.mul(&g23).mul(&bracket).scale(&Rational::new((-1).into(), 4.into()));
    y[0].mul(&y[1]).mul(&y[2]).mul(&ratio).mul(&h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    fn cos_harmonics(row: &[Rational]) -> Vec<Rational> {
        row.to_vec()
    }

    #[test]
    fn x_tilde_low_orders() {
        let x = expand_x_tilde(3);
        assert_eq!(x[1], vec![int(0), int(1), int(0)]);
        assert_eq!(x[2], vec![int(0), int(1), int(0), int(1), int(0)]);
        // 1 + 4cos^2 = 3 + z^2 + z^-2
        assert_eq!(
            cos_harmonics(&x[3]),
            vec![int(0), int(1), int(0), int(3), int(0), int(1), int(0)]
        );
    }

    #[test]
    fn y_tilde_low_orders() {
        let y = expand_y_tilde(3);
        assert!(y[0].iter().all(|c| c.is_zero()));
        assert_eq!(y[1], vec![int(0), int(2), int(0)]);
        assert_eq!(y[2], vec![int(0), int(2), int(0), int(2), int(0)]);
        // 4 + 8cos^2 = 8 + 2z^2 + 2z^-2
        assert_eq!(y[3], vec![int(0), int(2), int(0), int(8), int(0), int(2), int(0)]);
    }

    #[test]
    fn x_tilde_satisfies_its_quadratic() {
        // w x^2 - (1 - w(z + 1/z)) x + w = 0
        let n = 10;
        let x = expand_x_tilde(n);
        let sq = single_mul(&x, &x);
        for k in 0..=n {
            let mut row = vec![Rational::zero(); 2 * k + 1];
            if k >= 1 {
                for (j, c) in sq[k - 1].iter().enumerate() {
                    row[j + 1] += c;
                }
                for (j, c) in x[k - 1].iter().enumerate() {
                    row[j] += c;
                    row[j + 2] += c;
                }
            }
            for (j, c) in x[k].iter().enumerate() {
                row[j] -= c;
            }
            if k == 1 {
                row[1] += int(1);
            }
            assert!(row.iter().all(|c| c.is_zero()), "order {k}");
        }
    }

    #[test]
    fn y_tilde_matches_x_tilde_relation() {
        // ỹ (1 - x̃^2) = 2 x̃
        let n = 10;
        let x = expand_x_tilde(n);
        let y = expand_y_tilde(n);
        let x2 = single_mul(&x, &x);
        let yx2 = single_mul(&y, &x2);
        for k in 0..=n {
            for j in 0..2 * k + 1 {
                assert_eq!(&y[k][j] - &yx2[k][j], &x[k][j] * int(2), "order {k}");
            }
        }
    }

    #[test]
    fn y_tilde_squared_identity() {
        // ỹ^2 ((1 - 2w cos φ)^2 - 4w^2) = 4w^2
        let n = 8;
        let y = expand_y_tilde(n);
        let y2 = single_mul(&y, &y);
        let q: SingleAngle = vec![
            vec![int(1)],
            vec![int(-2), int(0), int(-2)],
            vec![int(1), int(0), int(-2), int(0), int(1)],
        ];
        let mut q = q;
        q.extend((3..=n).map(|k| vec![Rational::zero(); 2 * k + 1]));
        let lhs = single_mul(&y2, &q);
        for k in 0..=n {
            for j in 0..2 * k + 1 {
                let want = if k == 2 && j == 2 { int(4) } else { int(0) };
                assert_eq!(lhs[k][j], want, "order {k} harmonic {}", j as i64 - k as i64);
            }
        }
    }

    #[test]
    fn angular_route_low_orders() {
        let s = chi3_series_angular(12);
        let want = [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 36, 4];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(s.coeff(n), &int(*w), "order {n}");
        }
    }

    #[test]
    fn integrand_symmetric_in_first_two_angles() {
        let a = chi3_integrand(10, false).constant_term();
        let b = chi3_integrand(10, true).constant_term();
        assert_eq!(a, b);
    }

    #[test]
    fn harmonic_storage_and_scale() {
        let s = AngularSeries::harmonic_poly(2, &[(1, -1, rat(1, 2))]);
        assert_eq!(s.coeff(0, 1, -1), rat(1, 2));
        assert_eq!(s.scale(&int(2)).coeff(0, 1, -1), int(1));
        assert_eq!(s.swap_angles().coeff(0, -1, 1), rat(1, 2));
    }
}

//! Multi-modular evaluation of the angular average.
//!
//! With `x̃ = w u`, `ỹ = 2x̃/(1-x̃²)` and the sine products written through
//! `d = z - 1/z`, the integrand becomes
//!
//! ```text
//! χ̃/8 = -(1/8) CT[ w^7 Y1Y2Y3 (2/(1 - w^3 U) - 1) G23 (2(d3-d1) G31 + (d2-d3) G23) (d2-d3) ]
//! ```
//!
//! where `Y = u/(1 - w²u²)`, `U = u1u2u3`, `G_ij = u_i u_j/(1 - w² u_i u_j)`,
//! and every coefficient is a Laurent polynomial in `z1, z2` with integer
//! coefficients (`z3 = 1/(z1 z2)`). Its constant term equals the average over
//! an `M × M` grid of `M`-th roots of unity as soon as `M` exceeds the
//! harmonic extent, so it is computed modulo word-size primes `p ≡ 1 (mod M)`
//! and recovered by Chinese remaindering against a rigorous majorant.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exactalg::modp::{primes_congruent_one, Crt, Zp};
use crate::exactalg::Rational;

/// Valuation of the integrand in `w`.
pub const VALUATION: usize = 7;

/// Prime size: products of two residues summed over up to 1024 terms fit in u128.
const PRIME_BITS: u32 = 58;

/// Largest order the lazy u128 accumulation supports.
pub const MAX_ORDER: usize = 1000;

/// Parameters of a modular run at a given order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPlan {
    pub order: usize,
    /// Grid size `M`: the roots of unity used per angle.
    pub grid: u64,
    /// Primes to use, in order. The last one is a consistency check.
    pub primes: Vec<u64>,
    /// Majorant of `|CT|` per order.
    pub bound: Vec<BigUint>,
}

impl ModularPlan {
    pub fn new(order: usize) -> Self {
        assert!(order > VALUATION, "order must exceed the integrand valuation");
        assert!(order <= MAX_ORDER, "order beyond the accumulator range");
        let k = order - VALUATION;
        // Unit-part coefficient m carries harmonics |k| <= m + 2.
        let grid = (k + 3) as u64;
        let bound = majorant(order);
        let max = bound.iter().max().cloned().unwrap_or_default();
        // Symmetric range needs modulus > 2 * max; one extra prime verifies.
        let need_bits = max.bits() + 2;
        let mut primes = Vec::new();
        let mut bits = 0u64;
        let candidates = primes_congruent_one(grid, PRIME_BITS, 4096);
        let mut it = candidates.into_iter();
        while bits < need_bits {
            let p = it.next().expect("enough primes of the required shape");
            bits += (p as f64).log2().floor() as u64;
            primes.push(p);
        }
        primes.push(it.next().expect("a verification prime"));
        ModularPlan {
            order,
            grid,
            primes,
            bound,
        }
    }

    /// Number of primes needed for reconstruction (excluding the check prime).
    pub fn reconstruction_primes(&self) -> usize {
        self.primes.len() - 1
    }
}

/// `u` with `x̃ = w u`: `u = 1 + c w u + w² u²`, `c = z + 1/z`, through `w^len-1`.
fn u_series(zp: Zp, c: u64, len: usize) -> Vec<u64> {
    let mut u = vec![0u64; len];
    u[0] = 1;
    for n in 1..len {
        let mut acc: u128 = zp.mul(c, u[n - 1]) as u128;
        if n >= 2 {
            let m = n - 2;
            for a in 0..=m {
                acc += u[a] as u128 * u[m - a] as u128;
            }
        }
        u[n] = zp.reduce_wide(acc);
    }
    u
}

/// `Σ_i a[i] b[n-i]` for `i in 0..=n`, with two independent accumulators
/// to shorten the carry chain.
#[inline]
fn dot_rev(a: &[u64], b: &[u64], n: usize) -> u128 {
    let a = &a[..=n];
    let b = &b[..=n];
    let (mut s0, mut s1) = (0u128, 0u128);
    let mut i = 0;
    while i < n {
        s0 += a[i] as u128 * b[n - i] as u128;
        s1 += a[i + 1] as u128 * b[n - i - 1] as u128;
        i += 2;
    }
    if i == n {
        s0 += a[n] as u128 * b[0] as u128;
    }
    s0 + s1
}

#[inline]
fn mul_trunc(zp: Zp, a: &[u64], b: &[u64], out: &mut [u64]) {
    for n in 0..out.len() {
        out[n] = zp.reduce_wide(dot_rev(a, b, n));
    }
}

/// `1/(1 - w^s v)`.
#[inline]
fn inv_one_minus(zp: Zp, v: &[u64], s: usize, out: &mut [u64]) {
    let len = out.len();
    out[0] = 1;
    for n in 1..len {
        if n < s {
            out[n] = 0;
            continue;
        }
        out[n] = zp.reduce_wide(dot_rev(v, out, n - s));
    }
}

/// Per-angle tables for one prime.
struct AngleTables {
    u: Vec<Vec<u64>>,
    y: Vec<Vec<u64>>,
    d: Vec<u64>,
}

fn angle_tables(zp: Zp, grid: u64, len: usize) -> AngleTables {
    let root = zp.root_of_unity(grid);
    let mut u = Vec::with_capacity(grid as usize);
    let mut y = Vec::with_capacity(grid as usize);
    let mut d = Vec::with_capacity(grid as usize);
    let mut z = 1u64;
    let mut sq = vec![0u64; len];
    let mut inv = vec![0u64; len];
    for _ in 0..grid {
        let zi = zp.inv(z);
        let c = zp.add(z, zi);
        d.push(zp.sub(z, zi));
        let uj = u_series(zp, c, len);
        mul_trunc(zp, &uj, &uj, &mut sq);
        inv_one_minus(zp, &sq, 2, &mut inv);
        let mut yj = vec![0u64; len];
        mul_trunc(zp, &uj, &inv, &mut yj);
        u.push(uj);
        y.push(yj);
        z = zp.mul(z, root);
    }
    AngleTables { u, y, d }
}

/// Symmetric pair table `G(a,b) = u_a u_b/(1 - w² u_a u_b)` and `u_a u_b`.
struct PairTable {
    m: usize,
    len: usize,
    g: Vec<u64>,
    v: Vec<u64>,
}

impl PairTable {
    fn slot(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        // row-major upper triangle
        (a * (2 * self.m - a + 1) / 2 + (b - a)) * self.len
    }

    fn g(&self, a: usize, b: usize) -> &[u64] {
        let s = self.slot(a, b);
        &self.g[s..s + self.len]
    }

    fn v(&self, a: usize, b: usize) -> &[u64] {
        let s = self.slot(a, b);
        &self.v[s..s + self.len]
    }
}

fn pair_table(zp: Zp, t: &AngleTables, len: usize) -> PairTable {
    let m = t.u.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
    let chunks: Vec<(Vec<u64>, Vec<u64>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut v = vec![0u64; len];
            mul_trunc(zp, &t.u[a], &t.u[b], &mut v);
            let mut inv = vec![0u64; len];
            inv_one_minus(zp, &v, 2, &mut inv);
            let mut g = vec![0u64; len];
            mul_trunc(zp, &v, &inv, &mut g);
            (g, v)
        })
        .collect();
    let mut g = Vec::with_capacity(pairs.len() * len);
    let mut v = Vec::with_capacity(pairs.len() * len);
    for (gc, vc) in chunks {
        g.extend_from_slice(&gc);
        v.extend_from_slice(&vc);
    }
    PairTable { m, len, g, v }
}

/// Residues of `CT[...]` (the bracketed integrand above, without the `-1/8`)
/// modulo `p`, for orders `0..=order`.
pub fn residues_for_prime(order: usize, grid: u64, p: u64) -> Vec<u64> {
    let zp = Zp::new(p);
    let len = order - VALUATION + 1;
    let m = grid as usize;
    let tables = angle_tables(zp, grid, len);
    let pairs = pair_table(zp, &tables, len);
    let rows: Vec<Vec<u64>> = (0..m)
        .into_par_iter()
        .map(|j1| {
            let mut acc = vec![0u64; len];
            let mut s = Scratch::new(len);
            for j2 in 0..m {
                let j3 = (2 * m - j1 - j2) % m;
                if j2 == j3 {
                    // d2 = d3 kills the integrand
                    continue;
                }
                // (j1, j2) and (-j1, -j2) give equal contributions.
                let (n1, n2) = ((m - j1) % m, (m - j2) % m);
                let weight = match (j1, j2).cmp(&(n1, n2)) {
                    std::cmp::Ordering::Less => 2u64,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => continue,
                };
                point(zp, &tables, &pairs, (j1, j2, j3), &mut s);
                for (a, &v) in acc.iter_mut().zip(&s.out) {
                    *a = zp.add(*a, zp.mul(weight, v));
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0u64; len];
    for row in rows {
        for (t, v) in total.iter_mut().zip(row) {
            *t = zp.add(*t, v);
        }
    }
    let inv_area = zp.inv(zp.mul(grid % p, grid % p));
    let mut out = vec![0u64; order + 1];
    for (k, v) in total.into_iter().enumerate() {
        out[k + VALUATION] = zp.mul(v, inv_area);
    }
    out
}

struct Scratch {
    uu: Vec<u64>,
    rinv: Vec<u64>,
    bracket: Vec<u64>,
    t1: Vec<u64>,
    y23: Vec<u64>,
    y123: Vec<u64>,
    t2: Vec<u64>,
    out: Vec<u64>,
}

impl Scratch {
    fn new(len: usize) -> Self {
        let z = || vec![0u64; len];
        Scratch {
            uu: z(),
            rinv: z(),
            bracket: z(),
            t1: z(),
            y23: z(),
            y123: z(),
            t2: z(),
            out: z(),
        }
    }
}

fn point(zp: Zp, t: &AngleTables, pairs: &PairTable, (j1, j2, j3): (usize, usize, usize), s: &mut Scratch) {
    let g23 = pairs.g(j2, j3);
    let g31 = pairs.g(j3, j1);
    mul_trunc(zp, &t.u[j1], pairs.v(j2, j3), &mut s.uu);
    inv_one_minus(zp, &s.uu, 3, &mut s.rinv);
    // ratio = 2 rinv - 1
    for (i, r) in s.rinv.iter_mut().enumerate() {
        let two = zp.add(*r, *r);
        *r = if i == 0 { zp.sub(two, 1) } else { two };
    }
    let d23 = zp.sub(t.d[j2], t.d[j3]);
    let d31x2 = zp.add(zp.sub(t.d[j3], t.d[j1]), zp.sub(t.d[j3], t.d[j1]));
    for ((b, &a31), &a23) in s.bracket.iter_mut().zip(g31).zip(g23) {
        *b = zp.reduce_wide(d31x2 as u128 * a31 as u128 + d23 as u128 * a23 as u128);
    }
    mul_trunc(zp, g23, &s.bracket, &mut s.t1);
    mul_trunc(zp, &t.y[j2], &t.y[j3], &mut s.y23);
    mul_trunc(zp, &t.y[j1], &s.y23, &mut s.y123);
    mul_trunc(zp, &s.t1, &s.rinv, &mut s.t2);
    mul_trunc(zp, &s.t2, &s.y123, &mut s.out);
    for v in s.out.iter_mut() {
        *v = zp.mul(*v, d23);
    }
}

/// Coefficientwise majorant of `|CT|`: every Laurent factor replaced by its
/// `ℓ1` norm (`|d| <= 2`, the `u` series evaluated at `z = 1`).
pub fn majorant(order: usize) -> Vec<BigUint> {
    let len = order - VALUATION + 1;
    let mul = |a: &[BigUint], b: &[BigUint]| -> Vec<BigUint> {
        (0..len)
            .map(|n| (0..=n).fold(BigUint::zero(), |acc, i| acc + &a[i] * &b[n - i]))
            .collect()
    };
    let inv_one_minus = |v: &[BigUint], s: usize| -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); len];
        out[0] = BigUint::one();
        for n in s..len {
            out[n] = (0..=n - s).fold(BigUint::zero(), |acc, i| acc + &v[i] * &out[n - s - i]);
        }
        out
    };
    let mut u = vec![BigUint::zero(); len];
    u[0] = BigUint::one();
    for n in 1..len {
        let mut acc = &u[n - 1] * 2u32;
        if n >= 2 {
            for a in 0..=n - 2 {
                acc += &u[a] * &u[n - 2 - a];
            }
        }
        u[n] = acc;
    }
    let u2 = mul(&u, &u);
    let a = inv_one_minus(&u2, 2);
    let y = mul(&u, &a);
    let g = mul(&u2, &a);
    let uu = mul(&u, &u2);
    let r = inv_one_minus(&uu, 3);
    // 2/(1-X) - 1 is majorized by 2/(1-X)
    let y3 = mul(&mul(&y, &y), &y);
    let g2 = mul(&g, &g);
    let prod = mul(&mul(&y3, &g2), &r);
    // |d2-d3| <= 4, bracket <= (8 + 4) G, ratio factor 2
    let mut out = vec![BigUint::zero(); order + 1];
    for (k, v) in prod.into_iter().enumerate() {
        out[k + VALUATION] = v * 96u32;
    }
    out
}

/// Failure to reconstruct the exact coefficients from the residues.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CombineError {
    #[error("not enough primes: have {have}, need {need}")]
    NotEnoughPrimes { have: usize, need: usize },
    #[error("verification prime disagrees at order {0}")]
    Inconsistent(usize),
    #[error("reconstructed coefficient at order {0} exceeds its majorant")]
    ExceedsBound(usize),
}

/// Recovers `χ̃/8` through `w^order` from per-prime residues (in plan order).
pub fn combine(plan: &ModularPlan, residues: &[Vec<u64>]) -> Result<Vec<Rational>, CombineError> {
    let need = plan.primes.len();
    if residues.len() < need {
        return Err(CombineError::NotEnoughPrimes {
            have: residues.len(),
            need,
        });
    }
    let k = plan.reconstruction_primes();
    let mut crt = Crt::new(plan.order + 1);
    for (p, r) in plan.primes[..k].iter().zip(residues) {
        crt.add(*p, r);
    }
    let values = crt.symmetric();
    let check = plan.primes[k];
    let zc = Zp::new(check);
    for (n, v) in values.iter().enumerate() {
        if zc.from_bigint(v) != residues[k][n] {
            return Err(CombineError::Inconsistent(n));
        }
        if v.magnitude() > &plan.bound[n] {
            return Err(CombineError::ExceedsBound(n));
        }
    }
    let eighth = Rational::new(BigInt::from(-1), BigInt::from(8));
    Ok(values
        .into_iter()
        .map(|v| Rational::from_integer(v) * &eighth)
        .collect())
}

/// Whole pipeline for one order: every prime in turn, then reconstruction.
pub fn chi3_modular(order: usize) -> Result<Vec<Rational>, CombineError> {
    let plan = ModularPlan::new(order);
    let residues: Vec<Vec<u64>> = plan
        .primes
        .iter()
        .map(|&p| residues_for_prime(order, plan.grid, p))
        .collect();
    combine(&plan, &residues)
}

/// True when every coefficient is a nonnegative integer (the observed
/// property of the series; anything else points at an arithmetic bug).
pub fn all_nonnegative_integers(c: &[Rational]) -> bool {
    c.iter().all(|r| r.is_integer() && !r.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;
    use crate::lattice::angular::chi3_series_angular;

    #[test]
    fn modular_engine_reproduces_leading_coefficients() {
        let c = chi3_modular(16).unwrap();
        let want = [1, 0, 36, 4, 884, 196, 18532, 6084];
        for n in 0..9 {
            assert_eq!(c[n], int(0));
        }
        for (i, w) in want.iter().enumerate() {
            assert_eq!(c[9 + i], int(*w));
        }
    }

    #[test]
    fn modular_matches_angular_route() {
        let a = chi3_series_angular(13);
        let m = chi3_modular(13).unwrap();
        assert_eq!(a.coeffs(), &m[..]);
    }

    #[test]
    fn majorant_dominates() {
        let c = chi3_modular(20).unwrap();
        let b = majorant(20);
        for (n, v) in c.iter().enumerate() {
            let scaled = (v * int(8)).to_integer();
            assert!(scaled.magnitude() <= &b[n]);
        }
    }
}

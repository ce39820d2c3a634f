//! Word-size prime fields, Chinese remaindering and rational reconstruction.
//!
//! Used where exact rational computation would drown in coefficient growth:
//! large series generation and the guessing systems. Every result produced
//! through this module is re-verified exactly by its caller.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::factor::is_prime_u64;
use super::Rational;

/// Arithmetic modulo a prime below 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zp {
    pub p: u64,
}

impl Zp {
    pub fn new(p: u64) -> Self {
        debug_assert!(p < (1 << 62));
        Zp { p }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub fn reduce_wide(&self, x: u128) -> u64 {
        (x % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero mod p");
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        let r = x.mod_floor(&BigInt::from(self.p));
        r.to_u64().unwrap()
    }

    /// Image of a rational; `None` when the denominator vanishes mod p.
    pub fn from_rational(&self, r: &Rational) -> Option<u64> {
        let d = self.from_bigint(r.denom());
        if d == 0 {
            return None;
        }
        Some(self.mul(self.from_bigint(r.numer()), self.inv(d)))
    }

    /// A primitive `m`-th root of unity; requires `m | p - 1`.
    pub fn root_of_unity(&self, m: u64) -> u64 {
        assert_eq!((self.p - 1) % m, 0, "m must divide p - 1");
        let factors: Vec<u64> = prime_factors_u64(m);
        let cofactor = (self.p - 1) / m;
        for g in 2.. {
            let cand = self.pow(g, cofactor);
            if factors.iter().all(|&q| self.pow(cand, m / q) != 1) {
                return cand;
            }
        }
        unreachable!()
    }
}

fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Descending primes `p < 2^bits` with `p ≡ 1 (mod m)`.
pub fn primes_congruent_one(m: u64, bits: u32, count: usize) -> Vec<u64> {
    let top = (1u64 << bits) - 1;
    let mut k = (top - 1) / m;
    let mut out = Vec::with_capacity(count);
    while out.len() < count && k > 0 {
        let p = k * m + 1;
        if is_prime_u64(p) {
            out.push(p);
        }
        k -= 1;
    }
    out
}

/// Descending primes below `2^bits`.
pub fn primes_below(bits: u32, count: usize) -> Vec<u64> {
    primes_congruent_one(2, bits, count)
}

/// Endless descending primes below `2^bits`.
pub fn prime_stream(bits: u32) -> impl Iterator<Item = u64> {
    let top = (1u64 << bits) - 1;
    (0..top / 2).map(move |k| top - 2 * k).filter(|&p| is_prime_u64(p))
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `(q, r)` with `a = q·b + r`, coefficients lowest first; `b` nonzero and trimmed.
fn poly_div_rem(zp: Zp, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead_inv = zp.inv(*b.last().unwrap());
    let mut q = vec![0; r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = zp.mul(r[i + b.len() - 1], lead_inv);
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = zp.sub(r[i + j], zp.mul(c, bj));
            }
        }
    }
    r.truncate(b.len() - 1);
    trim(&mut r);
    (q, r)
}

fn poly_mul(zp: Zp, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x != 0 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = zp.add(out[i + j], zp.mul(x, y));
            }
        }
    }
    out
}

fn poly_sub(zp: Zp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = a.to_vec();
    out.resize(a.len().max(b.len()), 0);
    for (o, &y) in out.iter_mut().zip(b) {
        *o = zp.sub(*o, y);
    }
    trim(&mut out);
    out
}

/// Inverse of `a` modulo `m` over `F_p` (lowest coefficient first), padded to
/// `deg m` entries; `None` when `gcd(a, m)` is nontrivial.
pub fn poly_inverse_mod_p(zp: Zp, a: &[u64], m: &[u64]) -> Option<Vec<u64>> {
    let mut m = m.to_vec();
    trim(&mut m);
    let n = m.len().checked_sub(1)?;
    let (_, a) = poly_div_rem(zp, a, &m);
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = poly_div_rem(zp, &r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
        let s = poly_sub(zp, &s0, &poly_mul(zp, &q, &s1));
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is the gcd; s0·a ≡ r0
    if r0.len() != 1 {
        return None;
    }
    let c = zp.inv(r0[0]);
    let mut out: Vec<u64> = s0.iter().map(|&x| zp.mul(x, c)).collect();
    out.resize(n, 0);
    Some(out)
}

/// Incremental Chinese remaindering of a vector of residues.
#[derive(Clone, Debug)]
pub struct Crt {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt {
            modulus: BigInt::one(),
            values: vec![BigInt::zero(); len],
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Folds in the residues modulo a fresh prime `p`.
    pub fn add(&mut self, p: u64, residues: &[u64]) {
        assert_eq!(residues.len(), self.values.len());
        let zp = Zp::new(p);
        let m_mod_p = zp.from_bigint(&self.modulus);
        let inv = zp.inv(m_mod_p);
        for (v, &r) in self.values.iter_mut().zip(residues) {
            let cur = zp.from_bigint(v);
            let t = zp.mul(zp.sub(r, cur), inv);
            if t != 0 {
                *v += &self.modulus * BigInt::from(t);
            }
        }
        self.modulus *= BigInt::from(p);
    }

    /// Values in the symmetric range `(-M/2, M/2]`.
    pub fn symmetric(&self) -> Vec<BigInt> {
        let half: BigInt = &self.modulus >> 1;
        self.values
            .iter()
            .map(|v| if *v > half { v - &self.modulus } else { v.clone() })
            .collect()
    }

    /// Rational reconstruction of every entry (Wang's bound), `None` if any fails.
    pub fn rationals(&self) -> Option<Vec<Rational>> {
        self.values
            .iter()
            .map(|v| rational_reconstruction(v, &self.modulus))
            .collect()
    }
}

/// The rational `a/b` with `|a|, b <= sqrt(m/2)` and `a ≡ u b (mod m)`, if any.
pub fn rational_reconstruction(u: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound: BigInt = (m >> 1usize).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Bit length of a nonnegative bound.
pub fn bits_of(x: &BigUint) -> u64 {
    x.bits()
}

/// `|x|` as an unsigned integer.
pub fn magnitude(x: &BigInt) -> BigUint {
    match x.sign() {
        Sign::Minus => (-x).to_biguint().unwrap(),
        _ => x.to_biguint().unwrap(),
    }
}

/// Right kernel of a matrix over `Z/p`, rows given densely. Basis vectors are
/// indexed by free column, with the free coordinate set to 1.
pub fn kernel_mod_p(zp: Zp, mut rows: Vec<Vec<u64>>, cols: usize) -> Vec<Vec<u64>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = zp.inv(rows[r][c]);
        for x in rows[r].iter_mut().skip(c) {
            *x = zp.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = zp.sub(row[j], zp.mul(f, pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = zp.neg(rows[i][f]);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn crt_and_reconstruction() {
        let primes = primes_below(40, 4);
        let target = rat(-123456789, 987654);
        let mut crt = Crt::new(1);
        for &p in &primes {
            let zp = Zp::new(p);
            crt.add(p, &[zp.from_rational(&target).unwrap()]);
        }
        assert_eq!(crt.rationals().unwrap()[0], target);
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        let p = primes_congruent_one(12, 40, 1)[0];
        let zp = Zp::new(p);
        let w = zp.root_of_unity(12);
        assert_eq!(zp.pow(w, 12), 1);
        assert_ne!(zp.pow(w, 6), 1);
        assert_ne!(zp.pow(w, 4), 1);
    }

    #[test]
    fn small_modular_kernel() {
        let zp = Zp::new(101);
        let k = kernel_mod_p(zp, vec![vec![2, 4], vec![1, 2]], 2);
        assert_eq!(k, vec![vec![99, 1]]);
    }
}

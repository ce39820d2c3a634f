//! Local analysis at a single point, generic over the coefficient field so the
//! same code runs at rational points (over Q) and at conjugate sets of
//! algebraic points (over `Q[w]/(p)`).
//!
//! Writing the local operator as `L = tˢ Σᵢ tⁱ Pᵢ(θ)` with `θ = t d/dt`,
//! a solution `t^ρ₀ Σₙ tⁿ Yₙ(log t)` satisfies
//! `P₀(ρ₀+n+D) Yₙ = −Σ_{i≥1} Pᵢ(ρ₀+n−i+D) Y_{n−i}` with `D = d/d(log t)`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::diffop::DiffOp;
use crate::exactalg::{
    rational_roots, AlgebraicPoint, FieldElem, Poly, Rational, Residue, Split,
};

/// Field operations needed beyond [`FieldElem`].
pub trait LocalField: FieldElem {
    /// Rational numbers that are roots of the polynomial (coefficients in
    /// increasing degree) at every point represented by the field.
    fn common_rational_roots(coeffs: &[Self]) -> Vec<Rational>;
    /// Sum over the represented conjugate points.
    fn trace(&self) -> Rational;
    /// Number of represented points.
    fn point_count(&self) -> usize;
}

impl LocalField for Rational {
    fn common_rational_roots(coeffs: &[Self]) -> Vec<Rational> {
        let p = Poly::new(coeffs.to_vec());
        if p.is_zero() {
            return vec![];
        }
        rational_roots(&p).into_iter().map(|(r, _)| r).collect()
    }
    fn trace(&self) -> Rational {
        self.clone()
    }
    fn point_count(&self) -> usize {
        1
    }
}

impl LocalField for Residue {
    fn common_rational_roots(coeffs: &[Self]) -> Vec<Rational> {
        // ρ is a root in every conjugate iff it is a root of each coordinate polynomial.
        let Some(first) = coeffs.first() else {
            return vec![];
        };
        let d = first.modulus().deg().unwrap_or(0);
        let mut g = Poly::zero();
        for j in 0..d {
            let coord = Poly::new(coeffs.iter().map(|c| c.value().coeff(j)).collect());
            g = Poly::gcd(&g, &coord);
        }
        if g.is_zero() || g.is_constant() {
            return vec![];
        }
        rational_roots(&g).into_iter().map(|(r, _)| r).collect()
    }
    fn trace(&self) -> Rational {
        let m = self.modulus();
        let d = m.deg().unwrap_or(0);
        (0..d)
            .map(|i| (self.value() * &Poly::monomial(Rational::one(), i)).rem(m).coeff(i))
            .fold(Rational::zero(), |a, b| a + b)
    }
    fn point_count(&self) -> usize {
        self.modulus().deg().unwrap_or(0)
    }
}

/// Zero test that notices zero divisors: `Ok(true)` for zero, `Ok(false)` for
/// a unit, `Err` with a factor of the modulus otherwise.
pub fn is_zero_strict<F: FieldElem>(x: &F) -> Result<bool, Split> {
    if x.is_zero() {
        return Ok(true);
    }
    x.inv().map(|_| false)
}

/// Coefficients `b[k][j]` of `tʲ dᵏ/dtᵏ` in the local variable.
#[derive(Clone, Debug)]
pub struct LocalOp<F> {
    pub b: Vec<Vec<F>>,
    pub one: F,
}

impl LocalOp<Rational> {
    /// At `w = a`, in `t = w − a`.
    pub fn at_rational(l: &DiffOp, a: &Rational) -> Self {
        let b = l
            .shift(a)
            .coeffs()
            .iter()
            .map(|c| c.coeffs().to_vec())
            .collect();
        LocalOp { b, one: Rational::one() }
    }

    /// At `w = ∞`, in `v = 1/w`.
    pub fn at_infinity(l: &DiffOp) -> Self {
        LocalOp::at_rational(&l.reciprocal(), &Rational::zero())
    }
}

impl LocalOp<Residue> {
    /// At a generic root `α` of `pt.min_poly`, in `t = w − α`.
    pub fn at_algebraic(l: &DiffOp, pt: &AlgebraicPoint) -> Self {
        let b = l
            .coeffs()
            .iter()
            .map(|c| {
                let n = c.deg().map_or(0, |d| d + 1);
                (0..n).map(|j| pt.residue(&c.hasse_derivative(j))).collect()
            })
            .collect();
        LocalOp { b, one: pt.residue(&Poly::one()) }
    }
}

fn falling_factorial(k: usize) -> Poly {
    (0..k).fold(Poly::one(), |acc, i| {
        &acc * &Poly::linear(-Rational::from_integer(i.into()), Rational::one())
    })
}

fn factorial_ratio(hi: usize, lo: usize) -> Rational {
    (lo + 1..=hi).fold(Rational::one(), |acc, x| acc * Rational::from_integer(x.into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Ordinary,
    RegularSingular,
}

/// Exponent data at one point.
#[derive(Clone, Debug)]
pub struct LocalExponents<F> {
    pub regularity: Regularity,
    /// Rational exponents with multiplicities, increasing.
    pub roots: Vec<(Rational, usize)>,
    /// Number of exponents not found among the rationals.
    pub unresolved: usize,
    /// Sum of all exponents (including unresolved ones).
    pub sum: F,
}

/// One formal solution `t^exponent Σₗ logˡ(t) Σₙ coefficients[l][n] tⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSolution<F> {
    pub exponent: Rational,
    pub log_degree: usize,
    pub coefficients: Vec<Vec<F>>,
}

pub struct Engine<F> {
    op: LocalOp<F>,
    q: usize,
    s: i64,
    ffs: Vec<Poly>,
    shifted: BTreeMap<Rational, Vec<Poly>>,
}

impl<F: LocalField> Engine<F> {
    /// Sets up the engine; `None` for an irregular singular point.
    pub fn new(op: LocalOp<F>) -> Result<Option<Self>, Split> {
        let q = op.b.len() - 1;
        let mut vals: Vec<Option<usize>> = Vec::with_capacity(q + 1);
        for bk in &op.b {
            let mut v = None;
            for (j, c) in bk.iter().enumerate() {
                if !is_zero_strict(c)? {
                    v = Some(j);
                    break;
                }
            }
            vals.push(v);
        }
        let vq = vals[q].expect("nonzero leading coefficient") as i64;
        let s = vq - q as i64;
        for (k, v) in vals.iter().enumerate() {
            if let Some(v) = v {
                if (*v as i64) - (k as i64) < s {
                    return Ok(None);
                }
            }
        }
        Ok(Some(Engine {
            op,
            q,
            s,
            ffs: (0..=q).map(falling_factorial).collect(),
            shifted: BTreeMap::new(),
        }))
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn is_ordinary(&self) -> bool {
        self.s == -(self.q as i64)
    }

    fn b(&self, k: usize, j: i64) -> F {
        if j < 0 {
            return self.op.one.zero_like();
        }
        self.op.b[k]
            .get(j as usize)
            .cloned()
            .unwrap_or_else(|| self.op.one.zero_like())
    }

    /// Whether `Pᵢ` vanishes identically because every coefficient is beyond
    /// the polynomial degrees.
    fn beyond(&self, i: usize) -> bool {
        (0..=self.q).all(|k| (k as i64 + self.s + i as i64) >= self.op.b[k].len() as i64)
    }

    /// Coefficients of `Pᵢ(ρ)` in increasing powers of `ρ`.
    pub fn p_poly(&self, i: usize) -> Vec<F> {
        let mut out = vec![self.op.one.zero_like(); self.q + 1];
        for k in 0..=self.q {
            let c = self.b(k, k as i64 + self.s + i as i64);
            if c.is_zero() {
                continue;
            }
            for (e, f) in self.ffs[k].coeffs().iter().enumerate() {
                out[e] = out[e].add(&c.scale(f));
            }
        }
        out
    }

    /// Taylor coefficients of `Pᵢ(a + x)` in `x`.
    fn p_taylor(&mut self, i: usize, a: &Rational) -> Vec<F> {
        if !self.shifted.contains_key(a) {
            let v = self.ffs.iter().map(|f| f.taylor_shift(a)).collect();
            self.shifted.insert(a.clone(), v);
        }
        let sh = &self.shifted[a];
        let mut out = vec![self.op.one.zero_like(); self.q + 1];
        for k in 0..=self.q {
            let c = self.b(k, k as i64 + self.s + i as i64);
            if c.is_zero() {
                continue;
            }
            for (e, f) in sh[k].coeffs().iter().enumerate() {
                out[e] = out[e].add(&c.scale(f));
            }
        }
        out
    }

    /// Exponents: common rational roots with multiplicity; anything left
    /// over is counted as unresolved. Roots that hold at only some of the
    /// conjugate points surface as a [`Split`].
    pub fn exponents(&self) -> Result<LocalExponents<F>, Split> {
        let regularity = if self.is_ordinary() {
            Regularity::Ordinary
        } else {
            Regularity::RegularSingular
        };
        let ind = self.p_poly(0);
        let lead = ind[self.q].clone();
        let lead_inv = lead.inv()?;
        let sum = ind[self.q - 1].mul(&lead_inv).neg();
        let mut rest = ind;
        let mut roots = Vec::new();
        let mut candidates = F::common_rational_roots(&rest);
        candidates.sort();
        for r in candidates {
            let mut m = 0;
            loop {
                if rest.len() < 2 {
                    break;
                }
                let (quot, rem) = synthetic_division(&rest, &r);
                if !is_zero_strict(&rem)? {
                    break;
                }
                rest = quot;
                m += 1;
            }
            if m > 0 {
                roots.push((r, m));
            }
        }
        let found: usize = roots.iter().map(|(_, m)| m).sum();
        let unresolved = self.q - found;
        if unresolved > 0 {
            scan_for_splits(&rest, &roots)?;
        }
        Ok(LocalExponents {
            regularity,
            roots,
            unresolved,
            sum,
        })
    }

    /// Formal solution basis for all rational exponents, computed through
    /// offset `trunc` from each exponent class's smallest exponent (never
    /// less than the class span). Exponent classes are processed independently.
    pub fn basis(&mut self, exps: &LocalExponents<F>, trunc: usize) -> Result<Vec<LocalSolution<F>>, Split> {
        let mut out = Vec::new();
        for class in exponent_classes(&exps.roots) {
            let base = class[0].0.clone();
            let offsets: Vec<(usize, usize)> = class
                .iter()
                .map(|(r, m)| ((r - &base).to_integer().try_into().unwrap(), *m))
                .collect();
            let span = offsets.last().unwrap().0;
            let top = span.max(trunc);
            for &(n0, mult) in &offsets {
                for d in 0..mult {
                    let ys = self.solve_from(&base, &offsets, n0, d, top)?;
                    out.push(pack(&base, n0, ys, &self.op.one));
                }
            }
        }
        Ok(out)
    }

    /// The solution whose first nonzero block is `log^d` at offset `n0`.
    fn solve_from(
        &mut self,
        base: &Rational,
        offsets: &[(usize, usize)],
        n0: usize,
        d: usize,
        top: usize,
    ) -> Result<Vec<Vec<F>>, Split> {
        let zero = self.op.one.zero_like();
        let mut ys: Vec<Vec<F>> = vec![Vec::new(); top + 1];
        let mut start = vec![zero.clone(); d + 1];
        start[d] = self.op.one.clone();
        ys[n0] = start;
        for n in n0 + 1..=top {
            // R = −Σ_{i≥1} Pᵢ(ρ₀+n−i+D) Y_{n−i}
            let mut r: Vec<F> = Vec::new();
            for i in 1..=n - n0 {
                if self.beyond(i) {
                    break;
                }
                let y = &ys[n - i];
                if y.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let a = base + Rational::from_integer(((n - i) as i64).into());
                let tau = self.p_taylor(i, &a);
                let t = apply_taylor(&tau, y);
                add_into(&mut r, &t);
            }
            let r: Vec<F> = r.iter().map(|c| c.neg()).collect();
            let mu = offsets.iter().find(|(o, _)| *o == n).map_or(0, |(_, m)| *m);
            let a = base + Rational::from_integer((n as i64).into());
            let tau = self.p_taylor(0, &a);
            ys[n] = solve_taylor(&tau, mu, &r)?;
        }
        Ok(ys)
    }

    /// Checks a solution by substituting it into the original local operator:
    /// every coefficient that is exactly determined by the truncation vanishes.
    pub fn verify(&self, sol: &LocalSolution<F>) -> bool {
        let len = sol.coefficients.iter().map(Vec::len).max().unwrap_or(0);
        let logs = sol.coefficients.len();
        let zero = self.op.one.zero_like();
        // acc[n][l]: coefficient of t^(ρ − q + n) logˡ
        let mut acc = vec![vec![zero.clone(); logs]; len];
        // cur[n][l]: k-th derivative, coefficient of t^(ρ − k + n) logˡ
        let mut cur: Vec<Vec<F>> = (0..len)
            .map(|n| (0..logs).map(|l| sol.coefficients[l].get(n).cloned().unwrap_or(zero.clone())).collect())
            .collect();
        for k in 0..=self.q {
            if k > 0 {
                let shift = Rational::from_integer((k as i64 - 1).into());
                let mut next = vec![vec![zero.clone(); logs]; len];
                for n in 0..len {
                    let e = &sol.exponent - &shift + Rational::from_integer((n as i64).into());
                    for l in 0..logs {
                        // d/dt (t^e logˡ) = e t^(e−1) logˡ + l t^(e−1) log^(l−1)
                        let c = &cur[n][l];
                        if c.is_zero() {
                            continue;
                        }
                        next[n][l] = next[n][l].add(&c.scale(&e));
                        if l > 0 {
                            next[n][l - 1] = next[n][l - 1]
                                .add(&c.scale(&Rational::from_integer((l as i64).into())));
                        }
                    }
                }
                cur = next;
            }
            for (j, c) in self.op.b[k].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for n in 0..len {
                    let idx = n + (self.q - k) + j;
                    if idx >= len {
                        break;
                    }
                    for l in 0..logs {
                        if !cur[n][l].is_zero() {
                            acc[idx][l] = acc[idx][l].add(&c.mul(&cur[n][l]));
                        }
                    }
                }
            }
        }
        acc.iter().all(|row| row.iter().all(|c| c.is_zero()))
    }
}

/// Exponents grouped by class modulo the integers, each class sorted.
pub fn exponent_classes(roots: &[(Rational, usize)]) -> Vec<Vec<(Rational, usize)>> {
    let mut classes: BTreeMap<Rational, Vec<(Rational, usize)>> = BTreeMap::new();
    for (r, m) in roots {
        let frac = r - Rational::from_integer(r.floor().to_integer());
        classes.entry(frac).or_default().push((r.clone(), *m));
    }
    classes
        .into_values()
        .map(|mut v| {
            v.sort();
            v
        })
        .collect()
}

fn pack<F: LocalField>(base: &Rational, n0: usize, ys: Vec<Vec<F>>, one: &F) -> LocalSolution<F> {
    let logs = ys.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let mut coefficients = vec![Vec::with_capacity(ys.len() - n0); logs];
    for y in &ys[n0..] {
        for (l, col) in coefficients.iter_mut().enumerate() {
            col.push(y.get(l).cloned().unwrap_or_else(|| one.zero_like()));
        }
    }
    // Trim log powers that vanish identically.
    while coefficients.len() > 1 && coefficients.last().unwrap().iter().all(|c| c.is_zero()) {
        coefficients.pop();
    }
    LocalSolution {
        exponent: base + Rational::from_integer((n0 as i64).into()),
        log_degree: coefficients.len() - 1,
        coefficients,
    }
}

/// `Σⱼ τⱼ Dʲ Y` for a polynomial `Y` in `log`.
fn apply_taylor<F: LocalField>(tau: &[F], y: &[F]) -> Vec<F> {
    let mut out: Vec<F> = (0..y.len()).map(|_| y[0].zero_like()).collect();
    for l in 0..y.len() {
        for (j, t) in tau.iter().enumerate() {
            if l + j >= y.len() {
                break;
            }
            if t.is_zero() || y[l + j].is_zero() {
                continue;
            }
            let c = t.mul(&y[l + j]).scale(&factorial_ratio(l + j, l));
            out[l] = out[l].add(&c);
        }
    }
    out
}

fn add_into<F: LocalField>(acc: &mut Vec<F>, t: &[F]) {
    if acc.len() < t.len() {
        let z = t[0].zero_like();
        acc.resize(t.len(), z);
    }
    for (a, b) in acc.iter_mut().zip(t) {
        *a = a.add(b);
    }
}

/// Solves `Dᵘ U(D) Y = R` where `τ = Taylor coefficients of P₀` has its first
/// `μ` entries zero: invert `U(D)` from the top log power down, then
/// integrate `μ` times in `log`.
fn solve_taylor<F: LocalField>(tau: &[F], mu: usize, r: &[F]) -> Result<Vec<F>, Split> {
    if r.is_empty() {
        return Ok(Vec::new());
    }
    let u: Vec<F> = tau[mu..].to_vec();
    let u0_inv = u[0].inv()?;
    let n = r.len();
    let mut v: Vec<F> = (0..n).map(|_| r[0].zero_like()).collect();
    for l in (0..n).rev() {
        let mut acc = r[l].clone();
        for (j, uj) in u.iter().enumerate().skip(1) {
            if l + j >= n {
                break;
            }
            acc = acc.sub(&uj.mul(&v[l + j]).scale(&factorial_ratio(l + j, l)));
        }
        v[l] = acc.mul(&u0_inv);
    }
    for _ in 0..mu {
        let mut w = vec![v[0].zero_like()];
        for (l, c) in v.iter().enumerate() {
            w.push(c.scale(&Rational::new(1.into(), ((l + 1) as i64).into())));
        }
        v = w;
    }
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
    Ok(v)
}

/// Division by `(ρ − r)`: quotient and remainder `p(r)`.
fn synthetic_division<F: LocalField>(p: &[F], r: &Rational) -> (Vec<F>, F) {
    let n = p.len();
    let mut q: Vec<F> = vec![p[0].zero_like(); n - 1];
    let mut carry = p[n - 1].clone();
    for i in (0..n - 1).rev() {
        q[i] = carry.clone();
        carry = p[i].add(&carry.scale(r));
    }
    (q, carry)
}

/// A residual indicial factor may have integer or half-integer roots at
/// some conjugates only; evaluating it there exposes the splitting factor.
fn scan_for_splits<F: LocalField>(rest: &[F], roots: &[(Rational, usize)]) -> Result<(), Split> {
    let reach = roots
        .iter()
        .map(|(r, _)| r.abs().ceil().to_integer())
        .max()
        .unwrap_or_default();
    let bound: i64 = i64::try_from(reach).unwrap_or(0) * 2 + 64;
    for k in -2 * bound..=2 * bound {
        let r = Rational::new(k.into(), 2.into());
        let (_, v) = synthetic_division(rest, &r);
        is_zero_strict(&v)?;
    }
    Ok(())
}

/// Rank over the field, with splitting on zero divisors.
pub fn rank<F: LocalField>(rows: &[Vec<F>]) -> Result<usize, Split> {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let mut piv = None;
        for (i, row) in m.iter().enumerate().skip(r) {
            if !is_zero_strict(&row[c])? {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv()?;
        let pivot = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].mul(&inv);
            for j in c..cols {
                row[j] = row[j].sub(&f.mul(&pivot[j]));
            }
        }
        r += 1;
    }
    Ok(r)
}

//! Guessing a linear ODE with polynomial coefficients from a truncated series.
//!
//! For an ansatz `Σₖ Σⱼ c_{k,j} wʲ f⁽ᵏ⁾ = 0` the coefficients of `wⁿ` give a
//! linear system in the `c_{k,j}`. A candidate is accepted only when its
//! kernel is one-dimensional and the resulting operator also annihilates
//! every coefficient that was held back from the solve.

use num_traits::Zero;
use thiserror::Error;

use crate::diffop::DiffOp;
use crate::exactalg::modp::{kernel_mod_p, primes_below, Crt, Zp};
use crate::exactalg::{kernel_basis, Poly, RatMatrix, Rational, Series};

/// Systems with at most this many unknowns are solved over Q directly.
const EXACT_LIMIT: usize = 60;
const MAX_PRIMES: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeSchedule {
    /// Scan all uniform degrees up to this bound, then shave.
    Uniform(usize),
    /// Fixed shape: `degrees[k]` bounds the coefficient of the k-th derivative.
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessConfig {
    pub max_order: usize,
    pub degrees: DegreeSchedule,
    pub min_surplus: usize,
}

impl Default for GuessConfig {
    fn default() -> Self {
        GuessConfig {
            max_order: 4,
            degrees: DegreeSchedule::Uniform(12),
            min_surplus: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessResult {
    pub operator: DiffOp,
    pub order: usize,
    /// Per-derivative degree bounds of the accepted ansatz, indexed by derivative order.
    pub degrees: Vec<usize>,
    /// Number of held-back coefficients the operator was checked against.
    pub surplus_verified: usize,
    /// Index of the last series coefficient entering the solved system.
    pub used_through: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GuessError {
    #[error("not enough terms: the smallest candidate needs {needed}, the series has {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// A nonzero residual of `L(f)` at series index `index`.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("operator fails to annihilate the series at coefficient {index}")]
pub struct SurplusFailure {
    pub index: usize,
}

pub fn unknown_count(degrees: &[usize]) -> usize {
    degrees.iter().map(|d| d + 1).sum()
}

/// Counts the coefficient indices in `(used_through, trunc(f)]` at which
/// `L(f)` vanishes, stopping at the first that does not.
pub fn verify_surplus(l: &DiffOp, f: &Series, used_through: usize) -> Result<usize, SurplusFailure> {
    let q = l.order().unwrap_or(0);
    let n = f.order().expect("nonempty series");
    assert!(n > used_through, "no surplus coefficients beyond {used_through}");
    let r = l.apply(f);
    // r[m] involves f up to index m + q.
    for idx in used_through + 1..=n {
        if !r.coeff(idx - q).is_zero() {
            return Err(SurplusFailure { index: idx });
        }
    }
    Ok(n - used_through)
}

/// Smallest `used_through` for a shape: one more equation than unknowns.
fn base_used_through(degrees: &[usize]) -> usize {
    unknown_count(degrees) + degrees.len() - 1
}

/// Entries of the ansatz system: row `n` (`0 ≤ n ≤ used_through − q`) holds
/// the coefficient of `wⁿ` contributed by each unknown `c_{k,j}`.
fn exact_system(f: &Series, degrees: &[usize], used_through: usize) -> RatMatrix {
    let q = degrees.len() - 1;
    let rows = used_through - q + 1;
    let derivs = derivative_table(f, q, used_through);
    let cols = unknown_count(degrees);
    let mut m = RatMatrix::zeros(rows, cols);
    for n in 0..rows {
        let mut col = 0;
        for (k, &d) in degrees.iter().enumerate() {
            for j in 0..=d {
                if n >= j {
                    m.set(n, col, derivs[k][n - j].clone());
                }
                col += 1;
            }
        }
    }
    m
}

/// `table[k][m] = [wᵐ] f⁽ᵏ⁾` for `m + k ≤ through`.
fn derivative_table(f: &Series, q: usize, through: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::with_capacity(q + 1);
    let mut cur = f.truncate(through);
    for k in 0..=q {
        if k > 0 {
            cur = cur.derivative();
        }
        out.push(cur.coeffs().to_vec());
    }
    out
}

fn operator_from_vector(v: &[Rational], degrees: &[usize]) -> DiffOp {
    let mut coeffs = Vec::with_capacity(degrees.len());
    let mut at = 0;
    for &d in degrees {
        coeffs.push(Poly::new(v[at..at + d + 1].to_vec()));
        at += d + 1;
    }
    DiffOp::new(coeffs).canonical()
}

enum Kernel {
    Empty,
    Ambiguous,
    Unique(DiffOp),
}

fn kernel_exact(f: &Series, degrees: &[usize], used_through: usize) -> Kernel {
    let ker = kernel_basis(&exact_system(f, degrees, used_through));
    match ker.len() {
        0 => Kernel::Empty,
        1 => Kernel::Unique(operator_from_vector(&ker[0], degrees)),
        _ => Kernel::Ambiguous,
    }
}

/// Kernel by solving modulo word-size primes, Chinese remaindering and
/// rational reconstruction. The reconstructed operator is checked exactly
/// against every equation, so a wrong reconstruction is never returned.
fn kernel_modular(f: &Series, degrees: &[usize], used_through: usize) -> Kernel {
    let q = degrees.len() - 1;
    let rows = used_through - q + 1;
    let cols = unknown_count(degrees);
    let mut crt = Crt::new(cols);
    let mut norm_col: Option<usize> = None;
    let mut previous: Option<Vec<Rational>> = None;
    let mut ambiguous_primes = 0;
    for p in primes_below(62, MAX_PRIMES) {
        let zp = Zp::new(p);
        let Some(table) = derivative_table_mod(zp, f, q, used_through) else {
            continue;
        };
        let mut m = vec![vec![0u64; cols]; rows];
        for (n, row) in m.iter_mut().enumerate() {
            let mut col = 0;
            for (k, &d) in degrees.iter().enumerate() {
                for j in 0..=d {
                    if n >= j {
                        row[col] = table[k][n - j];
                    }
                    col += 1;
                }
            }
        }
        let ker = kernel_mod_p(zp, m, cols);
        match ker.len() {
            // The rank can only drop modulo p, so an empty kernel is final.
            0 => return Kernel::Empty,
            1 => {}
            _ => {
                ambiguous_primes += 1;
                if ambiguous_primes >= 2 && norm_col.is_none() {
                    return Kernel::Ambiguous;
                }
                continue;
            }
        }
        // Normalize on the last nonzero coordinate. Modulo an unlucky prime that
        // coordinate can vanish, so a larger index means earlier primes were bad.
        let Some(c) = ker[0].iter().rposition(|&x| x != 0) else {
            continue;
        };
        match norm_col {
            Some(nc) if c < nc => continue,
            Some(nc) if c == nc => {}
            _ => {
                norm_col = Some(c);
                crt = Crt::new(cols);
                previous = None;
            }
        }
        let inv = zp.inv(ker[0][c]);
        let v: Vec<u64> = ker[0].iter().map(|&x| zp.mul(x, inv)).collect();
        crt.add(p, &v);
        if let Some(r) = crt.rationals() {
            if previous.as_ref() == Some(&r) {
                let op = operator_from_vector(&r, degrees);
                return if verify_through(&op, f, used_through) {
                    Kernel::Unique(op)
                } else {
                    Kernel::Empty
                };
            }
            previous = Some(r);
        } else {
            previous = None;
        }
    }
    Kernel::Empty
}

fn derivative_table_mod(zp: Zp, f: &Series, q: usize, through: usize) -> Option<Vec<Vec<u64>>> {
    let base: Option<Vec<u64>> = f.coeffs()[..=through.min(f.order()?)]
        .iter()
        .map(|c| zp.from_rational(c))
        .collect();
    let base = base?;
    let mut out = vec![base.clone()];
    for k in 1..=q {
        let prev = &out[k - 1];
        let next: Vec<u64> = (0..prev.len().saturating_sub(1))
            .map(|m| zp.mul(prev[m + 1], zp.from_i64(m as i64 + 1)))
            .collect();
        out.push(next);
    }
    Some(out)
}

/// `L(f)` vanishes through series index `through`.
fn verify_through(l: &DiffOp, f: &Series, through: usize) -> bool {
    l.apply(&f.truncate(through)).is_zero()
}

fn solve_cell(f: &Series, degrees: &[usize], used_through: usize) -> Kernel {
    if unknown_count(degrees) <= EXACT_LIMIT {
        kernel_exact(f, degrees, used_through)
    } else {
        kernel_modular(f, degrees, used_through)
    }
}

/// Tries one ansatz shape: first with one equation more than unknowns, then,
/// if the kernel is ambiguous, with every coefficient not held back.
fn try_shape(f: &Series, degrees: &[usize], min_surplus: usize) -> Option<GuessResult> {
    let n = f.order()?;
    let base = base_used_through(degrees);
    let fallback = n.checked_sub(min_surplus)?;
    if base > fallback {
        return None;
    }
    let mut attempts = vec![base];
    if fallback > base {
        attempts.push(fallback);
    }
    for used in attempts {
        match solve_cell(f, degrees, used) {
            Kernel::Empty => return None,
            Kernel::Ambiguous => continue,
            Kernel::Unique(op) => {
                let surplus = verify_surplus(&op, f, used).ok()?;
                return Some(GuessResult {
                    order: op.order().unwrap_or(0),
                    operator: op,
                    degrees: degrees.to_vec(),
                    surplus_verified: surplus,
                    used_through: used,
                });
            }
        }
    }
    None
}

/// Searches for an annihilating operator: increasing order, then increasing
/// uniform degree, then per-derivative degree shaving (uniform schedules
/// only). Returns the first surviving candidate in canonical form.
pub fn guess_ode(f: &Series, cfg: &GuessConfig) -> Result<Option<GuessResult>, GuessError> {
    if cfg.min_surplus < 1 {
        return Err(GuessError::InvalidConfig("min_surplus must be at least 1".into()));
    }
    let n = f.order().unwrap_or(0);
    match &cfg.degrees {
        DegreeSchedule::Explicit(d) => {
            if d.len() < 2 {
                return Err(GuessError::InvalidConfig(
                    "an explicit schedule needs degrees for orders 0..q with q >= 1".into(),
                ));
            }
            let needed = base_used_through(d) + cfg.min_surplus;
            if needed > n {
                return Err(GuessError::InsufficientData { needed: needed + 1, available: n + 1 });
            }
            Ok(try_shape(f, d, cfg.min_surplus))
        }
        DegreeSchedule::Uniform(max_deg) => {
            if cfg.max_order < 1 {
                return Err(GuessError::InvalidConfig("max_order must be at least 1".into()));
            }
            let smallest = base_used_through(&[0, 0]) + cfg.min_surplus;
            if smallest > n {
                return Err(GuessError::InsufficientData { needed: smallest + 1, available: n + 1 });
            }
            for q in 1..=cfg.max_order {
                for d in 0..=*max_deg {
                    let degrees = vec![d; q + 1];
                    if base_used_through(&degrees) + cfg.min_surplus > n {
                        break;
                    }
                    if let Some(found) = try_shape(f, &degrees, cfg.min_surplus) {
                        return Ok(Some(shave(f, found, cfg.min_surplus)));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// Lowers each per-derivative degree, highest derivative first, while a
/// candidate survives.
fn shave(f: &Series, mut best: GuessResult, min_surplus: usize) -> GuessResult {
    for k in (0..best.degrees.len()).rev() {
        while best.degrees[k] > 0 {
            let mut trial = best.degrees.clone();
            trial[k] -= 1;
            match try_shape(f, &trial, min_surplus) {
                Some(r) => best = r,
                None => break,
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    #[test]
    fn geometric_series() {
        let f = Series::from_ints(&[1; 30]);
        let cfg = GuessConfig {
            max_order: 2,
            ..GuessConfig::default()
        };
        let r = guess_ode(&f, &cfg).unwrap().unwrap();
        assert_eq!(r.operator, DiffOp::from_ints(&[&[-1], &[1, -1]]).canonical());
        assert_eq!(r.degrees, vec![0, 1]);
        assert_eq!(r.surplus_verified, 29 - r.used_through);
    }

    #[test]
    fn scaling_invariance() {
        let f = Series::from_ratio(&Poly::x(), &Poly::from_ints(&[1, -4]), 30);
        let cfg = GuessConfig::default();
        let a = guess_ode(&f, &cfg).unwrap().unwrap();
        let b = guess_ode(&f.scale(&int(-7)), &cfg).unwrap().unwrap();
        assert_eq!(a.operator, b.operator);
    }

    #[test]
    fn surplus_fault_injection() {
        let l = DiffOp::from_ints(&[&[-1], &[1, -1]]);
        let mut c = vec![1i64; 30];
        assert_eq!(verify_surplus(&l, &Series::from_ints(&c), 19), Ok(10));
        c[29] = 2;
        assert_eq!(
            verify_surplus(&l, &Series::from_ints(&c), 19),
            Err(SurplusFailure { index: 29 })
        );
    }

    #[test]
    fn too_short() {
        let f = Series::from_ints(&[1; 5]);
        assert!(matches!(
            guess_ode(&f, &GuessConfig::default()),
            Err(GuessError::InsufficientData { .. })
        ));
    }

    #[test]
    fn paper_shape_unknown_count() {
        assert_eq!(unknown_count(&[36, 41, 42, 43, 44, 45, 46, 47]), 352);
        assert_eq!(base_used_through(&[36, 41, 42, 43, 44, 45, 46, 47]), 359);
    }

    #[test]
    fn modular_path_matches_exact() {
        // A rational function satisfies a first-order equation with a1 of degree 3.
        let f = Series::from_ratio(&Poly::from_ints(&[1, 2]), &Poly::from_ints(&[1, -3, 1]), 40);
        let shape = [2, 3];
        let through = base_used_through(&shape);
        let (Kernel::Unique(a), Kernel::Unique(b)) = (
            kernel_modular(&f, &shape, through),
            kernel_exact(&f, &shape, through),
        ) else {
            panic!("expected unique kernels");
        };
        assert_eq!(a, b);
        assert!(a.apply(&f).is_zero());
    }
}

//! The Ising-specific layer: variable maps, exact generation of the
//! `χ̃^(3)(w)` series, a quadrature oracle, Nickel's singularities and the
//! modular invariant.

pub mod angular;
pub mod cache;
pub mod modular;
mod quadrature;
mod singular;

pub use angular::{chi3_series_angular, expand_x_tilde, expand_y_tilde, AngularSeries};
pub use quadrature::chi3_quadrature;
pub use singular::{modular_invariant, nickel_singularities, ModularValue};

use thiserror::Error;

use crate::exactalg::{Rational, Series};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LatticeError {
    #[error("series order {0} is below the minimum of 9")]
    OrderTooSmall(usize),
    #[error("series order {0} exceeds the supported maximum")]
    OrderTooLarge(usize),
    #[error("w = {0} lies outside |w| < 1/4")]
    OutsideDisc(f64),
    #[error("quadrature did not converge (achieved relative error {achieved:e})")]
    NoConvergence { achieved: f64 },
    #[error("value at the algebraic point is not a scalar: {0}")]
    NonScalarResidue(String),
    #[error("algebraic point splits: factor {0} behaves differently")]
    MixedPoint(String),
    #[error("modular reconstruction failed: {0}")]
    Reconstruction(#[from] modular::CombineError),
    #[error("series coefficients are not nonnegative integers")]
    NotIntegral,
    #[error("cache file: {0}")]
    Cache(String),
    #[error("i/o: {0}")]
    Io(String),
}

/// `w = s / (2 (1 + s²))`.
pub fn w_of_s(s: &Rational) -> Rational {
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    s / (two * (one + s * s))
}

/// Floating-point version of [`w_of_s`].
pub fn w_of_s_f64(s: f64) -> f64 {
    s / (2.0 * (1.0 + s * s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    Chi3Over8,
    Chi3,
}

impl Normalization {
    pub fn label(self) -> &'static str {
        match self {
            Normalization::Chi3Over8 => "chi3_over_8",
            Normalization::Chi3 => "chi3",
        }
    }
}

/// The generated series with its normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiSeries {
    pub series: Series,
    pub normalization: Normalization,
    pub generated_order: usize,
}

impl ChiSeries {
    pub fn to_file(&self) -> cache::SeriesFile {
        cache::SeriesFile {
            normalization: Some(self.normalization.label().to_string()),
            series: self.series.clone(),
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (0 means the global pool).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

/// `χ̃^(3)/8` through `w^order`, computed by the modular engine on `threads`
/// workers. The output does not depend on `threads`.
pub fn chi3_series(order: usize, threads: usize) -> Result<ChiSeries, LatticeError> {
    if order < 9 {
        return Err(LatticeError::OrderTooSmall(order));
    }
    if order > modular::MAX_ORDER {
        return Err(LatticeError::OrderTooLarge(order));
    }
    let coeffs = with_threads(threads, || modular::chi3_modular(order))?;
    if !modular::all_nonnegative_integers(&coeffs) {
        return Err(LatticeError::NotIntegral);
    }
    Ok(ChiSeries {
        series: Series::new(coeffs),
        normalization: Normalization::Chi3Over8,
        generated_order: order,
    })
}

/// [`chi3_series`] with per-prime checkpointing: residues already present in
/// the checkpoint file (same order and grid) are reused, each new prime is
/// appended as soon as it finishes, and `progress(done, total)` is called
/// after every prime.
pub fn chi3_series_resumable(
    order: usize,
    threads: usize,
    checkpoint: &std::path::Path,
    mut progress: impl FnMut(usize, usize),
) -> Result<ChiSeries, LatticeError> {
    if order < 9 {
        return Err(LatticeError::OrderTooSmall(order));
    }
    if order > modular::MAX_ORDER {
        return Err(LatticeError::OrderTooLarge(order));
    }
    let plan = modular::ModularPlan::new(order);
    let mut cp = match cache::Checkpoint::load(checkpoint) {
        Some(cp) if cp.order == order && cp.grid == plan.grid => cp,
        _ => cache::Checkpoint {
            order,
            grid: plan.grid,
            residues: Vec::new(),
        },
    };
    cp.residues.retain(|(p, _)| plan.primes.contains(p));
    let total = plan.primes.len();
    for &p in &plan.primes {
        if cp.residues.iter().any(|(q, _)| *q == p) {
            continue;
        }
        let r = with_threads(threads, || modular::residues_for_prime(order, plan.grid, p));
        cp.residues.push((p, r));
        cp.save(checkpoint)?;
        progress(cp.residues.len(), total);
    }
    let residues: Vec<Vec<u64>> = plan
        .primes
        .iter()
        .map(|p| cp.residues.iter().find(|(q, _)| q == p).unwrap().1.clone())
        .collect();
    let coeffs = modular::combine(&plan, &residues)?;
    if !modular::all_nonnegative_integers(&coeffs) {
        return Err(LatticeError::NotIntegral);
    }
    Ok(ChiSeries {
        series: Series::new(coeffs),
        normalization: Normalization::Chi3Over8,
        generated_order: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    #[test]
    fn w_of_s_values() {
        assert_eq!(w_of_s(&int(1)), rat(1, 4));
        assert_eq!(w_of_s(&int(-1)), rat(-1, 4));
        assert_eq!(w_of_s(&int(2)), rat(1, 5));
        assert_eq!(w_of_s_f64(1.0), 0.25);
    }

    #[test]
    fn small_orders_rejected() {
        assert_eq!(chi3_series(8, 1), Err(LatticeError::OrderTooSmall(8)));
    }

    #[test]
    fn resumable_matches_direct() {
        let dir = std::env::temp_dir().join(format!("holonomy-cp-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("chi3.partial");
        let mut calls = 0;
        let a = chi3_series_resumable(18, 1, &path, |_, _| calls += 1).unwrap();
        assert!(calls > 0);
        // second run reuses every prime
        let b = chi3_series_resumable(18, 1, &path, |_, _| panic!("recomputed")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, chi3_series(18, 1).unwrap());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn thread_count_does_not_change_output() {
        assert_eq!(chi3_series(20, 1).unwrap(), chi3_series(20, 3).unwrap());
    }
}

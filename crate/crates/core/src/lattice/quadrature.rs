//! Floating-point evaluation of the double integral, used only as an
//! independent cross-check of the exact series.

use std::f64::consts::PI;

use super::LatticeError;

/// `x̃` and `ỹ` at a given `w` and angle, from `B = 1/w - 2cos φ`.
fn xy(w: f64, phi: f64) -> (f64, f64) {
    let b = 1.0 / w - 2.0 * phi.cos();
    let r = (b * b - 4.0).sqrt();
    // 2/(B + r) avoids the cancellation in (B - r)/2; sign of B follows w.
    let (x, y) = if b > 0.0 {
        (2.0 / (b + r), 2.0 / r)
    } else {
        (2.0 / (b - r), -2.0 / r)
    };
    (x, y)
}

fn integrand(w: f64, p1: f64, p2: f64) -> f64 {
    let p3 = -p1 - p2;
    let (x1, y1) = xy(w, p1);
    let (x2, y2) = xy(w, p2);
    let (x3, y3) = xy(w, p3);
    let xx = x1 * x2 * x3;
    let f = |si: f64, sj: f64, xi: f64, xj: f64| (si - sj) * xi * xj / (1.0 - xi * xj);
    let (s1, s2, s3) = (p1.sin(), p2.sin(), p3.sin());
    let f23 = f(s2, s3, x2, x3);
    let f31 = f(s3, s1, x3, x1);
    y1 * y2 * y3 * (1.0 + xx) / (1.0 - xx) * f23 * (f31 + f23 / 2.0)
}

/// Tensor trapezoid rule with `n` points per angle: spectrally accurate for
/// the smooth periodic integrand.
fn trapezoid(w: f64, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let p1 = i as f64 * h;
        let mut row = 0.0;
        for j in 0..n {
            row += integrand(w, p1, j as f64 * h);
        }
        total += row;
    }
    total / (n * n) as f64
}

/// `χ̃^(3)(w)/8` by nested periodic quadrature, doubling the grid until two
/// successive estimates agree to `rel_tol`.
pub fn chi3_quadrature(w: f64, rel_tol: f64) -> Result<f64, LatticeError> {
    if !(w.abs() < 0.25) {
        return Err(LatticeError::OutsideDisc(w));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let tol = rel_tol.max(1e-12);
    let mut n = 16;
    let mut prev = trapezoid(w, n) / 8.0;
    let mut err = f64::INFINITY;
    while n < 4096 {
        n *= 2;
        let cur = trapezoid(w, n) / 8.0;
        err = ((cur - prev) / cur).abs();
        if err <= tol * 0.1 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(LatticeError::NoConvergence { achieved: err })
}

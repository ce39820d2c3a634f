use holonomy::diffop::{DiffOp, RatFunc};
use holonomy::exactalg::{int, Poly, Rational, Series};
use holonomy::guesser::{guess_ode, DegreeSchedule, GuessConfig};
use num_traits::{One, Zero};

/// Coefficients of `(1 − x)^(−1/2)`: `C(2n, n) / 4ⁿ`.
fn inv_sqrt_coeffs(n: usize) -> Vec<Rational> {
    let mut c = vec![Rational::one()];
    for k in 1..=n {
        let prev = c[k - 1].clone();
        c.push(prev * int(2 * k as i64 - 1) / int(2 * k as i64));
    }
    c
}

/// `w² / ((1 − 4w) √(1 − 16w²))` through `wⁿ`.
fn s2_series(n: usize) -> Series {
    let h = inv_sqrt_coeffs(n / 2);
    let mut sq = vec![Rational::zero(); n + 1];
    for (k, hk) in h.iter().enumerate() {
        if 2 * k <= n {
            sq[2 * k] = hk * Rational::from_integer(16.into()).pow(k as i32);
        }
    }
    let geo = Series::from_ratio(&Poly::one(), &Poly::from_ints(&[1, -4]), n);
    (&Series::new(sq) * &geo).shift_up(2).truncate(n)
}

/// Analytic solution at s = ∞ (v = 1/s) of the elliptic Picard-Fuchs
/// equation, from the three-term recursion
/// `144(m+1)² c_{m+1} = (288m² − 31) c_m − (144(m−1)² − 4) c_{m−1}`.
fn picard_fuchs_at_infinity(n: usize) -> Series {
    let mut c = vec![Rational::one()];
    for m in 0..n {
        let mi = m as i64;
        let prev = if m > 0 { c[m - 1].clone() } else { Rational::zero() };
        let next = (int(288 * mi * mi - 31) * &c[m] - int(144 * (mi - 1) * (mi - 1) - 4) * prev)
            / int(144 * (mi + 1) * (mi + 1));
        c.push(next);
    }
    Series::new(c)
}

fn picard_fuchs() -> DiffOp {
    // 144 s (s−1)² (s d² + d) + (31 s − 4)
    let s_sm1_sq = Poly::from_ints(&[0, 1, -2, 1]).scale(&int(144));
    DiffOp::new(vec![
        Poly::from_ints(&[-4, 31]),
        s_sm1_sq.clone(),
        &s_sm1_sq * &Poly::x(),
    ])
}

#[test]
fn geometric_series_gives_first_order_operator() {
    let f = Series::from_ints(&[1; 30]);
    let cfg = GuessConfig { max_order: 2, ..GuessConfig::default() };
    let r = guess_ode(&f, &cfg).unwrap().unwrap();
    assert!(r.operator.same_up_to_content(&DiffOp::from_ints(&[&[-1], &[1, -1]])));
    // Nothing earlier in the scan survives.
    let earlier = GuessConfig { degrees: DegreeSchedule::Explicit(vec![0, 0]), ..cfg };
    assert_eq!(guess_ode(&f, &earlier).unwrap(), None);
}

#[test]
fn algebraic_solution_gives_n1() {
    let f = s2_series(29);
    assert_eq!(&f.coeffs()[..6], &[int(0), int(0), int(1), int(4), int(24), int(96)][..]);
    let r = guess_ode(&f, &GuessConfig::default()).unwrap().unwrap();
    // d/dw − 2(1+2w)/(w(1−16w²))
    let n1 = DiffOp::first_order_from_solution(&RatFunc::new(
        Poly::from_ints(&[2, 4]),
        Poly::from_ints(&[0, 1, 0, -16]),
    ));
    assert_eq!(r.operator, n1);
    assert!(r.surplus_verified >= 10);
}

#[test]
fn picard_fuchs_recovered_from_recursion_series() {
    let g = picard_fuchs_at_infinity(59);
    let cfg = GuessConfig { max_order: 3, ..GuessConfig::default() };
    let r = guess_ode(&g, &cfg).unwrap().unwrap();
    assert_eq!(r.order, 2);
    assert!(r.operator.apply(&g).is_zero());
    // Back to the s variable.
    assert_eq!(r.operator.reciprocal(), picard_fuchs().canonical());
}

#[test]
fn scan_exhaustion_returns_none() {
    // exp(w) is annihilated by d − 1, found with constant coefficients.
    let mut c = vec![Rational::one()];
    for k in 1..25 {
        c.push(&c[k - 1] / int(k as i64));
    }
    let f = Series::new(c);
    let cfg = GuessConfig {
        max_order: 1,
        degrees: DegreeSchedule::Uniform(0),
        min_surplus: 10,
    };
    assert!(guess_ode(&f, &cfg).unwrap().is_some());
    // 1/(1 - w - w^3) needs degree 3; a degree cap of 1 exhausts the scan.
    let f = Series::from_ratio(&Poly::one(), &Poly::from_ints(&[1, -1, 0, -1]), 25);
    let cfg = GuessConfig { max_order: 1, degrees: DegreeSchedule::Uniform(1), min_surplus: 10 };
    assert_eq!(guess_ode(&f, &cfg).unwrap(), None);
}

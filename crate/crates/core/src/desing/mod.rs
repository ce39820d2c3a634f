//! Removing apparent singularities by filling exponent gaps, and rewriting a
//! Fuchsian operator as a first-order system in the derivation `θ = T·d/dw`.

use std::fmt::Write as _;

use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::diffop::DiffOp;
use crate::exactalg::{
    format_rational, invert_mod, kernel_basis, rational_roots, squarefree_split, Location, Poly,
    RatMatrix, Rational,
};
use crate::frobenius::{analyze, analyze_point, FrobeniusError, PointKind};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DesingError {
    #[error(transparent)]
    Local(#[from] FrobeniusError),
    #[error("{0} is not an apparent singularity")]
    NotApparent(Location),
    #[error("operator is not regular singular at every finite singular point, or has none")]
    NotFuchsian,
    #[error("could not clear the factor {residual} from the leading coefficient")]
    Stuck { residual: Poly },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesingResult {
    pub operator: DiffOp,
    /// Number of gap exponents filled (order increase).
    pub gaps_filled: usize,
    pub removed_points: Vec<Location>,
    /// Left factor `L̃` with `operator = L̃·L`, as `(1/denominator)·Σ numerators[i] dⁱ`.
    pub left_factor_numerators: Vec<Poly>,
    pub left_factor_denominator: Poly,
    pub leading_factorization: Vec<(Poly, usize)>,
}

/// Nonnegative integers below the largest exponent that are not exponents.
pub fn missing_exponents(l: &DiffOp, loc: &Location) -> Result<Vec<i64>, DesingError> {
    let rep = analyze_point(l, loc)?;
    if !rep.is_apparent {
        return Err(DesingError::NotApparent(loc.clone()));
    }
    let ints: Vec<i64> = rep
        .exponents
        .iter()
        .map(|(r, _)| r.to_integer().to_i64().expect("small exponent"))
        .collect();
    let top = ints.iter().copied().max().unwrap_or(0);
    Ok((0..top).filter(|e| !ints.contains(e)).collect())
}

fn factor_of(loc: &Location) -> Poly {
    match loc {
        Location::Finite(r) => Poly::linear(-r.clone(), Rational::one()).normalized_factor(),
        Location::Algebraic(p) => p.min_poly.clone(),
        Location::Infinity => unreachable!("infinity has no polynomial factor"),
    }
}

fn multiplicity_in(p: &Poly, f: &Poly) -> u32 {
    let mut m = 0;
    let mut cur = p.clone();
    while let Some(q) = cur.exact_div(f) {
        cur = q;
        m += 1;
    }
    m
}

/// Rational linear factors plus squarefree parts of the rest, normalized as
/// `1 − 4w` style factors with multiplicities.
pub fn factor_leading(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = p.clone();
    for (r, m) in rational_roots(p) {
        let f = Poly::linear(-r, Rational::one()).normalized_factor();
        rest = rest.exact_div(&f.pow(m as u32)).expect("root divides");
        out.push((f, m));
    }
    if !rest.is_constant() {
        out.extend(squarefree_split(&rest));
    }
    out
}

/// Coordinates of `p mod m` (length `deg m`).
fn coords(p: &Poly, m: &Poly) -> Vec<Rational> {
    let r = p.rem(m);
    (0..m.deg().unwrap()).map(|i| r.coeff(i)).collect()
}

/// Tries `L̃ = (1/M)(dᵍ + Σ_{i<g} uᵢ dⁱ)` with `M = Π fⱼ^mⱼ` over the
/// apparent factors: the `uᵢ` (reduced mod `M`) solve the congruences making
/// every coefficient of `L̃·L` polynomial. The leading coefficient becomes
/// `a_q / M`, so no new finite singularity can appear.
fn gap_fill(l: &DiffOp, modulus: &Poly, g: usize) -> Option<(Vec<Poly>, DiffOp)> {
    let q = l.order().unwrap();
    let e = modulus.deg().unwrap();
    // dⁱ·L for i ≤ g
    let mut powers = vec![l.clone()];
    for i in 1..=g {
        let prev = &powers[i - 1];
        powers.push(DiffOp::d_pow(1).mul(prev));
    }
    let n_unknowns = g * e;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for k in 0..q + g {
        // column blocks: unknowns u_i = Σ_j x_{i,j} w^j, then the constant term from dᵍ·L
        let mut block: Vec<Vec<Rational>> = vec![Vec::with_capacity(n_unknowns + 1); e];
        for p in powers.iter().take(g) {
            let c = p.coeff(k);
            for j in 0..e {
                let col = coords(&(&c * &Poly::monomial(Rational::one(), j)), modulus);
                for (row, v) in block.iter_mut().zip(col) {
                    row.push(v);
                }
            }
        }
        let rhs = coords(&powers[g].coeff(k), modulus);
        for (row, v) in block.iter_mut().zip(rhs) {
            row.push(v);
        }
        rows.extend(block);
    }
    let m = RatMatrix::from_rows(rows);
    let kernel = kernel_basis(&m);
    let v = kernel.into_iter().find(|v| !v[n_unknowns].is_zero())?;
    let scale = v[n_unknowns].recip();
    let mut numerators: Vec<Poly> = (0..g)
        .map(|i| Poly::new((0..e).map(|j| &v[i * e + j] * &scale).collect()))
        .collect();
    numerators.push(Poly::one());
    let mut combined = DiffOp::zero();
    for (i, u) in numerators.iter().enumerate() {
        combined = combined.add(&powers[i].left_mul_poly(u));
    }
    let coeffs: Option<Vec<Poly>> = combined.coeffs().iter().map(|c| c.exact_div(modulus)).collect();
    Some((numerators, DiffOp::new(coeffs?)))
}

/// Desingularizes the given apparent points. The order grows by the number
/// of missing exponents (the largest count over the points), increasing
/// further only if the ordinariness certificate fails.
pub fn desingularize(l: &DiffOp, pts: &[Location]) -> Result<DesingResult, DesingError> {
    let q = l.order().ok_or(FrobeniusError::OrderZero)?;
    if pts.is_empty() {
        return Ok(DesingResult {
            operator: l.canonical(),
            gaps_filled: 0,
            removed_points: vec![],
            left_factor_numerators: vec![Poly::one()],
            left_factor_denominator: Poly::one(),
            leading_factorization: factor_leading(&l.canonical().leading()),
        });
    }
    let mut g = 0;
    let mut modulus = Poly::one();
    for loc in pts {
        g = g.max(missing_exponents(l, loc)?.len());
        let f = factor_of(loc);
        modulus = &modulus * &f.pow(multiplicity_in(&l.leading(), &f));
    }
    let g_min = g.max(1);
    for g in g_min..=g_min + 3 {
        let Some((numerators, op)) = gap_fill(l, &modulus, g) else {
            continue;
        };
        if !certified(&op, pts, q + g)? {
            continue;
        }
        let operator = op.canonical();
        let div = operator.right_divide(l);
        if !div.remainder.is_zero() {
            return Err(DesingError::Inconsistent("input does not right-divide the result".into()));
        }
        return Ok(DesingResult {
            leading_factorization: factor_leading(&operator.leading()),
            operator,
            gaps_filled: g,
            removed_points: pts.to_vec(),
            left_factor_numerators: numerators,
            left_factor_denominator: modulus,
        });
    }
    Err(DesingError::Stuck { residual: modulus })
}

/// Every removed point must be ordinary: exponents `0..order` and no logs.
fn certified(op: &DiffOp, pts: &[Location], order: usize) -> Result<bool, DesingError> {
    for loc in pts {
        let rep = analyze_point(op, loc)?;
        let standard: Vec<(Rational, usize)> =
            (0..order as i64).map(|k| (Rational::from_integer(k.into()), 1)).collect();
        if rep.kind != PointKind::Ordinary || rep.exponents != standard || rep.log_depth != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Polynomial matrix, rows of entries.
pub type PolyMatrix = Vec<Vec<Poly>>;

/// `θ·Y = C·Y` with `θ = T·d/dw` and `Y = (y, θy, …, θ^{q−1}y)`, plus the
/// partial-fraction split `C/T = Σᵢ Rᵢ/fᵢ + P` over the factors `fᵢ` of `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanionSystem {
    pub theta_factor: Poly,
    pub companion: PolyMatrix,
    /// `(fᵢ, Rᵢ)` with `deg Rᵢ < deg fᵢ` entrywise.
    pub residue_matrices: Vec<(Poly, PolyMatrix)>,
    pub polynomial_part: PolyMatrix,
}

impl CompanionSystem {
    pub fn dimension(&self) -> usize {
        self.companion.len()
    }

    /// Residue matrices at the rational poles, `Rᵢ` evaluated as constants.
    pub fn rational_residues(&self) -> Vec<(Rational, RatMatrix)> {
        self.residue_matrices
            .iter()
            .filter(|(f, _)| f.deg() == Some(1))
            .map(|(f, r)| {
                // R/f = (R/f₁)/(w − w₀) with f = f₀ + f₁ w
                let w0 = -f.coeff(0) / f.coeff(1);
                let n = r.len();
                let m = RatMatrix::from_fn(n, n, |i, j| r[i][j].coeff(0) / f.coeff(1));
                (w0, m)
            })
            .collect()
    }

    /// Text form: header, `θ` factor, companion last row, then one block per
    /// factor holding the numerator matrix coefficient by coefficient.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let n = self.dimension();
        let _ = writeln!(out, "dimension={n}");
        let _ = writeln!(out, "theta={}", poly_line(&self.theta_factor));
        for (f, r) in &self.residue_matrices {
            let _ = writeln!(out, "[factor {}]", poly_line(f));
            write_poly_matrix(&mut out, r, f.deg().unwrap());
        }
        let deg = self
            .polynomial_part
            .iter()
            .flatten()
            .filter_map(|p| p.deg())
            .max()
            .map_or(0, |d| d + 1);
        let _ = writeln!(out, "[polynomial]");
        write_poly_matrix(&mut out, &self.polynomial_part, deg);
        out
    }
}

fn poly_line(p: &Poly) -> String {
    p.coeffs().iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn write_poly_matrix(out: &mut String, m: &PolyMatrix, terms: usize) {
    for j in 0..terms {
        let _ = writeln!(out, "w^{j}:");
        for row in m {
            let line: Vec<String> = row.iter().map(|p| format_rational(&p.coeff(j))).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
}

/// `θᵏ` as an ordinary operator, `k = 0..=q`.
fn theta_powers(t: &Poly, q: usize) -> Vec<DiffOp> {
    let theta = DiffOp::new(vec![Poly::zero(), t.clone()]);
    let mut out = vec![DiffOp::from_poly(Poly::one())];
    for k in 1..=q {
        out.push(theta.mul(&out[k - 1]));
    }
    out
}

/// First-order system of an operator that is regular singular at every
/// finite singular point (infinity may be irregular, as after filling gaps
/// with an exponential solution). Operators without finite singular points
/// are rejected.
pub fn companion_system(l: &DiffOp) -> Result<CompanionSystem, DesingError> {
    let q = l.order().ok_or(FrobeniusError::OrderZero)?;
    if q == 0 {
        return Err(FrobeniusError::OrderZero.into());
    }
    let finite: Vec<_> = analyze(l)?
        .points
        .into_iter()
        .filter(|p| p.location != Location::Infinity)
        .collect();
    if finite.is_empty() || finite.iter().any(|p| p.kind == PointKind::Irregular) {
        return Err(DesingError::NotFuchsian);
    }
    let factors: Vec<Poly> = factor_leading(&l.leading()).into_iter().map(|(f, _)| f).collect();
    let t = factors.iter().fold(Poly::one(), |acc, f| &acc * f);
    let a_q = l.leading();
    let thetas = theta_powers(&t, q);
    // T^q·L = a_q·(θ^q + Σ c_k θ^k)
    let mut rest = l.left_mul_poly(&t.pow(q as u32)).sub(&thetas[q].left_mul_poly(&a_q));
    let mut c = vec![Poly::zero(); q];
    for k in (0..q).rev() {
        let top = rest.coeff(k);
        let den = &a_q * &t.pow(k as u32);
        let ck = top
            .exact_div(&den)
            .ok_or_else(|| DesingError::Inconsistent(format!("θ-coefficient {k} is not polynomial")))?;
        rest = rest.sub(&thetas[k].left_mul_poly(&(&a_q * &ck)));
        c[k] = ck;
    }
    if !rest.is_zero() {
        return Err(DesingError::Inconsistent("θ-form does not reproduce the operator".into()));
    }
    let mut companion = vec![vec![Poly::zero(); q]; q];
    for i in 0..q - 1 {
        companion[i][i + 1] = Poly::one();
    }
    for k in 0..q {
        companion[q - 1][k] = -&c[k];
    }
    // C/T = P + Σ Rᵢ/fᵢ entrywise
    let split = |p: &Poly| -> (Poly, Vec<Poly>) {
        let (poly, r) = p.div_rem(&t);
        let parts = factors
            .iter()
            .map(|f| {
                let cof = t.exact_div(f).unwrap();
                let inv = invert_mod(&cof, f).expect("factors are coprime");
                (&r * &inv).rem(f)
            })
            .collect();
        (poly, parts)
    };
    let mut polynomial_part = vec![vec![Poly::zero(); q]; q];
    let mut residue_matrices: Vec<(Poly, PolyMatrix)> =
        factors.iter().map(|f| (f.clone(), vec![vec![Poly::zero(); q]; q])).collect();
    for i in 0..q {
        for j in 0..q {
            let (p, parts) = split(&companion[i][j]);
            polynomial_part[i][j] = p;
            for (slot, part) in residue_matrices.iter_mut().zip(parts) {
                slot.1[i][j] = part;
            }
        }
    }
    let sys = CompanionSystem {
        theta_factor: t,
        companion,
        residue_matrices,
        polynomial_part,
    };
    if !reduces_to(&sys, l) {
        return Err(DesingError::Inconsistent("system does not reduce to the operator".into()));
    }
    Ok(sys)
}

/// Scalar equation `θ^q − Σ_k C[q−1][k] θᵏ` for the first component, with
/// `C = T·(P + Σ Rᵢ/fᵢ)` rebuilt from the partial fractions.
pub fn reduce_system(sys: &CompanionSystem) -> DiffOp {
    let t = &sys.theta_factor;
    let q = sys.dimension();
    let entry = |i: usize, j: usize| -> Poly {
        let mut acc = t * &sys.polynomial_part[i][j];
        for (f, r) in &sys.residue_matrices {
            acc = &acc + &(&t.exact_div(f).unwrap() * &r[i][j]);
        }
        acc
    };
    // companion shape: θ^q y = Σ_k C[q−1][k] θ^k y
    let thetas = theta_powers(t, q);
    let mut op = thetas[q].clone();
    for k in 0..q {
        op = op.sub(&thetas[k].left_mul_poly(&entry(q - 1, k)));
    }
    op.canonical()
}

/// Whether the system's scalar equation equals `L` up to a rational factor.
pub fn reduces_to(sys: &CompanionSystem, l: &DiffOp) -> bool {
    let q = sys.dimension() as u32;
    reduce_system(sys)
        .left_mul_poly(&l.leading())
        .same_up_to_content(&l.left_mul_poly(&sys.theta_factor.pow(q)))
}

/// Whether `small` right-divides `big` exactly.
pub fn is_exact_multiple(big: &DiffOp, small: &DiffOp) -> bool {
    big.right_divide(small).remainder.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    #[test]
    fn cubic_example_fills_gap_two() {
        let l = DiffOp::from_ints(&[&[], &[], &[-1], &[0, 1]]);
        let zero = Location::Finite(int(0));
        assert_eq!(missing_exponents(&l, &zero).unwrap(), vec![2]);
        let r = desingularize(&l, &[zero]).unwrap();
        assert_eq!(r.operator, DiffOp::from_ints(&[&[], &[], &[], &[], &[1]]));
        assert!(is_exact_multiple(&r.operator, &l));
    }

    #[test]
    fn nothing_to_remove() {
        let l = DiffOp::from_ints(&[&[-1], &[1, -1]]);
        let r = desingularize(&l, &[]).unwrap();
        assert_eq!(r.gaps_filled, 0);
        assert_eq!(r.operator, l.canonical());
    }

    #[test]
    fn ordinary_point_is_rejected() {
        let l = DiffOp::from_ints(&[&[], &[], &[1]]);
        assert!(matches!(
            missing_exponents(&l, &Location::Finite(int(0))),
            Err(DesingError::NotApparent(_))
        ));
    }

    #[test]
    fn first_order_system() {
        // y = w/(1 − 4w): w(1 − 4w) y' − y = 0
        let l = DiffOp::from_ints(&[&[-1], &[0, 1, -4]]);
        let sys = companion_system(&l).unwrap();
        assert_eq!(sys.companion, vec![vec![Poly::one()]]);
        let res = sys.rational_residues();
        assert_eq!(res.len(), 2);
        let at0 = res.iter().find(|(w, _)| w.is_zero()).unwrap();
        assert_eq!(at0.1, RatMatrix::from_rows(vec![vec![int(1)]]));
        assert!(reduces_to(&sys, &l));
    }

    #[test]
    fn irregular_input_rejected() {
        let l = DiffOp::from_ints(&[&[-1], &[1]]);
        assert_eq!(companion_system(&l), Err(DesingError::NotFuchsian));
    }

    #[test]
    fn system_round_trip_second_order() {
        // Picard-Fuchs equation
        let s = Poly::from_ints(&[0, 144, -288, 144]);
        let l = DiffOp::new(vec![Poly::from_ints(&[-4, 31]), s.clone(), &s * &Poly::x()]);
        let sys = companion_system(&l).unwrap();
        assert_eq!(sys.dimension(), 2);
        assert!(reduces_to(&sys, &l));
        assert!(sys.to_file_string().starts_with("dimension=2\n"));
    }
}

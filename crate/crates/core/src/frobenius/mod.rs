//! Local analysis of Fuchsian operators: singular points, indicial exponents,
//! log-bearing formal solutions, apparent singularities, formal monodromy and
//! the Fuchsian relation. Algebraic points are handled symbolically in
//! `Q[w]/(p)`, splitting `p` whenever a zero divisor shows up.

mod local;
mod rational;

pub use local::{exponent_classes, LocalField, LocalSolution};
pub use rational::rational_solutions;

use std::fmt;
use std::fmt::Write as _;

use num_integer::Integer;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diffop::DiffOp;
use crate::exactalg::{
    format_rational, rational_roots, squarefree_split, AlgebraicPoint, Location, Poly, Rational,
    Residue, Split,
};
use local::{Engine, LocalExponents, LocalOp, Regularity};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrobeniusError {
    #[error("operator has order zero")]
    OrderZero,
    #[error("irregular singular point at {0}")]
    Irregular(Location),
    #[error("{location} is not a singular point of the operator")]
    NotSingular { location: Location },
    #[error("{location} splits: the factor {factor} behaves differently from its cofactor")]
    NeedsSplit { location: Location, factor: Poly },
    #[error("local solution at {location} failed the substitution check")]
    Inconsistent { location: Location },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    Ordinary,
    RegularSingular,
    Irregular,
}

/// Exponents modulo the integers sharing one monodromy eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentClass {
    /// Representative in `[0, 1)`.
    pub residue: Rational,
    /// Jordan block sizes of the log part, decreasing.
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyStructure {
    pub classes: Vec<ExponentClass>,
    /// Smallest `k` with `Nᵏ = 0` for the log-shift nilpotent.
    pub nilpotency_order: usize,
    /// `Π exp(2πiρ)` over the exponents, when every `2ρ` is an integer.
    pub determinant_sign: Option<i8>,
    /// Exponents not covered by the classes.
    pub unresolved: usize,
}

impl MonodromyStructure {
    pub fn max_block(&self) -> usize {
        self.classes
            .iter()
            .flat_map(|c| c.blocks.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.unresolved == 0
            && self
                .classes
                .iter()
                .all(|c| c.residue.is_zero() && c.blocks.iter().all(|&b| b == 1))
    }
}

/// Analysis of one point (a conjugate set for algebraic locations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularPointReport {
    pub location: Location,
    pub kind: PointKind,
    /// Rational exponents with multiplicities, increasing.
    pub exponents: Vec<(Rational, usize)>,
    /// Exponents that are not rational (or not integer/half-integer at
    /// algebraic points).
    pub unresolved: usize,
    /// Sum of the exponents over all conjugate points.
    pub exponent_trace: Rational,
    /// Number of points represented.
    pub multiplicity: usize,
    pub is_apparent: bool,
    pub log_depth: usize,
    pub monodromy: Option<MonodromyStructure>,
}

impl SingularPointReport {
    /// Exponents in decreasing order, repeated by multiplicity.
    pub fn exponent_list(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self
            .exponents
            .iter()
            .flat_map(|(r, m)| std::iter::repeat(r.clone()).take(*m))
            .collect();
        v.reverse();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuchsianCheck {
    pub is_fuchsian: bool,
    /// Number of singular points, conjugates counted, infinity included (`m+1`).
    pub point_count: usize,
    pub relation_lhs: Rational,
    pub relation_rhs: Rational,
}

impl FuchsianCheck {
    pub fn holds(&self) -> bool {
        self.is_fuchsian && self.relation_lhs == self.relation_rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub points: Vec<SingularPointReport>,
    pub fuchsian: FuchsianCheck,
}

/// Formal solutions at a point, over the rationals or over `Q[w]/(p)`.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalBasis {
    Rational(Vec<LocalSolution<Rational>>),
    Algebraic(Vec<LocalSolution<Residue>>),
}

impl LocalBasis {
    pub fn len(&self) -> usize {
        match self {
            LocalBasis::Rational(v) => v.len(),
            LocalBasis::Algebraic(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn log_depth(&self) -> usize {
        match self {
            LocalBasis::Rational(v) => v.iter().map(|s| s.log_degree).max().unwrap_or(0),
            LocalBasis::Algebraic(v) => v.iter().map(|s| s.log_degree).max().unwrap_or(0),
        }
    }
}

/// `(m−1)·q·(q−1)/2`.
pub fn fuchs_relation_rhs(point_count_minus_one: i64, q: i64) -> Rational {
    Rational::from_integer(((point_count_minus_one - 1) * q * (q - 1) / 2).into())
}

fn order_of(l: &DiffOp) -> Result<usize, FrobeniusError> {
    match l.order() {
        Some(q) if q >= 1 => Ok(q),
        _ => Err(FrobeniusError::OrderZero),
    }
}

/// Default truncation: `2q` plus the largest integer gap plus five.
pub fn default_truncation(q: usize, exponents: &[(Rational, usize)]) -> usize {
    2 * q + largest_gap(exponents) + 5
}

fn largest_gap(exponents: &[(Rational, usize)]) -> usize {
    exponent_classes(exponents)
        .iter()
        .map(|c| {
            (&c.last().unwrap().0 - &c[0].0)
                .to_integer()
                .to_usize()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Candidate locations before refinement: rational roots of the leading
/// coefficient, one algebraic point per remaining squarefree factor, infinity.
fn raw_locations(l: &DiffOp) -> Vec<Location> {
    let lead = l.leading();
    let mut out = Vec::new();
    let mut rest = lead.clone();
    for (r, m) in rational_roots(&lead) {
        out.push(Location::Finite(r.clone()));
        let lin = Poly::linear(-r, Rational::one()).pow(m as u32);
        rest = rest.exact_div(&lin).expect("root divides");
    }
    if !rest.is_constant() {
        for (f, _) in squarefree_split(&rest) {
            if !f.is_constant() {
                out.push(Location::Algebraic(AlgebraicPoint::new(&f)));
            }
        }
    }
    out.push(Location::Infinity);
    out
}

/// Location for a factor of an algebraic point's polynomial.
fn piece(f: &Poly) -> Location {
    let f = f.normalized_factor();
    if f.deg() == Some(1) {
        Location::Finite(-f.coeff(0) / f.coeff(1))
    } else {
        Location::Algebraic(AlgebraicPoint::new(&f))
    }
}

fn split_location(p: &AlgebraicPoint, factor: &Poly) -> Vec<Location> {
    let g = factor.normalized_factor();
    let co = p.min_poly.exact_div(&g).expect("split factor divides");
    vec![piece(&g), piece(&co)]
}

/// Singular points of `L`, with algebraic sets split until every conjugate
/// behaves alike, sorted: rationals, algebraic sets, infinity.
pub fn singular_points(l: &DiffOp) -> Result<Vec<Location>, FrobeniusError> {
    Ok(analyze(l)?.points.into_iter().map(|p| p.location).collect())
}

/// Full analysis of every singular point plus the Fuchsian relation.
pub fn analyze(l: &DiffOp) -> Result<Analysis, FrobeniusError> {
    let q = order_of(l)?;
    let mut queue = raw_locations(l);
    let mut points = Vec::new();
    while !queue.is_empty() {
        let results: Vec<Result<SingularPointReport, Vec<Location>>> =
            queue.par_iter().map(|loc| report_at(l, loc)).collect();
        queue = Vec::new();
        for r in results {
            match r {
                Ok(rep) => points.push(rep),
                Err(pieces) => queue.extend(pieces),
            }
        }
    }
    points.sort_by(|a, b| a.location.cmp(&b.location));
    let fuchsian = relation(q, &points);
    Ok(Analysis { points, fuchsian })
}

fn relation(q: usize, points: &[SingularPointReport]) -> FuchsianCheck {
    let is_fuchsian = points.iter().all(|p| p.kind != PointKind::Irregular);
    let point_count: usize = points.iter().map(|p| p.multiplicity).sum();
    let relation_lhs = points
        .iter()
        .filter(|p| p.kind != PointKind::Irregular)
        .fold(Rational::zero(), |acc, p| acc + &p.exponent_trace);
    FuchsianCheck {
        is_fuchsian,
        point_count,
        relation_lhs,
        relation_rhs: fuchs_relation_rhs(point_count as i64 - 1, q as i64),
    }
}

/// Exponent sums and the relation `Σρ = (m−1)q(q−1)/2`.
pub fn fuchsian_check(l: &DiffOp) -> Result<FuchsianCheck, FrobeniusError> {
    Ok(analyze(l)?.fuchsian)
}

/// Report at one location, or the pieces it splits into.
fn report_at(l: &DiffOp, loc: &Location) -> Result<SingularPointReport, Vec<Location>> {
    let res = match loc {
        Location::Finite(a) => report_with(loc, LocalOp::at_rational(l, a)),
        Location::Infinity => report_with(loc, LocalOp::at_infinity(l)),
        Location::Algebraic(p) => report_with(loc, LocalOp::at_algebraic(l, p)),
    };
    res.map_err(|s| match loc {
        Location::Algebraic(p) => split_location(p, &s.factor),
        _ => unreachable!("rational arithmetic never splits"),
    })
}

fn report_with<F: LocalField>(loc: &Location, op: LocalOp<F>) -> Result<SingularPointReport, Split> {
    let multiplicity = match loc {
        Location::Algebraic(p) => p.degree(),
        _ => 1,
    };
    let Some(mut engine) = Engine::new(op)? else {
        return Ok(SingularPointReport {
            location: loc.clone(),
            kind: PointKind::Irregular,
            exponents: vec![],
            unresolved: 0,
            exponent_trace: Rational::zero(),
            multiplicity,
            is_apparent: false,
            log_depth: 0,
            monodromy: None,
        });
    };
    let exps = engine.exponents()?;
    let kind = match exps.regularity {
        Regularity::Ordinary => PointKind::Ordinary,
        Regularity::RegularSingular => PointKind::RegularSingular,
    };
    // Logs can only appear at exponent offsets, so the class span suffices.
    let basis = engine.basis(&exps, 0)?;
    let log_depth = basis.iter().map(|s| s.log_degree).max().unwrap_or(0);
    let monodromy = monodromy_from(&exps, &basis, engine.order())?;
    let is_apparent = kind == PointKind::RegularSingular && apparent_from(&exps, log_depth);
    Ok(SingularPointReport {
        location: loc.clone(),
        kind,
        exponents: exps.roots.clone(),
        unresolved: exps.unresolved,
        exponent_trace: exps.sum.trace(),
        multiplicity,
        is_apparent,
        log_depth,
        monodromy: Some(monodromy),
    })
}

fn apparent_from<F>(exps: &LocalExponents<F>, log_depth: usize) -> bool {
    exps.unresolved == 0
        && log_depth == 0
        && exps
            .roots
            .iter()
            .all(|(r, m)| *m == 1 && r.is_integer() && !r.is_negative())
}

fn monodromy_from<F: LocalField>(
    exps: &LocalExponents<F>,
    basis: &[LocalSolution<F>],
    _q: usize,
) -> Result<MonodromyStructure, Split> {
    let mut classes = Vec::new();
    let mut nilpotency_order = 0;
    for class in exponent_classes(&exps.roots) {
        let base = class[0].0.clone();
        let top = (&class.last().unwrap().0 - &base).to_integer().to_usize().unwrap();
        let members: Vec<&LocalSolution<F>> = basis
            .iter()
            .filter(|s| (&s.exponent - &base).is_integer())
            .collect();
        let depth = members.iter().map(|s| s.log_degree).max().unwrap_or(0);
        // ranks of Nᵏ restricted to the class, N = ∂/∂log
        let mut ranks = Vec::new();
        for k in 0..=depth + 1 {
            let rows: Vec<Vec<F>> = members
                .iter()
                .map(|s| flatten_nk(s, &base, top, depth, k))
                .collect();
            ranks.push(local::rank(&rows)?);
        }
        ranks.push(0);
        // blocks of size ≥ k: rank Nᵏ⁻¹ − rank Nᵏ
        let at_least = |k: usize| ranks[k - 1] - ranks[k];
        let mut blocks = Vec::new();
        for k in 1..=depth + 1 {
            blocks.extend(std::iter::repeat(k).take(at_least(k) - at_least(k + 1)));
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        nilpotency_order = nilpotency_order.max(blocks.first().copied().unwrap_or(0));
        let residue = &base - Rational::from_integer(base.floor().to_integer());
        classes.push(ExponentClass { residue, blocks });
    }
    let determinant_sign = if exps.unresolved == 0
        && exps.roots.iter().all(|(r, _)| (r * Rational::from_integer(2.into())).is_integer())
    {
        let odd: usize = exps
            .roots
            .iter()
            .filter(|(r, _)| !r.is_integer())
            .map(|(_, m)| m)
            .sum();
        Some(if odd % 2 == 0 { 1 } else { -1 })
    } else {
        None
    };
    Ok(MonodromyStructure {
        classes,
        nilpotency_order,
        determinant_sign,
        unresolved: exps.unresolved,
    })
}

/// `Nᵏ s` as a flat coefficient vector over (log power, offset from `base`).
fn flatten_nk<F: LocalField>(
    s: &LocalSolution<F>,
    base: &Rational,
    top: usize,
    depth: usize,
    k: usize,
) -> Vec<F> {
    let zero = s.coefficients[0][0].zero_like();
    let shift = (&s.exponent - base).to_integer().to_usize().unwrap();
    let mut out = vec![zero; (depth + 1) * (top + 1)];
    for (l, col) in s.coefficients.iter().enumerate() {
        if l < k {
            continue;
        }
        let f = Rational::from_integer(((l - k + 1)..=l).product::<usize>().into());
        for (n, c) in col.iter().enumerate() {
            if shift + n > top {
                break;
            }
            out[(l - k) * (top + 1) + shift + n] = c.scale(&f);
        }
    }
    out
}

/// `(x^r − 1)^b` with `r` the common denominator of the exponent classes and
/// `b` the largest Jordan block: a relation every local monodromy matrix
/// `M` with this structure satisfies. Coefficients in increasing degree.
pub fn minimal_polynomial_relation(ms: &MonodromyStructure) -> Poly {
    let r = ms
        .classes
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.residue.denom()))
        .to_usize()
        .expect("small denominators");
    let b = ms.max_block().max(1);
    (&Poly::monomial(Rational::one(), r) - &Poly::one()).pow(b as u32)
}

/// Single-point analysis; algebraic locations that split are an error.
pub fn analyze_point(l: &DiffOp, loc: &Location) -> Result<SingularPointReport, FrobeniusError> {
    order_of(l)?;
    report_at(l, loc).map_err(|pieces| FrobeniusError::NeedsSplit {
        location: loc.clone(),
        factor: match &pieces[0] {
            Location::Finite(r) => Poly::linear(-r.clone(), Rational::one()),
            Location::Algebraic(p) => p.min_poly.clone(),
            Location::Infinity => unreachable!(),
        },
    })
}

/// Rational exponents with multiplicity at `loc`.
pub fn indicial_exponents(l: &DiffOp, loc: &Location) -> Result<Vec<(Rational, usize)>, FrobeniusError> {
    let rep = analyze_point(l, loc)?;
    if rep.kind == PointKind::Irregular {
        return Err(FrobeniusError::Irregular(loc.clone()));
    }
    Ok(rep.exponents)
}

pub fn is_apparent(l: &DiffOp, loc: &Location) -> Result<bool, FrobeniusError> {
    let rep = analyze_point(l, loc)?;
    if rep.kind == PointKind::Irregular {
        return Err(FrobeniusError::Irregular(loc.clone()));
    }
    Ok(rep.is_apparent)
}

pub fn formal_monodromy(l: &DiffOp, loc: &Location) -> Result<MonodromyStructure, FrobeniusError> {
    let rep = analyze_point(l, loc)?;
    rep.monodromy.ok_or_else(|| FrobeniusError::Irregular(loc.clone()))
}

/// Formal solution basis through `trunc` terms (default when `None`), each
/// verified by substitution.
pub fn local_basis(l: &DiffOp, loc: &Location, trunc: Option<usize>) -> Result<LocalBasis, FrobeniusError> {
    order_of(l)?;
    let split = |s: Split| FrobeniusError::NeedsSplit { location: loc.clone(), factor: s.factor };
    match loc {
        Location::Finite(a) => basis_with(loc, LocalOp::at_rational(l, a), trunc)
            .map(LocalBasis::Rational)
            .map_err(|e| e.unwrap_or_else(|_| unreachable!())),
        Location::Infinity => basis_with(loc, LocalOp::at_infinity(l), trunc)
            .map(LocalBasis::Rational)
            .map_err(|e| e.unwrap_or_else(|_| unreachable!())),
        Location::Algebraic(p) => basis_with(loc, LocalOp::at_algebraic(l, p), trunc)
            .map(LocalBasis::Algebraic)
            .map_err(|e| e.unwrap_or_else(split)),
    }
}

fn basis_with<F: LocalField>(
    loc: &Location,
    op: LocalOp<F>,
    trunc: Option<usize>,
) -> Result<Vec<LocalSolution<F>>, Result<FrobeniusError, Split>> {
    let mut engine = Engine::new(op)
        .map_err(Err)?
        .ok_or_else(|| Ok(FrobeniusError::Irregular(loc.clone())))?;
    let exps = engine.exponents().map_err(Err)?;
    let q = engine.order();
    let trunc = trunc.unwrap_or_else(|| default_truncation(q, &exps.roots));
    let basis = engine.basis(&exps, trunc).map_err(Err)?;
    for s in &basis {
        if !engine.verify(s) {
            return Err(Ok(FrobeniusError::Inconsistent { location: loc.clone() }));
        }
    }
    Ok(basis)
}

fn point_label(p: &SingularPointReport) -> String {
    match &p.location {
        Location::Algebraic(a) => format!("{} ({} points)", p.location, a.degree()),
        other => other.to_string(),
    }
}

impl fmt::Display for MonodromyStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes: Vec<String> = self
            .classes
            .iter()
            .map(|c| {
                let b: Vec<String> = c.blocks.iter().map(|b| b.to_string()).collect();
                format!("{} mod 1: [{}]", format_rational(&c.residue), b.join(" "))
            })
            .collect();
        write!(f, "{}; nilpotency {}", classes.join(", "), self.nilpotency_order)?;
        if let Some(s) = self.determinant_sign {
            write!(f, "; det {}", if s > 0 { "+1" } else { "-1" })?;
        }
        Ok(())
    }
}

/// Plain-text report, one block per point.
pub fn render_report(a: &Analysis) -> String {
    let mut out = String::new();
    for p in &a.points {
        let _ = writeln!(out, "point: {}", point_label(p));
        let kind = match p.kind {
            PointKind::Ordinary => "ordinary",
            PointKind::RegularSingular => "regular singular",
            PointKind::Irregular => "irregular singular",
        };
        let _ = writeln!(out, "  kind: {kind}");
        if p.kind == PointKind::Irregular {
            continue;
        }
        let ex: Vec<String> = p.exponent_list().iter().map(format_rational).collect();
        let _ = write!(out, "  exponents: {}", ex.join(", "));
        if p.unresolved > 0 {
            let _ = write!(out, " (+{} unresolved)", p.unresolved);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "  exponent sum: {}", format_rational(&p.exponent_trace));
        let _ = writeln!(out, "  apparent: {}", if p.is_apparent { "yes" } else { "no" });
        let _ = writeln!(out, "  log depth: {}", p.log_depth);
        if let Some(m) = &p.monodromy {
            let _ = writeln!(out, "  monodromy: {m}");
            let _ = writeln!(out, "  relation: {}", minimal_polynomial_relation(m).to_string_in("M"));
        }
    }
    let fc = &a.fuchsian;
    let _ = writeln!(
        out,
        "fuchsian: {}; points {}; exponent sum {} vs {}{}",
        if fc.is_fuchsian { "yes" } else { "no" },
        fc.point_count,
        format_rational(&fc.relation_lhs),
        format_rational(&fc.relation_rhs),
        if fc.holds() { " (holds)" } else { "" }
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn picard_fuchs() -> DiffOp {
        let s_sm1_sq = Poly::from_ints(&[0, 144, -288, 144]);
        DiffOp::new(vec![Poly::from_ints(&[-4, 31]), s_sm1_sq.clone(), &s_sm1_sq * &Poly::x()])
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn picard_fuchs_exponents_and_relation() {
        let a = analyze(&picard_fuchs()).unwrap();
        let locs: Vec<Location> = a.points.iter().map(|p| p.location.clone()).collect();
        assert_eq!(locs, vec![Location::Finite(int(0)), Location::Finite(int(1)), Location::Infinity]);
        assert_eq!(a.points[0].exponents, vec![(r(-1, 6), 1), (r(1, 6), 1)]);
        assert_eq!(a.points[1].exponents, vec![(r(1, 4), 1), (r(3, 4), 1)]);
        assert_eq!(a.points[2].exponents, vec![(int(0), 2)]);
        assert_eq!(a.points[2].log_depth, 1);
        assert_eq!(a.points[0].log_depth, 0);
        assert_eq!(a.fuchsian.relation_lhs, int(1));
        assert!(a.fuchsian.holds());
        let m = a.points[2].monodromy.as_ref().unwrap();
        assert_eq!(m.nilpotency_order, 2);
        assert_eq!(minimal_polynomial_relation(m), Poly::from_ints(&[1, -2, 1]));
        assert_eq!(a.points[1].monodromy.as_ref().unwrap().determinant_sign, None);
    }

    #[test]
    fn apparent_point_of_cubic_example() {
        // w d³ − d²: solutions 1, w, w³
        let l = DiffOp::from_ints(&[&[], &[], &[-1], &[0, 1]]);
        let zero = Location::Finite(int(0));
        assert_eq!(indicial_exponents(&l, &zero).unwrap(), vec![(int(0), 1), (int(1), 1), (int(3), 1)]);
        assert!(is_apparent(&l, &zero).unwrap());
        assert!(formal_monodromy(&l, &zero).unwrap().is_identity());
        let LocalBasis::Rational(b) = local_basis(&l, &zero, None).unwrap() else { panic!() };
        assert_eq!(b.len(), 3);
        for s in &b {
            assert_eq!(s.log_degree, 0);
            assert_eq!(s.coefficients[0][0], int(1));
            assert!(s.coefficients[0][1..].iter().all(|c| c.is_zero()));
        }
        assert_eq!(singular_points(&l).unwrap(), vec![zero, Location::Infinity]);
        assert!(fuchsian_check(&l).unwrap().holds());
    }

    #[test]
    fn second_derivative_has_only_infinity() {
        let l = DiffOp::from_ints(&[&[], &[], &[1]]);
        let a = analyze(&l).unwrap();
        assert_eq!(a.points.len(), 1);
        assert_eq!(a.points[0].exponents, vec![(int(-1), 1), (int(0), 1)]);
        assert!(a.fuchsian.holds());
    }

    #[test]
    fn ordinary_point_exponents() {
        let l = picard_fuchs();
        let rep = analyze_point(&l, &Location::Finite(int(2))).unwrap();
        assert_eq!(rep.kind, PointKind::Ordinary);
        assert_eq!(rep.exponents, vec![(int(0), 1), (int(1), 1)]);
    }

    #[test]
    fn irregular_point_is_reported() {
        // d − 1 at infinity
        let l = DiffOp::from_ints(&[&[-1], &[1]]);
        let a = analyze(&l).unwrap();
        assert_eq!(a.points[0].kind, PointKind::Irregular);
        assert!(!a.fuchsian.is_fuchsian);
    }

    #[test]
    fn algebraic_points_split_by_behaviour() {
        // (w² + 1)(w² − 2) y' = c y with a log-free first-order operator whose
        // exponent differs on the two quadratic factors.
        let p1 = Poly::from_ints(&[1, 0, 1]);
        let p2 = Poly::from_ints(&[-2, 0, 1]);
        // y = (w² + 1)^(1/2): y'/y = w/(w²+1)  ⇒  (w²+1)(w²−2) y' − w(w²−2) y
        let l = DiffOp::new(vec![(&Poly::from_ints(&[0, -1]) * &p2), &p1 * &p2]);
        let a = analyze(&l).unwrap();
        let algebraic: Vec<_> = a
            .points
            .iter()
            .filter(|p| matches!(p.location, Location::Algebraic(_)))
            .collect();
        assert_eq!(algebraic.len(), 2);
        let at = |poly: &Poly| {
            algebraic
                .iter()
                .find(|p| matches!(&p.location, Location::Algebraic(q) if q.min_poly == poly.normalized_factor()))
                .unwrap()
        };
        assert_eq!(at(&p1).exponents, vec![(r(1, 2), 1)]);
        assert_eq!(at(&p2).exponents, vec![(int(0), 1)]);
        assert!(a.fuchsian.holds());
    }

    #[test]
    fn log_basis_verifies() {
        let l = picard_fuchs();
        let LocalBasis::Rational(b) = local_basis(&l, &Location::Infinity, Some(20)).unwrap() else {
            panic!()
        };
        assert_eq!(b.len(), 2);
        assert_eq!(b.iter().map(|s| s.log_degree).max(), Some(1));
    }

    #[test]
    fn relation_closed_form() {
        assert_eq!(fuchs_relation_rhs(35, 7), int(714));
    }
}

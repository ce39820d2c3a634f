use holonomy::desing::{companion_system, desingularize, missing_exponents, reduces_to};
use holonomy::diffop::DiffOp;
use holonomy::exactalg::{int, AlgebraicPoint, Location, Poly, Series};
use holonomy::frobenius::{analyze, analyze_point, PointKind};

/// Operator with solution space `{1, p}`: `p'·d² − p''·d`.
fn with_solutions_one_and(p: &Poly) -> DiffOp {
    let d1 = p.derivative();
    DiffOp::new(vec![Poly::zero(), -&d1.derivative(), d1])
}

#[test]
fn two_rational_apparent_points() {
    // p' = w(3w + 2): both roots are apparent with exponents {0, 2}
    let p = Poly::from_ints(&[0, 0, 1, 1]);
    let l = with_solutions_one_and(&p);
    let a = analyze(&l).unwrap();
    let apparent: Vec<Location> = a
        .points
        .iter()
        .filter(|p| p.is_apparent)
        .map(|p| p.location.clone())
        .collect();
    assert_eq!(apparent, vec![Location::Finite(holonomy::exactalg::rat(-2, 3)), Location::Finite(int(0))]);
    for loc in &apparent {
        assert_eq!(missing_exponents(&l, loc).unwrap(), vec![1]);
    }
    let r = desingularize(&l, &apparent).unwrap();
    assert_eq!(r.operator.order(), Some(3));
    assert!(r.operator.right_divide(&l).remainder.is_zero());
    for loc in &apparent {
        assert_eq!(analyze_point(&r.operator, loc).unwrap().kind, PointKind::Ordinary);
    }
    // the old solutions survive
    let s = Series::new(p.coeffs().to_vec()).truncate(12);
    assert!(r.operator.apply(&s).is_zero());
}

#[test]
fn algebraic_apparent_points() {
    // p' = 3(w² + 1)
    let p = Poly::from_ints(&[0, 3, 0, 1]);
    let l = with_solutions_one_and(&p);
    let loc = Location::Algebraic(AlgebraicPoint::new(&Poly::from_ints(&[1, 0, 1])));
    let rep = analyze_point(&l, &loc).unwrap();
    assert!(rep.is_apparent);
    assert_eq!(rep.exponents, vec![(int(0), 1), (int(2), 1)]);
    let r = desingularize(&l, &[loc.clone()]).unwrap();
    assert_eq!(r.gaps_filled, 1);
    assert!(r.operator.leading().is_constant());
    assert!(r.operator.right_divide(&l).remainder.is_zero());
}

#[test]
fn companion_system_of_desingularized_operator() {
    let p = Poly::from_ints(&[0, 0, 1, 1]);
    let l = with_solutions_one_and(&p);
    // only w = 0 is removed, so w = −2/3 stays as a finite singular point
    let r = desingularize(&l, &[Location::Finite(int(0))]).unwrap();
    assert_eq!(r.leading_factorization.len(), 1);
    let sys = companion_system(&r.operator).unwrap();
    assert_eq!(sys.dimension(), 3);
    assert!(reduces_to(&sys, &r.operator));
}

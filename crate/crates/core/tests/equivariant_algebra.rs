use semifree::algebra::{AlgebraError, Carrier, EquivariantClass, ReducedClass, ReducedSpaceType};
use semifree::linalg;
use semifree::rational::{q, qf};

fn surf(k: i64, c: i64, d: i64) -> EquivariantClass {
    EquivariantClass::monomial(Carrier::Surface, k, q(c), q(d))
}

#[test]
fn u_squared_vanishes() {
    let u = EquivariantClass::lambda_u(0, q(1));
    assert!(u.try_mul(&u).unwrap().is_zero());
    let x = surf(1, 2, 0).try_add(&surf(0, 0, 3)).unwrap();
    assert_eq!(x.to_string(), "2λ + 3u");
    assert_eq!(x.try_mul(&x).unwrap().to_string(), "4λ^2 + 12λu");
    assert_eq!(x.degree(), Some(2));
}

#[test]
fn points_drop_u() {
    let p = EquivariantClass::monomial(Carrier::Point, 1, q(2), q(5));
    assert_eq!(p.to_string(), "2λ");
}

#[test]
fn carriers_do_not_mix() {
    let a = EquivariantClass::<semifree::rational::Q>::one(Carrier::Point);
    let b = EquivariantClass::one(Carrier::Surface);
    assert!(matches!(a.try_mul(&b), Err(AlgebraError::CarrierMismatch(..))));
}

#[test]
fn invert_surface_euler() {
    // (λ² + 3λu)⁻¹ = λ⁻² − 3λ⁻³u
    let e = surf(2, 1, 0).try_add(&surf(1, 0, 3)).unwrap();
    let inv = e.invert_euler().unwrap();
    assert_eq!(inv.coeff(-2), (q(1), q(0)));
    assert_eq!(inv.coeff(-3), (q(0), q(-3)));
    assert_eq!(e.try_mul(&inv).unwrap(), EquivariantClass::one(Carrier::Surface));
    let half = surf(1, 2, 0).invert_euler().unwrap();
    assert_eq!(half.coeff(-1).0, qf(1, 2));
}

#[test]
fn pure_u_is_not_invertible() {
    assert!(surf(0, 0, 1).invert_euler().is_err());
    assert!(surf(2, 1, 0).try_add(&surf(1, 1, 0)).unwrap().invert_euler().is_err());
}

#[test]
fn integrate_component_picks_top_part() {
    let x = surf(1, 7, 0).try_add(&surf(0, 0, -2)).unwrap();
    assert_eq!(x.integrate_component().coeff(0), q(-2));
    let p = EquivariantClass::lambda(Carrier::Point, 3, q(4));
    assert_eq!(p.integrate_component().coeff(3), q(4));
}

#[test]
fn gram_matrices() {
    use ReducedSpaceType::*;
    assert_eq!(linalg::det(&ProjectivePlane.gram()), q(1));
    assert_eq!(linalg::det(&TrivialBundle { genus: 2 }.gram()), q(-1));
    assert_eq!(linalg::det(&NontrivialBundle { genus: 0 }.gram()), q(-1));
    let y = ReducedClass::xy(NontrivialBundle { genus: 0 }, 0, 1);
    assert_eq!(y.square(), q(-1));
    let x = ReducedClass::xy(TrivialBundle { genus: 0 }, 1, 0);
    assert_eq!(x.square(), q(0));
}

#[test]
fn first_chern_classes() {
    use ReducedSpaceType::*;
    assert_eq!(ProjectivePlane.c1_reduced().square(), q(9));
    // c₁² = 8 on S²×S² and on the one-point blow-up of ℂP²
    assert_eq!(TrivialBundle { genus: 0 }.c1_reduced().square(), q(8));
    assert_eq!(NontrivialBundle { genus: 0 }.c1_reduced().square(), q(8));
    assert_eq!(TrivialBundle { genus: 1 }.c1_reduced().square(), q(0));
}

#[test]
fn reduced_classes_need_matching_spaces() {
    use ReducedSpaceType::*;
    let a = ReducedClass::u(1);
    let b = ReducedClass::xy(TrivialBundle { genus: 0 }, 1, 0);
    assert_eq!(a.pair(&b), Err(AlgebraError::SpaceMismatch));
    assert!(ReducedClass::new(ProjectivePlane, vec![q(1), q(2)]).is_err());
}

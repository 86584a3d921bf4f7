mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use semifree::algebra::{Carrier, EquivariantClass, ReducedClass, ReducedSpaceType};
use semifree::classifier::{start_class, wall_cross, WallEvent};
use semifree::fpdata::{betti_profile, classify_type, validate, FixedPointData};
use semifree::localization::{abbv_integrate, b_plus_minus, equivariant_euler, solve_restriction_table, unit_restrictions};
use semifree::rational::{q, qf, Q};

fn class_on(carrier: Carrier) -> impl Strategy<Value = EquivariantClass> {
    prop::collection::vec((-3i64..=3, -5i64..=5, -5i64..=5), 0..4).prop_map(move |terms| {
        terms.into_iter().fold(EquivariantClass::zero(carrier), |acc, (k, c, d)| {
            let d = if carrier == Carrier::Point { 0 } else { d };
            acc.try_add(&EquivariantClass::monomial(carrier, k, q(c), q(d))).unwrap()
        })
    })
}

fn carrier() -> impl Strategy<Value = Carrier> {
    prop_oneof![Just(Carrier::Point), Just(Carrier::Surface)]
}

fn ring_triple() -> impl Strategy<Value = (EquivariantClass, EquivariantClass, EquivariantClass)> {
    carrier().prop_flat_map(|c| (class_on(c), class_on(c), class_on(c)))
}

fn space() -> impl Strategy<Value = ReducedSpaceType> {
    prop_oneof![
        (0u32..4).prop_map(|genus| ReducedSpaceType::TrivialBundle { genus }),
        (0u32..4).prop_map(|genus| ReducedSpaceType::NontrivialBundle { genus }),
    ]
}

proptest! {
    #[test]
    fn ring_laws((a, b, c) in ring_triple()) {
        prop_assert_eq!(a.try_mul(&b).unwrap(), b.try_mul(&a).unwrap());
        prop_assert_eq!(
            a.try_mul(&b).unwrap().try_mul(&c).unwrap(),
            a.try_mul(&b.try_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.try_mul(&b.try_add(&c).unwrap()).unwrap(),
            a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn euler_inverse(s in prop_oneof![Just(-1i64), Just(1)], num in -40i64..=40, den in 1i64..=6, point in any::<bool>()) {
        let e = if point {
            EquivariantClass::lambda(Carrier::Point, 3, q(s))
        } else {
            EquivariantClass::monomial(Carrier::Surface, 2, q(s), Q::zero())
                .try_add(&EquivariantClass::lambda_u(1, qf(num, den)))
                .unwrap()
        };
        let carrier = e.carrier();
        prop_assert_eq!(e.try_mul(&e.invert_euler().unwrap()).unwrap(), EquivariantClass::one(carrier));
    }

    #[test]
    fn pairing_is_symmetric_and_bilinear(sp in space(), v in prop::collection::vec(-9i64..=9, 6), k in -5i64..=5) {
        let c = |i: usize| ReducedClass::xy(sp, v[2 * i], v[2 * i + 1]);
        let (a, b, d) = (c(0), c(1), c(2));
        prop_assert_eq!(a.pair(&b).unwrap(), b.pair(&a).unwrap());
        let ka = ReducedClass::xy(sp, k * v[0], k * v[1]);
        prop_assert_eq!(ka.add(&b).unwrap().pair(&d).unwrap(), q(k) * a.pair(&d).unwrap() + b.pair(&d).unwrap());
    }

    #[test]
    fn fiber_minus_base_squares(genus in 0u32..4, k in -20i64..=20) {
        let t = ReducedClass::xy(ReducedSpaceType::TrivialBundle { genus }, k, -1);
        let n = ReducedClass::xy(ReducedSpaceType::NontrivialBundle { genus }, k, -1);
        prop_assert_eq!(t.square(), q(-2 * k));
        prop_assert_eq!(n.square(), q(-2 * k - 1));
    }

    #[test]
    fn start_class_squares_to_minus_b_min(genus in 0u32..4, b in -12i64..=12) {
        let d = FixedPointData::new(
            vec![
                semifree::fpdata::FixedComponent::surface_min(genus, b, q(0)),
                semifree::fpdata::FixedComponent::surface_max(genus, -b, q(1)),
            ],
            false,
        );
        let e = start_class(&d).unwrap();
        prop_assert_eq!(e.square(), q(-b));
        // the fiber pairing of the start class
        let fiber = ReducedClass::xy(e.space, 1, 0);
        prop_assert_eq!(e.pair(&fiber).unwrap(), q(-1));
    }

    #[test]
    fn blow_up_then_down(p in -30i64..=30) {
        let e = ReducedClass::u(p);
        let up = wall_cross(&e, &WallEvent::BlowUpPoint).unwrap();
        prop_assert_eq!(up.square(), e.square() - Q::one());
        // read downwards the level set carries the opposite orientation
        let flipped = ReducedClass::new(up.space, up.coeffs.iter().map(|c| -c).collect()).unwrap();
        let down = wall_cross(&flipped, &WallEvent::BlowDownExceptional).unwrap();
        prop_assert_eq!(down, ReducedClass::u(-p));
    }

    #[test]
    fn betti_profiles_are_palindromic(d in common::family()) {
        prop_assert!(validate(&d).is_valid());
        let b = betti_profile(&d);
        for i in 0..7 {
            prop_assert_eq!(b[i], b[6 - i]);
        }
        prop_assert!(b[2] <= 2);
        prop_assert_eq!(classify_type(&d), d.label);
    }

    #[test]
    fn splittings_recompute(d in common::family()) {
        for (i, c) in d.components().iter().enumerate() {
            if c.is_surface() && c.index == 2 {
                prop_assert_eq!(Some(b_plus_minus(&d, i).unwrap()), c.b_pm());
            }
        }
    }

    #[test]
    fn fpdata_json_round_trip(d in common::family()) {
        prop_assert_eq!(FixedPointData::from_json(&d.to_json()).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn localization_vanishes_below_top_degree(d in common::family(), picks in prop::collection::vec(0usize..64, 1..=3)) {
        let t = solve_restriction_table(&d).unwrap();
        prop_assert!(t.check().unwrap().passed());
        let mut pool: Vec<Vec<EquivariantClass>> = t.classes.iter().map(|c| c.restrictions.clone()).collect();
        pool.push(t.c1.clone());
        let mut product = unit_restrictions(&d);
        for i in picks {
            let f = &pool[i % pool.len()];
            product = product.iter().zip(f).map(|(a, b)| a.try_mul(b).unwrap()).collect();
        }
        let deg = product.iter().find_map(|r| r.degree());
        let value = abbv_integrate(&product, &d).unwrap();
        let keep = deg.filter(|&g| g >= 6).map(|g| (g - 6) / 2);
        for (k, c) in value.iter() {
            if Some(k) == keep {
                prop_assert!(c.is_integer(), "{} at λ^{}", c, k);
            } else {
                prop_assert!(c.is_zero(), "degree {:?}: {} at λ^{}", deg, c, k);
            }
        }
        // the library integral agrees with the hand-expanded one
        if let Some(g) = deg {
            if g >= 6 {
                prop_assert_eq!(value.coeff((g - 6) / 2), common::oracle_integral(&product, &d, g / 2));
            }
        }
    }

    #[test]
    fn euler_classes_invert(d in common::family()) {
        for c in d.components() {
            let e = equivariant_euler(c).unwrap();
            prop_assert_eq!(e.try_mul(&e.invert_euler().unwrap()).unwrap(), EquivariantClass::one(e.carrier()));
        }
    }
}

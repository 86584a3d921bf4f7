mod common;

use common::{oracle_integral, representatives};
use semifree::algebra::{Carrier, EquivariantClass};
use semifree::fpdata::table::*;
use semifree::fpdata::{ComponentKind, FixedComponent, FixedPointData, Order};
use semifree::localization::*;
use semifree::rational::{q, qf, Q};

fn table(d: &FixedPointData) -> RestrictionTable {
    solve_restriction_table(d).unwrap_or_else(|e| panic!("{d}: {e}"))
}

fn unknown(t: &RestrictionTable, name: &str) -> Q {
    t.unknown(name).unwrap_or_else(|| panic!("no unknown {name} in {:?}", t.unknowns)).clone()
}

#[test]
fn euler_classes() {
    let cases = [
        (FixedComponent::point(0, q(0)), "λ^3"),
        (FixedComponent::point(2, q(1)), "-λ^3"),
        (FixedComponent::point(4, q(1)), "λ^3"),
        (FixedComponent::point(6, q(2)), "-λ^3"),
        (FixedComponent::surface_min(0, 3, q(0)), "λ^2 + 3λu"),
        (FixedComponent::surface_mid(1, q(1), Some((2, -1))), "-λ^2 - 3λu"),
        (FixedComponent::surface_max(2, -2, q(2)), "λ^2 + 2λu"),
    ];
    for (c, want) in cases {
        assert_eq!(equivariant_euler(&c).unwrap().to_string(), want, "{c}");
    }
}

#[test]
fn missing_normal_data_is_reported() {
    let c = FixedComponent::surface_mid(0, q(1), None);
    assert!(matches!(equivariant_euler(&c), Err(LocalizationError::MissingNormalData(_))));
}

#[test]
fn chern_integrals_match_the_oracle() {
    for (name, d) in representatives() {
        let d = complete_normal_data(&d).unwrap();
        let c1 = c1_restrictions(&d).unwrap();
        let mut power: Vec<EquivariantClass> = unit_restrictions(&d);
        let values = chern_integrals(&d).unwrap();
        for (k, v) in values.iter().enumerate() {
            let k = k as i64;
            let want = oracle_integral(&power, &d, k);
            assert_eq!(v.coeff(k - 3), want, "type {name}, c1^{k}: {d}");
            assert!(v.iter().all(|(e, _)| e == k - 3), "type {name}: stray powers in {v}");
            power = power.iter().zip(&c1).map(|(a, b)| a.try_mul(b).unwrap()).collect();
        }
        assert!(chern_relations_hold(&d).unwrap(), "type {name}");
    }
}

#[test]
fn c1_cubed_of_projective_space() {
    // ℂP³ carries c₁³ = 64
    let d = type4();
    let v = &chern_integrals(&d).unwrap()[3];
    assert_eq!(v.coeff(0), q(64));
}

/// Sphere min with `b`, `n2` index-2 points, `n4` index-4 points and a point max.
fn counts_data(b: i64, n2: usize, n4: usize) -> FixedPointData {
    let mut v = vec![FixedComponent::surface_min(0, b, q(0)), FixedComponent::point(6, q(3))];
    v.extend(std::iter::repeat_n(FixedComponent::point(2, q(1)), n2));
    v.extend(std::iter::repeat_n(FixedComponent::point(4, q(2)), n4));
    FixedPointData::new(v, false)
}

#[test]
fn point_counts_by_brute_force() {
    let mut hits = Vec::new();
    for b in -8..=8 {
        for n2 in 0..=6 {
            for n4 in 0..=6 {
                let d = counts_data(b, n2, n4);
                // hand-written c₁ restrictions: (3 − index)λ at points, 2λ + (2 + b)u on the sphere
                let c1: Vec<EquivariantClass> = d
                    .components()
                    .iter()
                    .map(|c| match c.kind {
                        ComponentKind::Point => EquivariantClass::lambda(Carrier::Point, 1, q(3 - c.index as i64)),
                        _ => EquivariantClass::monomial(Carrier::Surface, 1, q(2), q(0))
                            .try_add(&EquivariantClass::lambda_u(0, q(2 + b)))
                            .unwrap(),
                    })
                    .collect();
                let one = unit_restrictions(&d);
                let sq: Vec<_> = c1.iter().map(|a| a.try_mul(a).unwrap()).collect();
                let zero = [(&one, 0), (&c1, 1), (&sq, 2)]
                    .iter()
                    .all(|(r, m)| oracle_integral(r, &d, *m) == q(0));
                if zero {
                    hits.push((b, n2, n4));
                }
            }
        }
    }
    assert_eq!(hits, vec![(0, 2, 3)]);
    let solved = solve_point_counts().unwrap();
    assert_eq!(solved, vec![PointCounts { b_min: 0, n2: 2, n4: 3 }]);
}

#[test]
fn splitting_numbers_closed_forms() {
    assert_eq!(b_plus_minus(&type1(), 1).unwrap(), (2, 2));
    assert_eq!(b_plus_minus(&type2(), 1).unwrap(), (0, 1));
    assert_eq!(b_plus_minus(&type2(), 2).unwrap(), (1, 0));
    for n in [-5, -3, -1, 1, 3, 5] {
        assert_eq!(b_plus_minus(&type3(n, Order::Forward), 1).unwrap(), (1, 1 - n));
    }
    for g in 0..=3 {
        for g1 in 0..=3 {
            for n in -6..=6 {
                let c = 1 + g1 as i64 - 2 * g as i64;
                assert_eq!(b_plus_minus(&type6a(g, g1, n), 1).unwrap(), (n + 3 * c, c - n));
            }
        }
    }
    for m in [-6, -4, -2, 0, 2, 4, 6] {
        assert_eq!(b_plus_minus(&type6b(0, m), 1).unwrap(), (1 - m, 1));
        assert_eq!(b_plus_minus(&type6b(m, 0), 1).unwrap(), (1, 1 - m));
    }
}

#[test]
fn splitting_needs_an_index_two_surface() {
    assert!(matches!(b_plus_minus(&type4(), 0), Err(LocalizationError::NotIndexTwoSurface(0))));
}

#[test]
fn completing_unknown_splittings() {
    let full = type6a(1, 2, -3);
    let mut comps = full.components().to_vec();
    comps[1] = FixedComponent::surface_mid(2, q(1), None);
    let bare = FixedPointData::new(comps, false);
    assert_eq!(complete_normal_data(&bare).unwrap().components(), full.components());
}

#[test]
fn type1_table() {
    let t = table(&type1());
    assert_eq!(t.restriction("α2", 2).unwrap().to_string(), "-2λ");
    assert_eq!(t.restriction("α′2", 2).unwrap().to_string(), "λ^2");
}

#[test]
fn type2_table() {
    let t = table(&type2());
    assert_eq!(unknown(&t, "α2|F3:u"), q(1));
    assert_eq!(unknown(&t, "α2|F4:λ"), q(-1));
    assert_eq!(unknown(&t, "α3|F4:λ"), q(-1));
    assert_eq!(unknown(&t, "α′2|F4:λ^2"), q(1));
    assert_eq!(unknown(&t, "α′3|F4:λ^2"), q(1));
}

#[test]
fn type3_table() {
    for n in [-5, -3, -1, 1, 3, 5] {
        let t = table(&type3(n, Order::Forward));
        let bm = 1 - n;
        assert_eq!(unknown(&t, "α′1|F4:λ"), q(-1), "a, n = {n}");
        assert_eq!(unknown(&t, "α′1|F3:λ"), q(-1), "b, n = {n}");
        assert_eq!(unknown(&t, "α′1|F2:u"), q(1), "c, n = {n}");
        assert_eq!(unknown(&t, "α2|F4:λ"), qf(-(2 + bm), 2), "d, n = {n}");
        assert_eq!(unknown(&t, "α2|F3:λ"), qf(-bm, 2), "e, n = {n}");
    }
}

#[test]
fn type3_ordering_beyond_n_one() {
    // with the sphere above the index-4 point only n = 1 is consistent
    assert!(solve_restriction_table(&type3(1, Order::Backward)).is_ok());
    assert!(solve_restriction_table(&type3(1, Order::Simultaneous)).is_ok());
    assert!(solve_restriction_table(&type3(3, Order::Simultaneous)).is_err());
    assert!(solve_restriction_table(&type3(-1, Order::Simultaneous)).is_err());
}

#[test]
fn type4_table() {
    let t = table(&type4());
    assert_eq!(t.restriction("α′1", 1).unwrap().to_string(), "-λ + u");
}

#[test]
fn type5_table() {
    for o in Order::ALL {
        let d = type5(o);
        let pos = |i: u8| 1 + d.components().iter().position(|c| c.kind.is_point() && c.index == i).unwrap();
        let (p2, p4) = (pos(2), pos(4));
        let want = [
            (format!("α′1|F{p4}:λ"), -1),
            ("α′1|F4:λ".to_string(), -1),
            ("α′1|F4:u".to_string(), 1),
            (format!("α{p2}|F{p4}:λ"), 0),
            (format!("α{p2}|F4:λ"), -1),
            (format!("α{p2}|F4:u"), 0),
            (format!("α{p4}|F4:λu"), -1),
        ];
        let t = table(&d);
        for (name, v) in want {
            // unless the index-4 point is strictly higher, α of the index-2 point vanishes there by support
            let structural = name == format!("α{p2}|F{p4}:λ") && o != Order::Forward;
            let got = match t.unknown(&name) {
                Some(v) => v.clone(),
                None if structural => q(0),
                None => panic!("no unknown {name}: {:?}", t.unknowns),
            };
            assert_eq!(got, q(v), "{name} in {o:?}: {:?}", t.unknowns);
        }
    }
}

#[test]
fn type6a_table() {
    for (g, g1, n) in [(0, 0, 0), (0, 0, 1), (1, 0, 3), (0, 2, -1), (2, 3, -4), (3, 1, 5)] {
        let t = table(&type6a(g, g1, n));
        let c = 1 + g1 as i64 - 2 * g as i64;
        assert_eq!(unknown(&t, "α2|F3:λ"), q(-2));
        assert_eq!(unknown(&t, "α2|F3:u"), q(-n - c));
        assert_eq!(unknown(&t, "α′1|F3:λ"), q(0));
        assert_eq!(unknown(&t, "α′1|F3:u"), q(1));
        assert_eq!(unknown(&t, "α′1|F2:u"), q(2));
        assert_eq!(t.odd_parity_flag, t.selection_rule && n % 2 != 0);
    }
}

#[test]
fn type6b_tables() {
    for m in [-6, -4, -2, 0, 2, 4, 6] {
        let t = table(&type6b(0, m));
        assert_eq!(unknown(&t, "α2|F3:λ"), q(-1));
        assert_eq!(unknown(&t, "α2|F3:u"), q(1));
        assert_eq!(unknown(&t, "α′1|F2:u"), q(1 - m / 2));
        assert_eq!(unknown(&t, "α′1|F3:λ"), q(-1));
        assert_eq!(unknown(&t, "α′1|F3:u"), q(m / 2));
    }
    for n in [-6, -4, -2, 2, 4, 6] {
        let t = table(&type6b(n, 0));
        assert_eq!(unknown(&t, "α2|F3:λ"), q((n - 2) / 2));
        assert_eq!(unknown(&t, "α2|F3:u"), q(1));
        assert_eq!(unknown(&t, "α′1|F3:λ"), q(-1));
        assert_eq!(unknown(&t, "α′1|F3:u"), q(0));
        assert_eq!(unknown(&t, "α′1|F2:u"), q(1));
    }
}

#[test]
fn tables_satisfy_redundant_equations() {
    for (name, d) in representatives() {
        let Ok(t) = solve_restriction_table(&d) else {
            continue;
        };
        let chk = t.check().unwrap();
        assert!(chk.passed(), "type {name}: {:?}", chk.failures);
        for class in &t.classes {
            let v = abbv_integrate(&class.restrictions, &t.data).unwrap();
            if class.degree < 6 {
                assert!(v.is_zero(), "type {name}: ∫{} = {v}", class.name);
            }
            let m = class.degree / 2;
            assert_eq!(v.coeff(m - 3), oracle_integral(&class.restrictions, &t.data, m));
        }
    }
}

#[test]
fn table_json_round_trip() {
    for d in [type1(), type5(Order::Backward), type6b(0, 2)] {
        let t = table(&d);
        let s = t.to_json();
        let back = RestrictionTable::from_json(&s).unwrap();
        assert_eq!(back.to_json(), s);
        assert!(s.contains(RTABLE_SCHEMA));
    }
    let bad = table(&type1()).to_json().replace(RTABLE_SCHEMA, "rtable.v2");
    assert!(RestrictionTable::from_json(&bad).is_err());
}

#[test]
fn c1_in_the_basis() {
    let get = |d: FixedPointData| c1_decomposition(&table(&d)).unwrap();
    assert_eq!(get(type2()), vec![("λα1".into(), q(3)), ("α2".into(), q(3)), ("α3".into(), q(3))]);
    assert_eq!(get(type4()), vec![("λα1".into(), q(2)), ("α′1".into(), q(4))]);
    assert_eq!(get(type5(Order::Forward)), vec![("λα1".into(), q(2)), ("α′1".into(), q(3)), ("α2".into(), q(1))]);
}

#[test]
fn second_stiefel_whitney_class() {
    assert!(!w2_vanishes(&type1()).unwrap());
    assert!(!w2_vanishes(&type2()).unwrap());
    for n in [-3, -1, 1, 3] {
        assert!(!w2_vanishes(&type3(n, Order::Forward)).unwrap());
    }
    assert!(w2_vanishes(&type4()).unwrap());
    assert!(!w2_vanishes(&type5(Order::Forward)).unwrap());
    for n in [-4, -2, 0, 2, 4] {
        assert!(w2_vanishes(&type6a(0, 1, n)).unwrap());
    }
    for n in [-3, -1, 1, 3] {
        assert!(!w2_vanishes(&type6a(0, 1, n)).unwrap());
    }
    assert!(w2_vanishes(&type6b(0, 2)).unwrap());
    assert!(w2_vanishes(&type6b(-4, 0)).unwrap());
}

#[test]
fn duistermaat_heckman_paths() {
    let p = dh_path(&type4(), &q(3), &[q(1)]).unwrap();
    assert!(p.positive());
    assert_eq!(p.omega_at(&q(0)).unwrap().coeffs, vec![q(3), q(0)]);
    assert!(dh_path(&type4(), &q(1), &[q(1), q(1)]).is_err());
    for d in [type4(), type6a(0, 0, 0), type6a(1, 2, 1), type6b(0, 2), type6b(2, 0)] {
        assert!(dh_feasible(&d).unwrap(), "{d}");
    }
    assert!(dh_feasible(&type1()).is_err());
}

#[test]
fn twisted_positive_genus_middle_is_not_positive() {
    let d = FixedPointData::new(
        vec![
            FixedComponent::surface_min(0, 2, q(0)),
            FixedComponent::surface_mid(1, q(1), None),
            FixedComponent::surface_max(0, 2, q(2)),
        ],
        true,
    );
    let d = complete_normal_data(&d).unwrap();
    assert!(!dh_feasible(&d).unwrap());
}

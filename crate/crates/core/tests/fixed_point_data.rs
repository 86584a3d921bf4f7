use semifree::fpdata::table::*;
use semifree::fpdata::{
    betti_profile, classify_type, validate, FixedComponent, FixedPointData, FpDataError, Order, Rule, TypeTag,
};
use semifree::rational::q;

#[test]
fn betti_numbers_of_the_table() {
    assert_eq!(betti_profile(&type1()), [1, 0, 1, 0, 1, 0, 1]);
    assert_eq!(betti_profile(&type2()), [1, 0, 2, 0, 2, 0, 1]);
    assert_eq!(betti_profile(&type3(1, Order::Forward)), [1, 0, 2, 0, 2, 0, 1]);
    assert_eq!(betti_profile(&type4()), [1, 0, 1, 0, 1, 0, 1]);
    // genus-2 extrema and a genus-1 middle surface
    assert_eq!(betti_profile(&type6a(2, 1, 0)), [1, 4, 2, 2, 2, 4, 1]);
}

#[test]
fn table_members_validate_and_classify() {
    let cases = [
        (type1(), TypeTag::T1),
        (type2(), TypeTag::T2),
        (type3(-3, Order::Backward), TypeTag::T3),
        (type4(), TypeTag::T4),
        (type5(Order::Forward), TypeTag::T5),
        (type6a(3, 0, 5), TypeTag::T6a),
        (type6b(0, -6), TypeTag::T6b),
    ];
    for (d, tag) in cases {
        assert!(validate(&d).is_valid(), "{d}: {}", validate(&d));
        assert_eq!(classify_type(&d), Some(tag));
        assert_eq!(classify_type(&d.reversed()), Some(tag));
    }
}

#[test]
fn twist_needs_surfaces() {
    let mut d = type1();
    d.twist = true;
    assert!(validate(&d).has(Rule::TwistNeedsSurfaces));
}

#[test]
fn untwisted_type4_is_not_in_the_table() {
    let mut d = type4();
    d.twist = false;
    assert_eq!(classify_type(&d), None);
}

#[test]
fn isolated_extrema_pair_their_points() {
    let d = FixedPointData::new(
        vec![
            FixedComponent::point(0, q(0)),
            FixedComponent::point(2, q(1)),
            FixedComponent::point(2, q(1)),
            FixedComponent::point(4, q(2)),
            FixedComponent::point(6, q(3)),
        ],
        false,
    );
    assert!(validate(&d).has(Rule::PointPairing));
}

#[test]
fn surface_minimum_under_point_maximum_is_a_sphere() {
    let d = FixedPointData::new(
        vec![
            FixedComponent::surface_min(1, 1, q(0)),
            FixedComponent::surface_mid(0, q(1), None),
            FixedComponent::point(4, q(2)),
            FixedComponent::point(6, q(3)),
        ],
        false,
    );
    assert!(validate(&d).has(Rule::MinimumSphere));
}

#[test]
fn parity_must_propagate() {
    // sphere min with b = 0 under sphere max with b = 1
    let d = FixedPointData::new(
        vec![FixedComponent::surface_min(0, 0, q(0)), FixedComponent::surface_max(0, 1, q(1))],
        false,
    );
    assert!(validate(&d).has(Rule::ParityCoherence));
}

#[test]
fn type2_spheres_on_one_level() {
    let d = FixedPointData::new(
        vec![
            FixedComponent::point(0, q(0)),
            FixedComponent::surface_mid(0, q(1), Some((0, 1))),
            FixedComponent::surface_mid(0, q(1), Some((1, 0))),
            FixedComponent::point(6, q(2)),
        ],
        false,
    );
    assert!(validate(&d).has(Rule::SameLevelSurfaces));
    assert_eq!(classify_type(&d), None);
}

#[test]
fn every_event_order_is_labelled() {
    for o in Order::ALL {
        assert_eq!(classify_type(&type5(o)), Some(TypeTag::T5));
        assert_eq!(classify_type(&type3(5, o)), Some(TypeTag::T3));
    }
}

#[test]
fn json_round_trip_and_errors() {
    for d in [type2(), type3(1, Order::Simultaneous), type6b(-2, 0)] {
        let s = d.to_json();
        assert_eq!(FixedPointData::from_json(&s).unwrap(), d);
        assert_eq!(FixedPointData::from_json(&s).unwrap().to_json(), s);
    }
    let bad = type1().to_json().replace("fpdata.v1", "fpdata.v0");
    assert!(matches!(FixedPointData::from_json(&bad), Err(FpDataError::Schema(_))));
    assert!(matches!(FixedPointData::from_json("{"), Err(FpDataError::Json(_))));
    let bad_level = type1().to_json().replacen("\"level\": \"", "\"level\": \"x", 1);
    assert!(FixedPointData::from_json(&bad_level).is_err());
}

#[test]
fn reversal_is_an_involution() {
    for d in [type3(3, Order::Forward), type5(Order::Backward), type6a(1, 2, -1), type6b(0, 2)] {
        assert_eq!(d.reversed().reversed().components(), d.components());
        assert_eq!(betti_profile(&d.reversed()), betti_profile(&d));
    }
}

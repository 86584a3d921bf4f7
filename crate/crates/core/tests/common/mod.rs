//! Hand-expanded localization, independent of the library's inversion code.
#![allow(dead_code)]

use num_traits::Zero;
use proptest::prelude::*;
use semifree::algebra::{Carrier, EquivariantClass};
use semifree::fpdata::{table, ComponentKind, FixedComponent, FixedPointData, Order};
use semifree::rational::{q, Q};

/// `(s, t)` with `e(ν) = s λ³` at a point or `s λ² + t λ u` on a surface.
pub fn euler_pair(c: &FixedComponent) -> (i64, i64) {
    match (c.kind, c.index) {
        (ComponentKind::Point, i) => (if i % 4 == 0 { 1 } else { -1 }, 0),
        (_, 0) => (1, c.b().unwrap()),
        (_, 2) => {
            let (bp, bm) = c.b_pm().unwrap();
            (-1, bm - bp)
        }
        _ => (1, -c.b().unwrap()),
    }
}

/// Coefficient of `λ^(m−3)` in `∫ α` for `α` homogeneous of degree `2m`.
///
/// At a point `cλᵐ / sλ³ = (c/s) λ^(m−3)`. On a surface
/// `(cλᵐ + dλ^(m−1)u) / (sλ² + tλu)` has `u`-part `(d s − c t) λ^(m−3)` since `s² = 1`.
pub fn oracle_integral(restrictions: &[EquivariantClass], data: &FixedPointData, m: i64) -> Q {
    let mut total = Q::zero();
    for (r, comp) in restrictions.iter().zip(data.components()) {
        let (s, t) = euler_pair(comp);
        let (c, _) = r.coeff(m);
        match r.carrier() {
            Carrier::Point => total += c * q(s),
            Carrier::Surface => {
                let (_, d) = r.coeff(m - 1);
                total += d * q(s) - c * q(t);
            }
        }
    }
    total
}

/// A spread of representatives across every family.
pub fn representatives() -> Vec<(&'static str, FixedPointData)> {
    let mut v = vec![("1", table::type1()), ("2", table::type2()), ("4", table::type4())];
    for n in [-5, -3, -1, 1, 3, 5] {
        v.push(("3", table::type3(n, Order::Forward)));
    }
    v.push(("3", table::type3(1, Order::Backward)));
    v.push(("3", table::type3(1, Order::Simultaneous)));
    for o in Order::ALL {
        v.push(("5", table::type5(o)));
    }
    for (g, g1, n) in [(0, 0, 0), (0, 0, 1), (1, 0, 3), (0, 2, -1), (2, 3, -4), (1, 1, 2)] {
        v.push(("6a", table::type6a(g, g1, n)));
    }
    for (a, b) in [(0, 4), (0, -2), (0, 0), (2, 0), (-4, 0)] {
        v.push(("6b", table::type6b(a, b)));
    }
    v
}

/// A random member of one of the seven families.
pub fn family() -> impl Strategy<Value = FixedPointData> {
    let odd = (-4i64..=3).prop_map(|k| 2 * k + 1);
    let even = (-3i64..=3).prop_map(|k| 2 * k);
    let order = prop::sample::select(Order::ALL.to_vec());
    prop_oneof![
        Just(table::type1()),
        Just(table::type2()),
        Just(table::type4()),
        odd.prop_map(|n| table::type3(n, Order::Forward)),
        order.prop_map(table::type5),
        (0u32..=3, 0u32..=3, -6i64..=6).prop_map(|(g, g1, n)| table::type6a(g, g1, n)),
        (any::<bool>(), even).prop_map(|(lo, n)| if lo { table::type6b(n, 0) } else { table::type6b(0, n) }),
    ]
}

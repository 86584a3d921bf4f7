//! Equivariant integration over fixed-point data and everything built on it:
//! Euler and Chern restrictions, restriction tables of a Kirwan basis, the
//! splitting `b₊, b₋` of index-2 surfaces, `w₂`, and Duistermaat-Heckman paths.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::strictly_feasible;
use crate::algebra::{AlgebraError, Carrier, Coefficient, EquivariantClass, LaurentScalar, ReducedClass, ReducedSpaceType};
use crate::classifier::{unique_chain, ChainSolution, ClassifierError};
use crate::fpdata::{validate, ComponentKind, FixedComponent, FixedPointData, FpDataError, RawFpData};
use crate::linalg;
use crate::poly::{solve_system, Assignment, Poly};
use crate::rational::{format_q, is_integral, parse_q, q, to_i64, Q};

#[derive(Debug, Error)]
pub enum LocalizationError {
    #[error("normal Chern numbers unknown for {0}")]
    MissingNormalData(String),
    #[error("restrictions have degrees {0} and {1}")]
    DegreeMismatch(i64, i64),
    #[error("expected {want} restrictions, got {got}")]
    Arity { want: usize, got: usize },
    #[error("component {0} is not an index-2 surface")]
    NotIndexTwoSurface(usize),
    #[error("component {0} shares its level with another surface")]
    SharedLevel(usize),
    #[error("normal Chern numbers of component {0} are not integral")]
    NonIntegral(usize),
    #[error("invalid fixed point data: {0}")]
    Invalid(String),
    #[error("no admissible solution: the fixed point data is inconsistent")]
    NoSolution,
    #[error("{0} admissible solutions remain")]
    Ambiguous(usize),
    #[error("unknowns left undetermined: {0}")]
    Underdetermined(String),
    #[error("c1 is not in the span of the degree-2 classes")]
    NotInSpan,
    #[error("component {0} is not a surface")]
    NonSurface(usize),
    #[error("expected {want} gaps, got {got}")]
    GapCount { want: usize, got: usize },
    #[error("the reduced spaces do not form a single bundle")]
    NoBundle,
    #[error("malformed restriction table: {0}")]
    Table(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    FpData(#[from] FpDataError),
}

type Result<T> = std::result::Result<T, LocalizationError>;

fn carrier(c: &FixedComponent) -> Carrier {
    match c.kind {
        ComponentKind::Point => Carrier::Point,
        ComponentKind::Surface { .. } => Carrier::Surface,
    }
}

fn lam(c: Carrier, k: i64, v: i64) -> EquivariantClass {
    EquivariantClass::lambda(c, k, q(v))
}

fn mono(c: Carrier, k: i64, a: i64, b: i64) -> EquivariantClass {
    EquivariantClass::monomial(c, k, q(a), q(b))
}

fn missing(c: &FixedComponent) -> LocalizationError {
    LocalizationError::MissingNormalData(c.to_string())
}

/// Equivariant Euler class of the full normal bundle.
pub fn equivariant_euler(c: &FixedComponent) -> Result<EquivariantClass> {
    let s = Carrier::Surface;
    Ok(match (c.kind, c.index) {
        (ComponentKind::Point, i) => {
            let sign = if (i / 2) % 2 == 0 { 1 } else { -1 };
            lam(Carrier::Point, 3, sign)
        }
        (_, 0) => mono(s, 2, 1, 0).try_add(&mono(s, 1, 0, c.b().ok_or_else(|| missing(c))?))?,
        (_, 2) => {
            let (bp, bm) = c.b_pm().ok_or_else(|| missing(c))?;
            // (λ + b₊u)(−λ + b₋u) with u² = 0
            mono(s, 2, -1, 0).try_add(&mono(s, 1, 0, bm - bp))?
        }
        _ => mono(s, 2, 1, 0).try_add(&mono(s, 1, 0, -c.b().ok_or_else(|| missing(c))?))?,
    })
}

/// Euler class of the negative normal bundle; the value of the Kirwan class of `c` at `c`.
pub fn negative_euler(c: &FixedComponent) -> Result<EquivariantClass> {
    let s = Carrier::Surface;
    Ok(match (c.kind, c.index) {
        (ComponentKind::Point, i) => {
            let k = i as i64 / 2;
            lam(Carrier::Point, k, if k % 2 == 0 { 1 } else { -1 })
        }
        (_, 0) => EquivariantClass::one(s),
        (_, 2) => {
            let (_, bm) = c.b_pm().ok_or_else(|| missing(c))?;
            mono(s, 1, -1, 0).try_add(&mono(s, 0, 0, bm))?
        }
        _ => mono(s, 2, 1, 0).try_add(&mono(s, 1, 0, -c.b().ok_or_else(|| missing(c))?))?,
    })
}

/// Restriction of the first Chern class of the tangent bundle.
pub fn c1_restriction(c: &FixedComponent) -> Result<EquivariantClass> {
    let s = Carrier::Surface;
    let g2 = 2 - 2 * c.genus() as i64;
    Ok(match (c.kind, c.index) {
        (ComponentKind::Point, i) => lam(Carrier::Point, 1, 3 - i as i64),
        (_, 0) => mono(s, 1, 2, 0).try_add(&mono(s, 0, 0, g2 + c.b().ok_or_else(|| missing(c))?))?,
        (_, 2) => {
            let (bp, bm) = c.b_pm().ok_or_else(|| missing(c))?;
            mono(s, 0, 0, g2 + bp + bm)
        }
        _ => mono(s, 1, -2, 0).try_add(&mono(s, 0, 0, g2 + c.b().ok_or_else(|| missing(c))?))?,
    })
}

/// `Σ_F ∫_F α|_F / e(ν_F)`, one restriction per component in data order.
pub fn abbv_integrate<C: Coefficient>(
    restrictions: &[EquivariantClass<C>],
    data: &FixedPointData,
) -> Result<LaurentScalar<C>> {
    if restrictions.len() != data.len() {
        return Err(LocalizationError::Arity {
            want: data.len(),
            got: restrictions.len(),
        });
    }
    let mut degree: Option<i64> = None;
    let mut total = LaurentScalar::zero();
    for (r, c) in restrictions.iter().zip(data.components()) {
        if let Some(d) = r.degree() {
            match degree {
                Some(e) if e != d => return Err(LocalizationError::DegreeMismatch(e, d)),
                _ => degree = Some(d),
            }
        }
        if r.is_zero() {
            continue;
        }
        let inv: EquivariantClass<C> = equivariant_euler(c)?.invert_euler()?.lift();
        total.merge(&r.try_mul(&inv)?.integrate_component());
    }
    Ok(total)
}

/// Restrictions of `1`.
pub fn unit_restrictions(data: &FixedPointData) -> Vec<EquivariantClass> {
    data.components().iter().map(|c| EquivariantClass::one(carrier(c))).collect()
}

pub fn c1_restrictions(data: &FixedPointData) -> Result<Vec<EquivariantClass>> {
    data.components().iter().map(c1_restriction).collect()
}

fn product<C: Coefficient>(a: &[EquivariantClass<C>], b: &[EquivariantClass<C>]) -> Result<Vec<EquivariantClass<C>>> {
    Ok(a.iter().zip(b).map(|(x, y)| x.try_mul(y)).collect::<std::result::Result<_, _>>()?)
}

/// Coefficients that must vanish in the integral of a class of degree `deg` on a 6-manifold.
fn vanishing_part<C: Coefficient>(value: &LaurentScalar<C>, deg: i64) -> Vec<(i64, C)> {
    let keep = (deg >= 6).then_some((deg - 6) / 2);
    value
        .iter()
        .filter(|(k, c)| Some(*k) != keep && !c.is_zero())
        .map(|(k, c)| (k, c.clone()))
        .collect()
}

/// `∫1`, `∫c₁`, `∫c₁²`, `∫c₁³` by localization.
pub fn chern_integrals(data: &FixedPointData) -> Result<[LaurentScalar; 4]> {
    let one = unit_restrictions(data);
    let c1 = c1_restrictions(data)?;
    let c1sq = product(&c1, &c1)?;
    let c1cube = product(&c1sq, &c1)?;
    Ok([
        abbv_integrate(&one, data)?,
        abbv_integrate(&c1, data)?,
        abbv_integrate(&c1sq, data)?,
        abbv_integrate(&c1cube, data)?,
    ])
}

/// Whether `∫1`, `∫c₁`, `∫c₁²` vanish and `∫c₁³` is an integer.
pub fn chern_relations_hold(data: &FixedPointData) -> Result<bool> {
    let values = chern_integrals(data)?;
    Ok(values.iter().zip([0, 2, 4, 6]).all(|(v, deg)| {
        vanishing_part(v, deg).is_empty() && is_integral(&v.coeff((deg - 6) / 2))
    }))
}

// ---------------------------------------------------------------------------
// Counting points next to a sphere minimum

/// Counts solving the localization relations for a sphere minimum, a point
/// maximum, `n2` index-2 points and `n4` index-4 points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointCounts {
    pub b_min: i64,
    pub n2: u64,
    pub n4: u64,
}

/// Inverse of `cλᵐ + (d-part)` with `c` constant.
fn invert_poly_euler(e: &EquivariantClass<Poly>) -> Result<EquivariantClass<Poly>> {
    let lead: Vec<(i64, Q)> = e
        .terms()
        .filter(|(_, c, _)| !c.is_zero())
        .map(|(k, c, _)| (k, c.as_constant()))
        .map(|(k, c)| c.map(|c| (k, c)))
        .collect::<Option<_>>()
        .ok_or_else(|| LocalizationError::Table("non-constant leading Euler coefficient".into()))?;
    let [(m, c)] = lead.as_slice() else {
        return Err(AlgebraError::NotInvertible(format!("{e:?}")).into());
    };
    let inv_c = Q::one() / c.clone();
    let mut out = EquivariantClass::lambda(e.carrier(), -m, Poly::constant(inv_c.clone()));
    for (k, _, d) in e.terms() {
        if !d.is_zero() {
            let t = EquivariantClass::lambda_u(k - 2 * m, d.scale(&-(&inv_c * &inv_c)));
            out = out.try_add(&t)?;
        }
    }
    Ok(out)
}

/// The relations `∫1 = ∫c₁ = ∫c₁² = 0` in the unknowns `b_min` (0), `n2` (1), `n4` (2).
pub fn point_count_relations() -> Result<Vec<Poly>> {
    let b = Poly::var(0);
    let s = Carrier::Surface;
    let p = Carrier::Point;
    let c = |v: i64| Poly::constant(q(v));
    let min_euler = EquivariantClass::lambda(s, 2, c(1)).try_add(&EquivariantClass::lambda_u(1, b.clone()))?;
    let min_c1 =
        EquivariantClass::lambda(s, 1, c(2)).try_add(&EquivariantClass::lambda_u(0, c(2) + b.clone()))?;
    let points = [(2u8, Poly::var(1)), (4, Poly::var(2)), (6, c(1))];
    let mut eqs = Vec::new();
    for power in 0..3u32 {
        let mut min_class = EquivariantClass::one(s);
        for _ in 0..power {
            min_class = min_class.try_mul(&min_c1)?;
        }
        let mut total = min_class.try_mul(&invert_poly_euler(&min_euler)?)?.integrate_component();
        for (index, count) in &points {
            let comp = FixedComponent::point(*index, q(0));
            let mut cls: EquivariantClass<Poly> = EquivariantClass::one(p);
            for _ in 0..power {
                cls = cls.try_mul(&c1_restriction(&comp)?.lift())?;
            }
            let inv: EquivariantClass<Poly> = equivariant_euler(&comp)?.invert_euler()?.lift();
            let term = cls.try_mul(&inv)?.scale(count);
            total.merge(&term.integrate_component());
        }
        eqs.extend(vanishing_part(&total, 2 * power as i64).into_iter().map(|(_, c)| c));
    }
    Ok(eqs)
}

/// All solutions in integers with non-negative counts.
pub fn solve_point_counts() -> Result<Vec<PointCounts>> {
    let sols = solve_system(&point_count_relations()?, 3);
    let mut out = Vec::new();
    for s in sols {
        let vals: Option<Vec<i64>> = s.iter().map(|v| v.as_ref().and_then(to_i64)).collect();
        let Some(v) = vals else {
            return Err(LocalizationError::Underdetermined("b_min, n2, n4".into()));
        };
        if v[1] >= 0 && v[2] >= 0 {
            out.push(PointCounts {
                b_min: v[0],
                n2: v[1] as u64,
                n4: v[2] as u64,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Splitting of index-2 surfaces

fn index2_surface(data: &FixedPointData, s: usize) -> Result<&FixedComponent> {
    let c = data.components().get(s).ok_or(LocalizationError::NotIndexTwoSurface(s))?;
    if !(c.is_surface() && c.index == 2) {
        return Err(LocalizationError::NotIndexTwoSurface(s));
    }
    Ok(c)
}

fn b_pm_from_chain(data: &FixedPointData, chain: &ChainSolution, s: usize) -> Result<(i64, i64)> {
    let eta = chain.eta_of(s).ok_or(LocalizationError::NotIndexTwoSurface(s))?;
    let slice = chain.level_of(s).ok_or(LocalizationError::NotIndexTwoSurface(s))?;
    let surfaces_here = slice.components.iter().filter(|&&i| data.component(i).is_surface()).count();
    if surfaces_here > 1 {
        return Err(LocalizationError::SharedLevel(s));
    }
    let sum = eta.self_intersection.clone();
    let diff = &slice.e_sq_above - &slice.e_sq_below - q(slice.point_term);
    let two = q(2);
    let bp = (&sum + &diff) / &two;
    let bm = (&sum - &diff) / &two;
    match (to_i64(&bp), to_i64(&bm)) {
        (Some(p), Some(m)) => Ok((p, m)),
        _ => Err(LocalizationError::NonIntegral(s)),
    }
}

/// `(b₊, b₋)` of the index-2 surface `s` from its dual class and the jump of `e²` across its level.
pub fn b_plus_minus(data: &FixedPointData, s: usize) -> Result<(i64, i64)> {
    index2_surface(data, s)?;
    let chain = unique_chain(data)?;
    b_pm_from_chain(data, &chain, s)
}

/// `data` with every missing `(b₊, b₋)` filled in from the wall-crossing chain.
pub fn complete_normal_data(data: &FixedPointData) -> Result<FixedPointData> {
    let missing: Vec<usize> = data
        .index2_surfaces()
        .into_iter()
        .filter(|&i| data.component(i).b_pm().is_none())
        .collect();
    if missing.is_empty() {
        return Ok(data.clone());
    }
    let chain = unique_chain(data)?;
    let mut out = data.clone();
    for i in missing {
        let (p, m) = b_pm_from_chain(data, &chain, i)?;
        out.set_b_pm(i, p, m);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Restriction tables

/// A basis class with its restriction to every component.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisClass<C: Coefficient = Q> {
    pub name: String,
    pub component: usize,
    pub primed: bool,
    pub degree: i64,
    pub restrictions: Vec<EquivariantClass<C>>,
}

/// An undetermined coefficient `λᵖ` or `λᵖu` of one restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub class: usize,
    pub component: usize,
    pub power: i64,
    pub u: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionTable {
    pub data: FixedPointData,
    pub classes: Vec<BasisClass>,
    pub c1: Vec<EquivariantClass>,
    /// Names and solved values of the undetermined coefficients.
    pub unknowns: Vec<(String, Q)>,
    pub equations: usize,
    /// Rank of the linearized system at the solution.
    pub rank: usize,
    pub selection_rule: bool,
    /// Set when the selection rule was decisive and `b_min` is odd.
    pub odd_parity_flag: bool,
}

fn class_name(component: usize, primed: bool) -> String {
    format!("α{}{}", if primed { "′" } else { "" }, component + 1)
}

fn monomial_name(power: i64, u: bool) -> String {
    let l = match power {
        0 => String::new(),
        1 => "λ".into(),
        p => format!("λ^{p}"),
    };
    match (l.is_empty(), u) {
        (true, true) => "u".into(),
        (true, false) => "1".into(),
        (false, true) => format!("{l}u"),
        (false, false) => l,
    }
}

fn unknown_name(classes: &[BasisClass<Poly>], u: &Unknown) -> String {
    format!(
        "{}|F{}:{}",
        classes[u.class].name,
        u.component + 1,
        monomial_name(u.power, u.u)
    )
}

/// Kirwan basis with undetermined restrictions.
///
/// `α_F|F = e(ν⁻_F)`, `α′_F|F = e(ν⁻_F)u`; restrictions vanish on components of
/// lower index and on other components at or below the level of `F`. The class
/// of the minimum is `1`.
fn skeleton(data: &FixedPointData) -> Result<(Vec<BasisClass<Poly>>, Vec<Unknown>)> {
    let comps = data.components();
    let min = data.min_index().ok_or_else(|| LocalizationError::Invalid("no minimum".into()))?;
    let mut classes = Vec::new();
    let mut unknowns = Vec::new();
    for (i, f) in comps.iter().enumerate() {
        for primed in [false, true] {
            if primed && !f.is_surface() {
                continue;
            }
            let own = negative_euler(f)?;
            let own = if primed {
                own.try_mul(&EquivariantClass::lambda_u(0, q(1)))?
            } else {
                own
            };
            let degree = f.index as i64 + if primed { 2 } else { 0 };
            let idx = classes.len();
            let mut restrictions = Vec::new();
            for (j, g) in comps.iter().enumerate() {
                let cg = carrier(g);
                if i == min && !primed {
                    restrictions.push(EquivariantClass::one(cg));
                    continue;
                }
                if j == i {
                    restrictions.push(own.lift());
                    continue;
                }
                if g.index < f.index || g.level <= f.level {
                    restrictions.push(EquivariantClass::zero(cg));
                    continue;
                }
                let mut r = EquivariantClass::zero(cg);
                let top = g.index as i64;
                let mut add = |power: i64, u: bool, r: &mut EquivariantClass<Poly>| -> Result<()> {
                    let v = Poly::var(unknowns.len());
                    unknowns.push(Unknown {
                        class: idx,
                        component: j,
                        power,
                        u,
                    });
                    let t = if u {
                        EquivariantClass::lambda_u(power, v)
                    } else {
                        EquivariantClass::lambda(cg, power, v)
                    };
                    *r = r.try_add(&t)?;
                    Ok(())
                };
                if degree < top {
                    add(degree / 2, false, &mut r)?;
                }
                if g.is_surface() && degree >= 2 && degree - 2 < top {
                    add((degree - 2) / 2, true, &mut r)?;
                }
                restrictions.push(r);
            }
            classes.push(BasisClass {
                name: class_name(i, primed),
                component: i,
                primed,
                degree,
                restrictions,
            });
        }
    }
    Ok((classes, unknowns))
}

/// Vanishing conditions from every class, class times `c₁`, and pairwise product of degree at most 6.
fn table_equations(data: &FixedPointData, classes: &[BasisClass<Poly>], c1: &[EquivariantClass]) -> Result<Vec<Poly>> {
    let c1p: Vec<EquivariantClass<Poly>> = c1.iter().map(|c| c.lift()).collect();
    let mut gens: Vec<(i64, Vec<EquivariantClass<Poly>>)> =
        classes.iter().map(|c| (c.degree, c.restrictions.clone())).collect();
    gens.push((2, c1p));
    let mut eqs = Vec::new();
    let mut push = |deg: i64, cls: &[EquivariantClass<Poly>]| -> Result<()> {
        let v = abbv_integrate(cls, data)?;
        eqs.extend(vanishing_part(&v, deg).into_iter().map(|(_, c)| c));
        Ok(())
    };
    for (d, g) in &gens {
        push(*d, g)?;
    }
    for (i, (da, a)) in gens.iter().enumerate() {
        for (db, b) in gens.iter().skip(i) {
            if da + db <= 6 {
                push(da + db, &product(a, b)?)?;
            }
        }
    }
    Ok(eqs)
}

fn integral_assignments(sols: &[Assignment]) -> (Vec<Vec<Q>>, Vec<Assignment>) {
    let mut full = Vec::new();
    let mut partial = Vec::new();
    for s in sols {
        match s.iter().cloned().collect::<Option<Vec<Q>>>() {
            Some(v) if v.iter().all(is_integral) => full.push(v),
            Some(_) => {}
            None => partial.push(s.clone()),
        }
    }
    (full, partial)
}

/// The selection rule for three surfaces: `α′_min|max` has `λ`-coefficient 0
/// (untwisted) or −1 (twisted), and its `u`-coefficient at the middle surface
/// equals the `y`-coordinate of the middle surface's dual class.
fn selection_equations(data: &FixedPointData, unknowns: &[Unknown], classes: &[BasisClass<Poly>]) -> Option<Vec<Poly>> {
    let comps = data.components();
    if comps.len() != 3 || !data.all_surfaces() {
        return None;
    }
    let (min, max) = (data.min_index()?, data.max_index()?);
    let mid = data.index2_surfaces().into_iter().next()?;
    let chain = unique_chain(data).ok()?;
    let d = chain.eta_of(mid)?.coords.get(1)?.clone();
    let prime_min = classes.iter().position(|c| c.component == min && c.primed)?;
    let find = |comp: usize, power: i64, u: bool| {
        unknowns
            .iter()
            .position(|x| x.class == prime_min && x.component == comp && x.power == power && x.u == u)
    };
    let e = find(max, 1, false)?;
    let dt = find(mid, 0, true)?;
    let e_val = if data.twist { q(-1) } else { q(0) };
    Some(vec![
        Poly::var(e) - Poly::constant(e_val),
        Poly::var(dt) - Poly::constant(d),
    ])
}

fn jacobian_rank(eqs: &[Poly], values: &[Q], nvars: usize) -> usize {
    let point: Vec<Option<Q>> = values.iter().cloned().map(Some).collect();
    let rows: Vec<Vec<Q>> = eqs
        .iter()
        .map(|e| {
            (0..nvars)
                .map(|v| e.derivative(v).eval(&point).expect("all assigned"))
                .collect()
        })
        .collect();
    if rows.is_empty() || nvars == 0 {
        0
    } else {
        linalg::rank(&rows)
    }
}

/// Solves the Kirwan-basis restrictions of `data` by localization.
pub fn solve_restriction_table(data: &FixedPointData) -> Result<RestrictionTable> {
    let report = validate(data);
    if !report.is_valid() {
        return Err(LocalizationError::Invalid(report.to_string()));
    }
    let data = complete_normal_data(data)?;
    let c1 = c1_restrictions(&data)?;
    let (classes, unknowns) = skeleton(&data)?;
    let n = unknowns.len();
    let eqs = table_equations(&data, &classes, &c1)?;
    if eqs.iter().any(|e| e.as_constant().is_some_and(|c| !c.is_zero())) {
        return Err(LocalizationError::NoSolution);
    }

    let (mut full, mut partial) = integral_assignments(&solve_system(&eqs, n));
    let mut selection_rule = false;
    if full.len() + partial.len() > 1 || !partial.is_empty() {
        if let Some(extra) = selection_equations(&data, &unknowns, &classes) {
            let mut all = eqs.clone();
            all.extend(extra);
            (full, partial) = integral_assignments(&solve_system(&all, n));
            selection_rule = true;
        }
    }
    if let Some(p) = partial.first() {
        let free: Vec<String> = p
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| unknown_name(&classes, &unknowns[i]))
            .collect();
        return Err(LocalizationError::Underdetermined(free.join(", ")));
    }
    let values = match full.len() {
        0 => return Err(LocalizationError::NoSolution),
        1 => full.pop().expect("one"),
        k => return Err(LocalizationError::Ambiguous(k)),
    };
    let point: Vec<Option<Q>> = values.iter().cloned().map(Some).collect();
    let solved: Vec<BasisClass> = classes
        .iter()
        .map(|c| BasisClass {
            name: c.name.clone(),
            component: c.component,
            primed: c.primed,
            degree: c.degree,
            restrictions: c
                .restrictions
                .iter()
                .map(|r| r.map_coeffs(|p| p.eval(&point).expect("all assigned")))
                .collect(),
        })
        .collect();
    let names = unknowns
        .iter()
        .zip(&values)
        .map(|(u, v)| (unknown_name(&classes, u), v.clone()))
        .collect();
    let odd = data.b_min().is_some_and(|b| b.rem_euclid(2) == 1);
    Ok(RestrictionTable {
        rank: jacobian_rank(&eqs, &values, n),
        equations: eqs.len(),
        odd_parity_flag: selection_rule && odd,
        selection_rule,
        unknowns: names,
        classes: solved,
        c1,
        data,
    })
}

/// Outcome of re-integrating products of a solved table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TableCheck {
    pub products: usize,
    pub failures: Vec<String>,
}

impl TableCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl RestrictionTable {
    pub fn class(&self, name: &str) -> Option<&BasisClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Restriction of the named class to component `component` (0-based).
    pub fn restriction(&self, name: &str, component: usize) -> Option<&EquivariantClass> {
        self.class(name)?.restrictions.get(component)
    }

    pub fn unknown(&self, name: &str) -> Option<&Q> {
        self.unknowns.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Degree-2 classes other than `λ·1`.
    pub fn degree_two(&self) -> Vec<&BasisClass> {
        self.classes.iter().filter(|c| c.degree == 2).collect()
    }

    /// Integrates every class, pair and triple (with `1` and `c₁` adjoined):
    /// coefficients outside `λ^{(d−6)/2}` vanish and that coefficient is an integer.
    pub fn check(&self) -> Result<TableCheck> {
        let mut gens: Vec<(String, i64, Vec<EquivariantClass>)> = self
            .classes
            .iter()
            .map(|c| (c.name.clone(), c.degree, c.restrictions.clone()))
            .collect();
        gens.push(("c1".into(), 2, self.c1.clone()));
        gens.push(("1".into(), 0, unit_restrictions(&self.data)));
        let mut out = TableCheck::default();
        let k = gens.len();
        for i in 0..k {
            for j in i..k {
                for l in j..k {
                    let deg = gens[i].1 + gens[j].1 + gens[l].1;
                    let cls = product(&product(&gens[i].2, &gens[j].2)?, &gens[l].2)?;
                    let v = abbv_integrate(&cls, &self.data)?;
                    out.products += 1;
                    let top = v.coeff((deg - 6) / 2);
                    if !vanishing_part(&v, deg).is_empty() || (deg >= 6 && !is_integral(&top)) {
                        out.failures
                            .push(format!("{}·{}·{} integrates to {}", gens[i].0, gens[j].0, gens[l].0, v));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Aligned text table: one row per class, one column per component.
    pub fn render(&self) -> String {
        let mut header = vec!["class".to_string(), "deg".to_string()];
        header.extend((0..self.data.len()).map(|j| format!("F{}", j + 1)));
        let mut rows = vec![header];
        for c in &self.classes {
            let mut row = vec![c.name.clone(), c.degree.to_string()];
            row.extend(c.restrictions.iter().map(|r| r.to_string()));
            rows.push(row);
        }
        let mut c1row = vec!["c1".to_string(), "2".to_string()];
        c1row.extend(self.c1.iter().map(|r| r.to_string()));
        rows.push(c1row);
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for (i, c) in self.data.components().iter().enumerate() {
            s.push_str(&format!("F{}: {}\n", i + 1, c));
        }
        for row in &rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
                .collect();
            s.push_str(cells.join("  ").trim_end());
            s.push('\n');
        }
        if self.selection_rule {
            s.push_str("selection rule applied");
            if self.odd_parity_flag {
                s.push_str(" (odd b_min)");
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for RestrictionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// ---------------------------------------------------------------------------
// rtable.v1

pub const RTABLE_SCHEMA: &str = "rtable.v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub k: i64,
    pub c: String,
    pub d: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRestriction {
    pub component: usize,
    pub carrier: Carrier,
    pub terms: Vec<RawTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawClass {
    pub name: String,
    pub component: usize,
    pub primed: bool,
    pub degree: i64,
    pub restrictions: Vec<RawRestriction>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTable {
    pub schema: String,
    pub data: RawFpData,
    pub classes: Vec<RawClass>,
    pub c1: Vec<RawRestriction>,
    pub unknowns: BTreeMap<String, String>,
    pub equations: usize,
    pub rank: usize,
    pub selection_rule: bool,
    pub odd_parity_flag: bool,
}

fn raw_class(component: usize, c: &EquivariantClass) -> RawRestriction {
    RawRestriction {
        component,
        carrier: c.carrier(),
        terms: c
            .terms()
            .map(|(k, c, d)| RawTerm {
                k,
                c: format_q(c),
                d: format_q(d),
            })
            .collect(),
    }
}

fn cooked_class(r: &RawRestriction) -> Result<EquivariantClass> {
    let mut out = EquivariantClass::zero(r.carrier);
    for t in &r.terms {
        let parse = |s: &str| parse_q(s).map_err(|e| LocalizationError::Table(e.to_string()));
        out = out.try_add(&EquivariantClass::monomial(r.carrier, t.k, parse(&t.c)?, parse(&t.d)?))?;
    }
    Ok(out)
}

fn cooked_row(rs: &[RawRestriction], n: usize) -> Result<Vec<EquivariantClass>> {
    if rs.len() != n || rs.iter().enumerate().any(|(i, r)| r.component != i) {
        return Err(LocalizationError::Table("restrictions must list every component in order".into()));
    }
    rs.iter().map(cooked_class).collect()
}

impl RestrictionTable {
    pub fn to_raw(&self) -> RawTable {
        let row = |rs: &[EquivariantClass]| rs.iter().enumerate().map(|(i, r)| raw_class(i, r)).collect();
        RawTable {
            schema: RTABLE_SCHEMA.into(),
            data: self.data.to_raw(),
            classes: self
                .classes
                .iter()
                .map(|c| RawClass {
                    name: c.name.clone(),
                    component: c.component,
                    primed: c.primed,
                    degree: c.degree,
                    restrictions: row(&c.restrictions),
                })
                .collect(),
            c1: row(&self.c1),
            unknowns: self.unknowns.iter().map(|(n, v)| (n.clone(), format_q(v))).collect(),
            equations: self.equations,
            rank: self.rank,
            selection_rule: self.selection_rule,
            odd_parity_flag: self.odd_parity_flag,
        }
    }

    pub fn from_raw(raw: RawTable) -> Result<Self> {
        if raw.schema != RTABLE_SCHEMA {
            return Err(LocalizationError::Table(format!("unknown schema `{}`", raw.schema)));
        }
        let data = FixedPointData::from_raw(raw.data)?;
        let n = data.len();
        let classes = raw
            .classes
            .iter()
            .map(|c| {
                Ok(BasisClass {
                    name: c.name.clone(),
                    component: c.component,
                    primed: c.primed,
                    degree: c.degree,
                    restrictions: cooked_row(&c.restrictions, n)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let unknowns = raw
            .unknowns
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse_q(v).map_err(|e| LocalizationError::Table(e.to_string()))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(RestrictionTable {
            c1: cooked_row(&raw.c1, n)?,
            data,
            classes,
            unknowns,
            equations: raw.equations,
            rank: raw.rank,
            selection_rule: raw.selection_rule,
            odd_parity_flag: raw.odd_parity_flag,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawTable = serde_json::from_str(s).map_err(|e| LocalizationError::Table(e.to_string()))?;
        Self::from_raw(raw)
    }
}

// ---------------------------------------------------------------------------
// Second Stiefel-Whitney class

/// Coefficients of `c₁` in the basis `λ·1` followed by the degree-2 classes.
pub fn c1_decomposition(table: &RestrictionTable) -> Result<Vec<(String, Q)>> {
    let mut basis: Vec<(String, Vec<EquivariantClass>)> = vec![(
        "λα1".to_string(),
        table
            .data
            .components()
            .iter()
            .map(|c| lam(carrier(c), 1, 1))
            .collect(),
    )];
    basis.extend(table.degree_two().into_iter().map(|c| (c.name.clone(), c.restrictions.clone())));
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (j, target) in table.c1.iter().enumerate() {
        for k in 0..=1 {
            for part in 0..2 {
                let pick = |cls: &EquivariantClass| {
                    let (c, d) = cls.coeff(k);
                    if part == 0 {
                        c
                    } else {
                        d
                    }
                };
                rows.push(basis.iter().map(|(_, b)| pick(&b[j])).collect::<Vec<Q>>());
                rhs.push(pick(target));
            }
        }
    }
    let sol = linalg::solve(&rows, &rhs).ok_or(LocalizationError::NotInSpan)?;
    if !sol.is_unique() {
        return Err(LocalizationError::Underdetermined("c1 coefficients".into()));
    }
    Ok(basis.into_iter().map(|(n, _)| n).zip(sol.particular).collect())
}

/// `w₂(M) = 0` iff `c₁` has even coefficients on every degree-2 class other than `λ·1`.
pub fn w2_vanishes(data: &FixedPointData) -> Result<bool> {
    let table = solve_restriction_table(data)?;
    let coeffs = c1_decomposition(&table)?;
    Ok(coeffs
        .iter()
        .skip(1)
        .all(|(_, c)| c.is_integer() && c.to_integer().is_even()))
}

// ---------------------------------------------------------------------------
// Duistermaat-Heckman paths

/// `[ω_t] = omega_start − (t − start)·euler` on `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DhSegment {
    pub start: Q,
    pub end: Q,
    pub omega_start: Vec<Q>,
    pub euler: Vec<Q>,
}

impl DhSegment {
    pub fn omega_at(&self, t: &Q) -> Vec<Q> {
        let dt = t - &self.start;
        self.omega_start.iter().zip(&self.euler).map(|(w, e)| w - &dt * e).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DhPath {
    pub space: ReducedSpaceType,
    pub alpha0: Q,
    pub segments: Vec<DhSegment>,
    /// Violated positivity conditions.
    pub failures: Vec<String>,
    /// Whether the fiber class has zero area at the maximum.
    pub collapses: bool,
}

impl DhPath {
    pub fn positive(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn consistent(&self) -> bool {
        self.positive() && self.collapses
    }

    /// `[ω_t]`, taking the left-hand segment at a wall.
    pub fn omega_at(&self, t: &Q) -> Option<ReducedClass> {
        let seg = self.segments.iter().find(|s| &s.start <= t && t <= &s.end)?;
        Some(ReducedClass {
            space: self.space,
            coeffs: seg.omega_at(t),
        })
    }
}

/// `[ω_t]` as linear forms in `(α₀, gap₁, …, gap_m)`, with labelled strict
/// positivity rows and the collapse row.
struct DhSystem {
    space: ReducedSpaceType,
    euler: Vec<Vec<Q>>,
    strict: Vec<(String, Vec<Q>)>,
    collapse: Vec<Q>,
}

fn dh_system(data: &FixedPointData) -> Result<DhSystem> {
    if let Some(i) = data.components().iter().position(|c| !c.is_surface()) {
        return Err(LocalizationError::NonSurface(i));
    }
    let chain = unique_chain(data)?;
    let bundle = chain.bundle.clone().ok_or(LocalizationError::NoBundle)?;
    let gram = bundle.space.gram();
    let rank = gram.len();
    let m = data.levels().len() - 1;
    let nv = m + 1;
    let pair = |a: &[Q], b: &[Q]| -> Q {
        let mut s = Q::zero();
        for i in 0..rank {
            for j in 0..rank {
                s += &a[i] * &gram[i][j] * &b[j];
            }
        }
        s
    };
    let mut euler = vec![bundle.e_start.clone()];
    euler.extend(chain.levels.iter().map(|l| l.e_above.clone()));
    // ω as a rank × nv matrix; pairing with c gives a row over the variables
    let pair_row = |omega: &[Vec<Q>], c: &[Q]| -> Vec<Q> {
        (0..nv)
            .map(|v| {
                let col: Vec<Q> = omega.iter().map(|r| r[v].clone()).collect();
                pair(&col, c)
            })
            .collect()
    };
    let advance = |omega: &[Vec<Q>], e: &[Q], var: usize, frac: &Q| -> Vec<Vec<Q>> {
        let mut out = omega.to_vec();
        for (row, ei) in out.iter_mut().zip(e) {
            row[var] -= ei * frac;
        }
        out
    };
    let mut omega: Vec<Vec<Q>> = (0..rank)
        .map(|i| {
            let mut r = vec![Q::zero(); nv];
            if i == 0 {
                r[0] = q(1);
            }
            r
        })
        .collect();
    let unit = |i: usize| -> Vec<Q> { (0..rank).map(|j| if i == j { q(1) } else { q(0) }).collect() };
    let basis_names = ["x", "y"];
    let mut strict: Vec<(String, Vec<Q>)> = Vec::new();
    let e_row = |v: usize| -> Vec<Q> { (0..nv).map(|j| if j == v { q(1) } else { q(0) }).collect() };
    strict.push(("α0 > 0".into(), e_row(0)));
    for g in 1..=m {
        strict.push((format!("gap{g} > 0"), e_row(g)));
    }
    for seg in 0..m {
        let mid = advance(&omega, &euler[seg], seg + 1, &Q::new(1.into(), 2.into()));
        for (b, name) in basis_names.iter().enumerate().take(rank) {
            strict.push((format!("ω·{name} > 0 inside segment {}", seg + 1), pair_row(&mid, &unit(b))));
        }
        omega = advance(&omega, &euler[seg], seg + 1, &q(1));
        if seg + 1 < m {
            for (b, name) in basis_names.iter().enumerate().take(rank) {
                strict.push((format!("ω·{name} > 0 at wall {}", seg + 1), pair_row(&omega, &unit(b))));
            }
            for &c in &chain.levels[seg].components {
                if let Some(eta) = chain.eta_of(c) {
                    strict.push((format!("area of F{} > 0", c + 1), pair_row(&omega, &eta.coords)));
                }
            }
        }
    }
    strict.push(("area of the maximum > 0".into(), pair_row(&omega, &bundle.section_end)));
    let collapse = pair_row(&omega, &bundle.fiber_end);
    Ok(DhSystem {
        space: bundle.space,
        euler,
        strict,
        collapse,
    })
}

/// Piecewise-affine `[ω_t]` from the Euler classes between consecutive levels.
pub fn dh_path(data: &FixedPointData, alpha0: &Q, gaps: &[Q]) -> Result<DhPath> {
    let sys = dh_system(data)?;
    let m = sys.euler.len();
    if gaps.len() != m {
        return Err(LocalizationError::GapCount {
            want: m,
            got: gaps.len(),
        });
    }
    let mut v = vec![alpha0.clone()];
    v.extend(gaps.iter().cloned());
    let eval = |row: &[Q]| row.iter().zip(&v).fold(Q::zero(), |acc, (a, b)| acc + a * b);
    let failures = sys
        .strict
        .iter()
        .filter(|(_, r)| !eval(r).is_positive())
        .map(|(n, _)| n.clone())
        .collect();
    let rank = sys.space.rank();
    let mut omega: Vec<Q> = (0..rank).map(|i| if i == 0 { alpha0.clone() } else { q(0) }).collect();
    let mut t = Q::zero();
    let mut segments = Vec::new();
    for (e, g) in sys.euler.iter().zip(gaps) {
        let seg = DhSegment {
            start: t.clone(),
            end: &t + g,
            omega_start: omega.clone(),
            euler: e.clone(),
        };
        omega = seg.omega_at(&seg.end);
        t = seg.end.clone();
        segments.push(seg);
    }
    Ok(DhPath {
        space: sys.space,
        alpha0: alpha0.clone(),
        segments,
        failures,
        collapses: eval(&sys.collapse).is_zero(),
    })
}

/// Whether some `α₀` and gaps give a positive path that collapses at the maximum.
pub fn dh_feasible(data: &FixedPointData) -> Result<bool> {
    let sys = dh_system(data)?;
    let rows: Vec<Vec<Q>> = sys.strict.iter().map(|(_, r)| r.clone()).collect();
    let Some(pivot) = (0..sys.collapse.len()).rev().find(|&j| !sys.collapse[j].is_zero()) else {
        return Ok(strictly_feasible(&rows));
    };
    // eliminate the pivot variable through the collapse equation
    let l = &sys.collapse;
    let reduced: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let f = &r[pivot] / &l[pivot];
            (0..l.len())
                .filter(|&j| j != pivot)
                .map(|j| &r[j] - &f * &l[j])
                .collect()
        })
        .collect();
    Ok(strictly_feasible(&reduced))
}

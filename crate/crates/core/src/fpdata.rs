//! Fixed-point data of a semi-free circle action on a 6-manifold.
//!
//! A component is an isolated point or a closed surface, together with its
//! Morse index, its critical level and the Chern numbers of its normal
//! bundle. Levels are rationals so that simultaneous crossings can be
//! represented.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_q, parse_q, q, Q};

pub const FPDATA_SCHEMA: &str = "fpdata.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Point,
    Surface { genus: u32 },
}

impl ComponentKind {
    pub fn genus(&self) -> Option<u32> {
        match self {
            ComponentKind::Point => None,
            ComponentKind::Surface { genus } => Some(*genus),
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, ComponentKind::Point)
    }
}

/// Chern numbers of the normal bundle.
///
/// Extremal surfaces carry one number `b`; index-2 surfaces split their
/// normal bundle by weight sign, and those two numbers may be unknown until
/// the wall-crossing chain determines them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalData {
    None,
    Extremal { b: i64 },
    Split { b_plus: Option<i64>, b_minus: Option<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedComponent {
    pub kind: ComponentKind,
    pub index: u8,
    pub level: Q,
    pub normal: NormalData,
}

impl FixedComponent {
    pub fn point(index: u8, level: Q) -> Self {
        FixedComponent {
            kind: ComponentKind::Point,
            index,
            level,
            normal: NormalData::None,
        }
    }

    pub fn surface_min(genus: u32, b: i64, level: Q) -> Self {
        FixedComponent {
            kind: ComponentKind::Surface { genus },
            index: 0,
            level,
            normal: NormalData::Extremal { b },
        }
    }

    pub fn surface_max(genus: u32, b: i64, level: Q) -> Self {
        FixedComponent {
            kind: ComponentKind::Surface { genus },
            index: 4,
            level,
            normal: NormalData::Extremal { b },
        }
    }

    pub fn surface_mid(genus: u32, level: Q, b_pm: Option<(i64, i64)>) -> Self {
        FixedComponent {
            kind: ComponentKind::Surface { genus },
            index: 2,
            level,
            normal: NormalData::Split {
                b_plus: b_pm.map(|p| p.0),
                b_minus: b_pm.map(|p| p.1),
            },
        }
    }

    pub fn is_surface(&self) -> bool {
        !self.kind.is_point()
    }

    pub fn is_min(&self) -> bool {
        self.index == 0
    }

    pub fn is_max(&self) -> bool {
        match self.kind {
            ComponentKind::Point => self.index == 6,
            ComponentKind::Surface { .. } => self.index == 4,
        }
    }

    pub fn genus(&self) -> u32 {
        self.kind.genus().unwrap_or(0)
    }

    /// Extremal Chern number, if this is a surface extremum.
    pub fn b(&self) -> Option<i64> {
        match self.normal {
            NormalData::Extremal { b } => Some(b),
            _ => None,
        }
    }

    pub fn b_pm(&self) -> Option<(i64, i64)> {
        match self.normal {
            NormalData::Split {
                b_plus: Some(p),
                b_minus: Some(m),
            } => Some((p, m)),
            _ => None,
        }
    }

    /// Number of negative weights.
    pub fn negative_weights(&self) -> u8 {
        self.index / 2
    }

    fn poincare(&self) -> Vec<u64> {
        match self.kind {
            ComponentKind::Point => vec![1],
            ComponentKind::Surface { genus } => vec![1, 2 * genus as u64, 1],
        }
    }

    /// The same component for the circle acting with the opposite orientation.
    pub fn reversed(&self) -> Self {
        let index = match self.kind {
            ComponentKind::Point => 6 - self.index,
            ComponentKind::Surface { .. } => 4 - self.index.min(4),
        };
        let normal = match self.normal {
            NormalData::Split { b_plus, b_minus } => NormalData::Split {
                b_plus: b_minus,
                b_minus: b_plus,
            },
            other => other,
        };
        FixedComponent {
            kind: self.kind,
            index,
            level: -self.level.clone(),
            normal,
        }
    }
}

impl fmt::Display for FixedComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ComponentKind::Point => write!(f, "point[index {}]", self.index)?,
            ComponentKind::Surface { genus } => write!(f, "surface[g={genus}, index {}]", self.index)?,
        }
        write!(f, " @ {}", crate::rational::pretty_q(&self.level))?;
        match self.normal {
            NormalData::Extremal { b } => write!(f, " b={b}"),
            NormalData::Split {
                b_plus: Some(p),
                b_minus: Some(m),
            } => write!(f, " b+={p} b-={m}"),
            _ => Ok(()),
        }
    }
}

/// The families of the classification with `dim H² < 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    #[serde(rename = "1")]
    T1,
    #[serde(rename = "2")]
    T2,
    #[serde(rename = "3")]
    T3,
    #[serde(rename = "4")]
    T4,
    #[serde(rename = "5")]
    T5,
    #[serde(rename = "6a")]
    T6a,
    #[serde(rename = "6b")]
    T6b,
}

impl TypeTag {
    pub const ALL: [TypeTag; 7] = [
        TypeTag::T1,
        TypeTag::T2,
        TypeTag::T3,
        TypeTag::T4,
        TypeTag::T5,
        TypeTag::T6a,
        TypeTag::T6b,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TypeTag::T1 => "1",
            TypeTag::T2 => "2",
            TypeTag::T3 => "3",
            TypeTag::T4 => "4",
            TypeTag::T5 => "5",
            TypeTag::T6a => "6a",
            TypeTag::T6b => "6b",
        }
    }

    pub fn parse(s: &str) -> Option<TypeTag> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        TypeTag::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// The type number, merging the two subfamilies of 6.
    pub fn number(&self) -> u8 {
        match self {
            TypeTag::T1 => 1,
            TypeTag::T2 => 2,
            TypeTag::T3 => 3,
            TypeTag::T4 => 4,
            TypeTag::T5 => 5,
            TypeTag::T6a | TypeTag::T6b => 6,
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedPointData {
    components: Vec<FixedComponent>,
    pub twist: bool,
    pub label: Option<TypeTag>,
}

impl FixedPointData {
    /// Components are stably sorted by level.
    pub fn new(mut components: Vec<FixedComponent>, twist: bool) -> Self {
        components.sort_by(|a, b| a.level.cmp(&b.level));
        FixedPointData {
            components,
            twist,
            label: None,
        }
    }

    pub fn with_label(mut self, tag: TypeTag) -> Self {
        self.label = Some(tag);
        self
    }

    pub fn components(&self) -> &[FixedComponent] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &FixedComponent {
        &self.components[i]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.components.iter().position(FixedComponent::is_min)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.components.iter().position(FixedComponent::is_max)
    }

    pub fn min(&self) -> Option<&FixedComponent> {
        self.min_index().map(|i| &self.components[i])
    }

    pub fn max(&self) -> Option<&FixedComponent> {
        self.max_index().map(|i| &self.components[i])
    }

    pub fn b_min(&self) -> Option<i64> {
        self.min().and_then(FixedComponent::b)
    }

    pub fn b_max(&self) -> Option<i64> {
        self.max().and_then(FixedComponent::b)
    }

    /// Indices of the non-extremal components.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&i| !self.components[i].is_min() && !self.components[i].is_max())
            .collect()
    }

    pub fn count_points(&self, index: u8) -> usize {
        self.components
            .iter()
            .filter(|c| c.kind.is_point() && c.index == index)
            .count()
    }

    pub fn index2_surfaces(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&i| self.components[i].is_surface() && self.components[i].index == 2)
            .collect()
    }

    pub fn all_surfaces(&self) -> bool {
        self.components.iter().all(FixedComponent::is_surface)
    }

    pub fn set_b_pm(&mut self, i: usize, b_plus: i64, b_minus: i64) {
        self.components[i].normal = NormalData::Split {
            b_plus: Some(b_plus),
            b_minus: Some(b_minus),
        };
    }

    /// Distinct levels in increasing order with the components on each.
    pub fn levels(&self) -> Vec<(Q, Vec<usize>)> {
        let mut map: BTreeMap<Q, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.components.iter().enumerate() {
            map.entry(c.level.clone()).or_default().push(i);
        }
        map.into_iter().collect()
    }

    /// Data of the same manifold with the circle orientation reversed.
    pub fn reversed(&self) -> Self {
        let comps = self.components.iter().map(FixedComponent::reversed).collect();
        FixedPointData {
            label: self.label,
            ..FixedPointData::new(comps, self.twist)
        }
    }
}

impl fmt::Display for FixedPointData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))?;
        if self.twist {
            write!(f, " twist")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    ComponentShape,
    NormalDataShape,
    Extrema,
    ExtremalLevels,
    GenusMatch,
    TwistNeedsSurfaces,
    PointPairing,
    MinimumSphere,
    SameLevelSurfaces,
    ParityCoherence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: Rule, detail: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "valid");
        }
        writeln!(f, "invalid")?;
        for v in &self.violations {
            writeln!(f, "  {:?}: {}", v.rule, v.detail)?;
        }
        Ok(())
    }
}

/// Coarse shape of a reduced space: lattice rank and whether the form is odd.
type SliceShape = (usize, bool);

pub fn validate(data: &FixedPointData) -> ValidationReport {
    let mut r = ValidationReport::default();
    for (i, c) in data.components.iter().enumerate() {
        let ok_index = match c.kind {
            ComponentKind::Point => matches!(c.index, 0 | 2 | 4 | 6),
            ComponentKind::Surface { .. } => matches!(c.index, 0 | 2 | 4),
        };
        if !ok_index {
            r.push(Rule::ComponentShape, format!("component {i}: index {} impossible for {:?}", c.index, c.kind));
            continue;
        }
        let ok_normal = match (c.kind, c.index, c.normal) {
            (ComponentKind::Point, _, NormalData::None) => true,
            (ComponentKind::Surface { .. }, 0 | 4, NormalData::Extremal { .. }) => true,
            (ComponentKind::Surface { .. }, 2, NormalData::Split { b_plus, b_minus }) => b_plus.is_some() == b_minus.is_some(),
            _ => false,
        };
        if !ok_normal {
            r.push(Rule::NormalDataShape, format!("component {i}: normal data {:?} does not fit", c.normal));
        }
    }
    if r.has(Rule::ComponentShape) {
        return r;
    }

    let mins: Vec<usize> = (0..data.len()).filter(|&i| data.components[i].is_min()).collect();
    let maxs: Vec<usize> = (0..data.len()).filter(|&i| data.components[i].is_max()).collect();
    if mins.len() != 1 || maxs.len() != 1 {
        r.push(
            Rule::Extrema,
            format!("need exactly one minimum and one maximum, found {} and {}", mins.len(), maxs.len()),
        );
        return r;
    }
    let (lo, hi) = (&data.components[mins[0]], &data.components[maxs[0]]);
    for (i, c) in data.components.iter().enumerate() {
        if i != mins[0] && c.level <= lo.level {
            r.push(Rule::ExtremalLevels, format!("component {i} is not above the minimum"));
        }
        if i != maxs[0] && c.level >= hi.level {
            r.push(Rule::ExtremalLevels, format!("component {i} is not below the maximum"));
        }
    }
    if lo.is_surface() && hi.is_surface() && lo.genus() != hi.genus() {
        r.push(
            Rule::GenusMatch,
            format!("minimum genus {} differs from maximum genus {}", lo.genus(), hi.genus()),
        );
    }
    if data.twist && !data.all_surfaces() {
        r.push(Rule::TwistNeedsSurfaces, "a twist is only defined when every fixed component is a surface");
    }

    let n2 = data.count_points(2) as i64;
    let n4 = data.count_points(4) as i64;
    match (lo.is_surface(), hi.is_surface()) {
        (false, false) | (true, true) => {
            if n2 != n4 {
                r.push(Rule::PointPairing, format!("index-2 points ({n2}) and index-4 points ({n4}) must pair up"));
            }
        }
        (true, false) => {
            if lo.genus() != 0 {
                r.push(Rule::MinimumSphere, "a surface minimum under an isolated maximum must be a sphere");
            }
            if n4 != n2 + 1 {
                r.push(Rule::PointPairing, format!("need one more index-4 point than index-2 points, found {n4} and {n2}"));
            }
        }
        (false, true) => {
            if hi.genus() != 0 {
                r.push(Rule::MinimumSphere, "a surface maximum over an isolated minimum must be a sphere");
            }
            if n2 != n4 + 1 {
                r.push(Rule::PointPairing, format!("need one more index-2 point than index-4 points, found {n2} and {n4}"));
            }
        }
    }
    if r.is_valid() {
        parity_coherence(data, &mut r);
    }
    r
}

/// Tracks the possible (rank, odd) shapes of the reduced space level by level.
fn parity_coherence(data: &FixedPointData, r: &mut ValidationReport) {
    let lo = data.min().expect("validated");
    let hi = data.max().expect("validated");
    let genus = if lo.is_surface() { lo.genus() } else { hi.genus() };
    let mut states: BTreeSet<SliceShape> = BTreeSet::new();
    if lo.is_surface() {
        states.insert((2, lo.b().unwrap_or(0).rem_euclid(2) == 1));
    } else {
        states.insert((1, true));
    }
    for (level, idx) in data.levels() {
        let here: Vec<&FixedComponent> = idx
            .iter()
            .map(|&i| &data.components[i])
            .filter(|c| !c.is_min() && !c.is_max())
            .collect();
        let ups = here.iter().filter(|c| c.kind.is_point() && c.index == 2).count();
        let downs = here.iter().filter(|c| c.kind.is_point() && c.index == 4).count();
        let surfaces = here.iter().filter(|c| c.is_surface()).count();
        for _ in 0..ups {
            states = states.iter().map(|&(k, _)| (k + 1, true)).collect();
        }
        if surfaces >= 2 && states.iter().all(|&(k, _)| k == 1) {
            r.push(
                Rule::SameLevelSurfaces,
                format!("two surfaces at level {level} would meet inside a projective plane"),
            );
        }
        for _ in 0..downs {
            let mut next = BTreeSet::new();
            for &(k, odd) in &states {
                match k {
                    1 => {}
                    2 if odd && genus == 0 => {
                        next.insert((1, true));
                    }
                    2 => {}
                    3 => {
                        next.insert((2, true));
                        next.insert((2, false));
                    }
                    _ => {
                        next.insert((k - 1, true));
                    }
                }
            }
            states = next;
        }
        if states.is_empty() {
            r.push(
                Rule::ParityCoherence,
                format!("no exceptional class can be blown down at level {level}"),
            );
            return;
        }
    }
    let ok = if hi.is_surface() {
        let odd = hi.b().unwrap_or(0).rem_euclid(2) == 1;
        if data.twist {
            genus == 0 && !odd && states.contains(&(2, false)) && lo.b().unwrap_or(1).rem_euclid(2) == 0
        } else {
            states.contains(&(2, odd))
        }
    } else {
        states.contains(&(1, true))
    };
    if !ok {
        r.push(
            Rule::ParityCoherence,
            "the reduced space above the minimum cannot evolve into the one below the maximum",
        );
    }
}

/// Betti numbers `dim H⁰, …, dim H⁶` from the perfect Morse-Bott moment map.
pub fn betti_profile(data: &FixedPointData) -> [u64; 7] {
    let mut out = [0u64; 7];
    for c in &data.components {
        for (k, n) in c.poincare().into_iter().enumerate() {
            let d = c.index as usize + k;
            if d < 7 {
                out[d] += n;
            }
        }
    }
    out
}

fn is_sphere_extremum(c: &FixedComponent) -> bool {
    c.is_surface() && c.genus() == 0
}

/// Matches the shapes of the classification, in either orientation.
pub fn classify_type(data: &FixedPointData) -> Option<TypeTag> {
    if betti_profile(data)[2] >= 3 || !validate(data).is_valid() {
        return None;
    }
    classify_oriented(data).or_else(|| classify_oriented(&data.reversed()))
}

fn classify_oriented(data: &FixedPointData) -> Option<TypeTag> {
    let lo = data.min()?;
    let hi = data.max()?;
    let inner: Vec<&FixedComponent> = data.interior().into_iter().map(|i| data.component(i)).collect();
    let spheres2 = inner.iter().filter(|c| c.is_surface() && c.genus() == 0).count();
    let surfaces2 = inner.iter().filter(|c| c.is_surface()).count();
    let p2 = data.count_points(2);
    let p4 = data.count_points(4);
    let odd = |b: i64| b.rem_euclid(2) == 1;

    match (lo.kind.is_point(), hi.kind.is_point()) {
        (true, true) if inner.len() == 1 && spheres2 == 1 => Some(TypeTag::T1),
        (true, true) if inner.len() == 2 && spheres2 == 2 => {
            (inner[0].level != inner[1].level).then_some(TypeTag::T2)
        }
        (false, true)
            if is_sphere_extremum(lo) && inner.len() == 2 && spheres2 == 1 && p4 == 1 && odd(lo.b()?) =>
        {
            Some(TypeTag::T3)
        }
        (false, false) if !data.twist && inner.len() == 2 && p2 == 1 && p4 == 1 => {
            (is_sphere_extremum(lo) && lo.b()? == 1 && hi.b()? == 1).then_some(TypeTag::T5)
        }
        (false, false) if inner.is_empty() => {
            (data.twist && is_sphere_extremum(lo) && lo.b()? == 2 && hi.b()? == 2).then_some(TypeTag::T4)
        }
        (false, false) if inner.len() == 1 && surfaces2 == 1 => {
            let (n, m) = (lo.b()?, hi.b()?);
            let g = lo.genus() as i64;
            let g1 = inner[0].genus() as i64;
            if !data.twist {
                (m == -n - 2 * (1 + g1 - 2 * g)).then_some(TypeTag::T6a)
            } else {
                let spheres = g == 0 && g1 == 0;
                let branch = (n == 0 && !odd(m)) || (!odd(n) && n != 0 && m == 0);
                (spheres && branch).then_some(TypeTag::T6b)
            }
        }
        _ => None,
    }
}

/// Relative placement of the two interior components of types (3) and (5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    /// First-named component strictly lower.
    Forward,
    /// First-named component strictly higher.
    Backward,
    Simultaneous,
}

impl Order {
    pub const ALL: [Order; 3] = [Order::Forward, Order::Backward, Order::Simultaneous];

    fn levels(&self) -> (Q, Q) {
        match self {
            Order::Forward => (q(1), q(2)),
            Order::Backward => (q(2), q(1)),
            Order::Simultaneous => (q(1), q(1)),
        }
    }
}

/// Representatives of the classification, built with levels 0 < 1 ≤ 2 < 3.
pub mod table {
    use super::*;

    pub fn type1() -> FixedPointData {
        FixedPointData::new(
            vec![
                FixedComponent::point(0, q(0)),
                FixedComponent::surface_mid(0, q(1), Some((2, 2))),
                FixedComponent::point(6, q(2)),
            ],
            false,
        )
        .with_label(TypeTag::T1)
    }

    pub fn type2() -> FixedPointData {
        FixedPointData::new(
            vec![
                FixedComponent::point(0, q(0)),
                FixedComponent::surface_mid(0, q(1), Some((0, 1))),
                FixedComponent::surface_mid(0, q(2), Some((1, 0))),
                FixedComponent::point(6, q(3)),
            ],
            false,
        )
        .with_label(TypeTag::T2)
    }

    /// Sphere minimum with odd `n`; `order` places the index-2 sphere relative to the index-4 point.
    pub fn type3(n: i64, order: Order) -> FixedPointData {
        let (ls, lp) = order.levels();
        FixedPointData::new(
            vec![
                FixedComponent::surface_min(0, n, q(0)),
                FixedComponent::surface_mid(0, ls, Some((1, 1 - n))),
                FixedComponent::point(4, lp),
                FixedComponent::point(6, q(3)),
            ],
            false,
        )
        .with_label(TypeTag::T3)
    }

    pub fn type4() -> FixedPointData {
        FixedPointData::new(
            vec![FixedComponent::surface_min(0, 2, q(0)), FixedComponent::surface_max(0, 2, q(1))],
            true,
        )
        .with_label(TypeTag::T4)
    }

    /// `order` places the index-2 point relative to the index-4 point.
    pub fn type5(order: Order) -> FixedPointData {
        let (l2, l4) = order.levels();
        FixedPointData::new(
            vec![
                FixedComponent::surface_min(0, 1, q(0)),
                FixedComponent::point(2, l2),
                FixedComponent::point(4, l4),
                FixedComponent::surface_max(0, 1, q(3)),
            ],
            false,
        )
        .with_label(TypeTag::T5)
    }

    pub fn type6a(g: u32, g1: u32, n: i64) -> FixedPointData {
        let c = 1 + g1 as i64 - 2 * g as i64;
        FixedPointData::new(
            vec![
                FixedComponent::surface_min(g, n, q(0)),
                FixedComponent::surface_mid(g1, q(1), Some((n + 3 * c, c - n))),
                FixedComponent::surface_max(g, -n - 2 * c, q(2)),
            ],
            false,
        )
        .with_label(TypeTag::T6a)
    }

    /// Either `n_min = 0` and `n_max` even, or `n_min` even and `n_max = 0`.
    pub fn type6b(n_min: i64, n_max: i64) -> FixedPointData {
        let b_pm = if n_min == 0 { (1 - n_max, 1) } else { (1, 1 - n_min) };
        FixedPointData::new(
            vec![
                FixedComponent::surface_min(0, n_min, q(0)),
                FixedComponent::surface_mid(0, q(1), Some(b_pm)),
                FixedComponent::surface_max(0, n_max, q(2)),
            ],
            true,
        )
        .with_label(TypeTag::T6b)
    }
}

#[derive(Debug, Error)]
pub enum FpDataError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}` (expected `{FPDATA_SCHEMA}`)")]
    Schema(String),
    #[error("component {index}: field `{field}`: {message}")]
    Field {
        index: usize,
        field: &'static str,
        message: String,
    },
    #[error("unknown type label `{0}`")]
    Label(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawComponent {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    pub index: u8,
    pub level: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_plus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_minus: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFpData {
    pub schema: String,
    pub twist: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub components: Vec<RawComponent>,
}

impl From<&FixedComponent> for RawComponent {
    fn from(c: &FixedComponent) -> Self {
        let (kind, genus) = match c.kind {
            ComponentKind::Point => ("point", None),
            ComponentKind::Surface { genus } => ("surface", Some(genus)),
        };
        let (b, b_plus, b_minus) = match c.normal {
            NormalData::None => (None, None, None),
            NormalData::Extremal { b } => (Some(b), None, None),
            NormalData::Split { b_plus, b_minus } => (None, b_plus, b_minus),
        };
        RawComponent {
            kind: kind.to_string(),
            genus,
            index: c.index,
            level: format_q(&c.level),
            b,
            b_plus,
            b_minus,
        }
    }
}

impl RawComponent {
    fn into_component(self, index: usize) -> Result<FixedComponent, FpDataError> {
        let field = |field: &'static str, message: String| FpDataError::Field { index, field, message };
        let level = parse_q(&self.level).map_err(|e| field("level", e.to_string()))?;
        let kind = match self.kind.as_str() {
            "point" => {
                if self.genus.is_some() {
                    return Err(field("genus", "points carry no genus".into()));
                }
                ComponentKind::Point
            }
            "surface" => ComponentKind::Surface {
                genus: self.genus.ok_or_else(|| field("genus", "required for a surface".into()))?,
            },
            other => return Err(field("kind", format!("expected `point` or `surface`, got `{other}`"))),
        };
        let normal = match (kind, self.index) {
            (ComponentKind::Point, _) => {
                if self.b.or(self.b_plus).or(self.b_minus).is_some() {
                    return Err(field("b", "points carry no Chern numbers".into()));
                }
                NormalData::None
            }
            (ComponentKind::Surface { .. }, 2) => {
                if self.b.is_some() {
                    return Err(field("b", "index-2 surfaces use b_plus/b_minus".into()));
                }
                NormalData::Split {
                    b_plus: self.b_plus,
                    b_minus: self.b_minus,
                }
            }
            (ComponentKind::Surface { .. }, _) => {
                if self.b_plus.or(self.b_minus).is_some() {
                    return Err(field("b_plus", "extremal surfaces use b".into()));
                }
                NormalData::Extremal {
                    b: self.b.ok_or_else(|| field("b", "required for an extremal surface".into()))?,
                }
            }
        };
        Ok(FixedComponent {
            kind,
            index: self.index,
            level,
            normal,
        })
    }
}

impl FixedPointData {
    pub fn to_raw(&self) -> RawFpData {
        RawFpData {
            schema: FPDATA_SCHEMA.to_string(),
            twist: self.twist,
            label: self.label.map(|t| t.as_str().to_string()),
            components: self.components.iter().map(RawComponent::from).collect(),
        }
    }

    pub fn from_raw(raw: RawFpData) -> Result<Self, FpDataError> {
        if raw.schema != FPDATA_SCHEMA {
            return Err(FpDataError::Schema(raw.schema));
        }
        let label = match raw.label {
            Some(s) => Some(TypeTag::parse(&s).ok_or(FpDataError::Label(s))?),
            None => None,
        };
        let comps = raw
            .components
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.into_component(i))
            .collect::<Result<Vec<_>, _>>()?;
        let mut data = FixedPointData::new(comps, raw.twist);
        data.label = label;
        Ok(data)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, FpDataError> {
        let raw: RawFpData = serde_json::from_str(s)?;
        Self::from_raw(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::table::*;
    use super::*;

    #[test]
    fn betti_examples() {
        assert_eq!(betti_profile(&type1()), [1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(betti_profile(&type5(Order::Forward)), [1, 0, 2, 0, 2, 0, 1]);
        let mut pts = vec![FixedComponent::point(0, q(0)), FixedComponent::point(6, q(3))];
        for _ in 0..3 {
            pts.push(FixedComponent::point(2, q(1)));
            pts.push(FixedComponent::point(4, q(2)));
        }
        assert_eq!(betti_profile(&FixedPointData::new(pts, false)), [1, 0, 3, 0, 3, 0, 1]);
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&type1()).is_valid());
        let bad = FixedPointData::new(
            vec![
                FixedComponent::point(0, q(0)),
                FixedComponent::point(2, q(1)),
                FixedComponent::point(6, q(2)),
            ],
            false,
        );
        assert!(validate(&bad).has(Rule::PointPairing));
        let bad = FixedPointData::new(
            vec![FixedComponent::surface_min(0, 0, q(0)), FixedComponent::surface_max(0, 1, q(1))],
            false,
        );
        assert!(validate(&bad).has(Rule::ParityCoherence));
    }

    #[test]
    fn shared_level_rules() {
        let mut d = type2();
        d.components[2].level = q(1);
        let d = FixedPointData::new(d.components, false);
        assert!(validate(&d).has(Rule::SameLevelSurfaces));
        assert_eq!(classify_type(&d), None);
        for o in Order::ALL {
            assert_eq!(classify_type(&type5(o)), Some(TypeTag::T5));
            assert_eq!(classify_type(&type3(1, o)), Some(TypeTag::T3));
        }
    }

    #[test]
    fn classify_table_and_reversal() {
        let all = [
            type1(),
            type2(),
            type3(3, Order::Forward),
            type4(),
            type5(Order::Simultaneous),
            type6a(1, 2, -3),
            type6b(0, 4),
            type6b(-2, 0),
        ];
        for d in all {
            assert!(validate(&d).is_valid(), "{d}: {}", validate(&d));
            assert_eq!(classify_type(&d), d.label, "{d}");
            assert_eq!(classify_type(&d.reversed()), d.label, "reversed {d}");
        }
        let mut t4 = type4();
        t4.twist = false;
        assert_eq!(classify_type(&t4), None);
    }

    #[test]
    fn unclassified_example3() {
        let d = FixedPointData::new(
            vec![
                FixedComponent::surface_min(0, 0, q(0)),
                FixedComponent::surface_mid(0, q(1), None),
                FixedComponent::surface_mid(0, q(1), None),
                FixedComponent::surface_max(0, 0, q(2)),
            ],
            false,
        );
        assert_eq!(betti_profile(&d)[2], 3);
        assert_eq!(classify_type(&d), None);
    }

    #[test]
    fn json_round_trip() {
        let d = type6a(1, 0, 2);
        let back = FixedPointData::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let bad = d.to_json().replace("fpdata.v1", "fpdata.v9");
        assert!(matches!(FixedPointData::from_json(&bad), Err(FpDataError::Schema(_))));
    }
}

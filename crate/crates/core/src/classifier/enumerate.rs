//! Bounded exhaustive search over fixed-point data with `dim H² < 3`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{unique_chain, ClassifierError};
use crate::fpdata::{
    betti_profile, classify_type, validate, FixedComponent, FixedPointData, RawFpData, Rule, TypeTag,
};
use crate::localization::{chern_relations_hold, complete_normal_data, dh_feasible, solve_restriction_table};
use crate::rational::q;

pub const FAMILIES_SCHEMA: &str = "families.v1";

/// First check a candidate fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exclusion {
    DimH2,
    Invalid(Rule),
    NoChain,
    AmbiguousChain,
    ChernRelations,
    Localization,
    DhPositivity,
    Unclassified,
}

impl Exclusion {
    pub fn key(&self) -> String {
        match self {
            Exclusion::DimH2 => "dim_h2".into(),
            Exclusion::Invalid(r) => format!("invalid:{}", snake(&format!("{r:?}"))),
            Exclusion::NoChain => "no_chain".into(),
            Exclusion::AmbiguousChain => "ambiguous_chain".into(),
            Exclusion::ChernRelations => "chern_relations".into(),
            Exclusion::Localization => "localization".into(),
            Exclusion::DhPositivity => "dh_positivity".into(),
            Exclusion::Unclassified => "unclassified".into(),
        }
    }
}

fn snake(s: &str) -> String {
    let mut out = String::new();
    for (i, ch) in s.chars().enumerate() {
        if ch.is_uppercase() && i > 0 {
            out.push('_');
        }
        out.extend(ch.to_lowercase());
    }
    out
}

/// Runs every consistency check on one candidate and returns its family.
pub fn screen(data: &FixedPointData) -> Result<(TypeTag, FixedPointData), Exclusion> {
    if betti_profile(data)[2] >= 3 {
        return Err(Exclusion::DimH2);
    }
    if let Some(v) = validate(data).violations.first() {
        return Err(Exclusion::Invalid(v.rule));
    }
    match unique_chain(data) {
        Ok(_) => {}
        Err(ClassifierError::Ambiguous(_)) => return Err(Exclusion::AmbiguousChain),
        Err(_) => return Err(Exclusion::NoChain),
    }
    let full = complete_normal_data(data).map_err(|_| Exclusion::NoChain)?;
    if !chern_relations_hold(&full).unwrap_or(false) {
        return Err(Exclusion::ChernRelations);
    }
    if solve_restriction_table(&full).is_err() {
        return Err(Exclusion::Localization);
    }
    if full.all_surfaces() && !dh_feasible(&full).unwrap_or(false) {
        return Err(Exclusion::DhPositivity);
    }
    classify_type(&full).map(|t| (t, full)).ok_or(Exclusion::Unclassified)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub tag: TypeTag,
    pub members: Vec<FixedPointData>,
    /// Every member matches the closed form of its type in one orientation.
    pub closed_form_holds: bool,
}

impl Family {
    pub fn constraint(&self) -> &'static str {
        match self.tag {
            TypeTag::T1 => "isolated extrema; one index-2 sphere with b+ = b- = 2",
            TypeTag::T2 => "isolated extrema; two index-2 spheres on distinct levels, (b+, b-) = (0, 1) then (1, 0)",
            TypeTag::T3 => "sphere minimum with odd b_min = n; index-2 sphere with (b+, b-) = (1, 1 - n); one index-4 point; isolated maximum",
            TypeTag::T4 => "two spheres, b_min = b_max = 2, twisted",
            TypeTag::T5 => "two spheres, b_min = b_max = 1; one index-2 and one index-4 point",
            TypeTag::T6a => "surfaces of genus g, g1, g; b_max = -n - 2(1 + g1 - 2g); (b+, b-) = (n + 3(1 + g1 - 2g), (1 + g1 - 2g) - n)",
            TypeTag::T6b => "three spheres, twisted; b_min = 0 and b_max even, or b_min even and nonzero and b_max = 0",
        }
    }

    /// Distinct values of each parameter over the members, in the orientation of the closed form.
    pub fn parameters(&self) -> BTreeMap<String, BTreeSet<i64>> {
        let mut out: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
        for m in &self.members {
            let d = oriented(self.tag, m).unwrap_or_else(|| m.clone());
            if let Some(b) = d.b_min() {
                out.entry("b_min".into()).or_default().insert(b);
            }
            if let Some(b) = d.b_max() {
                out.entry("b_max".into()).or_default().insert(b);
            }
            if let Some(c) = d.min().filter(|c| c.is_surface()) {
                out.entry("g".into()).or_default().insert(c.genus() as i64);
            }
            for i in d.index2_surfaces() {
                out.entry("g1".into()).or_default().insert(d.component(i).genus() as i64);
            }
        }
        out
    }
}

/// `data` or its reverse, whichever matches the closed form of `tag`.
pub fn oriented(tag: TypeTag, data: &FixedPointData) -> Option<FixedPointData> {
    [data.clone(), data.reversed()].into_iter().find(|d| closed_form(tag, d))
}

fn split(d: &FixedPointData) -> Vec<(i64, i64)> {
    d.index2_surfaces()
        .into_iter()
        .filter_map(|i| d.component(i).b_pm())
        .collect()
}

fn closed_form(tag: TypeTag, d: &FixedPointData) -> bool {
    let (Some(lo), Some(hi)) = (d.min(), d.max()) else {
        return false;
    };
    let sp = split(d);
    let odd = |b: i64| b.rem_euclid(2) == 1;
    match tag {
        TypeTag::T1 => lo.kind.is_point() && hi.kind.is_point() && sp == [(2, 2)],
        TypeTag::T2 => lo.kind.is_point() && hi.kind.is_point() && sp == [(0, 1), (1, 0)],
        TypeTag::T3 => {
            let Some(n) = lo.b() else { return false };
            let sphere = d.index2_surfaces().first().map(|&i| d.component(i).level.clone());
            let point = (0..d.len())
                .find(|&i| d.component(i).kind.is_point() && d.component(i).index == 4)
                .map(|i| d.component(i).level.clone());
            let below = matches!((sphere, point), (Some(s), Some(p)) if s < p);
            hi.kind.is_point() && odd(n) && sp == [(1, 1 - n)] && (below || n == 1)
        }
        TypeTag::T4 => d.twist && lo.b() == Some(2) && hi.b() == Some(2) && d.len() == 2,
        TypeTag::T5 => !d.twist && lo.genus() == 0 && lo.b() == Some(1) && hi.b() == Some(1),
        TypeTag::T6a => {
            let (Some(n), Some(m)) = (lo.b(), hi.b()) else { return false };
            let g = lo.genus() as i64;
            let Some(&mid) = d.index2_surfaces().first() else { return false };
            let c = 1 + d.component(mid).genus() as i64 - 2 * g;
            !d.twist && m == -n - 2 * c && sp == [(n + 3 * c, c - n)]
        }
        TypeTag::T6b => {
            let (Some(n), Some(m)) = (lo.b(), hi.b()) else { return false };
            let branch = if n == 0 {
                !odd(m) && sp == [(1 - m, 1)]
            } else {
                !odd(n) && m == 0 && sp == [(1, 1 - n)]
            };
            d.twist && branch
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamiliesReport {
    pub max_genus: u32,
    pub b_lo: i64,
    pub b_hi: i64,
    pub candidates: usize,
    pub families: Vec<Family>,
    pub exclusions: BTreeMap<Exclusion, usize>,
}

impl FamiliesReport {
    /// Type numbers present; `6a` and `6b` both count as 6.
    pub fn type_numbers(&self) -> BTreeSet<u8> {
        self.families.iter().map(|f| f.tag.number()).collect()
    }

    pub fn family(&self, tag: TypeTag) -> Option<&Family> {
        self.families.iter().find(|f| f.tag == tag)
    }

    pub fn contains(&self, data: &FixedPointData) -> bool {
        let key = shape_key(data);
        self.families.iter().flat_map(|f| &f.members).any(|m| shape_key(m) == key)
    }
}

/// Components without the `(b₊, b₋)` filled in by the chain, for membership tests.
fn shape_key(d: &FixedPointData) -> (Vec<FixedComponent>, bool) {
    let comps = d
        .components()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            if c.index == 2 && c.is_surface() {
                c.normal = crate::fpdata::NormalData::Split {
                    b_plus: None,
                    b_minus: None,
                };
            }
            c
        })
        .collect();
    (comps, d.twist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Surface(u32),
    Up,
    Down,
}

impl Item {
    fn component(&self, level: i64) -> FixedComponent {
        match self {
            Item::Surface(g) => FixedComponent::surface_mid(*g, q(level), None),
            Item::Up => FixedComponent::point(2, q(level)),
            Item::Down => FixedComponent::point(4, q(level)),
        }
    }
}

/// Assignments of levels `1..=k` to `items`, surjective, up to swapping equal items.
fn weak_orders(items: &[Item]) -> Vec<Vec<(Item, i64)>> {
    let n = items.len();
    let mut seen: BTreeSet<Vec<(i64, Item)>> = BTreeSet::new();
    let mut out = Vec::new();
    for k in 1..=n.max(1) {
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut levels = Vec::with_capacity(n);
            for _ in 0..n {
                levels.push((c % k) as i64 + 1);
                c /= k;
            }
            let used: BTreeSet<i64> = levels.iter().copied().collect();
            if used.len() != k {
                continue;
            }
            let mut key: Vec<(i64, Item)> = levels.iter().copied().zip(items.iter().copied()).collect();
            key.sort();
            if seen.insert(key.clone()) {
                out.push(key.into_iter().map(|(l, i)| (i, l)).collect());
            }
        }
        if n == 0 {
            break;
        }
    }
    if n == 0 {
        out.push(Vec::new());
    }
    out
}

fn extremum(kind: Option<u32>, is_min: bool, b: i64, level: i64) -> FixedComponent {
    match (kind, is_min) {
        (None, true) => FixedComponent::point(0, q(level)),
        (None, false) => FixedComponent::point(6, q(level)),
        (Some(g), true) => FixedComponent::surface_min(g, b, q(level)),
        (Some(g), false) => FixedComponent::surface_max(g, b, q(level)),
    }
}

const SHAPE_RULES: [Rule; 5] = [
    Rule::ComponentShape,
    Rule::Extrema,
    Rule::GenusMatch,
    Rule::MinimumSphere,
    Rule::PointPairing,
];

/// Every candidate with extremal genus at most `max_genus`, extremal Chern numbers in
/// `b_lo..=b_hi`, at most two index-2 surfaces, two index-2 points and three index-4 points.
pub fn enumerate_types(max_genus: u32, b_lo: i64, b_hi: i64) -> FamiliesReport {
    let mut exclusions: BTreeMap<Exclusion, usize> = BTreeMap::new();
    let mut found: BTreeMap<TypeTag, Vec<FixedPointData>> = BTreeMap::new();
    let mut candidates = 0;
    let kinds: Vec<Option<u32>> = std::iter::once(None).chain((0..=max_genus).map(Some)).collect();
    let genera: Vec<Vec<u32>> = {
        let mut v = vec![vec![]];
        for a in 0..=max_genus {
            v.push(vec![a]);
            for b in a..=max_genus {
                v.push(vec![a, b]);
            }
        }
        v
    };
    for &lo in &kinds {
        for &hi in &kinds {
            for gs in &genera {
                for n2 in 0..=2usize {
                    for n4 in 0..=3usize {
                        let mut items: Vec<Item> = gs.iter().map(|&g| Item::Surface(g)).collect();
                        items.extend(std::iter::repeat(Item::Up).take(n2));
                        items.extend(std::iter::repeat(Item::Down).take(n4));
                        let top = items.len() as i64 + 1;
                        let mut comps = vec![extremum(lo, true, 0, 0), extremum(hi, false, 0, top)];
                        comps.extend(items.iter().enumerate().map(|(i, it)| it.component(i as i64 + 1)));
                        // shapes failing here are counted once, whatever their Chern numbers and levels
                        let shape = FixedPointData::new(comps, false);
                        let early = if betti_profile(&shape)[2] >= 3 {
                            Some(Exclusion::DimH2)
                        } else {
                            validate(&shape)
                                .violations
                                .iter()
                                .find(|v| SHAPE_RULES.contains(&v.rule))
                                .map(|v| Exclusion::Invalid(v.rule))
                        };
                        if let Some(e) = early {
                            candidates += 1;
                            *exclusions.entry(e).or_default() += 1;
                            continue;
                        }
                        let b_los: Vec<i64> = if lo.is_some() { (b_lo..=b_hi).collect() } else { vec![0] };
                        let b_his: Vec<i64> = if hi.is_some() { (b_lo..=b_hi).collect() } else { vec![0] };
                        let orders = weak_orders(&items);
                        for &bl in &b_los {
                            for &bh in &b_his {
                                for twist in [false, true] {
                                    for order in &orders {
                                        let top = order.iter().map(|&(_, l)| l).max().unwrap_or(0) + 1;
                                        let mut comps = vec![extremum(lo, true, bl, 0), extremum(hi, false, bh, top)];
                                        comps.extend(order.iter().map(|(it, l)| it.component(*l)));
                                        let data = FixedPointData::new(comps, twist);
                                        candidates += 1;
                                        match screen(&data) {
                                            Ok((tag, full)) => found.entry(tag).or_default().push(full.with_label(tag)),
                                            Err(e) => *exclusions.entry(e).or_default() += 1,
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let families = found
        .into_iter()
        .map(|(tag, members)| {
            let closed_form_holds = members.iter().all(|m| oriented(tag, m).is_some());
            Family {
                tag,
                members,
                closed_form_holds,
            }
        })
        .collect();
    FamiliesReport {
        max_genus,
        b_lo,
        b_hi,
        candidates,
        families,
        exclusions,
    }
}

// ---------------------------------------------------------------------------
// families.v1

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFamily {
    pub tag: TypeTag,
    #[serde(rename = "type")]
    pub type_number: u8,
    pub constraint: String,
    pub count: usize,
    pub closed_form_holds: bool,
    pub parameters: BTreeMap<String, Vec<i64>>,
    pub witnesses: Vec<RawFpData>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFamilies {
    pub schema: String,
    pub max_genus: u32,
    pub b_range: [i64; 2],
    pub candidates: usize,
    pub families: Vec<RawFamily>,
    pub exclusions: BTreeMap<String, usize>,
}

const WITNESSES: usize = 3;

impl FamiliesReport {
    pub fn to_raw(&self) -> RawFamilies {
        RawFamilies {
            schema: FAMILIES_SCHEMA.into(),
            max_genus: self.max_genus,
            b_range: [self.b_lo, self.b_hi],
            candidates: self.candidates,
            families: self
                .families
                .iter()
                .map(|f| RawFamily {
                    tag: f.tag,
                    type_number: f.tag.number(),
                    constraint: f.constraint().into(),
                    count: f.members.len(),
                    closed_form_holds: f.closed_form_holds,
                    parameters: f
                        .parameters()
                        .into_iter()
                        .map(|(k, v)| (k, v.into_iter().collect()))
                        .collect(),
                    witnesses: f.members.iter().take(WITNESSES).map(|m| m.to_raw()).collect(),
                })
                .collect(),
            exclusions: self.exclusions.iter().map(|(k, v)| (k.key(), *v)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("plain data serializes")
    }

    /// One line per family followed by the exclusion counts.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{} candidates, genus <= {}, b in [{}, {}]\n",
            self.candidates, self.max_genus, self.b_lo, self.b_hi
        );
        for f in &self.families {
            s.push_str(&format!(
                "{:<5} {:>6} members  {}{}\n",
                f.tag.to_string(),
                f.members.len(),
                f.constraint(),
                if f.closed_form_holds { "" } else { "  [closed form violated]" }
            ));
        }
        for (k, v) in &self.exclusions {
            s.push_str(&format!("excluded {:<28} {v}\n", k.key()));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_small_multisets() {
        assert_eq!(weak_orders(&[]).len(), 1);
        assert_eq!(weak_orders(&[Item::Up, Item::Up]).len(), 2);
        // a < b, b < a, a = b
        assert_eq!(weak_orders(&[Item::Up, Item::Down]).len(), 3);
        assert_eq!(weak_orders(&[Item::Up, Item::Down, Item::Down]).len(), 8);
    }

    #[test]
    fn snake_keys() {
        assert_eq!(Exclusion::Invalid(Rule::PointPairing).key(), "invalid:point_pairing");
        assert_eq!(Exclusion::DimH2.key(), "dim_h2");
    }
}

//! Three-dimensional lattice polytopes and the circle generated by the third
//! coordinate.
//!
//! A polytope is `{v : ⟨nᵢ, v⟩ ≥ cᵢ}` with primitive inward normals. Vertices
//! are torus-fixed points, horizontal edges are fixed spheres of the circle,
//! and horizontal slices are the moment polygons of the reduced spaces.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpdata::{FixedComponent, FixedPointData, FpDataError};
use crate::linalg;
use crate::rational::{format_q, gcd_i64, parse_q, q, Q};

pub const POLYTOPE_SCHEMA: &str = "polytope.v1";

pub type Vec3 = [i64; 3];

#[derive(Debug, Error)]
pub enum DelzantError {
    #[error("need at least 4 facets, got {0}")]
    TooFewFacets(usize),
    #[error("facet {0}: normal is zero or not primitive")]
    NotPrimitive(usize),
    #[error("the facets bound no vertex")]
    NoVertices,
    #[error("unbounded: the edge from vertex {0} along facets {1} and {2} has no end")]
    Unbounded(usize, usize, usize),
    #[error("non-simple vertex {0}: lies on {1} facets")]
    NonSimple(String, usize),
    #[error("edge {0} is not horizontal")]
    NotHorizontal(usize),
    #[error("not semi-free: {0}")]
    NotSemifree(String),
    #[error("level {0} is not strictly between the extreme levels")]
    LevelOutOfRange(String),
    #[error("twist is undefined unless both extrema are fixed spheres")]
    TwistInapplicable,
    #[error("slice fans differ across levels")]
    FanChanged,
    #[error("unknown built-in polytope `{0}`")]
    UnknownBuiltin(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}` (expected `{POLYTOPE_SCHEMA}`)")]
    Schema(String),
    #[error("facet {0}: {1}")]
    Field(usize, String),
    #[error(transparent)]
    FpData(#[from] FpDataError),
}

pub type Result<T> = std::result::Result<T, DelzantError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec3,
    pub offset: Q,
}

impl Facet {
    pub fn new(normal: Vec3, offset: i64) -> Self {
        Facet { normal, offset: q(offset) }
    }

    fn slack(&self, v: &[Q; 3]) -> Q {
        dot_q(&self.normal, v) - &self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub point: [Q; 3],
    /// Sorted.
    pub facets: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub ends: (usize, usize),
    pub facets: (usize, usize),
    /// Primitive, pointing from `ends.0` to `ends.1`.
    pub direction: Vec3,
}

impl Edge {
    pub fn is_horizontal(&self) -> bool {
        self.direction[2] == 0
    }

    /// Primitive direction leaving vertex `v`.
    pub fn direction_from(&self, v: usize) -> Vec3 {
        if v == self.ends.0 {
            self.direction
        } else {
            neg(&self.direction)
        }
    }

    fn other_end(&self, v: usize) -> usize {
        if v == self.ends.0 {
            self.ends.1
        } else {
            self.ends.0
        }
    }

    fn has_facets(&self, a: usize, b: usize) -> bool {
        self.facets == (a.min(b), a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    pub facets: Vec<Facet>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

fn dot_q(n: &Vec3, v: &[Q; 3]) -> Q {
    n.iter().zip(v).map(|(a, x)| x * q(*a)).sum()
}

fn dot(a: &Vec3, b: &Vec3) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn neg(a: &Vec3) -> Vec3 {
    [-a[0], -a[1], -a[2]]
}

fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> i64 {
    dot(a, &cross(b, c))
}

fn primitive(v: Vec3) -> Vec3 {
    let g = gcd_i64(gcd_i64(v[0], v[1]), v[2]);
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g, v[2] / g]
    }
}

fn format_point(p: &[Q; 3]) -> String {
    format!("({}, {}, {})", format_q(&p[0]), format_q(&p[1]), format_q(&p[2]))
}

/// Vertices from triple intersections, edges by walking from each vertex.
pub fn build(facets: Vec<Facet>) -> Result<LatticePolytope> {
    if facets.len() < 4 {
        return Err(DelzantError::TooFewFacets(facets.len()));
    }
    for (i, f) in facets.iter().enumerate() {
        if primitive(f.normal) != f.normal || f.normal == [0, 0, 0] {
            return Err(DelzantError::NotPrimitive(i));
        }
    }
    let n = facets.len();
    let mut points: Vec<[Q; 3]> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&facets[i], &facets[j], &facets[k]);
                if det3(&a.normal, &b.normal, &c.normal) == 0 {
                    continue;
                }
                let m: Vec<Vec<Q>> =
                    [a, b, c].iter().map(|f| f.normal.iter().map(|&x| q(x)).collect()).collect();
                let rhs = vec![a.offset.clone(), b.offset.clone(), c.offset.clone()];
                let sol = linalg::solve(&m, &rhs).expect("independent normals");
                let p = [sol.particular[0].clone(), sol.particular[1].clone(), sol.particular[2].clone()];
                if facets.iter().all(|f| !f.slack(&p).is_negative()) && !points.contains(&p) {
                    points.push(p);
                }
            }
        }
    }
    if points.is_empty() {
        return Err(DelzantError::NoVertices);
    }
    points.sort();
    let mut vertices = Vec::new();
    for p in points {
        let tight: Vec<usize> = (0..n).filter(|&i| facets[i].slack(&p).is_zero()).collect();
        if tight.len() != 3 {
            return Err(DelzantError::NonSimple(format_point(&p), tight.len()));
        }
        vertices.push(Vertex { point: p, facets: [tight[0], tight[1], tight[2]] });
    }
    let mut edges: Vec<Edge> = Vec::new();
    for (vi, v) in vertices.iter().enumerate() {
        for skip in 0..3 {
            let k = v.facets[skip];
            let others: Vec<usize> = v.facets.iter().copied().filter(|&f| f != k).collect();
            let (i, j) = (others[0], others[1]);
            let mut d = cross(&facets[i].normal, &facets[j].normal);
            if dot(&facets[k].normal, &d) < 0 {
                d = neg(&d);
            }
            let d = primitive(d);
            let mut t: Option<Q> = None;
            for (l, f) in facets.iter().enumerate() {
                let rate = dot(&f.normal, &d);
                if l == i || l == j || rate >= 0 {
                    continue;
                }
                let s = f.slack(&v.point) / q(-rate);
                if t.as_ref().is_none_or(|t| &s < t) {
                    t = Some(s);
                }
            }
            let t = t.ok_or(DelzantError::Unbounded(vi, i, j))?;
            let w: [Q; 3] = std::array::from_fn(|c| &v.point[c] + &t * q(d[c]));
            let wi = vertices.iter().position(|u| u.point == w).expect("edge ends at a vertex");
            if wi > vi {
                edges.push(Edge { ends: (vi, wi), facets: (i, j), direction: d });
            }
        }
    }
    Ok(LatticePolytope { facets, vertices, edges })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelzantReport {
    /// Determinant of the three facet normals at each vertex.
    pub determinants: Vec<i64>,
}

impl DelzantReport {
    pub fn is_delzant(&self) -> bool {
        self.determinants.iter().all(|d| d.abs() == 1)
    }
}

pub fn delzant_check(p: &LatticePolytope) -> DelzantReport {
    let determinants = p
        .vertices
        .iter()
        .map(|v| {
            let [a, b, c] = v.facets.map(|f| p.facets[f].normal);
            det3(&a, &b, &c)
        })
        .collect();
    DelzantReport { determinants }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SemifreeReport {
    pub failures: Vec<String>,
}

impl SemifreeReport {
    pub fn is_semifree(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn semifree_check(p: &LatticePolytope) -> SemifreeReport {
    let mut failures = Vec::new();
    for (i, f) in p.facets.iter().enumerate() {
        let [m, n, _] = f.normal;
        if m == 0 && n == 0 {
            failures.push(format!("facet {i} is horizontal"));
        } else if gcd_i64(m, n) != 1 {
            failures.push(format!("facet {i}: gcd({m}, {n}) = {}", gcd_i64(m, n)));
        }
    }
    for (i, e) in p.edges.iter().enumerate() {
        if e.direction[2].abs() > 1 {
            failures.push(format!("edge {i}: direction {:?} has |p'| > 1", e.direction));
        }
    }
    SemifreeReport { failures }
}

impl LatticePolytope {
    pub fn edges_at(&self, v: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.ends.0 == v || e.ends.1 == v)
    }

    /// The edge at `v` lying on facets `a` and `b`.
    fn edge_between(&self, v: usize, a: usize, b: usize) -> &Edge {
        self.edges_at(v).map(|(_, e)| e).find(|e| e.has_facets(a, b)).expect("simple vertex")
    }

    /// Isotropy weights at `v`: third coordinates of the outgoing edge directions.
    pub fn weights(&self, v: usize) -> Vec<i64> {
        self.edges_at(v).map(|(_, e)| e.direction_from(v)[2]).collect()
    }

    pub fn level(&self, v: usize) -> &Q {
        &self.vertices[v].point[2]
    }

    pub fn horizontal_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].is_horizontal()).collect()
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.edges_at(v).all(|(_, e)| !e.is_horizontal()))
            .collect()
    }

    pub fn level_range(&self) -> (Q, Q) {
        let zs = self.vertices.iter().map(|v| &v.point[2]);
        (zs.clone().min().unwrap().clone(), zs.max().unwrap().clone())
    }

    /// Distinct vertex levels, increasing.
    pub fn critical_levels(&self) -> Vec<Q> {
        let mut zs: Vec<Q> = self.vertices.iter().map(|v| v.point[2].clone()).collect();
        zs.sort();
        zs.dedup();
        zs
    }
}

/// The line subbundle of a fixed sphere's normal bundle tangent to one facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalLine {
    pub facet: usize,
    /// Self-intersection of the sphere inside the facet's toric surface.
    pub degree: i64,
    pub weight: i64,
}

fn normal_line(p: &LatticePolytope, e: &Edge, facet: usize, from: usize) -> NormalLine {
    let to = e.other_end(from);
    let third = |v: usize| {
        let fs = p.vertices[v].facets;
        *fs.iter().find(|&&f| f != e.facets.0 && f != e.facets.1).unwrap()
    };
    let a = p.edge_between(from, facet, third(from)).direction_from(from);
    let b = p.edge_between(to, facet, third(to)).direction_from(to);
    let u = e.direction_from(from);
    // b - a = -d u inside the facet
    let diff = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    assert_eq!(cross(&diff, &u), [0, 0, 0], "smooth facet");
    NormalLine { facet, degree: -dot(&diff, &u) / dot(&u, &u), weight: a[2] }
}

/// The two normal lines of a horizontal edge, in the order of `edge.facets`.
pub fn normal_lines(p: &LatticePolytope, edge: usize) -> Result<[NormalLine; 2]> {
    let e = &p.edges[edge];
    if !e.is_horizontal() {
        return Err(DelzantError::NotHorizontal(edge));
    }
    Ok([normal_line(p, e, e.facets.0, e.ends.0), normal_line(p, e, e.facets.1, e.ends.0)])
}

/// Self-intersections `(d₁, d₂)` of a horizontal edge in its two facets.
pub fn edge_normal_degrees(p: &LatticePolytope, edge: usize) -> Result<(i64, i64)> {
    let [a, b] = normal_lines(p, edge)?;
    Ok((a.degree, b.degree))
}

/// Same computation walking the edge from its other end.
pub fn edge_normal_degrees_reversed(p: &LatticePolytope, edge: usize) -> Result<(i64, i64)> {
    let e = &p.edges[edge];
    if !e.is_horizontal() {
        return Err(DelzantError::NotHorizontal(edge));
    }
    Ok((
        normal_line(p, e, e.facets.0, e.ends.1).degree,
        normal_line(p, e, e.facets.1, e.ends.1).degree,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceEdge {
    pub normal: [i64; 2],
    pub offset: Q,
    pub facet: usize,
}

/// Edges in counterclockwise order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicePolygon {
    pub level: Q,
    pub edges: Vec<SliceEdge>,
    pub vertices: Vec<[Q; 2]>,
}

impl SlicePolygon {
    /// Consecutive edge normals form lattice bases.
    pub fn is_delzant(&self) -> bool {
        let n = self.edges.len();
        (0..n).all(|i| {
            let (a, b) = (self.edges[i].normal, self.edges[(i + 1) % n].normal);
            (a[0] * b[1] - a[1] * b[0]).abs() == 1
        })
    }

    pub fn fan(&self) -> Vec<[i64; 2]> {
        self.edges.iter().map(|e| e.normal).collect()
    }
}

fn half_plane(n: [i64; 2]) -> u8 {
    if n[1] > 0 || (n[1] == 0 && n[0] > 0) {
        0
    } else {
        1
    }
}

/// Counterclockwise order of directions starting from the positive x-axis.
fn angle_cmp(a: [i64; 2], b: [i64; 2]) -> std::cmp::Ordering {
    half_plane(a).cmp(&half_plane(b)).then_with(|| 0.cmp(&(a[0] * b[1] - a[1] * b[0])))
}

pub fn slice_polygon(p: &LatticePolytope, z: &Q) -> Result<SlicePolygon> {
    let (lo, hi) = p.level_range();
    if z <= &lo || z >= &hi {
        return Err(DelzantError::LevelOutOfRange(format_q(z)));
    }
    let half: Vec<SliceEdge> = p
        .facets
        .iter()
        .enumerate()
        .filter(|(_, f)| f.normal[0] != 0 || f.normal[1] != 0)
        .map(|(i, f)| SliceEdge {
            normal: [f.normal[0], f.normal[1]],
            offset: &f.offset - z * q(f.normal[2]),
            facet: i,
        })
        .collect();
    let inside = |pt: &[Q; 2]| {
        half.iter().all(|h| !(pt[0].clone() * q(h.normal[0]) + &pt[1] * q(h.normal[1]) - &h.offset).is_negative())
    };
    let mut edges: Vec<SliceEdge> = Vec::new();
    let mut corners: Vec<[Q; 2]> = Vec::new();
    for (i, a) in half.iter().enumerate() {
        let mut on: Vec<[Q; 2]> = Vec::new();
        for (j, b) in half.iter().enumerate() {
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if i == j || det == 0 {
                continue;
            }
            let d = q(det);
            let x = (&a.offset * q(b.normal[1]) - &b.offset * q(a.normal[1])) / &d;
            let y = (&b.offset * q(a.normal[0]) - &a.offset * q(b.normal[0])) / &d;
            let pt = [x, y];
            if inside(&pt) && !on.contains(&pt) {
                on.push(pt);
            }
        }
        if on.len() == 2 {
            edges.push(a.clone());
            for pt in on {
                if !corners.contains(&pt) {
                    corners.push(pt);
                }
            }
        }
    }
    edges.sort_by(|a, b| angle_cmp(a.normal, b.normal));
    let mut vertices = Vec::new();
    let n = edges.len();
    for i in 0..n {
        let (a, b) = (&edges[i], &edges[(i + 1) % n]);
        let d = q(a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0]);
        let x = (&a.offset * q(b.normal[1]) - &b.offset * q(a.normal[1])) / &d;
        let y = (&b.offset * q(a.normal[0]) - &a.offset * q(b.normal[0])) / &d;
        vertices.push([x, y]);
    }
    Ok(SlicePolygon { level: z.clone(), edges, vertices })
}

/// Whether divisors of fan rays `a` and `b` are homologous on the toric surface of `fan`.
fn homologous(fan: &[[i64; 2]], a: [i64; 2], b: [i64; 2]) -> Result<bool> {
    let ia = fan.iter().position(|&v| v == a).ok_or(DelzantError::FanChanged)?;
    let ib = fan.iter().position(|&v| v == b).ok_or(DelzantError::FanChanged)?;
    if ia == ib {
        return Ok(true);
    }
    // D_a - D_b lies in the span of Σ ⟨m, νᵢ⟩ Dᵢ
    let rows: Vec<Vec<Q>> = fan.iter().map(|v| vec![q(v[0]), q(v[1])]).collect();
    let mut target = vec![Q::zero(); fan.len()];
    target[ia] = Q::one();
    target[ib] = -Q::one();
    Ok(linalg::solve(&rows, &target).is_some())
}

fn extremal_edge(p: &LatticePolytope, level: &Q) -> Option<usize> {
    p.horizontal_edges().into_iter().find(|&e| p.level(p.edges[e].ends.0) == level)
}

/// Slice normal of a facet meeting an extremal edge at one endpoint only.
fn fiber_ray(p: &LatticePolytope, edge: usize) -> [i64; 2] {
    let e = &p.edges[edge];
    let f = p.vertices[e.ends.0].facets;
    let short = *f.iter().find(|&&x| x != e.facets.0 && x != e.facets.1).unwrap();
    let n = p.facets[short].normal;
    [n[0], n[1]]
}

/// Whether the fiber classes near the two extremal spheres differ.
pub fn detect_twist(p: &LatticePolytope) -> Result<bool> {
    let levels = p.critical_levels();
    let (lo, hi) = (&levels[0], &levels[levels.len() - 1]);
    let (Some(emin), Some(emax)) = (extremal_edge(p, lo), extremal_edge(p, hi)) else {
        return Err(DelzantError::TwistInapplicable);
    };
    if !p.isolated_vertices().is_empty() {
        return Err(DelzantError::TwistInapplicable);
    }
    // slices across an index-2 sphere keep their fan; only the facet behind each ray changes
    let mut fan: Option<Vec<[i64; 2]>> = None;
    for w in levels.windows(2) {
        let mid = (&w[0] + &w[1]) / q(2);
        let s = slice_polygon(p, &mid)?;
        if !s.is_delzant() {
            return Err(DelzantError::NotSemifree(format!("slice at {} is not smooth", format_q(&mid))));
        }
        match &fan {
            None => fan = Some(s.fan()),
            Some(f) if *f != s.fan() => return Err(DelzantError::FanChanged),
            Some(_) => {}
        }
    }
    let fan = fan.expect("at least two levels");
    Ok(!homologous(&fan, fiber_ray(p, emin), fiber_ray(p, emax))?)
}

/// Fixed components read off vertices and horizontal edges.
pub fn extract_fixed_data(p: &LatticePolytope) -> Result<FixedPointData> {
    let report = semifree_check(p);
    if !report.is_semifree() {
        return Err(DelzantError::NotSemifree(report.failures.join("; ")));
    }
    let mut components = Vec::new();
    for v in p.isolated_vertices() {
        let down = p.weights(v).iter().filter(|&&w| w < 0).count() as u8;
        components.push(FixedComponent::point(2 * down, p.level(v).clone()));
    }
    for e in p.horizontal_edges() {
        let lines = normal_lines(p, e)?;
        let level = p.level(p.edges[e].ends.0).clone();
        let down = lines.iter().filter(|l| l.weight < 0).count();
        let b: i64 = lines.iter().map(|l| l.degree).sum();
        components.push(match down {
            0 => FixedComponent::surface_min(0, b, level),
            2 => FixedComponent::surface_max(0, b, level),
            _ => {
                let plus = lines.iter().find(|l| l.weight > 0).unwrap().degree;
                let minus = lines.iter().find(|l| l.weight < 0).unwrap().degree;
                FixedComponent::surface_mid(0, level, Some((plus, minus)))
            }
        });
    }
    let twist = match detect_twist(p) {
        Ok(t) => t,
        Err(DelzantError::TwistInapplicable) => false,
        Err(e) => return Err(e),
    };
    let data = FixedPointData::new(components, twist);
    Ok(match crate::fpdata::classify_type(&data) {
        Some(tag) => data.with_label(tag),
        None => data,
    })
}

fn facets(normals: &[Vec3], offsets: &[i64]) -> Vec<Facet> {
    normals.iter().zip(offsets).map(|(n, &c)| Facet::new(*n, c)).collect()
}

pub const BUILTIN_NAMES: [&str; 6] =
    ["type4", "type6b", "type3_bmin1", "type3_bmin3", "remark0_untwisted", "remark0_twisted"];

/// Facets of a built-in, with `m = 2`.
pub fn builtin_facets(name: &str) -> Result<Vec<Facet>> {
    let m = 2;
    Ok(match name {
        "type4" => facets(&[[1, 0, 0], [-m, -1, 0], [m, 1, 1], [-1, 0, -1]], &[-2, 0, -3, 0]),
        "type6b" => facets(
            &[[1, 0, 0], [m, 1, 0], [-m, -1, -1], [-1, 0, 0], [1, 0, 1]],
            &[2, -3, 4, -4, -1],
        ),
        "type3_bmin1" => facets(
            &[[1, 0, 0], [m, 1, 0], [-m - 1, -1, -1], [-1, 0, 0], [1, 0, 1]],
            &[-4, -4, -4, -1, -4],
        ),
        "type3_bmin3" => facets(
            &[[1, 0, 0], [m, 1, 0], [-m + 1, -1, -1], [-1, 0, 0], [1, 0, 1]],
            &[-3, -3, -4, -1, -3],
        ),
        "remark0_untwisted" => facets(
            &[[1, 0, 0], [-1, 0, 0], [-1, 0, -1], [-m, -1, 0], [m, 1, 0], [1, 0, 1]],
            &[-2, 1, -4, -2, -3, -4],
        ),
        "remark0_twisted" => facets(
            &[[1, 0, 0], [-1, 0, 0], [-1, 0, -1], [-m, -1, 0], [m, 1, 0], [m, 1, 1]],
            &[-4, 3, -2, -1, -3, -4],
        ),
        other => return Err(DelzantError::UnknownBuiltin(other.to_string())),
    })
}

pub fn builtin(name: &str) -> Result<LatticePolytope> {
    build(builtin_facets(name)?)
}

pub fn builtin_examples() -> Vec<(&'static str, LatticePolytope)> {
    BUILTIN_NAMES.iter().map(|&n| (n, builtin(n).expect("built-ins are bounded and simple"))).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFacet {
    pub normal: Vec3,
    pub offset: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolytope {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub facets: Vec<RawFacet>,
}

pub fn facets_to_json(name: Option<&str>, facets: &[Facet]) -> String {
    let raw = RawPolytope {
        schema: Some(POLYTOPE_SCHEMA.to_string()),
        name: name.map(str::to_string),
        facets: facets.iter().map(|f| RawFacet { normal: f.normal, offset: format_q(&f.offset) }).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

pub fn facets_from_json(s: &str) -> Result<Vec<Facet>> {
    let raw: RawPolytope = serde_json::from_str(s)?;
    if let Some(schema) = raw.schema {
        if schema != POLYTOPE_SCHEMA {
            return Err(DelzantError::Schema(schema));
        }
    }
    raw.facets
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let offset = parse_q(&f.offset).map_err(|e| DelzantError::Field(i, e.to_string()))?;
            Ok(Facet { normal: f.normal, offset })
        })
        .collect()
}

impl fmt::Display for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} facets, {} vertices, {} edges", self.facets.len(), self.vertices.len(), self.edges.len())?;
        for (i, fc) in self.facets.iter().enumerate() {
            writeln!(f, "  facet {i}: normal {:?}, offset {}", fc.normal, format_q(&fc.offset))?;
        }
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(f, "  vertex {i}: {} on facets {:?}", format_point(&v.point), v.facets)?;
        }
        for (i, e) in self.edges.iter().enumerate() {
            writeln!(f, "  edge {i}: {}-{} direction {:?}", e.ends.0, e.ends.1, e.direction)?;
        }
        Ok(())
    }
}

/// Summary of all checks on one polytope, in a fixed order.
#[derive(Debug, Clone)]
pub struct PolytopeReport {
    pub delzant: DelzantReport,
    pub semifree: SemifreeReport,
    pub horizontal: Vec<(usize, (i64, i64))>,
    pub twist: Option<bool>,
}

pub fn check(p: &LatticePolytope) -> PolytopeReport {
    let delzant = delzant_check(p);
    let semifree = semifree_check(p);
    let horizontal = p
        .horizontal_edges()
        .into_iter()
        .filter_map(|e| edge_normal_degrees(p, e).ok().map(|d| (e, d)))
        .collect();
    let twist = if delzant.is_delzant() && semifree.is_semifree() { detect_twist(p).ok() } else { None };
    PolytopeReport { delzant, semifree, horizontal, twist }
}

impl fmt::Display for PolytopeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "delzant: {} (determinants {:?})", self.delzant.is_delzant(), self.delzant.determinants)?;
        writeln!(f, "semifree: {}", self.semifree.is_semifree())?;
        for fail in &self.semifree.failures {
            writeln!(f, "  {fail}")?;
        }
        for (e, (d1, d2)) in &self.horizontal {
            writeln!(f, "horizontal edge {e}: degrees ({d1}, {d2}), normal Chern number {}", d1 + d2)?;
        }
        match self.twist {
            Some(t) => writeln!(f, "twist: {t}"),
            None => writeln!(f, "twist: inapplicable"),
        }
    }
}

/// Index of the fixed sphere or point occupying each critical level, for display.
pub fn level_map(p: &LatticePolytope) -> BTreeMap<Q, Vec<String>> {
    let mut out: BTreeMap<Q, Vec<String>> = BTreeMap::new();
    for e in p.horizontal_edges() {
        out.entry(p.level(p.edges[e].ends.0).clone()).or_default().push(format!("edge {e}"));
    }
    for v in p.isolated_vertices() {
        out.entry(p.level(v).clone()).or_default().push(format!("vertex {v}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex() {
        let p = build(facets(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]], &[0, 0, 0, -1])).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.edges.len(), 6);
        assert!(delzant_check(&p).is_delzant());
    }

    #[test]
    fn builtin_reports() {
        for (name, p) in builtin_examples() {
            let r = check(&p);
            assert!(r.delzant.is_delzant() && r.semifree.is_semifree(), "{name}");
            assert!(!format!("{p}").is_empty());
        }
    }
}

//! Wall-crossing of reduced spaces.
//!
//! Just above the minimum the reduced space is `ℂP²` (isolated minimum) or an
//! `S²`-bundle over the minimum surface. Crossing an index-2 surface adds its
//! dual class to the Euler class of the level set; crossing an index-2 point
//! blows the reduced space up, an index-4 point blows it down. The chain
//! solver below carries these moves on an arbitrary unimodular lattice so
//! that several blow-ups and blow-downs can be composed.

mod enumerate;

pub use enumerate::{enumerate_types, oriented, screen, Exclusion, FamiliesReport, Family, RawFamilies, RawFamily, FAMILIES_SCHEMA};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::affine::Affine;
use crate::algebra::{AlgebraError, ReducedClass, ReducedSpaceType};
use crate::fpdata::{validate, FixedPointData};
use crate::linalg;
use crate::rational::{q, to_i64, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifierError {
    #[error("no class u on the projective plane pulls back to {0}")]
    NoBlowDownPreimage(String),
    #[error("event not allowed on {0}")]
    InvalidEvent(ReducedSpaceType),
    #[error("fixed point data failed validation:\n{0}")]
    Invalid(String),
    #[error("the wall-crossing chain has no solution")]
    NoSolution,
    #[error("the wall-crossing chain has {0} distinct solutions")]
    Ambiguous(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A single wall in the moment-map image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WallEvent {
    CrossSurface(ReducedClass),
    BlowUpPoint,
    BlowDownExceptional,
    TwistIdentification,
}

/// Transports the Euler class of the level set across one wall.
///
/// Blow-ups and blow-downs are the rank-one moves between `ℂP²` and its
/// one-point blow-up `E(S²)`, with `β*u = x + y` and exceptional class `y`.
pub fn wall_cross(e: &ReducedClass, ev: &WallEvent) -> Result<ReducedClass, ClassifierError> {
    use ReducedSpaceType::*;
    match ev {
        WallEvent::CrossSurface(eta) => Ok(e.add(eta)?),
        WallEvent::BlowUpPoint => match e.space {
            ProjectivePlane => {
                let p = e.coeffs[0].clone();
                let space = NontrivialBundle { genus: 0 };
                Ok(ReducedClass::new(space, vec![p.clone(), p + Q::one()])?)
            }
            other => Err(ClassifierError::InvalidEvent(other)),
        },
        WallEvent::BlowDownExceptional => match e.space {
            NontrivialBundle { genus: 0 } => {
                let (a, b) = (&e.coeffs[0], &e.coeffs[1]);
                if a - b != Q::one() {
                    return Err(ClassifierError::NoBlowDownPreimage(e.to_string()));
                }
                Ok(ReducedClass::new(ProjectivePlane, vec![a.clone()])?)
            }
            other => Err(ClassifierError::InvalidEvent(other)),
        },
        WallEvent::TwistIdentification => match e.space {
            TrivialBundle { genus: 0 } => Ok(ReducedClass::new(
                e.space,
                vec![e.coeffs[1].clone(), e.coeffs[0].clone()],
            )?),
            other => Err(ClassifierError::InvalidEvent(other)),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genus {
    Embeddable(u32),
    NonEmbeddable,
}

/// Genus of an embedded symplectic surface with dual class `η`.
pub fn adjunction_genus(eta: &ReducedClass) -> Genus {
    let c1 = eta.space.c1_reduced();
    let twice = eta.square() - c1.pair(eta).expect("same space") + q(2);
    genus_from_twice(&twice)
}

fn genus_from_twice(twice: &Q) -> Genus {
    match to_i64(twice) {
        Some(t) if t >= 0 && t % 2 == 0 => Genus::Embeddable((t / 2) as u32),
        _ => Genus::NonEmbeddable,
    }
}

/// Euler class just above the minimum: `−u` on `ℂP²`, `kx − y` on a bundle with `b_min ∈ {2k, 2k+1}`.
pub fn start_class(data: &FixedPointData) -> Option<ReducedClass> {
    let lo = data.min()?;
    if lo.kind.is_point() {
        return Some(ReducedClass::u(-1));
    }
    let b = lo.b()?;
    let space = ReducedSpaceType::bundle_for_parity(lo.genus(), b);
    Some(ReducedClass::xy(space, b.div_euclid(2), -1))
}

/// Euler class just below a surface maximum on a bundle without blow-ups:
/// `−k′x + y`, or `x − k′y` after the twist identification.
pub fn end_class(data: &FixedPointData) -> Option<ReducedClass> {
    let hi = data.max()?;
    if hi.kind.is_point() {
        return Some(ReducedClass::u(1));
    }
    let b = hi.b()?;
    let space = ReducedSpaceType::bundle_for_parity(hi.genus(), b);
    let e = ReducedClass::xy(space, -b.div_euclid(2), 1);
    if data.twist {
        wall_cross(&e, &WallEvent::TwistIdentification).ok()
    } else {
        Some(e)
    }
}

// ---------------------------------------------------------------------------
// Lattice chain

/// Unimodular lattice of a reduced space, possibly with blown-down classes
/// still carried as coordinates.
#[derive(Debug, Clone, PartialEq)]
struct Lattice {
    gram: Vec<Vec<Q>>,
    c1: Vec<Q>,
    genus: u32,
    /// Fiber class, tracked only when the base has positive genus.
    fiber: Option<Vec<Q>>,
    contracted: Vec<Vec<Q>>,
    space: Option<ReducedSpaceType>,
}

const BOX: i64 = 3;

fn box_vectors(dim: usize, r: i64) -> impl Iterator<Item = Vec<Q>> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(dim as u32);
    (0..total).map(move |mut n| {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            v.push(q((n % side) as i64 - r));
            n /= side;
        }
        v
    })
}

fn unit(dim: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[i] = Q::one();
    v
}

impl Lattice {
    fn from_space(space: ReducedSpaceType) -> Self {
        let c1 = space.c1_reduced().coeffs;
        let genus = space.genus();
        let fiber = (genus > 0).then(|| unit(2, 0));
        Lattice {
            gram: space.gram(),
            c1,
            genus,
            fiber,
            contracted: Vec::new(),
            space: Some(space),
        }
    }

    fn dim(&self) -> usize {
        self.gram.len()
    }

    fn rank(&self) -> usize {
        self.dim() - self.contracted.len()
    }

    fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        let mut s = Q::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                s += ai * bj * &self.gram[i][j];
            }
        }
        s
    }

    fn pair_aff(&self, a: &[Affine], b: &[Q]) -> Affine {
        let vars = a[0].vars();
        let mut s = Affine::constant(Q::zero(), vars);
        for (i, ai) in a.iter().enumerate() {
            let w: Q = (0..b.len()).map(|j| &b[j] * &self.gram[i][j]).sum();
            if !w.is_zero() {
                s = s.add(&ai.scale(&w));
            }
        }
        s
    }

    fn orthogonal_to_contracted(&self, v: &[Q]) -> bool {
        self.contracted.iter().all(|c| self.pair(c, v).is_zero())
    }

    fn blow_up(&self, e: &[Affine]) -> (Lattice, Vec<Affine>) {
        if self.space == Some(ReducedSpaceType::ProjectivePlane) {
            let lat = Lattice::from_space(ReducedSpaceType::NontrivialBundle { genus: 0 });
            let vars = e[0].vars();
            let one = Affine::constant(Q::one(), vars);
            return (lat, vec![e[0].clone(), e[0].add(&one)]);
        }
        let n = self.dim();
        let mut gram: Vec<Vec<Q>> = self
            .gram
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(Q::zero());
                r
            })
            .collect();
        let mut last = vec![Q::zero(); n + 1];
        last[n] = -Q::one();
        gram.push(last);
        let extend = |v: &Vec<Q>| {
            let mut v = v.clone();
            v.push(Q::zero());
            v
        };
        let mut c1 = self.c1.clone();
        c1.push(-Q::one());
        let lat = Lattice {
            gram,
            c1,
            genus: self.genus,
            fiber: self.fiber.as_ref().map(extend),
            contracted: self.contracted.iter().map(extend).collect(),
            space: None,
        };
        let vars = e[0].vars();
        let mut e2 = e.to_vec();
        e2.push(Affine::constant(Q::one(), vars));
        (lat, e2)
    }

    /// Classes that may be blown down: spheres of square −1 with `c₁ = 1`.
    fn exceptional_classes(&self) -> Vec<Vec<Q>> {
        box_vectors(self.dim(), BOX)
            .filter(|v| {
                self.pair(v, v) == -Q::one()
                    && self.pair(&self.c1, v) == Q::one()
                    && self.orthogonal_to_contracted(v)
                    && self.fiber.as_ref().map_or(true, |f| self.pair(f, v).is_zero())
            })
            .collect()
    }

    fn blow_down(&self, ex: &[Q], e: &[Affine]) -> (Lattice, Vec<Affine>) {
        let mut lat = self.clone();
        lat.c1 = lat.c1.iter().zip(ex).map(|(a, b)| a + b).collect();
        lat.contracted.push(ex.to_vec());
        lat.space = None;
        let e2: Vec<Affine> = e
            .iter()
            .zip(ex)
            .map(|(a, b)| a.add(&Affine::constant(b.clone(), a.vars())))
            .collect();
        if lat.rank() == 1 && lat.genus == 0 {
            let u = box_vectors(lat.dim(), BOX).find(|v| {
                lat.pair(v, v) == Q::one() && lat.pair(&lat.c1, v) == q(3) && lat.orthogonal_to_contracted(v)
            });
            if let Some(u) = u {
                let coord = lat.pair_aff(&e2, &u);
                return (Lattice::from_space(ReducedSpaceType::ProjectivePlane), vec![coord]);
            }
        }
        (lat, e2)
    }

    /// Primitive classes of square 0 with `c₁ = 2`, orthogonal to the contracted classes.
    fn fiber_classes(&self) -> Vec<Vec<Q>> {
        if let Some(f) = &self.fiber {
            return vec![f.clone()];
        }
        box_vectors(self.dim(), BOX)
            .filter(|v| {
                self.pair(v, v).is_zero() && self.pair(&self.c1, v) == q(2) && self.orthogonal_to_contracted(v)
            })
            .collect()
    }

    fn section_for(&self, f: &[Q]) -> Option<Vec<Q>> {
        box_vectors(self.dim(), BOX).find(|v| self.pair(v, f) == Q::one() && self.orthogonal_to_contracted(v))
    }
}

/// Euler-class bookkeeping across one critical level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSlice {
    pub level: Q,
    pub components: Vec<usize>,
    pub e_below: Vec<Q>,
    pub e_above: Vec<Q>,
    pub e_sq_below: Q,
    pub e_sq_above: Q,
    /// `Σ (−1 per index-2 point, +1 per index-4 point)` on this level.
    pub point_term: i64,
}

/// Dual class of one index-2 surface.
#[derive(Debug, Clone, PartialEq)]
pub struct DualClass {
    pub component: usize,
    pub coords: Vec<Q>,
    pub space: Option<ReducedSpaceType>,
    pub self_intersection: Q,
    pub c1_pairing: Q,
}

impl DualClass {
    pub fn as_reduced(&self) -> Option<ReducedClass> {
        self.space.map(|s| ReducedClass {
            space: s,
            coeffs: self.coords.clone(),
        })
    }

    pub fn genus(&self) -> Genus {
        genus_from_twice(&(&self.self_intersection - &self.c1_pairing + q(2)))
    }
}

/// Data needed to follow the symplectic class when every reduced space is the same bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct BundlePath {
    pub space: ReducedSpaceType,
    pub e_start: Vec<Q>,
    pub fiber_end: Vec<Q>,
    pub section_end: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSolution {
    pub etas: Vec<DualClass>,
    pub levels: Vec<LevelSlice>,
    pub bundle: Option<BundlePath>,
}

impl ChainSolution {
    pub fn eta_of(&self, component: usize) -> Option<&DualClass> {
        self.etas.iter().find(|d| d.component == component)
    }

    pub fn level_of(&self, component: usize) -> Option<&LevelSlice> {
        self.levels.iter().find(|l| l.components.contains(&component))
    }
}

enum Step {
    Open,
    Up,
    Surface(usize),
    Down,
    Close,
}

struct SurfaceRec {
    component: usize,
    level_pos: usize,
    eta: Vec<Affine>,
    lattice: Lattice,
}

#[derive(Clone)]
struct LevelRec {
    lattice_below: Option<Lattice>,
    e_below: Vec<Affine>,
    lattice_above: Option<Lattice>,
    e_above: Vec<Affine>,
}

struct EndRec {
    lattice: Lattice,
    e: Vec<Affine>,
    fiber: Option<Vec<Q>>,
    section: Option<Vec<Q>>,
}

struct Branch {
    constraints: Vec<Affine>,
    surfaces: Vec<SurfaceRec>,
    levels: Vec<LevelRec>,
    end: EndRec,
}

struct Ctx<'a> {
    data: &'a FixedPointData,
    steps: Vec<Step>,
    levels: Vec<(Q, Vec<usize>)>,
    vars: usize,
    slot: usize,
}

#[derive(Clone)]
struct Walk {
    lattice: Lattice,
    e: Vec<Affine>,
    constraints: Vec<Affine>,
    surfaces_seen: usize,
    levels: Vec<LevelRec>,
}

#[derive(Debug, Clone, Copy)]
pub struct ChainOptions {
    pub adjunction: bool,
    /// Free chain parameters are searched in `[−bound, bound]`.
    pub bound: i64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            adjunction: true,
            bound: 12,
        }
    }
}

/// All integral solutions of the wall-crossing chain from the minimum to the maximum.
///
/// Events on a shared level are ordered blow-ups, then surfaces, then blow-downs.
pub fn solve_chain(data: &FixedPointData, opts: ChainOptions) -> Vec<ChainSolution> {
    let (Some(lo), Some(_)) = (data.min(), data.max()) else {
        return Vec::new();
    };
    let start_space = if lo.kind.is_point() {
        ReducedSpaceType::ProjectivePlane
    } else {
        match lo.b() {
            Some(b) => ReducedSpaceType::bundle_for_parity(lo.genus(), b),
            None => return Vec::new(),
        }
    };
    let levels: Vec<(Q, Vec<usize>)> = data
        .levels()
        .into_iter()
        .map(|(l, idx)| {
            let inner: Vec<usize> = idx
                .into_iter()
                .filter(|&i| !data.component(i).is_min() && !data.component(i).is_max())
                .collect();
            (l, inner)
        })
        .filter(|(_, idx)| !idx.is_empty())
        .collect();
    let mut steps = Vec::new();
    for (_, idx) in levels.iter() {
        steps.push(Step::Open);
        for &i in idx {
            let c = data.component(i);
            if c.kind.is_point() && c.index == 2 {
                steps.push(Step::Up);
            }
        }
        for &i in idx {
            if data.component(i).is_surface() {
                steps.push(Step::Surface(i));
            }
        }
        for &i in idx {
            let c = data.component(i);
            if c.kind.is_point() && c.index == 4 {
                steps.push(Step::Down);
            }
        }
        steps.push(Step::Close);
    }
    let n_surf = data.index2_surfaces().len();
    let slot = start_space.rank() + data.count_points(2) + 1;
    let vars = n_surf * slot;
    let ctx = Ctx {
        data,
        steps,
        levels,
        vars,
        slot,
    };
    let start = start_class(data).expect("minimum present");
    let walk = Walk {
        lattice: Lattice::from_space(start_space),
        e: start.coeffs.iter().map(|c| Affine::constant(c.clone(), vars)).collect(),
        constraints: Vec::new(),
        surfaces_seen: 0,
        levels: Vec::new(),
    };
    let mut branches = Vec::new();
    walk_steps(&ctx, 0, walk, &mut Vec::new(), &mut branches);

    let mut out: Vec<ChainSolution> = Vec::new();
    for br in branches {
        for sol in realize(&ctx, &br, opts) {
            if !out.contains(&sol) {
                out.push(sol);
            }
        }
    }
    out
}

fn walk_steps(ctx: &Ctx, at: usize, mut w: Walk, surfaces: &mut Vec<SurfaceRec>, out: &mut Vec<Branch>) {
    if at == ctx.steps.len() {
        finish(ctx, w, surfaces, out);
        return;
    }
    match &ctx.steps[at] {
        Step::Open => {
            w.levels.push(LevelRec {
                lattice_below: Some(w.lattice.clone()),
                e_below: w.e.clone(),
                lattice_above: None,
                e_above: Vec::new(),
            });
            walk_steps(ctx, at + 1, w, surfaces, out);
        }
        Step::Close => {
            let last = w.levels.last_mut().expect("opened");
            last.lattice_above = Some(w.lattice.clone());
            last.e_above = w.e.clone();
            walk_steps(ctx, at + 1, w, surfaces, out);
        }
        Step::Up => {
            let (lat, e) = w.lattice.blow_up(&w.e);
            w.lattice = lat;
            w.e = e;
            walk_steps(ctx, at + 1, w, surfaces, out);
        }
        Step::Surface(i) => {
            let dim = w.lattice.dim();
            let base = w.surfaces_seen * ctx.slot;
            let eta: Vec<Affine> = (0..dim).map(|k| Affine::var(base + k, ctx.vars)).collect();
            for k in dim..ctx.slot {
                w.constraints.push(Affine::var(base + k, ctx.vars));
            }
            for c in &w.lattice.contracted {
                w.constraints.push(w.lattice.pair_aff(&eta, c));
            }
            w.e = w.e.iter().zip(&eta).map(|(a, b)| a.add(b)).collect();
            w.surfaces_seen += 1;
            surfaces.push(SurfaceRec {
                component: *i,
                level_pos: w.levels.len() - 1,
                eta,
                lattice: w.lattice.clone(),
            });
            walk_steps(ctx, at + 1, w, surfaces, out);
            surfaces.pop();
        }
        Step::Down => {
            for ex in w.lattice.exceptional_classes() {
                let mut w2 = w.clone();
                let cond = w.lattice.pair_aff(&w.e, &ex).sub(&Affine::constant(Q::one(), ctx.vars));
                w2.constraints.push(cond);
                if !consistent(&w2.constraints) {
                    continue;
                }
                let (lat, e) = w.lattice.blow_down(&ex, &w.e);
                w2.lattice = lat;
                w2.e = e;
                walk_steps(ctx, at + 1, w2, surfaces, out);
            }
        }
    }
}

fn finish(ctx: &Ctx, w: Walk, surfaces: &[SurfaceRec], out: &mut Vec<Branch>) {
    let hi = ctx.data.max().expect("maximum present");
    let lat = &w.lattice;
    let mut push = |constraints: Vec<Affine>, fiber: Option<Vec<Q>>, section: Option<Vec<Q>>| {
        if !consistent(&constraints) {
            return;
        }
        out.push(Branch {
            constraints,
            surfaces: surfaces
                .iter()
                .map(|s| SurfaceRec {
                    component: s.component,
                    level_pos: s.level_pos,
                    eta: s.eta.clone(),
                    lattice: s.lattice.clone(),
                })
                .collect(),
            levels: w
                .levels
                .iter()
                .map(|l| LevelRec {
                    lattice_below: l.lattice_below.clone(),
                    e_below: l.e_below.clone(),
                    lattice_above: l.lattice_above.clone(),
                    e_above: l.e_above.clone(),
                })
                .collect(),
            end: EndRec {
                lattice: lat.clone(),
                e: w.e.clone(),
                fiber,
                section,
            },
        });
    };
    if hi.kind.is_point() {
        if lat.space != Some(ReducedSpaceType::ProjectivePlane) {
            return;
        }
        let mut cons = w.constraints.clone();
        cons.push(w.e[0].sub(&Affine::constant(Q::one(), ctx.vars)));
        push(cons, None, None);
        return;
    }
    let Some(b_max) = hi.b() else { return };
    if lat.rank() != 2 || lat.genus != hi.genus() {
        return;
    }
    let fibers: Vec<Vec<Q>> = match lat.space {
        Some(ReducedSpaceType::TrivialBundle { genus: 0 }) if ctx.data.twist => vec![unit(2, 1)],
        Some(_) if ctx.data.twist => return,
        Some(_) => vec![unit(2, 0)],
        None => lat.fiber_classes(),
    };
    for f in fibers {
        let section = match lat.space {
            Some(_) if f == unit(2, 0) => Some(unit(2, 1)),
            Some(_) => Some(unit(2, 0)),
            None => lat.section_for(&f),
        };
        let Some(s) = section else { continue };
        let s_sq = lat.pair(&s, &s);
        let mut cons = w.constraints.clone();
        cons.push(lat.pair_aff(&w.e, &f).sub(&Affine::constant(Q::one(), ctx.vars)));
        let target = (s_sq - q(b_max)) / q(2);
        cons.push(lat.pair_aff(&w.e, &s).sub(&Affine::constant(target, ctx.vars)));
        push(cons, Some(f), Some(s));
    }
}

fn system(rows: &[Affine]) -> (Vec<Vec<Q>>, Vec<Q>) {
    let a = rows.iter().map(|r| r.coefficients().to_vec()).collect();
    let b = rows.iter().map(|r| -r.constant_term().clone()).collect();
    (a, b)
}

fn consistent(rows: &[Affine]) -> bool {
    if rows.is_empty() {
        return true;
    }
    let (a, b) = system(rows);
    linalg::solve(&a, &b).is_some()
}

fn eval_vec(v: &[Affine], t: &[Q]) -> Vec<Q> {
    v.iter().map(|a| a.eval(t)).collect()
}

fn realize(ctx: &Ctx, br: &Branch, opts: ChainOptions) -> Vec<ChainSolution> {
    let assignments: Vec<Vec<Q>> = if br.constraints.is_empty() {
        if ctx.vars == 0 {
            vec![Vec::new()]
        } else {
            grid(&vec![Q::zero(); ctx.vars], &(0..ctx.vars).map(|i| unit(ctx.vars, i)).collect::<Vec<_>>(), opts.bound)
        }
    } else {
        let (a, b) = system(&br.constraints);
        match linalg::solve(&a, &b) {
            None => return Vec::new(),
            Some(sol) if sol.is_unique() => vec![sol.particular],
            Some(sol) => grid(&sol.particular, &sol.nullspace, opts.bound),
        }
    };
    assignments
        .iter()
        .filter_map(|t| realize_one(ctx, br, t, opts))
        .collect()
}

fn grid(base: &[Q], dirs: &[Vec<Q>], bound: i64) -> Vec<Vec<Q>> {
    let mut out = vec![base.to_vec()];
    for d in dirs {
        let mut next = Vec::new();
        for v in &out {
            for s in -bound..=bound {
                let s = q(s);
                next.push(v.iter().zip(d).map(|(a, b)| a + b * &s).collect());
            }
        }
        out = next;
    }
    out
}

fn realize_one(ctx: &Ctx, br: &Branch, t: &[Q], opts: ChainOptions) -> Option<ChainSolution> {
    let mut etas = Vec::new();
    for s in &br.surfaces {
        let coords = eval_vec(&s.eta, t);
        if coords.iter().any(|c| !c.is_integer()) {
            return None;
        }
        if s.lattice.space == Some(ReducedSpaceType::ProjectivePlane) && !coords[0].is_positive() {
            return None;
        }
        let d = DualClass {
            component: s.component,
            self_intersection: s.lattice.pair(&coords, &coords),
            c1_pairing: s.lattice.pair(&s.lattice.c1, &coords),
            space: s.lattice.space,
            coords,
        };
        if opts.adjunction && d.genus() != Genus::Embeddable(ctx.data.component(s.component).genus()) {
            return None;
        }
        etas.push(d);
    }
    for (i, a) in br.surfaces.iter().enumerate() {
        for (j, b) in br.surfaces.iter().enumerate().skip(i + 1) {
            if a.level_pos == b.level_pos && !a.lattice.pair(&etas[i].coords, &etas[j].coords).is_zero() {
                return None;
            }
        }
    }
    let end_e = eval_vec(&br.end.e, t);
    if end_e.iter().any(|c| !c.is_integer()) {
        return None;
    }
    let mut levels = Vec::new();
    for (pos, rec) in br.levels.iter().enumerate() {
        let lb = rec.lattice_below.as_ref().expect("recorded");
        let la = rec.lattice_above.as_ref().expect("recorded");
        let e_below = eval_vec(&rec.e_below, t);
        let e_above = eval_vec(&rec.e_above, t);
        let comps = ctx.levels[pos].1.clone();
        let point_term = comps
            .iter()
            .map(|&i| ctx.data.component(i))
            .filter(|c| c.kind.is_point())
            .map(|c| if c.index == 2 { -1 } else { 1 })
            .sum();
        levels.push(LevelSlice {
            level: ctx.levels[pos].0.clone(),
            components: comps,
            e_sq_below: lb.pair(&e_below, &e_below),
            e_sq_above: la.pair(&e_above, &e_above),
            e_below,
            e_above,
            point_term,
        });
    }
    let start_lat = match br.levels.first().and_then(|l| l.lattice_below.as_ref()) {
        Some(l) => l.clone(),
        None => br.end.lattice.clone(),
    };
    let bundle = match (start_lat.space, br.end.lattice.space, &br.end.fiber, &br.end.section) {
        (Some(s0), Some(s1), Some(f), Some(s)) if s0 == s1 && s0 != ReducedSpaceType::ProjectivePlane && ctx.data.all_surfaces() => {
            Some(BundlePath {
                space: s0,
                e_start: start_class(ctx.data)?.coeffs,
                fiber_end: f.clone(),
                section_end: s.clone(),
            })
        }
        _ => None,
    };
    Some(ChainSolution { etas, levels, bundle })
}

/// Whether some choice of dual classes transports the start Euler class to the end one.
///
/// Adjunction is not imposed; surfaces in `ℂP²` must still pair positively with `u`
/// and surfaces sharing a level must be disjoint.
pub fn euler_chain_check(data: &FixedPointData) -> bool {
    !solve_chain(
        data,
        ChainOptions {
            adjunction: false,
            ..ChainOptions::default()
        },
    )
    .is_empty()
}

/// Dual classes of the index-2 surfaces, forced by the chain and the adjunction formula.
pub fn dual_class_solve(data: &FixedPointData) -> Result<BTreeMap<usize, DualClass>, ClassifierError> {
    let report = validate(data);
    if !report.is_valid() {
        return Err(ClassifierError::Invalid(report.to_string()));
    }
    let sols = unique_chain(data)?;
    Ok(sols.etas.into_iter().map(|d| (d.component, d)).collect())
}

/// The unique adjunction-consistent chain solution.
pub fn unique_chain(data: &FixedPointData) -> Result<ChainSolution, ClassifierError> {
    let mut sols: Vec<ChainSolution> = Vec::new();
    // Branches differing only in which exceptional class was blown down agree on every observable.
    for s in solve_chain(data, ChainOptions::default()) {
        if !sols.iter().any(|t| same_observables(t, &s)) {
            sols.push(s);
        }
    }
    match sols.len() {
        0 => Err(ClassifierError::NoSolution),
        1 => Ok(sols.pop().expect("one")),
        n => Err(ClassifierError::Ambiguous(n)),
    }
}

fn same_observables(a: &ChainSolution, b: &ChainSolution) -> bool {
    let key = |s: &ChainSolution| {
        let etas: Vec<(usize, Q, Q)> = s
            .etas
            .iter()
            .map(|d| (d.component, d.self_intersection.clone(), d.c1_pairing.clone()))
            .collect();
        let levels: Vec<(Q, Q)> = s.levels.iter().map(|l| (l.e_sq_below.clone(), l.e_sq_above.clone())).collect();
        (etas, levels)
    };
    key(a) == key(b) && a.etas.iter().zip(&b.etas).all(|(x, y)| x.space.is_none() || x.coords == y.coords)
}

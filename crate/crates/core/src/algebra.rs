//! Equivariant cohomology of a single fixed component and the intersection
//! forms of the reduced spaces.
//!
//! A fixed component is either a point or a closed surface. Its equivariant
//! cohomology (even part, rational coefficients) is `Q[λ] ⊗ {1, u}` with
//! `u² = 0` for a surface and `Q[λ]` for a point. Localization forces
//! negative powers of `λ`, so classes are stored as sparse Laurent
//! expansions `Σ_k λᵏ (c_k + d_k u)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{pretty_q, q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("classes live on different carriers ({0:?} vs {1:?})")]
    CarrierMismatch(Carrier, Carrier),
    #[error("class is not invertible in the localized ring: {0}")]
    NotInvertible(String),
    #[error("reduced classes live on different spaces")]
    SpaceMismatch,
    #[error("coefficient vector has length {got}, space has rank {want}")]
    RankMismatch { got: usize, want: usize },
}

/// Ring coefficients usable inside an [`EquivariantClass`].
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + From<Q>
{
}

impl<T> Coefficient for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
        + From<Q>
{
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    Point,
    Surface,
}

/// `Σ_k λᵏ (c_k + d_k u)`, truncated by `u² = 0`.
#[derive(Clone, PartialEq)]
pub struct EquivariantClass<C = Q> {
    terms: BTreeMap<i64, (C, C)>,
    carrier: Carrier,
}

impl<C: Coefficient> EquivariantClass<C> {
    pub fn zero(carrier: Carrier) -> Self {
        EquivariantClass {
            terms: BTreeMap::new(),
            carrier,
        }
    }

    pub fn one(carrier: Carrier) -> Self {
        Self::monomial(carrier, 0, C::from(Q::one()), C::zero())
    }

    /// `λᵏ (c + d u)`. On a point the `u` part is dropped.
    pub fn monomial(carrier: Carrier, k: i64, c: C, d: C) -> Self {
        let mut out = Self::zero(carrier);
        out.add_term(k, c, d);
        out
    }

    /// `c λᵏ`.
    pub fn lambda(carrier: Carrier, k: i64, c: C) -> Self {
        Self::monomial(carrier, k, c, C::zero())
    }

    /// `d λᵏ u`; only meaningful on a surface.
    pub fn lambda_u(k: i64, d: C) -> Self {
        Self::monomial(Carrier::Surface, k, C::zero(), d)
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    fn add_term(&mut self, k: i64, c: C, d: C) {
        let d = if self.carrier == Carrier::Point { C::zero() } else { d };
        if c.is_zero() && d.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(|| (C::zero(), C::zero()));
        entry.0 = entry.0.clone() + c;
        entry.1 = entry.1.clone() + d;
        if entry.0.is_zero() && entry.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    /// `(c_k, d_k)`, zero when absent.
    pub fn coeff(&self, k: i64) -> (C, C) {
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| (C::zero(), C::zero()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C, &C)> {
        self.terms.iter().map(|(k, (c, d))| (*k, c, d))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Cohomological degree when homogeneous (`λ` and `u` both have degree 2).
    pub fn degree(&self) -> Option<i64> {
        let mut deg = None;
        for (k, (c, d)) in &self.terms {
            for (present, dg) in [(!c.is_zero(), 2 * k), (!d.is_zero(), 2 * k + 2)] {
                if present {
                    match deg {
                        None => deg = Some(dg),
                        Some(x) if x != dg => return None,
                        _ => {}
                    }
                }
            }
        }
        deg
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.carrier != other.carrier {
            return Err(AlgebraError::CarrierMismatch(self.carrier, other.carrier));
        }
        let mut out = Self::zero(self.carrier);
        for (ka, (ca, da)) in &self.terms {
            for (kb, (cb, db)) in &other.terms {
                let c = ca.clone() * cb.clone();
                let d = ca.clone() * db.clone() + da.clone() * cb.clone();
                out.add_term(ka + kb, c, d);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.carrier != other.carrier {
            return Err(AlgebraError::CarrierMismatch(self.carrier, other.carrier));
        }
        let mut out = self.clone();
        for (k, (c, d)) in &other.terms {
            out.add_term(*k, c.clone(), d.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.carrier);
        for (k, (c, d)) in &self.terms {
            out.add_term(*k, c.clone() * s.clone(), d.clone() * s.clone());
        }
        out
    }

    /// Push-forward to a point: `∫_pt` keeps the `c_k`, `∫_Σ` keeps the `d_k`.
    pub fn integrate_component(&self) -> LaurentScalar<C> {
        let mut out = LaurentScalar::zero();
        for (k, (c, d)) in &self.terms {
            match self.carrier {
                Carrier::Point => out.add(*k, c.clone()),
                Carrier::Surface => out.add(*k, d.clone()),
            }
        }
        out
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> EquivariantClass<D> {
        let mut out = EquivariantClass::zero(self.carrier);
        for (k, (c, d)) in &self.terms {
            out.add_term(*k, f(c), f(d));
        }
        out
    }
}

impl EquivariantClass<Q> {
    pub fn lift<D: Coefficient>(&self) -> EquivariantClass<D> {
        self.map_coeffs(|c| D::from(c.clone()))
    }

    /// Inverse in the localized ring.
    ///
    /// The `λ`-part must be a single Laurent monomial `c λᵐ`; the inverse is
    /// `c⁻¹λ⁻ᵐ − (d-part)·c⁻²λ⁻²ᵐ u`.
    pub fn invert_euler(&self) -> Result<Self, AlgebraError> {
        let cs: Vec<(i64, &Q)> = self
            .terms
            .iter()
            .filter(|(_, (c, _))| !c.is_zero())
            .map(|(k, (c, _))| (*k, c))
            .collect();
        let [(m, c)] = cs.as_slice() else {
            return Err(AlgebraError::NotInvertible(self.to_string()));
        };
        let inv_c = Q::one() / (*c).clone();
        let inv_c2 = &inv_c * &inv_c;
        let mut out = Self::lambda(self.carrier, -m, inv_c);
        for (k, (_, d)) in &self.terms {
            if !d.is_zero() {
                out.add_term(k - 2 * m, Q::zero(), -(d * &inv_c2));
            }
        }
        Ok(out)
    }
}

impl<C: Coefficient> fmt::Debug for EquivariantClass<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[", self.carrier)?;
        for (k, (c, d)) in &self.terms {
            write!(f, " λ^{k}:({c:?}, {d:?})")?;
        }
        write!(f, " ]")
    }
}

fn lambda_power(k: i64) -> String {
    match k {
        0 => String::new(),
        1 => "λ".to_string(),
        _ => format!("λ^{k}"),
    }
}

fn signed_term(out: &mut String, coef: &Q, body: &str) {
    if coef.is_zero() {
        return;
    }
    let neg = *coef < Q::zero();
    let mag = if neg { -coef.clone() } else { coef.clone() };
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if body.is_empty() {
        out.push_str(&pretty_q(&mag));
    } else if mag == Q::one() {
        out.push_str(body);
    } else {
        out.push_str(&pretty_q(&mag));
        out.push_str(body);
    }
}

impl fmt::Display for EquivariantClass<Q> {
    /// Prints with the usual `λ`, `u` notation, highest `λ` power first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (k, (c, d)) in self.terms.iter().rev() {
            signed_term(&mut s, c, &lambda_power(*k));
            signed_term(&mut s, d, &format!("{}u", lambda_power(*k)));
        }
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

/// Finite Laurent polynomial in `λ`: the value of an equivariant integral.
#[derive(Clone, PartialEq)]
pub struct LaurentScalar<C = Q>(BTreeMap<i64, C>);

impl<C: Coefficient> LaurentScalar<C> {
    pub fn zero() -> Self {
        LaurentScalar(BTreeMap::new())
    }

    pub fn add(&mut self, k: i64, c: C) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(k).or_insert_with(C::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (k, c) in &other.0 {
            self.add(*k, c.clone());
        }
    }

    pub fn coeff(&self, k: i64) -> C {
        self.0.get(&k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &C)> {
        self.0.iter().map(|(k, c)| (*k, c))
    }
}

impl<C: Coefficient> fmt::Debug for LaurentScalar<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for LaurentScalar<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (k, c) in self.0.iter().rev() {
            signed_term(&mut s, c, &lambda_power(*k));
        }
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

/// The three diffeomorphism types of a reduced space that carry a fixed basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReducedSpaceType {
    /// `ℂP²`, basis `{u}`.
    ProjectivePlane,
    /// `S² × Σ_g`, basis `{x, y}` = {fiber dual, base dual}.
    TrivialBundle { genus: u32 },
    /// Nontrivial `S²`-bundle over `Σ_g`, basis `{x, y}` with `y` dual to the `−1` section.
    NontrivialBundle { genus: u32 },
}

impl ReducedSpaceType {
    pub fn rank(&self) -> usize {
        match self {
            ReducedSpaceType::ProjectivePlane => 1,
            _ => 2,
        }
    }

    pub fn genus(&self) -> u32 {
        match self {
            ReducedSpaceType::ProjectivePlane => 0,
            ReducedSpaceType::TrivialBundle { genus } | ReducedSpaceType::NontrivialBundle { genus } => *genus,
        }
    }

    /// Bundle over `Σ_g` whose type is fixed by the parity of a normal Chern number.
    pub fn bundle_for_parity(genus: u32, chern: i64) -> Self {
        if chern.rem_euclid(2) == 0 {
            ReducedSpaceType::TrivialBundle { genus }
        } else {
            ReducedSpaceType::NontrivialBundle { genus }
        }
    }

    pub fn gram(&self) -> Vec<Vec<Q>> {
        match self {
            ReducedSpaceType::ProjectivePlane => vec![vec![q(1)]],
            ReducedSpaceType::TrivialBundle { .. } => vec![vec![q(0), q(1)], vec![q(1), q(0)]],
            ReducedSpaceType::NontrivialBundle { .. } => vec![vec![q(0), q(1)], vec![q(1), q(-1)]],
        }
    }

    /// First Chern class of the reduced space in its basis.
    pub fn c1_reduced(&self) -> ReducedClass {
        let coeffs = match self {
            ReducedSpaceType::ProjectivePlane => vec![q(3)],
            ReducedSpaceType::TrivialBundle { genus } => vec![q(2 - 2 * *genus as i64), q(2)],
            ReducedSpaceType::NontrivialBundle { genus } => vec![q(3 - 2 * *genus as i64), q(2)],
        };
        ReducedClass { space: *self, coeffs }
    }
}

impl fmt::Display for ReducedSpaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReducedSpaceType::ProjectivePlane => write!(f, "CP2"),
            ReducedSpaceType::TrivialBundle { genus } => write!(f, "S2 x Sigma_{genus}"),
            ReducedSpaceType::NontrivialBundle { genus } => write!(f, "E(Sigma_{genus})"),
        }
    }
}

/// Degree-two class `p u` or `p x + q y` on a reduced space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedClass {
    pub space: ReducedSpaceType,
    pub coeffs: Vec<Q>,
}

impl ReducedClass {
    pub fn new(space: ReducedSpaceType, coeffs: Vec<Q>) -> Result<Self, AlgebraError> {
        if coeffs.len() != space.rank() {
            return Err(AlgebraError::RankMismatch {
                got: coeffs.len(),
                want: space.rank(),
            });
        }
        Ok(ReducedClass { space, coeffs })
    }

    pub fn u(p: i64) -> Self {
        ReducedClass {
            space: ReducedSpaceType::ProjectivePlane,
            coeffs: vec![q(p)],
        }
    }

    pub fn xy(space: ReducedSpaceType, p: i64, r: i64) -> Self {
        assert_eq!(space.rank(), 2, "x, y basis needs a bundle");
        ReducedClass {
            space,
            coeffs: vec![q(p), q(r)],
        }
    }

    pub fn pair(&self, other: &ReducedClass) -> Result<Q, AlgebraError> {
        if self.space != other.space {
            return Err(AlgebraError::SpaceMismatch);
        }
        let g = self.space.gram();
        let mut s = Q::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                s += a * b * &g[i][j];
            }
        }
        Ok(s)
    }

    pub fn square(&self) -> Q {
        self.pair(self).expect("same space")
    }

    pub fn add(&self, other: &ReducedClass) -> Result<ReducedClass, AlgebraError> {
        if self.space != other.space {
            return Err(AlgebraError::SpaceMismatch);
        }
        Ok(ReducedClass {
            space: self.space,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }
}

impl fmt::Display for ReducedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: &[&str] = if self.space.rank() == 1 { &["u"] } else { &["x", "y"] };
        let mut s = String::new();
        for (c, n) in self.coeffs.iter().zip(names) {
            signed_term(&mut s, c, n);
        }
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

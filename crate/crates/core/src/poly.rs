//! Sparse multivariate polynomials over Q in numbered unknowns.
//!
//! Used as the coefficient ring when restriction tables carry undetermined
//! coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{pretty_q, Q};

/// Sorted `(variable, exponent)` pairs with positive exponents.
pub type Monomial = Vec<(usize, u32)>;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<usize, u32> = a.iter().copied().collect();
    for &(v, e) in b {
        *out.entry(v).or_insert(0) += e;
    }
    out.into_iter().collect()
}

impl Poly {
    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    pub fn var(i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(i, 1)], Q::one());
        Poly { terms }
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|&(v, _)| v))
            .collect()
    }

    /// `(coefficients, constant)` when the polynomial has degree at most one.
    pub fn linear_form(&self) -> Option<(BTreeMap<usize, Q>, Q)> {
        if self.total_degree() > 1 {
            return None;
        }
        let mut lin = BTreeMap::new();
        let mut c = Q::zero();
        for (m, v) in &self.terms {
            match m.as_slice() {
                [] => c = v.clone(),
                [(x, 1)] => {
                    lin.insert(*x, v.clone());
                }
                _ => unreachable!(),
            }
        }
        Some((lin, c))
    }

    /// Ascending coefficients when only `var` occurs.
    pub fn as_univariate(&self, var: usize) -> Option<Vec<Q>> {
        let mut out = vec![Q::zero(); self.total_degree() as usize + 1];
        for (m, v) in &self.terms {
            match m.as_slice() {
                [] => out[0] += v,
                [(x, e)] if *x == var => out[*e as usize] += v,
                _ => return None,
            }
        }
        Some(out)
    }

    /// Variable dividing every term, if any.
    pub fn common_variable(&self) -> Option<usize> {
        let mut iter = self.terms.keys();
        let first: BTreeSet<usize> = iter.next()?.iter().map(|&(v, _)| v).collect();
        let common = iter.fold(first, |acc, m| {
            let s: BTreeSet<usize> = m.iter().map(|&(v, _)| v).collect();
            acc.intersection(&s).copied().collect()
        });
        common.into_iter().next()
    }

    /// Divides by `var` once; caller guarantees divisibility.
    pub fn div_variable(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let nm: Monomial = m
                .iter()
                .filter_map(|&(v, e)| match (v == var, e) {
                    (true, 1) => None,
                    (true, e) => Some((v, e - 1)),
                    _ => Some((v, e)),
                })
                .collect();
            out.add_term(nm, c.clone());
        }
        out
    }

    /// Replaces `var` by `value` everywhere.
    pub fn substitute(&self, var: usize, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut rest: Monomial = Vec::new();
            let mut power = 0;
            for &(v, e) in m {
                if v == var {
                    power = e;
                } else {
                    rest.push((v, e));
                }
            }
            let mut term = Poly {
                terms: BTreeMap::from([(rest, c.clone())]),
            };
            for _ in 0..power {
                term = term * value.clone();
            }
            out = out + term;
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let Some(&(_, e)) = m.iter().find(|&&(v, _)| v == var) else {
                continue;
            };
            let nm: Monomial = m
                .iter()
                .filter_map(|&(v, f)| match (v == var, f) {
                    (true, 1) => None,
                    (true, f) => Some((v, f - 1)),
                    _ => Some((v, f)),
                })
                .collect();
            out.add_term(nm, c * Q::from_integer(e.into()));
        }
        out
    }

    /// Value at a point; `None` when some occurring variable is unassigned.
    pub fn eval(&self, values: &[Option<Q>]) -> Option<Q> {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m {
                let x = values.get(v)?.as_ref()?;
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        Some(acc)
    }
}

/// One branch of [`solve_system`]: a value per unknown, `None` when the branch leaves it free.
pub type Assignment = Vec<Option<Q>>;

/// All rational solutions of a polynomial system of low degree.
///
/// Linear equations are eliminated by substitution; once none are left the
/// solver branches on the rational roots of a univariate equation, or splits
/// an equation with a common variable factor. Branches where neither move
/// applies keep the remaining unknowns free.
pub fn solve_system(eqs: &[Poly], nvars: usize) -> Vec<Assignment> {
    let mut out = Vec::new();
    solve_rec(eqs.to_vec(), Vec::new(), nvars, &mut out);
    out.dedup();
    let mut uniq: Vec<Assignment> = Vec::new();
    for a in out {
        if !uniq.contains(&a) {
            uniq.push(a);
        }
    }
    uniq
}

fn solve_rec(eqs: Vec<Poly>, subs: Vec<(usize, Poly)>, nvars: usize, out: &mut Vec<Assignment>) {
    let mut eqs: Vec<Poly> = eqs.into_iter().filter(|e| !e.is_zero()).collect();
    if eqs.iter().any(|e| e.as_constant().is_some()) {
        return;
    }
    eqs.sort_by_key(|e| (e.total_degree(), e.terms.len()));
    eqs.dedup();
    let Some(first) = eqs.first() else {
        out.push(back_substitute(&subs, nvars));
        return;
    };
    if first.total_degree() == 1 {
        let (lin, c) = first.linear_form().expect("degree one");
        let (&v, a) = lin.iter().next().expect("has a variable");
        let mut rhs = Poly::constant(-c);
        for (&w, b) in lin.iter().skip(1) {
            rhs = rhs - Poly::var(w).scale(b);
        }
        let value = rhs.scale(&(Q::one() / a.clone()));
        branch(&eqs, subs, v, value, nvars, out);
        return;
    }
    if let Some((v, coeffs)) = eqs.iter().find_map(|e| {
        let vars = e.variables();
        (vars.len() == 1).then(|| {
            let v = *vars.iter().next().expect("one");
            (v, e.as_univariate(v).expect("univariate"))
        })
    }) {
        for r in crate::rational::rational_roots(&coeffs) {
            branch(&eqs, subs.clone(), v, Poly::constant(r), nvars, out);
        }
        return;
    }
    if let Some((i, v)) = eqs.iter().enumerate().find_map(|(i, e)| e.common_variable().map(|v| (i, v))) {
        branch(&eqs, subs.clone(), v, Poly::zero(), nvars, out);
        let mut split = eqs.clone();
        split[i] = split[i].div_variable(v);
        solve_rec(split, subs, nvars, out);
        return;
    }
    let mut a = back_substitute(&subs, nvars);
    for e in &eqs {
        for v in e.variables() {
            a[v] = None;
        }
    }
    out.push(a);
}

fn branch(eqs: &[Poly], mut subs: Vec<(usize, Poly)>, v: usize, value: Poly, nvars: usize, out: &mut Vec<Assignment>) {
    let next = eqs.iter().map(|e| e.substitute(v, &value)).collect();
    subs.push((v, value));
    solve_rec(next, subs, nvars, out);
}

fn back_substitute(subs: &[(usize, Poly)], nvars: usize) -> Assignment {
    let mut known: BTreeMap<usize, Q> = BTreeMap::new();
    for (v, p) in subs.iter().rev() {
        let mut p = p.clone();
        for (w, val) in &known {
            p = p.substitute(*w, &Poly::constant(val.clone()));
        }
        if let Some(c) = p.as_constant() {
            known.insert(*v, c);
        }
    }
    (0..nvars).map(|v| known.get(&v).cloned()).collect()
}

impl From<Q> for Poly {
    fn from(c: Q) -> Self {
        Poly::constant(c)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .map(|&(v, e)| if e == 1 { format!("t{v}") } else { format!("t{v}^{e}") })
                    .collect();
                if vars.is_empty() {
                    pretty_q(c)
                } else {
                    format!("{}*{}", pretty_q(c), vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

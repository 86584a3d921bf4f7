//! Affine forms `c + Σ aᵢ tᵢ` over Q, and strict homogeneous feasibility.

use num_traits::{Signed, Zero};

use crate::rational::Q;

/// `[c, a₀, a₁, …]` representing `c + Σ aᵢ tᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Affine(pub Vec<Q>);

impl Affine {
    pub fn constant(c: Q, vars: usize) -> Self {
        let mut v = vec![Q::zero(); vars + 1];
        v[0] = c;
        Affine(v)
    }

    pub fn var(i: usize, vars: usize) -> Self {
        let mut v = vec![Q::zero(); vars + 1];
        v[i + 1] = Q::from_integer(1.into());
        Affine(v)
    }

    pub fn vars(&self) -> usize {
        self.0.len() - 1
    }

    pub fn constant_term(&self) -> &Q {
        &self.0[0]
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.0[1..]
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients().iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Affine) -> Affine {
        Affine(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Affine) -> Affine {
        Affine(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Q) -> Affine {
        Affine(self.0.iter().map(|a| a * s).collect())
    }

    pub fn eval(&self, values: &[Q]) -> Q {
        self.coefficients()
            .iter()
            .zip(values)
            .fold(self.0[0].clone(), |acc, (a, v)| acc + a * v)
    }
}

/// Whether `{v : rᵢ·v > 0 for all i}` is non-empty, by Fourier-Motzkin elimination.
pub fn strictly_feasible(rows: &[Vec<Q>]) -> bool {
    let Some(n) = rows.first().map(Vec::len) else {
        return true;
    };
    let mut rows: Vec<Vec<Q>> = rows.to_vec();
    for j in 0..n {
        if rows.iter().any(|r| r.iter().all(Zero::is_zero)) {
            return false;
        }
        let (pos, rest): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| r[j].is_positive());
        let (neg, zero): (Vec<_>, Vec<_>) = rest.into_iter().partition(|r| r[j].is_negative());
        let mut next = zero;
        for p in &pos {
            for m in &neg {
                let (a, b) = (p[j].clone(), -m[j].clone());
                let row: Vec<Q> = p.iter().zip(m).map(|(x, y)| x * &b + y * &a).collect();
                next.push(row);
            }
        }
        next.sort();
        next.dedup();
        rows = next;
    }
    !rows.iter().any(|r| r.iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn rows(r: &[&[i64]]) -> Vec<Vec<Q>> {
        r.iter().map(|x| x.iter().map(|&v| q(v)).collect()).collect()
    }

    #[test]
    fn fm_examples() {
        assert!(strictly_feasible(&rows(&[&[1, 0], &[0, 1], &[1, -1]])));
        assert!(!strictly_feasible(&rows(&[&[1, -1], &[-1, 1]])));
        assert!(!strictly_feasible(&rows(&[&[1, 0], &[-1, 0]])));
        assert!(!strictly_feasible(&rows(&[&[0, 0]])));
        assert!(strictly_feasible(&rows(&[&[1, 1, 0], &[0, -1, 1], &[-1, 0, 3]])));
    }

    #[test]
    fn affine_ops() {
        let t = Affine::var(0, 2).scale(&q(2)).add(&Affine::constant(q(1), 2));
        assert_eq!(t.eval(&[q(3), q(5)]), q(7));
        assert!(!t.is_constant());
        assert!(t.sub(&Affine::var(0, 2).scale(&q(2))).is_constant());
    }
}

//! Small dense linear algebra over the rationals.
//!
//! Everything here is exact; the systems that show up are at most a few
//! dozen unknowns, so plain Gauss-Jordan elimination is all we need.

use num_traits::{One, Zero};

use crate::rational::Q;

/// General solution `particular + span(nullspace)` of `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSolution {
    pub particular: Vec<Q>,
    pub nullspace: Vec<Vec<Q>>,
}

impl AffineSolution {
    pub fn is_unique(&self) -> bool {
        self.nullspace.is_empty()
    }
}

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &[Vec<Q>]) -> usize {
    let mut m = a.to_vec();
    rref(&mut m).len()
}

/// Solves `A x = b`; `None` when inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<AffineSolution> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut particular = vec![Q::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = m[r][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let nullspace = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m[r][f].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution {
        particular,
        nullspace,
    })
}

pub fn det(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c].clone();
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for j in c..n {
                    let v = &m[c][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
    }
    d
}

pub fn det3_i64(a: [i64; 3], b: [i64; 3], c: [i64; 3]) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn unique_solution() {
        let a = mat(&[&[2, 1], &[1, -1]]);
        let s = solve(&a, &[q(3), q(0)]).unwrap();
        assert!(s.is_unique());
        assert_eq!(s.particular, vec![q(1), q(1)]);
    }

    #[test]
    fn underdetermined_and_inconsistent() {
        let a = mat(&[&[1, 1, 0]]);
        let s = solve(&a, &[q(2)]).unwrap();
        assert_eq!(s.nullspace.len(), 2);
        let a = mat(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[q(1), q(3)]).is_none());
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&mat(&[&[1, 2], &[3, 4]])), q(-2));
        assert_eq!(det(&mat(&[&[0, 1], &[1, 0]])), q(-1));
        assert_eq!(det3_i64([1, 0, 0], [0, 1, 0], [1, 1, 2]), 2);
        let a = vec![vec![qf(1, 2), q(0)], vec![q(0), q(4)]];
        assert_eq!(det(&a), q(2));
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
    }
}

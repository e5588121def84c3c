//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Row-echelon basis that grows one vector at a time. Used for rank counts
/// over spanning sets far larger than the ambient dimension.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    /// (pivot column, row normalized to 1 at the pivot)
    rows: Vec<(usize, Vec<Rational>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        EchelonBasis::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was.
    pub fn insert(&mut self, v: Vec<Rational>) -> bool {
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        let v: Vec<Rational> = v.into_iter().map(|x| x * &inv).collect();
        // keep rows fully reduced so `reduce` is a single pass
        for (_, row) in &mut self.rows {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    *x -= &f * r;
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    pub fn contains(&self, v: Vec<Rational>) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

pub fn rank(vectors: impl IntoIterator<Item = Vec<Rational>>) -> usize {
    let mut b = EchelonBasis::new();
    for v in vectors {
        b.insert(v);
    }
    b.rank()
}

/// Solves `Σ x_j columns[j] = target`. Returns `None` if the system is
/// inconsistent or the columns are dependent (no unique solution).
pub fn solve_unique(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let n_rows = target.len();
    let n_cols = columns.len();
    // augmented matrix, row-major
    let mut m: Vec<Vec<Rational>> = (0..n_rows)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n_cols {
        let r = (pivot_row..n_rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot_row, r);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n_rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let prow = m[pivot_row].clone();
                for (x, p) in m[r].iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[n_cols].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| m[r][n_cols].clone()).collect())
}

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense symmetric `n x n` matrix. Both triangles are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> SymMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: alloc::vec![S::zero(); n * n] }
    }

    /// Build from rows, checking squareness and symmetry. Entries that are
    /// `None` (absent diagonal in log-domain input) become zero.
    pub fn from_rows(rows: Vec<Vec<Option<S>>>, check_symmetry: bool) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                match v {
                    Some(x) if !x.is_finite() => return Err(Error::NotFinite(i, j)),
                    Some(x) => data.push(x.clone()),
                    None if i == j => data.push(S::zero()),
                    None => return Err(Error::NotFinite(i, j)),
                }
            }
        }
        let m = SymMatrix { n, data };
        if check_symmetry {
            for i in 0..n {
                for j in (i + 1)..n {
                    if m.get(i, j) != m.get(j, i) {
                        return Err(Error::NotSymmetric(i, j));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[j * self.n + i] = v.clone();
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    /// Sup-norm over off-diagonal entries.
    pub fn off_diagonal_sup(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let v = libm::fabs(self.get(i, j).to_f64());
                    if v > m {
                        m = v;
                    }
                }
            }
        }
        m
    }

    /// Relabel: `out(i, j) = self(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.n, |i, j| self.get(perm[i], perm[j]).clone())
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> SymMatrix<T> {
        SymMatrix { n: self.n, data: self.data.iter().map(&mut f).collect() }
    }
}

//! Dense two-phase primal simplex with Bland's rule.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

/// `coeffs . x (<= | =) rhs` over non-negative variables `x`.
#[derive(Clone, Debug)]
pub struct Row<S> {
    pub coeffs: Vec<S>,
    pub kind: RowKind,
    pub rhs: S,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<S>, value: S },
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    cols: usize,
    tol: Tolerance,
    pivots: usize,
    cap: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, i: usize) -> &S {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.cap {
            return Err(Error::LimitExceeded(format!("simplex exceeded {} pivots", self.cap)));
        }
        let inv = S::one() / self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for k in 0..self.rows.len() {
            if k == r || self.rows[k][c] == S::zero() {
                continue;
            }
            let f = self.rows[k][c].clone();
            for j in 0..=self.cols {
                if self.rows[r][j] != S::zero() {
                    let v = self.rows[r][j].clone() * f.clone();
                    self.rows[k][j] = self.rows[k][j].clone() - v;
                }
            }
            if !S::EXACT {
                self.rows[k][c] = S::zero();
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    fn reduced_cost(&self, obj: &[S], j: usize) -> S {
        let mut z = obj[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if obj[b] != S::zero() && self.rows[i][j] != S::zero() {
                z = z - obj[b].clone() * self.rows[i][j].clone();
            }
        }
        z
    }

    /// Maximize `obj . x` over the current basis. Returns `false` if unbounded.
    fn run(&mut self, obj: &[S], allowed: &[bool]) -> Result<bool> {
        loop {
            let entering = (0..self.cols).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && self.tol.sign(&self.reduced_cost(obj, j)) == Ordering::Greater
            });
            let Some(c) = entering else { return Ok(true) };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if self.tol.sign(a) != Ordering::Greater {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => match self.tol.cmp(&ratio, best) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[i] < self.basis[*l],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return Ok(false) };
            self.pivot(r, c)?;
        }
    }

    fn value(&self, obj: &[S]) -> S {
        let mut v = S::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if obj[b] != S::zero() {
                v = v + obj[b].clone() * self.rhs(i).clone();
            }
        }
        v
    }
}

/// Maximize `objective . x` subject to `rows`, `x >= 0`.
pub fn maximize<S: Scalar>(objective: &[S], rows: &[Row<S>], tol: Tolerance, cap: usize) -> Result<LpOutcome<S>> {
    let nv = objective.len();
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.kind == RowKind::Le).count();
    // Layout: structural | slacks | artificials | rhs.
    let mut art_rows = Vec::new();
    let mut table = Vec::with_capacity(m);
    let mut basis = alloc::vec![0usize; m];
    let mut slack = nv;
    for (i, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.coeffs.len(), nv);
        let neg = tol.sign(&row.rhs) == Ordering::Less;
        let sign = |x: &S| if neg { -x.clone() } else { x.clone() };
        let mut t: Vec<S> = row.coeffs.iter().map(sign).collect();
        t.resize(nv + slack_count, S::zero());
        let mut needs_art = row.kind == RowKind::Eq;
        if row.kind == RowKind::Le {
            t[slack] = if neg { -S::one() } else { S::one() };
            if neg {
                needs_art = true;
            } else {
                basis[i] = slack;
            }
            slack += 1;
        }
        let rhs = if S::EXACT || !tol.is_zero(&row.rhs) { sign(&row.rhs) } else { S::zero() };
        if needs_art {
            art_rows.push(i);
        }
        table.push((t, rhs));
    }
    let art_start = nv + slack_count;
    let cols = art_start + art_rows.len();
    let mut full = Vec::with_capacity(m);
    for (i, (mut t, rhs)) in table.into_iter().enumerate() {
        t.resize(cols, S::zero());
        if let Some(k) = art_rows.iter().position(|&r| r == i) {
            t[art_start + k] = S::one();
            basis[i] = art_start + k;
        }
        t.push(rhs);
        full.push(t);
    }
    let mut tab = Tableau { rows: full, basis, cols, tol, pivots: 0, cap };

    if !art_rows.is_empty() {
        let mut phase1 = alloc::vec![S::zero(); cols];
        for j in art_start..cols {
            phase1[j] = -S::one();
        }
        let all = alloc::vec![true; cols];
        tab.run(&phase1, &all)?;
        if tol.sign(&tab.value(&phase1)) == Ordering::Less {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| !tol.is_zero(&tab.rows[i][j])) {
                    Some(j) => tab.pivot(i, j)?,
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut obj = objective.to_vec();
    obj.resize(cols, S::zero());
    let allowed: Vec<bool> = (0..cols).map(|j| j < art_start).collect();
    if !tab.run(&obj, &allowed)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = alloc::vec![S::zero(); nv];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nv {
            x[b] = tab.rhs(i).clone();
        }
    }
    let value = objective.iter().zip(&x).fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
    Ok(LpOutcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn row(c: &[i64], kind: RowKind, b: i64) -> Row<Rational> {
        Row { coeffs: c.iter().map(|&v| q(v, 1)).collect(), kind, rhs: q(b, 1) }
    }

    #[test]
    fn textbook_lp() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3.
        let rows = alloc::vec![row(&[1, 1], RowKind::Le, 4), row(&[1, 3], RowKind::Le, 6), row(&[1, 0], RowKind::Le, 3)];
        let out = maximize(&[q(3, 1), q(2, 1)], &rows, Tolerance::default(), 1000).unwrap();
        assert_eq!(out, LpOutcome::Optimal { x: alloc::vec![q(3, 1), q(1, 1)], value: q(11, 1) });
    }

    #[test]
    fn equalities_and_negative_rhs() {
        // max -x - y, x + y = 3, -x <= -2.
        let rows = alloc::vec![row(&[1, 1], RowKind::Eq, 3), row(&[-1, 0], RowKind::Le, -2)];
        let out = maximize(&[q(-1, 1), q(-1, 1)], &rows, Tolerance::default(), 1000).unwrap();
        match out {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, q(-3, 1));
                assert!(x[0] >= q(2, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = alloc::vec![row(&[1], RowKind::Le, 1), row(&[-1], RowKind::Le, -2)];
        assert_eq!(maximize(&[q(1, 1)], &rows, Tolerance::default(), 1000).unwrap(), LpOutcome::Infeasible);
        let rows = alloc::vec![row(&[1, -1], RowKind::Le, 1)];
        assert_eq!(maximize(&[q(1, 1), q(0, 1)], &rows, Tolerance::default(), 1000).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let rows = alloc::vec![row(&[1, 1], RowKind::Eq, 2), row(&[2, 2], RowKind::Eq, 4), row(&[1, 0], RowKind::Le, 1)];
        let out = maximize(&[q(0, 1), q(1, 1)], &rows, Tolerance::default(), 1000).unwrap();
        assert_eq!(out, LpOutcome::Optimal { x: alloc::vec![q(0, 1), q(2, 1)], value: q(2, 1) });
    }

    #[test]
    fn pivot_cap() {
        let rows = alloc::vec![row(&[1, 1], RowKind::Le, 4), row(&[1, 3], RowKind::Le, 6)];
        assert!(matches!(maximize(&[q(3, 1), q(2, 1)], &rows, Tolerance::default(), 0), Err(Error::LimitExceeded(_))));
    }
}

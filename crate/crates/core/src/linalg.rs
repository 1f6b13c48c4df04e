//! Small dense Gaussian elimination over [`Scalar`].

use alloc::vec::Vec;

use crate::scalar::{Scalar, Tolerance};

/// Reduced row echelon form of an augmented system.
struct Rref<S> {
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

/// Reduce `rows` (each of length `cols`, optionally augmented by one extra
/// column that is never chosen as a pivot).
fn rref<S: Scalar>(mut rows: Vec<Vec<S>>, cols: usize, tol: Tolerance) -> Rref<S> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let pick = if S::EXACT {
            (r..rows.len()).find(|&k| rows[k][c] != S::zero())
        } else {
            (r..rows.len())
                .filter(|&k| !tol.is_zero(&rows[k][c]))
                .max_by(|&a, &b| rows[a][c].abs().partial_cmp(&rows[b][c].abs()).unwrap_or(core::cmp::Ordering::Equal))
        };
        let Some(p) = pick else { continue };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for k in 0..rows.len() {
            if k != r && rows[k][c] != S::zero() {
                let f = rows[k][c].clone();
                for col in 0..rows[k].len() {
                    let v = rows[r][col].clone() * f.clone();
                    rows[k][col] = rows[k][col].clone() - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { rows, pivots }
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], cols: usize, tol: Tolerance) -> usize {
    rref(rows.to_vec(), cols, tol).pivots.len()
}

/// The unique solution of `rows * x = rhs`, if the system is consistent
/// and has full column rank.
pub fn solve_unique<S: Scalar>(rows: &[Vec<S>], rhs: &[S], cols: usize, tol: Tolerance) -> Option<Vec<S>> {
    let aug = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let red = rref(aug, cols, tol);
    if red.pivots.len() < cols {
        return None;
    }
    if red.rows[cols..].iter().any(|r| !tol.is_zero(&r[cols])) {
        return None;
    }
    Some((0..cols).map(|k| red.rows[k][cols].clone()).collect())
}

/// A non-zero vector `v` with `rows * v = 0`, or `None` for full column rank.
/// The first free column gets coordinate `1`.
pub fn kernel_vector<S: Scalar>(rows: &[Vec<S>], cols: usize, tol: Tolerance) -> Option<Vec<S>> {
    let red = rref(rows.to_vec(), cols, tol);
    let free = (0..cols).find(|c| !red.pivots.contains(c))?;
    let mut v = alloc::vec![S::zero(); cols];
    v[free] = S::one();
    for (k, &p) in red.pivots.iter().enumerate() {
        v[p] = -red.rows[k][free].clone();
    }
    Some(v)
}

/// Kernel dimension of `rows`.
pub fn nullity<S: Scalar>(rows: &[Vec<S>], cols: usize, tol: Tolerance) -> usize {
    cols - rank(rows, cols, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn rank_of_triangle_and_path() {
        let tol = Tolerance::default();
        let tri = alloc::vec![
            alloc::vec![q(1), q(1), q(0)],
            alloc::vec![q(0), q(1), q(1)],
            alloc::vec![q(1), q(0), q(1)],
        ];
        assert_eq!(rank(&tri, 3, tol), 3);
        assert_eq!(rank(&tri[..2], 3, tol), 2);
        let v = kernel_vector(&tri[..2], 3, tol).unwrap();
        assert_eq!(v, alloc::vec![q(1), q(-1), q(1)]);
        assert!(kernel_vector(&tri, 3, tol).is_none());
    }

    #[test]
    fn solves_exactly() {
        let tol = Tolerance::default();
        let rows = alloc::vec![alloc::vec![q(1), q(1)], alloc::vec![q(1), q(-1)]];
        let x = solve_unique(&rows, &[q(3), q(1)], 2, tol).unwrap();
        assert_eq!(x, alloc::vec![q(2), q(1)]);
        let over = alloc::vec![alloc::vec![q(1), q(0)], alloc::vec![q(0), q(1)], alloc::vec![q(1), q(1)]];
        assert!(solve_unique(&over, &[q(1), q(1), q(3)], 2, tol).is_none());
        assert!(solve_unique(&over, &[q(1), q(1), q(2)], 2, tol).is_some());
    }
}

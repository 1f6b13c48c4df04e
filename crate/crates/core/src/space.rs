//! Antipodal functions, their log-weights and the Moebius algebra on them.
//!
//! A finite antipodal space comes in one of two domains:
//!
//! * [`AntipodalSpace`] holds the function `rho` itself.
//! * [`LogSpace`] holds the log-weights `a_ij = log(rho(i, j)^2)`. This is the
//!   domain the polyhedral machinery works in: every cell is cut out by the
//!   affine forms `tau_i + tau_j + a_ij`, so exact rational log-weights give
//!   fully exact combinatorics.
//!
//! Points of the Moebius space are represented by their log-derivative
//! `tau = log(d rho / d rho0)` against the base function, a [`MoebiusVector`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::scalar::{Scalar, Tolerance};

/// Spaces need at least four points.
pub const MIN_POINTS: usize = 4;

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{i}")).collect()
}

/// Symmetric, zero on the diagonal, positive elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatingMatrix<S> {
    m: SymMatrix<S>,
}

impl<S: Scalar> SeparatingMatrix<S> {
    pub fn new(m: SymMatrix<S>) -> Result<Self> {
        let n = m.n();
        for i in 0..n {
            if *m.get(i, i) != S::zero() {
                return Err(Error::BadDiagonal(i));
            }
            for j in 0..n {
                if i != j && *m.get(i, j) <= S::zero() {
                    return Err(Error::OutOfRange(i, j));
                }
            }
        }
        Ok(SeparatingMatrix { m })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let rows = rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect();
        Self::new(SymMatrix::from_rows(rows, true)?)
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        self.m.get(i, j)
    }

    pub fn matrix(&self) -> &SymMatrix<S> {
        &self.m
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        SeparatingMatrix { m: self.m.permuted(perm) }
    }

    pub fn to_f64(&self) -> SeparatingMatrix<f64> {
        SeparatingMatrix { m: self.m.map(|x| x.to_f64()) }
    }

    /// `log(rho(i, j)^2)` for all pairs, as floats.
    pub fn log_weights(&self) -> SymMatrix<f64> {
        SymMatrix::from_fn(self.n(), |i, j| {
            if i == j {
                0.0
            } else {
                2.0 * libm::log(self.get(i, j).to_f64())
            }
        })
    }

    /// `[i, j, k, l] = rho(i,k) rho(j,l) / (rho(i,l) rho(j,k))`.
    pub fn cross_ratio(&self, i: usize, j: usize, k: usize, l: usize) -> Result<S> {
        check_quadruple(self.n(), [i, j, k, l])?;
        Ok(self.get(i, k).clone() * self.get(j, l).clone()
            / (self.get(i, l).clone() * self.get(j, k).clone()))
    }
}

pub(crate) fn check_quadruple(n: usize, q: [usize; 4]) -> Result<()> {
    for (a, &x) in q.iter().enumerate() {
        if x >= n {
            return Err(Error::IndexOutOfBounds(x));
        }
        if q[..a].contains(&x) {
            return Err(Error::NotDistinct);
        }
    }
    Ok(())
}

/// A validated antipodal function on `n >= 4` points (rho-domain).
#[derive(Clone, Debug, PartialEq)]
pub struct AntipodalSpace<S> {
    labels: Vec<String>,
    rho: SeparatingMatrix<S>,
    tol: Tolerance,
}

/// Check the antipodal axioms on a rho-matrix: values in `(0, 1]` off the
/// diagonal and every row attaining `1`.
pub fn validate_antipodal<S: Scalar>(
    matrix: SymMatrix<S>,
    tol: Tolerance,
) -> Result<AntipodalSpace<S>> {
    let n = matrix.n();
    if n < MIN_POINTS {
        return Err(Error::TooSmall { needed: MIN_POINTS, got: n });
    }
    let mut m = matrix;
    let one = S::one();
    for i in 0..n {
        if *m.get(i, i) != S::zero() {
            return Err(Error::BadDiagonal(i));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m.get(i, j).clone();
            if v <= S::zero() || tol.cmp(&v, &one) == Ordering::Greater {
                return Err(Error::OutOfRange(i, j));
            }
            let snapped = tol.snap(v, &one);
            m.set(i, j, snapped);
        }
    }
    for i in 0..n {
        if !(0..n).any(|j| j != i && *m.get(i, j) == one) {
            return Err(Error::NotAntipodal(i));
        }
    }
    Ok(AntipodalSpace { labels: default_labels(n), rho: SeparatingMatrix { m }, tol })
}

impl<S: Scalar> AntipodalSpace<S> {
    pub fn from_rows(rows: Vec<Vec<S>>, tol: Tolerance) -> Result<Self> {
        let rows = rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect();
        validate_antipodal(SymMatrix::from_rows(rows, true)?, tol)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.rho.n()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rho(&self) -> &SeparatingMatrix<S> {
        &self.rho
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Log-weights `a_ij = 2 log rho(i, j)`. Logs of rationals are not
    /// rational, so the result is always float-mode.
    pub fn to_log_weights(&self) -> LogSpace<f64> {
        let a = self.rho.log_weights();
        LogSpace::from_weights_unchecked(a, self.labels.clone(), self.tol)
    }

    /// `E_rho0(tau)`: the separating function with
    /// `rho(i,j)^2 = e^{tau_i} e^{tau_j} rho0(i,j)^2`.
    pub fn visual_rescale(&self, tau: &MoebiusVector<f64>) -> Result<SeparatingMatrix<f64>> {
        check_len(self.n(), tau)?;
        let n = self.n();
        let m = SymMatrix::from_fn(n, |i, j| {
            if i == j {
                0.0
            } else {
                libm::exp((tau[i] + tau[j]) / 2.0) * self.rho.get(i, j).to_f64()
            }
        });
        Ok(SeparatingMatrix { m })
    }
}

/// A validated antipodal space in the log-domain.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSpace<S> {
    labels: Vec<String>,
    a: SymMatrix<S>,
    tol: Tolerance,
}

impl<S: Scalar> LogSpace<S> {
    /// Validate log-weights: symmetric, `a_ij <= 0`, every row attaining `0`.
    /// The diagonal is ignored. The stored tolerance is scaled by `max |a_ij|`.
    pub fn new(a: SymMatrix<S>, tol: Tolerance) -> Result<Self> {
        let n = a.n();
        if n < MIN_POINTS {
            return Err(Error::TooSmall { needed: MIN_POINTS, got: n });
        }
        let tol = tol.scaled(a.off_diagonal_sup());
        let mut a = a;
        for i in 0..n {
            a.set(i, i, S::zero());
        }
        let zero = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = a.get(i, j).clone();
                if tol.sign(&v) == Ordering::Greater {
                    return Err(Error::OutOfRange(i, j));
                }
                a.set(i, j, tol.snap(v, &zero));
            }
        }
        for i in 0..n {
            if !(0..n).any(|j| j != i && *a.get(i, j) == zero) {
                return Err(Error::NotAntipodal(i));
            }
        }
        Ok(LogSpace { labels: default_labels(n), a, tol })
    }

    pub fn from_rows(rows: Vec<Vec<Option<S>>>, tol: Tolerance) -> Result<Self> {
        Self::new(SymMatrix::from_rows(rows, true)?, tol)
    }

    pub(crate) fn from_weights_unchecked(a: SymMatrix<S>, labels: Vec<String>, tol: Tolerance) -> Self {
        let tol = tol.scaled(a.off_diagonal_sup());
        LogSpace { labels, a, tol }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &SymMatrix<S> {
        &self.a
    }

    pub fn weight(&self, i: usize, j: usize) -> &S {
        self.a.get(i, j)
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// `l_ij(tau) = tau_i + tau_j + a_ij`.
    pub fn form(&self, tau: &MoebiusVector<S>, i: usize, j: usize) -> S {
        tau[i].clone() + tau[j].clone() + self.a.get(i, j).clone()
    }

    /// Log-weights of `E_rho0(tau)`: `a'_ij = tau_i + tau_j + a_ij`.
    pub fn visual_rescale(&self, tau: &MoebiusVector<S>) -> Result<SymMatrix<S>> {
        check_len(self.n(), tau)?;
        Ok(SymMatrix::from_fn(self.n(), |i, j| if i == j { S::zero() } else { self.form(tau, i, j) }))
    }

    /// `D(tau)_i = max_{j != i} (tau_i + tau_j + a_ij)`.
    pub fn discrepancy(&self, tau: &MoebiusVector<S>) -> Result<Vec<S>> {
        check_len(self.n(), tau)?;
        let n = self.n();
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| self.form(tau, i, j))
                    .reduce(|a, b| S::max_of(&a, &b))
                    .unwrap_or_else(S::zero)
            })
            .collect())
    }

    /// `E_rho0(tau)` is antipodal, i.e. every discrepancy component vanishes.
    pub fn is_member(&self, tau: &MoebiusVector<S>) -> Result<bool> {
        Ok(self.discrepancy(tau)?.iter().all(|d| self.tol.is_zero(d)))
    }

    /// Logarithm of the cross-ratio `[i, j, k, l]`.
    pub fn log_cross_ratio(&self, i: usize, j: usize, k: usize, l: usize) -> Result<S> {
        check_quadruple(self.n(), [i, j, k, l])?;
        let a = &self.a;
        Ok((a.get(i, k).clone() + a.get(j, l).clone() - a.get(i, l).clone() - a.get(j, k).clone()).half())
    }

    /// Float copy (same labels, same base tolerance).
    pub fn to_f64(&self) -> LogSpace<f64> {
        LogSpace { labels: self.labels.clone(), a: self.a.map(|x| x.to_f64()), tol: self.tol }
    }

    /// `rho0(i, j) = exp(a_ij / 2)` as floats.
    pub fn rho_f64(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            libm::exp(self.a.get(i, j).to_f64() / 2.0)
        }
    }
}

fn check_len<S: Scalar>(n: usize, tau: &MoebiusVector<S>) -> Result<()> {
    if tau.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: tau.len() });
    }
    Ok(())
}

/// Lexicographically smallest pair `(p, q)`, `p < q`, avoiding `i`.
fn anchor_pair(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Log-derivative from log-weights: the unique `tau` with
/// `a1_ij = tau_i + tau_j + a0_ij` for every pair.
///
/// Each `tau_i` is computed from the anchor triple `(i, p, q)` and then
/// checked on all pairs.
pub fn log_derivative_from_weights<S: Scalar>(
    a1: &SymMatrix<S>,
    a0: &SymMatrix<S>,
    tol: Tolerance,
) -> Result<MoebiusVector<S>> {
    let n = a0.n();
    if a1.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a1.n() });
    }
    if n < 3 {
        return Err(Error::TooSmall { needed: 3, got: n });
    }
    let diff = |i: usize, j: usize| a1.get(i, j).clone() - a0.get(i, j).clone();
    let tau: Vec<S> = (0..n)
        .map(|i| {
            let (p, q) = anchor_pair(i);
            (diff(i, p) + diff(i, q) - diff(p, q)).half()
        })
        .collect();
    let tol = tol.scaled(a0.off_diagonal_sup().max(a1.off_diagonal_sup()));
    for i in 0..n {
        for j in (i + 1)..n {
            if !tol.eq(&(tau[i].clone() + tau[j].clone()), &diff(i, j)) {
                return Err(Error::NotMoebiusEquivalent(i, j));
            }
        }
    }
    Ok(MoebiusVector(tau))
}

/// `log(d rho1 / d rho0)` for two separating functions on the same set.
pub fn log_derivative<S: Scalar>(
    rho1: &SeparatingMatrix<S>,
    rho0: &SeparatingMatrix<S>,
    tol: Tolerance,
) -> Result<MoebiusVector<f64>> {
    if rho1.n() != rho0.n() {
        return Err(Error::DimensionMismatch { expected: rho0.n(), got: rho1.n() });
    }
    log_derivative_from_weights(&rho1.log_weights(), &rho0.log_weights(), tol)
}

/// Coordinates of a point of the Moebius space (or of any continuous function on `Z`).
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusVector<S>(pub Vec<S>);

impl<S: Scalar> MoebiusVector<S> {
    pub fn zeros(n: usize) -> Self {
        MoebiusVector(alloc::vec![S::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    /// Sup-norm.
    pub fn norm(&self) -> S {
        self.0.iter().map(|x| x.abs()).fold(S::zero(), |a, b| S::max_of(&a, &b))
    }

    /// `||self - other||_inf`, the metric of the Moebius space.
    pub fn distance(&self, other: &Self) -> S {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a.clone() - b.clone()).abs())
            .fold(S::zero(), |a, b| S::max_of(&a, &b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        MoebiusVector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        MoebiusVector(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        MoebiusVector(self.0.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn to_f64(&self) -> MoebiusVector<f64> {
        MoebiusVector(self.0.iter().map(|x| x.to_f64()).collect())
    }
}

impl<S> core::ops::Index<usize> for MoebiusVector<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

/// Gromov product `(y|z)_x = (d(y,x) + d(z,x) - d(y,z)) / 2` in the sup metric.
pub fn gromov_product<S: Scalar>(y: &MoebiusVector<S>, z: &MoebiusVector<S>, base: &MoebiusVector<S>) -> S {
    (y.distance(base) + z.distance(base) - y.distance(z)).half()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    /// rho(1, j) = 1, all other off-diagonal entries 1/3.
    fn star_rho() -> AntipodalSpace<Rational> {
        let t = q(1, 3);
        let o = q(1, 1);
        let z = q(0, 1);
        AntipodalSpace::from_rows(
            alloc::vec![
                alloc::vec![z.clone(), o.clone(), o.clone(), o.clone()],
                alloc::vec![o.clone(), z.clone(), t.clone(), t.clone()],
                alloc::vec![o.clone(), t.clone(), z.clone(), t.clone()],
                alloc::vec![o.clone(), t.clone(), t.clone(), z.clone()],
            ],
            Tolerance::default(),
        )
        .unwrap()
    }

    #[test]
    fn validates_star() {
        assert_eq!(star_rho().n(), 4);
    }

    #[test]
    fn zero_entry_is_out_of_range() {
        let mut rows = alloc::vec![alloc::vec![1.0; 4]; 4];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 0.0;
        }
        rows[0][1] = 0.0;
        rows[1][0] = 0.0;
        assert_eq!(AntipodalSpace::from_rows(rows, Tolerance::default()).unwrap_err(), Error::OutOfRange(0, 1));
    }

    #[test]
    fn row_without_one_is_not_antipodal() {
        let mut rows = alloc::vec![alloc::vec![0.5; 4]; 4];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 0.0;
        }
        rows[0][1] = 0.9;
        rows[1][0] = 0.9;
        rows[2][3] = 1.0;
        rows[3][2] = 1.0;
        assert_eq!(AntipodalSpace::from_rows(rows, Tolerance::default()).unwrap_err(), Error::NotAntipodal(0));
    }

    #[test]
    fn too_small_and_asymmetric() {
        let rows = alloc::vec![alloc::vec![0.0, 1.0, 1.0], alloc::vec![1.0, 0.0, 1.0], alloc::vec![1.0, 1.0, 0.0]];
        assert!(matches!(AntipodalSpace::from_rows(rows, Tolerance::default()), Err(Error::TooSmall { .. })));
        let mut rows = alloc::vec![alloc::vec![1.0; 4]; 4];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 0.0;
        }
        rows[0][1] = 0.5;
        assert_eq!(AntipodalSpace::from_rows(rows, Tolerance::default()).unwrap_err(), Error::NotSymmetric(0, 1));
    }

    #[test]
    fn log_weights_of_star() {
        let log = star_rho().to_log_weights();
        assert_eq!(*log.weight(0, 2), 0.0);
        assert!((log.weight(1, 2) - (-2.1972245773)).abs() < 1e-9);
        let half = AntipodalSpace::from_rows(
            alloc::vec![
                alloc::vec![0.0, 1.0, 1.0, 1.0],
                alloc::vec![1.0, 0.0, 0.25, 0.25],
                alloc::vec![1.0, 0.25, 0.0, 0.5],
                alloc::vec![1.0, 0.25, 0.5, 0.0],
            ],
            Tolerance::default(),
        )
        .unwrap()
        .to_log_weights();
        assert!((half.weight(2, 3) - (-1.3862943611)).abs() < 1e-9);
    }

    #[test]
    fn cross_ratio_swap_inverts() {
        let s = star_rho();
        let r = s.rho();
        assert_eq!(r.cross_ratio(0, 1, 2, 3).unwrap() * r.cross_ratio(0, 1, 3, 2).unwrap(), q(1, 1));
        assert_eq!(r.cross_ratio(0, 1, 1, 3), Err(Error::NotDistinct));
    }

    #[test]
    fn equal_parameters_give_unit_cross_ratios() {
        let s = star_rho();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        if check_quadruple(4, [i, j, k, l]).is_ok() {
                            assert_eq!(s.rho().cross_ratio(i, j, k, l).unwrap(), q(1, 1));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cross_ratio_of_normalized_matrix() {
        // (mu, lambda, nu) = (1/5, 3/10, 1/2): [1,2,3,4] = rho13 rho24 / (rho14 rho23) = lambda / mu.
        let (mu, la, nu) = (q(1, 5), q(3, 10), q(1, 2));
        let o = q(1, 1);
        let z = q(0, 1);
        let r = SeparatingMatrix::from_rows(alloc::vec![
            alloc::vec![z.clone(), o.clone(), o.clone(), o.clone()],
            alloc::vec![o.clone(), z.clone(), mu.clone(), la.clone()],
            alloc::vec![o.clone(), mu.clone(), z.clone(), nu.clone()],
            alloc::vec![o.clone(), la.clone(), nu.clone(), z.clone()],
        ])
        .unwrap();
        assert_eq!(r.cross_ratio(0, 1, 2, 3).unwrap(), la / mu);
    }

    #[test]
    fn rescale_star_to_all_ones() {
        let s = star_rho();
        let l3 = libm::log(3.0);
        let tau = MoebiusVector(alloc::vec![-l3, l3, l3, l3]);
        let r = s.visual_rescale(&tau).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!((r.get(i, j) - 1.0).abs() < 1e-12);
                }
            }
        }
        let log = s.to_log_weights();
        assert!(log.discrepancy(&tau).unwrap().iter().all(|d| d.abs() < 1e-12));
        let d = log.discrepancy(&MoebiusVector(alloc::vec![-1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!((d[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_derivative_round_trip_and_perturbation() {
        let s = star_rho();
        let tau = MoebiusVector(alloc::vec![0.3, -1.2, 0.7, 2.0]);
        let r1 = s.visual_rescale(&tau).unwrap();
        let back = log_derivative(&r1, &s.rho().to_f64(), Tolerance::default()).unwrap();
        assert!(back.distance(&tau) < 1e-12);
        let id = log_derivative(s.rho(), s.rho(), Tolerance::default()).unwrap();
        assert_eq!(id, MoebiusVector::zeros(4));

        let mut m = r1.matrix().clone();
        let v = *m.get(2, 3);
        m.set(2, 3, v * 1.01);
        let bad = SeparatingMatrix::new(m).unwrap();
        assert!(matches!(log_derivative(&bad, &s.rho().to_f64(), Tolerance::default()), Err(Error::NotMoebiusEquivalent(..))));
    }

    #[test]
    fn exact_log_domain_round_trip() {
        let a = SymMatrix::from_fn(4, |i, j| if i == j || i == 0 { q(0, 1) } else { q(-2, 1) });
        let space = LogSpace::new(a, Tolerance::default()).unwrap();
        let tau = MoebiusVector(alloc::vec![q(1, 3), q(-5, 7), q(2, 1), q(0, 1)]);
        let a1 = space.visual_rescale(&tau).unwrap();
        assert_eq!(log_derivative_from_weights(&a1, space.weights(), space.tolerance()).unwrap(), tau);
    }

    #[test]
    fn distance_along_ray() {
        let t = 2.5;
        let a = MoebiusVector::<f64>::zeros(4);
        let b = MoebiusVector(alloc::vec![t, -t, -t, -t]);
        assert_eq!(a.distance(&b), t);
        assert_eq!(b.distance(&b), 0.0);
    }
}

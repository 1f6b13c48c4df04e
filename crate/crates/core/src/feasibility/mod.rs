//! Linear feasibility of cells `C(R)` and `C(R)*`.
//!
//! A [`CellSystem`] collects the constraints of one cell: the forms
//! `l_ij = tau_i + tau_j + a_ij` vanish on `R` and are non-positive (or
//! negative) elsewhere. Optional coordinate upper bounds, extra linear
//! constraints and an `l_inf` box can be attached.
//!
//! [`solve`] maximizes the common slack `eps <= 1` of all strict rows in a
//! single LP: `eps* > 0` means the open cell is non-empty, `eps* = 0` that
//! only the closed cell is, and an infeasible LP or `eps* < 0` that both are
//! empty.

mod fm;
pub mod lp;

use alloc::vec::Vec;
use core::cmp::Ordering;

pub use fm::fourier_motzkin_feasible;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::relations::PairRelation;
use crate::scalar::{Scalar, Tolerance};
use crate::space::{LogSpace, MoebiusVector};
use lp::{LpOutcome, Row, RowKind};

pub const DEFAULT_ITERATION_CAP: usize = 1_000_000;

/// Upper bound `tau_i <= value`; a tight bound is an equality.
#[derive(Clone, Debug, PartialEq)]
pub struct Bound<S> {
    pub value: S,
    pub tight: bool,
}

/// `sum coeffs[k].1 * tau_{coeffs[k].0} <= rhs`, never strict.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint<S> {
    pub coeffs: Vec<(usize, S)>,
    pub rhs: S,
}

/// Closed (`C(R)`) or open (`C(R)*`) reading of the non-relation rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Closed,
    Open,
}

#[derive(Clone, Debug)]
pub struct CellSystem<S> {
    weights: SymMatrix<S>,
    relation: PairRelation,
    upper_bounds: Vec<Option<Bound<S>>>,
    extra: Vec<LinearConstraint<S>>,
    box_radius: Option<S>,
    tol: Tolerance,
    iteration_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Empty,
    BoundaryOnly,
    Interior,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityResult<S> {
    pub status: Status,
    pub witness: Option<MoebiusVector<S>>,
    pub max_slack: Option<S>,
}

impl<S: Scalar> CellSystem<S> {
    /// Rows `l_ij = tau_i + tau_j + a_ij` for the given weights.
    pub fn new(weights: SymMatrix<S>, relation: PairRelation, tol: Tolerance) -> Result<Self> {
        if relation.n() != weights.n() {
            return Err(Error::DimensionMismatch { expected: weights.n(), got: relation.n() });
        }
        let n = weights.n();
        Ok(CellSystem {
            weights,
            relation,
            upper_bounds: alloc::vec![None; n],
            extra: Vec::new(),
            box_radius: None,
            tol,
            iteration_cap: DEFAULT_ITERATION_CAP,
        })
    }

    pub fn for_space(space: &LogSpace<S>, relation: PairRelation) -> Result<Self> {
        Self::new(space.weights().clone(), relation, space.tolerance())
    }

    pub fn with_upper_bound(mut self, i: usize, bound: Bound<S>) -> Self {
        self.upper_bounds[i] = Some(bound);
        self
    }

    pub fn with_constraint(mut self, c: LinearConstraint<S>) -> Self {
        self.extra.push(c);
        self
    }

    /// `|tau_i| <= r` for every coordinate.
    pub fn with_box(mut self, r: S) -> Self {
        self.box_radius = Some(r);
        self
    }

    pub fn with_iteration_cap(mut self, cap: usize) -> Self {
        self.iteration_cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn relation(&self) -> &PairRelation {
        &self.relation
    }

    pub fn weights(&self) -> &SymMatrix<S> {
        &self.weights
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Every constraint as `(coeffs over tau, rhs, kind)` with kind
    /// `Eq`, `Strict` (strict in the open regime) or `Weak`.
    pub(crate) fn constraints(&self) -> Vec<(Vec<S>, S, Kind)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut c = alloc::vec![S::zero(); n];
                c[i] = S::one();
                c[j] = S::one();
                let kind = if self.relation.contains(i, j) { Kind::Eq } else { Kind::Strict };
                out.push((c, -self.weights.get(i, j).clone(), kind));
            }
        }
        for (i, b) in self.upper_bounds.iter().enumerate() {
            if let Some(b) = b {
                let mut c = alloc::vec![S::zero(); n];
                c[i] = S::one();
                out.push((c, b.value.clone(), if b.tight { Kind::Eq } else { Kind::Strict }));
            }
        }
        for e in &self.extra {
            let mut c = alloc::vec![S::zero(); n];
            for (i, v) in &e.coeffs {
                c[*i] = c[*i].clone() + v.clone();
            }
            out.push((c, e.rhs.clone(), Kind::Weak));
        }
        if let Some(r) = &self.box_radius {
            for i in 0..n {
                for s in [S::one(), -S::one()] {
                    let mut c = alloc::vec![S::zero(); n];
                    c[i] = s;
                    out.push((c, r.clone(), Kind::Weak));
                }
            }
        }
        out
    }

    fn lp_rows(&self, with_eps: bool) -> Vec<Row<S>> {
        let n = self.n();
        // Variables: tau_i = x_i - x_{n+i}, eps = x_{2n} - x_{2n+1}.
        let width = 2 * n + if with_eps { 2 } else { 0 };
        let mut rows = Vec::new();
        for (c, rhs, kind) in self.constraints() {
            let mut coeffs = alloc::vec![S::zero(); width];
            for i in 0..n {
                coeffs[i] = c[i].clone();
                coeffs[n + i] = -c[i].clone();
            }
            if with_eps && kind == Kind::Strict {
                coeffs[2 * n] = S::one();
                coeffs[2 * n + 1] = -S::one();
            }
            rows.push(Row { coeffs, kind: if kind == Kind::Eq { RowKind::Eq } else { RowKind::Le }, rhs });
        }
        if with_eps {
            let mut coeffs = alloc::vec![S::zero(); width];
            coeffs[2 * n] = S::one();
            coeffs[2 * n + 1] = -S::one();
            rows.push(Row { coeffs, kind: RowKind::Le, rhs: S::one() });
        }
        rows
    }

    fn decode(&self, x: &[S]) -> MoebiusVector<S> {
        let n = self.n();
        MoebiusVector((0..n).map(|i| x[i].clone() - x[n + i].clone()).collect())
    }

    /// Largest residual sign check: every row satisfied (closed reading).
    pub fn is_satisfied(&self, tau: &MoebiusVector<S>) -> bool {
        self.constraints().into_iter().all(|(c, rhs, kind)| {
            let v = c.iter().zip(&tau.0).fold(S::zero(), |a, (x, y)| a + x.clone() * y.clone());
            match kind {
                Kind::Eq => self.tol.eq(&v, &rhs),
                _ => self.tol.le(&v, &rhs),
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Eq,
    Strict,
    Weak,
}

/// Decide `C(R)` and `C(R)*` with one slack-maximizing LP.
pub fn solve<S: Scalar>(system: &CellSystem<S>) -> Result<FeasibilityResult<S>> {
    let n = system.n();
    let mut objective = alloc::vec![S::zero(); 2 * n + 2];
    objective[2 * n] = S::one();
    objective[2 * n + 1] = -S::one();
    let rows = system.lp_rows(true);
    match lp::maximize(&objective, &rows, system.tol, system.iteration_cap)? {
        LpOutcome::Infeasible => Ok(FeasibilityResult { status: Status::Empty, witness: None, max_slack: None }),
        LpOutcome::Unbounded => Err(Error::InvariantViolation("slack LP reported unbounded".into())),
        LpOutcome::Optimal { x, value } => {
            let witness = system.decode(&x);
            Ok(match system.tol.sign(&value) {
                Ordering::Less => FeasibilityResult { status: Status::Empty, witness: None, max_slack: None },
                Ordering::Equal => {
                    FeasibilityResult { status: Status::BoundaryOnly, witness: Some(witness), max_slack: None }
                }
                Ordering::Greater => {
                    FeasibilityResult { status: Status::Interior, witness: Some(witness), max_slack: Some(value) }
                }
            })
        }
    }
}

/// Maximize `objective . tau` over the closed cell (with its bounds and box).
pub fn optimize<S: Scalar>(system: &CellSystem<S>, objective: &[S]) -> Result<LpOutcome<S>> {
    let n = system.n();
    if objective.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: objective.len() });
    }
    let mut obj = alloc::vec![S::zero(); 2 * n];
    for i in 0..n {
        obj[i] = objective[i].clone();
        obj[n + i] = -objective[i].clone();
    }
    let rows = system.lp_rows(false);
    Ok(match lp::maximize(&obj, &rows, system.tol, system.iteration_cap)? {
        LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x: system.decode(&x).0, value },
        other => other,
    })
}

pub fn is_cell_nonempty<S: Scalar>(space: &LogSpace<S>, relation: &PairRelation) -> Result<bool> {
    if !relation.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    Ok(solve(&CellSystem::for_space(space, *relation)?)?.status != Status::Empty)
}

/// `C(R)* != {}`, i.e. `R` is an antipodal relation.
pub fn is_interior_nonempty<S: Scalar>(space: &LogSpace<S>, relation: &PairRelation) -> Result<bool> {
    if !relation.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    Ok(solve(&CellSystem::for_space(space, *relation)?)?.status == Status::Interior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn exact_star() -> LogSpace<Rational> {
        let a = SymMatrix::from_fn(4, |i, j| if i == j || i == 0 { q(0, 1) } else { q(-2, 1) });
        LogSpace::new(a, Tolerance::default()).unwrap()
    }

    fn square() -> LogSpace<f64> {
        let l2 = libm::log(2.0);
        let a = SymMatrix::from_fn(4, |i, j| match (i, j) {
            (1, 2) | (1, 3) => -4.0 * l2,
            (2, 3) => -2.0 * l2,
            _ => 0.0,
        });
        LogSpace::new(a, Tolerance::default()).unwrap()
    }

    fn rel(n: usize, p: &[(usize, usize)]) -> PairRelation {
        PairRelation::from_pairs(n, p.iter().copied()).unwrap()
    }

    #[test]
    fn star_ray_is_interior() {
        let s = exact_star();
        let res = solve(&CellSystem::for_space(&s, PairRelation::star(4, 0)).unwrap()).unwrap();
        assert_eq!(res.status, Status::Interior);
        let w = res.witness.unwrap();
        // On the ray: tau_j = -tau_1 and tau_1 above the threshold -a_34 / 2 = 1.
        assert!(w[0] > q(-1, 1));
        for j in 1..4 {
            assert_eq!(w[j].clone(), -w[0].clone());
        }
    }

    #[test]
    fn star_face_is_boundary_only() {
        let s = exact_star();
        let r = PairRelation::star(4, 0).union(&rel(4, &[(1, 2)]));
        let res = solve(&CellSystem::for_space(&s, r).unwrap()).unwrap();
        assert_eq!(res.status, Status::BoundaryOnly);
        assert_eq!(res.witness.unwrap().0, alloc::vec![q(-1, 1), q(1, 1), q(1, 1), q(1, 1)]);
    }

    #[test]
    fn square_two_cell_witness() {
        let s = square();
        let l2 = libm::log(2.0);
        let res = solve(&CellSystem::for_space(&s, rel(4, &[(0, 1), (2, 3)])).unwrap()).unwrap();
        assert_eq!(res.status, Status::Interior);
        assert!((res.max_slack.unwrap() - l2).abs() < 1e-12);
        let expect = MoebiusVector(alloc::vec![-2.0 * l2, 2.0 * l2, l2, l2]);
        assert!(res.witness.unwrap().distance(&expect) < 1e-9);
    }

    #[test]
    fn square_situation_two_has_no_interior() {
        let s = square();
        assert!(!is_interior_nonempty(&s, &rel(4, &[(0, 2), (1, 3)])).unwrap());
        for i in 0..4 {
            assert!(is_interior_nonempty(&s, &PairRelation::star(4, i)).unwrap());
        }
        assert_eq!(is_cell_nonempty(&s, &rel(4, &[(1, 2)])), Err(Error::NotAdmissible));
    }

    #[test]
    fn ray_is_unbounded_until_boxed() {
        let s = exact_star();
        let sys = CellSystem::for_space(&s, PairRelation::star(4, 1)).unwrap();
        let mut obj = alloc::vec![q(0, 1); 4];
        obj[1] = q(1, 1);
        assert_eq!(optimize(&sys, &obj).unwrap(), LpOutcome::Unbounded);
        match optimize(&sys.with_box(q(7, 1)), &obj).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(7, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_witnesses() {
        let s = exact_star();
        let sys = CellSystem::for_space(&s, PairRelation::star(4, 2)).unwrap();
        assert_eq!(solve(&sys).unwrap(), solve(&sys).unwrap());
    }
}

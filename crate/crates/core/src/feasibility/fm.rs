//! Fourier–Motzkin elimination, kept as an independent feasibility oracle.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{CellSystem, Kind, Regime};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

/// Largest dimension accepted by the eliminator.
pub const FM_MAX_N: usize = 6;
const FM_MAX_ROWS: usize = 200_000;

#[derive(Clone, Debug)]
struct Ineq<S> {
    coeffs: Vec<S>,
    rhs: S,
    strict: bool,
}

impl<S: Scalar> Ineq<S> {
    /// Scale so that the first non-zero coefficient has absolute value one.
    fn normalized(mut self, tol: Tolerance) -> Self {
        if let Some(p) = self.coeffs.iter().find(|c| !tol.is_zero(*c)).map(|c| c.abs()) {
            for c in self.coeffs.iter_mut() {
                *c = c.clone() / p.clone();
            }
            self.rhs = self.rhs.clone() / p;
        }
        for c in self.coeffs.iter_mut() {
            if !S::EXACT && tol.is_zero(c) {
                *c = S::zero();
            }
        }
        self
    }

    fn is_constant(&self, tol: Tolerance) -> bool {
        self.coeffs.iter().all(|c| tol.is_zero(c))
    }

    /// `0 (<|<=) rhs`.
    fn constant_holds(&self, tol: Tolerance) -> bool {
        match tol.sign(&self.rhs) {
            Ordering::Greater => true,
            Ordering::Equal => !self.strict,
            Ordering::Less => false,
        }
    }
}

/// Decide `C(R) != {}` (closed regime) or `C(R)* != {}` (open regime) by
/// substituting the equalities and eliminating the remaining variables.
pub fn fourier_motzkin_feasible<S: Scalar>(system: &CellSystem<S>, regime: Regime) -> Result<bool> {
    let n = system.n();
    if n > FM_MAX_N {
        return Err(Error::LimitExceeded(format!("Fourier-Motzkin supports n <= {FM_MAX_N}")));
    }
    let tol = system.tolerance();
    let mut eqs = Vec::new();
    let mut ineqs = Vec::new();
    for (coeffs, rhs, kind) in system.constraints() {
        match kind {
            Kind::Eq => eqs.push((coeffs, rhs)),
            Kind::Strict => ineqs.push(Ineq { coeffs, rhs, strict: regime == Regime::Open }),
            Kind::Weak => ineqs.push(Ineq { coeffs, rhs, strict: false }),
        }
    }

    // Substitute equalities one variable at a time.
    while let Some((c, b)) = eqs.pop() {
        let Some(k) = c.iter().position(|x| !tol.is_zero(x)) else {
            if !tol.is_zero(&b) {
                return Ok(false);
            }
            continue;
        };
        // x_k = (b - sum_{j != k} c_j x_j) / c_k
        let ck = c[k].clone();
        let subst = |coeffs: &mut Vec<S>, rhs: &mut S| {
            let f = coeffs[k].clone() / ck.clone();
            if f == S::zero() {
                return;
            }
            for j in 0..n {
                let v = c[j].clone() * f.clone();
                coeffs[j] = coeffs[j].clone() - v;
            }
            coeffs[k] = S::zero();
            *rhs = rhs.clone() - b.clone() * f;
        };
        for (ec, eb) in eqs.iter_mut() {
            subst(ec, eb);
        }
        for q in ineqs.iter_mut() {
            subst(&mut q.coeffs, &mut q.rhs);
        }
    }

    let mut rows: Vec<Ineq<S>> = ineqs.into_iter().map(|q| q.normalized(tol)).collect();
    for var in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for q in rows {
            match tol.sign(&q.coeffs[var]) {
                Ordering::Greater => pos.push(q),
                Ordering::Less => neg.push(q),
                Ordering::Equal => rest.push(q),
            }
        }
        if pos.len() * neg.len() + rest.len() > FM_MAX_ROWS {
            return Err(Error::LimitExceeded("Fourier-Motzkin row blowup".into()));
        }
        for p in &pos {
            for m in &neg {
                // p: x + ... (<) b1, m: -x + ... (<) b2 after normalization.
                let fp = p.coeffs[var].abs();
                let fm = m.coeffs[var].abs();
                let coeffs: Vec<S> = (0..n)
                    .map(|j| {
                        if j == var {
                            S::zero()
                        } else {
                            p.coeffs[j].clone() * fm.clone() + m.coeffs[j].clone() * fp.clone()
                        }
                    })
                    .collect();
                let rhs = p.rhs.clone() * fm.clone() + m.rhs.clone() * fp.clone();
                rest.push(Ineq { coeffs, rhs, strict: p.strict || m.strict }.normalized(tol));
            }
        }
        rows = prune(rest, tol)?;
    }
    Ok(rows.iter().all(|q| q.constant_holds(tol)))
}

/// Check constant rows and keep only the tightest row per coefficient vector.
fn prune<S: Scalar>(rows: Vec<Ineq<S>>, tol: Tolerance) -> Result<Vec<Ineq<S>>> {
    let mut out: Vec<Ineq<S>> = Vec::new();
    for q in rows {
        if q.is_constant(tol) {
            if !q.constant_holds(tol) {
                // Keep a single violated constant row as the verdict.
                return Ok(alloc::vec![q]);
            }
            continue;
        }
        match out.iter_mut().find(|o| o.coeffs.iter().zip(&q.coeffs).all(|(a, b)| tol.eq(a, b))) {
            Some(o) => match tol.cmp(&q.rhs, &o.rhs) {
                Ordering::Less => *o = q,
                Ordering::Equal => o.strict |= q.strict,
                Ordering::Greater => {}
            },
            None => out.push(q),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{solve, Status};
    use crate::matrix::SymMatrix;
    use crate::relations::{pair_count, PairRelation};
    use crate::scalar::Rational;

    fn agree_on_all_admissible(a: SymMatrix<Rational>) {
        let n = a.n();
        for mask in 1u64..(1 << pair_count(n)) {
            let r = PairRelation::from_mask(n, mask);
            if !r.is_admissible() {
                continue;
            }
            let sys = CellSystem::new(a.clone(), r, Tolerance::default()).unwrap();
            let st = solve(&sys).unwrap().status;
            assert_eq!(st != Status::Empty, fourier_motzkin_feasible(&sys, Regime::Closed).unwrap(), "{r}");
            assert_eq!(st == Status::Interior, fourier_motzkin_feasible(&sys, Regime::Open).unwrap(), "{r}");
        }
    }

    #[test]
    fn agrees_on_exact_star() {
        agree_on_all_admissible(SymMatrix::from_fn(4, |i, j| {
            if i == j || i == 0 {
                Rational::from_i64(0)
            } else {
                Rational::from_i64(-2)
            }
        }));
    }

    #[test]
    fn agrees_on_exact_square() {
        // a_23 = a_24 = -4, a_34 = -2: the square shape with ln 2 replaced by 1.
        agree_on_all_admissible(SymMatrix::from_fn(4, |i, j| {
            Rational::from_i64(match (i, j) {
                (1, 2) | (1, 3) => -4,
                (2, 3) => -2,
                _ => 0,
            })
        }));
    }

    #[test]
    fn trivial_system_is_feasible() {
        let a = SymMatrix::from_fn(4, |_, _| Rational::from_i64(-1));
        let sys = CellSystem::new(a, PairRelation::empty(4), Tolerance::default()).unwrap();
        assert!(fourier_motzkin_feasible(&sys, Regime::Open).unwrap());
    }

    #[test]
    fn guards_dimension() {
        let a = SymMatrix::from_fn(7, |_, _| Rational::from_i64(0));
        let sys = CellSystem::new(a, PairRelation::empty(7), Tolerance::default()).unwrap();
        assert!(matches!(fourier_motzkin_feasible(&sys, Regime::Closed), Err(Error::LimitExceeded(_))));
    }
}

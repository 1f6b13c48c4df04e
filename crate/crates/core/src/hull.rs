//! Tight spans of finite metric spaces and the ball identities of the
//! Moebius space.
//!
//! The tight span `E(X)` is built by the complex engine in coordinates
//! `tau = -f` with weights `a_ij = d(x_i, x_j)` and bounds `tau_i <= 0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::complex::{assemble, sphere_points, Complex, Options};
use crate::error::{Error, Result};
use crate::feasibility::{self, LinearConstraint, Status};
use crate::matrix::SymMatrix;
use crate::relations::MAX_RELATION_N;
use crate::sample;
use crate::scalar::{Scalar, Tolerance};
use crate::space::MoebiusVector;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric<S> {
    d: SymMatrix<S>,
    labels: Vec<String>,
    tol: Tolerance,
}

/// Check that `rows` is a metric with at least two points.
///
/// `tol` is scaled by the largest distance.
pub fn validate_metric<S: Scalar>(rows: Vec<Vec<S>>, tol: Tolerance) -> Result<FiniteMetric<S>> {
    let m = rows.len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::NotSquare);
    }
    if m < 2 {
        return Err(Error::TooSmall { needed: 2, got: m });
    }
    let sup = rows.iter().flatten().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
    let tol = tol.scaled(sup);
    for i in 0..m {
        if !rows[i][i].is_finite() || !tol.is_zero(&rows[i][i]) {
            return Err(Error::BadDiagonal(i));
        }
        for j in 0..m {
            if !rows[i][j].is_finite() {
                return Err(Error::NotFinite(i, j));
            }
            if !tol.eq(&rows[i][j], &rows[j][i]) {
                return Err(Error::NotSymmetric(i, j));
            }
            if i != j && tol.sign(&rows[i][j]) != Ordering::Greater {
                return Err(Error::NotPositive(i, j));
            }
        }
    }
    let d = SymMatrix::from_fn(m, |i, j| if i == j { S::zero() } else { rows[i][j].clone() });
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let via = d.get(x, y).clone() + d.get(y, z).clone();
                if !tol.le(d.get(x, z), &via) {
                    return Err(Error::TriangleViolation(x, y, z));
                }
            }
        }
    }
    Ok(FiniteMetric { d, labels: (1..=m).map(|i| format!("{i}")).collect(), tol })
}

impl<S: Scalar> FiniteMetric<S> {
    pub fn m(&self) -> usize {
        self.d.n()
    }

    pub fn d(&self, x: usize, y: usize) -> &S {
        self.d.get(x, y)
    }

    pub fn matrix(&self) -> &SymMatrix<S> {
        &self.d
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// The Kuratowski function `d_x`.
    pub fn kuratowski(&self, x: usize) -> Vec<S> {
        (0..self.m()).map(|y| self.d(x, y).clone()).collect()
    }
}

/// `f >= 0`, `f(x) + f(y) >= d(x, y)` and every `x` attains equality at some `y != x`.
pub fn is_extremal<S: Scalar>(metric: &FiniteMetric<S>, f: &[S]) -> bool {
    let m = metric.m();
    if f.len() != m {
        return false;
    }
    let tol = metric.tol;
    if f.iter().any(|v| !tol.le(&S::zero(), v)) {
        return false;
    }
    (0..m).all(|x| {
        let mut tight = false;
        for y in (0..m).filter(|&y| y != x) {
            let s = f[x].clone() + f[y].clone();
            match tol.cmp(&s, metric.d(x, y)) {
                Ordering::Less => return false,
                Ordering::Equal => tight = true,
                Ordering::Greater => {}
            }
        }
        tight
    })
}

/// `E(X)` as a complex in `tau = -f` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TightSpan<S> {
    metric: FiniteMetric<S>,
    complex: Complex<S>,
}

impl<S: Scalar> TightSpan<S> {
    pub fn metric(&self) -> &FiniteMetric<S> {
        &self.metric
    }

    /// The underlying complex (coordinates `tau = -f`).
    pub fn complex(&self) -> &Complex<S> {
        &self.complex
    }

    /// Witness of a cell as a function on `X`.
    pub fn point(&self, id: usize) -> Vec<S> {
        self.complex.cell(id).witness.0.iter().map(|t| -t.clone()).collect()
    }

    /// Vertices as `(cell id, f)`.
    pub fn vertices(&self) -> Vec<(usize, Vec<S>)> {
        self.complex.vertices().map(|c| (c.id, self.point(c.id))).collect()
    }

    /// Vertex cell at `d_x`.
    pub fn kuratowski_vertex(&self, x: usize) -> Option<usize> {
        let dx = self.metric.kuratowski(x);
        self.complex.vertices().find(|c| self.point(c.id).iter().zip(&dx).all(|(a, b)| self.metric.tol.eq(a, b))).map(|c| c.id)
    }
}

pub fn tight_span<S: Scalar>(metric: &FiniteMetric<S>, options: Options) -> Result<TightSpan<S>> {
    let limit = options.max_n.min(MAX_RELATION_N);
    if metric.m() > limit {
        return Err(Error::LimitExceeded(format!("m = {} exceeds max_n = {limit}", metric.m())));
    }
    let complex = assemble(metric.d.clone(), true, metric.labels.clone(), metric.tol, None)?;
    if complex.cells().iter().any(|c| !c.bounded) {
        return Err(Error::InvariantViolation("unbounded tight-span cell".into()));
    }
    Ok(TightSpan { metric: metric.clone(), complex })
}

/// The metric space `S_r = {x_i^r}` of sphere points.
pub fn sphere_metric<S: Scalar>(complex: &Complex<S>, r: &S) -> Result<FiniteMetric<S>> {
    let s = sphere_points(complex, r)?;
    let n = s.points.len();
    let rows = (0..n).map(|i| (0..n).map(|j| s.points[i].distance(&s.points[j])).collect()).collect();
    validate_metric(rows, complex.tolerance())?.with_labels(complex.labels().to_vec())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallHullReport {
    pub r: f64,
    /// Tight-span vertices checked in direction (a).
    pub vertices: usize,
    /// Ball members checked in direction (b).
    pub samples: usize,
    /// Sampled points discarded for lying outside the ball.
    pub rejected: usize,
    /// `max |(r - tau_i) - d(tau, x_i^r)|` over all checked points.
    pub max_deviation: f64,
    pub failures: Vec<String>,
}

impl BallHullReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Ray parameters are sampled in `[0, BALL_RAY_FACTOR * r]`.
const BALL_RAY_FACTOR: i64 = 2;
const MAX_REJECTIONS_PER_SAMPLE: usize = 200;

/// Check `B(0, r) = E(S_r)` under `f = r - tau`.
pub fn ball_hull_check<S: Scalar>(complex: &Complex<S>, r: &S, samples: usize, seed: u64) -> Result<BallHullReport> {
    let space = complex.space().ok_or_else(|| Error::PreconditionViolated("not a Moebius complex".into()))?;
    let sphere = sphere_points(complex, r)?;
    let metric = sphere_metric(complex, r)?;
    let tol = complex.tolerance();
    let n = complex.n();
    let mut failures = Vec::new();
    let mut max_deviation = 0.0f64;
    let mut deviation = |tau: &MoebiusVector<S>, f: &[S], failures: &mut Vec<String>| {
        for i in 0..n {
            let d = tau.distance(&sphere.points[i]);
            let dev = (f[i].clone() - d.clone()).abs();
            max_deviation = max_deviation.max(dev.to_f64());
            if !tol.eq(&f[i], &d) {
                failures.push(format!("f({i}) = {} but d(tau, x_{i}) = {d}", f[i]));
            }
        }
    };

    let ts = tight_span(&metric, Options { max_n: n, ..Options::default() })?;
    let vertices = ts.vertices();
    for (_, f) in &vertices {
        let tau = MoebiusVector(f.iter().map(|v| r.clone() - v.clone()).collect());
        if !space.is_member(&tau)? {
            failures.push(format!("tight-span vertex {f:?} maps outside the space"));
        }
        if !tol.le(&tau.norm(), r) {
            failures.push(format!("tight-span vertex {f:?} maps outside the ball"));
        }
        deviation(&tau, f, &mut failures);
    }

    let mut rng = sample::rng(seed);
    let window = r.clone() * S::from_i64(BALL_RAY_FACTOR);
    let mut rejected = 0;
    let mut taken = 0;
    while taken < samples {
        let tau = sample::sample_point(complex, &window, &mut rng);
        if !tol.le(&tau.norm(), r) {
            rejected += 1;
            if rejected > MAX_REJECTIONS_PER_SAMPLE * samples.max(1) {
                return Err(Error::LimitExceeded("too many ball rejections".into()));
            }
            continue;
        }
        taken += 1;
        let f: Vec<S> = tau.0.iter().map(|t| r.clone() - t.clone()).collect();
        if !is_extremal(&metric, &f) {
            failures.push(format!("ball member {tau:?} gives a non-extremal function"));
        }
        deviation(&tau, &f, &mut failures);
    }

    Ok(BallHullReport {
        r: r.to_f64(),
        vertices: vertices.len(),
        samples: taken,
        rejected,
        max_deviation,
        failures,
    })
}

/// A common point of the closed balls `B(centers[k], radii[k])`.
///
/// Cells are scanned by id; the first cell whose LP is feasible wins.
pub fn hyperconvexity_witness<S: Scalar>(
    complex: &Complex<S>,
    centers: &[MoebiusVector<S>],
    radii: &[S],
) -> Result<MoebiusVector<S>> {
    let space = complex.space().ok_or_else(|| Error::PreconditionViolated("not a Moebius complex".into()))?;
    let tol = complex.tolerance();
    let n = complex.n();
    if centers.len() != radii.len() {
        return Err(Error::DimensionMismatch { expected: centers.len(), got: radii.len() });
    }
    if centers.is_empty() {
        return Err(Error::PreconditionViolated("no balls".into()));
    }
    for (k, c) in centers.iter().enumerate() {
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        if !space.is_member(c)? {
            return Err(Error::PreconditionViolated(format!("center {k} is not a member")));
        }
        if !tol.le(&S::zero(), &radii[k]) {
            return Err(Error::PreconditionViolated(format!("radius {k} is negative")));
        }
    }
    for k in 0..centers.len() {
        for l in (k + 1)..centers.len() {
            let s = radii[k].clone() + radii[l].clone();
            if !tol.le(&centers[k].distance(&centers[l]), &s) {
                return Err(Error::PreconditionViolated(format!("balls {k} and {l} are too far apart")));
            }
        }
    }

    let inside = |w: &MoebiusVector<S>| centers.iter().zip(radii).all(|(c, r)| tol.le(&w.distance(c), r));
    for cell in complex.cells() {
        let mut sys = complex.system_for(&cell.label())?;
        for (c, r) in centers.iter().zip(radii) {
            for i in 0..n {
                sys = sys
                    .with_constraint(LinearConstraint { coeffs: alloc::vec![(i, S::one())], rhs: c[i].clone() + r.clone() })
                    .with_constraint(LinearConstraint {
                        coeffs: alloc::vec![(i, -S::one())],
                        rhs: r.clone() - c[i].clone(),
                    });
            }
        }
        let res = feasibility::solve(&sys)?;
        if res.status == Status::Empty {
            continue;
        }
        let w = res.witness.ok_or_else(|| Error::InvariantViolation("feasible LP without witness".into()))?;
        if space.is_member(&w)? && inside(&w) {
            return Ok(w);
        }
        return Err(Error::InvariantViolation(format!("cell {} LP returned an invalid witness", cell.id)));
    }
    Err(Error::CounterexampleFound("no common point of the balls".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::scalar::Rational;
    use crate::space::LogSpace;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn metric(rows: &[&[i64]], den: i64) -> FiniteMetric<Rational> {
        validate_metric(rows.iter().map(|r| r.iter().map(|&v| q(v, den)).collect()).collect(), Tolerance::default())
            .unwrap()
    }

    fn exact_star() -> LogSpace<Rational> {
        let a = SymMatrix::from_fn(4, |i, j| if i == j || i == 0 { q(0, 1) } else { q(-2, 1) });
        LogSpace::new(a, Tolerance::default()).unwrap()
    }

    #[test]
    fn validation() {
        metric(&[&[0, 1], &[1, 0]], 1);
        let bad = validate_metric(alloc::vec![alloc::vec![q(0, 1), q(3, 1), q(1, 1)], alloc::vec![q(3, 1), q(0, 1), q(1, 1)], alloc::vec![q(1, 1), q(1, 1), q(0, 1)]], Tolerance::default());
        assert!(matches!(bad, Err(Error::TriangleViolation(..))));
        let asym = validate_metric(alloc::vec![alloc::vec![0.0, 1.0], alloc::vec![2.0, 0.0]], Tolerance::default());
        assert!(matches!(asym, Err(Error::NotSymmetric(..))));
        let zero = validate_metric(alloc::vec![alloc::vec![0.0, 0.0], alloc::vec![0.0, 0.0]], Tolerance::default());
        assert!(matches!(zero, Err(Error::NotPositive(..))));
        let diag = validate_metric(alloc::vec![alloc::vec![1.0, 1.0], alloc::vec![1.0, 0.0]], Tolerance::default());
        assert!(matches!(diag, Err(Error::BadDiagonal(0))));
        assert!(matches!(validate_metric(alloc::vec![alloc::vec![0.0]], Tolerance::default()), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn extremal_functions() {
        let tri = metric(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]], 1);
        assert!(is_extremal(&tri, &[q(1, 2), q(1, 2), q(1, 2)]));
        assert!(is_extremal(&tri, &tri.kuratowski(0)));
        let shifted: Vec<Rational> = tri.kuratowski(0).into_iter().map(|v| v + q(1, 1)).collect();
        assert!(!is_extremal(&tri, &shifted));
        assert!(!is_extremal(&tri, &[q(1, 2), q(1, 2)]));
    }

    #[test]
    fn two_point_segment() {
        let ts = tight_span(&metric(&[&[0, 1], &[1, 0]], 1), Options::default()).unwrap();
        assert_eq!(ts.complex().f_vector().bounded, alloc::vec![2, 1]);
        assert!(ts.kuratowski_vertex(0).is_some() && ts.kuratowski_vertex(1).is_some());
    }

    #[test]
    fn equilateral_tripod() {
        let ts = tight_span(&metric(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]], 1), Options::default()).unwrap();
        assert_eq!(ts.complex().f_vector().bounded, alloc::vec![4, 3]);
        let c = ts.complex();
        let center = c.vertices().find(|v| ts.point(v.id) == alloc::vec![q(1, 2); 3]).unwrap();
        for x in 0..3 {
            let k = ts.kuratowski_vertex(x).unwrap();
            let leg = c.cells().iter().find(|e| e.dim == 1 && e.vertices.contains(&k)).unwrap();
            assert!(leg.vertices.contains(&center.id));
            assert_eq!(c.edge_length(leg.id), Some(q(1, 2)));
        }
    }

    #[test]
    fn star_sphere_tight_span() {
        let l3 = libm::log(3.0);
        let a = SymMatrix::from_fn(4, |i, j| if i == j || i == 0 { 0.0 } else { -2.0 * l3 });
        let c = build_complex(&LogSpace::new(a, Tolerance::default()).unwrap(), Options::default()).unwrap();
        let m = sphere_metric(&c, &10.0).unwrap();
        assert!((m.d(0, 1) - 20.0).abs() < 1e-12);
        assert!((m.d(1, 2) - (20.0 - 2.0 * l3)).abs() < 1e-12);
        let ts = tight_span(&m, Options::default()).unwrap();
        let mut legs: Vec<f64> = ts.complex().cells().iter().filter_map(|e| ts.complex().edge_length(e.id)).collect();
        legs.sort_by(f64::total_cmp);
        assert_eq!(legs.len(), 4);
        for l in &legs[..3] {
            assert!((l - (10.0 - l3)).abs() < 1e-9);
        }
        assert!((legs[3] - (10.0 + l3)).abs() < 1e-9);
    }

    #[test]
    fn ball_hull_on_star() {
        let c = build_complex(&exact_star(), Options::default()).unwrap();
        // At r = r_tilde = 1 the points x_2, x_3, x_4 coincide.
        assert!(matches!(sphere_metric(&c, &q(1, 1)), Err(Error::NotPositive(..))));
        for r in [q(3, 2), q(2, 1), q(6, 1), q(10, 1)] {
            let rep = ball_hull_check(&c, &r, 100, 3).unwrap();
            assert!(rep.ok(), "{:?}", rep.failures);
            assert_eq!(rep.max_deviation, 0.0);
        }
        let centre: Vec<Rational> = alloc::vec![q(10, 1); 4];
        assert!(is_extremal(&sphere_metric(&c, &q(10, 1)).unwrap(), &centre));
        assert!(matches!(ball_hull_check(&c, &q(1, 2), 10, 0), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn hyperconvexity() {
        let c = build_complex(&exact_star(), Options::default()).unwrap();
        let v = MoebiusVector(alloc::vec![q(-1, 1), q(1, 1), q(1, 1), q(1, 1)]);
        let far = MoebiusVector(alloc::vec![q(4, 1), q(-4, 1), q(-4, 1), q(-4, 1)]);
        assert_eq!(hyperconvexity_witness(&c, &[v.clone()], &[q(0, 1)]).unwrap(), v);
        let d = v.distance(&far);
        let w = hyperconvexity_witness(&c, &[v.clone(), far.clone()], &[q(2, 1), d.clone() - q(2, 1)]).unwrap();
        assert_eq!(w.distance(&v), q(2, 1));
        assert!(matches!(
            hyperconvexity_witness(&c, &[v, far], &[q(1, 1), q(1, 1)]),
            Err(Error::PreconditionViolated(_))
        ));
    }
}

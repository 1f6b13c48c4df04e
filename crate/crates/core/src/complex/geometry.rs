//! Metric queries on a Moebius complex.

use alloc::vec::Vec;

use super::Complex;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::SymMatrix;
use crate::relations::relation_of_point;
use crate::sample;
use crate::scalar::Scalar;
use crate::space::{gromov_product, LogSpace, MoebiusVector};

fn moebius_space<S: Scalar>(complex: &Complex<S>) -> Result<&LogSpace<S>> {
    complex.space().ok_or_else(|| Error::PreconditionViolated("not a Moebius complex".into()))
}

/// Stable radius: the maximum of all vertex norms, all ray thresholds and
/// all `-a_ij / 2`.
pub fn r_tilde<S: Scalar>(complex: &Complex<S>) -> Result<S> {
    let space = moebius_space(complex)?;
    let mut r = S::zero();
    for v in complex.vertices() {
        r = S::max_of(&r, &v.witness.norm());
    }
    for ray in complex.rays().filter_map(|c| c.ray.as_ref()) {
        r = S::max_of(&r, &ray.t_min);
    }
    let n = space.n();
    for i in 0..n {
        for j in (i + 1)..n {
            r = S::max_of(&r, &(-space.weight(i, j).half()));
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereSpec<S> {
    pub r: S,
    pub r_tilde: S,
    /// `points[i]` lies on the ray ending at boundary point `i`.
    pub points: Vec<MoebiusVector<S>>,
}

impl<S: Scalar> SphereSpec<S> {
    /// `d(x_i, x_j)` as a matrix.
    pub fn distances(&self) -> SymMatrix<S> {
        SymMatrix::from_fn(self.points.len(), |i, j| self.points[i].distance(&self.points[j]))
    }
}

/// The points `x_i^r` at parameter `t = r` on each ray.
pub fn sphere_points<S: Scalar>(complex: &Complex<S>, r: &S) -> Result<SphereSpec<S>> {
    let r_tilde = r_tilde(complex)?;
    if *r < r_tilde && !complex.tolerance().eq(r, &r_tilde) {
        return Err(Error::RadiusTooSmall { r: r.to_f64(), r_tilde: r_tilde.to_f64() });
    }
    let n = complex.n();
    let mut points = alloc::vec![None; n];
    for c in complex.rays() {
        let ray = c.ray.as_ref().ok_or_else(|| Error::InvariantViolation("ray without spec".into()))?;
        let s = r.clone() - ray.t_min.clone();
        let base = &complex.cell(ray.endpoint).witness;
        let p = MoebiusVector(base.0.iter().zip(&ray.direction).map(|(x, d)| x.clone() + d.clone() * s.clone()).collect());
        points[ray.center] = Some(p);
    }
    let points = points
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvariantViolation("missing ray".into()))?;
    Ok(SphereSpec { r: r.clone(), r_tilde, points })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VisualReport<S> {
    pub r: S,
    /// `(x_i^r | x_j^r)` based at `tau = 0`.
    pub products: SymMatrix<S>,
    /// `max |exp(-(x_i|x_j)) - rho0(i, j)|`.
    pub max_deviation: f64,
    /// Pairs where `(x_i|x_j) != -a_ij / 2` under the space's tolerance.
    pub mismatches: usize,
}

pub fn visual_recovery_check<S: Scalar>(complex: &Complex<S>, r: &S) -> Result<VisualReport<S>> {
    let space = moebius_space(complex)?;
    let sphere = sphere_points(complex, r)?;
    let n = space.n();
    let base = MoebiusVector::zeros(n);
    let products = SymMatrix::from_fn(n, |i, j| {
        if i == j {
            S::zero()
        } else {
            gromov_product(&sphere.points[i], &sphere.points[j], &base)
        }
    });
    let mut max_deviation = 0.0f64;
    let mut mismatches = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = products.get(i, j);
            let dev = libm::fabs(libm::exp(-p.to_f64()) - space.rho_f64(i, j));
            max_deviation = max_deviation.max(dev);
            if !space.tolerance().eq(p, &(-space.weight(i, j).half())) {
                mismatches += 1;
            }
        }
    }
    Ok(VisualReport { r: r.clone(), products, max_deviation, mismatches })
}

/// Dimension of `{v : v_i + v_j = 0 for {i, j} in relation_of_point(tau)}`.
pub fn tangent_dimension<S: Scalar>(space: &LogSpace<S>, tau: &MoebiusVector<S>) -> Result<usize> {
    let r = relation_of_point(space, tau)?;
    let n = space.n();
    let rows: Vec<Vec<S>> = r
        .pairs()
        .map(|(i, j)| {
            let mut v = alloc::vec![S::zero(); n];
            v[i] = S::one();
            v[j] = S::one();
            v
        })
        .collect();
    Ok(linalg::nullity(&rows, n, space.tolerance()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    pub delta: f64,
    pub quadruples: usize,
    /// Quadruples violating the four-point inequality with the reported `delta`.
    pub violations: usize,
}

/// Ray sampling window used by [`delta_estimate`].
pub const DELTA_RAY_WINDOW: i64 = 10;

/// `max min((x|y)_w, (y|z)_w) - (x|z)_w` over role assignments of sampled quadruples.
fn quadruple_delta(p: &[MoebiusVector<f64>; 4]) -> f64 {
    let d = |a: usize, b: usize| p[a].distance(&p[b]);
    let mut best = 0.0f64;
    for w in 0..4 {
        let gp = |a: usize, b: usize| 0.5 * (d(a, w) + d(b, w) - d(a, b));
        let others: Vec<usize> = (0..4).filter(|&k| k != w).collect();
        for y in 0..3 {
            let (x, z) = (others[(y + 1) % 3], others[(y + 2) % 3]);
            let y = others[y];
            best = best.max(gp(x, y).min(gp(y, z)) - gp(x, z));
        }
    }
    best
}

pub fn delta_estimate<S: Scalar>(complex: &Complex<S>, samples: usize, seed: u64) -> Result<DeltaReport> {
    let mut rng = sample::rng(seed);
    let window = S::from_i64(DELTA_RAY_WINDOW);
    let mut quads = Vec::with_capacity(samples);
    for _ in 0..samples {
        let q: [MoebiusVector<f64>; 4] =
            core::array::from_fn(|_| sample::sample_point(complex, &window, &mut rng).to_f64());
        quads.push(q);
    }
    let delta = quads.iter().map(quadruple_delta).fold(0.0f64, f64::max);
    let slack = 1e-12 * (1.0 + delta);
    let violations = quads.iter().filter(|q| quadruple_delta(q) > delta + slack).count();
    Ok(DeltaReport { delta, quadruples: quads.len(), violations })
}

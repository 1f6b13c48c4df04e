//! Deterministic random inputs and random points of complexes.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use crate::complex::{CellKind, Complex};
use crate::matrix::SymMatrix;
use crate::scalar::{Rational, Scalar, Tolerance};
use crate::space::{LogSpace, MoebiusVector};

pub type SampleRng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    SampleRng::seed_from_u64(seed)
}

/// Uniform `k / den` for `k` in `0..=den`.
pub fn fraction<S: Scalar>(rng: &mut SampleRng, den: i64) -> S {
    S::from_ratio(rng.gen_range(0..=den), den)
}

/// Random point of one cell. Bounded cells get a random convex combination of
/// their vertices; rays get `endpoint + s * direction` with `s` in `[0, window]`.
pub fn sample_in_cell<S: Scalar>(complex: &Complex<S>, id: usize, window: &S, rng: &mut SampleRng) -> MoebiusVector<S> {
    let cell = complex.cell(id);
    if let (CellKind::Ray, Some(ray)) = (cell.kind, &cell.ray) {
        let s = window.clone() * fraction::<S>(rng, 1000);
        let base = &complex.cell(ray.endpoint).witness;
        return MoebiusVector(base.0.iter().zip(&ray.direction).map(|(x, d)| x.clone() + d.clone() * s.clone()).collect());
    }
    let weights: Vec<i64> = loop {
        let w: Vec<i64> = cell.vertices.iter().map(|_| rng.gen_range(0..=64)).collect();
        if w.iter().any(|&x| x > 0) {
            break w;
        }
    };
    let total = S::from_i64(weights.iter().sum());
    let mut p = MoebiusVector::zeros(complex.n());
    for (&v, &w) in cell.vertices.iter().zip(&weights) {
        if w > 0 {
            p = p.add(&complex.cell(v).witness.scale(&S::from_i64(w)));
        }
    }
    p.scale(&(S::one() / total))
}

/// Random cell (weight `dim + 1`) and a random point in it.
pub fn sample_point<S: Scalar>(complex: &Complex<S>, window: &S, rng: &mut SampleRng) -> MoebiusVector<S> {
    let total: usize = complex.cells().iter().map(|c| c.dim + 1).sum();
    let mut pick = rng.gen_range(0..total);
    for c in complex.cells() {
        if pick < c.dim + 1 {
            return sample_in_cell(complex, c.id, window, rng);
        }
        pick -= c.dim + 1;
    }
    unreachable!("weights cover the range")
}

/// Random exact log-domain space: entries `-k / den` with `k` in `1..=4 den`,
/// plus enough zeros that every row attains `0`.
pub fn random_log_space(rng: &mut SampleRng, n: usize, den: i64) -> LogSpace<Rational> {
    let mut a = SymMatrix::from_fn(n, |i, j| {
        if i == j {
            Rational::zero()
        } else {
            Rational::from_ratio(-1, den)
        }
    });
    for i in 0..n {
        for j in (i + 1)..n {
            a.set(i, j, Rational::from_ratio(-rng.gen_range(1..=4 * den), den));
        }
    }
    for i in 0..n {
        let has_zero = (0..n).any(|j| j != i && *a.get(i, j) == Rational::zero());
        if !has_zero {
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            a.set(i, j, Rational::zero());
        }
    }
    LogSpace::new(a, Tolerance::default()).expect("construction yields an antipodal space")
}

/// Random ultrametric-type space: a random binary hierarchy with
/// `a_ij = -2 h(lca(i, j))`, where `h` grows by random rational steps from the root.
pub fn random_tree_space(rng: &mut SampleRng, n: usize) -> LogSpace<Rational> {
    let mut a = SymMatrix::<Rational>::zeros(n);
    let all: Vec<usize> = (0..n).collect();
    split(rng, &all, Rational::zero(), &mut a);
    LogSpace::new(a, Tolerance::default()).expect("root split gives every row a zero")
}

fn split(rng: &mut SampleRng, set: &[usize], height: Rational, a: &mut SymMatrix<Rational>) {
    if set.len() < 2 {
        return;
    }
    let mut shuffled = set.to_vec();
    for k in (1..shuffled.len()).rev() {
        shuffled.swap(k, rng.gen_range(0..=k));
    }
    let cut = rng.gen_range(1..shuffled.len());
    let (left, right) = shuffled.split_at(cut);
    for &i in left {
        for &j in right {
            a.set(i, j, -height.clone() * Rational::from_i64(2));
        }
    }
    let step = Rational::from_ratio(rng.gen_range(1..=8), 4);
    split(rng, left, height.clone() + step.clone(), a);
    split(rng, right, height + step, a);
}

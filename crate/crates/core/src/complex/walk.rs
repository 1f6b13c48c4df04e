//! Vertices, bounded edges and rays of `P = {tau : l_ij(tau) <= 0 [, tau_i <= 0]}`.
//!
//! `P` is pointed for `n >= 3`, so its graph of vertices and bounded edges is
//! connected. The walk starts from one vertex and explores edges by ratio
//! tests; unbounded edges are recorded as rays.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::Label;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::SymMatrix;
use crate::relations::{pair_at, pair_count, pair_index};
use crate::scalar::{Scalar, Tolerance};
use crate::space::MoebiusVector;

const MAX_VERTICES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RowRef {
    Pair(usize, usize),
    Bound(usize),
}

pub(crate) struct Polyhedron<'a, S> {
    pub n: usize,
    pub a: &'a SymMatrix<S>,
    pub bounded_above: bool,
    pub tol: Tolerance,
}

pub(crate) struct Walk<S> {
    pub vertices: Vec<(MoebiusVector<S>, Label)>,
    /// `(endpoint vertex, direction with sup-norm 1, label)`.
    pub rays: Vec<(usize, Vec<S>, Label)>,
}

impl<S: Scalar> Polyhedron<'_, S> {
    fn pairs(&self) -> usize {
        pair_count(self.n)
    }

    fn rows(&self) -> usize {
        self.pairs() + if self.bounded_above { self.n } else { 0 }
    }

    fn row(&self, k: usize) -> RowRef {
        if k < self.pairs() {
            let (i, j) = pair_at(self.n, k);
            RowRef::Pair(i, j)
        } else {
            RowRef::Bound(k - self.pairs())
        }
    }

    fn value(&self, k: usize, tau: &[S]) -> S {
        match self.row(k) {
            RowRef::Pair(i, j) => tau[i].clone() + tau[j].clone() + self.a.get(i, j).clone(),
            RowRef::Bound(i) => tau[i].clone(),
        }
    }

    fn dot(&self, k: usize, e: &[S]) -> S {
        match self.row(k) {
            RowRef::Pair(i, j) => e[i].clone() + e[j].clone(),
            RowRef::Bound(i) => e[i].clone(),
        }
    }

    fn coeffs(&self, k: usize) -> Vec<S> {
        let mut c = alloc::vec![S::zero(); self.n];
        match self.row(k) {
            RowRef::Pair(i, j) => {
                c[i] = S::one();
                c[j] = S::one();
            }
            RowRef::Bound(i) => c[i] = S::one(),
        }
        c
    }

    fn rhs(&self, k: usize) -> S {
        match self.row(k) {
            RowRef::Pair(i, j) => -self.a.get(i, j).clone(),
            RowRef::Bound(_) => S::zero(),
        }
    }

    pub fn label_rows(&self, label: &Label) -> Vec<usize> {
        (0..self.rows()).filter(|&k| self.in_label(label, k)).collect()
    }

    fn in_label(&self, label: &Label, k: usize) -> bool {
        match self.row(k) {
            RowRef::Pair(_, _) => label.pairs & (1u64 << k) != 0,
            RowRef::Bound(i) => label.zeros & (1u32 << i) != 0,
        }
    }

    fn insert(&self, label: &mut Label, k: usize) {
        match self.row(k) {
            RowRef::Pair(i, j) => label.pairs |= 1u64 << pair_index(self.n, i, j),
            RowRef::Bound(i) => label.zeros |= 1u32 << i,
        }
    }

    pub fn label_of(&self, tau: &[S]) -> Label {
        let mut label = Label::default();
        for k in 0..self.rows() {
            if self.tol.is_zero(&self.value(k, tau)) {
                self.insert(&mut label, k);
            }
        }
        label
    }

    pub fn rank_of(&self, label: &Label) -> usize {
        let rows: Vec<Vec<S>> = self.label_rows(label).into_iter().map(|k| self.coeffs(k)).collect();
        linalg::rank(&rows, self.n, self.tol)
    }

    pub fn is_feasible(&self, tau: &[S]) -> bool {
        (0..self.rows()).all(|k| self.tol.sign(&self.value(k, tau)) != Ordering::Greater)
    }

    /// Exact re-solve of a vertex from its tight rows.
    fn refine(&self, label: &Label, approx: MoebiusVector<S>) -> MoebiusVector<S> {
        if S::EXACT {
            return approx;
        }
        let rows = self.label_rows(label);
        let a: Vec<Vec<S>> = rows.iter().map(|&k| self.coeffs(k)).collect();
        let b: Vec<S> = rows.iter().map(|&k| self.rhs(k)).collect();
        let mut chosen: Vec<usize> = Vec::new();
        for r in 0..a.len() {
            chosen.push(r);
            let sub: Vec<Vec<S>> = chosen.iter().map(|&c| a[c].clone()).collect();
            if linalg::rank(&sub, self.n, self.tol) < chosen.len() {
                chosen.pop();
            }
            if chosen.len() == self.n {
                break;
            }
        }
        let sub: Vec<Vec<S>> = chosen.iter().map(|&c| a[c].clone()).collect();
        let rhs: Vec<S> = chosen.iter().map(|&c| b[c].clone()).collect();
        linalg::solve_unique(&sub, &rhs, self.n, self.tol).map(MoebiusVector).unwrap_or(approx)
    }

    /// A feasible starting point: `-c (1, .., 1)` with `c = max(0, max a_ij / 2)`.
    fn start(&self) -> MoebiusVector<S> {
        let mut c = S::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                c = S::max_of(&c, &self.a.get(i, j).half());
            }
        }
        MoebiusVector(alloc::vec![-c; self.n])
    }

    /// Largest step along `e` from `tau` before a row outside `label` becomes tight.
    fn ratio_test(&self, tau: &[S], e: &[S], label: &Label) -> Option<S> {
        let mut best: Option<S> = None;
        for k in 0..self.rows() {
            if self.in_label(label, k) {
                continue;
            }
            let d = self.dot(k, e);
            if self.tol.sign(&d) != Ordering::Greater {
                continue;
            }
            let step = -self.value(k, tau) / d;
            best = Some(match best {
                Some(b) if b <= step => b,
                _ => step,
            });
        }
        best
    }

    fn step(tau: &MoebiusVector<S>, e: &[S], s: &S) -> MoebiusVector<S> {
        MoebiusVector(tau.0.iter().zip(e).map(|(x, d)| x.clone() + d.clone() * s.clone()).collect())
    }

    /// Move to a vertex by repeatedly stepping inside the kernel of the tight rows.
    fn purify(&self, mut tau: MoebiusVector<S>) -> Result<(MoebiusVector<S>, Label)> {
        loop {
            let label = self.label_of(&tau.0);
            let rows: Vec<Vec<S>> = self.label_rows(&label).into_iter().map(|k| self.coeffs(k)).collect();
            let Some(d) = linalg::kernel_vector(&rows, self.n, self.tol) else {
                return Ok((self.refine(&label, tau), label));
            };
            let neg: Vec<S> = d.iter().map(|x| -x.clone()).collect();
            let moved = [d, neg].into_iter().find_map(|e| self.ratio_test(&tau.0, &e, &label).map(|s| (e, s)));
            let Some((e, s)) = moved else {
                return Err(Error::InvariantViolation("polyhedron contains a line".into()));
            };
            tau = Self::step(&tau, &e, &s);
        }
    }

    /// Feasible edge directions at a vertex with tight rows `tight`, keyed by edge label.
    fn edge_directions(&self, tight: &[usize]) -> BTreeMap<Label, Vec<S>> {
        let mut found = BTreeMap::new();
        let mut chosen = Vec::new();
        self.dfs(tight, 0, &mut chosen, &mut found);
        found
    }

    fn dfs(&self, tight: &[usize], start: usize, chosen: &mut Vec<Vec<S>>, found: &mut BTreeMap<Label, Vec<S>>) {
        let need = self.n - 1;
        if chosen.len() == need {
            let Some(d) = linalg::kernel_vector(chosen, self.n, self.tol) else { return };
            for e in [d.clone(), d.iter().map(|x| -x.clone()).collect()] {
                let mut label = Label::default();
                let mut ok = true;
                for &k in tight {
                    match self.tol.sign(&self.dot(k, &e)) {
                        Ordering::Greater => {
                            ok = false;
                            break;
                        }
                        Ordering::Equal => self.insert(&mut label, k),
                        Ordering::Less => {}
                    }
                }
                if ok {
                    found.entry(label).or_insert(e);
                }
            }
            return;
        }
        for idx in start..tight.len() {
            if tight.len() - idx < need - chosen.len() {
                break;
            }
            chosen.push(self.coeffs(tight[idx]));
            if linalg::rank(chosen, self.n, self.tol) == chosen.len() {
                self.dfs(tight, idx + 1, chosen, found);
            }
            chosen.pop();
        }
    }

    pub fn walk(&self) -> Result<Walk<S>> {
        let (v0, l0) = self.purify(self.start())?;
        let mut vertices = alloc::vec![(v0, l0)];
        let mut index = BTreeMap::from([(l0, 0usize)]);
        let mut seen_edges: BTreeMap<Label, ()> = BTreeMap::new();
        let mut rays = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(vi) = queue.pop_front() {
            let (tau, label) = vertices[vi].clone();
            let tight = self.label_rows(&label);
            for (edge, e) in self.edge_directions(&tight) {
                if seen_edges.insert(edge, ()).is_some() {
                    continue;
                }
                match self.ratio_test(&tau.0, &e, &label) {
                    None => {
                        let norm = e.iter().fold(S::zero(), |m, x| S::max_of(&m, &x.abs()));
                        rays.push((vi, e.iter().map(|x| x.clone() / norm.clone()).collect(), edge));
                    }
                    Some(s) => {
                        let w = Self::step(&tau, &e, &s);
                        let wl = self.label_of(&w.0);
                        if !index.contains_key(&wl) {
                            if vertices.len() >= MAX_VERTICES {
                                return Err(Error::LimitExceeded("too many vertices".into()));
                            }
                            let w = self.refine(&wl, w);
                            index.insert(wl, vertices.len());
                            queue.push_back(vertices.len());
                            vertices.push((w, wl));
                        }
                    }
                }
            }
        }
        Ok(Walk { vertices, rays })
    }
}

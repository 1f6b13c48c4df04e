//! Independent checks of the polyhedral-complex axioms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{CellKind, Complex, Label};
use crate::error::Result;
use crate::feasibility::{self, Status};
use crate::relations::{cell_dimension, classify_type, RelationType};
use crate::scalar::Scalar;

use super::geometry::tangent_dimension;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub cells: usize,
    /// Distinct unions `R1 u R2` (and one-row extensions) decided by LP.
    pub unions: usize,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check face closure, the intersection rule, ray structure, dimension
/// bounds and dimension formulas. Every union label is decided by an LP,
/// independently of how the complex was enumerated.
pub fn check_axioms<S: Scalar>(complex: &Complex<S>) -> Result<AxiomReport> {
    let n = complex.n();
    let poly = complex.polyhedron();
    let cells = complex.cells();
    let mut v = Vec::new();
    let labels: BTreeMap<Label, usize> = cells.iter().map(|c| (c.label(), c.id)).collect();
    if labels.len() != cells.len() {
        v.push("duplicate cell labels".into());
    }

    for c in cells {
        let rel = c.relation;
        if c.dim > n / 2 {
            v.push(format!("cell {} has dimension {} > n/2", c.id, c.dim));
        }
        if !poly.is_feasible(&c.witness.0) || poly.label_of(&c.witness.0) != c.label() {
            v.push(format!("witness of cell {} does not realize {rel}", c.id));
        }
        if c.faces.iter().chain(&c.vertices).any(|&f| f >= cells.len()) {
            v.push(format!("cell {} references a missing cell", c.id));
        }
        if let Some(space) = complex.space() {
            if cell_dimension(&rel).ok() != Some(c.dim) {
                v.push(format!("cell {} dimension differs from the even-component count", c.id));
            }
            if tangent_dimension(space, &c.witness).ok() != Some(c.dim) {
                v.push(format!("cell {} dimension differs from the tangent dimension", c.id));
            }
            let ty = classify_type(&rel);
            let is_ray = matches!(ty, Ok(RelationType::Type1 { .. }));
            if is_ray != (c.kind == CellKind::Ray) || is_ray == c.bounded {
                v.push(format!("cell {} kind/boundedness disagrees with its type", c.id));
            }
        }
    }

    if complex.space().is_some() {
        let mut centers = BTreeSet::new();
        let mut unbounded = 0;
        for c in cells.iter().filter(|c| !c.bounded) {
            unbounded += 1;
            match (&c.ray, c.dim) {
                (Some(ray), 1) => {
                    centers.insert(ray.center);
                }
                _ => v.push(format!("unbounded cell {} is not a ray", c.id)),
            }
        }
        if unbounded != n || centers.len() != n {
            v.push(format!("expected {n} rays with distinct centers, found {unbounded}"));
        }
    }

    // Every union label U: C(U) is empty exactly when no cell label contains U,
    // and C(U)* is non-empty exactly when U is itself a cell label.
    let extra_rows = |l: &Label| -> Vec<Label> {
        let mut out = Vec::new();
        for k in 0..crate::relations::pair_count(n) {
            if l.pairs & (1 << k) == 0 {
                out.push(Label { pairs: l.pairs | (1 << k), zeros: l.zeros });
            }
        }
        if complex.bounded_above() {
            for i in 0..n {
                if l.zeros & (1 << i) == 0 {
                    out.push(Label { pairs: l.pairs, zeros: l.zeros | (1 << i) });
                }
            }
        }
        out
    };
    let mut unions = BTreeSet::new();
    for (a, x) in cells.iter().enumerate() {
        unions.extend(extra_rows(&x.label()));
        for y in &cells[a + 1..] {
            unions.insert(x.label().union(&y.label()));
        }
    }
    for u in &unions {
        let status = feasibility::solve(&complex.system_for(u)?)?.status;
        let is_cell = labels.contains_key(u);
        let has_super = cells.iter().any(|c| u.is_subset(&c.label()));
        let rel = u.relation(n);
        match status {
            Status::Interior if !is_cell && rel.is_admissible() => {
                v.push(format!("open cell of {rel} (zeros {:b}) is non-empty but missing", u.zeros))
            }
            Status::BoundaryOnly | Status::Interior if !has_super => {
                v.push(format!("C({rel}) is non-empty but no cell is a common face"))
            }
            Status::Empty | Status::BoundaryOnly if is_cell => {
                v.push(format!("cell {rel} has empty relative interior"))
            }
            Status::Empty if has_super => v.push(format!("C({rel}) is empty but a cell contains it")),
            _ => {}
        }
    }

    Ok(AxiomReport { cells: cells.len(), unions: unions.len(), violations: v })
}

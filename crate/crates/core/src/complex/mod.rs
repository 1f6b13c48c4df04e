//! The Moebius space as a polyhedral complex.
//!
//! Cells are the closures of `C(R)*` for antipodal relations `R`. They are
//! exactly the faces of the pointed polyhedron `P = {tau : l_ij(tau) <= 0}`
//! whose relative interior has an admissible tight set. The default
//! enumeration ([`Strategy::VertexFirst`]) walks the vertex/edge graph of
//! `P`, records its rays, and closes the set of vertex tight sets under
//! admissible intersections: a bounded face is the convex hull of its
//! vertices, and its tight set is the intersection of theirs.
//!
//! [`Strategy::SubsetWalk`] is the brute-force alternative (one LP per
//! admissible relation, by increasing pair count, skipping supersets of
//! relations with `C(R)` empty).
//!
//! The same engine also builds tight spans (see [`crate::hull`]): there the
//! weights are distances and the extra bounds `tau_i <= 0` are part of the
//! polyhedron, so labels also record which bounds are tight.

mod axioms;
mod geometry;
mod walk;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use axioms::{check_axioms, AxiomReport};
pub use geometry::{
    delta_estimate, r_tilde, sphere_points, tangent_dimension, visual_recovery_check, DeltaReport, SphereSpec,
    VisualReport, DELTA_RAY_WINDOW,
};

use crate::error::{Error, Result};
use crate::feasibility::{self, Bound, CellSystem, Status};
use crate::matrix::SymMatrix;
use crate::relations::{classify_type, pair_count, PairRelation, RelationType, MAX_RELATION_N};
use crate::scalar::{Scalar, Tolerance};
use crate::space::{LogSpace, MoebiusVector};
use walk::Polyhedron;

pub const DEFAULT_MAX_N: usize = 7;

/// Tight rows of a face: pairs plus (for tight spans) bounds `tau_i = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub pairs: u64,
    pub zeros: u32,
}

impl Label {
    pub fn intersection(&self, other: &Self) -> Self {
        Label { pairs: self.pairs & other.pairs, zeros: self.zeros & other.zeros }
    }

    pub fn union(&self, other: &Self) -> Self {
        Label { pairs: self.pairs | other.pairs, zeros: self.zeros | other.zeros }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.pairs & !other.pairs == 0 && self.zeros & !other.zeros == 0
    }

    pub fn relation(&self, n: usize) -> PairRelation {
        PairRelation::from_mask(n, self.pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    VertexFirst,
    SubsetWalk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub max_n: usize,
    pub strategy: Strategy,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_n: DEFAULT_MAX_N, strategy: Strategy::VertexFirst }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Ray,
    Polytope,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RaySpec<S> {
    pub center: usize,
    /// Parameter `tau_center` at the endpoint.
    pub t_min: S,
    /// Endpoint vertex cell id.
    pub endpoint: usize,
    /// Direction with sup-norm one (`+1` at the center for Moebius rays).
    pub direction: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell<S> {
    pub id: usize,
    pub relation: PairRelation,
    /// Tight bounds `tau_i = 0` (tight spans only).
    pub zero_set: u32,
    pub dim: usize,
    pub bounded: bool,
    pub kind: CellKind,
    pub witness: MoebiusVector<S>,
    pub ray: Option<RaySpec<S>>,
    /// Facets (faces of dimension `dim - 1`).
    pub faces: Vec<usize>,
    /// Ids of the 0-cells of the closed cell.
    pub vertices: Vec<usize>,
}

impl<S> Cell<S> {
    pub fn label(&self) -> Label {
        Label { pairs: self.relation.mask(), zeros: self.zero_set }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FVector {
    pub bounded: Vec<usize>,
    pub unbounded: Vec<usize>,
}

/// A polyhedral complex together with the data it was built from.
///
/// The empty face is implicit: it is the sentinel face of every cell and is
/// not stored among `cells`.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex<S> {
    n: usize,
    labels: Vec<String>,
    space: Option<LogSpace<S>>,
    weights: SymMatrix<S>,
    bounded_above: bool,
    tol: Tolerance,
    cells: Vec<Cell<S>>,
    hasse: Vec<(usize, usize)>,
    f_vector: FVector,
}

impl<S: Scalar> Complex<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &SymMatrix<S> {
        &self.weights
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// `true` for tight spans (bounds `tau_i <= 0` are part of the polyhedron).
    pub fn bounded_above(&self) -> bool {
        self.bounded_above
    }

    pub fn cells(&self) -> &[Cell<S>] {
        &self.cells
    }

    pub fn cell(&self, id: usize) -> &Cell<S> {
        &self.cells[id]
    }

    /// Covering pairs `(cell, facet)` of the face lattice.
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn f_vector(&self) -> &FVector {
        &self.f_vector
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Cell<S>> {
        self.cells.iter().filter(|c| c.dim == 0)
    }

    pub fn rays(&self) -> impl Iterator<Item = &Cell<S>> {
        self.cells.iter().filter(|c| c.kind == CellKind::Ray)
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn find(&self, relation: &PairRelation, zero_set: u32) -> Option<&Cell<S>> {
        self.cells.iter().find(|c| c.relation == *relation && c.zero_set == zero_set)
    }

    /// The log-space this complex was built from (Moebius complexes only).
    pub fn space(&self) -> Option<&LogSpace<S>> {
        self.space.as_ref()
    }

    /// `l_inf` length of a bounded 1-cell.
    pub fn edge_length(&self, id: usize) -> Option<S> {
        let c = &self.cells[id];
        if c.dim != 1 || !c.bounded || c.vertices.len() != 2 {
            return None;
        }
        Some(self.cells[c.vertices[0]].witness.distance(&self.cells[c.vertices[1]].witness))
    }

    /// Lengths of the bounded edges of a cell.
    pub fn side_lengths(&self, id: usize) -> Vec<S> {
        let label = self.cells[id].label();
        self.cells
            .iter()
            .filter(|c| c.dim == 1 && c.bounded && label.is_subset(&c.label()))
            .filter_map(|c| self.edge_length(c.id))
            .collect()
    }

    /// Feasibility system of the closed cell with the given label.
    pub fn system_for(&self, label: &Label) -> Result<CellSystem<S>> {
        let mut sys = CellSystem::new(self.weights.clone(), label.relation(self.n), self.tol)?;
        if self.bounded_above {
            for i in 0..self.n {
                sys = sys.with_upper_bound(i, Bound { value: S::zero(), tight: label.zeros & (1 << i) != 0 });
            }
        }
        Ok(sys)
    }

    pub(crate) fn polyhedron(&self) -> Polyhedron<'_, S> {
        Polyhedron { n: self.n, a: &self.weights, bounded_above: self.bounded_above, tol: self.tol }
    }
}

/// Build the complex of the Moebius space of `space`.
pub fn build_complex<S: Scalar>(space: &LogSpace<S>, options: Options) -> Result<Complex<S>> {
    check_size(space.n(), options.max_n)?;
    let labels = match options.strategy {
        Strategy::VertexFirst => None,
        Strategy::SubsetWalk => Some(subset_walk(space)?),
    };
    let mut c = assemble(space.weights().clone(), false, space.labels().to_vec(), space.tolerance(), labels)?;
    c.space = Some(space.clone());
    Ok(c)
}

/// Antipodal relations of `space`, sorted by pair count then mask.
pub fn enumerate_antipodal_relations<S: Scalar>(space: &LogSpace<S>, options: Options) -> Result<Vec<PairRelation>> {
    check_size(space.n(), options.max_n)?;
    let mut out = match options.strategy {
        Strategy::VertexFirst => build_complex(space, options)?.cells.iter().map(|c| c.relation).collect(),
        Strategy::SubsetWalk => subset_walk(space)?,
    };
    out.sort_by_key(|r| (r.len(), r.mask()));
    Ok(out)
}

fn check_size(n: usize, max_n: usize) -> Result<()> {
    if n > max_n.min(MAX_RELATION_N) {
        return Err(Error::LimitExceeded(format!("n = {n} exceeds max_n = {}", max_n.min(MAX_RELATION_N))));
    }
    Ok(())
}

/// One LP per admissible relation, by increasing pair count. Supersets of a
/// relation with empty closed cell are skipped without an LP.
fn subset_walk<S: Scalar>(space: &LogSpace<S>) -> Result<Vec<PairRelation>> {
    let n = space.n();
    let p = pair_count(n);
    if p > 24 {
        return Err(Error::LimitExceeded("subset walk needs n <= 7".into()));
    }
    let total = 1usize << p;
    let mut dead = alloc::vec![false; total];
    let mut by_size: Vec<Vec<u64>> = alloc::vec![Vec::new(); p + 1];
    for m in 1..total as u64 {
        by_size[m.count_ones() as usize].push(m);
    }
    let mut out = Vec::new();
    for level in by_size.iter().skip(1) {
        for &m in level {
            let pruned = (0..p).any(|b| m & (1 << b) != 0 && dead[(m & !(1 << b)) as usize]);
            if pruned {
                dead[m as usize] = true;
                continue;
            }
            let r = PairRelation::from_mask(n, m);
            if !r.is_admissible() {
                continue;
            }
            match feasibility::solve(&CellSystem::for_space(space, r)?)?.status {
                Status::Empty => dead[m as usize] = true,
                Status::Interior => out.push(r),
                Status::BoundaryOnly => {}
            }
        }
    }
    Ok(out)
}

/// Tolerance `tol` is used as given (callers scale it to the data).
pub(crate) fn assemble<S: Scalar>(
    weights: SymMatrix<S>,
    bounded_above: bool,
    names: Vec<String>,
    tol: Tolerance,
    relations: Option<Vec<PairRelation>>,
) -> Result<Complex<S>> {
    let n = weights.n();
    let poly = Polyhedron { n, a: &weights, bounded_above, tol };
    let walk = poly.walk()?;
    let admissible = |l: &Label| l.relation(n).is_admissible();

    // Vertex labels seed the closure; rays are added as they are.
    let vertex_labels: Vec<Label> = walk.vertices.iter().map(|(_, l)| *l).filter(admissible).collect();
    let mut set: BTreeSet<Label> = vertex_labels.iter().copied().collect();
    let mut work: Vec<Label> = vertex_labels.clone();
    while let Some(x) = work.pop() {
        for v in &vertex_labels {
            let y = x.intersection(v);
            if admissible(&y) && set.insert(y) {
                work.push(y);
            }
        }
    }
    // Rays of the polyhedron that leave the complex are dropped.
    let ray_labels: Vec<Label> = walk.rays.iter().map(|r| r.2).filter(admissible).collect();
    set.extend(ray_labels.iter().copied());

    if let Some(rel) = relations {
        // Cross-check an externally enumerated relation list.
        let mine: BTreeSet<u64> = set.iter().map(|l| l.pairs).collect();
        let theirs: BTreeSet<u64> = rel.iter().map(|r| r.mask()).collect();
        if mine != theirs {
            return Err(Error::InvariantViolation("enumeration strategies disagree".into()));
        }
    }

    struct Proto<S> {
        label: Label,
        dim: usize,
        bounded: bool,
        vertices: Vec<usize>,
        rays: Vec<usize>,
        witness: MoebiusVector<S>,
    }
    let mut protos: Vec<Proto<S>> = Vec::with_capacity(set.len());
    for label in set {
        let dim = n - poly.rank_of(&label);
        let vs: Vec<usize> =
            (0..walk.vertices.len()).filter(|&k| label.is_subset(&walk.vertices[k].1)).collect();
        let rs: Vec<usize> = (0..walk.rays.len()).filter(|&k| label.is_subset(&walk.rays[k].2)).collect();
        if vs.is_empty() {
            return Err(Error::InvariantViolation(format!("cell {} has no vertex", label.relation(n))));
        }
        let mut w = MoebiusVector::zeros(n);
        for &k in &vs {
            w = w.add(&walk.vertices[k].0);
        }
        w = w.scale(&(S::one() / S::from_i64(vs.len() as i64)));
        for &k in &rs {
            w = w.add(&MoebiusVector(walk.rays[k].1.clone()));
        }
        protos.push(Proto { label, dim, bounded: rs.is_empty(), vertices: vs, rays: rs, witness: w });
    }
    protos.sort_by_key(|p| (p.dim, !p.bounded, p.label.pairs.count_ones(), p.label.pairs, p.label.zeros));

    // Walk vertex index -> cell id.
    let mut vertex_cell = alloc::vec![usize::MAX; walk.vertices.len()];
    for (id, p) in protos.iter().enumerate() {
        if p.dim == 0 {
            if let [k] = p.vertices[..] {
                vertex_cell[k] = id;
            }
        }
    }

    let mut cells = Vec::with_capacity(protos.len());
    for (id, p) in protos.iter().enumerate() {
        let relation = p.label.relation(n);
        let kind = if p.bounded { CellKind::Polytope } else { CellKind::Ray };
        let ray = if p.bounded {
            None
        } else {
            let [k] = p.rays[..] else {
                return Err(Error::InvariantViolation(format!("unbounded cell {relation} is not a single ray")));
            };
            let (v, dir, _) = &walk.rays[k];
            let Ok(RelationType::Type1 { center }) = classify_type(&relation) else {
                return Err(Error::InvariantViolation(format!("ray {relation} is not a star")));
            };
            Some(RaySpec {
                center,
                t_min: walk.vertices[*v].0[center].clone(),
                endpoint: vertex_cell[*v],
                direction: dir.clone(),
            })
        };
        let vertices: Vec<usize> = p.vertices.iter().map(|&k| vertex_cell[k]).filter(|&c| c != usize::MAX).collect();
        let witness = if p.dim == 0 { walk.vertices[p.vertices[0]].0.clone() } else { p.witness.clone() };
        cells.push(Cell {
            id,
            relation,
            zero_set: p.label.zeros,
            dim: p.dim,
            bounded: p.bounded,
            kind,
            witness,
            ray,
            faces: Vec::new(),
            vertices,
        });
    }

    let mut hasse = Vec::new();
    for i in 0..cells.len() {
        for j in 0..cells.len() {
            if cells[j].dim + 1 == cells[i].dim && cells[i].label().is_subset(&cells[j].label()) {
                hasse.push((i, j));
            }
        }
    }
    for &(i, j) in &hasse {
        cells[i].faces.push(j);
    }

    let top = cells.iter().map(|c| c.dim).max().unwrap_or(0);
    let mut f_vector = FVector { bounded: alloc::vec![0; top + 1], unbounded: alloc::vec![0; top + 1] };
    for c in &cells {
        if c.bounded {
            f_vector.bounded[c.dim] += 1;
        } else {
            f_vector.unbounded[c.dim] += 1;
        }
    }

    Ok(Complex { n, labels: names, space: None, weights, bounded_above, tol, cells, hasse, f_vector })
}

/// `E_rho0(tau)` is antipodal.
pub fn membership<S: Scalar>(space: &LogSpace<S>, tau: &MoebiusVector<S>) -> Result<bool> {
    space.is_member(tau)
}

#[cfg(test)]
mod tests;

//! Symmetric relations on `{0, .., n-1}` and the graph combinatorics of cells.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{LogSpace, MoebiusVector};

/// Largest `n` a [`PairRelation`] can hold (`n (n - 1) / 2 <= 64`).
pub const MAX_RELATION_N: usize = 11;

/// Index of the unordered pair `{i, j}` in row-major upper-triangular order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_at(n: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    while k >= n - i - 1 {
        k -= n - i - 1;
        i += 1;
    }
    (i, i + 1 + k)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A set of unordered off-diagonal pairs, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairRelation {
    n: usize,
    mask: u64,
}

impl PairRelation {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_RELATION_N, "relation size {n} exceeds {MAX_RELATION_N}");
        PairRelation { n, mask: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let p = pair_count(n);
        let mask = if p == 64 { u64::MAX } else { (1u64 << p) - 1 };
        PairRelation { mask, ..Self::empty(n) }
    }

    /// `R_0^i`: every pair containing `i`.
    pub fn star(n: usize, i: usize) -> Self {
        let mut r = Self::empty(n);
        for j in (0..n).filter(|&j| j != i) {
            r.insert(i, j);
        }
        r
    }

    pub fn from_mask(n: usize, mask: u64) -> Self {
        let full = Self::complete(n).mask;
        PairRelation { mask: mask & full, ..Self::empty(n) }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > MAX_RELATION_N {
            return Err(Error::LimitExceeded(alloc::format!("relations support n <= {MAX_RELATION_N}")));
        }
        let mut r = Self::empty(n);
        for (i, j) in pairs {
            if i >= n {
                return Err(Error::IndexOutOfBounds(i));
            }
            if j >= n {
                return Err(Error::IndexOutOfBounds(j));
            }
            if i == j {
                return Err(Error::NotDistinct);
            }
            r.insert(i, j);
        }
        Ok(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.mask |= 1u64 << pair_index(self.n, i, j);
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i != j && self.mask & (1u64 << pair_index(self.n, i, j)) != 0
    }

    /// Number of unordered pairs.
    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Pairs `(i, j)` with `i < j` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..pair_count(self.n)).filter(|k| self.mask & (1u64 << k) != 0).map(|k| pair_at(self.n, k))
    }

    pub fn union(&self, other: &Self) -> Self {
        PairRelation { n: self.n, mask: self.mask | other.mask }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        PairRelation { n: self.n, mask: self.mask & other.mask }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask & !other.mask == 0
    }

    /// Neighbours of `i` in `Γ_R`.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.contains(i, j))
    }

    /// Bitmask of indices that appear in some pair.
    pub fn covered(&self) -> u32 {
        self.pairs().fold(0u32, |m, (i, j)| m | (1 << i) | (1 << j))
    }

    pub fn is_admissible(&self) -> bool {
        self.covered() == (1u32 << self.n) - 1
    }

    /// Relabel: `{i, j}` becomes `{perm[i], perm[j]}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut r = Self::empty(self.n);
        for (i, j) in self.pairs() {
            r.insert(perm[i], perm[j]);
        }
        r
    }
}

impl fmt::Debug for PairRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `{0-1,2-3}` with 0-based indices.
impl fmt::Display for PairRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, j)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}-{j}")?;
        }
        f.write_str("}")
    }
}

pub fn is_admissible(r: &PairRelation) -> bool {
    r.is_admissible()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationType {
    /// Star at `center` covering every index.
    Type1 { center: usize },
    /// Two vertex-disjoint pairs.
    Type2,
}

pub fn classify_type(r: &PairRelation) -> Result<RelationType> {
    if !r.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    let pairs: Vec<_> = r.pairs().collect();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[a + 1..] {
            if i != k && i != l && j != k && j != l {
                return Ok(RelationType::Type2);
            }
        }
    }
    // Pairwise intersecting pairs covering n >= 4 points share a vertex.
    let (i, j) = pairs[0];
    let center = if pairs.iter().all(|&(k, l)| k == i || l == i) { i } else { j };
    debug_assert!(pairs.iter().all(|&(k, l)| k == center || l == center));
    Ok(RelationType::Type1 { center })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted vertex set.
    pub vertices: Vec<usize>,
    pub parity: Parity,
    /// `(side0, side1)` for even components; `side0` holds the smallest vertex.
    pub bipartition: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityDecomposition {
    /// Ordered by smallest vertex.
    pub components: Vec<Component>,
}

impl ParityDecomposition {
    pub fn even_count(&self) -> usize {
        self.components.iter().filter(|c| c.parity == Parity::Even).count()
    }
}

/// Connected components of `Γ_R` (isolated indices are not components).
pub fn parity_decomposition(r: &PairRelation) -> ParityDecomposition {
    let n = r.n();
    let covered = r.covered();
    let mut layer: Vec<Option<usize>> = alloc::vec![None; n];
    let mut components = Vec::new();
    for s in 0..n {
        if covered & (1 << s) == 0 || layer[s].is_some() {
            continue;
        }
        let mut vertices = alloc::vec![s];
        let mut odd = false;
        layer[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let lv = layer[v].unwrap_or_default();
            for w in r.neighbours(v) {
                match layer[w] {
                    None => {
                        layer[w] = Some(lv + 1);
                        vertices.push(w);
                        queue.push_back(w);
                    }
                    Some(lw) if lw % 2 == lv % 2 => odd = true,
                    Some(_) => {}
                }
            }
        }
        vertices.sort_unstable();
        let bipartition = (!odd).then(|| {
            let parity_of = |v: &usize| layer[*v].unwrap_or_default() % 2;
            let side0 = vertices.iter().copied().filter(|v| parity_of(v) == 0).collect();
            let side1 = vertices.iter().copied().filter(|v| parity_of(v) == 1).collect();
            (side0, side1)
        });
        components.push(Component {
            vertices,
            parity: if odd { Parity::Odd } else { Parity::Even },
            bipartition,
        });
    }
    ParityDecomposition { components }
}

/// Number of even components of `Γ_R`.
pub fn cell_dimension(r: &PairRelation) -> Result<usize> {
    if !r.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    Ok(parity_decomposition(r).even_count())
}

/// One direction per even component: `+1` on side0, `-1` on side1.
pub fn affine_directions(r: &PairRelation) -> Result<Vec<Vec<i64>>> {
    if !r.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    let n = r.n();
    Ok(parity_decomposition(r)
        .components
        .into_iter()
        .filter_map(|c| c.bipartition)
        .map(|(s0, s1)| {
            let mut v = alloc::vec![0i64; n];
            s0.iter().for_each(|&i| v[i] = 1);
            s1.iter().for_each(|&i| v[i] = -1);
            v
        })
        .collect())
}

/// Pairs with `tau_i + tau_j + a_ij = 0`. `tau` must be a member point.
pub fn relation_of_point<S: Scalar>(space: &LogSpace<S>, tau: &MoebiusVector<S>) -> Result<PairRelation> {
    if !space.is_member(tau)? {
        return Err(Error::NotMember);
    }
    let n = space.n();
    if n > MAX_RELATION_N {
        return Err(Error::LimitExceeded(alloc::format!("relations support n <= {MAX_RELATION_N}")));
    }
    let tol = space.tolerance();
    let mut r = PairRelation::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if tol.is_zero(&space.form(tau, i, j)) {
                r.insert(i, j);
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SymMatrix;
    use crate::scalar::Tolerance;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> PairRelation {
        PairRelation::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn pair_indexing_round_trips() {
        for n in 2..=MAX_RELATION_N {
            for k in 0..pair_count(n) {
                let (i, j) = pair_at(n, k);
                assert!(i < j && j < n);
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
            }
        }
    }

    #[test]
    fn admissibility() {
        assert!(!rel(4, &[(1, 2)]).is_admissible());
        assert!(PairRelation::star(4, 0).is_admissible());
        assert!(rel(4, &[(0, 1), (2, 3)]).is_admissible());
    }

    #[test]
    fn types() {
        assert_eq!(classify_type(&PairRelation::star(4, 0)), Ok(RelationType::Type1 { center: 0 }));
        assert_eq!(classify_type(&PairRelation::star(5, 3)), Ok(RelationType::Type1 { center: 3 }));
        assert_eq!(classify_type(&rel(4, &[(0, 1), (2, 3)])), Ok(RelationType::Type2));
        assert_eq!(classify_type(&PairRelation::complete(4)), Ok(RelationType::Type2));
        assert_eq!(classify_type(&rel(4, &[(1, 2)])), Err(Error::NotAdmissible));
    }

    #[test]
    fn parity() {
        let star = parity_decomposition(&PairRelation::star(4, 0));
        assert_eq!(star.components.len(), 1);
        assert_eq!(star.components[0].bipartition, Some((alloc::vec![0], alloc::vec![1, 2, 3])));
        let full = parity_decomposition(&PairRelation::complete(4));
        assert_eq!(full.components[0].parity, Parity::Odd);
        assert_eq!(parity_decomposition(&rel(4, &[(0, 1), (2, 3)])).even_count(), 2);
    }

    #[test]
    fn dimensions_and_directions() {
        assert_eq!(cell_dimension(&PairRelation::star(4, 2)), Ok(1));
        assert_eq!(cell_dimension(&PairRelation::complete(4)), Ok(0));
        assert_eq!(cell_dimension(&rel(4, &[(0, 1), (2, 3)])), Ok(2));
        assert_eq!(affine_directions(&PairRelation::star(4, 0)).unwrap(), alloc::vec![alloc::vec![1, -1, -1, -1]]);
        assert_eq!(
            affine_directions(&rel(4, &[(0, 1), (2, 3)])).unwrap(),
            alloc::vec![alloc::vec![1, -1, 0, 0], alloc::vec![0, 0, 1, -1]]
        );
        assert!(affine_directions(&PairRelation::complete(4)).unwrap().is_empty());
    }

    #[test]
    fn relation_of_star_points() {
        let l3 = libm::log(3.0);
        let a = SymMatrix::from_fn(4, |i, j| if i == j || i == 0 { 0.0 } else { -2.0 * l3 });
        let space = LogSpace::new(a, Tolerance::default()).unwrap();
        assert_eq!(relation_of_point(&space, &MoebiusVector::zeros(4)).unwrap(), PairRelation::star(4, 0));
        let v = MoebiusVector(alloc::vec![-l3, l3, l3, l3]);
        assert_eq!(relation_of_point(&space, &v).unwrap(), PairRelation::complete(4));
        let out = MoebiusVector(alloc::vec![-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(relation_of_point(&space, &out), Err(Error::NotMember));
    }

    #[test]
    fn relation_of_square_point() {
        let l2 = libm::log(2.0);
        let a = SymMatrix::from_fn(4, |i, j| match (i, j) {
            (1, 2) | (1, 3) => -4.0 * l2,
            (2, 3) => -2.0 * l2,
            _ => 0.0,
        });
        let space = LogSpace::new(a, Tolerance::default()).unwrap();
        let tau = MoebiusVector(alloc::vec![-2.0 * l2, 2.0 * l2, l2, l2]);
        assert_eq!(relation_of_point(&space, &tau).unwrap(), rel(4, &[(0, 1), (2, 3)]));
    }
}

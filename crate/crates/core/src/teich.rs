//! Moebius classes of antipodal functions: normalized representatives, the
//! simplex parametrization, the cross-ratio distance, geodesics, the
//! four-point classification and symmetry groups.
//!
//! Index `0` plays the role of the base point: a normalized representative
//! has `rho(0, j) = 1` for all `j` and its remaining off-diagonal entries sum
//! to one.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::scalar::{Scalar, Tolerance};
use crate::space::{AntipodalSpace, LogSpace, SeparatingMatrix, MIN_POINTS};

/// Largest `m` accepted by [`moebius_symmetries`].
pub const MAX_SYMMETRY_M: usize = 8;

/// Canonical member of a Moebius class.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedAntipodal<S> {
    rho: SeparatingMatrix<S>,
}

impl<S: Scalar> NormalizedAntipodal<S> {
    pub fn m(&self) -> usize {
        self.rho.n()
    }

    pub fn rho(&self) -> &SeparatingMatrix<S> {
        &self.rho
    }

    pub fn to_space(&self, tol: Tolerance) -> Result<AntipodalSpace<S>> {
        let n = self.m();
        AntipodalSpace::from_rows((0..n).map(|i| (0..n).map(|j| self.rho.get(i, j).clone()).collect()).collect(), tol)
    }
}

/// Point of the open simplex: the off-base entries of a normalized
/// representative, row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint<S> {
    coords: Vec<S>,
}

/// `1 + m(m - 3)/2`, the number of simplex coordinates for `m` points.
pub fn simplex_len(m: usize) -> usize {
    (m - 1) * (m - 2) / 2
}

impl<S: Scalar> SimplexPoint<S> {
    /// Positive coordinates summing to one (up to `tol` in float mode).
    pub fn new(coords: Vec<S>, tol: Tolerance) -> Result<Self> {
        if !(3..=64).any(|m| simplex_len(m) == coords.len()) {
            return Err(Error::InvalidSimplexPoint(format!("{} coordinates", coords.len())));
        }
        if let Some(k) = coords.iter().position(|c| *c <= S::zero()) {
            return Err(Error::InvalidSimplexPoint(format!("coordinate {k} is not positive")));
        }
        let sum = coords.iter().fold(S::zero(), |a, c| a + c.clone());
        if !tol.eq(&sum, &S::one()) {
            return Err(Error::InvalidSimplexPoint(format!("coordinates sum to {sum}")));
        }
        Ok(SimplexPoint { coords })
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn m(&self) -> usize {
        (3..).find(|&m| simplex_len(m) == self.coords.len()).unwrap_or(3)
    }
}

/// Off-base pairs `(i, j)`, `1 <= i < j < m`, in row order.
fn minor_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..m).flat_map(move |i| ((i + 1)..m).map(move |j| (i, j)))
}

fn from_minor<S: Scalar>(m: usize, entries: &[S]) -> Result<NormalizedAntipodal<S>> {
    let mut a = SymMatrix::from_fn(m, |i, j| if i == j { S::zero() } else { S::one() });
    for ((i, j), v) in minor_pairs(m).zip(entries) {
        a.set(i, j, v.clone());
    }
    Ok(NormalizedAntipodal { rho: SeparatingMatrix::new(a)? })
}

/// `rho(i, j) / (rho(0, i) rho(0, j))` on the off-base block, divided by its sum.
pub fn normalize<S: Scalar>(rho: &SeparatingMatrix<S>) -> Result<NormalizedAntipodal<S>> {
    let m = rho.n();
    if m < 3 {
        return Err(Error::TooSmall { needed: 3, got: m });
    }
    let raw: Vec<S> = minor_pairs(m)
        .map(|(i, j)| rho.get(i, j).clone() / (rho.get(0, i).clone() * rho.get(0, j).clone()))
        .collect();
    let sum = raw.iter().fold(S::zero(), |a, v| a + v.clone());
    let scaled: Vec<S> = raw.into_iter().map(|v| v / sum.clone()).collect();
    from_minor(m, &scaled)
}

pub fn phi<S: Scalar>(rho: &SeparatingMatrix<S>) -> Result<SimplexPoint<S>> {
    let n = normalize(rho)?;
    let m = n.m();
    Ok(SimplexPoint { coords: minor_pairs(m).map(|(i, j)| n.rho.get(i, j).clone()).collect() })
}

pub fn phi_inverse<S: Scalar>(p: &SimplexPoint<S>) -> Result<NormalizedAntipodal<S>> {
    from_minor(p.m(), &p.coords)
}

/// `max log([x, y, z, w]_1 / [x, y, z, w]_2)` over ordered distinct quadruples.
///
/// The maximum ratio is found in the scalar type; only the final `log` is a float.
pub fn d_moeb<S: Scalar>(rho1: &SeparatingMatrix<S>, rho2: &SeparatingMatrix<S>) -> Result<f64> {
    let m = rho1.n();
    if m < MIN_POINTS {
        return Err(Error::TooSmall { needed: MIN_POINTS, got: m });
    }
    if rho2.n() != m {
        return Err(Error::DimensionMismatch { expected: m, got: rho2.n() });
    }
    let mut best = S::one();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    if i == j || i == k || i == l || j == k || j == l || k == l {
                        continue;
                    }
                    let r = rho1.cross_ratio(i, j, k, l)? / rho2.cross_ratio(i, j, k, l)?;
                    if r > best {
                        best = r;
                    }
                }
            }
        }
    }
    Ok(libm::log(best.to_f64()).max(0.0))
}

/// Point at distance `t` from `rho0` on the geodesic towards `rho1`.
pub fn geodesic_point<S: Scalar>(
    rho0: &SeparatingMatrix<S>,
    rho1: &SeparatingMatrix<S>,
    t: f64,
    tol: Tolerance,
) -> Result<NormalizedAntipodal<f64>> {
    let d = d_moeb(rho0, rho1)?;
    if d <= tol.eps() {
        return Err(Error::SameClass);
    }
    let n0 = normalize(&rho0.to_f64())?;
    let n1 = normalize(&rho1.to_f64())?;
    let m = n0.m();
    let s = t / d;
    let raw: Vec<f64> = minor_pairs(m)
        .map(|(i, j)| libm::exp(s * libm::log(*n1.rho.get(i, j)) + (1.0 - s) * libm::log(*n0.rho.get(i, j))))
        .collect();
    let sum: f64 = raw.iter().sum();
    let scaled: Vec<f64> = raw.iter().map(|v| v / sum).collect();
    from_minor(m, &scaled)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionTag {
    B1,
    B2,
    B3,
    L1,
    L2,
    L3,
    O,
}

impl RegionTag {
    pub fn name(&self) -> &'static str {
        match self {
            RegionTag::B1 => "B1",
            RegionTag::B2 => "B2",
            RegionTag::B3 => "B3",
            RegionTag::L1 => "L1",
            RegionTag::L2 => "L2",
            RegionTag::L3 => "L3",
            RegionTag::O => "O",
        }
    }
}

/// Region of the four-point simplex, with the rectangle sides (`B`), the
/// segment length (`L`) or nothing (`O`).
///
/// Lengths are `2 log` of ratios of `(mu, lambda, nu)`; they are twice the
/// sup-norm edge lengths of the corresponding complex.
#[derive(Clone, Debug, PartialEq)]
pub struct Region4<T> {
    pub tag: RegionTag,
    pub sides: Vec<T>,
}

/// Region of `(m, l, v)`, which are `(mu, lambda, nu)` or any increasing
/// function of them.
fn region_tag<T: Scalar>(m: &T, l: &T, v: &T, tol: Tolerance) -> RegionTag {
    use core::cmp::Ordering::*;
    match (tol.cmp(m, l), tol.cmp(m, v), tol.cmp(l, v)) {
        (Equal, Equal, _) | (Equal, _, Equal) | (_, Equal, Equal) => RegionTag::O,
        (_, Less, Less) => RegionTag::B1,
        (Greater, Greater, _) => RegionTag::B2,
        (Less, _, Greater) => RegionTag::B3,
        (Less, Less, Equal) => RegionTag::L1,
        (Greater, Equal, Less) => RegionTag::L2,
        (Equal, Greater, Greater) => RegionTag::L3,
        // Only reachable when the tolerance is not transitive.
        _ => region_tag(m, l, v, Tolerance::new(0.0)),
    }
}

/// Lengths for a region from `(m, l, v) = 2 log(mu, lambda, nu) + c`.
fn region_sides<T: Scalar>(tag: RegionTag, m: T, l: T, v: T) -> Vec<T> {
    match tag {
        RegionTag::B1 => alloc::vec![v.clone() - l, v - m],
        RegionTag::B2 => alloc::vec![m.clone() - l, m - v],
        RegionTag::B3 => alloc::vec![l.clone() - m, l - v],
        RegionTag::L1 => alloc::vec![v - m],
        RegionTag::L2 => alloc::vec![m - l],
        RegionTag::L3 => alloc::vec![m - v],
        RegionTag::O => Vec::new(),
    }
}

/// Four-point classification of a rho-domain function. The region is decided
/// in the scalar type; the lengths are floats.
pub fn classify4<S: Scalar>(rho: &SeparatingMatrix<S>, tol: Tolerance) -> Result<Region4<f64>> {
    if rho.n() != 4 {
        return Err(Error::NotFour(rho.n()));
    }
    let p = phi(rho)?;
    let c = p.coords();
    let tag = region_tag(&c[0], &c[1], &c[2], tol);
    let lg = |x: &S| 2.0 * libm::log(x.to_f64());
    Ok(Region4 { tag, sides: region_sides(tag, lg(&c[0]), lg(&c[1]), lg(&c[2])) })
}

/// Four-point classification of a log-domain space; exact for rationals.
///
/// Uses `b_ij = a_ij - a_0i - a_0j`, which equals `2 log` of the normalized
/// entries up to a common constant.
pub fn classify4_log<S: Scalar>(space: &LogSpace<S>) -> Result<Region4<S>> {
    if space.n() != 4 {
        return Err(Error::NotFour(space.n()));
    }
    let b = |i: usize, j: usize| space.weight(i, j).clone() - space.weight(0, i).clone() - space.weight(0, j).clone();
    let (m, l, v) = (b(1, 2), b(1, 3), b(2, 3));
    let tag = region_tag(&m, &l, &v, space.tolerance());
    Ok(Region4 { tag, sides: region_sides(tag, m, l, v) })
}

/// Permutations `g` with `rho o (g x g)` Moebius equivalent to `rho`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    pub m: usize,
    /// Sorted lexicographically; the identity comes first.
    pub elements: Vec<Vec<usize>>,
}

impl SymmetryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Contains the identity and is closed under composition and inverses.
    pub fn is_group(&self) -> bool {
        let set: BTreeSet<&Vec<usize>> = self.elements.iter().collect();
        let id: Vec<usize> = (0..self.m).collect();
        if !set.contains(&id) {
            return false;
        }
        self.elements.iter().all(|g| {
            let mut inv = alloc::vec![0; self.m];
            for (i, &gi) in g.iter().enumerate() {
                inv[gi] = i;
            }
            set.contains(&inv)
                && self.elements.iter().all(|h| set.contains(&g.iter().map(|&x| h[x]).collect::<Vec<_>>()))
        })
    }
}

/// Lexicographic successor; `false` after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("p[i] qualifies");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn moebius_symmetries<S: Scalar>(rho: &SeparatingMatrix<S>, tol: Tolerance) -> Result<SymmetryGroup> {
    let m = rho.n();
    if m > MAX_SYMMETRY_M {
        return Err(Error::LimitExceeded(format!("symmetries need m <= {MAX_SYMMETRY_M}")));
    }
    let base = normalize(rho)?;
    let mut g: Vec<usize> = (0..m).collect();
    let mut elements = Vec::new();
    loop {
        let other = normalize(&rho.permuted(&g))?;
        let same = minor_pairs(m).all(|(i, j)| tol.eq(base.rho.get(i, j), other.rho.get(i, j)));
        if same {
            elements.push(g.clone());
        }
        if !next_permutation(&mut g) {
            break;
        }
    }
    Ok(SymmetryGroup { m, elements })
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv(words: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Isomorphism-invariant digest of the face lattice labelled by `(dim, bounded)`.
///
/// Colour refinement over the Hasse diagram (facets and cofacets as separate
/// multisets) runs until the number of colour classes stops growing. The
/// result lists the f-vector and the sorted final colour histogram.
pub fn lattice_fingerprint<S: Scalar>(complex: &Complex<S>) -> String {
    let cells = complex.cells();
    let k = cells.len();
    let mut down: Vec<Vec<usize>> = alloc::vec![Vec::new(); k];
    let mut up: Vec<Vec<usize>> = alloc::vec![Vec::new(); k];
    for &(c, f) in complex.hasse() {
        down[c].push(f);
        up[f].push(c);
    }
    let mut colour: Vec<u64> = cells.iter().map(|c| fnv(&[c.dim as u64, u64::from(c.bounded)])).collect();
    let classes = |col: &[u64]| col.iter().collect::<BTreeSet<_>>().len();
    let mut count = classes(&colour);
    for _ in 0..=k {
        let next: Vec<u64> = (0..k)
            .map(|i| {
                let mut d: Vec<u64> = down[i].iter().map(|&j| colour[j]).collect();
                let mut u: Vec<u64> = up[i].iter().map(|&j| colour[j]).collect();
                d.sort_unstable();
                u.sort_unstable();
                let mut words = alloc::vec![colour[i], d.len() as u64];
                words.extend(d);
                words.push(u.len() as u64);
                words.extend(u);
                fnv(&words)
            })
            .collect();
        let c = classes(&next);
        colour = next;
        if c == count {
            break;
        }
        count = c;
    }
    let mut hist: BTreeMap<u64, usize> = BTreeMap::new();
    for c in &colour {
        *hist.entry(*c).or_default() += 1;
    }
    let fv = complex.f_vector();
    let mut out = format!("b{:?}u{:?}", fv.bounded, fv.unbounded);
    for (c, n) in hist {
        let _ = write!(out, ";{c:016x}x{n}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_complex, Options};
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn triple(mu: Rational, la: Rational, nu: Rational) -> SeparatingMatrix<Rational> {
        let a = SymMatrix::from_fn(4, |i, j| match (i, j) {
            _ if i == j => q(0, 1),
            (0, _) => q(1, 1),
            (1, 2) => mu.clone(),
            (1, 3) => la.clone(),
            _ => nu.clone(),
        });
        SeparatingMatrix::new(a).unwrap()
    }

    #[test]
    fn normalization() {
        let n = normalize(&triple(q(1, 8), q(1, 8), q(1, 4))).unwrap();
        assert_eq!(phi(n.rho()).unwrap().coords(), &[q(1, 4), q(1, 4), q(1, 2)]);
        let ones = SeparatingMatrix::new(SymMatrix::from_fn(4, |i, j| if i == j { q(0, 1) } else { q(1, 1) })).unwrap();
        assert_eq!(phi(&ones).unwrap().coords(), &[q(1, 3), q(1, 3), q(1, 3)]);
        let again = normalize(n.rho()).unwrap();
        assert_eq!(again, n);
    }

    #[test]
    fn simplex_round_trip() {
        for m in 4..=6 {
            assert_eq!(simplex_len(m), 1 + m * (m - 3) / 2);
        }
        let p = SimplexPoint::new(alloc::vec![q(1, 4), q(1, 4), q(1, 2)], Tolerance::default()).unwrap();
        let back = phi(phi_inverse(&p).unwrap().rho()).unwrap();
        assert_eq!(back, p);
        assert!(SimplexPoint::new(alloc::vec![q(1, 2), q(1, 2)], Tolerance::default()).is_err());
        assert!(SimplexPoint::new(alloc::vec![q(1, 2), q(1, 2), q(0, 1)], Tolerance::default()).is_err());
    }

    #[test]
    fn distance_between_o_and_square() {
        let o = triple(q(1, 3), q(1, 3), q(1, 3));
        let s = triple(q(1, 4), q(1, 4), q(1, 2));
        assert!((d_moeb(&o, &s).unwrap() - libm::log(2.0)).abs() < 1e-12);
        assert!((d_moeb(&s, &o).unwrap() - libm::log(2.0)).abs() < 1e-12);
        assert_eq!(d_moeb(&s, &normalize(&s).unwrap().rho).unwrap(), 0.0);
    }

    #[test]
    fn geodesic_midpoint() {
        let o = triple(q(1, 3), q(1, 3), q(1, 3));
        let s = triple(q(1, 4), q(1, 4), q(1, 2));
        let d = libm::log(2.0);
        let tol = Tolerance::default();
        let mid = geodesic_point(&o, &s, d / 2.0, tol).unwrap();
        let raw = [1.0 / (2.0 * libm::sqrt(3.0)), 1.0 / (2.0 * libm::sqrt(3.0)), 1.0 / libm::sqrt(6.0)];
        let sum: f64 = raw.iter().sum();
        let c = phi(mid.rho()).unwrap();
        for (x, r) in c.coords().iter().zip(raw) {
            assert!((x - r / sum).abs() < 1e-12);
        }
        let end = geodesic_point(&o, &s, d, tol).unwrap();
        assert!(d_moeb(end.rho(), &s.to_f64()).unwrap() < 1e-12);
        let back = geodesic_point(&o, &s, -d, tol).unwrap();
        assert!((d_moeb(back.rho(), &o.to_f64()).unwrap() - d).abs() < 1e-12);
        assert_eq!(geodesic_point(&o, &o, 1.0, tol), Err(Error::SameClass));
    }

    #[test]
    fn four_point_regions() {
        let tol = Tolerance::default();
        let l2 = 2.0 * libm::log(2.0);
        let r = classify4(&triple(q(1, 4), q(1, 4), q(1, 2)), tol).unwrap();
        assert_eq!(r.tag, RegionTag::B1);
        assert!(r.sides.iter().all(|s| (s - l2).abs() < 1e-12));
        assert_eq!(classify4(&triple(q(1, 3), q(1, 3), q(1, 3)), tol).unwrap().tag, RegionTag::O);
        let l = classify4(&triple(q(1, 5), q(2, 5), q(2, 5)), tol).unwrap();
        assert_eq!(l.tag, RegionTag::L1);
        assert!((l.sides[0] - l2).abs() < 1e-12);
        let cases = [
            ((1, 2, 3), RegionTag::B1),
            ((3, 1, 2), RegionTag::B2),
            ((1, 3, 2), RegionTag::B3),
            ((1, 2, 2), RegionTag::L1),
            ((2, 1, 2), RegionTag::L2),
            ((2, 2, 1), RegionTag::L3),
        ];
        for ((a, b, c), tag) in cases {
            let t = a + b + c;
            assert_eq!(classify4(&triple(q(a, t), q(b, t), q(c, t)), tol).unwrap().tag, tag);
        }
        let five = SeparatingMatrix::new(SymMatrix::from_fn(5, |i, j| if i == j { q(0, 1) } else { q(1, 1) })).unwrap();
        assert_eq!(classify4(&five, tol), Err(Error::NotFour(5)));
    }

    #[test]
    fn symmetry_orders() {
        let tol = Tolerance::default();
        let o = moebius_symmetries(&triple(q(1, 3), q(1, 3), q(1, 3)), tol).unwrap();
        assert_eq!(o.order(), 24);
        assert!(o.is_group());
        let s = moebius_symmetries(&triple(q(1, 4), q(1, 4), q(1, 2)), tol).unwrap();
        assert_eq!(s.order(), 8);
        assert!(s.is_group());
        assert_eq!(s.elements[0], alloc::vec![0, 1, 2, 3]);
        let generic = moebius_symmetries(&triple(q(1, 6), q(2, 6), q(3, 6)), tol).unwrap();
        assert!(generic.is_group());
    }

    fn log_space(b: [i64; 3]) -> LogSpace<Rational> {
        let a = SymMatrix::from_fn(4, |i, j| match (i, j) {
            (1, 2) => q(b[0], 1),
            (1, 3) => q(b[1], 1),
            (2, 3) => q(b[2], 1),
            _ => q(0, 1),
        });
        LogSpace::new(a, Tolerance::default()).unwrap()
    }

    #[test]
    fn fingerprints_follow_regions() {
        let fp = |b| lattice_fingerprint(&build_complex(&log_space(b), Options::default()).unwrap());
        let b1 = fp([-4, -3, -1]);
        assert_eq!(b1, fp([-1, -4, -3]));
        assert_eq!(b1, fp([-4, -1, -3]));
        let l1 = fp([-4, -2, -2]);
        assert_eq!(l1, fp([-2, -4, -2]));
        assert_eq!(l1, fp([-2, -2, -4]));
        assert_ne!(b1, l1);
        assert_ne!(l1, fp([-2, -2, -2]));
    }

    #[test]
    fn exact_log_classification() {
        let r = classify4_log(&log_space([-4, -4, -2])).unwrap();
        assert_eq!(r, Region4 { tag: RegionTag::B1, sides: alloc::vec![q(2, 1), q(2, 1)] });
        assert_eq!(classify4_log(&log_space([-4, -2, -2])).unwrap().sides, alloc::vec![q(2, 1)]);
    }
}

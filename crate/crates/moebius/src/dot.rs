//! Graphviz export of the face lattice.

use std::fmt::Write as _;

use moebius_core::complex::Complex;
use moebius_core::Scalar;

/// Hasse diagram with node labels `dim/bounded/relation`; edges point from a facet to its cell.
pub fn hasse_dot<S: Scalar>(complex: &Complex<S>) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box];\n");
    for c in complex.cells() {
        let _ = writeln!(out, "  c{} [label=\"{}/{}/{}\"];", c.id, c.dim, c.bounded, c.relation);
    }
    for &(cell, facet) in complex.hasse() {
        let _ = writeln!(out, "  c{facet} -> c{cell};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use moebius_core::complex::{build_complex, Options};
    use moebius_core::{LogSpace, Rational, SymMatrix, Tolerance};

    #[test]
    fn star_diagram() {
        let a = SymMatrix::from_fn(4, |i, j| Rational::from_i64(if i == j || i == 0 { 0 } else { -2 }));
        let c = build_complex(&LogSpace::new(a, Tolerance::default()).unwrap(), Options::default()).unwrap();
        let dot = hasse_dot(&c);
        assert!(dot.contains("label=\"0/true/{0-1,0-2,0-3,1-2,1-3,2-3}\""));
        assert_eq!(dot.matches(" -> ").count(), 4);
    }
}

use super::*;
use crate::relations::cell_dimension;
use crate::sample;
use crate::scalar::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// `a_1j = 0` and the given `(a_23, a_24, a_34)`.
fn four<S: Scalar>(a23: S, a24: S, a34: S) -> LogSpace<S> {
    let a = SymMatrix::from_fn(4, |i, j| match (i, j) {
        (1, 2) => a23.clone(),
        (1, 3) => a24.clone(),
        (2, 3) => a34.clone(),
        _ => S::zero(),
    });
    LogSpace::new(a, Tolerance::default()).unwrap()
}

fn exact_star() -> LogSpace<Rational> {
    four(q(-2, 1), q(-2, 1), q(-2, 1))
}

fn exact_square() -> LogSpace<Rational> {
    four(q(-4, 1), q(-4, 1), q(-2, 1))
}

fn exact_l1() -> LogSpace<Rational> {
    four(q(-4, 1), q(-2, 1), q(-2, 1))
}

#[test]
fn exact_star_complex() {
    let c = build_complex(&exact_star(), Options::default()).unwrap();
    assert_eq!(c.cells().len(), 5);
    assert_eq!(c.f_vector().bounded, alloc::vec![1, 0]);
    assert_eq!(c.f_vector().unbounded, alloc::vec![0, 4]);
    let v = c.vertices().next().unwrap();
    assert_eq!(v.relation, PairRelation::complete(4));
    assert_eq!(v.witness.0, alloc::vec![q(-1, 1), q(1, 1), q(1, 1), q(1, 1)]);
    let mut t_min = alloc::vec![q(0, 1); 4];
    for r in c.rays() {
        let spec = r.ray.as_ref().unwrap();
        assert_eq!(r.relation, PairRelation::star(4, spec.center));
        t_min[spec.center] = spec.t_min.clone();
        let mut dir = alloc::vec![q(-1, 1); 4];
        dir[spec.center] = q(1, 1);
        assert_eq!(spec.direction, dir);
    }
    assert_eq!(t_min, alloc::vec![q(-1, 1), q(1, 1), q(1, 1), q(1, 1)]);
}

#[test]
fn float_star_vertex() {
    let l3 = libm::log(3.0);
    let c = build_complex(&four(-2.0 * l3, -2.0 * l3, -2.0 * l3), Options::default()).unwrap();
    let v = c.vertices().next().unwrap();
    assert!(v.witness.distance(&MoebiusVector(alloc::vec![-l3, l3, l3, l3])) < 1e-12);
    assert_eq!(c.f_vector().unbounded, alloc::vec![0, 4]);
}

#[test]
fn square_complex() {
    let l2 = libm::log(2.0);
    for c in [
        build_complex(&exact_square(), Options::default()).unwrap().cells().len(),
        build_complex(&four(-4.0 * l2, -4.0 * l2, -2.0 * l2), Options::default()).unwrap().cells().len(),
    ] {
        assert_eq!(c, 13);
    }
    let c = build_complex(&four(-4.0 * l2, -4.0 * l2, -2.0 * l2), Options::default()).unwrap();
    assert_eq!(c.f_vector().bounded, alloc::vec![4, 4, 1]);
    assert_eq!(c.f_vector().unbounded, alloc::vec![0, 4, 0]);
    let two = c.cells().iter().find(|x| x.dim == 2).unwrap();
    assert_eq!(two.relation, PairRelation::from_pairs(4, [(0, 1), (2, 3)]).unwrap());
    let sides = c.side_lengths(two.id);
    assert_eq!(sides.len(), 4);
    assert!(sides.iter().all(|s| (s - l2).abs() < 1e-12));
}

#[test]
fn l1_is_a_tree() {
    let c = build_complex(&exact_l1(), Options::default()).unwrap();
    assert_eq!(c.cells().len(), 7);
    assert_eq!(c.f_vector().bounded, alloc::vec![2, 1]);
    let seg = c.cells().iter().find(|x| x.dim == 1 && x.bounded).unwrap();
    // Union of the graphs {12, 34} and {13, 24}.
    assert_eq!(seg.relation, PairRelation::from_pairs(4, [(0, 1), (2, 3), (0, 2), (1, 3)]).unwrap());
    assert_eq!(c.edge_length(seg.id), Some(q(1, 1)));
}

#[test]
fn strategies_agree() {
    let mut rng = sample::rng(11);
    for space in [exact_star(), exact_square(), exact_l1(), sample::random_log_space(&mut rng, 5, 3)] {
        let a = enumerate_antipodal_relations(&space, Options::default()).unwrap();
        let b = enumerate_antipodal_relations(&space, Options { strategy: Strategy::SubsetWalk, ..Options::default() })
            .unwrap();
        assert_eq!(a, b);
        build_complex(&space, Options { strategy: Strategy::SubsetWalk, ..Options::default() }).unwrap();
    }
}

#[test]
fn enumeration_order_and_limit() {
    let rel = enumerate_antipodal_relations(&exact_square(), Options::default()).unwrap();
    assert_eq!(rel.len(), 13);
    assert!(rel.windows(2).all(|w| (w[0].len(), w[0].mask()) < (w[1].len(), w[1].mask())));
    let small = Options { max_n: 3, ..Options::default() };
    assert!(matches!(build_complex(&exact_square(), small), Err(Error::LimitExceeded(_))));
}

#[test]
fn axioms_hold() {
    let mut rng = sample::rng(5);
    let mut spaces = alloc::vec![exact_star(), exact_square(), exact_l1()];
    spaces.push(sample::random_log_space(&mut rng, 5, 2));
    spaces.push(sample::random_tree_space(&mut rng, 5));
    for s in spaces {
        let c = build_complex(&s, Options::default()).unwrap();
        let rep = check_axioms(&c).unwrap();
        assert!(rep.ok(), "{:?}", rep.violations);
        for cell in c.cells() {
            assert_eq!(cell_dimension(&cell.relation).unwrap(), cell.dim);
        }
    }
}

#[test]
fn star_sphere_and_products() {
    let l3 = libm::log(3.0);
    let c = build_complex(&four(-2.0 * l3, -2.0 * l3, -2.0 * l3), Options::default()).unwrap();
    let s = sphere_points(&c, &10.0).unwrap();
    let x2 = MoebiusVector(alloc::vec![-10.0, 10.0, -10.0 + 2.0 * l3, -10.0 + 2.0 * l3]);
    assert!(s.points[1].distance(&x2) < 1e-12);
    assert!((s.points[1].distance(&s.points[2]) - (20.0 - 2.0 * l3)).abs() < 1e-12);
    assert!((s.points[0].distance(&s.points[3]) - 20.0).abs() < 1e-12);
    for p in &s.points {
        assert!((p.norm() - 10.0).abs() < 1e-12);
    }
    let base = MoebiusVector::zeros(4);
    assert!((gromov_product_at(&s, 1, 2, &base) - l3).abs() < 1e-12);
    assert!(gromov_product_at(&s, 0, 1, &base).abs() < 1e-12);
    assert!(matches!(sphere_points(&c, &0.5), Err(Error::RadiusTooSmall { .. })));
}

fn gromov_product_at(s: &SphereSpec<f64>, i: usize, j: usize, base: &MoebiusVector<f64>) -> f64 {
    crate::space::gromov_product(&s.points[i], &s.points[j], base)
}

#[test]
fn r_tilde_of_exact_star() {
    let c = build_complex(&exact_star(), Options::default()).unwrap();
    assert_eq!(r_tilde(&c).unwrap(), q(1, 1));
}

#[test]
fn visual_recovery_is_radius_independent() {
    for space in [exact_star(), exact_square()] {
        let c = build_complex(&space, Options::default()).unwrap();
        let rt = r_tilde(&c).unwrap();
        let a = visual_recovery_check(&c, &(rt.clone() + q(1, 1))).unwrap();
        let b = visual_recovery_check(&c, &(rt + q(7, 1))).unwrap();
        assert_eq!(a.mismatches, 0);
        assert_eq!(a.products, b.products);
        assert!(a.max_deviation < 1e-12);
    }
}

#[test]
fn membership_and_tangent_dimension() {
    let l2 = libm::log(2.0);
    let sq = four(-4.0 * l2, -4.0 * l2, -2.0 * l2);
    let inside = MoebiusVector(alloc::vec![-2.0 * l2, 2.0 * l2, l2, l2]);
    assert!(membership(&sq, &inside).unwrap());
    assert_eq!(tangent_dimension(&sq, &inside).unwrap(), 2);
    let st = exact_star();
    assert!(membership(&st, &MoebiusVector::zeros(4)).unwrap());
    assert!(!membership(&st, &MoebiusVector(alloc::vec![q(-1, 1), q(0, 1), q(0, 1), q(0, 1)])).unwrap());
    assert_eq!(tangent_dimension(&st, &MoebiusVector(alloc::vec![q(-1, 1), q(1, 1), q(1, 1), q(1, 1)])).unwrap(), 0);
    assert_eq!(tangent_dimension(&st, &MoebiusVector(alloc::vec![q(3, 1), q(-3, 1), q(-3, 1), q(-3, 1)])).unwrap(), 1);
}

#[test]
fn delta_of_tree_and_square() {
    let t = build_complex(&exact_l1(), Options::default()).unwrap();
    assert!(delta_estimate(&t, 2000, 1).unwrap().delta < 1e-9);
    let s = build_complex(&exact_square(), Options::default()).unwrap();
    let rep = delta_estimate(&s, 2000, 1).unwrap();
    assert!(rep.delta > 0.1, "{}", rep.delta);
    assert_eq!(rep.violations, 0);
    assert_eq!(delta_estimate(&s, 50, 9).unwrap(), delta_estimate(&s, 50, 9).unwrap());
}

//! Acceptance suite. Every criterion recomputes its expected values with
//! code that does not go through the routine under test.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use moebius_core::complex::{
    build_complex, check_axioms, delta_estimate, r_tilde, sphere_points, visual_recovery_check, Complex, Options,
};
use moebius_core::feasibility::{fourier_motzkin_feasible, solve, CellSystem, Regime, Status};
use moebius_core::hull::{ball_hull_check, hyperconvexity_witness, sphere_metric, tight_span};
use moebius_core::relations::{pair_count, PairRelation};
use moebius_core::sample::{random_log_space, random_tree_space, rng, sample_point, SampleRng};
use moebius_core::teich::{
    classify4, classify4_log, d_moeb, geodesic_point, moebius_symmetries, phi, phi_inverse, RegionTag,
    SimplexPoint,
};
use moebius_core::{AntipodalSpace, LogSpace, MoebiusVector, Rational, Scalar, SeparatingMatrix, SymMatrix, Tolerance};
use rand::Rng;
use serde_json::{json, Value};

/// Float comparisons in the four-point, visual and geodesic criteria.
pub const TOL_FLOAT: f64 = 1e-9;
/// Simplex round trips and the `log 2` distance.
pub const TOL_TEICH: f64 = 1e-12;
pub const MAX_INSTANCE_TIME: Duration = Duration::from_secs(1);
pub const MAX_BALL_HULL_TIME: Duration = Duration::from_secs(30);
/// Lower bound for the sampled `delta` of the square instance.
pub const SQUARE_DELTA_MIN: f64 = 0.1;
pub const DELTA_SAMPLES: usize = 10_000;
pub const BALL_SAMPLES: usize = 100;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type Check = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(ctx: &'static str) -> impl Fn(E) -> String {
    move |e| format!("{ctx}: {e}")
}

fn sup<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |m, x| S::max_of(&m, &x.abs()))
}

fn sup_dist<S: Scalar>(a: &[S], b: &[S]) -> S {
    let d: Vec<S> = a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect();
    sup(&d)
}

/// Row maxima of `tau_i + tau_j + a_ij` are all zero.
fn is_member_direct<S: Scalar>(a: &SymMatrix<S>, tau: &[S], tol: Tolerance) -> bool {
    let n = a.n();
    (0..n).all(|i| {
        let best = (0..n)
            .filter(|&j| j != i)
            .map(|j| tau[i].clone() + tau[j].clone() + a.get(i, j).clone())
            .fold(None, |m: Option<S>, x| Some(m.map_or(x.clone(), |m| S::max_of(&m, &x))))
            .expect("n >= 2");
        tol.is_zero(&best)
    })
}

fn four_log<S: Scalar>(m: S, l: S, v: S) -> LogSpace<S> {
    let a = SymMatrix::from_fn(4, |i, j| match (i.min(j), i.max(j)) {
        (1, 2) => m.clone(),
        (1, 3) => l.clone(),
        (2, 3) => v.clone(),
        _ => S::zero(),
    });
    LogSpace::new(a, Tolerance::default()).expect("zero base row")
}

fn four_rho(mu: &Rational, la: &Rational, nu: &Rational) -> SeparatingMatrix<Rational> {
    let one = Rational::one();
    let a = SymMatrix::from_fn(4, |i, j| match (i.min(j), i.max(j)) {
        (x, y) if x == y => Rational::zero(),
        (1, 2) => mu.clone(),
        (1, 3) => la.clone(),
        (2, 3) => nu.clone(),
        _ => one.clone(),
    });
    SeparatingMatrix::new(a).expect("positive entries")
}

/// Region and lengths of `(mu, lambda, nu)` read off from the order pattern,
/// given the values `2 log` of each entry.
fn expected_region<T: Scalar>(m: &T, l: &T, v: &T) -> (RegionTag, Vec<T>) {
    let (m, l, v) = (m.clone(), l.clone(), v.clone());
    if m == l && l == v {
        (RegionTag::O, vec![])
    } else if v > m && v > l {
        (RegionTag::B1, vec![v.clone() - l, v - m])
    } else if m > l && m > v {
        (RegionTag::B2, vec![m.clone() - l, m - v])
    } else if l > m && l > v {
        (RegionTag::B3, vec![l.clone() - m, l - v])
    } else if l == v {
        (RegionTag::L1, vec![v - m])
    } else if m == v {
        (RegionTag::L2, vec![m - l])
    } else {
        (RegionTag::L3, vec![m - v])
    }
}

fn close<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    (a.clone() - b.clone()).abs().to_f64() <= tol
}

/// Cell counts and the doubled bounded-edge lengths match the region.
fn check_four_complex<S: Scalar>(c: &Complex<S>, tag: RegionTag, sides: &[S], tol: f64) -> Result<(), String> {
    let count = |dim: usize, bounded: bool| c.cells().iter().filter(|x| x.dim == dim && x.bounded == bounded).count();
    let rays = count(1, false);
    ensure(rays == 4 && c.cells().iter().all(|x| x.bounded || x.dim == 1), || format!("{tag:?}: {rays} rays"))?;
    let two = S::from_i64(2);
    let sorted = |mut v: Vec<S>| {
        v.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
        v
    };
    match tag {
        RegionTag::O => ensure(count(0, true) == 1 && c.cells().len() == 5, || "O: not one vertex".into()),
        RegionTag::L1 | RegionTag::L2 | RegionTag::L3 => {
            ensure(count(0, true) == 2 && count(1, true) == 1 && c.cells().len() == 7, || {
                format!("{tag:?}: f-vector {:?}", c.f_vector())
            })?;
            let e = c.cells().iter().find(|x| x.dim == 1 && x.bounded).expect("counted");
            let len = c.edge_length(e.id).ok_or("edge without length")?;
            ensure(close(&(len.clone() * two), &sides[0], tol), || format!("{tag:?}: edge {len} vs {}", sides[0]))
        }
        _ => {
            ensure(count(0, true) == 4 && count(1, true) == 4 && count(2, true) == 1 && c.cells().len() == 13, || {
                format!("{tag:?}: f-vector {:?}", c.f_vector())
            })?;
            let sq = c.cells().iter().find(|x| x.dim == 2).expect("counted");
            let got = sorted(c.side_lengths(sq.id).into_iter().map(|x| x * two.clone()).collect());
            let want = sorted(sides.iter().flat_map(|s| [s.clone(), s.clone()]).collect());
            ensure(got.len() == 4 && got.iter().zip(&want).all(|(a, b)| close(a, b, tol)), || {
                format!("{tag:?}: sides {got:?} vs {want:?}")
            })
        }
    }
}

/// Simplex grid `(i, j, k) / 12` with positive entries.
fn grid() -> Vec<(i64, i64, i64)> {
    let mut g = Vec::new();
    for i in 1..=10 {
        for j in 1..=(11 - i) {
            g.push((i, j, 12 - i - j));
        }
    }
    g
}

fn four_point_classification() -> Check {
    let tol = Tolerance::new(TOL_FLOAT);
    let mut tags = BTreeSet::new();
    let mut slowest = Duration::ZERO;
    let pts = grid();
    for &(i, j, k) in &pts {
        // Float layer: exact rho, float complex.
        let t0 = Instant::now();
        let (mu, la, nu) = (q(i, 12), q(j, 12), q(k, 12));
        let rho = four_rho(&mu, &la, &nu);
        let lg = |x: &Rational| 2.0 * x.to_f64().ln();
        let (tag, sides) = expected_region(&lg(&mu), &lg(&la), &lg(&nu));
        // The order pattern of `2 log` equals that of the entries.
        let (tag_exact, _) = expected_region(&mu, &la, &nu);
        ensure(tag == tag_exact, || format!("({i},{j},{k}): float order differs"))?;
        let got = classify4(&rho, tol).map_err(err("classify4"))?;
        ensure(got.tag == tag, || format!("({i},{j},{k}): {:?} vs {tag:?}", got.tag))?;
        ensure(got.sides.len() == sides.len() && got.sides.iter().zip(&sides).all(|(a, b)| close(a, b, TOL_FLOAT)), || {
            format!("({i},{j},{k}): sides {:?} vs {sides:?}", got.sides)
        })?;
        let rows = (0..4).map(|a| (0..4).map(|b| rho.get(a, b).clone()).collect()).collect();
        let space = AntipodalSpace::from_rows(rows, tol).map_err(err("space"))?.to_log_weights();
        let c = build_complex(&space, Options::default()).map_err(err("complex"))?;
        check_four_complex(&c, tag, &sides, TOL_FLOAT).map_err(|e| format!("({i},{j},{k}) float: {e}"))?;
        slowest = slowest.max(t0.elapsed());

        // Exact layer: rational log weights.
        let t0 = Instant::now();
        let (m, l, v) = (q(-4 * (12 - i), 4), q(-4 * (12 - j), 4), q(-4 * (12 - k), 4));
        let (tag, sides) = expected_region(&m, &l, &v);
        let log = four_log(m, l, v);
        let got = classify4_log(&log).map_err(err("classify4_log"))?;
        ensure(got.tag == tag && got.sides == sides, || format!("({i},{j},{k}) exact: {got:?}"))?;
        let c = build_complex(&log, Options::default()).map_err(err("complex"))?;
        check_four_complex(&c, tag, &sides, 0.0).map_err(|e| format!("({i},{j},{k}) exact: {e}"))?;
        slowest = slowest.max(t0.elapsed());
        tags.insert(tag);
    }
    ensure(tags.len() == 7, || format!("grid covers {} regions", tags.len()))?;
    ensure(slowest < MAX_INSTANCE_TIME, || format!("slowest instance {slowest:?}"))?;
    Ok(format!("{} grid points, 7 regions, slowest {:.1} ms", pts.len(), slowest.as_secs_f64() * 1e3))
}

fn exact_star() -> Check {
    let (m2, zero) = (q(-2, 1), Rational::zero());
    let log = four_log(m2.clone(), m2.clone(), m2);
    let c = build_complex(&log, Options::default()).map_err(err("complex"))?;
    let want = [q(-1, 1), q(1, 1), q(1, 1), q(1, 1)];
    let verts: Vec<_> = c.vertices().collect();
    ensure(verts.len() == 1 && verts[0].witness.0 == want, || format!("vertices {verts:?}"))?;
    let mut residual = zero.clone();
    for i in 0..4 {
        for j in (i + 1)..4 {
            residual += (want[i].clone() + want[j].clone() + log.weight(i, j).clone()).abs();
        }
    }
    ensure(residual == zero, || format!("vertex residual {residual}"))?;
    let mut t_min = vec![None; 4];
    for cell in c.rays() {
        let ray = cell.ray.as_ref().ok_or("ray without spec")?;
        let end = &c.cell(ray.endpoint).witness.0;
        // The threshold is the center coordinate at the endpoint, and the
        // ray stays in the space past it.
        ensure(ray.t_min == end[ray.center], || format!("ray {}: threshold off the endpoint", ray.center))?;
        for step in [q(1, 2), q(3, 1)] {
            let p: Vec<Rational> =
                end.iter().zip(&ray.direction).map(|(x, d)| x.clone() + d.clone() * step.clone()).collect();
            ensure(is_member_direct(log.weights(), &p, log.tolerance()), || format!("ray {} leaves", ray.center))?;
            ensure(p[ray.center] == ray.t_min.clone() + step.clone(), || "ray is not unit speed".into())?;
        }
        t_min[ray.center] = Some(ray.t_min.clone());
    }
    let t_min: Vec<Rational> = t_min.into_iter().collect::<Option<_>>().ok_or("missing ray")?;
    ensure(t_min == want, || format!("t_min {t_min:?}"))?;
    Ok("vertex (-1,1,1,1), t_min (-1,1,1,1), residual 0".into())
}

fn ball_and_hull() -> Check {
    let t0 = Instant::now();
    let mut spaces = 0;
    let mut checked_vertices = 0;
    for s in 0..20u64 {
        let n = 4 + (s as usize % 3);
        let space = random_log_space(&mut rng(1000 + s), n, 2);
        let c = build_complex(&space, Options::default()).map_err(err("complex"))?;
        let rt = r_tilde(&c).map_err(err("r_tilde"))?;
        for extra in [1, 5] {
            let r = rt.clone() + q(extra, 1);
            let rep = ball_hull_check(&c, &r, BALL_SAMPLES, s).map_err(err("ball_hull_check"))?;
            ensure(rep.ok() && rep.max_deviation == 0.0 && rep.samples == BALL_SAMPLES, || {
                format!("space {s}, r = r~+{extra}: {:?}", rep.failures)
            })?;
            // Recheck the tight-span side directly.
            let ts = tight_span(&sphere_metric(&c, &r).map_err(err("sphere"))?, Options::default())
                .map_err(err("tight span"))?;
            for (_, f) in ts.vertices() {
                let tau: Vec<Rational> = f.iter().map(|x| r.clone() - x.clone()).collect();
                ensure(is_member_direct(space.weights(), &tau, space.tolerance()), || {
                    format!("space {s}: hull vertex outside the space")
                })?;
                ensure(sup(&tau) <= r, || format!("space {s}: hull vertex outside the ball"))?;
                checked_vertices += 1;
            }
        }
        spaces += 1;
    }
    let el = t0.elapsed();
    ensure(el < MAX_BALL_HULL_TIME, || format!("took {el:?}"))?;
    Ok(format!("{spaces} spaces x 2 radii, {checked_vertices} hull vertices, {:.1} s", el.as_secs_f64()))
}

fn axioms() -> Check {
    let mut n_complexes = 0;
    let mut check = |c: &Complex<Rational>, what: &str| -> Result<(), String> {
        let rep = check_axioms(c).map_err(err("check_axioms"))?;
        n_complexes += 1;
        ensure(rep.ok(), || format!("{what}: {:?}", rep.violations))
    };
    for &(i, j, k) in &grid() {
        let log = four_log(q(-(12 - i), 1), q(-(12 - j), 1), q(-(12 - k), 1));
        check(&build_complex(&log, Options::default()).map_err(err("complex"))?, "grid")?;
    }
    for s in 0..12u64 {
        let n = 4 + (s as usize % 3);
        let space = random_log_space(&mut rng(2000 + s), n, 2);
        check(&build_complex(&space, Options::default()).map_err(err("complex"))?, "random")?;
        let tree = random_tree_space(&mut rng(3000 + s), n);
        check(&build_complex(&tree, Options::default()).map_err(err("complex"))?, "tree")?;
    }
    Ok(format!("{n_complexes} complexes, zero violations"))
}

fn oracle_equivalence() -> Check {
    let mut compared = 0;
    for n in [4usize, 5] {
        for s in 0..10u64 {
            let space = random_log_space(&mut rng(4000 + 10 * n as u64 + s), n, 2);
            for mask in 1u64..(1 << pair_count(n)) {
                let r = PairRelation::from_mask(n, mask);
                if !r.is_admissible() {
                    continue;
                }
                let sys = CellSystem::for_space(&space, r).map_err(err("system"))?;
                let st = solve(&sys).map_err(err("solve"))?.status;
                let closed = fourier_motzkin_feasible(&sys, Regime::Closed).map_err(err("fm"))?;
                let open = fourier_motzkin_feasible(&sys, Regime::Open).map_err(err("fm"))?;
                ensure((st != Status::Empty) == closed && (st == Status::Interior) == open, || {
                    format!("n = {n}, space {s}, {r}: {st:?} vs closed {closed}, open {open}")
                })?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} relations, zero disagreements"))
}

fn visual_recovery() -> Check {
    let mut worst = 0.0f64;
    for s in 0..20u64 {
        let n = 4 + (s as usize % 3);
        let space = random_log_space(&mut rng(5000 + s), n, 2);
        let c = build_complex(&space, Options::default()).map_err(err("complex"))?;
        let rt = r_tilde(&c).map_err(err("r_tilde"))?;
        let mut prev: Option<Vec<Rational>> = None;
        for r in [rt.clone() + q(1, 1), rt + q(7, 2)] {
            let pts = sphere_points(&c, &r).map_err(err("sphere"))?.points;
            let mut products = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let (x, y) = (&pts[i].0, &pts[j].0);
                    let p = (sup(x) + sup(y) - sup_dist(x, y)).half();
                    let rho = (space.weight(i, j).to_f64() / 2.0).exp();
                    worst = worst.max(((-p.to_f64()).exp() - rho).abs());
                    products.push(p);
                }
            }
            let rep = visual_recovery_check(&c, &r).map_err(err("visual"))?;
            ensure(rep.mismatches == 0 && rep.max_deviation <= TOL_FLOAT, || format!("space {s}: {rep:?}"))?;
            if let Some(prev) = &prev {
                ensure(*prev == products, || format!("space {s}: products depend on r"))?;
            }
            prev = Some(products);
        }
    }
    ensure(worst <= TOL_FLOAT, || format!("max deviation {worst:e}"))?;
    Ok(format!("40 sphere configurations, max deviation {worst:.1e}"))
}

fn ball_family(g: &mut SampleRng, c: &Complex<Rational>) -> (Vec<MoebiusVector<Rational>>, Vec<Rational>) {
    let k = g.gen_range(1..=5);
    let centers: Vec<_> = (0..k).map(|_| sample_point(c, &q(4, 1), g)).collect();
    let mut radii: Vec<Rational> = (0..k).map(|_| q(g.gen_range(0..=8), 4)).collect();
    for i in 0..k {
        for j in 0..k {
            let d = centers[i].distance(&centers[j]);
            let s = radii[i].clone() + radii[j].clone();
            if s < d {
                radii[i] = radii[i].clone() + d - s;
            }
        }
    }
    (centers, radii)
}

fn hyperconvexity() -> Check {
    let mut g = rng(6000);
    let mut tight_checked = false;
    for f in 0..50u64 {
        let n = 4 + (f as usize % 2);
        let space = random_log_space(&mut rng(6100 + f), n, 2);
        let c = build_complex(&space, Options::default()).map_err(err("complex"))?;
        let (centers, radii) = if f == 0 {
            // Two balls that touch in a single sup-norm distance.
            let a = sample_point(&c, &q(4, 1), &mut g);
            let mut b = sample_point(&c, &q(4, 1), &mut g);
            while b == a {
                b = sample_point(&c, &q(4, 1), &mut g);
            }
            let d = a.distance(&b);
            let r1 = d.clone() * q(1, 3);
            let r2 = d.clone() - r1.clone();
            ensure(r1.clone() + r2.clone() == d, || "tight family".into())?;
            tight_checked = true;
            (vec![a, b], vec![r1, r2])
        } else {
            ball_family(&mut g, &c)
        };
        for i in 0..centers.len() {
            for j in 0..centers.len() {
                ensure(radii[i].clone() + radii[j].clone() >= sup_dist(&centers[i].0, &centers[j].0), || {
                    "family is not admissible".into()
                })?;
            }
        }
        let w = hyperconvexity_witness(&c, &centers, &radii).map_err(|e| format!("family {f}: {e}"))?;
        ensure(is_member_direct(space.weights(), &w.0, space.tolerance()), || format!("family {f}: outside"))?;
        for (x, r) in centers.iter().zip(&radii) {
            ensure(sup_dist(&w.0, &x.0) <= *r, || format!("family {f}: witness outside a ball"))?;
        }
    }
    ensure(tight_checked, || "tight family missing".into())?;
    Ok("50 families, all witnessed, tight family included".into())
}

fn random_rho(g: &mut SampleRng, m: usize) -> SeparatingMatrix<Rational> {
    let a = SymMatrix::from_fn(m, |i, j| if i == j { Rational::zero() } else { q(g.gen_range(1..=12), 12) });
    SeparatingMatrix::new(a).expect("positive entries")
}

fn simplex_rho(c: &[Rational]) -> Result<SeparatingMatrix<Rational>, String> {
    let p = SimplexPoint::new(c.to_vec(), Tolerance::default()).map_err(err("simplex"))?;
    Ok(phi_inverse(&p).map_err(err("phi_inverse"))?.rho().clone())
}

fn teichmueller() -> Check {
    let mut g = rng(7000);
    let tol = Tolerance::default();
    // Round trips.
    let mut worst = 0.0f64;
    for m in [4usize, 5, 6] {
        let len = 1 + m * (m - 3) / 2;
        for _ in 0..20 {
            let raw: Vec<f64> = (0..len).map(|_| g.gen_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let p = SimplexPoint::new(raw.iter().map(|x| x / total).collect(), tol).map_err(err("simplex"))?;
            let back = phi(phi_inverse(&p).map_err(err("phi_inverse"))?.rho()).map_err(err("phi"))?;
            ensure(back.coords().len() == len, || format!("m = {m}: {} coordinates", back.coords().len()))?;
            for (a, b) in back.coords().iter().zip(p.coords()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure(worst <= TOL_TEICH, || format!("round trip error {worst:e}"))?;

    // Metric axioms.
    for t in 0..100 {
        let m = 4 + t % 2;
        let (a, b, c) = (random_rho(&mut g, m), random_rho(&mut g, m), random_rho(&mut g, m));
        let d = |x: &SeparatingMatrix<Rational>, y: &SeparatingMatrix<Rational>| d_moeb(x, y).map_err(err("d_moeb"));
        let (ab, ba, ac, cb) = (d(&a, &b)?, d(&b, &a)?, d(&a, &c)?, d(&c, &b)?);
        ensure(d(&a, &a)? == 0.0 && ab >= 0.0, || format!("triple {t}: not a pseudometric"))?;
        ensure((ab - ba).abs() <= TOL_TEICH, || format!("triple {t}: asymmetric"))?;
        ensure(ab <= ac + cb + TOL_TEICH, || format!("triple {t}: triangle inequality"))?;
    }

    // The distance from the centre to the square class.
    let third = q(1, 3);
    let centre = simplex_rho(&[third.clone(), third.clone(), third])?;
    let square = simplex_rho(&[q(1, 4), q(1, 4), q(1, 2)])?;
    let d = d_moeb(&centre, &square).map_err(err("d_moeb"))?;
    ensure((d - std::f64::consts::LN_2).abs() <= TOL_TEICH, || format!("d = {d}"))?;

    // Geodesics.
    let mut pairs = 0;
    let mut gworst = 0.0f64;
    for _ in 0..5 {
        let (a, b) = (random_rho(&mut g, 4), random_rho(&mut g, 4));
        let d = d_moeb(&a, &b).map_err(err("d_moeb"))?;
        if d < 1e-6 {
            continue;
        }
        pairs += 1;
        for _ in 0..20 {
            let s = g.gen_range(-5.0..=d + 5.0);
            let t = g.gen_range(-5.0..=d + 5.0);
            let gs = geodesic_point(&a, &b, s, tol).map_err(err("geodesic"))?;
            let gt = geodesic_point(&a, &b, t, tol).map_err(err("geodesic"))?;
            let dst = d_moeb(gs.rho(), gt.rho()).map_err(err("d_moeb"))?;
            gworst = gworst.max((dst - (t - s).abs()).abs());
        }
    }
    ensure(pairs > 0 && gworst <= TOL_FLOAT, || format!("geodesic error {gworst:e}"))?;

    for m in [4usize, 5, 6] {
        let got = phi(&random_rho(&mut g, m)).map_err(err("phi"))?.coords().len();
        let pairs_off_base = (m - 1) * (m - 2) / 2;
        ensure(got == 1 + m * (m - 3) / 2 && got == pairs_off_base, || format!("m = {m}: {got} coordinates"))?;
    }
    Ok(format!("round trip {worst:.1e}, d = ln 2, {pairs} geodesics within {gworst:.1e}"))
}

/// Largest minus second largest of the three pair sums of a quadruple, halved.
fn four_point_excess(p: &[MoebiusVector<f64>; 4]) -> f64 {
    let d = |a: usize, b: usize| sup_dist(&p[a].0, &p[b].0);
    let mut sums = [d(0, 1) + d(2, 3), d(0, 2) + d(1, 3), d(0, 3) + d(1, 2)];
    sums.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    (sums[0] - sums[1]) / 2.0
}

/// Reported `delta` and the independently recomputed maximum.
fn delta_pair(c: &Complex<Rational>, samples: usize, seed: u64) -> Result<(f64, f64), String> {
    let rep = delta_estimate(c, samples, seed).map_err(err("delta"))?;
    ensure(rep.quadruples == samples && rep.violations == 0, || format!("{rep:?}"))?;
    let mut g = rng(seed);
    let window = Rational::from_i64(moebius_core::complex::DELTA_RAY_WINDOW);
    let mut max = 0.0f64;
    for k in 0..samples {
        let quad: [MoebiusVector<f64>; 4] = std::array::from_fn(|_| sample_point(c, &window, &mut g).to_f64());
        let e = four_point_excess(&quad);
        ensure(e <= rep.delta + 1e-12 * (1.0 + rep.delta), || format!("quadruple {k} exceeds delta"))?;
        max = max.max(e);
    }
    ensure((max - rep.delta).abs() <= TOL_FLOAT, || format!("delta {} vs recomputed {max}", rep.delta))?;
    Ok((rep.delta, max))
}

fn delta_sampling() -> Check {
    let mut trees = 0;
    let mut worst_tree = 0.0f64;
    let mut tree_spaces: Vec<LogSpace<Rational>> = [(-3, -1, -1), (-1, -3, -1), (-1, -1, -3), (-2, -2, -2)]
        .iter()
        .map(|&(m, l, v)| four_log(q(m, 1), q(l, 1), q(v, 1)))
        .collect();
    for s in 0..8u64 {
        tree_spaces.push(random_tree_space(&mut rng(8000 + s), 4 + (s as usize % 3)));
    }
    for (k, space) in tree_spaces.iter().enumerate() {
        let c = build_complex(space, Options::default()).map_err(err("complex"))?;
        let (delta, _) = delta_pair(&c, 2000, 8100 + k as u64)?;
        worst_tree = worst_tree.max(delta);
        trees += 1;
    }
    ensure(worst_tree <= TOL_FLOAT, || format!("tree delta {worst_tree:e}"))?;
    let square = four_log(q(-4, 1), q(-4, 1), q(-2, 1));
    let c = build_complex(&square, Options::default()).map_err(err("complex"))?;
    let (delta, _) = delta_pair(&c, DELTA_SAMPLES, 8200)?;
    ensure(delta > SQUARE_DELTA_MIN, || format!("square delta {delta}"))?;
    Ok(format!("{trees} trees with delta <= {worst_tree:.1e}, square delta {delta:.4} over {DELTA_SAMPLES} quadruples"))
}

fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| h[x]).collect()
}

/// Permutations preserving every cross-ratio `rho_ij rho_kl / (rho_ik rho_jl)`.
fn cross_ratio_symmetries(rho: &SeparatingMatrix<Rational>) -> BTreeSet<Vec<usize>> {
    let m = rho.n();
    let cr = |p: &[usize], i: usize, j: usize, k: usize, l: usize| {
        let r = |a: usize, b: usize| rho.get(p[a], p[b]).clone();
        r(i, j) * r(k, l) / (r(i, k) * r(j, l))
    };
    let id: Vec<usize> = (0..m).collect();
    let mut out = BTreeSet::new();
    let mut perms = vec![vec![]];
    for _ in 0..m {
        perms = perms
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..m).filter(|x| !p.contains(x)).map(|x| [p.as_slice(), &[x]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    for p in perms {
        let ok = (0..m).all(|i| {
            (0..m).all(|j| {
                (0..m).all(|k| {
                    (0..m).all(|l| {
                        let distinct = BTreeSet::from([i, j, k, l]).len() == 4;
                        !distinct || cr(&p, i, j, k, l) == cr(&id, i, j, k, l)
                    })
                })
            })
        });
        if ok {
            out.insert(p);
        }
    }
    out
}

fn symmetries() -> Check {
    let third = q(1, 3);
    for (coords, order) in [(vec![third.clone(), third.clone(), third], 24), (vec![q(1, 4), q(1, 4), q(1, 2)], 8)] {
        let rho = simplex_rho(&coords)?;
        let g = moebius_symmetries(&rho, Tolerance::default()).map_err(err("symmetries"))?;
        ensure(g.order() == order, || format!("{coords:?}: order {}", g.order()))?;
        let set: BTreeSet<Vec<usize>> = g.elements.iter().cloned().collect();
        ensure(set == cross_ratio_symmetries(&rho), || format!("{coords:?}: differs from cross-ratio count"))?;
        for a in &g.elements {
            let mut inv = vec![0; a.len()];
            for (i, &x) in a.iter().enumerate() {
                inv[x] = i;
            }
            ensure(set.contains(&inv), || format!("{coords:?}: inverse missing"))?;
            for b in &g.elements {
                ensure(set.contains(&compose(a, b)), || format!("{coords:?}: not closed"))?;
            }
        }
    }
    Ok("orders 24 and 8, closed under composition and inverses".into())
}

type Criterion = (usize, &'static str, fn() -> Check);

pub const CRITERIA: [Criterion; 10] = [
    (1, "four-point classification", four_point_classification),
    (2, "exact star instance", exact_star),
    (3, "ball equals injective hull", ball_and_hull),
    (4, "complex axioms", axioms),
    (5, "oracle equivalence", oracle_equivalence),
    (6, "visual metric recovery", visual_recovery),
    (7, "hyperconvexity", hyperconvexity),
    (8, "Teichmueller layer", teichmueller),
    (9, "delta sampling", delta_sampling),
    (10, "symmetries", symmetries),
];

pub fn run_one(&(id, name, f): &Criterion) -> CriterionResult {
    let t0 = Instant::now();
    let r = f();
    let elapsed = t0.elapsed();
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, name, passed, detail, elapsed }
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(run_one).collect()
}

pub fn report_json(results: &[CriterionResult]) -> Value {
    json!({
        "passed": results.iter().all(|r| r.passed),
        "criteria": results.iter().map(|r| json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "detail": r.detail,
            "seconds": r.elapsed.as_secs_f64(),
        })).collect::<Vec<_>>(),
    })
}

/// One line per criterion.
pub fn report_line(r: &CriterionResult) -> String {
    format!(
        "{} criterion {:>2} {}: {} ({:.2} s)",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.detail,
        r.elapsed.as_secs_f64()
    )
}

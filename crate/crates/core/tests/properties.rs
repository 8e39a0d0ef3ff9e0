use brillouin::counting::{rg_bruteforce, rg_formula};
use brillouin::fuchsian::{solve_quadruples, Quadruple};
use brillouin::mediatrix::{level_function, side_of, trace_from, trace_level_set, Side, TraceOptions};
use brillouin::pointsets::{PointSet, PointSetDescriptor};
use brillouin::zones::{classify, raster, Window};
use brillouin::{Metric, Point2};
use proptest::prelude::*;

fn metric_strategy() -> impl Strategy<Value = Metric> {
    prop_oneof![
        Just(Metric::MANHATTAN),
        Just(Metric::EUCLIDEAN),
        Just(Metric::Lk { exponent: 4.0 }),
        (1.0f64..8.0).prop_map(|k| Metric::Lk { exponent: k }),
    ]
}

fn planar() -> impl Strategy<Value = Point2> {
    (-20.0f64..20.0, -20.0f64..20.0).prop_map(|(x, y)| Point2::new(x, y))
}

fn disk() -> impl Strategy<Value = Point2> {
    (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Point2::new(r * t.cos(), r * t.sin()))
}

/// Multiples of 1/64 in [-8, 8]: sums and differences are exact.
fn dyadic() -> impl Strategy<Value = Point2> {
    (-512i32..=512, -512i32..=512).prop_map(|(i, j)| Point2::new(i as f64 / 64.0, j as f64 / 64.0))
}

fn gamma2_elements() -> Vec<Quadruple> {
    (0..30).flat_map(|n| solve_quadruples(n, 2)).collect()
}

proptest! {
    #[test]
    fn lk_metric_axioms(m in metric_strategy(), a in planar(), b in planar(), c in planar()) {
        let d = |p, q| m.distance(p, q).unwrap();
        prop_assert_eq!(d(a, b), d(b, a));
        prop_assert_eq!(d(a, a), 0.0);
        prop_assert!(d(a, c) <= (d(a, b) + d(b, c)) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn disk_metric_axioms(a in disk(), b in disk(), c in disk()) {
        let m = Metric::HyperbolicDisk;
        let d = |p, q| m.distance(p, q).unwrap();
        prop_assert_eq!(d(a, b), d(b, a));
        prop_assert!(d(a, c) <= (d(a, b) + d(b, c)) * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn disk_metric_invariant_under_level_two_group(a in disk(), b in disk(), i in 0usize..64) {
        let gs = gamma2_elements();
        let g = gs[i % gs.len()];
        let m = Metric::HyperbolicDisk;
        let (ga, gb) = (g.apply(a), g.apply(b));
        prop_assume!(m.contains(ga) && m.contains(gb) && ga.norm_sq() < 0.999 && gb.norm_sq() < 0.999);
        let (d0, d1) = (m.distance(a, b).unwrap(), m.distance(ga, gb).unwrap());
        prop_assert!((d0 - d1).abs() <= 1e-7 * (1.0 + d0), "{} vs {}", d0, d1);
    }

    #[test]
    fn lk_translation_invariance_on_dyadics(m in metric_strategy(), a in dyadic(), b in dyadic(), t in dyadic()) {
        let d0 = m.distance(a, b).unwrap();
        let d1 = m.distance(a + t, b + t).unwrap();
        prop_assert_eq!(d0, d1);
    }

    #[test]
    fn rg_formula_matches_bruteforce(n in 0u64..5_000_000) {
        prop_assert_eq!(rg_formula(n), rg_bruteforce(n));
    }

    #[test]
    fn rg_multiplicative_on_coprimes(a in 1u64..3000, b in 1u64..3000) {
        prop_assume!(num_gcd(a, b) == 1);
        prop_assert_eq!(4 * rg_formula(a * b), rg_formula(a) * rg_formula(b));
    }

    #[test]
    fn level_group_closed_under_products(i in 0usize..500, j in 0usize..500, k in prop::sample::select(vec![2u64, 3, 5])) {
        let gs: Vec<Quadruple> = (0..40).flat_map(|n| solve_quadruples(n, k)).collect();
        let (g, h) = (gs[i % gs.len()], gs[j % gs.len()]);
        let gh = g.compose(&h).unwrap();
        prop_assert!(gh.in_level(k) || gh.negate().in_level(k));
        prop_assert!(g.compose(&g.inverse()).unwrap().sign_reduced() == Quadruple::IDENTITY.sign_reduced());
    }

    #[test]
    fn classification_is_lattice_translation_invariant(x in dyadic(), i in -4i32..=4, j in -4i32..=4, m in metric_strategy()) {
        let set = PointSet::SquareLattice;
        let s = Point2::new(i as f64, j as f64);
        let c0 = classify(&m, &set, Point2::ORIGIN, x, 1e-9).unwrap();
        let c1 = classify(&m, &set, s, x + s, 1e-9).unwrap();
        prop_assert_eq!(c0, c1);
    }

    #[test]
    fn covering_and_b_inside_big_b(x in planar(), m in metric_strategy()) {
        let c = classify(&m, &PointSet::SquareLattice, Point2::ORIGIN, x, 1e-9).unwrap();
        prop_assert!(c.ell >= 1);
        prop_assert!(c.in_big_b(c.m + 1));
        for n in 1..=c.m + c.ell + 1 {
            if c.in_b(n) {
                prop_assert!(c.in_big_b(n));
            }
        }
    }

    #[test]
    fn b_zones_of_distinct_members_are_disjoint(x in (-3.0f64..3.0, -3.0f64..3.0), n in 1usize..6) {
        let x = Point2::new(x.0, x.1);
        let set = PointSet::SquareLattice;
        let m = Metric::EUCLIDEAN;
        let owners = set
            .enumerate_in_ball(&m, x, 6.0)
            .unwrap()
            .into_iter()
            .filter(|&s| classify(&m, &set, s, x, 1e-9).unwrap().in_b(n))
            .count();
        prop_assert!(owners <= 1);
    }

    #[test]
    fn orbit_members_classify_with_the_identity_at_the_origin(x in (0.0f64..0.6, 0.0f64..std::f64::consts::TAU)) {
        let set = PointSet::new(&PointSetDescriptor::GammaOrbit { k: 2, n_max: 120 }).unwrap();
        let x = Point2::new(x.0 * x.1.cos(), x.0 * x.1.sin());
        let c = classify(&Metric::HyperbolicDisk, &set, Point2::ORIGIN, x, 1e-9).unwrap();
        prop_assert!(c.ell >= 1);
    }

    #[test]
    fn mediatrix_sides_of_trace(ai in -3i32..=3, aj in -3i32..=3) {
        prop_assume!(ai != 0 || aj != 0);
        let a = Point2::new(ai as f64, aj as f64);
        let m = Metric::Lk { exponent: 4.0 };
        let w = Window::square(6.0);
        let poly = trace_level_set(&m, a, None, w, TraceOptions::default()).unwrap();
        prop_assert!(poly.max_residual() <= 1e-8);
        for (i, p) in poly.points.iter().enumerate().step_by(37) {
            let q = poly.points.get(i + 1).or(poly.points.get(i.wrapping_sub(1))).copied().unwrap();
            let t = q - *p;
            let len = t.norm_sq().sqrt();
            prop_assume!(len > 0.0);
            let nrm = Point2::new(-t.y / len, t.x / len) * 1e-4;
            let sides = [side_of(&m, Point2::ORIGIN, a, *p + nrm, 1e-12).unwrap(), side_of(&m, Point2::ORIGIN, a, *p - nrm, 1e-12).unwrap()];
            prop_assert!(sides.contains(&Side::Closer0) && sides.contains(&Side::CloserA), "{:?} at {:?}", sides, p);
        }
    }
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn hausdorff_one_sided(from: &[Point2], to: &[Point2]) -> f64 {
    from.iter()
        .map(|p| to.iter().map(|q| (*p - *q).norm_sq()).fold(f64::INFINITY, f64::min).sqrt())
        .fold(0.0, f64::max)
}

#[test]
fn trace_reversibility() {
    let m = Metric::Lk { exponent: 4.0 };
    let w = Window::square(5.0);
    let a = Point2::new(2.0, 1.0);
    let opts = TraceOptions::default();
    let full = trace_level_set(&m, a, None, w, opts).unwrap();
    let step = 1e-3 * w.diagonal();
    for idx in [full.points.len() / 5, full.points.len() / 2, 4 * full.points.len() / 5] {
        let again = trace_from(&m, a, full.points[idx], w, opts).unwrap();
        let h = hausdorff_one_sided(&again.points, &full.points).max(hausdorff_one_sided(&full.points, &again.points));
        assert!(h <= 2.0 * step, "Hausdorff distance {h} from vertex {idx}");
    }
}

#[test]
fn euclidean_trace_matches_bisector_everywhere() {
    let w = Window::square(5.0);
    for a in [Point2::new(2.0, 0.0), Point2::new(1.0, 3.0), Point2::new(-2.5, 0.5)] {
        let poly = trace_level_set(&Metric::EUCLIDEAN, a, None, w, TraceOptions::default()).unwrap();
        let line = brillouin::mediatrix::euclidean_bisector(Point2::ORIGIN, a).unwrap();
        for p in &poly.points {
            assert!(line.signed_distance(*p).abs() <= 1e-6);
            assert!(level_function(2.0, a, *p).abs() <= 1e-8);
        }
    }
}

#[test]
fn index_stability_under_halved_tolerance() {
    let set = PointSet::SquareLattice;
    let w = Window::square(3.0);
    let a = raster(&Metric::EUCLIDEAN, &set, Point2::ORIGIN, w, 600, 600, 1e-9).unwrap();
    let b = raster(&Metric::EUCLIDEAN, &set, Point2::ORIGIN, w, 600, 600, 5e-10).unwrap();
    let frac = brillouin::verify::raster_disagreement(&a, &b).unwrap();
    assert!(frac < 1e-3, "{frac}");
}

#[test]
fn raster_is_deterministic_across_thread_counts() {
    let set = PointSet::new(&PointSetDescriptor::GammaOrbit { k: 2, n_max: 50 }).unwrap();
    let opts = brillouin::zones::RasterOptions { tol: 1e-9, clip_horizon: true };
    let render = || {
        brillouin::zones::raster_with(&Metric::HyperbolicDisk, &set, Point2::ORIGIN, Window::square(0.95), 80, 80, opts)
            .unwrap()
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(render);
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(render);
    assert_eq!(one, many);
}

#[test]
fn area_estimate_is_deterministic_across_thread_counts() {
    use brillouin::zones::{area_estimate, Region};
    let est = || {
        area_estimate(&Metric::EUCLIDEAN, &PointSet::SquareLattice, Point2::ORIGIN, 2, Region::Rect(Window::square(1.5)), 50_000, 11)
            .unwrap()
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(est);
    let many = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(est);
    assert_eq!(one, many);
}

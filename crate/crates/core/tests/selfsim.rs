mod common;

use heis::holder2d::build_tree;
use heis::selfsim::*;
use heis::{CarnotParams, HPoint};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eta_rho_duality(n in 1u32..=32, ci in 0usize..4) {
        let c = [1.5, 2.0, 4.0, 8.0][ci];
        let (e, r) = (eta(n, c).unwrap(), rho(n, c).unwrap());
        prop_assert!((e * r.log2() + n as f64).abs() <= 1e-12 * n as f64);
        prop_assert!(e < 2.0 / 3.0);
        prop_assert!(eta(n + 1, c).unwrap() > e);
        prop_assert!(eta_rho_identity_error(n, c, 8).unwrap() <= 1e-12);
    }

    #[test]
    fn displacement_total_dominates_tail(b in 0.01f64..10.0, n in 1u32..10, i in 0u32..10) {
        let d = displacement_bounds(b, n, i).unwrap();
        prop_assert!(d.total >= displacement_tail(b, n, i) * (1.0 - 1e-15));
        let next = displacement_bounds(b, n, i + 1).unwrap();
        prop_assert!((next.total - d.total * (-(n as f64)).exp2()).abs() <= 1e-15 * d.total);
    }

    #[test]
    fn neighborhood_telescope(mu in 0.01f64..10.0, n in 1u32..20) {
        let nb = neighborhood_bound(mu, n);
        prop_assert!(nb.telescope <= nb.bound * (1.0 + 1e-15));
        prop_assert!(properness_bound(mu, n, -3) == properness_bound(mu, n, -2) * (n as f64).exp2());
    }

    #[test]
    fn select_n_is_monotone(e1 in 0.01f64..0.6, e2 in 0.01f64..0.6, c in 1.1f64..16.0, r in 0.1f64..20.0) {
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let a = select_n(lo, c, r, 1.0, 1.0, 1).unwrap();
        let b = select_n(hi, c, r, 1.0, 1.0, 1).unwrap();
        prop_assert!(a >= b);
        prop_assert!(select_n(lo, 2.0 * c, r, 1.0, 1.0, 1).unwrap() >= a);
        prop_assert!(eta(a, c).unwrap() > 2.0 / 3.0 - lo);
        prop_assert!((-(a as f64)).exp2() <= r / 8.0);
        if a > 1 {
            let prev = a - 1;
            prop_assert!(!(eta(prev, c).unwrap() > 2.0 / 3.0 - lo && (-(prev as f64)).exp2() <= r / 8.0));
        }
    }

    #[test]
    fn grids_are_separated(d in 2u32..=3, count in 1usize..600) {
        let g = separated_grid(d, count).unwrap();
        prop_assert_eq!(g.len(), count);
        prop_assert!(is_two_separated(&g));
    }

    #[test]
    fn fixed_points_match_iteration(seed in 0u64..100_000) {
        use rand::Rng;
        let mut rng = heis::rng::sample_rng(seed, 0);
        let scale = rng.gen_range(1.1..16.0);
        let h = EuclideanSim::planar(scale, rng.gen_range(0.0..6.3), [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let g = HPoint::raw(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let sp = SimilarityPair::new(h, HeisenbergSim { g, n: rng.gen_range(1..5) }).unwrap();
        let f = fixed_points_seeded(&sp, seed).unwrap();
        prop_assert!(f.y0_iteration_error <= 1e-10);
        prop_assert!(f.x0_residual <= 1e-10 * (1.0 + f.x0[0].hypot(f.x0[1])));
    }

    #[test]
    fn dilation_volume_is_r4(r in 1.0f64..8.0, x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
        let p = HPoint::raw(x, y, z);
        let det = dilation_jacobian_det(r, p);
        prop_assert!((det - r.powi(4)).abs() <= 1e-9 * r.powi(4));
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            prop_assert!(square_area_stretch(r, p, a, b, 1e-3) <= dilation_distortion(r, 2).unwrap() * (1.0 + 1e-3));
        }
    }
}

#[test]
fn eta_approaches_two_thirds() {
    for c in [1.5, 2.0, 4.0, 8.0] {
        assert!(eta(1 << 20, c).unwrap() > 2.0 / 3.0 - 1e-4);
    }
}

#[test]
fn small_skeleton_windows_are_invariant() {
    for n0 in 1..=2 {
        for n in n0..=4 {
            for b in [1, 2, 3] {
                let w = skeleton_window(n0, n, b).unwrap();
                assert_eq!(w.dilation.failures, 0);
                assert_eq!(w.lattice.failures, 0);
                assert!(w.lattice.edges_checked > 0);
            }
        }
    }
    assert!(skeleton_window(2, 1, 1).is_err());
    let w = skeleton_window(2, 2, 1).unwrap();
    for e in w.edges(1 << 20).unwrap() {
        assert!(w.edge_curve(&e).unwrap().is_horizontal(0.0));
    }
    assert!(w.measured_mu().unwrap() > 0.0);
}

#[test]
fn seed_conjugation() {
    let tree = build_tree(&common::unit_square(), 2, 4, &CarnotParams::heisenberg(1.0).unwrap()).unwrap();
    let lay = SeedLayout { c1: [0.3, 0.1], rho: 0.25, angle: 0.7, g: HPoint::raw(0.2, -0.1, 0.3), n: 1 };
    let s = SelfSimilarSeed::new(&tree, lay).unwrap();
    let rel = |a: HPoint, b: HPoint| a.coord_dist(b) / (1.0 + a.coord_norm());
    for i in 0..200 {
        let a = i as f64 * 2.399963;
        let r = 2.5 * ((i as f64 + 0.5) / 200.0).sqrt();
        let x = [r * a.cos(), r * a.sin()];
        let f = conjugated_eval(&s, x).unwrap();
        let g = s.pair().m.apply(conjugated_eval(&s, s.pair().h.apply_inverse2(x)).unwrap());
        assert!(rel(f, g) <= 1e-9);
        if r <= 1.0 {
            assert_eq!(f, s.eval(x).unwrap());
        }
    }
    // on the unit circle the seed is the tree's boundary curve
    let v = s.eval([0.0, -1.0]).unwrap();
    assert!(v.coord_dist(tree.evaluate_traced([0.0, -1.0]).unwrap().value) < 1e-12);
    assert!(SelfSimilarSeed::new(&tree, SeedLayout { c1: [0.8, 0.0], ..lay }).is_err());
}

#[test]
fn approximation_radius_check() {
    let tree = build_tree(&common::unit_square(), 1, 4, &CarnotParams::heisenberg(1.0).unwrap()).unwrap();
    let lay = SeedLayout { c1: [-0.2, 0.3], rho: 0.3, angle: 0.0, g: HPoint::raw(0.0, 0.5, 0.0), n: 2 };
    let s = SelfSimilarSeed::new(&tree, lay).unwrap();
    let chk = approx_check(|p| p_analog(&s, p), 0.5, 300, 4).unwrap();
    assert!(chk.sup <= chk.bound, "{chk:?}");
    assert!((chk.r - approx_radius(0.5, chk.m_disp).unwrap()).abs() == 0.0);
}

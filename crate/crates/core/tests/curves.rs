mod common;

use heis::curve::*;
use heis::group::dilate;
use heis::{HCurve, HPoint, HSim};
use proptest::prelude::*;

fn polygon() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(x, y)| [x, y]), 2..12)
}

fn planar_len(p: &[[f64; 2]]) -> f64 {
    p.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lift_length_is_planar_length(p in polygon(), z0 in -2.0f64..2.0) {
        let c = horizontal_lift(&p, z0).unwrap();
        let want = planar_len(&p);
        prop_assert!((curve_length_dc(&c).unwrap() - want).abs() <= 1e-12 * (1.0 + want));
        prop_assert!(is_horizontal(&c, 1e-12));
    }

    #[test]
    fn closed_lift_defect_is_shoelace(mut p in polygon()) {
        p.push(p[0]);
        let c = horizontal_lift(&p, 0.0).unwrap();
        let v = c.vertices();
        let dz = v[v.len() - 1].z - v[0].z;
        // ∫x dy over the closed polygon
        let shoelace: f64 = p.windows(2).map(|w| 0.5 * (w[0][0] + w[1][0]) * (w[1][1] - w[0][1])).sum();
        prop_assert!((dz - shoelace).abs() <= 1e-12 * (1.0 + shoelace.abs()));
    }

    #[test]
    fn length_is_invariant_and_homogeneous(p in polygon(), g in (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), r in 0.1f64..5.0) {
        let c = close_with_geodesic(&horizontal_lift(&p, 0.0).unwrap()).unwrap();
        let len = curve_length_dc(&c).unwrap();
        let g = HPoint::raw(g.0, g.1, g.2);
        let moved = c.left_translate(g);
        prop_assert!((curve_length_dc(&moved).unwrap() - len).abs() <= 1e-12 * (1.0 + len));
        prop_assert!(is_horizontal(&moved, 1e-9));
        let scaled = c.transform(&HSim { translation: heis::IDENTITY, scale: r });
        prop_assert!((curve_length_dc(&scaled).unwrap() - r * len).abs() <= 1e-12 * (1.0 + r * len));
    }

    #[test]
    fn json_round_trip_is_exact(p in polygon()) {
        let c = close_with_geodesic(&horizontal_lift(&p, 0.3).unwrap()).unwrap().arc_length_parametrized();
        let back: HCurve = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn sub_curves_compose(p in polygon(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let c = horizontal_lift(&p, 0.0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let s = c.sub_curve(lo, hi).unwrap();
        let len = c.length();
        prop_assert!((s.length() - (hi - lo) * len).abs() <= 1e-10 * (1.0 + len));
        prop_assert!(s.vertices()[0].coord_dist(c.arc_point(lo)) <= 1e-12 * (1.0 + c.arc_point(lo).coord_norm()));
    }
}

#[test]
fn square_lift() {
    let sq = [[0., 0.], [1., 0.], [1., 1.], [0., 1.], [0., 0.]];
    let c = horizontal_lift(&sq, 0.0).unwrap();
    assert_eq!(*c.vertices().last().unwrap(), HPoint::raw(0.0, 0.0, 1.0));
    let closed = close_with_geodesic(&c).unwrap();
    assert!(closed.is_closed());
    let extra = curve_length_dc(&closed).unwrap() - 4.0;
    assert!((extra - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
}

#[test]
fn perturbed_lift_is_not_horizontal() {
    let c = horizontal_lift(&[[0., 0.], [1., 0.], [1., 1.]], 0.0).unwrap();
    let mut v = c.vertices().to_vec();
    v[1].z += 1e-3;
    let bad = HCurve::new(v, c.modes().to_vec(), false).unwrap();
    assert!(!is_horizontal(&bad, 1e-6));
    let vert = HCurve::new(vec![heis::IDENTITY, HPoint::raw(0., 0., 1.)], vec![SegmentMode::Straight], false).unwrap();
    assert!(!is_horizontal(&vert, 1e-9));
}

#[test]
fn geodesic_segments_are_horizontal_under_dilation() {
    let c = common::unit_square();
    let d = dilate(3.0, HPoint::raw(1.0, 2.0, 3.0)).unwrap();
    assert_eq!(d, HPoint::raw(3.0, 6.0, 27.0));
    let t = c.transform(&HSim { translation: HPoint::raw(1.0, -2.0, 0.5), scale: 2.5 });
    assert!(is_horizontal(&t, 1e-9));
}

use heis::group::{between, dilate, HSim};
use heis::metric::{cc_distance, dc_norm};
use heis::{inv, mul, HPoint, IDENTITY};
use proptest::prelude::*;

fn pt() -> impl Strategy<Value = HPoint> {
    (-5.0f64..5.0, -5.0f64..5.0, -10.0f64..10.0).prop_map(|(x, y, z)| HPoint::raw(x, y, z))
}

fn close(a: HPoint, b: HPoint, tol: f64) -> bool {
    a.coord_dist(b) <= tol * (1.0 + a.coord_norm().max(b.coord_norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms(p in pt(), q in pt(), r in pt()) {
        prop_assert!(close(mul(mul(p, q), r), mul(p, mul(q, r)), 1e-12));
        prop_assert_eq!(mul(IDENTITY, p), p);
        prop_assert_eq!(mul(p, IDENTITY), p);
        prop_assert!(close(mul(p, inv(p)), IDENTITY, 1e-12));
        prop_assert!(close(mul(inv(p), p), IDENTITY, 1e-12));
        prop_assert!(close(between(p, q), mul(inv(p), q), 1e-12));
    }

    #[test]
    fn dilation_is_an_automorphism(p in pt(), q in pt(), r in 0.0f64..4.0, s in 0.0f64..4.0) {
        let d = |t: f64, x: HPoint| dilate(t, x).unwrap();
        prop_assert!(close(d(r, mul(p, q)), mul(d(r, p), d(r, q)), 1e-12));
        prop_assert!(close(d(r, d(s, p)), d(r * s, p), 1e-12));
    }

    #[test]
    fn similarity_algebra(p in pt(), g in pt(), h in pt(), r in 0.2f64..4.0, s in 0.2f64..4.0) {
        let a = HSim::new(g, r).unwrap();
        let b = HSim::new(h, s).unwrap();
        prop_assert!(close(a.compose(&b).apply(p), a.apply(b.apply(p)), 1e-11));
        prop_assert!(close(a.inverse().apply(a.apply(p)), p, 1e-11));
        prop_assert!(close(a.powi(3).apply(p), a.apply(a.apply(a.apply(p))), 1e-10));
    }

    #[test]
    fn metric_axioms(p in pt(), q in pt(), w in pt(), g in pt(), r in 0.1f64..10.0) {
        let d = |a, b| cc_distance(a, b, 1e-9).unwrap();
        let dpq = d(p, q);
        let tol = 1e-9 * (1.0 + dpq);
        prop_assert!((d(q, p) - dpq).abs() <= tol);
        prop_assert!((d(mul(g, p), mul(g, q)) - dpq).abs() <= 1e-9 * (1.0 + dpq + g.coord_norm()));
        let dr = d(dilate(r, p).unwrap(), dilate(r, q).unwrap());
        prop_assert!((dr - r * dpq).abs() <= 1e-9 * (1.0 + r * dpq));
        prop_assert!(dpq <= d(p, w) + d(w, q) + tol);
        prop_assert_eq!(d(p, p), 0.0);
    }

    #[test]
    fn norm_dominates_planar_part(p in pt()) {
        let n = dc_norm(p).unwrap();
        prop_assert!(n >= p.x.hypot(p.y) * (1.0 - 1e-12));
        // a geodesic closed by its chord is a loop enclosing |z − xy/2|
        let a = (p.z - 0.5 * p.x * p.y).abs();
        let chord = p.x.hypot(p.y);
        prop_assert!(n + chord >= 2.0 * (std::f64::consts::PI * a).sqrt() * (1.0 - 1e-12));
    }
}

#[test]
fn spec_examples() {
    assert_eq!(mul(HPoint::raw(1., 0., 0.), HPoint::raw(0., 1., 0.)), HPoint::raw(1., 1., 1.));
    assert_eq!(mul(HPoint::raw(0., 1., 0.), HPoint::raw(1., 0., 0.)), HPoint::raw(1., 1., 0.));
    assert_eq!(inv(HPoint::raw(1., 1., 1.)), HPoint::raw(-1., -1., 0.));
    let d = cc_distance(IDENTITY, HPoint::raw(0., 0., 1.), 1e-9).unwrap();
    assert!((d - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    assert!(dilate(-1.0, IDENTITY).is_err());
    assert!(HPoint::new(f64::NAN, 0., 0.).is_err());
}

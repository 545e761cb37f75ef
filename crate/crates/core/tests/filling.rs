mod common;

use common::{normalized, random_closed, unit_square};
use heis::filling::*;
use heis::curve::is_horizontal;
use heis::{CarnotParams, HCurve, SegmentMode};
use proptest::prelude::*;

#[test]
fn counts_for_l2_r12() {
    let p = CarnotParams::heisenberg(2.0).unwrap();
    assert_eq!(filling_counts(12.0, &p), (7, 339));
    let f = coarse_filling(&normalized(&unit_square(), 12.0), &p).unwrap();
    assert_eq!((f.angular_count(), f.radial_count()), (7, 339));
    assert!(f.triangle_count() < 4746);
    let rep = f.report().unwrap();
    assert!(rep.ok && rep.max_perimeter <= 12.0);
}

#[test]
fn hub_triangle_shape() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let f = coarse_filling(&normalized(&unit_square(), 6.0), &p).unwrap();
    let id = f.triangle_id(TriangleKind::Hub { l: 2 });
    let edges = f.triangle_edges(id);
    assert!(matches!(edges[0].0, EdgeId::Radial { j: 0, l: 2 }));
    assert!(matches!(edges[1].0, EdgeId::Angular { j: 1, l: 2 }));
    assert!(matches!(edges[2].0, EdgeId::Radial { j: 0, l: 3 }) && !edges[2].1);
    let (c, _) = f.triangle_boundary_curve(id).unwrap();
    assert!(c.length_dc().unwrap() <= 6.0);
}

#[test]
fn detour_breaks_the_report() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let f = coarse_filling(&normalized(&unit_square(), 6.0), &p).unwrap();
    let e = EdgeId::Diagonal { j: 3, l: 1 };
    let (a, b) = f.edge_endpoints(e);
    let (pa, pb) = (f.vertex_image(a), f.vertex_image(b));
    // out along x and back: horizontal, long
    let far = heis::mul(pa, heis::HPoint::raw(10.0, 0.0, 0.0));
    let detour_mid = heis::curve::cc_geodesic(pa, far, 2, 1e-9).unwrap();
    let back = heis::curve::cc_geodesic(far, pb, 2, 1e-9).unwrap();
    let detour = HCurve::concat(&[detour_mid, back], false).unwrap();
    let g = f.with_edge_override(e, detour).unwrap();
    let rep = verify_filling(&g, 1.0);
    assert!(!rep.ok && rep.violations >= 1 && rep.max_perimeter > 6.0);
}

#[test]
fn rejects_bad_inputs() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    assert!(matches!(coarse_filling(&normalized(&unit_square(), 5.0), &p), Err(heis::Error::CurveTooShort { .. })));
    let open = heis::curve::horizontal_lift(&[[0., 0.], [1., 0.]], 0.0).unwrap();
    assert!(coarse_filling(&open, &p).is_err());
    let shifted = normalized(&unit_square(), 8.0).left_translate(heis::HPoint::raw(1.0, 0.0, 0.0));
    assert!(coarse_filling(&shifted, &p).is_err());
}

#[test]
fn boundary_edges_reproduce_the_curve() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let c = normalized(&unit_square(), 9.0);
    let f = coarse_filling(&c, &p).unwrap();
    let m = f.radial_count();
    let big_m = f.angular_count();
    for l in 0..big_m {
        let e = EdgeId::Angular { j: m, l };
        assert!(f.is_boundary(e));
        let ec = f.edge_curve(e).unwrap();
        // vertex images of the boundary ring are exact curve points
        let (a, b) = f.edge_endpoints(e);
        assert_eq!(ec.vertices()[0], f.vertex_image(a));
        assert_eq!(*ec.vertices().last().unwrap(), f.vertex_image(b));
        for k in 0..=8 {
            let u = k as f64 / 8.0;
            let want = f.curve().arc_point((l as f64 + u) / big_m as f64);
            assert!(f.edge_point(e, u).unwrap().coord_dist(want) < 1e-12);
        }
    }
    // every vertex of the input curve lies on the boundary edges exactly
    let fc = f.curve();
    let cum = fc.cumulative_lengths();
    for (i, v) in fc.vertices().iter().enumerate() {
        let frac = cum[i] / fc.length();
        let l = ((frac * big_m as f64).floor() as usize).min(big_m - 1);
        let u = frac * big_m as f64 - l as f64;
        let got = f.edge_point(EdgeId::Angular { j: m, l }, u).unwrap();
        assert!(got.coord_dist(*v) < 1e-12 * (1.0 + v.coord_norm()));
    }
}

#[test]
fn triangle_curves_are_ccw_horizontal_and_telescope() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let c = normalized(&unit_square(), 6.5);
    let f = coarse_filling(&c, &p).unwrap();
    let curves = triangle_boundary_curves(&f).unwrap();
    assert_eq!(curves.len(), f.triangle_count());
    let mut total = 0.0;
    for (id, tc) in curves.iter().enumerate() {
        assert!(tc.is_closed() && is_horizontal(tc, 1e-9));
        assert!(tc.length_dc().unwrap() <= 6.0 * (1.0 + 1e-12));
        let t = f.triangle_planar(id);
        let area = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]);
        assert!(area > 0.0, "triangle {id} is not counterclockwise");
        total += tc.planar_area_integral();
    }
    let want = f.curve().planar_area_integral();
    assert!((total - want).abs() < 1e-9 * (1.0 + want.abs()), "{total} vs {want}");
}

#[test]
fn interior_edges_appear_once_each_way() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let f = coarse_filling(&normalized(&unit_square(), 6.0), &p).unwrap();
    let mut seen = std::collections::HashMap::new();
    for id in 0..f.triangle_count() {
        for (e, fwd) in f.triangle_edges(id) {
            let s = seen.entry(e).or_insert((0, 0));
            if fwd {
                s.0 += 1
            } else {
                s.1 += 1
            }
        }
    }
    for (e, (a, b)) in seen {
        if f.is_boundary(e) {
            assert_eq!((a, b), (1, 0));
        } else {
            assert_eq!((a, b), (1, 1), "{e:?}");
        }
    }
}

#[test]
fn locate_matches_triangles() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let f = coarse_filling(&normalized(&unit_square(), 6.0), &p).unwrap();
    for id in (0..f.triangle_count()).step_by(7) {
        let t = f.triangle_planar(id);
        let cen = [(t[0][0] + t[1][0] + t[2][0]) / 3.0, (t[0][1] + t[1][1] + t[2][1]) / 3.0];
        assert_eq!(f.locate(cen), id);
    }
}

#[test]
fn epsilon_area_examples() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let c = unit_square();
    let len = c.length_dc().unwrap();
    let (bm, m) = filling_counts(6.0, &p);
    assert_eq!(epsilon_area(&c, len, &p).unwrap(), 2 * m * bm - bm);
    assert_eq!(epsilon_area(&c, 2.0 * len, &p).unwrap(), 1);
    let a = epsilon_area(&c, len / 2.0, &p).unwrap();
    let b = epsilon_area(&c, len / 4.0, &p).unwrap();
    assert!(b as f64 <= 8.0 * a as f64 * 1.2);
    let (bm, m) = filling_counts(6.0 * 4.0, &p);
    assert!(b < 2 * m * bm);
    assert_eq!(epsilon_area_bound(len, len / 4.0, &p), b);
}

#[test]
fn export_has_every_edge() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let f = coarse_filling(&normalized(&unit_square(), 6.0), &p).unwrap();
    let file = f.to_file(2).unwrap();
    assert_eq!(file.triangles.len(), f.triangle_count());
    assert_eq!(file.edges.len(), f.edges().len());
    let round: FillingFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
    assert_eq!(round.triangles, file.triangles);
}

#[test]
fn geodesic_segments_flagged() {
    let p = CarnotParams::heisenberg(1.0).unwrap();
    let f = coarse_filling(&normalized(&unit_square(), 6.0), &p).unwrap();
    let c = f.edge_curve(EdgeId::Diagonal { j: 2, l: 0 }).unwrap();
    assert!(c.modes().iter().all(|m| *m == SegmentMode::Geodesic));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_curves_meet_the_bounds(seed in 0u64..10_000, r in 6.0f64..20.0, nv in 3usize..9) {
        let mut rng = heis::rng::sample_rng(seed, 0);
        let c = normalized(&random_closed(&mut rng, nv), r);
        let p = CarnotParams::heisenberg(1.0).unwrap();
        let f = coarse_filling(&c, &p).unwrap();
        let rep = f.report().unwrap();
        prop_assert!(rep.ok);
        prop_assert!(rep.max_perimeter <= 6.0);
        prop_assert!(rep.count < rep.count_bound);
    }
}

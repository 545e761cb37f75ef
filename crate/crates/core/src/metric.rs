//! Carnot-Carathéodory distance, Riemannian lengths, and the empirical
//! fit of the comparison constant `L` in `d_c ≤ L·d₀ + L`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{HCurve, SegmentMode};
use crate::error::{invalid, Result};
use crate::geodesic::Arc;
use crate::group::{between, HPoint, IDENTITY};
use crate::quad::integrate;
use crate::rng::sample_rng;

pub const DEFAULT_TOL: f64 = 1e-9;

/// d_c(p, q). The Dido solve is run to machine precision; `tol` is the
/// caller's contract and must be positive.
pub fn cc_distance(p: HPoint, q: HPoint, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    if p == q {
        return Ok(0.0);
    }
    Ok(Arc::solve(between(p, q))?.length)
}

/// Length under the left-invariant metric with orthonormal frame X, Y, Z.
/// Every segment type has constant frame coefficients, so the integral is exact.
pub fn riemannian_length(c: &HCurve) -> f64 {
    let v = c.vertices();
    (0..c.segment_count())
        .map(|i| {
            let (p, q) = (v[i], v[i + 1]);
            match c.modes()[i] {
                SegmentMode::Geodesic => c.segment_length(i),
                SegmentMode::Straight | SegmentMode::Vertical => {
                    let dx = q.x - p.x;
                    let dy = q.y - p.y;
                    let d = (q.z - p.z) - 0.5 * (p.x + q.x) * dy;
                    (dx * dx + dy * dy + d * d).sqrt()
                }
            }
        })
        .sum()
}

/// ℓ₀ of the coordinate-straight segment `p + t(q − p)`; an upper bound for d₀(p, q).
pub fn straight_segment_length(p: HPoint, q: HPoint) -> f64 {
    let (dx, dy, dz) = (q.x - p.x, q.y - p.y, q.z - p.z);
    let planar2 = dx * dx + dy * dy;
    // Z-coefficient ż − xẏ = dz − (p.x + t·dx)·dy
    integrate(
        |t| {
            let w = dz - (p.x + t * dx) * dy;
            (planar2 + w * w).sqrt()
        },
        0.0,
        1.0,
        1e-13,
    )
}

/// ℓ₀ of `r ↦ δ_r(x)` over `[s, t]`.
pub fn scaling_curve_length(x: HPoint, s: f64, t: f64) -> Result<f64> {
    if !(0.0 <= s && s <= t && t <= 1.0) {
        return invalid(format!("need 0 ≤ s ≤ t ≤ 1, got s={s}, t={t}"));
    }
    if s == t {
        return Ok(0.0);
    }
    let planar2 = x.x * x.x + x.y * x.y;
    let w = 2.0 * x.z - x.x * x.y;
    Ok(integrate(|r| (planar2 + r * r * w * w).sqrt(), s, t, 1e-13))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MetricFit {
    /// `max(l_comparison, l_scaling)`.
    pub l: f64,
    /// Least L with `d_c ≤ L·proxy + L` on the sample.
    pub l_comparison: f64,
    /// Least L with `ℓ₀(δ_r x, [0,1]) ≤ L(d_c(x,0) + 1)²` on the sample.
    pub l_scaling: f64,
    /// Pairs where the planar projection exceeded d_c (must be zero).
    pub hard_failures: usize,
    pub samples: usize,
}

fn fit_pair(p: HPoint, q: HPoint) -> Result<(f64, f64, bool)> {
    let dc = cc_distance(p, q, DEFAULT_TOL)?;
    let proxy = straight_segment_length(p, q);
    let planar = (q.x - p.x).hypot(q.y - p.y);
    let fails = planar > dc * (1.0 + 1e-12) + 1e-12;
    let x = between(p, q);
    let lscale = scaling_curve_length(x, 0.0, 1.0)? / (dc + 1.0).powi(2);
    Ok((dc / (proxy + 1.0), lscale, fails))
}

fn fold(results: Vec<Result<(f64, f64, bool)>>) -> Result<MetricFit> {
    let mut fit = MetricFit { l: 0.0, l_comparison: 0.0, l_scaling: 0.0, hard_failures: 0, samples: results.len() };
    for r in results {
        let (a, b, f) = r?;
        fit.l_comparison = fit.l_comparison.max(a);
        fit.l_scaling = fit.l_scaling.max(b);
        fit.hard_failures += f as usize;
    }
    fit.l = fit.l_comparison.max(fit.l_scaling);
    Ok(fit)
}

/// Fits `L` on the given pairs.
pub fn fit_metric_pairs(pairs: &[(HPoint, HPoint)]) -> Result<MetricFit> {
    fold(pairs.iter().map(|&(p, q)| fit_pair(p, q)).collect())
}

/// Fits `L` on `samples` uniform pairs in `[−box, box]³`.
pub fn verify_metric_comparison(samples: usize, bx: f64, seed: u64) -> Result<MetricFit> {
    if samples < 1 {
        return invalid("need at least one sample");
    }
    if !(bx > 0.0) {
        return invalid(format!("box must be positive, got {bx}"));
    }
    let one = |i: usize| {
        let mut rng = sample_rng(seed, i as u64);
        let mut pt = || HPoint::raw(rng.gen_range(-bx..=bx), rng.gen_range(-bx..=bx), rng.gen_range(-bx..=bx));
        let p = pt();
        let q = pt();
        fit_pair(p, q)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        (0..samples).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = (0..samples).map(one).collect();
    fold(results)
}

/// d_c(0, x).
pub fn dc_norm(x: HPoint) -> Result<f64> {
    cc_distance(IDENTITY, x, DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::horizontal_lift;
    use std::f64::consts::PI;

    #[test]
    fn distance_examples() {
        let d = |q| cc_distance(IDENTITY, q, 1e-9).unwrap();
        assert!((d(HPoint::raw(1., 0., 0.)) - 1.0).abs() < 1e-15);
        assert!((d(HPoint::raw(0., 1., 0.)) - 1.0).abs() < 1e-15);
        assert!((d(HPoint::raw(0., 0., 1.)) - 2.0 * PI.sqrt()).abs() < 1e-12);
        assert!(cc_distance(IDENTITY, IDENTITY, 0.0).is_err());
        assert_eq!(cc_distance(HPoint::raw(1., 2., 3.), HPoint::raw(1., 2., 3.), 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn riemannian_examples() {
        let seg = HCurve::new(vec![IDENTITY, HPoint::raw(1., 0., 0.)], vec![SegmentMode::Straight], false).unwrap();
        assert_eq!(riemannian_length(&seg), 1.0);
        let v = HCurve::new(vec![IDENTITY, HPoint::raw(0., 0., 1.)], vec![SegmentMode::Vertical], false).unwrap();
        assert_eq!(riemannian_length(&v), 1.0);
    }

    #[test]
    fn lifted_circle_converges_to_two_pi() {
        let mut prev_err = f64::INFINITY;
        for &n in &[16usize, 64, 256, 1024] {
            let pts: Vec<[f64; 2]> = (0..=n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    [t.cos() - 1.0, t.sin()]
                })
                .collect();
            let c = horizontal_lift(&pts, 0.0).unwrap();
            let err = (riemannian_length(&c) - 2.0 * PI).abs();
            assert!(err < prev_err / 10.0);
            prev_err = err;
        }
        assert!(prev_err < 1e-5);
    }

    #[test]
    fn scaling_curve_examples() {
        assert!((scaling_curve_length(HPoint::raw(1., 0., 0.), 0., 1.).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(scaling_curve_length(HPoint::raw(3., 1., 2.), 0.4, 0.4).unwrap(), 0.0);
        assert!((scaling_curve_length(HPoint::raw(0., 0., 1.), 0., 1.).unwrap() - 1.0).abs() < 1e-13);
        assert!(scaling_curve_length(IDENTITY, 0.5, 0.2).is_err());
    }

    #[test]
    fn single_pair_fit() {
        let fit = fit_metric_pairs(&[(IDENTITY, HPoint::raw(1., 0., 0.))]).unwrap();
        assert!((fit.l - 0.5).abs() < 1e-12);
        let same = fit_metric_pairs(&[(HPoint::raw(1., 1., 1.), HPoint::raw(1., 1., 1.))]).unwrap();
        assert_eq!(same.l, 0.0);
    }
}

//! Carnot-Carathéodory geodesics of the Heisenberg group.
//!
//! A geodesic from the identity to `w` projects to a circular arc (or a
//! segment) whose signed area against the chord is `A = w.z − w.x·w.y/2`.
//! Solving the Dido problem for the arc angle gives the length. Arcs are
//! stored as (initial heading, signed total turn, length) so that they are
//! unchanged by left translation and only rescaled by dilations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{between, mul, HPoint};

const MAX_ITER: usize = 200;

/// Planar arc data of a horizontal curve starting at the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub heading: f64,
    pub turn: f64,
    pub length: f64,
}

impl Arc {
    pub const ZERO: Arc = Arc { heading: 0.0, turn: 0.0, length: 0.0 };

    /// Point reached after arc length `s`, relative to the start.
    pub fn local_point(&self, s: f64) -> HPoint {
        if self.length == 0.0 || s == 0.0 {
            return HPoint::raw(0.0, 0.0, 0.0);
        }
        let tau = self.turn * (s / self.length);
        let mid = self.heading + 0.5 * tau;
        let chord = s * sinc(0.5 * tau);
        let x = chord * mid.cos();
        let y = chord * mid.sin();
        // signed area between the travelled arc and its chord
        let area = 0.5 * s * s * tms_over_sq(tau);
        HPoint::raw(x, y, area + 0.5 * x * y)
    }

    pub fn end_heading(&self) -> f64 {
        self.heading + self.turn
    }

    pub fn reversed(&self) -> Arc {
        Arc {
            heading: self.end_heading() + std::f64::consts::PI,
            turn: -self.turn,
            length: self.length,
        }
    }

    /// Sub-arc covering arc length `[s0, s1]`.
    pub fn sub(&self, s0: f64, s1: f64) -> Arc {
        if self.length == 0.0 {
            return Arc::ZERO;
        }
        let kappa = self.turn / self.length;
        Arc { heading: self.heading + kappa * s0, turn: kappa * (s1 - s0), length: s1 - s0 }
    }

    pub fn scaled(&self, r: f64) -> Arc {
        Arc { length: self.length * r, ..*self }
    }

    /// Minimizing arc from the identity to `w`.
    pub fn solve(w: HPoint) -> Result<Arc> {
        let c = w.x.hypot(w.y);
        let area = w.z - 0.5 * w.x * w.y;
        if area == 0.0 {
            let heading = if c > 0.0 { w.y.atan2(w.x) } else { 0.0 };
            return Ok(Arc { heading, turn: 0.0, length: c });
        }
        let sigma = area.signum();
        let chord_dir = if c > 0.0 { w.y.atan2(w.x) } else { 0.0 };
        if c * c < 1e-30 * area.abs() {
            let theta = 2.0 * std::f64::consts::PI;
            return Ok(Arc {
                heading: chord_dir - sigma * 0.5 * theta,
                turn: sigma * theta,
                length: 2.0 * (std::f64::consts::PI * area.abs()).sqrt(),
            });
        }
        let (theta, ratio) = dido_angle(area.abs() / (c * c))?;
        Ok(Arc { heading: chord_dir - sigma * 0.5 * theta, turn: sigma * theta, length: c * ratio })
    }
}

/// A geodesic segment between two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub start: HPoint,
    pub end: HPoint,
    pub arc: Arc,
}

impl Geodesic {
    pub fn solve(p: HPoint, q: HPoint) -> Result<Geodesic> {
        if p == q {
            return Ok(Geodesic { start: p, end: q, arc: Arc::ZERO });
        }
        Ok(Geodesic { start: p, end: q, arc: Arc::solve(between(p, q))? })
    }

    pub fn length(&self) -> f64 {
        self.arc.length
    }

    pub fn point_at_length(&self, s: f64) -> HPoint {
        if s <= 0.0 {
            self.start
        } else if s >= self.arc.length {
            self.end
        } else {
            mul(self.start, self.arc.local_point(s))
        }
    }

    /// Point at arc-length fraction `u ∈ [0,1]`.
    pub fn point_at(&self, u: f64) -> HPoint {
        self.point_at_length(u * self.arc.length)
    }

    pub fn reversed(&self) -> Geodesic {
        Geodesic { start: self.end, end: self.start, arc: self.arc.reversed() }
    }
}

/// `sin(x)/x`.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `(τ − sin τ)/τ²`, odd in τ and stable near 0.
pub(crate) fn tms_over_sq(t: f64) -> f64 {
    if t.abs() < 0.1 {
        let t2 = t * t;
        // τ/6 − τ³/120 + τ⁵/5040 − τ⁷/362880 + τ⁹/39916800
        t * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 * (1.0 / 362880.0 - t2 / 39916800.0))))
    } else {
        (t - t.sin()) / (t * t)
    }
}

/// Solves the Dido equation `(θ − sin θ)/(8 sin²(θ/2)) = target` for
/// `θ ∈ (0, 2π)`; returns `(θ, length/chord)`.
///
/// For θ ≤ π the unknown is φ = θ/2; beyond that t = π − θ/2, which keeps
/// the near-full-circle regime well conditioned. Newton runs in log space
/// where both branches are close to linear, inside a bisection bracket.
pub fn dido_angle(target: f64) -> Result<(f64, f64)> {
    use std::f64::consts::{FRAC_PI_2, PI};
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::InvalidInput(format!("Dido target must be positive, got {target}")));
    }
    let ln_t = target.ln();
    if target <= PI / 8.0 {
        // G(φ) = 4φ²q(2φ) / (8 sin²φ),  q(τ) = (τ − sinτ)/τ²
        let f = |u: f64| {
            let phi = u.exp();
            let s = phi.sin();
            let q = tms_over_sq(2.0 * phi);
            let g = phi * phi * q / (2.0 * s * s);
            let dlng = s * s / (phi * phi * q) - 2.0 * phi.cos() / s;
            (g.ln() - ln_t, phi * dlng)
        };
        let u0 = (6.0 * target).min(1.5).ln();
        let u = newton_bracketed(f, (1e-300f64).ln(), FRAC_PI_2.ln(), u0, "dido φ-branch")?;
        let phi = u.exp();
        Ok((2.0 * phi, phi / phi.sin()))
    } else {
        // G(t) = (2π − 2t + sin 2t) / (8 sin²t), decreasing in t
        let f = |u: f64| {
            let t = u.exp();
            let s = t.sin();
            let n = 2.0 * PI - 2.0 * t + (2.0 * t).sin();
            let g = n / (8.0 * s * s);
            let dlng = -4.0 * s * s / n - 2.0 * t.cos() / s;
            (ln_t - g.ln(), -t * dlng)
        };
        let u0 = (PI / (4.0 * target)).sqrt().min(1.5).ln();
        let u = newton_bracketed(f, (1e-300f64).ln(), FRAC_PI_2.ln(), u0, "dido t-branch")?;
        let t = u.exp();
        Ok((2.0 * PI - 2.0 * t, (PI - t) / t.sin()))
    }
}

/// Safeguarded Newton for an increasing function with a sign change on `[lo, hi]`.
fn newton_bracketed(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    context: &str,
) -> Result<f64> {
    let mut x = x0.clamp(lo, hi);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - fx / dfx;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence { iterations: MAX_ITER, context: context.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dido_lhs(theta: f64) -> f64 {
        (theta - theta.sin()) / (8.0 * (0.5 * theta).sin().powi(2))
    }

    #[test]
    fn dido_roundtrip_across_range() {
        for k in 1..400 {
            let theta = 2.0 * PI * k as f64 / 400.0;
            let target = dido_lhs(theta);
            let (th, ratio) = dido_angle(target).unwrap();
            assert!((th - theta).abs() < 1e-9 * theta.max(1.0), "θ={theta} got {th}");
            let expect = theta / (2.0 * (0.5 * theta).sin());
            assert!((ratio - expect).abs() < 1e-9 * expect);
        }
    }

    #[test]
    fn dido_extremes() {
        // tiny area: nearly straight, length ≈ chord
        let (th, ratio) = dido_angle(1e-12).unwrap();
        assert!((th - 1.2e-11).abs() < 1e-20);
        assert!((ratio - 1.0).abs() < 1e-15);
        // huge area: nearly a full circle
        let (th, _) = dido_angle(1e12).unwrap();
        assert!((2.0 * PI - th) < 1e-5);
    }

    #[test]
    fn arc_endpoints_hit_target() {
        let targets = [
            HPoint::raw(1.0, 0.0, 0.0),
            HPoint::raw(0.0, 0.0, 1.0),
            HPoint::raw(0.0, 0.0, -2.0),
            HPoint::raw(0.3, -0.8, 0.9),
            HPoint::raw(-1.5, 0.2, -0.01),
            HPoint::raw(1e-9, 0.0, 3.0),
            HPoint::raw(2.0, 2.0, 2.0 + 1e-13),
        ];
        for w in targets {
            let arc = Arc::solve(w).unwrap();
            let end = arc.local_point(arc.length);
            assert!(end.coord_dist(w) < 1e-10 * (1.0 + w.coord_norm()), "{w:?} -> {end:?}");
        }
    }

    #[test]
    fn vertical_distance_is_two_sqrt_pi() {
        let arc = Arc::solve(HPoint::raw(0., 0., 1.)).unwrap();
        assert!((arc.length - 2.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reversed_arc_traces_same_points() {
        let g = Geodesic::solve(HPoint::raw(0.1, 0.2, 0.3), HPoint::raw(-0.4, 1.0, -0.2)).unwrap();
        let r = g.reversed();
        for k in 0..=10 {
            let u = k as f64 / 10.0;
            let a = g.point_at(u);
            let b = mul(r.start, r.arc.local_point((1.0 - u) * r.arc.length));
            assert!(a.coord_dist(b) < 1e-12);
        }
    }

    #[test]
    fn sub_arc_matches_parent() {
        let g = Geodesic::solve(HPoint::raw(0., 0., 0.), HPoint::raw(0.5, 0.5, 0.7)).unwrap();
        let (s0, s1) = (0.3 * g.length(), 0.8 * g.length());
        let sub = g.arc.sub(s0, s1);
        let p0 = g.point_at_length(s0);
        for k in 0..=8 {
            let s = s0 + (s1 - s0) * k as f64 / 8.0;
            let a = g.point_at_length(s);
            let b = mul(p0, sub.local_point(s - s0));
            assert!(a.coord_dist(b) < 1e-12);
        }
    }
}

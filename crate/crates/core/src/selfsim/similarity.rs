use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::{inv, mul, HPoint, HSim};
use crate::rng::sample_rng;

/// `x ↦ scale·R·x + t` on R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EuclideanSim {
    pub scale: f64,
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl EuclideanSim {
    /// Planar map `x ↦ scale·R_θ(x − c)` on the `z = 0` plane.
    pub fn planar(scale: f64, angle: f64, center: [f64; 2]) -> EuclideanSim {
        let (s, c) = angle.sin_cos();
        let rot = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let t0 = -scale * (c * center[0] - s * center[1]);
        let t1 = -scale * (s * center[0] + c * center[1]);
        EuclideanSim { scale, rotation: rot, translation: [t0, t1, 0.0] }
    }

    fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rotation[i][j])
    }

    pub fn linear(&self) -> Matrix3<f64> {
        self.matrix() * self.scale
    }

    pub fn apply(&self, x: [f64; 3]) -> [f64; 3] {
        let v = self.linear() * Vector3::from(x) + Vector3::from(self.translation);
        [v[0], v[1], v[2]]
    }

    /// `x ↦ R^T(x − t)/scale`.
    pub fn apply_inverse(&self, x: [f64; 3]) -> [f64; 3] {
        let v = self.matrix().transpose() * (Vector3::from(x) - Vector3::from(self.translation)) / self.scale;
        [v[0], v[1], v[2]]
    }

    pub fn apply2(&self, x: [f64; 2]) -> [f64; 2] {
        let v = self.apply([x[0], x[1], 0.0]);
        [v[0], v[1]]
    }

    pub fn apply_inverse2(&self, x: [f64; 2]) -> [f64; 2] {
        let v = self.apply_inverse([x[0], x[1], 0.0]);
        [v[0], v[1]]
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale > 1.0) || !self.scale.is_finite() {
            return invalid(format!("h must expand: scale {} is not above 1", self.scale));
        }
        let r = self.matrix();
        let err = (r.transpose() * r - Matrix3::identity()).abs().max();
        if !(err <= 1e-12) {
            return invalid(format!("rotation part is not orthogonal (error {err:e})"));
        }
        if !self.translation.iter().all(|t| t.is_finite()) {
            return invalid("translation must be finite");
        }
        Ok(())
    }
}

/// `y ↦ g⁻¹·δ_{2ⁿ}(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeisenbergSim {
    pub g: HPoint,
    pub n: u32,
}

impl HeisenbergSim {
    pub fn as_hsim(&self) -> HSim {
        HSim { translation: inv(self.g), scale: (self.n as f64).exp2() }
    }

    pub fn apply(&self, y: HPoint) -> HPoint {
        self.as_hsim().apply(y)
    }

    pub fn apply_inverse(&self, y: HPoint) -> HPoint {
        self.as_hsim().inverse().apply(y)
    }

    /// `m^k` for any integer `k`.
    pub fn power(&self, y: HPoint, k: i32) -> HPoint {
        let s = if k >= 0 { self.as_hsim() } else { self.as_hsim().inverse() };
        (0..k.unsigned_abs()).fold(y, |p, _| s.apply(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityPair {
    pub h: EuclideanSim,
    pub m: HeisenbergSim,
}

impl SimilarityPair {
    pub fn new(h: EuclideanSim, m: HeisenbergSim) -> Result<SimilarityPair> {
        h.validate()?;
        if m.n < 1 || m.n > 60 {
            return invalid(format!("m needs 1 ≤ n ≤ 60, got {}", m.n));
        }
        Ok(SimilarityPair { h, m })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoints {
    pub x0: [f64; 3],
    pub y0: HPoint,
    /// `|h(x0) − x0|`.
    pub x0_residual: f64,
    /// Coordinate distance from `m^(−i)(u)` to `y0` once the iteration settles.
    pub y0_iteration_error: f64,
}

/// `x0` from `(I − A)x = t`; `y0` in closed form, checked against `m^(−i)(u)`.
pub fn fixed_points(sp: &SimilarityPair) -> Result<FixedPoints> {
    fixed_points_seeded(sp, 0)
}

pub fn fixed_points_seeded(sp: &SimilarityPair, seed: u64) -> Result<FixedPoints> {
    let a = sp.h.linear();
    let lu = (Matrix3::identity() - a).lu();
    let x = lu
        .solve(&Vector3::from(sp.h.translation))
        .ok_or_else(|| Error::InvalidInput("I − A is singular".into()))?;
    let x0 = [x[0], x[1], x[2]];
    let hx = sp.h.apply(x0);
    let x0_residual = ((hx[0] - x0[0]).powi(2) + (hx[1] - x0[1]).powi(2) + (hx[2] - x0[2]).powi(2)).sqrt();

    // g⁻¹·δ_s(y) = y coordinatewise, with g⁻¹ = (a, b, c)
    let s = (sp.m.n as f64).exp2();
    let gi = inv(sp.m.g);
    let y1 = -gi.x / (s - 1.0);
    let y2 = -gi.y / (s - 1.0);
    let y3 = -(gi.z + gi.x * s * y2) / (s * s - 1.0);
    let y0 = HPoint::raw(y1, y2, y3);

    let mut rng = sample_rng(seed, 0);
    let mut u = HPoint::raw(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
    let minv = sp.m.as_hsim().inverse();
    for _ in 0..400 {
        let next = minv.apply(u);
        let done = next == u;
        u = next;
        if done {
            break;
        }
    }
    let scale = 1.0 + y0.coord_norm();
    Ok(FixedPoints { x0, y0, x0_residual, y0_iteration_error: u.coord_dist(y0) / scale })
}

/// The fixed point really is fixed: `m(y0) = y0` to rounding.
pub fn fixed_point_residual(sp: &SimilarityPair, y0: HPoint) -> f64 {
    sp.m.apply(y0).coord_dist(y0)
}

/// Translation `g` for which `m` fixes `y0`.
pub fn translation_for_fixed_point(y0: HPoint, n: u32) -> HPoint {
    // m(y0) = y0 ⇔ g = δ_s(y0)·y0⁻¹
    let s = (n as f64).exp2();
    mul(HPoint::raw(s * y0.x, s * y0.y, s * s * y0.z), inv(y0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::IDENTITY;

    #[test]
    fn trivial_fixed_points() {
        let h = EuclideanSim::planar(2.0, 0.0, [0.0, 0.0]);
        let sp = SimilarityPair::new(h, HeisenbergSim { g: IDENTITY, n: 1 }).unwrap();
        let f = fixed_points(&sp).unwrap();
        assert_eq!(f.x0, [0.0, 0.0, 0.0]);
        assert_eq!(f.y0, HPoint::raw(0.0, 0.0, 0.0));
    }

    #[test]
    fn iteration_agrees_with_closed_form() {
        let h = EuclideanSim::planar(3.0, 0.4, [0.2, -0.1]);
        let sp = SimilarityPair::new(h, HeisenbergSim { g: HPoint::raw(1.0, 1.0, 1.0), n: 1 }).unwrap();
        let f = fixed_points(&sp).unwrap();
        assert!(f.y0_iteration_error <= 1e-10, "{}", f.y0_iteration_error);
        assert!(fixed_point_residual(&sp, f.y0) < 1e-12);
        assert!(f.x0_residual < 1e-12);
        let mut x = [5.0, -3.0, 0.0];
        for _ in 0..100 {
            x = sp.h.apply_inverse(x);
        }
        assert!((x[0] - f.x0[0]).abs() < 1e-14 && (x[1] - f.x0[1]).abs() < 1e-14);
    }

    #[test]
    fn constructed_fixed_point() {
        let y0 = HPoint::raw(0.3, -0.7, 1.1);
        let g = translation_for_fixed_point(y0, 2);
        let sp = SimilarityPair::new(EuclideanSim::planar(2.0, 0.0, [0.0, 0.0]), HeisenbergSim { g, n: 2 }).unwrap();
        assert!(fixed_points(&sp).unwrap().y0.coord_dist(y0) < 1e-14);
    }

    #[test]
    fn rejects_contractions() {
        let h = EuclideanSim::planar(0.5, 0.0, [0.0, 0.0]);
        assert!(SimilarityPair::new(h, HeisenbergSim { g: IDENTITY, n: 1 }).is_err());
        let h = EuclideanSim::planar(2.0, 0.0, [0.0, 0.0]);
        assert!(SimilarityPair::new(h, HeisenbergSim { g: IDENTITY, n: 0 }).is_err());
    }
}

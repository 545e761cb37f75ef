//! Heisenberg group arithmetic in exponential coordinates.
//!
//! The product is `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`, so the
//! left-invariant frame is `X = ∂x`, `Y = ∂y + x∂z`, `Z = ∂z`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const IDENTITY: HPoint = HPoint { x: 0.0, y: 0.0, z: 0.0 };

impl HPoint {
    /// Checked constructor; rejects NaN and infinities.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return invalid(format!("non-finite coordinate in ({x}, {y}, {z})"));
        }
        Ok(HPoint { x, y, z })
    }

    pub const fn raw(x: f64, y: f64, z: f64) -> Self {
        HPoint { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn planar(self) -> [f64; 2] {
        [self.x, self.y]
    }

    /// Euclidean norm of the coordinate vector (not a group norm).
    pub fn coord_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn coord_dist(self, o: HPoint) -> f64 {
        HPoint::raw(self.x - o.x, self.y - o.y, self.z - o.z).coord_norm()
    }
}

impl Serialize for HPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y, self.z].serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        HPoint::new(a[0], a[1], a[2]).map_err(serde::de::Error::custom)
    }
}

#[inline]
pub fn mul(p: HPoint, q: HPoint) -> HPoint {
    HPoint { x: p.x + q.x, y: p.y + q.y, z: p.z + q.z + p.x * q.y }
}

#[inline]
pub fn inv(p: HPoint) -> HPoint {
    HPoint { x: -p.x, y: -p.y, z: -p.z + p.x * p.y }
}

/// `p⁻¹q`, computed without forming the inverse explicitly.
#[inline]
pub fn between(p: HPoint, q: HPoint) -> HPoint {
    let dx = q.x - p.x;
    let dy = q.y - p.y;
    HPoint { x: dx, y: dy, z: q.z - p.z - p.x * dy }
}

/// δ_r. Negative `r` is rejected.
pub fn dilate(r: f64, p: HPoint) -> Result<HPoint> {
    if !(r >= 0.0) || !r.is_finite() {
        return invalid(format!("dilation factor must be a finite nonnegative real, got {r}"));
    }
    Ok(dilate_unchecked(r, p))
}

#[inline]
pub(crate) fn dilate_unchecked(r: f64, p: HPoint) -> HPoint {
    HPoint { x: r * p.x, y: r * p.y, z: r * r * p.z }
}

/// A Heisenberg similarity `y ↦ g·δ_s(y)` with `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HSim {
    pub translation: HPoint,
    pub scale: f64,
}

impl HSim {
    pub const IDENTITY: HSim = HSim { translation: IDENTITY, scale: 1.0 };

    pub fn new(translation: HPoint, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return invalid(format!("similarity scale must be positive, got {scale}"));
        }
        Ok(HSim { translation, scale })
    }

    #[inline]
    pub fn apply(&self, y: HPoint) -> HPoint {
        mul(self.translation, dilate_unchecked(self.scale, y))
    }

    pub fn inverse(&self) -> HSim {
        // x = δ_{1/s}(g⁻¹ y) = δ_{1/s}(g⁻¹) · δ_{1/s}(y)
        let s = 1.0 / self.scale;
        HSim { translation: dilate_unchecked(s, inv(self.translation)), scale: s }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &HSim) -> HSim {
        HSim {
            translation: mul(self.translation, dilate_unchecked(self.scale, other.translation)),
            scale: self.scale * other.scale,
        }
    }

    pub fn powi(&self, k: i32) -> HSim {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut acc = HSim::IDENTITY;
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        assert_eq!(mul(HPoint::raw(1., 0., 0.), HPoint::raw(0., 1., 0.)), HPoint::raw(1., 1., 1.));
        assert_eq!(mul(HPoint::raw(0., 1., 0.), HPoint::raw(1., 0., 0.)), HPoint::raw(1., 1., 0.));
        assert_eq!(mul(IDENTITY, HPoint::raw(2., -3., 5.)), HPoint::raw(2., -3., 5.));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv(HPoint::raw(1., 1., 1.)), HPoint::raw(-1., -1., 0.));
        assert_eq!(inv(HPoint::raw(1., 0., 0.)), HPoint::raw(-1., 0., 0.));
        assert_eq!(inv(IDENTITY), IDENTITY);
    }

    #[test]
    fn dilation_examples() {
        let p = HPoint::raw(1., 1., 1.);
        assert_eq!(dilate(2.0, p).unwrap(), HPoint::raw(2., 2., 4.));
        assert_eq!(dilate(1.0, p).unwrap(), p);
        assert_eq!(dilate(0.0, p).unwrap(), IDENTITY);
        assert!(dilate(-1.0, p).is_err());
    }

    #[test]
    fn rejects_nan() {
        assert!(HPoint::new(f64::NAN, 0., 0.).is_err());
        assert!(serde_json::from_str::<HPoint>("[1, 2]").is_err());
        let p: HPoint = serde_json::from_str("[1.5, -2, 3]").unwrap();
        assert_eq!(p, HPoint::raw(1.5, -2., 3.));
    }

    #[test]
    fn between_matches_inverse_product() {
        let p = HPoint::raw(0.3, -1.2, 2.0);
        let q = HPoint::raw(-0.7, 0.4, 1.1);
        let a = between(p, q);
        let b = mul(inv(p), q);
        assert!(a.coord_dist(b) < 1e-14);
    }

    #[test]
    fn similarity_inverse_and_powers() {
        let s = HSim::new(HPoint::raw(1., -2., 0.5), 3.0).unwrap();
        let y = HPoint::raw(0.2, 0.3, -0.4);
        assert!(s.inverse().apply(s.apply(y)).coord_dist(y) < 1e-12);
        let twice = s.powi(2).apply(y);
        assert!(twice.coord_dist(s.apply(s.apply(y))) < 1e-12);
        assert!(s.powi(-2).apply(twice).coord_dist(y) < 1e-12);
    }
}

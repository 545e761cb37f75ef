use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::similarity::{fixed_points, EuclideanSim, HeisenbergSim, SimilarityPair};
use crate::error::{invalid, Error, Result};
use crate::group::{dilate_unchecked, mul, HPoint};
use crate::holder2d::SubdivisionTree;
use crate::metric::cc_distance;
use crate::rng::sample_rng;

const MAX_LEVELS: usize = 200;

/// A map on the unit disc with `s = m⁻¹∘s∘h` on the small disc
/// `B1 = B(c1, ρ)`, where `h(x) = ρ⁻¹R(x − c1)` sends `B1` onto the disc.
///
/// On the annulus between the unit circle and `∂B1`, the outer half of each
/// radial segment reparametrizes the tree extension and the inner half
/// interpolates coordinates from the tree's center value to `m⁻¹` of the
/// boundary curve, which is what the recursion demands on `∂B1`.
pub struct SelfSimilarSeed<'a> {
    tree: &'a SubdivisionTree,
    pair: SimilarityPair,
    c1: [f64; 2],
    rho: f64,
    center_value: HPoint,
    y0: HPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedLayout {
    pub c1: [f64; 2],
    pub rho: f64,
    pub angle: f64,
    pub g: HPoint,
    pub n: u32,
}

impl<'a> SelfSimilarSeed<'a> {
    pub fn new(tree: &'a SubdivisionTree, layout: SeedLayout) -> Result<Self> {
        let SeedLayout { c1, rho, angle, g, n } = layout;
        if !(rho > 0.0) || !(c1[0].hypot(c1[1]) + rho < 1.0 - 1e-3) {
            return invalid("the small disc B(c1, ρ) must sit strictly inside the unit disc");
        }
        let h = EuclideanSim::planar(1.0 / rho, angle, c1);
        let pair = SimilarityPair::new(h, HeisenbergSim { g, n })?;
        let center_value = tree.evaluate_traced([0.0, 0.0])?.value;
        let y0 = fixed_points(&pair)?.y0;
        Ok(SelfSimilarSeed { tree, pair, c1, rho, center_value, y0 })
    }

    pub fn pair(&self) -> &SimilarityPair {
        &self.pair
    }

    fn in_small_disc(&self, x: [f64; 2]) -> bool {
        (x[0] - self.c1[0]).hypot(x[1] - self.c1[1]) < self.rho
    }

    fn tree_value(&self, x: [f64; 2]) -> Result<HPoint> {
        let r = x[0].hypot(x[1]);
        let x = if r > 1.0 { [x[0] / r, x[1] / r] } else { x };
        Ok(self.tree.evaluate_traced(x)?.value)
    }

    /// Annulus coordinates `x = s·c1 + (1 − s(1−ρ))·e`, `s ∈ [0, 1]`, `|e| = 1`.
    fn annulus_coords(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let k = 1.0 - self.rho;
        let c = self.c1;
        let a = c[0] * c[0] + c[1] * c[1] - k * k;
        let b = 2.0 * k - 2.0 * (x[0] * c[0] + x[1] * c[1]);
        let cc = x[0] * x[0] + x[1] * x[1] - 1.0;
        let disc = (b * b - 4.0 * a * cc).max(0.0);
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let roots = [q / a, if q != 0.0 { cc / q } else { 0.0 }];
        let s = roots
            .into_iter()
            .filter(|r| (-1e-12..=1.0 + 1e-12).contains(r))
            .fold(f64::NAN, |acc, r| if acc.is_nan() { r } else { acc.min(r) })
            .clamp(0.0, 1.0);
        let s = if s.is_nan() { 0.0 } else { s };
        let w = 1.0 - s * k;
        let e = [(x[0] - s * c[0]) / w, (x[1] - s * c[1]) / w];
        let n = e[0].hypot(e[1]);
        (s, [e[0] / n, e[1] / n])
    }

    fn annulus_value(&self, x: [f64; 2]) -> Result<HPoint> {
        let (s, e) = self.annulus_coords(x);
        if s <= 0.5 {
            let t = 1.0 - 2.0 * s;
            return self.tree_value([t * e[0], t * e[1]]);
        }
        let he = self.pair.h.apply2([self.c1[0] + self.rho * e[0], self.c1[1] + self.rho * e[1]]);
        let inner = self.pair.m.apply_inverse(self.tree_value(he)?);
        let t = 2.0 * s - 1.0;
        let a = self.center_value;
        Ok(HPoint::raw(a.x + t * (inner.x - a.x), a.y + t * (inner.y - a.y), a.z + t * (inner.z - a.z)))
    }

    /// `s(x)` on the closed unit disc.
    pub fn eval(&self, x: [f64; 2]) -> Result<HPoint> {
        if !(x[0].hypot(x[1]) <= 1.0 + 1e-12) {
            return Err(Error::OutOfDomain(format!("seed is defined on the unit disc, got {x:?}")));
        }
        let mut x = x;
        let mut k = 0;
        while self.in_small_disc(x) && k < MAX_LEVELS {
            x = self.pair.h.apply2(x);
            k += 1;
        }
        let v = if self.in_small_disc(x) { self.y0 } else { self.annulus_value(x)? };
        Ok(self.pair.m.power(v, -(k as i32)))
    }

    /// `m^k(s(h^(−k)(x)))` for a given `k ≥ 0`, which needs `h^(−k)(x)` in the disc.
    pub fn eval_at_level(&self, x: [f64; 2], k: u32) -> Result<HPoint> {
        let mut y = x;
        for _ in 0..k {
            y = self.pair.h.apply_inverse2(y);
        }
        Ok(self.pair.m.power(self.eval(y)?, k as i32))
    }

    /// Least `k ≥ 0` with `h^(−k)(x)` in the closed unit disc.
    pub fn level(&self, x: [f64; 2]) -> Result<u32> {
        let mut y = x;
        for k in 0..MAX_LEVELS as u32 {
            if y[0].hypot(y[1]) <= 1.0 {
                return Ok(k);
            }
            y = self.pair.h.apply_inverse2(y);
        }
        Err(Error::OutOfDomain(format!("no level brings {x:?} into the disc")))
    }
}

/// The self-similar map `F` on the plane: `F(x) = m^k(s(h^(−k)(x)))` with the
/// least `k ≥ 0` putting `h^(−k)(x)` in the disc, so `m∘F∘h⁻¹ = F`.
pub fn conjugated_eval(seed: &SelfSimilarSeed<'_>, x: [f64; 2]) -> Result<HPoint> {
    let k = seed.level(x)?;
    seed.eval_at_level(x, k)
}

/// A bounded-displacement map of the whole group built from the seed:
/// `P(p) = p·s(u(p))` with `u(p) = (sin 2πx, sin 2πy)/√2`.
pub fn p_analog(seed: &SelfSimilarSeed<'_>, p: HPoint) -> Result<HPoint> {
    let u = [(2.0 * PI * p.x).sin() / 2f64.sqrt(), (2.0 * PI * p.y).sin() / 2f64.sqrt()];
    Ok(mul(p, seed.eval(u)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxCheck {
    pub m_disp: f64,
    pub r: f64,
    /// Sampled `sup d_c(x, δ_r P(δ_r⁻¹ x))`.
    pub sup: f64,
    pub bound: f64,
}

/// Measures `m_disp` over sample points, sets `r = ε/(2 m_disp)` and checks
/// the conjugated map moves points of `δ_r` of the same sample by at most `ε/2`.
pub fn approx_check(
    p: impl Fn(HPoint) -> Result<HPoint> + Sync + Send,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<ApproxCheck> {
    let pts: Vec<HPoint> = (0..samples)
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            HPoint::raw(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-8.0..8.0))
        })
        .collect();
    let disp = crate::par::map_range(samples, |i| cc_distance(pts[i], p(pts[i])?, 1e-12));
    let mut m_disp = 0.0f64;
    for d in disp {
        m_disp = m_disp.max(d?);
    }
    let r = super::approx_radius(epsilon, m_disp)?;
    let moved = crate::par::map_range(samples, |i| {
        let x = dilate_unchecked(r, pts[i]);
        let back = dilate_unchecked(1.0 / r, x);
        cc_distance(x, dilate_unchecked(r, p(back)?), 1e-12)
    });
    let mut sup = 0.0f64;
    for d in moved {
        sup = sup.max(d?);
    }
    Ok(ApproxCheck { m_disp, r, sup, bound: epsilon / 2.0 + 1e-9 })
}

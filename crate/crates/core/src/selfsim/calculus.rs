use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::group::HPoint;

fn check_n_c(n: u32, c: f64) -> Result<()> {
    if n < 1 {
        return invalid("n must be at least 1");
    }
    if !(c > 1.0) || !c.is_finite() {
        return invalid(format!("c must exceed 1, got {c}"));
    }
    Ok(())
}

/// `η = n / (3n/2 + log₂ c)`.
pub fn eta(n: u32, c: f64) -> Result<f64> {
    check_n_c(n, c)?;
    Ok(n as f64 / (1.5 * n as f64 + c.log2()))
}

/// `ρ = c⁻¹·2^(−3n/2)`.
pub fn rho(n: u32, c: f64) -> Result<f64> {
    check_n_c(n, c)?;
    Ok((-1.5 * n as f64).exp2() / c)
}

/// Relative error of `2^(−in) = ρ^(iη)` over `i = 1..=imax`.
pub fn eta_rho_identity_error(n: u32, c: f64, imax: u32) -> Result<f64> {
    let (e, r) = (eta(n, c)?, rho(n, c)?);
    let mut worst = 0.0f64;
    for i in 1..=imax {
        let lhs = (-(i as f64) * n as f64).exp2();
        let rhs = r.powf(i as f64 * e);
        worst = worst.max((lhs - rhs).abs() / lhs);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub step: f64,
    pub total: f64,
}

/// Per-step displacement `b·2^(−in)` and accumulated bound `2b·2^(−in)`.
pub fn displacement_bounds(b: f64, n: u32, i: u32) -> Result<Displacement> {
    if !(b > 0.0) || n < 1 {
        return invalid("need b > 0 and n ≥ 1");
    }
    let step = b * (-(i as f64) * n as f64).exp2();
    Ok(Displacement { step, total: 2.0 * step })
}

/// Tail `Σ_{j≥i} b·2^(−jn)` in closed form, which `total` must dominate.
pub fn displacement_tail(b: f64, n: u32, i: u32) -> f64 {
    let q = (-(n as f64)).exp2();
    b * (-(i as f64) * n as f64).exp2() / (1.0 - q)
}

fn check_d(d: u32) -> Result<()> {
    if d != 2 && d != 3 {
        return invalid(format!("dimension must be 2 or 3, got {d}"));
    }
    Ok(())
}

/// `c·2^((d+1)n)`.
pub fn avol_bound(d: u32, n: u32, c: f64) -> Result<f64> {
    avol_compound(d, n, c, 1)
}

/// Depth-`i` compounding `c^i·2^(i(d+1)n)`.
pub fn avol_compound(d: u32, n: u32, c: f64, i: u32) -> Result<f64> {
    check_d(d)?;
    Ok(c.powi(i as i32) * ((i * (d + 1) * n) as f64).exp2())
}

/// `2μ·2^(−(i+2)n)`.
pub fn properness_bound(mu: f64, n: u32, i: i32) -> f64 {
    2.0 * mu * (-((i + 2) as f64) * n as f64).exp2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub bound: f64,
    /// `Σ_{i≥0} 2μ·2^(−(i+1)n)`.
    pub telescope: f64,
}

/// `4μ·2^(−n)` with its telescoping certificate.
pub fn neighborhood_bound(mu: f64, n: u32) -> Neighborhood {
    let q = (-(n as f64)).exp2();
    Neighborhood { bound: 4.0 * mu * q, telescope: 2.0 * mu * q / (1.0 - q) }
}

/// Smallest `n ≥ n0` with `max(μ, K)·2^(−n) ≤ r/8` and `η(n, c) > 2/3 − ε`.
pub fn select_n(epsilon: f64, c: f64, r: f64, k: f64, mu: f64, n0: u32) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon < 2.0 / 3.0) {
        return invalid(format!("epsilon must lie in (0, 2/3), got {epsilon}"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return invalid(format!("r must be positive, got {r}"));
    }
    check_n_c(n0.max(1), c)?;
    let target = 2.0 / 3.0 - epsilon;
    let big = mu.max(k);
    let ok = |n: u32| -> bool { big * (-(n as f64)).exp2() <= r / 8.0 && eta(n, c).is_ok_and(|e| e > target) };
    // closed-form estimate, then settle on the exact boundary
    let n_eta = target * c.log2() / (1.0 - 1.5 * target);
    let n_r = if big > 0.0 { (8.0 * big / r).log2() } else { 0.0 };
    let mut n = (n_eta.max(n_r).floor().max(0.0) as u32).max(n0.max(1));
    while !ok(n) {
        n += 1;
    }
    while n > n0.max(1) && ok(n - 1) {
        n -= 1;
    }
    Ok(n)
}

/// `r = ε/(2·m_disp)`.
pub fn approx_radius(epsilon: f64, m_disp: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !(m_disp > 0.0) {
        return invalid("epsilon and m_disp must be positive");
    }
    Ok(epsilon / (2.0 * m_disp))
}

/// Volume (dim 3, exact) or horizontal-area upper bound (dim 2) factor of `δ_r`.
pub fn dilation_distortion(r: f64, dim: u32) -> Result<f64> {
    check_d(dim)?;
    if !(r >= 1.0) || !r.is_finite() {
        return invalid(format!("r must be at least 1, got {r}"));
    }
    Ok(if dim == 2 { r.powi(3) } else { r.powi(4) })
}

/// Left-invariant frame `X = ∂x, Y = ∂y + x∂z, Z = ∂z` at `p`, as columns.
fn frame(p: [f64; 3]) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, p[0], 1.0)
}

fn frame_inv(p: [f64; 3]) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -p[0], 1.0)
}

fn delta(r: f64, p: [f64; 3]) -> [f64; 3] {
    [r * p[0], r * p[1], r * r * p[2]]
}

/// Central-difference Jacobian of `δ_r` at `p`, expressed in the frame.
pub fn dilation_jacobian_frame(r: f64, p: HPoint, h: f64) -> nalgebra::Matrix3<f64> {
    let p = p.to_array();
    let mut j = nalgebra::Matrix3::zeros();
    for k in 0..3 {
        let mut a = p;
        let mut b = p;
        a[k] += h;
        b[k] -= h;
        let (fa, fb) = (delta(r, a), delta(r, b));
        for i in 0..3 {
            j[(i, k)] = (fa[i] - fb[i]) / (2.0 * h);
        }
    }
    frame_inv(delta(r, p)) * j * frame(p)
}

/// Frame-determinant of `δ_r` at `p` by finite differences.
pub fn dilation_jacobian_det(r: f64, p: HPoint) -> f64 {
    let s = 1e-3 * (1.0 + p.coord_norm());
    dilation_jacobian_frame(r, p, s).determinant()
}

/// Area ratio of a small square at `p` spanned by frame directions `a`, `b`
/// (`0 = X, 1 = Y, 2 = Z`) under `δ_r`, from its mapped corners.
pub fn square_area_stretch(r: f64, p: HPoint, a: usize, b: usize, side: f64) -> f64 {
    let pa = p.to_array();
    let f = frame(pa);
    let corner = |u: f64, v: f64| {
        let w = f.column(a) * u + f.column(b) * v;
        [pa[0] + w[0], pa[1] + w[1], pa[2] + w[2]]
    };
    let q0 = delta(r, corner(0.0, 0.0));
    let finv = frame_inv(q0);
    let edge = |q: [f64; 3]| finv * nalgebra::Vector3::new(q[0] - q0[0], q[1] - q0[1], q[2] - q0[2]);
    let e1 = edge(delta(r, corner(side, 0.0)));
    let e2 = edge(delta(r, corner(0.0, side)));
    e1.cross(&e2).norm() / (side * side)
}

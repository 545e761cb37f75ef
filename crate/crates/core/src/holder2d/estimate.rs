use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::SubdivisionTree;
use crate::error::{invalid, Result};
use crate::metric::cc_distance;
use crate::rng::sample_rng;

const STRATA: usize = 17;
const LOG2_MIN: f64 = -16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub log2_lo: f64,
    pub log2_hi: f64,
    pub count: usize,
    /// Largest image distance seen in this scale band.
    pub max_dc: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub lambda_hat: f64,
    pub alpha_fit: f64,
    pub pairs: usize,
    pub used_pairs: usize,
    /// Pairs whose descent crossed a flagged sliver child; excluded above.
    pub sliver_pairs: usize,
    pub lambda_hat_slivers: f64,
    pub strata: Vec<Stratum>,
}

fn sample_pair(rng: &mut impl Rng, stratum: usize) -> ([f64; 2], [f64; 2], f64) {
    let lo = LOG2_MIN + stratum as f64;
    loop {
        let d = (lo + rng.gen::<f64>()).exp2();
        let r = rng.gen::<f64>().sqrt();
        let a = 2.0 * PI * rng.gen::<f64>();
        let x = [r * a.cos(), r * a.sin()];
        let b = 2.0 * PI * rng.gen::<f64>();
        let y = [x[0] + d * b.cos(), x[1] + d * b.sin()];
        if y[0].hypot(y[1]) <= 1.0 {
            return (x, y, d);
        }
    }
}

/// Samples `pairs` point pairs stratified over `|x−y| ∈ [2⁻¹⁶, 2]`.
pub fn holder_estimate(tree: &SubdivisionTree, alpha: f64, pairs: usize, seed: u64) -> Result<HolderEstimate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if pairs < 100 {
        return invalid(format!("at least 100 pairs are required, got {pairs}"));
    }
    let samples = crate::par::map_range(pairs, |i| -> Result<(usize, f64, f64, bool)> {
        let s = i % STRATA;
        let mut rng = sample_rng(seed, i as u64);
        let (x, y, d) = sample_pair(&mut rng, s);
        let fx = tree.evaluate_traced(x)?;
        let fy = tree.evaluate_traced(y)?;
        let dc = cc_distance(fx.value, fy.value, 1e-12)?;
        Ok((s, d, dc, fx.sliver || fy.sliver))
    });
    let mut strata: Vec<Stratum> = (0..STRATA)
        .map(|s| Stratum {
            log2_lo: LOG2_MIN + s as f64,
            log2_hi: LOG2_MIN + s as f64 + 1.0,
            count: 0,
            max_dc: 0.0,
            max_ratio: 0.0,
        })
        .collect();
    let (mut lambda_hat, mut lambda_sl, mut used, mut sl) = (0.0f64, 0.0f64, 0usize, 0usize);
    for r in samples {
        let (s, d, dc, sliver) = r?;
        let ratio = dc / d.powf(alpha);
        if sliver {
            sl += 1;
            lambda_sl = lambda_sl.max(ratio);
            continue;
        }
        used += 1;
        lambda_hat = lambda_hat.max(ratio);
        let st = &mut strata[s];
        st.count += 1;
        st.max_dc = st.max_dc.max(dc);
        st.max_ratio = st.max_ratio.max(ratio);
    }
    let pts: Vec<(f64, f64)> = strata
        .iter()
        .filter(|s| s.count > 0 && s.max_dc > 0.0)
        .map(|s| (0.5 * (s.log2_lo + s.log2_hi), s.max_dc.log2()))
        .collect();
    Ok(HolderEstimate {
        alpha,
        lambda_hat,
        alpha_fit: slope(&pts),
        pairs,
        used_pairs: used,
        sliver_pairs: sl,
        lambda_hat_slivers: lambda_sl,
        strata,
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Largest `d_c(f(x), f(y)) / |x − y|` over random pairs on the circle,
/// with the bound `ℓ(γ)/4` a constant-speed boundary must satisfy.
pub fn boundary_lipschitz(tree: &SubdivisionTree, pairs: usize, seed: u64) -> Result<(f64, f64)> {
    let ratios = crate::par::map_range(pairs, |i| -> Result<f64> {
        let mut rng = sample_rng(seed, i as u64);
        let a = 2.0 * PI * rng.gen::<f64>();
        let b = 2.0 * PI * rng.gen::<f64>();
        let x = [a.cos(), a.sin()];
        let y = [b.cos(), b.sin()];
        let d = (x[0] - y[0]).hypot(x[1] - y[1]);
        if d == 0.0 {
            return Ok(0.0);
        }
        let fx = tree.evaluate_traced(x)?.value;
        let fy = tree.evaluate_traced(y)?.value;
        Ok(cc_distance(fx, fy, 1e-12)? / d)
    });
    let mut m = 0.0f64;
    for r in ratios {
        m = m.max(r?);
    }
    let len = tree.gamma().length_dc()?;
    Ok((m, len / 4.0 * (1.0 + 1e-9)))
}

/// Triangle count of the root filling over `n_eff³`.
pub fn empirical_dehn_base(tree: &SubdivisionTree) -> f64 {
    tree.root().filling().triangle_count() as f64 / (tree.n_eff() as f64).powi(3)
}

/// `log n / log(2·√(K·n^β))`.
pub fn predicted_exponent_2d(n: u32, k: f64, beta: f64) -> Result<f64> {
    if n < 2 {
        return invalid(format!("n must be at least 2, got {n}"));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return invalid(format!("K must be at least 1, got {k}"));
    }
    if !(beta >= 2.0) || !beta.is_finite() {
        return invalid(format!("beta must be at least 2, got {beta}"));
    }
    let ln = (n as f64).log2();
    Ok(ln / (1.0 + 0.5 * k.log2() + 0.5 * beta * ln))
}

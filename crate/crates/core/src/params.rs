//! Named constants of the construction, each tagged with where it came from.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::verify_metric_comparison;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Fitted,
    Chosen,
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamProvenance {
    pub k: Provenance,
    #[serde(rename = "L")]
    pub l: Provenance,
    #[serde(rename = "K")]
    pub dehn_k: Provenance,
    pub c: Provenance,
    pub n: Provenance,
    pub n0: Provenance,
    pub mu: Provenance,
    pub b: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarnotParams {
    /// Step of the group.
    pub k: u32,
    /// Comparison constant: `d_c ≤ L·d₀ + L`.
    #[serde(rename = "L")]
    pub l: f64,
    /// Dehn constant: fillings of length-r curves need at most `K·r^{k+1}` triangles.
    #[serde(rename = "K")]
    pub dehn_k: f64,
    pub c: f64,
    pub n: u32,
    pub n0: u32,
    /// Max cell diameter.
    pub mu: f64,
    /// Displacement constant.
    pub b: f64,
    pub provenance: ParamProvenance,
}

impl CarnotParams {
    /// Heisenberg defaults with comparison constant `l` (chosen).
    pub fn heisenberg(l: f64) -> Result<Self> {
        let p = CarnotParams {
            k: 2,
            l,
            dehn_k: dehn_constant(l, 2),
            c: 2.0,
            n: 1,
            n0: 1,
            mu: 0.5,
            b: 1.0,
            provenance: ParamProvenance {
                k: Provenance::Chosen,
                l: Provenance::Chosen,
                dehn_k: Provenance::Derived,
                c: Provenance::Chosen,
                n: Provenance::Chosen,
                n0: Provenance::Chosen,
                mu: Provenance::Derived,
                b: Provenance::Chosen,
            },
        };
        p.validate()?;
        Ok(p)
    }

    /// Heisenberg defaults with `L` fitted on 10⁴ pairs in `[−2, 2]³` and doubled.
    pub fn fitted(seed: u64) -> Result<Self> {
        let fit = verify_metric_comparison(10_000, 2.0, seed)?;
        let mut p = Self::heisenberg(2.0 * fit.l.max(1.0))?;
        p.provenance.l = Provenance::Fitted;
        Ok(p)
    }

    pub fn with_l(mut self, l: f64) -> Result<Self> {
        self.l = l;
        self.dehn_k = dehn_constant(l, self.k);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return invalid("k must be a positive integer");
        }
        for (name, v) in [("L", self.l), ("K", self.dehn_k), ("mu", self.mu), ("b", self.b)] {
            if !(v > 0.0) || !v.is_finite() {
                return invalid(format!("{name} must be a positive real, got {v}"));
            }
        }
        if !(self.c > 1.0) || !self.c.is_finite() {
            return invalid(format!("c must exceed 1, got {}", self.c));
        }
        if self.n0 < 1 || self.n < self.n0 {
            return invalid(format!("need n ≥ n0 ≥ 1, got n={}, n0={}", self.n, self.n0));
        }
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        self.n as f64 / (1.5 * self.n as f64 + self.c.log2())
    }

    pub fn rho(&self) -> f64 {
        (-1.5 * self.n as f64).exp2() / self.c
    }

    /// `E = 4b + μ`.
    pub fn e(&self) -> f64 {
        4.0 * self.b + self.mu
    }

    /// `M = ⌊r/L⌋ + 1`, the angular count of a filling of a length-r curve.
    pub fn angular_count(&self, r: f64) -> usize {
        (r / self.l).floor() as usize + 1
    }

    /// `m = ⌊L(r+1)^k⌋ + 1`, the radial count.
    pub fn radial_count(&self, r: f64) -> usize {
        (self.l * (r + 1.0).powi(self.k as i32)).floor() as usize + 1
    }
}

/// `sup_{r ≥ 6L} 2mM / r^{k+1}`, attained at `r = 6L` since the ratio decreases.
pub fn dehn_constant(l: f64, k: u32) -> f64 {
    let r = 6.0 * l;
    let m = (l * (r + 1.0).powi(k as i32)).floor() + 1.0;
    let big_m = (r / l).floor() + 1.0;
    2.0 * m * big_m / r.powi(k as i32 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_formulas() {
        let p = CarnotParams::heisenberg(2.0).unwrap();
        assert_eq!(p.angular_count(12.0), 7);
        assert_eq!(p.radial_count(12.0), 339);
    }

    #[test]
    fn derived_fields() {
        let mut p = CarnotParams::heisenberg(1.0).unwrap();
        p.n = 10;
        assert!((p.eta() - 0.625).abs() < 1e-15);
        p.n = 2;
        assert!((p.rho() - 1.0 / 16.0).abs() < 1e-15);
        assert!((p.e() - (4.0 * p.b + p.mu)).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let p = CarnotParams::heisenberg(1.0).unwrap();
        assert!(CarnotParams { c: 1.0, ..p }.validate().is_err());
        assert!(CarnotParams { n: 1, n0: 2, ..p }.validate().is_err());
        assert!(p.with_l(-1.0).is_err());
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"L\""));
        let back: CarnotParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn dehn_constant_bounds_counts() {
        for &l in &[1.0, 1.7, 3.5] {
            let p = CarnotParams::heisenberg(l).unwrap();
            let k = p.dehn_k;
            for i in 0..200 {
                let r = 6.0 * l * (1.0 + i as f64 * 0.37);
                let count = 2.0 * (p.radial_count(r) * p.angular_count(r)) as f64;
                assert!(count <= k * r.powi(3) * (1.0 + 1e-12), "L={l} r={r}");
            }
        }
    }
}

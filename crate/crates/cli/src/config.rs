use std::path::{Path, PathBuf};

use heis::CarnotParams;
use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub c: Option<f64>,
    pub n: Option<u32>,
    pub n0: Option<u32>,
    pub mu: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Tolerance of distance solves.
    pub metric: f64,
    /// Pass threshold of continuity and restriction checks.
    pub check: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { metric: 1e-12, check: 1e-9 }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<PathBuf>,
}

impl Config {
    /// Heisenberg parameters with `L = 1` unless overridden.
    pub fn carnot(&self) -> CliResult<CarnotParams> {
        let o = &self.params;
        let mut p = CarnotParams::heisenberg(o.l.unwrap_or(1.0))?;
        if let Some(c) = o.c {
            p.c = c;
        }
        if let Some(n) = o.n {
            p.n = n;
        }
        if let Some(n0) = o.n0 {
            p.n0 = n0;
        }
        if let Some(mu) = o.mu {
            p.mu = mu;
        }
        if let Some(b) = o.b {
            p.b = b;
        }
        p.validate()?;
        Ok(p)
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses JSON, naming the offending field path on failure.
pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        CliError::Input(format!("{}: at `{at}`: {}", path.display(), e.inner()))
    })
}

//! `heis`: command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numeric failure.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::*;

#[derive(Debug, Parser)]
#[command(name = "heis", version, about = "Heisenberg group fillings, Hölder extensions and scaling calculus")]
struct Cli {
    /// JSON config with `params`, `tolerances`, `seed` and `outputs` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write a machine-readable report of outputs and verified bounds.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Horizontal lift of a planar polyline.
    Lift(LiftArgs),
    /// Coarse filling of a closed horizontal curve.
    Fill(FillArgs),
    /// Build a subdivision tree extending a closed curve over the disc.
    Extend(ExtendArgs),
    /// Evaluate a tree at a point of the unit disc.
    Eval(EvalArgs),
    /// Empirical Hölder exponent of a tree.
    Exponent(ExponentArgs),
    /// Export node curves of a tree as OBJ polylines.
    Mesh(MeshArgs),
    /// Scaling and exponent calculus for given n and c.
    Params(ParamsArgs),
    /// Dilation-invariant grid skeleton window.
    Skeleton(SkeletonArgs),
    /// Two-separated ball layout in the unit cube.
    Grid(GridArgs),
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<heis::Error> for CliError {
    fn from(e: heis::Error) -> Self {
        use heis::Error::*;
        match e {
            NonConvergence { .. } | TolUnreachable { .. } | Construction(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("HEIS_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("HEIS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let (cfg, cfg_text) = match &cli.config {
        Some(p) => {
            let text = config::read_text(p)?;
            (config::parse_json(p, &text)?, Some(text))
        }
        None => (config::Config::default(), None),
    };
    let report_path = cli.report.clone().or_else(|| cfg.outputs.report.clone());
    let mut ctx = Context::new(cfg, cfg_text.as_deref());
    let outcome = match &cli.command {
        Command::Lift(a) => lift(&mut ctx, a),
        Command::Fill(a) => fill(&mut ctx, a),
        Command::Extend(a) => extend(&mut ctx, a),
        Command::Eval(a) => eval(&mut ctx, a),
        Command::Exponent(a) => exponent(&mut ctx, a),
        Command::Mesh(a) => mesh(&mut ctx, a),
        Command::Params(a) => params(&mut ctx, a),
        Command::Skeleton(a) => skeleton(&mut ctx, a),
        Command::Grid(a) => grid(&mut ctx, a),
    }?;
    if let Some(p) = report_path {
        let argv: Vec<String> = std::env::args().skip(1).collect();
        let rep = ctx.into_report(&argv, outcome);
        report::write_json(&p, &rep)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let numeric = heis::Error::NonConvergence { iterations: 10, context: "x".into() };
        assert_eq!(CliError::from(numeric).code(), 3);
        assert_eq!(CliError::from(heis::Error::TolUnreachable { tol: 1e-9, bound: 1.0 }).code(), 3);
        assert_eq!(CliError::from(heis::Error::InvalidInput("x".into())).code(), 2);
        assert_eq!(CliError::from(heis::Error::CurveTooShort { length: 1.0, required: 6.0 }).code(), 2);
    }

    #[test]
    fn global_flags_parse_after_subcommand() {
        let cli = Cli::try_parse_from(["heis", "params", "--n", "3", "--c", "2", "--report", "r.json"]).unwrap();
        assert_eq!(cli.report.as_deref(), Some(std::path::Path::new("r.json")));
    }
}

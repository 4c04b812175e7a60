//! Argument parsing and dispatch for the `sar-rpca` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eta::MatrixKind;
use crate::pipeline::{
    cmd_analyze, cmd_baseband, cmd_decompose, cmd_eta, cmd_image, cmd_pipeline, cmd_simulate, EtaMode, RunConfig,
};
use crate::presets::Regime;

#[derive(Debug, Parser)]
#[command(name = "sar-rpca", version, about = "Separate moving from stationary targets in simulated SAR data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the down-ramped data matrix D
    Simulate,
    /// Shift D to complex baseband
    Baseband,
    /// Split a matrix into low-rank L and sparse S
    Decompose,
    /// Analytic bounds on the sparsity weight
    Eta,
    /// Kirchhoff migration image of a matrix file
    Image,
    /// Norm and eta sweeps over speed and stationary-target count
    Analyze,
    /// simulate, baseband, decompose and image in one run
    Pipeline,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegimeArg {
    Gotcha,
    Scaled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MatrixArg {
    Baseband,
    Original,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Scenario JSON (replaces the regime's reference scene)
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// conventional, optimal, or a positive number
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<String>,
    #[arg(long, global = true)]
    pub windows: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub regime: Option<RegimeArg>,
    /// Matrix to decompose
    #[arg(long, global = true, value_enum)]
    pub matrix: Option<MatrixArg>,
    /// Input matrix file
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Velocity tracked by `image`, as vx,vy,vz in m/s
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub velocity: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_vector(s: &str) -> Result<Vector3<f64>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("velocity must be vx,vy,vz, got '{s}'")))?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Vector3::new(x, y, z)),
        _ => Err(Error::Config(format!("velocity must be three finite numbers, got '{s}'"))),
    }
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.scenario {
            cfg.scenario = Some(p.clone());
        }
        if let Some(e) = &self.eta {
            cfg.eta = e.parse::<EtaMode>()?;
        }
        if let Some(w) = self.windows {
            cfg.windows = w;
        }
        if let Some(r) = self.regime {
            cfg.regime = match r {
                RegimeArg::Gotcha => Regime::Gotcha,
                RegimeArg::Scaled => Regime::Scaled,
            };
        }
        if let Some(m) = self.matrix {
            cfg.matrix = match m {
                MatrixArg::Baseband => MatrixKind::Baseband,
                MatrixArg::Original => MatrixKind::Original,
            };
        }
        if let Some(p) = &self.input {
            cfg.input = Some(p.clone());
        }
        if let Some(v) = &self.velocity {
            cfg.hypothesis_velocity_m_per_s = Some(parse_vector(v)?);
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if cfg.windows == 0 {
            return Err(Error::Config("--windows must be at least 1".into()));
        }
        Ok(cfg)
    }
}

fn print<S: Serialize>(value: &S) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value).expect("report serialization is infallible"));
    Ok(())
}

/// Runs one subcommand and prints its report as JSON on stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.common.resolve()?;
    match cli.command {
        Command::Simulate => {
            let f = cmd_simulate(&cfg)?;
            print(&serde_json::json!({ "file": cfg.out.join(crate::pipeline::DATA_FILE), "shape": f.data.shape(), "scenario_hash": f.metadata.scenario_hash }))
        }
        Command::Baseband => {
            let f = cmd_baseband(&cfg)?;
            print(&serde_json::json!({ "file": cfg.out.join(crate::pipeline::BASEBAND_FILE), "shape": f.data.shape() }))
        }
        Command::Decompose => print(&cmd_decompose(&cfg)?),
        Command::Eta => print(&cmd_eta(&cfg)?),
        Command::Image => print(&cmd_image(&cfg)?),
        Command::Analyze => print(&cmd_analyze(&cfg)?),
        Command::Pipeline => print(&cmd_pipeline(&cfg)?),
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main_with_exit_code() -> i32 {
    // Usage errors share exit code 1 with config errors; clap's own 2 would read as a physics failure.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from([
            "sar-rpca", "decompose", "--eta", "0.02", "--windows", "5", "--regime", "gotcha", "--velocity", "-1,2,0",
        ])
        .unwrap();
        let cfg = cli.common.resolve().unwrap();
        assert_eq!(cfg.eta, EtaMode::Value(0.02));
        assert_eq!(cfg.windows, 5);
        assert_eq!(cfg.regime, Regime::Gotcha);
        assert_eq!(cfg.hypothesis_velocity_m_per_s, Some(Vector3::new(-1.0, 2.0, 0.0)));
    }

    #[test]
    fn bad_values_are_config_errors() {
        for args in [["sar-rpca", "eta", "--eta", "large"], ["sar-rpca", "eta", "--eta", "-3"], ["sar-rpca", "image", "--velocity", "1,2"]] {
            let err = Cli::try_parse_from(args).unwrap().common.resolve().unwrap_err();
            assert_eq!(err.exit_code(), 1, "{err}");
        }
    }
}

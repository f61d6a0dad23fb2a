#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

mod commands;
mod output;

/// Exit status for a malformed invocation.
const USAGE: u8 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(name = "minsurf", version, about = "Minimal surfaces and membranes: solvers and verification tables")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output directory (the MINSURF_OUT environment variable takes precedence).
    #[arg(long, global = true, default_value = "minsurf-out")]
    pub out: PathBuf,
    /// Seed for randomized point sweeps.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Catenoid branches, areas and Jacobi spectra over a sweep of ring ratios.
    Catenoid(commands::CatenoidArgs),
    /// Spectral diagnostics of the static-soliton perturbation operators.
    Spectrum(commands::SpectrumArgs),
    /// Residual table for the catalog of separable level-set surfaces.
    Separable(commands::SeparableArgs),
    /// Epicycloid point clouds with shape-equation residuals.
    Rotate(commands::RotateArgs),
    /// Minimal tori in S3: family sweep, congruence defects, Hopf images.
    #[command(name = "s3-torus")]
    S3Torus(commands::S3TorusArgs),
    /// Randomized minimality report for Stiefel cones.
    Stiefel(commands::StiefelArgs),
    /// Randomized minimality report for determinantal varieties.
    Detvar(commands::DetvarArgs),
    /// Axially symmetric membrane evolution with residual diagnostics.
    Membrane(commands::MembraneArgs),
    /// The full acceptance suite.
    VerifyAll(commands::VerifyAllArgs),
    /// Runs a subcommand described by a JSON configuration file.
    Run(RunArgs),
}

#[derive(Debug, Args, Serialize)]
struct RunArgs {
    /// Path to a JSON file with `subcommand`, `parameters`, and optionally
    /// `output_dir`, `seed`, `format`.
    config: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    subcommand: String,
    #[serde(default)]
    parameters: serde_json::Map<String, Value>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    format: Option<String>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<minsurf::Error> for Failure {
    fn from(e: minsurf::Error) -> Self {
        match e {
            minsurf::Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Converts a configuration file into the equivalent argument vector.
/// Settings absent from the file fall back to `outer`.
fn config_to_args(cfg: RunConfig, outer: &Common) -> Result<Vec<String>, Failure> {
    let mut args = vec!["minsurf".to_owned(), cfg.subcommand];
    for (key, value) in cfg.parameters {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => args.push(flag),
            Value::Bool(false) => {}
            Value::Number(n) => args.extend([flag, n.to_string()]),
            Value::String(s) => args.extend([flag, s]),
            Value::Array(items) => {
                let parts: Result<Vec<String>, Failure> = items
                    .into_iter()
                    .map(|v| match v {
                        Value::Number(n) => Ok(n.to_string()),
                        Value::String(s) => Ok(s),
                        other => Err(Failure::Usage(format!("parameter `{key}`: unsupported list item {other}"))),
                    })
                    .collect();
                args.extend([flag, parts?.join(",")]);
            }
            other => return Err(Failure::Usage(format!("parameter `{key}`: unsupported value {other}"))),
        }
    }
    let out = cfg.output_dir.unwrap_or_else(|| outer.out.clone());
    let format = cfg.format.unwrap_or_else(|| format!("{:?}", outer.format).to_lowercase());
    args.extend(["--out".to_owned(), out.display().to_string()]);
    args.extend(["--seed".to_owned(), cfg.seed.unwrap_or(outer.seed).to_string()]);
    args.extend(["--format".to_owned(), format]);
    Ok(args)
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let mut common = cli.common.clone();
    if let Some(dir) = std::env::var_os("MINSURF_OUT").filter(|d| !d.is_empty()) {
        common.out = PathBuf::from(dir);
    }
    let mut config = serde_json::to_value(&cli).map_err(|e| Failure::Runtime(e.to_string()))?;
    config["common"]["out"] = Value::String(common.out.display().to_string());

    let start = Instant::now();
    let (name, outcome) = match &cli.command {
        Command::Catenoid(a) => ("catenoid", commands::catenoid(a)?),
        Command::Spectrum(a) => ("spectrum", commands::spectrum(a)?),
        Command::Separable(a) => ("separable", commands::separable(a, common.seed)?),
        Command::Rotate(a) => ("rotate", commands::rotate(a)?),
        Command::S3Torus(a) => ("s3-torus", commands::s3_torus(a)?),
        Command::Stiefel(a) => ("stiefel", commands::stiefel(a, common.seed)?),
        Command::Detvar(a) => ("detvar", commands::detvar(a, common.seed)?),
        Command::Membrane(a) => ("membrane", commands::membrane(a)?),
        Command::VerifyAll(a) => ("verify-all", commands::verify_all(a, common.seed)?),
        Command::Run(r) => {
            let text = std::fs::read_to_string(&r.config)?;
            let cfg: RunConfig =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", r.config.display())))?;
            if cfg.subcommand == "run" {
                return Err(Failure::Usage("a configuration cannot invoke `run`".into()));
            }
            let nested =
                Cli::try_parse_from(config_to_args(cfg, &cli.common)?).map_err(|e| Failure::Usage(e.to_string()))?;
            return execute(nested);
        }
    };
    let wall = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&common.out)?;
    let mut artifacts = Vec::new();
    for t in &outcome.tables {
        artifacts
            .push(output::write_table(&common.out, t, common.format).map_err(|e| Failure::Runtime(e.to_string()))?);
    }
    let manifest = output::write_manifest(&common.out, name, config, wall, &artifacts, &outcome)?;

    for (k, v) in &outcome.summary {
        println!("{k}: {v}");
    }
    for g in &outcome.groups {
        let failed = g.checks.iter().filter(|c| !c.pass).count();
        println!(
            "[{}] {} ({} checks{})",
            if g.pass { "PASS" } else { "FAIL" },
            g.group,
            g.checks.len(),
            if failed > 0 { format!(", {failed} failed") } else { String::new() }
        );
        for c in g.checks.iter().filter(|c| !c.pass) {
            println!("    {}: value {} tol {}", c.name, output::fmt_f64(c.value), output::fmt_f64(c.tol));
        }
    }
    for p in artifacts.iter().chain([&manifest]) {
        println!("wrote {}", p.display());
    }
    Ok(outcome.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

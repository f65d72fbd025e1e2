//! Command-line front end of the `leosec` binary.
//!
//! Data goes to `--out` or stdout; every diagnostic goes to stderr. Exit
//! status is 0 on success, 1 on bad input, 2 when the numerics fail to
//! converge and 3 when `validate` reports a failing row.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analytics::{full_report, Quadrature, QuadratureSpec};
use crate::config::NetworkConfig;
use crate::error::Error;
use crate::experiments::{self, default_gamma_grid, Engine, Metric, SweepAxis, SweepParam, SweepSpec};
use crate::montecarlo;

pub use config::{parse_config, preset, ConfigFile};
pub use output::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "leosec",
    version,
    about = "Secrecy metrics for IoT uplinks to multi-tier LEO constellations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON scenario file.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in scenario, used when no --config is given.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub seed: u64,
    /// Monte Carlo trials per estimate.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, global = true)]
    pub quad_nodes: Option<usize>,
    /// Initial number of quadrature panels.
    #[arg(long, global = true)]
    pub quad_panels: Option<usize>,
    /// Relative tolerance of the panel-doubling check.
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for the parallel engines.
    #[arg(long, global = true, env = "LEOSEC_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form metrics.
    Analyze,
    /// Monte Carlo estimates of the same metrics.
    Simulate,
    /// Side-by-side comparison of both engines.
    Validate,
    /// Metric over a one- or two-dimensional parameter grid.
    Sweep(SweepArgs),
    /// Best information-bearing ratio for the secure probability.
    Optimize {
        #[arg(long, default_value_t = 20)]
        grid_points: usize,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// One of gamma, theta_beam, altitude_m, num_satellites,
    /// device_density, legit_tier, beta_ls, beta_es.
    #[arg(long)]
    pub param: String,
    /// Comma-separated values; defaults to the standard grid for gamma.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    #[arg(long, requires = "values2")]
    pub param2: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "param2")]
    pub values2: Option<String>,
    #[arg(long, default_value = "p_sec")]
    pub metric: String,
    /// analytic, montecarlo or both.
    #[arg(long, default_value = "analytic")]
    pub engine: String,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.common.threads {
        Some(0) => Err(CliError::Input("thread count must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(CliError::Input(format!("cannot start thread pool: {e}"))),
        },
        None => execute(&cli),
    };
    match result.and_then(|(code, text)| emit(&cli.common, &text, stdout).map(|()| code)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<NetworkConfig, CliError> {
    match (&common.config, &common.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            Ok(parse_config(&text)?)
        }
        (None, Some(name)) => Ok(preset(name)?),
        (None, None) => Ok(preset("table2")?),
    }
}

fn quadrature(common: &CommonArgs) -> Result<Quadrature, CliError> {
    let defaults = QuadratureSpec::default();
    Ok(Quadrature::new(QuadratureSpec {
        nodes_per_panel: common.quad_nodes.unwrap_or(defaults.nodes_per_panel),
        panels: common.quad_panels.unwrap_or(defaults.panels),
        rel_tolerance: common.quad_tol.unwrap_or(defaults.rel_tolerance),
        ..defaults
    })?)
}

fn parse_values(param: SweepParam, text: Option<&str>) -> Result<Vec<f64>, CliError> {
    let Some(text) = text else {
        return match param {
            SweepParam::Gamma => Ok(default_gamma_grid()),
            _ => Err(CliError::Input(format!("--values is required for {param}"))),
        };
    };
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("cannot parse sweep value {v:?} for {param}")))
        })
        .collect()
}

fn sweep_spec(args: &SweepArgs, common: &CommonArgs) -> Result<SweepSpec, CliError> {
    let param: SweepParam = args.param.parse()?;
    let axis1 = SweepAxis::new(param, parse_values(param, args.values.as_deref())?)?;
    let axis2 = match &args.param2 {
        Some(name) => {
            let p: SweepParam = name.parse()?;
            Some(SweepAxis::new(p, parse_values(p, args.values2.as_deref())?)?)
        }
        None => None,
    };
    Ok(SweepSpec {
        axis1,
        axis2,
        metric: args.metric.parse::<Metric>()?,
        engine: args.engine.parse::<Engine>()?,
        n_trials: common.trials,
        seed: common.seed,
    })
}

/// Runs the command and returns its exit status with the rendered output.
fn execute(cli: &Cli) -> Result<(i32, String), CliError> {
    let common = &cli.common;
    let cfg = load_config(common)?;
    let quad = quadrature(common)?;
    let mut code = EXIT_OK;
    let text = match &cli.command {
        Command::Analyze => {
            let report = full_report(&cfg, &quad)?;
            output::analyze(&report, cfg.legit_tier, common.format.unwrap_or(Format::Json))
        }
        Command::Simulate => {
            let report = montecarlo::estimate(&cfg, common.trials, common.seed)?;
            output::simulate(&report, common.format.unwrap_or(Format::Json))
        }
        Command::Validate => {
            let table = experiments::validate(&cfg, common.trials, common.seed, &quad)?;
            if !table.all_pass() {
                code = EXIT_VALIDATION;
            }
            output::validate(&table, common.format.unwrap_or(Format::Csv))
        }
        Command::Sweep(args) => {
            let spec = sweep_spec(args, common)?;
            let rows = experiments::sweep(&cfg, &spec, &quad)?;
            output::sweep(&spec, &rows, common.format.unwrap_or(Format::Csv))
        }
        Command::Optimize { grid_points } => {
            let opt = experiments::optimize_gamma(&cfg, *grid_points, &quad)?;
            output::optimize(&opt, common.format.unwrap_or(Format::Json))
        }
    };
    Ok((code, text))
}

fn emit(common: &CommonArgs, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write output: {e}"))),
    }
}

//! Command-line front end.

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::channel::Preset;
use crate::config::{defaults, load_config_for};
use crate::error::{Error, Result};
use crate::experiments::{
    optimize_altitude, run_altitude_sweep, run_anchor_count_sweep, run_crlb_comparison, run_inter_distance_sweep,
    write_crlb_table, write_results, ExperimentConfig, ExperimentResult, SweepVariable,
};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_EXPERIMENT: u8 = 4;
pub const EXIT_IO: u8 = 5;

const AFTER_HELP: &str = "\
Results are written as CSV to --out, with the resolved configuration in a
`<out>.meta.toml` sidecar. Everything not covered by a flag lives in the
config file; see config/example.toml.

Exit codes:
  0  success
  2  usage error (unknown command or flag)
  3  config error (unreadable, malformed or out-of-range config)
  4  experiment error (invalid parameters or geometry)
  5  output error (cannot write results)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Mean localization error versus UAV altitude.
    AltitudeSweep,
    /// Localization error versus triangle side length.
    DistanceSweep,
    /// Localization error versus number of anchors.
    CountSweep,
    /// Range-estimator spread against the Cramér-Rao bound.
    Crlb,
    /// Altitude (and elevation angle) with the smallest mean error.
    Optimize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AltitudeSweep => "altitude-sweep",
            Command::DistanceSweep => "distance-sweep",
            Command::CountSweep => "count-sweep",
            Command::Crlb => "crlb",
            Command::Optimize => "optimize",
        }
    }

    fn study(self) -> SweepVariable {
        match self {
            Command::AltitudeSweep | Command::Crlb | Command::Optimize => SweepVariable::Altitude,
            Command::DistanceSweep => SweepVariable::InterDistance,
            Command::CountSweep => SweepVariable::AnchorCount,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Urban,
    Suburban,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Urban => Preset::Urban,
            PresetArg::Suburban => Preset::Suburban,
        }
    }
}

/// Everything needed to run one command.
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "aerial-rss", version, about = "Simulate RSS localization with UAV aerial anchors", after_help = AFTER_HELP)]
pub struct RunManifest {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment config file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Environment preset; overrides the config file's `preset`.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<PresetArg>,

    /// Master seed; overrides the config file's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output CSV path [default: <command>.csv]
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Worker threads, 0 = one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

impl RunManifest {
    pub fn output_path(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.command.name())))
    }

    /// Resolved experiment config for this manifest.
    pub fn resolve_config(&self) -> Result<ExperimentConfig> {
        let study = Some(self.command.study());
        let preset = self.preset.map(Preset::from);
        let mut cfg = match &self.config {
            Some(path) => load_config_for(path, study, preset)?,
            None => defaults(self.command.study(), preset)?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn sweep_summary(name: &str, result: &ExperimentResult, unit: &str) -> String {
    let i = result.argmin();
    format!(
        "{name}: argmin = {} {unit}, min mean error = {:.2} m, position error there = {:.2} m",
        result.sweep_values[i], result.mean_error[i], result.mean_position_error[i]
    )
}

/// Runs the manifest's experiment, writes its outputs and returns the
/// one-line summary.
pub fn dispatch(manifest: &RunManifest) -> Result<String> {
    let out = manifest.output_path();
    if out.as_os_str().is_empty() {
        return Err(Error::InvalidArgument("output path must not be empty".into()));
    }
    let cfg = manifest.resolve_config()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(manifest.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {} threads: {e}", manifest.threads)))?;

    pool.install(|| {
        let summary = match manifest.command {
            Command::AltitudeSweep => {
                let r = run_altitude_sweep(&cfg)?;
                write_results(&r, &cfg, &out)?;
                sweep_summary("altitude-sweep", &r, "m")
            }
            Command::DistanceSweep => {
                let r = run_inter_distance_sweep(&cfg)?;
                write_results(&r, &cfg, &out)?;
                sweep_summary("distance-sweep", &r, "m")
            }
            Command::CountSweep => {
                let r = run_anchor_count_sweep(&cfg)?;
                write_results(&r, &cfg, &out)?;
                sweep_summary("count-sweep", &r, "anchors")
            }
            Command::Optimize => {
                let opt = optimize_altitude(&cfg)?;
                write_results(&opt.sweep, &cfg, &out)?;
                format!(
                    "optimize: h_opt = {} m, error_at_opt = {:.2} m, theta_opt = {:.1} deg (mean node distance {:.1} m)",
                    opt.h_opt,
                    opt.error_at_opt,
                    opt.theta_opt * 180.0 / PI,
                    opt.mean_node_distance
                )
            }
            Command::Crlb => {
                let rows = run_crlb_comparison(&cfg, &cfg.crlb.r_values)?;
                write_crlb_table(&rows, &cfg, &out)?;
                let worst = rows
                    .iter()
                    .map(|r| (r.mle_std / r.crlb_sigma_n - 1.0).abs())
                    .fold(0.0, f64::max);
                format!(
                    "crlb: {} cells, worst |sigma_mle / sigma_crlb_n - 1| = {:.3}",
                    rows.len(),
                    worst
                )
            }
        };
        Ok(format!("{summary} -> {}", out.display()))
    })
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } => EXIT_CONFIG,
        Error::Io { .. } | Error::Csv { .. } => EXIT_IO,
        Error::Domain { .. } | Error::InvalidArgument(_) | Error::InvalidParameter(_) | Error::DegenerateGeometry(_) => {
            EXIT_EXPERIMENT
        }
    }
}

/// Parses `args`, dispatches, and reports on stdout/stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let manifest = match RunManifest::try_parse_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(&manifest) {
        Ok(summary) => {
            let _ = writeln!(std::io::stdout(), "{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "qstw", version, about = "Weak-value state tomography simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Empirical and theoretical MSE along one coupling-strength axis.
    Sweep,
    /// Scaled MSE of weak-value, MUB and SIC tomography per dimension.
    Compare,
    /// Simulated reconstruction of the state in --state-file.
    Reconstruct,
    /// Exact oracle and closed-form consistency checks.
    Selfcheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum SweepAxis {
    #[value(name = "g-r")]
    #[serde(rename = "g-r")]
    GR,
    #[value(name = "g-i")]
    #[serde(rename = "g-i")]
    GI,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::GR => "g-r",
            SweepAxis::GI => "g-i",
        }
    }
}

/// Flags shared by all subcommands; each overrides the matching config-file key.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// TOML file with defaults for any of the flags below (keys use underscores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// System dimension d.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Measurements N per configuration.
    #[arg(long, global = true)]
    pub shots: Option<usize>,
    /// Monte Carlo repetitions.
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Coupling strength for the real quadrature (radians).
    #[arg(long = "g-r", global = true)]
    pub g_r: Option<f64>,
    /// Coupling strength for the imaginary quadrature (radians).
    #[arg(long = "g-i", global = true)]
    pub g_i: Option<f64>,
    /// Use the optimal strengths for the dimension.
    #[arg(long, global = true)]
    #[serde(default)]
    pub optimal: bool,
    #[arg(long = "sweep-axis", global = true)]
    pub sweep_axis: Option<SweepAxis>,
    #[arg(long = "sweep-min", global = true)]
    pub sweep_min: Option<f64>,
    #[arg(long = "sweep-max", global = true)]
    pub sweep_max: Option<f64>,
    #[arg(long = "sweep-steps", global = true)]
    pub sweep_steps: Option<usize>,
    /// Smallest dimension for `compare`.
    #[arg(long = "dim-min", global = true)]
    pub dim_min: Option<usize>,
    /// Largest dimension for `compare`.
    #[arg(long = "dim-max", global = true)]
    pub dim_max: Option<usize>,
    /// State file (first line d, then d rows of `re,im` entries).
    #[arg(long = "state-file", global = true)]
    pub state_file: Option<PathBuf>,
    /// Haar-random pure state (the default state source).
    #[arg(long, global = true, conflicts_with = "mixed_rank")]
    #[serde(default)]
    pub pure: bool,
    /// Random mixed state of the given rank.
    #[arg(long = "mixed-rank", global = true)]
    pub mixed_rank: Option<usize>,
    /// Output CSV path (sweep, compare) or file prefix (reconstruct).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a run manifest with the resolved configuration.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

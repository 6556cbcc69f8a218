//! Resolution of flags and config-file values into a validated [`ExperimentConfig`].
//!
//! Command-line flags win over config-file keys; anything left unset takes the defaults below.
//! Validation messages name the flag or key the offending value came from.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qstw_core::protocol::CouplingStrengths;
use qstw_core::qmath::{parse_state, purity_stats, random_mixed, random_pure, validate_density, DensityMatrix};
use qstw_core::theory::optimal_strengths;
use qstw_core::RandomStream;

use crate::args::{Flags, SweepAxis};
use crate::error::CliError;

pub const DEFAULT_DIM: usize = 5;
pub const DEFAULT_SHOTS: usize = 100;
pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SWEEP_STEPS: usize = 19;
pub const DEFAULT_DIM_RANGE: (usize, usize) = (2, 10);
/// Stream id reserved for drawing the unknown state; repetitions use ids `0..reps`.
pub const STATE_STREAM: u64 = u64::MAX;

fn default_sweep_range(axis: SweepAxis) -> (f64, f64) {
    match axis {
        SweepAxis::GR => (0.6, 2.4),
        SweepAxis::GI => (0.6, 2.6),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSource {
    File(PathBuf),
    Pure,
    Mixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.min + h * k as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    /// Whether `dim` was set explicitly rather than defaulted.
    pub dim_explicit: bool,
    pub shots: usize,
    pub reps: usize,
    pub seed: u64,
    /// Explicit strengths; `None` means the optimum for the dimension (π/2 for `g_i`).
    pub g_r: Option<f64>,
    pub g_i: Option<f64>,
    pub state: StateSource,
    pub sweep: SweepSpec,
    pub dim_range: (usize, usize),
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub config_file: Option<PathBuf>,
}

fn config_err(origin: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{origin}: {message}"))
}

/// Value plus the flag or config key it came from.
fn pick<T: Clone>(cli: &Option<T>, file: &Option<T>, flag: &str) -> Option<(T, String)> {
    if let Some(v) = cli {
        return Some((v.clone(), format!("--{flag}")));
    }
    file.as_ref()
        .map(|v| (v.clone(), format!("config key `{}`", flag.replace('-', "_"))))
}

pub fn read_config_file(path: &Path) -> Result<Flags, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn check_strength(g: f64, origin: &str) -> Result<f64, CliError> {
    CouplingStrengths::new(g, FRAC_PI_2).map_err(|e| config_err(origin, e))?;
    Ok(g)
}

impl ExperimentConfig {
    pub fn resolve(cli: &Flags) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => read_config_file(path)?,
            None => Flags::default(),
        };

        let positive = |v: Option<(usize, String)>, default: usize, min: usize| -> Result<usize, CliError> {
            match v {
                Some((x, origin)) if x < min => Err(config_err(&origin, format!("must be at least {min}, got {x}"))),
                Some((x, _)) => Ok(x),
                None => Ok(default),
            }
        };

        let shots = positive(pick(&cli.shots, &file.shots, "shots"), DEFAULT_SHOTS, 1)?;
        let reps = positive(pick(&cli.reps, &file.reps, "reps"), DEFAULT_REPS, 1)?;
        let seed = pick(&cli.seed, &file.seed, "seed").map_or(DEFAULT_SEED, |(s, _)| s);

        let optimal = cli.optimal || file.optimal;
        let g_r = pick(&cli.g_r, &file.g_r, "g-r");
        let g_i = pick(&cli.g_i, &file.g_i, "g-i");
        if optimal {
            if let Some((_, origin)) = g_r.as_ref().or(g_i.as_ref()) {
                return Err(config_err(origin, "conflicts with --optimal"));
            }
        }
        let g_r = g_r.map(|(g, o)| check_strength(g, &o)).transpose()?;
        let g_i = g_i.map(|(g, o)| check_strength(g, &o)).transpose()?;

        let pure = cli.pure || file.pure;
        let mixed = pick(&cli.mixed_rank, &file.mixed_rank, "mixed-rank");
        let state_file = pick(&cli.state_file, &file.state_file, "state-file");
        let state = match (state_file, mixed) {
            (Some((path, _)), None) if !pure => StateSource::File(path),
            (Some((_, origin)), _) => {
                return Err(config_err(&origin, "cannot be combined with --pure or --mixed-rank"))
            }
            (None, Some((_, origin))) if pure => return Err(config_err(&origin, "conflicts with --pure")),
            (None, Some((0, origin))) => {
                return Err(config_err(&origin, "rank must be at least 1"))
            }
            (None, Some((rank, _))) => StateSource::Mixed(rank),
            (None, None) => StateSource::Pure,
        };

        let dim_pick = pick(&cli.dim, &file.dim, "dim");
        let dim = positive(dim_pick.clone(), DEFAULT_DIM, 2)?;
        if let (StateSource::Mixed(rank), Some((d, origin))) = (&state, &dim_pick) {
            if rank > d {
                return Err(config_err(origin, format!("dimension {d} is smaller than --mixed-rank {rank}")));
            }
        }

        let axis = pick(&cli.sweep_axis, &file.sweep_axis, "sweep-axis").map_or(SweepAxis::GR, |(a, _)| a);
        let (default_min, default_max) = default_sweep_range(axis);
        let sweep_min = pick(&cli.sweep_min, &file.sweep_min, "sweep-min");
        let sweep_max = pick(&cli.sweep_max, &file.sweep_max, "sweep-max");
        for (value, origin) in sweep_min.iter().chain(sweep_max.iter()) {
            if !(value.is_finite() && *value > 0.0 && *value < PI) {
                return Err(config_err(origin, format!("must lie in (0, pi), got {value}")));
            }
        }
        let min = sweep_min.as_ref().map_or(default_min, |v| v.0);
        let max = sweep_max.as_ref().map_or(default_max, |v| v.0);
        if min >= max {
            let origin = sweep_min.or(sweep_max).map_or_else(|| "--sweep-min".to_string(), |v| v.1);
            return Err(config_err(&origin, format!("sweep range [{min}, {max}] is empty")));
        }
        let steps = positive(pick(&cli.sweep_steps, &file.sweep_steps, "sweep-steps"), DEFAULT_SWEEP_STEPS, 2)?;

        let dim_min = pick(&cli.dim_min, &file.dim_min, "dim-min");
        let dim_max = pick(&cli.dim_max, &file.dim_max, "dim-max");
        let lo = positive(dim_min.clone(), DEFAULT_DIM_RANGE.0, 2)?;
        let hi = positive(dim_max.clone(), DEFAULT_DIM_RANGE.1, 2)?;
        if lo > hi {
            let origin = dim_min.or(dim_max).map_or_else(String::new, |v| v.1);
            return Err(config_err(&origin, format!("dimension range {lo}..={hi} is empty")));
        }

        Ok(Self {
            dim,
            dim_explicit: dim_pick.is_some(),
            shots,
            reps,
            seed,
            g_r,
            g_i,
            state,
            sweep: SweepSpec { axis, min, max, steps },
            dim_range: (lo, hi),
            out: pick(&cli.out, &file.out, "out").map(|v| v.0),
            manifest: pick(&cli.manifest, &file.manifest, "manifest").map(|v| v.0),
            config_file: cli.config.clone(),
        })
    }

    /// Strengths for dimension `dim`: explicit values where given, the optimum otherwise.
    pub fn strengths(&self, dim: usize) -> Result<CouplingStrengths, CliError> {
        let opt = optimal_strengths(dim)?;
        CouplingStrengths::new(self.g_r.unwrap_or(opt.g_r()), self.g_i.unwrap_or(opt.g_i()))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Loads or draws the unknown state at dimension `dim`.
    pub fn state_for(&self, dim: usize) -> Result<DensityMatrix, CliError> {
        match &self.state {
            StateSource::File(path) => load_state_file(path),
            StateSource::Pure => Ok(random_pure(dim, &mut RandomStream::new(self.seed, STATE_STREAM))?),
            StateSource::Mixed(rank) => {
                if *rank > dim {
                    return Err(CliError::Config(format!(
                        "--mixed-rank {rank} exceeds dimension {dim}"
                    )));
                }
                Ok(random_mixed(dim, *rank, &mut RandomStream::new(self.seed, STATE_STREAM))?)
            }
        }
    }

    /// The state used by single-dimension commands; a state file fixes the dimension.
    pub fn primary_state(&self) -> Result<DensityMatrix, CliError> {
        let rho = self.state_for(self.dim)?;
        if self.dim_explicit && rho.dim() != self.dim {
            return Err(CliError::Config(format!(
                "--dim {} disagrees with state file dimension {}",
                self.dim,
                rho.dim()
            )));
        }
        Ok(rho)
    }

    pub fn state_label(&self) -> String {
        match &self.state {
            StateSource::File(p) => format!("file:{}", p.display()),
            StateSource::Pure => "pure-random".to_string(),
            StateSource::Mixed(r) => format!("mixed-random(rank={r})"),
        }
    }

    /// `key = value` lines describing the run, defaults included.
    pub fn manifest(&self, command: &str, rho: Option<&DensityMatrix>) -> String {
        let mut out = String::new();
        let strength = |g: Option<f64>, fallback: &str| g.map_or_else(|| fallback.to_string(), |g| g.to_string());
        let _ = writeln!(out, "command = {command}");
        if let Some(path) = &self.config_file {
            let _ = writeln!(out, "config_file = {}", path.display());
        }
        let _ = writeln!(out, "dim = {}", rho.map_or(self.dim, DensityMatrix::dim));
        let _ = writeln!(out, "shots = {}", self.shots);
        let _ = writeln!(out, "reps = {}", self.reps);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "g_r = {}", strength(self.g_r, "optimal"));
        let _ = writeln!(out, "g_i = {}", strength(self.g_i, "optimal"));
        let _ = writeln!(out, "state_source = {}", self.state_label());
        let _ = writeln!(out, "state_stream = {STATE_STREAM}");
        let _ = writeln!(out, "sweep_axis = {}", self.sweep.axis.name());
        let _ = writeln!(out, "sweep_min = {}", self.sweep.min);
        let _ = writeln!(out, "sweep_max = {}", self.sweep.max);
        let _ = writeln!(out, "sweep_steps = {}", self.sweep.steps);
        let _ = writeln!(out, "dim_min = {}", self.dim_range.0);
        let _ = writeln!(out, "dim_max = {}", self.dim_range.1);
        if let Some(rho) = rho {
            let p = purity_stats(rho);
            let _ = writeln!(out, "purity = {}", p.purity);
            let _ = writeln!(out, "purity_re = {}", p.purity_re);
            let _ = writeln!(out, "purity_im = {}", p.purity_im);
        }
        out
    }
}

pub fn load_state_file(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let m = parse_state(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    validate_density(&m).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(f: Flags) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::resolve(&f)
    }

    #[test]
    fn defaults() {
        let c = resolve(Flags::default()).unwrap();
        assert_eq!((c.dim, c.shots, c.reps, c.seed), (5, 100, 1000, 1));
        assert_eq!(c.state, StateSource::Pure);
        assert_eq!(c.sweep.steps, 19);
        let s = c.strengths(5).unwrap();
        assert!((s.g_r() - 1.3342).abs() < 1e-4);
        assert_eq!(s.g_i(), FRAC_PI_2);
    }

    #[test]
    fn errors_name_the_flag() {
        let f = Flags { sweep_steps: Some(1), ..Flags::default() };
        let msg = resolve(f).unwrap_err().to_string();
        assert!(msg.contains("--sweep-steps"), "{msg}");

        let f = Flags { sweep_max: Some(4.0), ..Flags::default() };
        assert!(resolve(f).unwrap_err().to_string().contains("--sweep-max"));

        let f = Flags { g_r: Some(0.0), ..Flags::default() };
        assert!(resolve(f).unwrap_err().to_string().contains("--g-r"));

        let f = Flags { optimal: true, g_i: Some(1.0), ..Flags::default() };
        assert!(resolve(f).unwrap_err().to_string().contains("--optimal"));

        let f = Flags { dim: Some(3), mixed_rank: Some(4), ..Flags::default() };
        assert_eq!(resolve(f).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "dim = 3\nshots = 40\nsweep_axis = \"g-i\"\nsweep_steps = 1\n").unwrap();
        let f = Flags { config: Some(path.clone()), shots: Some(7), ..Flags::default() };
        let msg = resolve(f).unwrap_err().to_string();
        assert!(msg.contains("config key `sweep_steps`"), "{msg}");

        let f = Flags { config: Some(path), shots: Some(7), sweep_steps: Some(4), ..Flags::default() };
        let c = resolve(f).unwrap();
        assert_eq!((c.dim, c.shots, c.sweep.steps), (3, 7, 4));
        assert_eq!(c.sweep.axis, SweepAxis::GI);
    }

    #[test]
    fn bad_config_file_mentions_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        fs::write(&path, "dim = 3\nunknown_key = 1\n").unwrap();
        let err = resolve(Flags { config: Some(path), ..Flags::default() }).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn sweep_points_cover_range() {
        let s = SweepSpec { axis: SweepAxis::GR, min: 0.5, max: 1.5, steps: 3 };
        assert_eq!(s.points(), vec![0.5, 1.0, 1.5]);
    }
}

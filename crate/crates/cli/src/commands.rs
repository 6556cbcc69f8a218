use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qstw_core::montecarlo::{exact_mse_oracle, run_plan, ExperimentPlan};
use qstw_core::protocol::CouplingStrengths;
use qstw_core::qmath::{format_state, hs_distance_sq, purity_stats};
use qstw_core::theory::{mse_hermitized, mse_raw, scaled_mse_menu, Scheme, TheoryInput};
use qstw_core::RandomStream;

use crate::args::SweepAxis;
use crate::config::{ExperimentConfig, StateSource};
use crate::error::CliError;

/// Twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

pub const SWEEP_HEADER: [&str; 10] = [
    "axis_value",
    "mse_raw_mean",
    "mse_raw_stderr",
    "mse_herm_mean",
    "mse_herm_stderr",
    "theory_raw",
    "theory_herm",
    "oracle_raw",
    "oracle_herm",
    "reps",
];

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Consistency(format!("csv: {e}"));
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(row).map_err(internal)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Consistency(format!("csv: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, bytes),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

fn ensure_finite(values: &[f64], what: &str) -> Result<(), CliError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Consistency(format!("non-finite value in {what}")))
    }
}

pub fn sweep(config: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rho = config.primary_state()?;
    let d = rho.dim();
    let base = config.strengths(d)?;
    let mut rows = Vec::with_capacity(config.sweep.steps);
    for g in config.sweep.points() {
        let strengths = match config.sweep.axis {
            SweepAxis::GR => CouplingStrengths::new(g, base.g_i()),
            SweepAxis::GI => CouplingStrengths::new(base.g_r(), g),
        }
        .map_err(|e| CliError::Config(format!("sweep point: {e}")))?;
        let plan = ExperimentPlan::new(&rho, strengths)?;
        let report = run_plan(&plan, config.shots, config.reps, config.seed)?;
        let oracle_raw = exact_mse_oracle(&rho, strengths, config.shots, false)?;
        let oracle_herm = exact_mse_oracle(&rho, strengths, config.shots, true)?;
        let values = [
            g,
            report.mse_raw_mean,
            report.mse_raw_stderr,
            report.mse_herm_mean,
            report.mse_herm_stderr,
            report.theory_raw,
            report.theory_herm,
            oracle_raw,
            oracle_herm,
        ];
        ensure_finite(&values, "sweep row")?;
        let mut row: Vec<String> = values.iter().map(|&v| fmt_num(v)).collect();
        row.push(report.reps.to_string());
        rows.push(row);
    }
    if let Some(path) = &config.manifest {
        write_file(path, config.manifest("sweep", Some(&rho)).as_bytes())?;
    }
    emit(&config.out, &csv_bytes(&SWEEP_HEADER, &rows)?, stdout)
}

pub fn compare_header() -> Vec<&'static str> {
    let mut h = vec!["d", "purity", "purity_re", "purity_im"];
    h.extend(Scheme::ALL.iter().map(|s| s.label()));
    h
}

pub fn compare(config: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let dims: Vec<usize> = match &config.state {
        StateSource::File(_) => vec![config.primary_state()?.dim()],
        _ => (config.dim_range.0..=config.dim_range.1).collect(),
    };
    let mut rows = Vec::with_capacity(dims.len());
    for d in dims {
        let rho = config.state_for(d)?;
        let p = purity_stats(&rho);
        let menu = scaled_mse_menu(d, &p)?;
        if let Some(bad) = menu.iter().find(|r| !(r.scaled_mse.is_finite() && r.scaled_mse > 0.0)) {
            return Err(CliError::Consistency(format!(
                "d={d}: non-positive scaled MSE for {}",
                bad.scheme.label()
            )));
        }
        let mut row = vec![d.to_string(), fmt_num(p.purity), fmt_num(p.purity_re), fmt_num(p.purity_im)];
        row.extend(menu.iter().map(|r| fmt_num(r.scaled_mse)));
        rows.push(row);
    }
    if let Some(path) = &config.manifest {
        write_file(path, config.manifest("compare", None).as_bytes())?;
    }
    emit(&config.out, &csv_bytes(&compare_header(), &rows)?, stdout)
}

pub fn reconstruct(config: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !matches!(config.state, StateSource::File(_)) {
        return Err(CliError::Config("--state-file: required by reconstruct".into()));
    }
    let rho = config.primary_state()?;
    let d = rho.dim();
    let strengths = config.strengths(d)?;
    let plan = ExperimentPlan::new(&rho, strengths)?;
    let est = plan.simulate(config.shots, &mut RandomStream::new(config.seed, 0))?;
    let err_raw = hs_distance_sq(&est.raw, rho.matrix())?;
    let err_herm = hs_distance_sq(&est.hermitized, rho.matrix())?;
    let theory = TheoryInput::new(d, strengths, config.shots, purity_stats(&rho))?;
    let theory_raw = mse_raw(&theory)?;
    let theory_herm = mse_hermitized(&theory)?.total;
    let oracle_herm = exact_mse_oracle(&rho, strengths, config.shots, true)?;
    ensure_finite(&[err_raw, err_herm, theory_raw, theory_herm, oracle_herm], "reconstruction")?;

    if let Some(prefix) = &config.out {
        let with_suffix = |suffix: &str| {
            let mut s = prefix.clone().into_os_string();
            s.push(suffix);
            PathBuf::from(s)
        };
        write_file(&with_suffix(".raw.txt"), format_state(&est.raw).as_bytes())?;
        write_file(&with_suffix(".herm.txt"), format_state(&est.hermitized).as_bytes())?;
    }
    if let Some(path) = &config.manifest {
        write_file(path, config.manifest("reconstruct", Some(&rho)).as_bytes())?;
    }
    let mut summary = String::new();
    summary.push_str(&format!("d = {d}\nshots = {}\nseed = {}\n", config.shots, config.seed));
    summary.push_str(&format!("g_r = {}\ng_i = {}\n", fmt_num(strengths.g_r()), fmt_num(strengths.g_i())));
    summary.push_str(&format!("hs_error_raw = {}\n", fmt_num(err_raw)));
    summary.push_str(&format!("hs_error_herm = {}\n", fmt_num(err_herm)));
    summary.push_str(&format!("theory_mse_raw = {}\n", fmt_num(theory_raw)));
    summary.push_str(&format!("theory_mse_herm = {}\n", fmt_num(theory_herm)));
    summary.push_str(&format!("exact_mse_herm = {}\n", fmt_num(oracle_herm)));
    if config.out.is_none() {
        summary.push_str("raw_estimate:\n");
        summary.push_str(&format_state(&est.raw));
        summary.push_str("hermitized_estimate:\n");
        summary.push_str(&format_state(&est.hermitized));
    }
    stdout
        .write_all(summary.as_bytes())
        .map_err(|e| CliError::Input(format!("stdout: {e}")))
}

pub fn selfcheck(config: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let results = crate::selfcheck::run_all(config.seed);
    let mut text = String::new();
    for r in &results {
        text.push_str(&format!(
            "{} {}: max deviation {:.3e} (tolerance {:.0e})\n",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.max_deviation,
            r.tolerance
        ));
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("stdout: {e}")))?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Consistency(format!("failed checks: {}", failed.join(", "))))
    }
}

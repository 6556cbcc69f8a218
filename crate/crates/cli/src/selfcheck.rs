//! Deterministic consistency checks between the exact model, the MSE oracle and the closed forms.

use qstw_core::montecarlo::exact_mse_oracle;
use qstw_core::protocol::{
    couple_and_postselect, fourier_mub, pointer_observables, reconstruct, weak_value_from_device,
    weak_values_exact, CouplingStrengths,
};
use qstw_core::qmath::{hs_distance_sq, purity_stats, random_mixed, DensityMatrix};
use qstw_core::theory::{
    mse_hermitized, mse_hermitized_optimal, mse_raw, mse_raw_optimal, numeric_optimal_strengths,
    optimal_strengths, TheoryInput,
};
use qstw_core::{RandomStream, Result};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_deviation.is_finite() && self.max_deviation <= self.tolerance
    }
}

fn check(name: &'static str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> CheckResult {
    CheckResult {
        name,
        max_deviation: f().unwrap_or(f64::INFINITY),
        tolerance,
    }
}

fn random_state(d: usize, rng: &mut RandomStream) -> Result<DensityMatrix> {
    let rank = 1 + (rng.uniform() * d as f64) as usize % d;
    random_mixed(d, rank, rng)
}

fn random_strengths(rng: &mut RandomStream) -> Result<CouplingStrengths> {
    CouplingStrengths::new(0.1 + 2.9 * rng.uniform(), 0.1 + 2.9 * rng.uniform())
}

pub fn run_all(seed: u64) -> Vec<CheckResult> {
    vec![
        check("exact reconstruction", 1e-20, || {
            let mut rng = RandomStream::new(seed, 1);
            let mut worst = 0.0_f64;
            for d in 2..=8 {
                let bases = fourier_mub(d)?;
                for g in [0.1, 0.5, 1.0, 1.5, 2.5] {
                    let rho = random_state(d, &mut rng)?;
                    let r = reconstruct(&weak_values_exact(&rho, &bases, g)?, &bases)?;
                    worst = worst.max(hs_distance_sq(&r, rho.matrix())?);
                }
            }
            Ok(worst)
        }),
        check("pointer readout identity", 1e-10, || {
            let mut rng = RandomStream::new(seed, 2);
            let mut worst = 0.0_f64;
            for k in 0..200 {
                let d = 2 + k % 6;
                let rho = random_state(d, &mut rng)?;
                let bases = fourier_mub(d)?;
                let g = 0.05 + 2.95 * rng.uniform();
                let n = k % d;
                let ens = couple_and_postselect(&rho, n, g, &bases)?;
                let device = weak_value_from_device(&ens, &pointer_observables(g)?)?;
                let table = weak_values_exact(&rho, &bases, g)?;
                for (j, w) in device.iter().enumerate() {
                    if let (Some(a), Some(b)) = (w, table.weak_value(n, j)) {
                        worst = worst.max((a - b).norm());
                    }
                }
            }
            Ok(worst)
        }),
        check("numeric vs closed-form optimal strengths", 1e-6, || {
            let mut worst = 0.0_f64;
            for d in 2..=32 {
                let num = numeric_optimal_strengths(d)?;
                let closed = optimal_strengths(d)?;
                worst = worst
                    .max((num.g_r() - closed.g_r()).abs())
                    .max((num.g_i() - closed.g_i()).abs());
            }
            Ok(worst)
        }),
        check("optimal MSE substitution identities", 1e-12, || {
            let mut worst = 0.0_f64;
            for d in 2..=32 {
                let s = optimal_strengths(d)?;
                let p = qstw_core::qmath::PurityStats { purity: 0.8, purity_re: 0.6, purity_im: 0.2 };
                let input = TheoryInput::new(d, s, 1, p)?;
                let raw = mse_raw(&input)?;
                let herm = mse_hermitized(&input)?.total;
                worst = worst
                    .max((raw - mse_raw_optimal(d, 1, 0.8)).abs() / raw)
                    .max((herm - mse_hermitized_optimal(d, 1, 0.6, 0.2)).abs() / herm);
            }
            Ok(worst)
        }),
        check("exact oracle vs raw MSE formula", 1e-9, || {
            oracle_sweep(seed, 3, false)
        }),
        check("exact oracle vs hermitized MSE formula", 1e-9, || {
            oracle_sweep(seed, 4, true)
        }),
    ]
}

fn oracle_sweep(seed: u64, stream: u64, hermitized: bool) -> Result<f64> {
    let mut rng = RandomStream::new(seed, stream);
    let mut worst = 0.0_f64;
    for d in 2..=6 {
        for _ in 0..4 {
            let rho = random_state(d, &mut rng)?;
            let s = random_strengths(&mut rng)?;
            let input = TheoryInput::new(d, s, 1, purity_stats(&rho))?;
            let theory = if hermitized {
                mse_hermitized(&input)?.total
            } else {
                mse_raw(&input)?
            };
            let oracle = exact_mse_oracle(&rho, s, 1, hermitized)?;
            worst = worst.max((oracle - theory).abs());
        }
    }
    Ok(worst)
}

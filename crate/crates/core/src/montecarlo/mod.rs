//! Shot-level simulation of weak-value tomography.
//!
//! One measurement consumes one copy of the state in each of the 2d configurations
//! (basis index `n` × quadrature R/I). A shot samples the joint outcome of the post-selection
//! `j` and the pointer eigenvalue `λ_k`, so `N` measurements cost `2dN` copies. Per-`j` sums of
//! observed eigenvalues, divided by the full `N`, give unbiased estimates of
//! `P_j tr(ρ_d^{nj} σ)`, hence of `P_j W_nj`.

mod oracle;

use rayon::prelude::*;

pub use oracle::exact_mse_oracle;

use crate::protocol::{
    couple_and_postselect, fourier_mub, pointer_observables, CouplingStrengths, MeasurementBases,
};
use crate::qmath::{eig_hermitian_2x2, hs_distance_sq, ComplexMatrix, DensityMatrix, PurityStats};
use crate::theory::{mse_hermitized, mse_raw, TheoryInput};
use crate::{qmath, Complex64, Error, RandomStream, Result};

/// Negative probabilities above this are rounding noise and clamped to zero.
pub const CLAMP_SLACK: f64 = -1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrature {
    Real,
    Imag,
}

impl Quadrature {
    pub const BOTH: [Quadrature; 2] = [Quadrature::Real, Quadrature::Imag];

    fn index(self) -> usize {
        match self {
            Quadrature::Real => 0,
            Quadrature::Imag => 1,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Quadrature::Real => "R",
            Quadrature::Imag => "I",
        }
    }
}

/// Joint law of the post-selection outcome `j` and the pointer eigenvalue for one configuration.
///
/// Support is ordered `j` ascending, then eigenvalue index ascending.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    pub n: usize,
    pub quadrature: Quadrature,
    pub g: f64,
    pub support: Vec<(usize, usize)>,
    pub probabilities: Vec<f64>,
    pub values: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn dim(&self) -> usize {
        self.support.len() / 2
    }

    /// `(E[λ 1{j}], E[λ² 1{j}])` for every `j`.
    pub fn moments(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); self.dim()];
        for ((&(j, _), p), v) in self.support.iter().zip(&self.probabilities).zip(&self.values) {
            out[j].0 += p * v;
            out[j].1 += p * v * v;
        }
        out
    }
}

pub fn outcome_distribution(
    rho: &DensityMatrix,
    n: usize,
    quadrature: Quadrature,
    g: f64,
    bases: &MeasurementBases,
) -> Result<OutcomeDistribution> {
    let obs = pointer_observables(g)?;
    let sigma = match quadrature {
        Quadrature::Real => &obs.sigma_r,
        Quadrature::Imag => &obs.sigma_i,
    };
    let eig = eig_hermitian_2x2(sigma)?;
    let ens = couple_and_postselect(rho, n, g, bases)?;
    let d = rho.dim();
    let mut support = Vec::with_capacity(2 * d);
    let mut probabilities = Vec::with_capacity(2 * d);
    let mut values = Vec::with_capacity(2 * d);
    for (j, m) in ens.unnormalized.iter().enumerate() {
        for (k, (lambda, v)) in eig.values.iter().zip(&eig.vectors).enumerate() {
            let p = m.sandwich(v, v).re;
            if p < CLAMP_SLACK {
                return Err(Error::NegativeProbability { prob: p });
            }
            support.push((j, k));
            probabilities.push(p.max(0.0));
            values.push(*lambda);
        }
    }
    let total: f64 = probabilities.iter().sum();
    probabilities.iter_mut().for_each(|p| *p /= total);
    Ok(OutcomeDistribution {
        n,
        quadrature,
        g,
        support,
        probabilities,
        values,
    })
}

/// Running per-`j` sums of observed pointer eigenvalues for all 2d configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct SufficientStats {
    dim: usize,
    shots: usize,
    sums: Vec<f64>,
    counts: Vec<usize>,
}

impl SufficientStats {
    pub fn new(dim: usize, shots: usize) -> Self {
        Self {
            dim,
            shots,
            sums: vec![0.0; dim * 2 * dim],
            counts: vec![0; 2 * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    fn config(n: usize, q: Quadrature) -> usize {
        2 * n + q.index()
    }

    pub fn sum(&self, n: usize, q: Quadrature, j: usize) -> f64 {
        self.sums[Self::config(n, q) * self.dim + j]
    }

    pub fn count(&self, n: usize, q: Quadrature) -> usize {
        self.counts[Self::config(n, q)]
    }
}

/// Draws `shots` outcomes of `dist` by inverse CDF and adds them to `stats`.
pub fn sample_shots(
    dist: &OutcomeDistribution,
    shots: usize,
    rng: &mut RandomStream,
    stats: &mut SufficientStats,
) {
    let mut acc = 0.0;
    let cdf: Vec<f64> = dist
        .probabilities
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let last = dist.probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let config = SufficientStats::config(dist.n, dist.quadrature);
    let base = config * stats.dim;
    for _ in 0..shots {
        let u = rng.uniform();
        let k = cdf.partition_point(|&c| c <= u).min(last);
        stats.sums[base + dist.support[k].0] += dist.values[k];
    }
    stats.counts[config] += shots;
}

/// Estimates of `P_j W_nj` as a `d × d` table indexed `[n][j]`.
pub fn estimate_pw(stats: &SufficientStats, strengths: &CouplingStrengths) -> Result<ComplexMatrix> {
    let d = stats.dim;
    for n in 0..d {
        for q in Quadrature::BOTH {
            let got = stats.count(n, q);
            if got != stats.shots || got == 0 {
                return Err(Error::IncompleteStats {
                    n,
                    quadrature: q.label(),
                    got,
                    expected: stats.shots,
                });
            }
        }
    }
    let shots = stats.shots as f64;
    let (g_r, g_i) = (strengths.g_r(), strengths.g_i());
    Ok(ComplexMatrix::from_fn(d, d, |n, j| {
        let avg_r = stats.sum(n, Quadrature::Real, j) / shots;
        let avg_i = stats.sum(n, Quadrature::Imag, j) / shots;
        Complex64::new(-avg_r / (2.0 * g_r), avg_i / (2.0 * g_i))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateConfig {
    pub strengths: CouplingStrengths,
    pub shots: usize,
    pub seed: u64,
}

/// Raw linear estimate and its Hermitian symmetrization.
#[derive(Clone, Debug)]
pub struct TomographyEstimate {
    pub raw: ComplexMatrix,
    pub hermitized: ComplexMatrix,
    pub config: EstimateConfig,
}

pub fn assemble_estimate(pw: &ComplexMatrix, bases: &MeasurementBases, config: EstimateConfig) -> TomographyEstimate {
    let d = bases.dim();
    let raw = ComplexMatrix::from_fn(d, d, |n, m| {
        (0..d)
            .map(|j| bases.reconstruction_coefficient(j, n, m) * pw[(n, j)])
            .sum()
    });
    let hermitized = (&raw + &raw.adjoint()).scale_real(0.5);
    TomographyEstimate {
        raw,
        hermitized,
        config,
    }
}

/// A fixed state and strength pair with all 2d outcome distributions precomputed.
#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    rho: DensityMatrix,
    bases: MeasurementBases,
    strengths: CouplingStrengths,
    distributions: Vec<OutcomeDistribution>,
}

impl ExperimentPlan {
    pub fn new(rho: &DensityMatrix, strengths: CouplingStrengths) -> Result<Self> {
        let bases = fourier_mub(rho.dim())?;
        let mut distributions = Vec::with_capacity(2 * rho.dim());
        for n in 0..rho.dim() {
            for q in Quadrature::BOTH {
                let g = match q {
                    Quadrature::Real => strengths.g_r(),
                    Quadrature::Imag => strengths.g_i(),
                };
                distributions.push(outcome_distribution(rho, n, q, g, &bases)?);
            }
        }
        Ok(Self {
            rho: rho.clone(),
            bases,
            strengths,
            distributions,
        })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn bases(&self) -> &MeasurementBases {
        &self.bases
    }

    pub fn strengths(&self) -> CouplingStrengths {
        self.strengths
    }

    /// Distributions ordered by `n`, then R before I.
    pub fn distributions(&self) -> &[OutcomeDistribution] {
        &self.distributions
    }

    /// One full tomography run of `shots` measurements drawn from `rng`.
    pub fn simulate(&self, shots: usize, rng: &mut RandomStream) -> Result<TomographyEstimate> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut stats = SufficientStats::new(self.rho.dim(), shots);
        for dist in &self.distributions {
            sample_shots(dist, shots, rng, &mut stats);
        }
        let pw = estimate_pw(&stats, &self.strengths)?;
        let config = EstimateConfig {
            strengths: self.strengths,
            shots,
            seed: rng.seed(),
        };
        Ok(assemble_estimate(&pw, &self.bases, config))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MseReport {
    pub mse_raw_mean: f64,
    pub mse_raw_stderr: f64,
    pub mse_herm_mean: f64,
    pub mse_herm_stderr: f64,
    pub reps: usize,
    pub theory_raw: f64,
    pub theory_herm: f64,
}

/// Mean and standard error; the standard error is 0 for a single sample.
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Repeats the experiment `reps` times, rep `r` drawing from `RandomStream(seed, r)`.
pub fn run_experiment(
    rho: &DensityMatrix,
    strengths: CouplingStrengths,
    shots: usize,
    reps: usize,
    seed: u64,
) -> Result<MseReport> {
    let plan = ExperimentPlan::new(rho, strengths)?;
    run_plan(&plan, shots, reps, seed)
}

pub fn run_plan(plan: &ExperimentPlan, shots: usize, reps: usize, seed: u64) -> Result<MseReport> {
    if reps == 0 {
        return Err(Error::ZeroRepetitions);
    }
    let purity: PurityStats = qmath::purity_stats(&plan.rho);
    let theory = TheoryInput::new(plan.rho.dim(), plan.strengths, shots, purity)?;
    let errors: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomStream::new(seed, r as u64);
            let est = plan.simulate(shots, &mut rng)?;
            let truth = plan.rho.matrix();
            Ok((hs_distance_sq(&est.raw, truth)?, hs_distance_sq(&est.hermitized, truth)?))
        })
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = errors.iter().map(|e| e.0).collect();
    let herm: Vec<f64> = errors.iter().map(|e| e.1).collect();
    let (mse_raw_mean, mse_raw_stderr) = mean_stderr(&raw);
    let (mse_herm_mean, mse_herm_stderr) = mean_stderr(&herm);
    Ok(MseReport {
        mse_raw_mean,
        mse_raw_stderr,
        mse_herm_mean,
        mse_herm_stderr,
        reps,
        theory_raw: mse_raw(&theory)?,
        theory_herm: mse_hermitized(&theory)?.total,
    })
}

#[cfg(test)]
mod tests;

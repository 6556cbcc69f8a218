//! Exact MSE of the shot-level estimator from first and second moments, no sampling.
//!
//! Every real coordinate of the estimate (real and imaginary part of each matrix element) is a
//! linear functional of the per-configuration averages `X_{c,j} = (1/N) Σ_shots λ 1{j}`.
//! Configurations are independent, and within one configuration a shot lands on a single `j`,
//! so
//!
//! ```text
//! Cov(X_{c,j}, X_{c,j'}) = (δ_{jj'} s_j - μ_j μ_{j'}) / N
//! ```
//!
//! with `μ_j = E[λ 1{j}]` and `s_j = E[λ² 1{j}]`. The MSE is the sum of coordinate variances
//! plus squared biases.

use std::collections::BTreeMap;

use super::{ExperimentPlan, Quadrature};
use crate::protocol::CouplingStrengths;
use crate::qmath::DensityMatrix;
use crate::{Complex64, Error, Result};

/// Coefficients of one real output coordinate, keyed by configuration index `2n + q`.
type Functional = BTreeMap<usize, Vec<f64>>;

fn add_scaled(target: &mut Functional, source: &Functional, scale: f64) {
    for (&c, coeffs) in source {
        let block = target.entry(c).or_insert_with(|| vec![0.0; coeffs.len()]);
        for (t, s) in block.iter_mut().zip(coeffs) {
            *t += scale * s;
        }
    }
}

/// Real and imaginary parts of the raw element `(n, m)` as functionals.
fn raw_element(plan: &ExperimentPlan, n: usize, m: usize) -> (Functional, Functional) {
    let d = plan.rho.dim();
    let alpha_r = -1.0 / (2.0 * plan.strengths.g_r());
    let alpha_i = 1.0 / (2.0 * plan.strengths.g_i());
    let mut re_r = vec![0.0; d];
    let mut re_i = vec![0.0; d];
    let mut im_r = vec![0.0; d];
    let mut im_i = vec![0.0; d];
    for j in 0..d {
        // raw_nm = Σ_j c_j (α_R X_R,j + i α_I X_I,j)
        let c: Complex64 = plan.bases.reconstruction_coefficient(j, n, m);
        re_r[j] = c.re * alpha_r;
        re_i[j] = -c.im * alpha_i;
        im_r[j] = c.im * alpha_r;
        im_i[j] = c.re * alpha_i;
    }
    let (cr, ci) = (2 * n, 2 * n + 1);
    (
        BTreeMap::from([(cr, re_r), (ci, re_i)]),
        BTreeMap::from([(cr, im_r), (ci, im_i)]),
    )
}

/// Exact `E ||ρ̂ - ρ||²_HS` for `shots` measurements, raw or Hermitian-symmetrized.
pub fn exact_mse_oracle(
    rho: &DensityMatrix,
    strengths: CouplingStrengths,
    shots: usize,
    hermitized: bool,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let plan = ExperimentPlan::new(rho, strengths)?;
    let d = rho.dim();
    let moments: Vec<Vec<(f64, f64)>> = plan.distributions.iter().map(|dist| dist.moments()).collect();
    debug_assert!(plan
        .distributions
        .iter()
        .enumerate()
        .all(|(c, dist)| c == 2 * dist.n + usize::from(dist.quadrature == Quadrature::Imag)));

    let mut coordinates: Vec<(Functional, f64)> = Vec::with_capacity(2 * d * d);
    for n in 0..d {
        for m in 0..d {
            let truth = rho.matrix()[(n, m)];
            let (re, im) = if hermitized {
                let (re_nm, im_nm) = raw_element(&plan, n, m);
                let (re_mn, im_mn) = raw_element(&plan, m, n);
                let mut re = Functional::new();
                add_scaled(&mut re, &re_nm, 0.5);
                add_scaled(&mut re, &re_mn, 0.5);
                let mut im = Functional::new();
                add_scaled(&mut im, &im_nm, 0.5);
                add_scaled(&mut im, &im_mn, -0.5);
                (re, im)
            } else {
                raw_element(&plan, n, m)
            };
            coordinates.push((re, truth.re));
            coordinates.push((im, truth.im));
        }
    }

    let inv_n = 1.0 / shots as f64;
    let mut total = 0.0;
    for (functional, truth) in &coordinates {
        let mut mean = 0.0;
        let mut variance = 0.0;
        for (&c, a) in functional {
            let (mut linear, mut quadratic) = (0.0, 0.0);
            for (aj, &(mu, second)) in a.iter().zip(&moments[c]) {
                linear += aj * mu;
                quadratic += aj * aj * second;
            }
            mean += linear;
            variance += (quadratic - linear * linear) * inv_n;
        }
        total += variance + (mean - truth).powi(2);
    }
    Ok(total)
}

use std::f64::consts::FRAC_PI_2;

use super::*;
use crate::protocol::{weak_values_exact, CouplingStrengths};
use crate::qmath::{random_mixed, random_pure, DensityMatrix};
use crate::theory::optimal_strengths;

fn strengths(g_r: f64, g_i: f64) -> CouplingStrengths {
    CouplingStrengths::new(g_r, g_i).unwrap()
}

#[test]
fn distributions_normalized() {
    let mut rng = RandomStream::new(100, 0);
    for trial in 0..100 {
        let d = 2 + trial % 5;
        let rho = random_mixed(d, 1 + trial % d, &mut rng).unwrap();
        let bases = fourier_mub(d).unwrap();
        let g = 0.05 + 3.0 * rng.uniform();
        let q = Quadrature::BOTH[trial % 2];
        let dist = outcome_distribution(&rho, trial % d, q, g, &bases).unwrap();
        assert_eq!(dist.support.len(), 2 * d);
        assert!((dist.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(dist.probabilities.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}

#[test]
fn maximally_mixed_marginal_uniform() {
    let d = 4;
    let rho = DensityMatrix::maximally_mixed(d).unwrap();
    let dist = outcome_distribution(&rho, 2, Quadrature::Real, 0.9, &fourier_mub(d).unwrap()).unwrap();
    for j in 0..d {
        let pj: f64 = dist
            .support
            .iter()
            .zip(&dist.probabilities)
            .filter(|((jj, _), _)| *jj == j)
            .map(|(_, p)| p)
            .sum();
        assert!((pj - 0.25).abs() < 1e-12);
    }
}

#[test]
fn expectation_identity() {
    let mut rng = RandomStream::new(101, 0);
    let d = 3;
    let rho = random_mixed(d, 2, &mut rng).unwrap();
    let bases = fourier_mub(d).unwrap();
    for (q, g) in [(Quadrature::Real, 1.2), (Quadrature::Imag, 0.4)] {
        let obs = pointer_observables(g).unwrap();
        let sigma = if q == Quadrature::Real { &obs.sigma_r } else { &obs.sigma_i };
        let ens = couple_and_postselect(&rho, 1, g, &bases).unwrap();
        let dist = outcome_distribution(&rho, 1, q, g, &bases).unwrap();
        for (j, (mean, _)) in dist.moments().into_iter().enumerate() {
            let direct = ens.probs[j] * (ens.device_states[j].as_ref().unwrap() * sigma).trace().re;
            assert!((mean - direct).abs() < 1e-10);
        }
    }
}

#[test]
fn sampling_matches_expectation() {
    let mut rng = RandomStream::new(102, 0);
    let d = 3;
    let rho = random_pure(d, &mut rng).unwrap();
    let bases = fourier_mub(d).unwrap();
    let dist = outcome_distribution(&rho, 0, Quadrature::Real, 1.0, &bases).unwrap();
    let shots = 1_000_000;
    let mut stats = SufficientStats::new(d, shots);
    sample_shots(&dist, shots, &mut RandomStream::new(102, 1), &mut stats);
    for (j, (mu, second)) in dist.moments().into_iter().enumerate() {
        let empirical = stats.sum(0, Quadrature::Real, j) / shots as f64;
        let stderr = ((second - mu * mu) / shots as f64).sqrt();
        assert!((empirical - mu).abs() < 5.0 * stderr, "j={j}: {empirical} vs {mu} ± {stderr}");
    }
    assert_eq!(stats.count(0, Quadrature::Real), shots);
}

#[test]
fn sampling_deterministic() {
    let rho = DensityMatrix::maximally_mixed(3).unwrap();
    let dist = outcome_distribution(&rho, 1, Quadrature::Imag, 1.0, &fourier_mub(3).unwrap()).unwrap();
    let run = || {
        let mut stats = SufficientStats::new(3, 500);
        sample_shots(&dist, 500, &mut RandomStream::new(9, 9), &mut stats);
        stats
    };
    assert_eq!(run(), run());
}

#[test]
fn concentrated_distribution() {
    let dist = OutcomeDistribution {
        n: 0,
        quadrature: Quadrature::Real,
        g: 1.0,
        support: vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        probabilities: vec![0.0, 0.0, 1.0, 0.0],
        values: vec![-2.0, 3.0, -0.75, 1.5],
    };
    let mut stats = SufficientStats::new(2, 1000);
    sample_shots(&dist, 1000, &mut RandomStream::new(1, 0), &mut stats);
    assert_eq!(stats.sum(0, Quadrature::Real, 1), -750.0);
    assert_eq!(stats.sum(0, Quadrature::Real, 0), 0.0);
}

#[test]
fn estimate_pw_requires_all_configs() {
    let mut stats = SufficientStats::new(2, 10);
    let rho = DensityMatrix::maximally_mixed(2).unwrap();
    let dist = outcome_distribution(&rho, 0, Quadrature::Real, 1.0, &fourier_mub(2).unwrap()).unwrap();
    sample_shots(&dist, 10, &mut RandomStream::new(0, 0), &mut stats);
    assert!(matches!(
        estimate_pw(&stats, &strengths(1.0, 1.0)),
        Err(Error::IncompleteStats { n: 0, quadrature: "I", got: 0, expected: 10 })
    ));
}

/// Replaces sampled averages with exact expectations.
fn exact_pw(plan: &ExperimentPlan) -> ComplexMatrix {
    let d = plan.rho().dim();
    let s = plan.strengths();
    let mut pw = ComplexMatrix::zeros(d, d);
    for dist in plan.distributions() {
        for (j, (mu, _)) in dist.moments().into_iter().enumerate() {
            match dist.quadrature {
                Quadrature::Real => pw[(dist.n, j)].re = -mu / (2.0 * s.g_r()),
                Quadrature::Imag => pw[(dist.n, j)].im = mu / (2.0 * s.g_i()),
            }
        }
    }
    pw
}

#[test]
fn exact_expectations_give_pw_and_rho() {
    let mut rng = RandomStream::new(103, 0);
    for d in 2..=6 {
        let rho = random_mixed(d, d, &mut rng).unwrap();
        let s = strengths(0.3 + 0.4 * d as f64, 1.7);
        let plan = ExperimentPlan::new(&rho, s).unwrap();
        let pw = exact_pw(&plan);
        // compare against P_j W_nj from the exact weak values, at each quadrature's strength
        let table_r = weak_values_exact(&rho, plan.bases(), s.g_r()).unwrap();
        let table_i = weak_values_exact(&rho, plan.bases(), s.g_i()).unwrap();
        for n in 0..d {
            for j in 0..d {
                let re = (table_r.weak_value(n, j).unwrap() * table_r.prob(n, j)).re;
                let im = (table_i.weak_value(n, j).unwrap() * table_i.prob(n, j)).im;
                assert!((pw[(n, j)] - Complex64::new(re, im)).norm() < 1e-10);
            }
        }
        let config = EstimateConfig { strengths: s, shots: 1, seed: 0 };
        let est = assemble_estimate(&pw, plan.bases(), config);
        assert!(est.raw.max_abs_diff(rho.matrix()) < 1e-10);
    }
}

#[test]
fn hermitization_properties() {
    let rho = random_pure(3, &mut RandomStream::new(104, 0)).unwrap();
    let plan = ExperimentPlan::new(&rho, strengths(1.0, FRAC_PI_2)).unwrap();
    let est = plan.simulate(20, &mut RandomStream::new(104, 1)).unwrap();
    assert_eq!(est.hermitized, (&est.raw + &est.raw.adjoint()).scale_real(0.5));
    for n in 0..3 {
        assert_eq!(est.hermitized[(n, n)].im, 0.0);
        assert_eq!(est.hermitized[(n, n)].re, est.raw[(n, n)].re);
    }
    // already Hermitian input passes through
    let config = EstimateConfig { strengths: plan.strengths(), shots: 1, seed: 0 };
    let exact = assemble_estimate(&exact_pw(&plan), plan.bases(), config);
    assert!(exact.hermitized.max_abs_diff(&exact.raw) < 1e-12);
}

#[test]
fn zero_hits_on_j_give_zero_estimate() {
    let d = 2;
    let mut stats = SufficientStats::new(d, 5);
    let dist = |n, quadrature| OutcomeDistribution {
        n,
        quadrature,
        g: 1.0,
        support: vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        probabilities: vec![0.5, 0.5, 0.0, 0.0],
        values: vec![-1.0, 1.0, -1.0, 1.0],
    };
    for n in 0..d {
        for q in Quadrature::BOTH {
            sample_shots(&dist(n, q), 5, &mut RandomStream::new(3, 0), &mut stats);
        }
    }
    let pw = estimate_pw(&stats, &strengths(1.0, 1.0)).unwrap();
    for n in 0..d {
        assert_eq!(pw[(n, 1)], Complex64::new(0.0, 0.0));
    }
}

#[test]
fn unbiased_pw_estimates() {
    let d = 3;
    let shots = 50;
    let reps = 10_000;
    let rho = random_mixed(d, 2, &mut RandomStream::new(105, 0)).unwrap();
    let s = strengths(1.1, 1.4);
    let plan = ExperimentPlan::new(&rho, s).unwrap();
    let truth = exact_pw(&plan);
    let mut sum = vec![Complex64::new(0.0, 0.0); d * d];
    let mut sum_sq = vec![(0.0, 0.0); d * d];
    for r in 0..reps {
        let mut rng = RandomStream::new(105, 1 + r as u64);
        let mut stats = SufficientStats::new(d, shots);
        for dist in plan.distributions() {
            sample_shots(dist, shots, &mut rng, &mut stats);
        }
        let pw = estimate_pw(&stats, &s).unwrap();
        for (k, z) in pw.entries().iter().enumerate() {
            sum[k] += z;
            sum_sq[k].0 += z.re * z.re;
            sum_sq[k].1 += z.im * z.im;
        }
    }
    let r = reps as f64;
    for k in 0..d * d {
        let mean = sum[k] / r;
        let se_re = ((sum_sq[k].0 / r - mean.re * mean.re) / r).sqrt();
        let se_im = ((sum_sq[k].1 / r - mean.im * mean.im) / r).sqrt();
        let t = truth.entries()[k];
        assert!((mean.re - t.re).abs() <= 4.0 * se_re, "entry {k} re");
        assert!((mean.im - t.im).abs() <= 4.0 * se_im, "entry {k} im");
    }
}

#[test]
fn oracle_raw_matches_closed_form() {
    let mut rng = RandomStream::new(106, 0);
    for d in 2..=5 {
        let rho = random_mixed(d, 1 + d / 2, &mut rng).unwrap();
        let s = strengths(0.2 + 2.5 * rng.uniform(), 0.2 + 2.5 * rng.uniform());
        let oracle = exact_mse_oracle(&rho, s, 7, false).unwrap();
        let theory = mse_raw(&TheoryInput::new(d, s, 7, qmath::purity_stats(&rho)).unwrap()).unwrap();
        assert!((oracle - theory).abs() < 1e-9, "d={d}: {oracle} vs {theory}");
    }
}

#[test]
fn oracle_hermitized_closed_form_derivation() {
    // Exact hermitized variance derived from the per-element moments:
    // (1/N)[d(d+1)/(8 sin²g_R) + d(d-1)/(8 sin²g_I) + (d+1)/(4cos²(g_R/2)) - tr ρ²/2 - Σ ρ_nn²/2]
    let mut rng = RandomStream::new(107, 0);
    for d in 2..=6 {
        let rho = random_mixed(d, d, &mut rng).unwrap();
        let (g_r, g_i) = (0.3 + 2.5 * rng.uniform(), 0.3 + 2.5 * rng.uniform());
        let shots = 11;
        let oracle = exact_mse_oracle(&rho, strengths(g_r, g_i), shots, true).unwrap();
        let df = d as f64;
        let p = qmath::purity_stats(&rho).purity;
        let diag_sq: f64 = (0..d).map(|n| rho.population(n).powi(2)).sum();
        let want = (df * (df + 1.0) / (8.0 * g_r.sin().powi(2))
            + df * (df - 1.0) / (8.0 * g_i.sin().powi(2))
            + (df + 1.0) / (4.0 * (g_r / 2.0).cos().powi(2))
            - p / 2.0
            - diag_sq / 2.0)
            / shots as f64;
        assert!((oracle - want).abs() < 1e-9, "d={d}: {oracle} vs {want}");
    }
}

#[test]
fn oracle_scales_with_shots() {
    let rho = random_pure(4, &mut RandomStream::new(108, 0)).unwrap();
    let s = optimal_strengths(4).unwrap();
    for herm in [false, true] {
        let a = exact_mse_oracle(&rho, s, 30, herm).unwrap();
        let b = exact_mse_oracle(&rho, s, 60, herm).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }
}

#[test]
fn run_experiment_reproducible() {
    let rho = random_pure(3, &mut RandomStream::new(109, 0)).unwrap();
    let s = optimal_strengths(3).unwrap();
    let a = run_experiment(&rho, s, 40, 1, 5).unwrap();
    let b = run_experiment(&rho, s, 40, 1, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.reps, 1);
    let c = run_experiment(&rho, s, 40, 64, 5).unwrap();
    let e = run_experiment(&rho, s, 40, 64, 5).unwrap();
    assert_eq!(c.mse_raw_mean.to_bits(), e.mse_raw_mean.to_bits());
    assert_eq!(c.mse_herm_stderr.to_bits(), e.mse_herm_stderr.to_bits());
}

#[test]
fn run_experiment_rejects_zero_reps() {
    let rho = DensityMatrix::maximally_mixed(2).unwrap();
    assert_eq!(
        run_experiment(&rho, strengths(1.0, 1.0), 10, 0, 0).unwrap_err(),
        Error::ZeroRepetitions
    );
}

#[test]
fn mse_scales_inverse_shots() {
    let rho = random_pure(3, &mut RandomStream::new(110, 0)).unwrap();
    let s = optimal_strengths(3).unwrap();
    let scaled: Vec<(f64, f64)> = [50usize, 100, 200]
        .iter()
        .map(|&n| {
            let r = run_experiment(&rho, s, n, 2000, 110).unwrap();
            (r.mse_raw_mean * n as f64, r.mse_raw_stderr * n as f64)
        })
        .collect();
    for w in scaled.windows(2) {
        let (a, sa) = w[0];
        let (b, sb) = w[1];
        assert!((a - b).abs() <= 3.0 * sa.hypot(sb), "{a} vs {b}");
    }
}

//! Closed-form mean-square error of weak-value tomography.
//!
//! For `N` measurements (each consuming one copy per configuration, 2d configurations in all)
//! the raw linear estimator has
//!
//! ```text
//! E = (1/N) [ d²/4 (1/sin²g_R + 1/sin²g_I) + d/(2cos²(g_R/2)) - tr ρ² ]
//! ```
//!
//! minimized at `g_I = π/2` and `cos g_R = 1 + d/4 - √(d/2 + d²/16)`. The Hermitian
//! symmetrization `(ρ̂ + ρ̂†)/2` has its own expressions, split into off-diagonal and diagonal
//! contributions. These are evaluated as stated by the derivation; the exact second-moment
//! oracle in [`crate::montecarlo`] is the independent arbiter of their accuracy.

mod optimize;

use std::f64::consts::{FRAC_PI_2, PI};

pub use optimize::{golden_section, grid_then_golden};

use crate::protocol::{check_strength, CouplingStrengths};
use crate::qmath::PurityStats;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct TheoryInput {
    pub dim: usize,
    pub strengths: CouplingStrengths,
    pub shots: usize,
    pub purity: PurityStats,
}

impl TheoryInput {
    pub fn new(dim: usize, strengths: CouplingStrengths, shots: usize, purity: PurityStats) -> Result<Self> {
        check_dim(dim)?;
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(Self {
            dim,
            strengths,
            shots,
            purity,
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    Ok(())
}

/// `g_R`-dependent part of the raw MSE bracket: `d²/(4 sin²g) + d/(2cos²(g/2))`.
pub fn real_quadrature_cost(dim: usize, g: f64) -> f64 {
    let d = dim as f64;
    d * d / (4.0 * g.sin().powi(2)) + d / (2.0 * (g / 2.0).cos().powi(2))
}

/// `g_I`-dependent part of the raw MSE bracket: `d²/(4 sin²g)`.
pub fn imag_quadrature_cost(dim: usize, g: f64) -> f64 {
    let d = dim as f64;
    d * d / (4.0 * g.sin().powi(2))
}

fn checked_costs(input: &TheoryInput) -> Result<(f64, f64)> {
    let (g_r, g_i) = (input.strengths.g_r(), input.strengths.g_i());
    check_strength(g_r)?;
    check_strength(g_i)?;
    Ok((real_quadrature_cost(input.dim, g_r), imag_quadrature_cost(input.dim, g_i)))
}

pub fn mse_raw(input: &TheoryInput) -> Result<f64> {
    let (real, imag) = checked_costs(input)?;
    Ok((real + imag - input.purity.purity) / input.shots as f64)
}

/// `√(d/2 + d²/16)`, recurring in the optimum.
fn optimum_root(d: f64) -> f64 {
    (d / 2.0 + d * d / 16.0).sqrt()
}

pub fn optimal_strengths(dim: usize) -> Result<CouplingStrengths> {
    check_dim(dim)?;
    let d = dim as f64;
    let cos_g = 1.0 + d / 4.0 - optimum_root(d);
    debug_assert!(cos_g > -1.0 && cos_g < 1.0);
    CouplingStrengths::new(cos_g.acos(), FRAC_PI_2)
}

/// Raw MSE at the optimal strengths.
pub fn mse_raw_optimal(dim: usize, shots: usize, purity: f64) -> f64 {
    let d = dim as f64;
    (3.0 * d * d / 8.0 + d / 2.0 * (optimum_root(d) + 1.0) - purity) / shots as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitizedMse {
    pub off_diagonal: f64,
    pub diagonal: f64,
    pub total: f64,
}

pub fn mse_hermitized(input: &TheoryInput) -> Result<HermitizedMse> {
    let (real, imag) = checked_costs(input)?;
    let d = input.dim as f64;
    let n = input.shots as f64;
    let off_diagonal = (d - 1.0) / (2.0 * n * d) * (real + imag - input.purity.purity);
    let diagonal = (real - input.purity.purity_re) / (n * d);
    Ok(HermitizedMse {
        off_diagonal,
        diagonal,
        total: off_diagonal + diagonal,
    })
}

/// Hermitized MSE at the optimal strengths.
pub fn mse_hermitized_optimal(dim: usize, shots: usize, purity_re: f64, purity_im: f64) -> f64 {
    let d = dim as f64;
    let n = shots as f64;
    (d + 1.0) / (2.0 * d * n) * (d * d / 8.0 + d / 2.0 * (optimum_root(d) + 1.0) - purity_re)
        + (d - 1.0) / (2.0 * d * n) * (d * d / 4.0 - purity_im)
}

/// Efficiency figures compared across tomography schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `N · E_o`, raw estimator at the optimum.
    QstwRawScaledByN,
    /// Large-d approximation of `N · E'_o`.
    QstwHermitizedScaledByN,
    /// `N · E'_o` without the large-d approximation.
    QstwHermitizedScaledByNExact,
    /// Large-d approximation of `2dN · E'_o`, scaled by consumed copies.
    QstwScaledByCopies,
    Mub,
    Sic,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::QstwRawScaledByN,
        Scheme::QstwHermitizedScaledByN,
        Scheme::QstwHermitizedScaledByNExact,
        Scheme::QstwScaledByCopies,
        Scheme::Mub,
        Scheme::Sic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::QstwRawScaledByN => "qstw_raw_scaled_by_n",
            Scheme::QstwHermitizedScaledByN => "qstw_herm_scaled_by_n",
            Scheme::QstwHermitizedScaledByNExact => "qstw_herm_scaled_by_n_exact",
            Scheme::QstwScaledByCopies => "qstw_scaled_by_copies",
            Scheme::Mub => "mub",
            Scheme::Sic => "sic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonRow {
    pub dim: usize,
    pub scheme: Scheme,
    pub scaled_mse: f64,
}

/// Scaled MSE (`N · E`) of every scheme in [`Scheme::ALL`] order.
pub fn scaled_mse_menu(dim: usize, purity: &PurityStats) -> Result<Vec<ComparisonRow>> {
    check_dim(dim)?;
    let d = dim as f64;
    let p = purity.purity;
    let bracket = 3.0 * d * d / 8.0 + d / 2.0 * (optimum_root(d) + 1.0) - p;
    let value = |scheme| match scheme {
        Scheme::QstwRawScaledByN => mse_raw_optimal(dim, 1, p),
        Scheme::QstwHermitizedScaledByN => bracket / 2.0,
        Scheme::QstwHermitizedScaledByNExact => mse_hermitized_optimal(dim, 1, purity.purity_re, purity.purity_im),
        Scheme::QstwScaledByCopies => d * bracket,
        Scheme::Mub => (d + 1.0) * (d - p),
        Scheme::Sic => d * d + d - 1.0 - p,
    };
    Ok(Scheme::ALL
        .iter()
        .map(|&scheme| ComparisonRow {
            dim,
            scheme,
            scaled_mse: value(scheme),
        })
        .collect())
}

const GRID_EDGE: f64 = 0.01;
const GRID_STEPS: usize = 315;
const GOLDEN_TOL: f64 = 1e-10;

/// Minimizes the two strength-dependent parts of the raw MSE numerically.
pub fn numeric_optimal_strengths(dim: usize) -> Result<CouplingStrengths> {
    check_dim(dim)?;
    let (lo, hi) = (GRID_EDGE, PI - GRID_EDGE);
    let g_r = grid_then_golden(|g| real_quadrature_cost(dim, g), lo, hi, GRID_STEPS, GOLDEN_TOL);
    let g_i = grid_then_golden(|g| imag_quadrature_cost(dim, g), lo, hi, GRID_STEPS, GOLDEN_TOL);
    CouplingStrengths::new(g_r, g_i)
}

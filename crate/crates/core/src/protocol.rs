//! Exact forward model of weak-value tomography.
//!
//! For each basis index `n` the system is coupled to a qubit pointer prepared in `|0⟩` by
//! `U_n = exp(-i g |a_n⟩⟨a_n| ⊗ σ_x)`, then projected onto the Fourier basis `{|ψ_j⟩}`. The
//! post-selected pointer states carry the weak values
//! `W_nj = ⟨ψ_j|a_n⟩⟨a_n|ρ|ψ_j⟩ / P_j` in the expectations of two pointer observables, and the
//! density matrix follows linearly from the table of weak values.
//!
//! `P_j` is always the post-selection probability *with* the coupling switched on. That is the
//! normalization under which the pointer readout reproduces the weak value exactly.

use std::f64::consts::PI;

use crate::qmath::{sigma_x, sigma_y, sigma_z, ComplexMatrix, DensityMatrix};
use crate::{Complex64, Error, Result};

/// Post-selection probabilities at or below this are treated as "never happens".
pub const NEGLIGIBLE_PROB: f64 = 1e-12;
/// Guard on `|sin g|` and `|cos(g/2)|`.
pub const STRENGTH_GUARD: f64 = 1e-9;

/// Computational basis `{|a_n⟩}` and the Fourier basis `{|ψ_j⟩}` with
/// `⟨ψ_j|a_n⟩ = exp(2πi jn/d)/√d`.
#[derive(Clone, Debug)]
pub struct MeasurementBases {
    dim: usize,
    a_basis: Vec<Vec<Complex64>>,
    psi_basis: Vec<Vec<Complex64>>,
}

impl MeasurementBases {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a_basis(&self) -> &[Vec<Complex64>] {
        &self.a_basis
    }

    pub fn psi_basis(&self) -> &[Vec<Complex64>] {
        &self.psi_basis
    }

    /// `⟨ψ_j|a_n⟩`.
    pub fn overlap(&self, j: usize, n: usize) -> Complex64 {
        inner(&self.psi_basis[j], &self.a_basis[n])
    }

    /// Coefficient `⟨ψ_j|a_m⟩ / ⟨ψ_j|a_n⟩` linking `P_j W_nj` to `ρ_nm`.
    pub fn reconstruction_coefficient(&self, j: usize, n: usize, m: usize) -> Complex64 {
        self.overlap(j, m) / self.overlap(j, n)
    }
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn fourier_mub(dim: usize) -> Result<MeasurementBases> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let a_basis = (0..dim)
        .map(|n| (0..dim).map(|k| if k == n { one } else { zero }).collect())
        .collect();
    let norm = 1.0 / (dim as f64).sqrt();
    // ⟨a_n|ψ_j⟩ = conj(⟨ψ_j|a_n⟩) = exp(-2πi jn/d)/√d; reduce jn mod d to keep the phase small
    let psi_basis = (0..dim)
        .map(|j| {
            (0..dim)
                .map(|n| Complex64::from_polar(norm, -2.0 * PI * ((j * n) % dim) as f64 / dim as f64))
                .collect()
        })
        .collect();
    Ok(MeasurementBases {
        dim,
        a_basis,
        psi_basis,
    })
}

/// Coupling strengths for the real (`g_r`) and imaginary (`g_i`) quadratures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingStrengths {
    g_r: f64,
    g_i: f64,
}

impl CouplingStrengths {
    pub fn new(g_r: f64, g_i: f64) -> Result<Self> {
        check_strength(g_r)?;
        check_strength(g_i)?;
        Ok(Self { g_r, g_i })
    }

    pub fn g_r(&self) -> f64 {
        self.g_r
    }

    pub fn g_i(&self) -> f64 {
        self.g_i
    }
}

pub(crate) fn check_strength(g: f64) -> Result<()> {
    let ok = g.is_finite()
        && g > 0.0
        && g < PI
        && g.sin().abs() >= STRENGTH_GUARD
        && (g / 2.0).cos().abs() >= STRENGTH_GUARD;
    if ok {
        Ok(())
    } else {
        Err(Error::StrengthOutOfRange { g })
    }
}

/// `U_n = (I - P_n) ⊗ I₂ + P_n ⊗ (cos g I₂ - i sin g σ_x)`, system ⊗ device ordering.
pub fn coupling_unitary(n: usize, g: f64, dim: usize) -> Result<ComplexMatrix> {
    if n >= dim {
        return Err(Error::IndexOutOfRange { index: n, dim });
    }
    let mut projector = ComplexMatrix::zeros(dim, dim);
    projector[(n, n)] = Complex64::new(1.0, 0.0);
    let mut complement = ComplexMatrix::identity(dim);
    complement[(n, n)] = Complex64::new(0.0, 0.0);
    let rotation = &ComplexMatrix::identity(2).scale_real(g.cos())
        - &sigma_x().scale(Complex64::new(0.0, g.sin()));
    Ok(&complement.kron(&ComplexMatrix::identity(2)) + &projector.kron(&rotation))
}

/// The two pointer observables whose expectations give the real and imaginary weak-value parts.
#[derive(Clone, Debug)]
pub struct PointerObservables {
    pub sigma_r: ComplexMatrix,
    pub sigma_i: ComplexMatrix,
    pub g: f64,
}

/// `σ_R = (g/sin g)[σ_y - tan(g/2)(I - σ_z)]`, `σ_I = (g/sin g) σ_x`.
pub fn pointer_observables(g: f64) -> Result<PointerObservables> {
    check_strength(g)?;
    let prefactor = g / g.sin();
    let i_minus_z = &ComplexMatrix::identity(2) - &sigma_z();
    let sigma_r = (&sigma_y() - &i_minus_z.scale_real((g / 2.0).tan())).scale_real(prefactor);
    let sigma_i = sigma_x().scale_real(prefactor);
    Ok(PointerObservables {
        sigma_r,
        sigma_i,
        g,
    })
}

/// Pointer states conditioned on each post-selection outcome `j`, for one basis index `n`.
#[derive(Clone, Debug)]
pub struct ConditionalDeviceEnsemble {
    pub n: usize,
    pub g: f64,
    /// `P_j`, clamped at zero.
    pub probs: Vec<f64>,
    /// `M_j = ⟨ψ_j|U_n(ρ ⊗ |0⟩⟨0|)U_n†|ψ_j⟩`, with `tr M_j = P_j`.
    pub unnormalized: Vec<ComplexMatrix>,
    /// `M_j / P_j`, absent when `P_j` is negligible.
    pub device_states: Vec<Option<ComplexMatrix>>,
}

/// Joint system ⊗ pointer state after the coupling.
fn coupled_state(rho: &DensityMatrix, n: usize, g: f64) -> Result<ComplexMatrix> {
    let d = rho.dim();
    let u = coupling_unitary(n, g, d)?;
    let pointer = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let joint = rho.matrix().kron(&pointer);
    Ok(&(&u * &joint) * &u.adjoint())
}

pub fn couple_and_postselect(
    rho: &DensityMatrix,
    n: usize,
    g: f64,
    bases: &MeasurementBases,
) -> Result<ConditionalDeviceEnsemble> {
    let d = rho.dim();
    if bases.dim() != d {
        return Err(Error::ShapeMismatch {
            left_rows: d,
            left_cols: d,
            right_rows: bases.dim(),
            right_cols: bases.dim(),
        });
    }
    let joint = coupled_state(rho, n, g)?;
    let mut probs = Vec::with_capacity(d);
    let mut unnormalized = Vec::with_capacity(d);
    let mut device_states = Vec::with_capacity(d);
    for psi in bases.psi_basis() {
        // partial inner product over the system index
        let m = ComplexMatrix::from_fn(2, 2, |k, l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..d {
                for t in 0..d {
                    acc += psi[s].conj() * joint[(2 * s + k, 2 * t + l)] * psi[t];
                }
            }
            acc
        });
        let p = m.trace().re.max(0.0);
        device_states.push((p > NEGLIGIBLE_PROB).then(|| m.scale_real(1.0 / p)));
        probs.push(p);
        unnormalized.push(m);
    }
    Ok(ConditionalDeviceEnsemble {
        n,
        g,
        probs,
        unnormalized,
        device_states,
    })
}

/// Table of weak values `W_nj` and the post-selection probabilities `P_j(n)` they were
/// conditioned on.
#[derive(Clone, Debug)]
pub struct WeakValueTable {
    dim: usize,
    entries: Vec<Option<Complex64>>,
    probs: Vec<f64>,
}

impl WeakValueTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `W_nj`, `None` when `P_j(n)` is negligible.
    pub fn weak_value(&self, n: usize, j: usize) -> Option<Complex64> {
        self.entries[n * self.dim + j]
    }

    pub fn prob(&self, n: usize, j: usize) -> f64 {
        self.probs[n * self.dim + j]
    }
}

pub fn weak_values_exact(rho: &DensityMatrix, bases: &MeasurementBases, g: f64) -> Result<WeakValueTable> {
    let d = rho.dim();
    let mut entries = Vec::with_capacity(d * d);
    let mut probs = Vec::with_capacity(d * d);
    for n in 0..d {
        let ens = couple_and_postselect(rho, n, g, bases)?;
        let a_n = &bases.a_basis()[n];
        for (j, psi) in bases.psi_basis().iter().enumerate() {
            let p = ens.probs[j];
            let numerator = bases.overlap(j, n) * rho.matrix().sandwich(a_n, psi);
            entries.push((p > NEGLIGIBLE_PROB).then(|| numerator / p));
            probs.push(p);
        }
    }
    Ok(WeakValueTable {
        dim: d,
        entries,
        probs,
    })
}

/// `W_nj = (1/2g)[-tr(ρ_d^{nj} σ_R) + i tr(ρ_d^{nj} σ_I)]` for every `j`.
pub fn weak_value_from_device(
    ens: &ConditionalDeviceEnsemble,
    obs: &PointerObservables,
) -> Result<Vec<Option<Complex64>>> {
    if ens.g != obs.g {
        return Err(Error::StrengthMismatch {
            ensemble: ens.g,
            observables: obs.g,
        });
    }
    let scale = 1.0 / (2.0 * obs.g);
    Ok(ens
        .device_states
        .iter()
        .map(|state| {
            state.as_ref().map(|rho_d| {
                let re = -(rho_d * &obs.sigma_r).trace().re;
                let im = (rho_d * &obs.sigma_i).trace().re;
                Complex64::new(re, im) * scale
            })
        })
        .collect())
}

/// `ρ_nm = Σ_j P_j (⟨ψ_j|a_m⟩/⟨ψ_j|a_n⟩) W_nj`.
pub fn reconstruct(table: &WeakValueTable, bases: &MeasurementBases) -> Result<ComplexMatrix> {
    let d = table.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for n in 0..d {
        for j in 0..d {
            let p = table.prob(n, j);
            let pw = match table.weak_value(n, j) {
                Some(w) => w * p,
                None if p == 0.0 => continue,
                None => return Err(Error::UndefinedWeakValue { n, j, prob: p }),
            };
            for m in 0..d {
                out[(n, m)] += bases.reconstruction_coefficient(j, n, m) * pw;
            }
        }
    }
    Ok(out)
}

/// Pointer state with the system traced out, `tr_s(U_n (ρ ⊗ |0⟩⟨0|) U_n†)`.
pub fn marginal_device_state(rho: &DensityMatrix, n: usize, g: f64) -> Result<ComplexMatrix> {
    let d = rho.dim();
    let joint = coupled_state(rho, n, g)?;
    Ok(ComplexMatrix::from_fn(2, 2, |k, l| {
        (0..d).map(|s| joint[(2 * s + k, 2 * s + l)]).sum()
    }))
}

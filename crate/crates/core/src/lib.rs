//! Quantum state tomography via weak values.
//!
//! The crate is split along the lines of the protocol:
//!
//! - [`qmath`]: small dense complex matrices, density-matrix validation, random state ensembles
//!   and the plain-text state file format.
//! - [`protocol`]: the exact (infinite-statistics) forward model. Coupling unitary, post-selection
//!   onto the Fourier basis, pointer observables, weak values and the linear reconstruction.
//! - [`montecarlo`]: shot-level simulation of the experiment, the raw and Hermitian-symmetrized
//!   estimators, empirical MSE over repetitions and an exact second-moment MSE oracle.
//! - [`theory`]: closed-form MSE expressions, optimal coupling strengths, scaled-MSE comparison
//!   against MUB and SIC tomography, and a numeric minimizer that cross-checks the optimum.
//!
//! All tensor products are ordered system ⊗ device, and the device is a qubit pointer prepared
//! in `|0⟩`.

pub mod error;
pub mod montecarlo;
pub mod protocol;
pub mod qmath;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rng::RandomStream;

//! Small dense complex linear algebra and quantum-state plumbing.

mod density;
mod eigen;
mod io;
mod matrix;

pub use density::{
    hermitian_eigenvalues, hs_distance_sq, purity_stats, random_mixed, random_pure,
    validate_density, DensityMatrix, PurityStats, HERMITIAN_TOL, PSD_TOL, TRACE_TOL,
};
pub use eigen::{eig_hermitian_2x2, Eigen2};
pub use io::{format_state, parse_state};
pub use matrix::{sigma_x, sigma_y, sigma_z, ComplexMatrix};

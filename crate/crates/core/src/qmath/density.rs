use nalgebra::SymmetricEigen;

use super::ComplexMatrix;
use crate::{Complex64, Error, RandomStream, Result};

/// Max allowed `|ρ_ij - conj(ρ_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Max allowed `|tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Diagonal element `ρ_nn` (real part; the imaginary part is zero up to tolerance).
    pub fn population(&self, n: usize) -> f64 {
        self.matrix[(n, n)].re
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim, 1)?;
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    /// The pure state `|v⟩⟨v|` for a normalized version of `v`.
    pub fn from_pure(v: &[Complex64]) -> Result<Self> {
        check_dim(v.len(), 1)?;
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::TraceNotOne { deviation: 1.0 });
        }
        let unit: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        validate_density(&ComplexMatrix::outer(&unit, &unit))
    }
}

/// Tr ρ² together with the contributions of the real and imaginary parts.
///
/// `purity_re` and `purity_im` are the squared Hilbert-Schmidt norms of `Re ρ` and `Im ρ`, so
/// `purity = purity_re + purity_im` for Hermitian ρ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityStats {
    pub purity: f64,
    pub purity_re: f64,
    pub purity_im: f64,
}

impl PurityStats {
    pub fn pure_real() -> Self {
        Self {
            purity: 1.0,
            purity_re: 1.0,
            purity_im: 0.0,
        }
    }
}

fn check_dim(dim: usize, min: usize) -> Result<()> {
    if dim < min {
        return Err(Error::InvalidDimension { dim, min });
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part of a square matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let h = (&m.to_nalgebra() + m.to_nalgebra().adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn validate_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    check_dim(m.rows(), 1)?;
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let deviation = (m.trace() - Complex64::new(1.0, 0.0)).norm();
    if deviation > TRACE_TOL {
        return Err(Error::TraceNotOne { deviation });
    }
    let min_eigenvalue = hermitian_eigenvalues(m)?[0];
    if min_eigenvalue < PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix { matrix: m.clone() })
}

pub fn purity_stats(rho: &DensityMatrix) -> PurityStats {
    let (mut purity_re, mut purity_im) = (0.0, 0.0);
    for z in rho.matrix().entries() {
        purity_re += z.re * z.re;
        purity_im += z.im * z.im;
    }
    PurityStats {
        purity: purity_re + purity_im,
        purity_re,
        purity_im,
    }
}

/// Squared Hilbert-Schmidt distance `tr[(a-b)†(a-b)]`.
pub fn hs_distance_sq(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::ShapeMismatch {
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    Ok(a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum())
}

/// Haar-random pure state from a normalized vector of complex normals.
pub fn random_pure(dim: usize, rng: &mut RandomStream) -> Result<DensityMatrix> {
    check_dim(dim, 2)?;
    let v: Vec<Complex64> = (0..dim).map(|_| rng.complex_normal()).collect();
    DensityMatrix::from_pure(&v)
}

/// Hilbert-Schmidt-induced mixed state `GG†/tr(GG†)` with `G` a `dim × rank` Ginibre matrix.
pub fn random_mixed(dim: usize, rank: usize, rng: &mut RandomStream) -> Result<DensityMatrix> {
    check_dim(dim, 2)?;
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| rng.complex_normal());
    let ggd = &g * &g.adjoint();
    let tr = ggd.trace().re;
    // symmetrize so the stored matrix is Hermitian to the last bit
    let rho = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(ggd[(i, i)].re / tr, 0.0)
        } else if i < j {
            (ggd[(i, j)] + ggd[(j, i)].conj()) * (0.5 / tr)
        } else {
            ((ggd[(j, i)] + ggd[(i, j)].conj()) * (0.5 / tr)).conj()
        }
    });
    validate_density(&rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = validate_density(&ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        assert!((purity_stats(&rho).purity - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projector_is_valid_pure() {
        let rho = validate_density(&ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(purity_stats(&rho).purity, 1.0);
    }

    #[test]
    fn upper_triangular_is_not_hermitian() {
        let err = validate_density(&ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]])).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { deviation } if (deviation - 1.0).abs() < 1e-15));
    }

    #[test]
    fn wrong_trace_rejected() {
        let err = validate_density(&ComplexMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::TraceNotOne { deviation } if (deviation - 1.0).abs() < 1e-15));
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
        let err = validate_density(&m).unwrap_err();
        assert!(matches!(err, Error::NotPositive { min_eigenvalue } if (min_eigenvalue + 0.5).abs() < 1e-12));
    }

    #[test]
    fn non_square_rejected() {
        let err = validate_density(&ComplexMatrix::zeros(2, 3)).unwrap_err();
        assert_eq!(err, Error::NotSquare { rows: 2, cols: 3 });
    }

    #[test]
    fn purity_of_maximally_mixed() {
        for d in 2..=8 {
            let p = purity_stats(&DensityMatrix::maximally_mixed(d).unwrap());
            assert!((p.purity - 1.0 / d as f64).abs() < 1e-15);
            assert_eq!(p.purity_im, 0.0);
        }
    }

    #[test]
    fn purity_matches_squared_eigenvalues() {
        // independent route: Σ λ_k² from a full eigendecomposition
        let mut rng = RandomStream::new(11, 0);
        let rho = random_mixed(4, 4, &mut rng).unwrap();
        let lambda = hermitian_eigenvalues(rho.matrix()).unwrap();
        let via_eigen: f64 = lambda.iter().map(|l| l * l).sum();
        assert!((purity_stats(&rho).purity - via_eigen).abs() < 1e-12);
    }

    #[test]
    fn hs_distance_cases() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(hs_distance_sq(&a, &a).unwrap(), 0.0);
        assert_eq!(hs_distance_sq(&a, &b).unwrap(), 2.0);
        assert!(matches!(
            hs_distance_sq(&a, &ComplexMatrix::zeros(3, 3)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn hs_distance_matches_trace_form() {
        let mut rng = RandomStream::new(5, 1);
        let a = random_mixed(3, 2, &mut rng).unwrap().into_matrix();
        let b = random_mixed(3, 3, &mut rng).unwrap().into_matrix();
        let diff = &a - &b;
        let via_trace = (&diff.adjoint() * &diff).trace().re;
        let mut via_loop = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let z = a[(i, j)] - b[(i, j)];
                via_loop += z.re * z.re + z.im * z.im;
            }
        }
        let d = hs_distance_sq(&a, &b).unwrap();
        assert!((d - via_loop).abs() < 1e-15);
        assert!((d - via_trace).abs() < 1e-14);
    }

    #[test]
    fn random_pure_is_rank_one() {
        let mut rng = RandomStream::new(3, 0);
        let rho = random_pure(5, &mut rng).unwrap();
        let lambda = hermitian_eigenvalues(rho.matrix()).unwrap();
        assert!(lambda[..4].iter().all(|l| l.abs() < 1e-10));
        assert!((lambda[4] - 1.0).abs() < 1e-10);
        assert!((purity_stats(&rho).purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_pure_reproducible() {
        let a = random_pure(2, &mut RandomStream::new(9, 4)).unwrap();
        let b = random_pure(2, &mut RandomStream::new(9, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_mixed_rank_one_is_pure() {
        let mut rng = RandomStream::new(8, 0);
        let rho = random_mixed(4, 1, &mut rng).unwrap();
        assert!((purity_stats(&rho).purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_mixed_full_rank_purity_range() {
        let mut rng = RandomStream::new(8, 1);
        let p = purity_stats(&random_mixed(5, 5, &mut rng).unwrap()).purity;
        assert!(p > 0.2 && p < 1.0, "purity {p}");
    }

    #[test]
    fn random_mixed_bitwise_reproducible() {
        let a = random_mixed(4, 3, &mut RandomStream::new(77, 2)).unwrap();
        let b = random_mixed(4, 3, &mut RandomStream::new(77, 2)).unwrap();
        for (x, y) in a.matrix().entries().iter().zip(b.matrix().entries()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn random_ensemble_errors() {
        let mut rng = RandomStream::new(0, 0);
        assert!(matches!(random_pure(1, &mut rng), Err(Error::InvalidDimension { .. })));
        assert!(matches!(random_mixed(3, 0, &mut rng), Err(Error::InvalidRank { .. })));
        assert!(matches!(random_mixed(3, 4, &mut rng), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn complex_state_purity_split() {
        let v = [c(1.0, 0.0), c(0.0, 1.0)];
        let p = purity_stats(&DensityMatrix::from_pure(&v).unwrap());
        // ρ = ½[[1, -i], [i, 1]]
        assert!((p.purity_re - 0.5).abs() < 1e-15);
        assert!((p.purity_im - 0.5).abs() < 1e-15);
    }
}

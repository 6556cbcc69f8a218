use super::ComplexMatrix;
use crate::{Complex64, Error, Result};

/// Spectral decomposition of a 2×2 Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: [[Complex64; 2]; 2],
}

impl Eigen2 {
    /// `Σ_k λ_k |v_k⟩⟨v_k|`.
    pub fn resynthesize(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            out = &out + &ComplexMatrix::outer(v, v).scale_real(*lambda);
        }
        out
    }
}

/// Closed-form eigensystem of `[[a, b], [b*, c]]`.
pub fn eig_hermitian_2x2(m: &ComplexMatrix) -> Result<Eigen2> {
    if (m.rows(), m.cols()) != (2, 2) {
        return Err(Error::ShapeMismatch {
            left_rows: m.rows(),
            left_cols: m.cols(),
            right_rows: 2,
            right_cols: 2,
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > super::HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let a = m[(0, 0)].re;
    let c = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b.norm());
    let values = [mean - radius, mean + radius];

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if radius == 0.0 {
        return Ok(Eigen2 {
            values,
            vectors: [[one, zero], [zero, one]],
        });
    }
    let vector_for = |lambda: f64| -> [Complex64; 2] {
        // two null-space candidates of (m - λ); the longer one is better conditioned
        let u = [b, Complex64::new(lambda - a, 0.0)];
        let w = [Complex64::new(lambda - c, 0.0), b.conj()];
        let nu = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
        let nw = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        if nu >= nw {
            [u[0] / nu, u[1] / nu]
        } else {
            [w[0] / nw, w[1] / nw]
        }
    };
    let v0 = vector_for(values[0]);
    // second vector as the exact orthogonal complement of the first
    let v1 = [-v0[1].conj(), v0[0].conj()];
    Ok(Eigen2 {
        values,
        vectors: [v0, v1],
    })
}

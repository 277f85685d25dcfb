use super::{eigh, CMatrix};
use crate::error::{Error, Result};

/// Tolerance for the Hermitian, unit-trace and PSD checks.
pub const DENSITY_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite coin state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DENSITY_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "shape {}x{} is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_defect();
        if !(herm <= tol) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if !((tr.re - 1.0).abs() <= tol && tr.im.abs() <= tol) {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        let (values, _) = eigh(&matrix)?;
        if let Some(&min) = values.last() {
            if !(min >= -tol) {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Pure state `|ψ><ψ|` for a unit vector.
    pub fn pure(psi: &[num_complex::Complex64]) -> Result<Self> {
        Self::new(CMatrix::outer(psi, psi))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        // Validated at construction; the Schur sweep on a Hermitian matrix of this size converges.
        eigh(&self.matrix).map(|(v, _)| v).unwrap_or_default()
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_from_eigenvalues(&rho.eigenvalues())
}

/// `−Σ λ log₂ λ` with `0·log 0 = 0`; eigenvalues in `[−1e−10, 0)` count as 0.
pub fn entropy_from_eigenvalues(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&l| {
            if (-DENSITY_TOL..0.0).contains(&l) {
                0.0
            } else {
                l
            }
        })
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

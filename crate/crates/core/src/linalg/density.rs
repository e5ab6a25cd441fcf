use num_complex::Complex64;

use super::eigen::{eigh, SpectralDecomposition, DEFAULT_GROUP_TOL, PSD_TOL};
use super::matrix::HermitianMatrix;
use crate::error::{Error, Result};

/// Largest accepted deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;

/// A validated density operator: positive semidefinite with unit trace.
/// Eigenvalues in `[-1e-12, 0)` are clamped to zero.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    spectrum: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let spectrum = eigh(&matrix, DEFAULT_GROUP_TOL)?;
        let min = spectrum.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        let (matrix, spectrum) = if min < 0.0 {
            let clamped = spectrum.map_eigenvalues(|l| l.max(0.0));
            (clamped.reconstruct(), clamped)
        } else {
            (matrix, spectrum)
        };
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix trace {tr} differs from 1 by more than {TRACE_TOL:e}"
            )));
        }
        Ok(Self { matrix, spectrum })
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diagonal(probs)?)
    }

    /// Pure state `|v><v|` (normalized).
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        Self::new(HermitianMatrix::projector(v)?)
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Von Neumann entropy `-Tr rho log rho` in nats.
    pub fn entropy(&self) -> f64 {
        -crate::numeric::compensated_sum(
            self.spectrum
                .support()
                .map(|(l, _, r)| r as f64 * l * l.ln()),
        )
    }
}

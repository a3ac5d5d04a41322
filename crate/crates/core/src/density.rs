use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix, ComplexVector};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates and wraps `m`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let rho = Self(m);
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps `m` without checking; callers own the invariants.
    pub fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|psi><psi|` for a normalised `psi`.
    pub fn from_pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(psi.outer(psi)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(&self.0)?.values[0])
    }

    /// `Tr(rho op)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<num_complex::Complex64> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} operator", self.dim()),
                found: format!("{}x{}", op.rows(), op.cols()),
            });
        }
        Ok(self.0.matmul(op).trace())
    }

    /// Fidelity with a pure state, `<psi|rho|psi>`.
    pub fn fidelity_pure(&self, psi: &ComplexVector) -> f64 {
        psi.dot(&self.0.mul_vec(psi)).re
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!("shape {}x{}", m.rows(), m.cols())));
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("min eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn pure_state_is_valid() {
        let psi = ComplexVector::from_real(&[0.6, 0.0, 0.8]);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!(rho.validate().is_ok());
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.fidelity_pure(&psi) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.4])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5])).is_err());
        let mut m = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::from_pure(&ComplexVector::from_real(&[1.0, 1.0])).is_err());
    }
}

//! Reduced density matrices and the row-pair-major vectorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{invalid, Error, Result};

pub type CVector = DVector<C64>;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
}

impl DensityReport {
    pub fn is_valid(&self, tol: &Tolerances) -> bool {
        self.hermiticity_defect <= tol.herm
            && self.trace_defect <= tol.trace
            && self.min_eigenvalue >= -tol.pos
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(data: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(invalid(format!(
                "density matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let rho = Self { data };
        let report = rho.report();
        if !report.is_valid(tol) {
            return Err(invalid(format!(
                "not a density matrix: herm defect {:.3e}, trace defect {:.3e}, min eig {:.3e}",
                report.hermiticity_defect, report.trace_defect, report.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Wraps a matrix without validation (trajectory snapshots, diagnostics).
    pub fn from_raw(data: DMatrix<C64>) -> Self {
        assert_eq!(data.nrows(), data.ncols(), "density matrix must be square");
        Self { data }
    }

    pub fn pure(state: &[C64]) -> Result<Self> {
        let v = CVector::from_column_slice(state);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(invalid("zero state vector"));
        }
        let v = v / C64::new(norm, 0.0);
        Ok(Self::from_raw(&v * v.adjoint()))
    }

    pub fn diagonal(populations: &[f64]) -> Self {
        let d = populations.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, &p) in populations.iter().enumerate() {
            m[(i, i)] = C64::new(p, 0.0);
        }
        Self::from_raw(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::diagonal(&vec![1.0 / dim as f64; dim])
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, p: usize, q: usize) -> C64 {
        self.data[(p, q)]
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // Eigenvalues of the Hermitian part; the anti-Hermitian part is
        // reported separately as the Hermiticity defect.
        let herm = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.data - self.data.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn report(&self) -> DensityReport {
        DensityReport {
            hermiticity_defect: self.hermiticity_defect(),
            trace_defect: (self.trace() - 1.0).norm(),
            min_eigenvalue: self.min_eigenvalue(),
            purity: self.purity(),
        }
    }

    /// Hermitizes and rescales to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let herm = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let tr = herm.trace().re;
        if tr.abs() < f64::MIN_POSITIVE || !tr.is_finite() {
            return Err(invalid("cannot normalize a traceless matrix"));
        }
        Ok(Self::from_raw(herm / C64::new(tr, 0.0)))
    }
}

/// Flattens `rho` with index `p * d + p'`.
pub fn vectorize(rho: &DensityMatrix) -> CVector {
    let d = rho.dim();
    CVector::from_fn(d * d, |k, _| rho.data[(k / d, k % d)])
}

pub fn devectorize(v: &CVector, dim: usize) -> Result<DensityMatrix> {
    if v.len() != dim * dim {
        return Err(Error::Dimension {
            expected: dim * dim,
            actual: v.len(),
        });
    }
    Ok(DensityMatrix::from_raw(DMatrix::from_fn(
        dim,
        dim,
        |p, q| v[p * dim + q],
    )))
}

/// Diagnostics without failing; the configured tolerances are not applied here.
pub fn check_density(rho: &DensityMatrix) -> DensityReport {
    rho.report()
}

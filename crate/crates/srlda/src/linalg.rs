//! Pooled covariance construction and dense symmetric eigendecomposition.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{Eigh, UPLO};

use crate::{Error, Result};

/// Relative tolerance for declaring a matrix symmetric.
const SYMMETRY_RTOL: f64 = 1e-9;

/// Pooled sample covariance of two classes with divisor n - 2, together with
/// the per-class means.
#[derive(Debug, Clone)]
pub struct PooledCovariance {
    pub matrix: Array2<f64>,
    pub n0: usize,
    pub n1: usize,
    pub mean0: Array1<f64>,
    pub mean1: Array1<f64>,
}

impl PooledCovariance {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_total(&self) -> usize {
        self.n0 + self.n1
    }

    /// Difference of class means, mean0 - mean1.
    pub fn mean_diff(&self) -> Array1<f64> {
        &self.mean0 - &self.mean1
    }
}

/// Sorted spectral decomposition: eigenvalues in non-increasing order with
/// matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector column j (0-based, descending eigenvalue order).
    pub fn vector(&self, j: usize) -> ndarray::ArrayView1<'_, f64> {
        self.eigenvectors.column(j)
    }
}

/// Pooled sample covariance S = (1/(n-2)) sum_i sum_{x in class i}
/// (x - mean_i)(x - mean_i)^T.
pub fn pooled_covariance(class0: ArrayView2<f64>, class1: ArrayView2<f64>) -> Result<PooledCovariance> {
    let (n0, n1) = (class0.nrows(), class1.nrows());
    if n0 == 0 || n1 == 0 {
        return Err(Error::InsufficientSamples { n: n0.min(n1), min: 1 });
    }
    if class0.ncols() != class1.ncols() {
        return Err(Error::DimensionMismatch {
            expected: class0.ncols(),
            got: class1.ncols(),
        });
    }
    let n = n0 + n1;
    if n <= 2 {
        return Err(Error::InsufficientSamples { n, min: 3 });
    }
    let p = class0.ncols();
    let mean0 = class0.mean_axis(Axis(0)).expect("n0 > 0");
    let mean1 = class1.mean_axis(Axis(0)).expect("n1 > 0");

    let mut matrix = Array2::<f64>::zeros((p, p));
    let mut centered0 = class0.to_owned();
    for mut row in centered0.rows_mut() {
        row -= &mean0;
    }
    let mut centered1 = class1.to_owned();
    for mut row in centered1.rows_mut() {
        row -= &mean1;
    }
    matrix += &centered0.t().dot(&centered0);
    matrix += &centered1.t().dot(&centered1);
    matrix /= (n - 2) as f64;

    Ok(PooledCovariance { matrix, n0, n1, mean0, mean1 })
}

/// Full symmetric eigendecomposition of the pooled covariance, sorted in
/// non-increasing eigenvalue order with a deterministic sign convention:
/// each eigenvector's largest-magnitude entry is positive (ties broken by
/// lowest index).
pub fn symmetric_eigen(cov: &PooledCovariance) -> Result<EigenDecomposition> {
    symmetric_eigen_of(cov.matrix.view())
}

/// Same as [`symmetric_eigen`], on a bare matrix.
pub fn symmetric_eigen_of(matrix: ArrayView2<f64>) -> Result<EigenDecomposition> {
    let p = matrix.nrows();
    if p != matrix.ncols() {
        return Err(Error::DimensionMismatch { expected: p, got: matrix.ncols() });
    }
    let scale = matrix.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut asym = 0.0_f64;
    for i in 0..p {
        for j in (i + 1)..p {
            asym = asym.max((matrix[[i, j]] - matrix[[j, i]]).abs());
        }
    }
    if scale > 0.0 && asym > SYMMETRY_RTOL * scale {
        return Err(Error::NotSymmetric { asym: asym / scale });
    }

    // Symmetrize before handing to LAPACK so the result is a pure function
    // of (S + S^T)/2.
    let sym = (&matrix + &matrix.t()) * 0.5;
    let (vals, vecs) = sym
        .eigh(UPLO::Lower)
        .map_err(|e| Error::EigenFailure(e.to_string()))?;

    // eigh returns ascending order; reverse to non-increasing.
    let mut eigenvalues = Array1::zeros(p);
    let mut eigenvectors = Array2::zeros((p, p));
    for j in 0..p {
        let src = p - 1 - j;
        eigenvalues[j] = vals[src];
        eigenvectors.column_mut(j).assign(&vecs.column(src));
    }

    // Sign convention: largest-magnitude entry positive, ties to lowest index.
    for mut col in eigenvectors.columns_mut() {
        let mut best = 0usize;
        let mut best_abs = col[0].abs();
        for (i, &v) in col.iter().enumerate().skip(1) {
            if v.abs() > best_abs {
                best = i;
                best_abs = v.abs();
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }

    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

//! Thin wrappers over nalgebra's symmetric eigen-solver and SVD.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenpairs sorted by ascending eigenvalue.
pub(crate) struct SortedEigen {
    pub values: Vec<f64>,
    /// Column `r` is the unit eigenvector of `values[r]`.
    pub vectors: DMatrix<f64>,
}

pub(crate) fn symmetric_eigen(a: &DMatrix<f64>, context: &'static str) -> Result<SortedEigen> {
    let eig = SymmetricEigen::try_new(a.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNonConvergence { context })?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let values = order.iter().map(|&r| eig.eigenvalues[r]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |row, col| {
        eig.eigenvectors[(row, order[col])]
    });
    Ok(SortedEigen { values, vectors })
}

/// Smallest eigenvalue and a unit eigenvector for it.
pub(crate) fn min_eigenpair(a: &DMatrix<f64>, context: &'static str) -> Result<(f64, Vec<f64>)> {
    if a.nrows() == 1 {
        return Ok((a[(0, 0)], vec![1.0]));
    }
    let eig = symmetric_eigen(a, context)?;
    let v = eig.vectors.column(0).iter().copied().collect();
    Ok((eig.values[0], v))
}

pub(crate) fn min_eigenvalue(a: &DMatrix<f64>, context: &'static str) -> Result<f64> {
    Ok(symmetric_eigen(a, context)?.values[0])
}

/// Number of singular values above `largest * max(rows, cols) * 1e-12`.
pub(crate) fn numeric_rank(columns: &[&[f64]], dim: usize) -> usize {
    if columns.is_empty() || dim == 0 {
        return 0;
    }
    let mat = DMatrix::from_fn(dim, columns.len(), |r, c| columns[c][r]);
    let sv: DVector<f64> = mat.singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    let cutoff = largest * dim.max(columns.len()) as f64 * 1e-12;
    sv.iter().filter(|&&s| s > cutoff).count()
}

pub(crate) fn check_symmetric(mat: &DMatrix<f64>) -> Result<()> {
    if !mat.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix factor is {}x{}, expected square",
            mat.nrows(),
            mat.ncols()
        )));
    }
    for r in 0..mat.nrows() {
        for c in (r + 1)..mat.ncols() {
            let gap = (mat[(r, c)] - mat[(c, r)]).abs();
            if gap > 0.0 {
                return Err(Error::AsymmetricFactor {
                    row: r + 1,
                    col: c + 1,
                    gap,
                });
            }
        }
    }
    if let Some(position) = mat.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { position });
    }
    Ok(())
}

//! Square flattening `M[(i,j),(k,l)] = a[i][j][k][l]` and sum-of-squares
//! certificates built from it.
//!
//! With the row index `i * n + j`, `F_A(x, y) = zᵀ M z` for `z = x ⊗ y`. A psd
//! flattening is a sufficient condition for A to be SOS: every eigenpair
//! `(λ, w)` with `λ > 0` gives a bilinear factor `sqrt(λ) · reshape(w)`.

use nalgebra::DMatrix;

use crate::decompose::CpDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, symmetric_eigen};
use crate::positivity::{self, MinimizeOptions};
use crate::tensor::BiquadraticTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct FlatteningMatrix {
    m: usize,
    n: usize,
    data: DMatrix<f64>,
}

impl FlatteningMatrix {
    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Row/column of the pair `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Back to a tensor. Symmetric tensors round-trip exactly.
    pub fn unflatten(&self) -> Result<BiquadraticTensor> {
        let dim = self.dim();
        // DMatrix is column-major; entries are row-major over (row, col)
        let raw: Vec<f64> = (0..dim * dim).map(|p| self.data[(p / dim, p % dim)]).collect();
        BiquadraticTensor::symmetrize(&raw, self.m, self.n)
    }

    /// `zᵀ M z` at `z = x ⊗ y`.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.m || y.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "probe ({}, {}) for a {}x{} flattening",
                x.len(),
                y.len(),
                self.m,
                self.n
            )));
        }
        let z = nalgebra::DVector::from_fn(self.dim(), |r, _| x[r / self.n] * y[r % self.n]);
        Ok(z.dot(&(&self.data * &z)))
    }
}

pub fn flatten(a: &BiquadraticTensor) -> FlatteningMatrix {
    let dim = a.m() * a.n();
    FlatteningMatrix {
        m: a.m(),
        n: a.n(),
        data: DMatrix::from_row_slice(dim, dim, a.entries()),
    }
}

/// `1e-10 · (1 + max|a|)`.
pub fn default_tol(a: &BiquadraticTensor) -> f64 {
    1e-10 * (1.0 + a.max_abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatteningCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// psd iff the smallest eigenvalue of the flattening is at least `-tol`.
pub fn flattening_psd_check(a: &BiquadraticTensor, tol: f64) -> Result<FlatteningCheck> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be >= 0, got {tol}")));
    }
    let min_eigenvalue = min_eigenvalue(flatten(a).data(), "flattening eigenvalues")?;
    Ok(FlatteningCheck {
        psd: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

/// `F(x, y) = Σ_r (xᵀ B_r y)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SosDecomposition {
    pub m: usize,
    pub n: usize,
    /// Each factor is an `m x n` matrix.
    pub factors: Vec<DMatrix<f64>>,
}

impl SosDecomposition {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The symmetric tensor whose form is `Σ_r (xᵀ B_r y)²`: the symmetrized Gram
    /// matrix `Σ_r vec(B_r) vec(B_r)ᵀ` read as a tensor.
    pub fn to_tensor(&self) -> Result<BiquadraticTensor> {
        let dim = self.m * self.n;
        let mut raw = vec![0.0; dim * dim];
        for b in &self.factors {
            for r in 0..dim {
                let br = b[(r / self.n, r % self.n)];
                for c in 0..dim {
                    raw[r * dim + c] += br * b[(c / self.n, c % self.n)];
                }
            }
        }
        BiquadraticTensor::symmetrize(&raw, self.m, self.n)
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.m || y.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "probe ({}, {}) for a {}x{} SOS decomposition",
                x.len(),
                y.len(),
                self.m,
                self.n
            )));
        }
        let xv = nalgebra::DVector::from_column_slice(x);
        let yv = nalgebra::DVector::from_column_slice(y);
        Ok(self
            .factors
            .iter()
            .map(|b| {
                let f = xv.dot(&(b * &yv));
                f * f
            })
            .sum())
    }
}

/// SOS factors from the eigendecomposition of a psd flattening.
///
/// Eigenvalues at or below `tol` count as zero and are dropped.
pub fn sos_from_flattening(a: &BiquadraticTensor, tol: f64) -> Result<SosDecomposition> {
    let flat = flatten(a);
    let eig = symmetric_eigen(flat.data(), "flattening eigenvalues")?;
    if eig.values[0] < -tol {
        return Err(Error::Indefinite {
            min_eigenvalue: eig.values[0],
            tol,
        });
    }
    let (m, n) = (a.m(), a.n());
    let factors = eig
        .values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &lam)| lam > tol)
        .map(|(r, &lam)| {
            let root = lam.sqrt();
            DMatrix::from_fn(m, n, |i, j| root * eig.vectors[(i * n + j, r)])
        })
        .collect();
    Ok(SosDecomposition { m, n, factors })
}

/// One factor `u_p v_pᵀ` per CP term: `((u_pᵀx)(v_pᵀy))²` summed over p.
pub fn sos_from_cp(d: &CpDecomposition) -> Result<SosDecomposition> {
    if d.is_empty() {
        return Err(Error::EmptyDecomposition);
    }
    let factors = d
        .pairs()
        .iter()
        .map(|p| DMatrix::from_fn(d.m(), d.n(), |i, j| p.u[i] * p.v[j]))
        .collect();
    Ok(SosDecomposition {
        m: d.m(),
        n: d.n(),
        factors,
    })
}

/// Necessary conditions for complete positivity. Any `false` certifies that the
/// tensor is not CPB; all `true` is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpbBattery {
    pub entrywise_nonneg: bool,
    pub flattening_psd: bool,
    pub copositive_numeric: bool,
    pub min_entry: f64,
    pub min_eigenvalue: f64,
    pub simplex_min: f64,
}

impl CpbBattery {
    pub fn all_pass(&self) -> bool {
        self.entrywise_nonneg && self.flattening_psd && self.copositive_numeric
    }
}

pub fn necessary_cpb_battery(
    a: &BiquadraticTensor,
    tol: f64,
    opts: &MinimizeOptions,
) -> Result<CpbBattery> {
    let min_entry = a.min_entry();
    let flat = flattening_psd_check(a, tol)?;
    let simplex = positivity::simplex_min(a, opts)?;
    Ok(CpbBattery {
        entrywise_nonneg: min_entry >= -tol,
        flattening_psd: flat.psd,
        copositive_numeric: simplex.value >= -tol,
        min_entry,
        min_eigenvalue: flat.min_eigenvalue,
        simplex_min: simplex.value,
    })
}

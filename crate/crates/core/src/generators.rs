//! Structured tensor families: Cauchy, Pascal, outer products of matrices and the
//! diagonal tensor `Σ_p e_p⊗e_p⊗e_p⊗e_p`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::check_symmetric;
use crate::tensor::BiquadraticTensor;

/// Largest integer below which every integer is exactly representable in f64.
const EXACT_F64_LIMIT: u128 = 1 << 53;

/// Generating vectors `(c, d)` of a Cauchy tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingVectors {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl GeneratingVectors {
    pub fn new(c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        if c.is_empty() || d.is_empty() {
            return Err(Error::EmptyDimension {
                m: c.len(),
                n: d.len(),
            });
        }
        if let Some(position) = c.iter().chain(&d).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { position });
        }
        Ok(Self { c, d })
    }

    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Relative floor below which a denominator counts as zero:
    /// `1e-12 * (1 + max|c| + max|d|)`.
    pub fn eps_denom(&self) -> f64 {
        let mc = self.c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let md = self.d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        1e-12 * (1.0 + mc + md)
    }

    /// `min_{i,j} (c_i + d_j)` and its (0-based) location.
    pub fn min_mixed_sum(&self) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for (i, ci) in self.c.iter().enumerate() {
            for (j, dj) in self.d.iter().enumerate() {
                if ci + dj < best.0 {
                    best = (ci + dj, i, j);
                }
            }
        }
        best
    }

    /// Whether `c_i + d_j + c_k + d_l > 0` for every index tuple, equivalently
    /// `c_i + d_j > 0` for every `(i, j)`.
    pub fn is_positive_cauchy(&self) -> bool {
        self.min_mixed_sum().0 > 0.0
    }
}

/// Symmetric matrix factors `(B, C)` of a decomposable tensor `a_ijkl = b_ik c_jl`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFactorPair {
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl MatrixFactorPair {
    pub fn new(b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&b)?;
        check_symmetric(&c)?;
        if b.nrows() == 0 || c.nrows() == 0 {
            return Err(Error::EmptyDimension {
                m: b.nrows(),
                n: c.nrows(),
            });
        }
        Ok(Self { b, c })
    }
}

/// `a_ijkl = 1 / (c_i + c_k + d_j + d_l)`.
pub fn cauchy(gv: &GeneratingVectors) -> Result<BiquadraticTensor> {
    if let Some(p) = gv.c.iter().position(|&v| v == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Cauchy generating vector c has a zero entry at position {}",
            p + 1
        )));
    }
    if let Some(p) = gv.d.iter().position(|&v| v == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Cauchy generating vector d has a zero entry at position {}",
            p + 1
        )));
    }
    let eps = gv.eps_denom();
    BiquadraticTensor::from_symmetric_fn(gv.m(), gv.n(), |i, j, k, l| {
        let denom = (gv.c[i] + gv.c[k]) + (gv.d[j] + gv.d[l]);
        if denom.abs() < eps {
            return Err(Error::VanishingDenominator {
                i: i + 1,
                j: j + 1,
                k: k + 1,
                l: l + 1,
                value: denom,
            });
        }
        Ok(1.0 / denom)
    })
}

fn pair_sum_matrix(values: &[f64], name: &'static str, eps: f64) -> Result<DMatrix<f64>> {
    let dim = values.len();
    let mut mat = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let s = values[r] + values[c];
            if s.abs() < eps {
                return Err(Error::VanishingPairSum {
                    vector: name,
                    first: r + 1,
                    second: c + 1,
                    value: s,
                });
            }
            mat[(r, c)] = 1.0 / s;
            mat[(c, r)] = 1.0 / s;
        }
    }
    Ok(mat)
}

/// The Cauchy matrix `1 / (c_i + c_k)`.
pub fn cauchy_matrix(values: &[f64]) -> Result<DMatrix<f64>> {
    let eps = 1e-12 * (1.0 + values.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    pair_sum_matrix(values, "c", eps)
}

/// `a_ijkl = 1 / ((c_i + c_k)(d_j + d_l))`, built as the outer product of the two
/// Cauchy matrices. Only nonzero pair sums are required here; the CPB property
/// additionally needs `c, d > 0`.
pub fn cauchy_decomposable(gv: &GeneratingVectors) -> Result<BiquadraticTensor> {
    let eps = gv.eps_denom();
    let b = pair_sum_matrix(&gv.c, "c", eps)?;
    let c = pair_sum_matrix(&gv.d, "d", eps)?;
    outer(&MatrixFactorPair { b, c })
}

/// Exact binomial coefficient, `None` on overflow.
fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 1..=k as u128 {
        acc = acc.checked_mul(n as u128 - k as u128 + t)? / t;
    }
    Some(acc)
}

/// `(a+b+c+d)! / (a! b! c! d!)` exactly, `None` on overflow.
fn multinomial4(a: u64, b: u64, c: u64, d: u64) -> Option<u128> {
    binomial(a + b, b)?
        .checked_mul(binomial(a + b + c, c)?)?
        .checked_mul(binomial(a + b + c + d, d)?)
}

fn exact_to_f64(v: Option<u128>, m: usize, n: usize) -> Result<f64> {
    match v {
        Some(v) if v <= EXACT_F64_LIMIT => Ok(v as f64),
        _ => Err(Error::PascalTooLarge { m, n }),
    }
}

fn check_pascal_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyDimension { m, n });
    }
    Ok(())
}

/// `p_ijkl = (i+j+k+l-4)! / ((i-1)!(j-1)!(k-1)!(l-1)!)` (1-based), computed in exact
/// integer arithmetic. Refuses sizes whose largest entry is not exactly
/// representable as f64.
pub fn pascal(m: usize, n: usize) -> Result<BiquadraticTensor> {
    check_pascal_dims(m, n)?;
    let (mm, nn) = ((m - 1) as u64, (n - 1) as u64);
    exact_to_f64(multinomial4(mm, nn, mm, nn), m, n)?;
    BiquadraticTensor::from_symmetric_fn(m, n, |i, j, k, l| {
        exact_to_f64(
            multinomial4(i as u64, j as u64, k as u64, l as u64),
            m,
            n,
        )
    })
}

/// The Pascal matrix `P_ik = (i+k-2)! / ((i-1)!(k-1)!)` (1-based).
pub fn pascal_matrix(dim: usize) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(Error::EmptyDimension { m: dim, n: dim });
    }
    let mut p = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for k in 0..dim {
            p[(i, k)] = exact_to_f64(binomial((i + k) as u64, i as u64), dim, dim)?;
        }
    }
    Ok(p)
}

/// `p_ijkl = (i+k-2)!(j+l-2)! / ((i-1)!(j-1)!(k-1)!(l-1)!)`: the outer product of
/// two Pascal matrices.
pub fn pascal_decomposable(m: usize, n: usize) -> Result<BiquadraticTensor> {
    check_pascal_dims(m, n)?;
    let (mm, nn) = ((m - 1) as u64, (n - 1) as u64);
    let largest = binomial(2 * mm, mm).and_then(|a| a.checked_mul(binomial(2 * nn, nn)?));
    exact_to_f64(largest, m, n)?;
    outer(&MatrixFactorPair {
        b: pascal_matrix(m)?,
        c: pascal_matrix(n)?,
    })
}

/// `a_ijkl = b_ik c_jl`.
pub fn outer(fp: &MatrixFactorPair) -> Result<BiquadraticTensor> {
    check_symmetric(&fp.b)?;
    check_symmetric(&fp.c)?;
    let (b, c) = (&fp.b, &fp.c);
    BiquadraticTensor::from_symmetric_fn(b.nrows(), c.nrows(), |i, j, k, l| {
        Ok(b[(i, k)] * c[(j, l)])
    })
}

/// `Σ_p e_p⊗e_p⊗e_p⊗e_p` with `m = n`: strongly CPB but not positive definite.
pub fn diagonal_counterexample(m: usize) -> Result<BiquadraticTensor> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "diagonal counterexample needs m >= 2, got {m}"
        )));
    }
    BiquadraticTensor::from_symmetric_fn(m, m, |i, j, k, l| {
        Ok(if i == j && j == k && k == l { 1.0 } else { 0.0 })
    })
}

//! Dense symmetric biquadratic tensors.
//!
//! An `m x n` biquadratic tensor has entries `a[i][j][k][l]` with `i, k < m` and
//! `j, l < n`. Storage is one row-major array in lexicographic `(i, j, k, l)` order,
//! so the linear offset is `((i * n + j) * m + k) * n + l`. Read as an `mn x mn`
//! matrix with row `i * n + j` and column `k * n + l`, the same buffer is the square
//! flattening of the tensor.
//!
//! Indices are 0-based in this API. Files and messages use 1-based indices.
//!
//! Every tensor satisfies `a[i][j][k][l] = a[k][j][i][l] = a[i][l][k][j]`, and
//! therefore `a[i][j][k][l] = a[k][l][i][j]`, with exact storage equality.
//! External data enters through [`BiquadraticTensor::symmetrize`]; the crate's own
//! constructors build symmetric buffers directly.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default absolute tolerance for tensor equality.
pub const DEFAULT_EQ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BiquadraticTensor {
    m: usize,
    n: usize,
    entries: Vec<f64>,
}

/// A pair `(u, v)` with `u` in R^m and `v` in R^n; one rank-one term `u⊗v⊗u⊗v`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl VectorPair {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        Self { u, v }
    }

    pub fn is_nonneg(&self) -> bool {
        self.u.iter().chain(&self.v).all(|&t| t >= 0.0)
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyDimension { m, n });
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(position) => Err(Error::NonFinite { position }),
        None => Ok(()),
    }
}

impl BiquadraticTensor {
    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        check_dims(m, n)?;
        Ok(Self {
            m,
            n,
            entries: vec![0.0; m * n * m * n],
        })
    }

    /// Builds a tensor from entries computed by `f(i, j, k, l)`.
    ///
    /// The caller guarantees that `f` is invariant under `i <-> k` and `j <-> l`;
    /// only canonical representatives (`i <= k`, `j <= l`) are evaluated and copied
    /// to their images, so the result is exactly symmetric regardless.
    pub(crate) fn from_symmetric_fn<F>(m: usize, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize, usize) -> Result<f64>,
    {
        let mut t = Self::zeros(m, n)?;
        for i in 0..m {
            for k in i..m {
                for j in 0..n {
                    for l in j..n {
                        let value = f(i, j, k, l)?;
                        t.set_orbit(i, j, k, l, value);
                    }
                }
            }
        }
        check_finite(&t.entries)?;
        Ok(t)
    }

    /// Trusted constructor for buffers that are symmetric by construction.
    pub(crate) fn from_parts_unchecked(m: usize, n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), m * n * m * n);
        Self { m, n, entries }
    }

    /// Averages `raw` over the symmetry group `{id, i<->k, j<->l, both}`.
    ///
    /// Each orbit is summed in a fixed order and the mean is written to every
    /// image, so the output is exactly symmetric and already-symmetric input comes
    /// back bit-for-bit.
    pub fn symmetrize(raw: &[f64], m: usize, n: usize) -> Result<Self> {
        check_dims(m, n)?;
        let expected = m * n * m * n;
        if raw.len() != expected {
            return Err(Error::Shape {
                m,
                n,
                expected,
                got: raw.len(),
            });
        }
        check_finite(raw)?;
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * m + k) * n + l;
        let mut entries = vec![0.0; expected];
        for i in 0..m {
            for k in i..m {
                for j in 0..n {
                    for l in j..n {
                        let s = (raw[idx(i, j, k, l)] + raw[idx(k, j, i, l)])
                            + (raw[idx(i, l, k, j)] + raw[idx(k, l, i, j)]);
                        let mean = 0.25 * s;
                        entries[idx(i, j, k, l)] = mean;
                        entries[idx(k, j, i, l)] = mean;
                        entries[idx(i, l, k, j)] = mean;
                        entries[idx(k, l, i, j)] = mean;
                    }
                }
            }
        }
        check_finite(&entries)?;
        Ok(Self { m, n, entries })
    }

    /// Accepts `entries` only if they are already exactly symmetric.
    pub fn try_from_symmetric(entries: Vec<f64>, m: usize, n: usize) -> Result<Self> {
        let sym = Self::symmetrize(&entries, m, n)?;
        if sym.entries != entries {
            return Err(Error::InvalidParameter(
                "entries violate a[i][j][k][l] = a[k][j][i][l] = a[i][l][k][j]".into(),
            ));
        }
        Ok(sym)
    }

    /// Checks the four-fold symmetry on an arbitrary buffer; used on ingest.
    pub fn is_symmetric_buffer(raw: &[f64], m: usize, n: usize) -> bool {
        if raw.len() != m * n * m * n {
            return false;
        }
        let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * m + k) * n + l;
        for i in 0..m {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..n {
                        let a = raw[idx(i, j, k, l)];
                        if a != raw[idx(k, j, i, l)] || a != raw[idx(i, l, k, j)] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `a[i][j][k][l] = u_i v_j u_k v_l`.
    pub fn rank_one(u: &[f64], v: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(u.len(), v.len())?;
        check_finite(u)?;
        check_finite(v)?;
        t.add_rank_one_in_place(u, v, 1.0);
        Ok(t)
    }

    /// Adds `w * u⊗v⊗u⊗v`. Products are grouped as `w * (u_i u_k) * (v_j v_l)` so
    /// the buffer stays exactly symmetric.
    pub(crate) fn add_rank_one_in_place(&mut self, u: &[f64], v: &[f64], w: f64) {
        let (m, n) = (self.m, self.n);
        debug_assert_eq!(u.len(), m);
        debug_assert_eq!(v.len(), n);
        for i in 0..m {
            for j in 0..n {
                for k in 0..m {
                    let uu = u[i] * u[k];
                    let base = ((i * n + j) * m + k) * n;
                    for l in 0..n {
                        self.entries[base + l] += w * (uu * (v[j] * v[l]));
                    }
                }
            }
        }
    }

    fn set_orbit(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let a = self.offset(i, j, k, l);
        let b = self.offset(k, j, i, l);
        let c = self.offset(i, l, k, j);
        let d = self.offset(k, l, i, j);
        self.entries[a] = value;
        self.entries[b] = value;
        self.entries[c] = value;
        self.entries[d] = value;
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.m + k) * self.n + l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entries in lexicographic `(i, j, k, l)` order.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.entries[self.offset(i, j, k, l)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(())
    }

    fn check_probe(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.m || y.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "probe ({}, {}) for a {}x{} tensor",
                x.len(),
                y.len(),
                self.m,
                self.n
            )));
        }
        Ok(())
    }

    /// The biquadratic form `Σ a[i][j][k][l] x_i y_j x_k y_l`.
    pub fn eval_form(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_probe(x, y)?;
        Ok(self.form_unchecked(x, y))
    }

    pub(crate) fn form_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let (m, n) = (self.m, self.n);
        let mut total = 0.0;
        for i in 0..m {
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for k in 0..m {
                    let base = ((i * n + j) * m + k) * n;
                    let mut row = 0.0;
                    for l in 0..n {
                        row += self.entries[base + l] * y[l];
                    }
                    inner += row * x[k];
                }
                total += xy * inner;
            }
        }
        total
    }

    /// `G(y)` with `G_ik = Σ_{j,l} a[i][j][k][l] y_j y_l`.
    pub fn contract_y(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "y has length {}, expected {}",
                y.len(),
                self.n
            )));
        }
        Ok(self.contract_y_unchecked(y))
    }

    pub(crate) fn contract_y_unchecked(&self, y: &[f64]) -> DMatrix<f64> {
        let (m, n) = (self.m, self.n);
        let mut g = DMatrix::zeros(m, m);
        for i in 0..m {
            for k in i..m {
                let mut s = 0.0;
                for j in 0..n {
                    let base = ((i * n + j) * m + k) * n;
                    let mut row = 0.0;
                    for l in 0..n {
                        row += self.entries[base + l] * y[l];
                    }
                    s += y[j] * row;
                }
                g[(i, k)] = s;
                g[(k, i)] = s;
            }
        }
        g
    }

    /// `H(x)` with `H_jl = Σ_{i,k} a[i][j][k][l] x_i x_k`.
    pub fn contract_x(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "x has length {}, expected {}",
                x.len(),
                self.m
            )));
        }
        Ok(self.contract_x_unchecked(x))
    }

    pub(crate) fn contract_x_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        let (m, n) = (self.m, self.n);
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            for l in j..n {
                let mut s = 0.0;
                for i in 0..m {
                    let mut row = 0.0;
                    for k in 0..m {
                        row += self.get(i, j, k, l) * x[k];
                    }
                    s += x[i] * row;
                }
                h[(j, l)] = s;
                h[(l, j)] = s;
            }
        }
        h
    }

    /// Returns `(G(y), H(x))` for whichever probes are supplied.
    pub fn partial_matrices(
        &self,
        x: Option<&[f64]>,
        y: Option<&[f64]>,
    ) -> Result<(Option<DMatrix<f64>>, Option<DMatrix<f64>>)> {
        if x.is_none() && y.is_none() {
            return Err(Error::InvalidParameter(
                "partial_matrices needs at least one of x, y".into(),
            ));
        }
        let g = y.map(|y| self.contract_y(y)).transpose()?;
        let h = x.map(|x| self.contract_x(x)).transpose()?;
        Ok((g, h))
    }

    /// Entrywise inner product `A • B`.
    pub fn pairing(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            m: self.m,
            n: self.n,
            entries,
        })
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().map(|a| a * t).collect(),
        }
    }

    /// Max-norm distance; errors on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
    }

    /// Max-norm equality; shape mismatch compares unequal.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }
}

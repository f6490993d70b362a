//! Completely positive decompositions `A = Σ_p u_p⊗v_p⊗u_p⊗v_p`.
//!
//! Constructions provided here:
//!
//! * [`pascal_cp`]: Gauss–Laguerre discretization of
//!   `p_ijkl = ∫_0^∞ u_i(t) v_j(t) u_k(t) v_l(t) e^{-t} dt` with `u_i(t) = t^{i-1}/(i-1)!`.
//!   The integrand is a polynomial of degree `2(m+n-2)`, so `m+n-1` nodes make the
//!   decomposition exact up to rounding.
//! * [`cauchy_cp`]: composite Gauss–Legendre discretization of
//!   `1/(c_i+c_k+d_j+d_l) = ∫_0^∞ e^{-(c_i+c_k+d_j+d_l)s} ds` on a truncated interval.
//! * [`lift_matrix_cp`]: cross products of CP factors of `B` and `C` for `B⊗C`.
//! * [`extract_factors`]: recovers `(B, C)` from a decomposable tensor through the
//!   slice `F_ik = a[i][j0][k][l0] = b_ik c_{j0 l0}`.
//!
//! Quadrature weights are folded as `w^{1/4}` into both `u` and `v`, which keeps
//! every pair nonnegative.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::generators::{self, GeneratingVectors, MatrixFactorPair};
use crate::quadrature::{self, QuadratureRule};
use crate::tensor::{BiquadraticTensor, VectorPair};

/// Nodes per Gauss–Legendre panel in [`cauchy_cp`].
pub const CAUCHY_NODES_PER_PANEL: usize = 16;
/// Panel budget in [`cauchy_cp`].
pub const CAUCHY_MAX_PANELS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct CpDecomposition {
    m: usize,
    n: usize,
    pairs: Vec<VectorPair>,
    nonneg: bool,
}

impl CpDecomposition {
    /// Validates pair lengths and finiteness and derives the nonneg flag.
    pub fn new(m: usize, n: usize, pairs: Vec<VectorPair>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::EmptyDimension { m, n });
        }
        for (p, pair) in pairs.iter().enumerate() {
            if pair.u.len() != m || pair.v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "pair {} has lengths ({}, {}), expected ({m}, {n})",
                    p + 1,
                    pair.u.len(),
                    pair.v.len()
                )));
            }
            if pair.u.iter().chain(&pair.v).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { position: p });
            }
        }
        let nonneg = pairs.iter().all(VectorPair::is_nonneg);
        Ok(Self {
            m,
            n,
            pairs,
            nonneg,
        })
    }

    /// Like [`CpDecomposition::new`] but also checks a declared nonneg flag.
    pub fn with_declared_flag(
        m: usize,
        n: usize,
        pairs: Vec<VectorPair>,
        claimed: bool,
    ) -> Result<Self> {
        let d = Self::new(m, n, pairs)?;
        if d.nonneg != claimed {
            return Err(Error::InconsistentNonnegFlag {
                claimed,
                actual: d.nonneg,
            });
        }
        Ok(d)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[VectorPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True when every component of every `u`, `v` is nonnegative.
    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    /// `Σ_p rank_one(u_p, v_p)`.
    pub fn reconstruct(&self) -> BiquadraticTensor {
        let entries = vec![0.0; self.m * self.n * self.m * self.n];
        let mut t = BiquadraticTensor::from_parts_unchecked(self.m, self.n, entries);
        for pair in &self.pairs {
            t.add_rank_one_in_place(&pair.u, &pair.v, 1.0);
        }
        t
    }

    fn max_component(&self) -> f64 {
        self.pairs
            .iter()
            .flat_map(|p| p.u.iter().chain(&p.v))
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Absolute and relative max-norm residual of a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub max_abs_error: f64,
    /// `max_abs_error / max|target|`, or the absolute error for a zero target.
    pub relative_error: f64,
}

impl Residual {
    pub fn between(approx: &BiquadraticTensor, target: &BiquadraticTensor) -> Result<Self> {
        let max_abs_error = approx.max_abs_diff(target)?;
        let scale = target.max_abs();
        let relative_error = if scale > 0.0 {
            max_abs_error / scale
        } else {
            max_abs_error
        };
        Ok(Self {
            max_abs_error,
            relative_error,
        })
    }
}

/// `{(e_p, e_p)}`, the decomposition of [`generators::diagonal_counterexample`].
pub fn diagonal_cp(m: usize) -> Result<CpDecomposition> {
    generators::diagonal_counterexample(m)?;
    let pairs = (0..m)
        .map(|p| {
            let mut e = vec![0.0; m];
            e[p] = 1.0;
            VectorPair::new(e.clone(), e)
        })
        .collect();
    CpDecomposition::new(m, m, pairs)
}

/// Pair at parameter `t` with weight `w`: `(w^{1/4} u(t), w^{1/4} v(t))`.
fn weighted_pair<U, V>(w: f64, m: usize, n: usize, u: U, v: V) -> VectorPair
where
    U: Fn(usize) -> f64,
    V: Fn(usize) -> f64,
{
    let scale = w.powf(0.25);
    VectorPair::new(
        (0..m).map(|i| scale * u(i)).collect(),
        (0..n).map(|j| scale * v(j)).collect(),
    )
}

/// `t^k / k!` for `k = 0..dim`.
fn scaled_powers(t: f64, dim: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim);
    let mut cur = 1.0;
    for k in 0..dim {
        out.push(cur);
        cur *= t / (k as f64 + 1.0);
    }
    out
}

/// Exact finite CP decomposition of the Pascal tensor with `m + n - 1` terms.
pub fn pascal_cp(m: usize, n: usize) -> Result<CpDecomposition> {
    // reuse the generator's size policy
    generators::pascal(m, n)?;
    let rule = quadrature::gauss_laguerre(m + n - 1)?;
    pascal_cp_with_rule(m, n, &rule)
}

fn pascal_cp_with_rule(m: usize, n: usize, rule: &QuadratureRule) -> Result<CpDecomposition> {
    let pairs = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let u = scaled_powers(t, m);
            let v = scaled_powers(t, n);
            weighted_pair(w, m, n, |i| u[i], |j| v[j])
        })
        .collect();
    CpDecomposition::new(m, n, pairs)
}

/// Outcome of [`cauchy_cp`].
#[derive(Debug, Clone)]
pub struct CauchyCp {
    pub decomposition: CpDecomposition,
    pub rule: QuadratureRule,
    pub residual: Residual,
    /// Max-norm error after each refinement, coarsest first.
    pub error_history: Vec<f64>,
}

struct CauchyQuadrature {
    target: BiquadraticTensor,
    /// Shift `σ` moved from `v` to `u`: `u_i = e^{-(c_i+σ)s}`, `v_j = e^{-(d_j-σ)s}`.
    /// Leaves every product `u_i u_k v_j v_l` unchanged and keeps both exponent sets
    /// positive.
    shift: f64,
    breaks: Vec<f64>,
}

impl CauchyQuadrature {
    fn new(gv: &GeneratingVectors, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
        let (min_sum, i, j) = gv.min_mixed_sum();
        if min_sum <= 0.0 {
            return Err(Error::CauchyConditionViolated {
                i: i + 1,
                j: j + 1,
                value: min_sum,
            });
        }
        let target = generators::cauchy(gv)?;
        let alpha_min = 2.0 * min_sum;
        let max_sum = gv
            .c
            .iter()
            .flat_map(|c| gv.d.iter().map(move |d| c + d))
            .fold(f64::NEG_INFINITY, f64::max);
        let alpha_max = 2.0 * max_sum;
        // tail bound e^{-α S}/α <= tol/4 for every α >= α_min
        let log_arg = 4.0 / (tol * alpha_min);
        let span = if log_arg > 1.0 {
            log_arg.ln() / alpha_min
        } else {
            1.0 / alpha_min
        };
        // geometric initial mesh resolving the fastest decay near 0
        let first = span.min(1.0 / alpha_max);
        let mut breaks = vec![0.0, first];
        while *breaks.last().unwrap() < span {
            let next = (2.0 * breaks.last().unwrap()).min(span);
            breaks.push(next);
        }
        let cmin = gv.c.iter().copied().fold(f64::INFINITY, f64::min);
        let dmin = gv.d.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            target,
            shift: 0.5 * (dmin - cmin),
            breaks,
        })
    }

    fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    fn refine(&mut self) {
        let mut next = Vec::with_capacity(2 * self.breaks.len());
        for p in self.breaks.windows(2) {
            next.push(p[0]);
            next.push(0.5 * (p[0] + p[1]));
        }
        next.push(*self.breaks.last().unwrap());
        self.breaks = next;
    }

    fn build(&self, gv: &GeneratingVectors) -> Result<(CpDecomposition, QuadratureRule, Residual)> {
        let rule = quadrature::composite_legendre(&self.breaks, CAUCHY_NODES_PER_PANEL)?;
        let (m, n) = (gv.m(), gv.n());
        let pairs = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&s, &w)| {
                weighted_pair(
                    w,
                    m,
                    n,
                    |i| (-(gv.c[i] + self.shift) * s).exp(),
                    |j| (-(gv.d[j] - self.shift) * s).exp(),
                )
            })
            .collect();
        let d = CpDecomposition::new(m, n, pairs)?;
        let residual = Residual::between(&d.reconstruct(), &self.target)?;
        Ok((d, rule, residual))
    }
}

/// Nonnegative CP decomposition of a positive Cauchy tensor to max-norm accuracy
/// `tol`. Requires `c_i + d_j > 0` for every `(i, j)`.
///
/// The integral is truncated at `S = ln(4/(tol α_min))/α_min` with
/// `α_min = 2 min(c_i + d_j)`, discretized with 16-point Gauss–Legendre panels on a
/// geometric mesh, and every panel is bisected until the reconstruction error
/// against the closed-form entries is at most `tol`.
pub fn cauchy_cp(gv: &GeneratingVectors, tol: f64) -> Result<CauchyCp> {
    let mut quad = CauchyQuadrature::new(gv, tol)?;
    let mut history = Vec::new();
    loop {
        let (decomposition, rule, residual) = quad.build(gv)?;
        history.push(residual.max_abs_error);
        if residual.max_abs_error <= tol {
            return Ok(CauchyCp {
                decomposition,
                rule,
                residual,
                error_history: history,
            });
        }
        if 2 * quad.panels() > CAUCHY_MAX_PANELS {
            let best_error = history.iter().copied().fold(f64::INFINITY, f64::min);
            return Err(Error::ToleranceNotReached {
                tol,
                best_error,
                panels: quad.panels(),
            });
        }
        quad.refine();
    }
}

/// Reconstruction errors of the Cauchy quadrature over `levels` successive
/// panel bisections, regardless of whether `tol` is already met.
pub fn cauchy_refinement_errors(gv: &GeneratingVectors, tol: f64, levels: usize) -> Result<Vec<f64>> {
    let mut quad = CauchyQuadrature::new(gv, tol)?;
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            quad.refine();
        }
        out.push(quad.build(gv)?.2.max_abs_error);
    }
    Ok(out)
}

/// Numeric ranks of the `u` and `v` families and whether they span R^m and R^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanReport {
    pub u_rank: usize,
    pub v_rank: usize,
    pub u_spans: bool,
    pub v_spans: bool,
}

/// Span test on the decomposition vectors. Numeric rank counts singular values
/// above `σ_max · max(rows, cols) · 1e-12`.
pub fn spans(d: &CpDecomposition) -> SpanReport {
    let us: Vec<&[f64]> = d.pairs.iter().map(|p| p.u.as_slice()).collect();
    let vs: Vec<&[f64]> = d.pairs.iter().map(|p| p.v.as_slice()).collect();
    let u_rank = crate::linalg::numeric_rank(&us, d.m);
    let v_rank = crate::linalg::numeric_rank(&vs, d.n);
    SpanReport {
        u_rank,
        v_rank,
        u_spans: u_rank == d.m,
        v_spans: v_rank == d.n,
    }
}

/// Result of [`extract_factors`].
#[derive(Debug, Clone, PartialEq)]
pub enum FactorExtraction {
    Decomposable {
        factors: MatrixFactorPair,
        residual: f64,
    },
    NotDecomposable {
        /// Best candidate found; its outer product misses the tensor by `residual`.
        candidate: MatrixFactorPair,
        residual: f64,
    },
}

impl FactorExtraction {
    pub fn residual(&self) -> f64 {
        match self {
            Self::Decomposable { residual, .. } | Self::NotDecomposable { residual, .. } => *residual,
        }
    }

    pub fn is_decomposable(&self) -> bool {
        matches!(self, Self::Decomposable { .. })
    }
}

pub const DEFAULT_EXTRACT_TOL: f64 = 1e-10;

/// Tries to write `A = B⊗C`.
///
/// The pivot `(i0, j0, k0, l0)` is the diagonal entry `a[i0][j0][i0][j0]` of largest
/// magnitude, falling back to the largest entry overall when the diagonal vanishes.
/// With `a0` the pivot value, `B = F / sqrt|a0|` and `C = sign(a0) G / sqrt|a0|`
/// where `F_ik = a[i][j0][k][l0]` and `G_jl = a[i0][j][k0][l]`. The factorization is
/// unique only up to `B -> tB, C -> C/t`; this gauge sets
/// `|b_{i0 k0}| = |c_{j0 l0}|`.
///
/// The verdict is decomposable when the max-norm residual is at most
/// `tol * (1 + max|a|)`.
pub fn extract_factors(a: &BiquadraticTensor, tol: f64) -> Result<FactorExtraction> {
    let (m, n) = (a.m(), a.n());
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(FactorExtraction::Decomposable {
            factors: MatrixFactorPair::new(DMatrix::zeros(m, m), DMatrix::zeros(n, n))?,
            residual: 0.0,
        });
    }
    let mut pivot = (0, 0, 0, 0);
    let mut best = 0.0;
    for i in 0..m {
        for j in 0..n {
            let v = a.get(i, j, i, j).abs();
            if v > best {
                best = v;
                pivot = (i, j, i, j);
            }
        }
    }
    if best <= 1e-14 * scale {
        best = 0.0;
        for i in 0..m {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..n {
                        let v = a.get(i, j, k, l).abs();
                        if v > best {
                            best = v;
                            pivot = (i, j, k, l);
                        }
                    }
                }
            }
        }
    }
    let (i0, j0, k0, l0) = pivot;
    let a0 = a.get(i0, j0, k0, l0);
    let root = a0.abs().sqrt();
    let sign = a0.signum();
    let b = DMatrix::from_fn(m, m, |i, k| a.get(i, j0, k, l0) / root);
    let c = DMatrix::from_fn(n, n, |j, l| sign * a.get(i0, j, k0, l) / root);
    let candidate = MatrixFactorPair::new(b, c)?;
    let residual = generators::outer(&candidate)?.max_abs_diff(a)?;
    if residual <= tol * (1.0 + scale) {
        Ok(FactorExtraction::Decomposable {
            factors: candidate,
            residual,
        })
    } else {
        Ok(FactorExtraction::NotDecomposable {
            candidate,
            residual,
        })
    }
}

fn check_factor_list(list: &[Vec<f64>], name: &str) -> Result<usize> {
    let dim = list.first().map(Vec::len).ok_or(Error::EmptyDecomposition)?;
    for (r, vec) in list.iter().enumerate() {
        if vec.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{name} factor {} has length {}, expected {dim}",
                r + 1,
                vec.len()
            )));
        }
        if let Some(&value) = vec.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::NegativeFactor {
                index: r + 1,
                value,
            });
        }
    }
    Ok(dim)
}

/// CP decomposition of `(Σ_r u_r u_rᵀ) ⊗ (Σ_s v_s v_sᵀ)` from nonnegative matrix CP
/// factors: all `r_B · r_C` cross pairs `(u_r, v_s)`, ordered with `s` varying fastest.
pub fn lift_matrix_cp(b_factors: &[Vec<f64>], c_factors: &[Vec<f64>]) -> Result<CpDecomposition> {
    let m = check_factor_list(b_factors, "B")?;
    let n = check_factor_list(c_factors, "C")?;
    let pairs = b_factors
        .iter()
        .flat_map(|u| c_factors.iter().map(move |v| VectorPair::new(u.clone(), v.clone())))
        .collect();
    CpDecomposition::new(m, n, pairs)
}

/// Gram sum `Σ_r u_r u_rᵀ`.
pub fn gram_sum(factors: &[Vec<f64>]) -> DMatrix<f64> {
    let dim = factors.first().map_or(0, Vec::len);
    let mut g = DMatrix::zeros(dim, dim);
    for f in factors {
        for r in 0..dim {
            for c in r..dim {
                let v = f[r] * f[c];
                g[(r, c)] += v;
                if r != c {
                    g[(c, r)] += v;
                }
            }
        }
    }
    g
}

/// Term count after dropping pairs whose `u` or `v` is below
/// `1e-14 ·` the largest component in the decomposition. An upper bound on the
/// CP rank, nothing more.
pub fn cprank_upper(d: &CpDecomposition) -> usize {
    let threshold = 1e-14 * d.max_component();
    let big = |v: &[f64]| v.iter().any(|x| x.abs() > threshold);
    d.pairs
        .iter()
        .filter(|p| big(&p.u) && big(&p.v))
        .count()
}

//! Numerical positivity certificates for biquadratic forms.
//!
//! * psd / pd: minimum of `F(x, y)` over `‖x‖ = ‖y‖ = 1`, by alternating
//!   minimum-eigenvector updates on `G(y)` and `H(x)` from many starts.
//! * copositive / strictly copositive: minimum of `F` over the product of unit
//!   simplices (equivalent to the nonnegative orthants by homogeneity), by
//!   projected gradient descent plus vertex and grid scans.
//!
//! Positive verdicts are numeric: the minimizers are heuristics and the true
//! minimum may be lower. Negative verdicts come with a witness whose form value is
//! re-evaluated and is below the threshold.

use nalgebra::DMatrix;
use rand::Rng;

use crate::decompose::{self, CpDecomposition, SpanReport};
use crate::error::{Error, Result};
use crate::generators::{self, GeneratingVectors, MatrixFactorPair};
use crate::linalg::{check_symmetric, min_eigenpair, min_eigenvalue, symmetric_eigen};
use crate::random::{self, CorpusRng};
use crate::tensor::BiquadraticTensor;

const INNER_TOL: f64 = 1e-12;
const MAX_ALTERNATIONS: usize = 2000;
const MAX_PGD_ITERS: usize = 2000;
const ARMIJO: f64 = 1e-4;
/// Largest dimension accepted by the matrix copositivity and CP routines.
pub const MATRIX_DIM_LIMIT: usize = 16;

/// Multistart settings shared by the minimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    /// Random starts on top of the deterministic ones; `None` means `8 + m + n`.
    pub starts: Option<usize>,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            starts: None,
            seed: 0,
        }
    }
}

impl MinimizeOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { starts: None, seed }
    }

    fn random_starts(&self, m: usize, n: usize) -> usize {
        self.starts.unwrap_or(8 + m + n)
    }
}

/// Verdict threshold `1e-8 · (1 + max|a|)`.
pub fn default_tol(a: &BiquadraticTensor) -> f64 {
    1e-8 * (1.0 + a.max_abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereMinResult {
    /// Best value of `F` found on the product of unit spheres (an upper bound on
    /// the true minimum).
    pub value: f64,
    pub argmin_x: Vec<f64>,
    pub argmin_y: Vec<f64>,
    /// Minimum over the coarse deterministic sample; `value <= grid_min` always.
    pub grid_min: f64,
    pub starts_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexMin {
    pub i: usize,
    pub j: usize,
    /// `a[i][j][i][j]`, the form at `(e_i, e_j)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMinResult {
    pub value: f64,
    pub argmin_x: Vec<f64>,
    pub argmin_y: Vec<f64>,
    pub starts_used: usize,
    /// Smallest vertex value `min_{i,j} a[i][j][i][j]`.
    pub vertex_min: VertexMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Psd,
    Pd,
    Copositive,
    StrictCopositive,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Psd => "psd",
            Self::Pd => "pd",
            Self::Copositive => "copositive",
            Self::StrictCopositive => "strict-copositive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `F(x, y)` re-evaluated from the tensor.
    pub form_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub check: CheckKind,
    pub verdict: bool,
    pub value: f64,
    pub threshold: f64,
    /// Present exactly when the verdict is negative.
    pub witness: Option<Witness>,
    pub starts: usize,
    pub seed: u64,
}

// ---------------------------------------------------------------------------
// candidate grids

/// Unit vectors with entries in {-1, 0, 1} (first nonzero positive) for small
/// dimensions, otherwise `e_i` and `(e_i ± e_j)/√2`.
fn sphere_candidates(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if dim <= 5 {
        let total = 3usize.pow(dim as u32);
        for code in 0..total {
            let mut v = vec![0.0; dim];
            let mut c = code;
            for slot in v.iter_mut() {
                *slot = (c % 3) as f64 - 1.0;
                c /= 3;
            }
            match v.iter().copied().find(|t| *t != 0.0) {
                Some(first) if first > 0.0 => {}
                _ => continue,
            }
            let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            out.push(v.into_iter().map(|t| t / norm).collect());
        }
    } else {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            out.push(e);
            for j in (i + 1)..dim {
                for sign in [1.0, -1.0] {
                    let mut v = vec![0.0; dim];
                    v[i] = h;
                    v[j] = sign * h;
                    out.push(v);
                }
            }
        }
    }
    out
}

/// All points of the unit simplex with coordinates in `{0, 1/h, ..., 1}` for the
/// largest `h <= 8` giving at most `max_points` points.
fn simplex_candidates(dim: usize, max_points: usize) -> Vec<Vec<f64>> {
    fn count(dim: usize, h: usize) -> usize {
        // C(h + dim - 1, dim - 1), saturating
        let mut acc: usize = 1;
        for t in 1..dim {
            acc = acc.saturating_mul(h + t) / t;
        }
        acc
    }
    fn rec(dim: usize, left: usize, h: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == dim {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / h as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, h, cur, out);
            cur.pop();
        }
    }
    let mut h = 1;
    while h < 8 && count(dim, h + 1) <= max_points {
        h += 1;
    }
    let mut out = Vec::new();
    rec(dim, h, h, &mut Vec::with_capacity(dim), &mut out);
    out
}

fn quad(mat: &DMatrix<f64>, v: &[f64]) -> f64 {
    let dim = v.len();
    let mut total = 0.0;
    for r in 0..dim {
        let mut row = 0.0;
        for c in 0..dim {
            row += mat[(r, c)] * v[c];
        }
        total += v[r] * row;
    }
    total
}

fn mat_vec(mat: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..mat.nrows())
        .map(|r| (0..v.len()).map(|c| mat[(r, c)] * v[c]).sum())
        .collect()
}

/// Best pair over `xs × ys`, scanning `yᵀ H(x) y`. Ties go to the earliest pair.
fn grid_scan(a: &BiquadraticTensor, xs: &[Vec<f64>], ys: &[Vec<f64>]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for (p, x) in xs.iter().enumerate() {
        let h = a.contract_x_unchecked(x);
        for (q, y) in ys.iter().enumerate() {
            let v = quad(&h, y);
            if v < best.0 {
                best = (v, p, q);
            }
        }
    }
    best
}

/// Shrinks candidate lists so that the scan stays around `budget` operations.
fn trim_grid(mut xs: Vec<Vec<f64>>, mut ys: Vec<Vec<f64>>, m: usize, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    const BUDGET: usize = 20_000_000;
    let cost = |xs: &Vec<Vec<f64>>, ys: &Vec<Vec<f64>>| xs.len() * (m * m * n * n + ys.len() * n * n);
    while cost(&xs, &ys) > BUDGET && (xs.len() > m || ys.len() > n) {
        if xs.len() >= ys.len() && xs.len() > m {
            xs.truncate((xs.len() / 2).max(m));
        } else {
            ys.truncate((ys.len() / 2).max(n));
        }
    }
    (xs, ys)
}

// ---------------------------------------------------------------------------
// sphere minimization

struct Alternation {
    value: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

fn alternate(a: &BiquadraticTensor, y0: &[f64]) -> Result<Alternation> {
    let mut y = y0.to_vec();
    let mut x;
    let mut value = f64::INFINITY;
    let mut iter = 0;
    loop {
        let g = a.contract_y_unchecked(&y);
        x = min_eigenpair(&g, "G(y) in sphere minimization")?.1;
        let h = a.contract_x_unchecked(&x);
        let (mu, y_next) = min_eigenpair(&h, "H(x) in sphere minimization")?;
        y = y_next;
        iter += 1;
        let done = (value - mu).abs() <= INNER_TOL * (1.0 + mu.abs()) || iter >= MAX_ALTERNATIONS;
        value = mu;
        if done {
            break;
        }
    }
    // report the form at the returned point rather than the eigenvalue
    let value = value.min(a.form_unchecked(&x, &y));
    Ok(Alternation { value, x, y })
}

/// Minimum of the form on the product of unit spheres.
///
/// Starts: the best pair of the deterministic grid, every coordinate pair
/// `(e_i, e_j)`, then `opts.starts` random unit pairs from `opts.seed`. The best
/// value wins; earlier starts win ties.
pub fn sphere_min(a: &BiquadraticTensor, opts: &MinimizeOptions) -> Result<SphereMinResult> {
    let (m, n) = (a.m(), a.n());
    let (xs, ys) = trim_grid(sphere_candidates(m), sphere_candidates(n), m, n);
    let (grid_min, gp, gq) = grid_scan(a, &xs, &ys);

    let mut starts: Vec<Vec<f64>> = vec![ys[gq].clone()];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        starts.push(e);
    }
    let mut rng = random::rng(opts.seed);
    for _ in 0..opts.random_starts(m, n) {
        starts.push(random::unit_vec(n, &mut rng));
    }

    let mut best = Alternation {
        value: grid_min,
        x: xs[gp].clone(),
        y: ys[gq].clone(),
    };
    let mut failures = 0;
    for y0 in &starts {
        let run = alternate(a, y0).or_else(|_| {
            let nudged: Vec<f64> = y0.iter().map(|t| t + 1e-3 * rng.random_range(-1.0..1.0)).collect();
            alternate(a, &nudged)
        });
        match run {
            Ok(run) if run.value < best.value => best = run,
            Ok(_) => {}
            Err(_) => failures += 1,
        }
    }
    if failures == starts.len() {
        return Err(Error::EigenNonConvergence {
            context: "every sphere minimization start failed",
        });
    }
    // every coordinate start e_j sweeps all (e_i, e_j) through its first x-update
    Ok(SphereMinResult {
        value: best.value,
        argmin_x: best.x,
        argmin_y: best.y,
        grid_min,
        starts_used: starts.len(),
    })
}

fn verdict_from(
    a: &BiquadraticTensor,
    check: CheckKind,
    value: f64,
    threshold: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    starts: usize,
    seed: u64,
) -> Verdict {
    let verdict = value >= threshold;
    let witness = (!verdict).then(|| {
        let form_value = a.form_unchecked(&x, &y);
        Witness { x, y, form_value }
    });
    Verdict {
        check,
        verdict,
        value,
        threshold,
        witness,
        starts,
        seed,
    }
}

fn resolve_tol(a: &BiquadraticTensor, tol: Option<f64>) -> Result<f64> {
    let tol = tol.unwrap_or_else(|| default_tol(a));
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be >= 0, got {tol}")));
    }
    Ok(tol)
}

/// psd iff the sphere minimum is at least `-tol`.
pub fn is_psd(a: &BiquadraticTensor, tol: Option<f64>, opts: &MinimizeOptions) -> Result<Verdict> {
    let tol = resolve_tol(a, tol)?;
    let r = sphere_min(a, opts)?;
    Ok(verdict_from(a, CheckKind::Psd, r.value, -tol, r.argmin_x, r.argmin_y, r.starts_used, opts.seed))
}

/// pd iff the sphere minimum is at least `+tol`.
pub fn is_pd(a: &BiquadraticTensor, tol: Option<f64>, opts: &MinimizeOptions) -> Result<Verdict> {
    let tol = resolve_tol(a, tol)?;
    let r = sphere_min(a, opts)?;
    Ok(verdict_from(a, CheckKind::Pd, r.value, tol, r.argmin_x, r.argmin_y, r.starts_used, opts.seed))
}

// ---------------------------------------------------------------------------
// simplex minimization

/// Euclidean projection onto the unit simplex by sorting.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (k as f64 + 1.0);
        if s - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&t| (t - theta).max(0.0)).collect();
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|t| *t /= total);
    }
    out
}

/// Objective over a product of simplices: value and per-block gradients.
trait BlockObjective {
    fn eval(&self, blocks: &[Vec<f64>]) -> f64;
    fn grad(&self, blocks: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>);
}

struct TensorObjective<'a>(&'a BiquadraticTensor);

impl BlockObjective for TensorObjective<'_> {
    fn eval(&self, blocks: &[Vec<f64>]) -> f64 {
        self.0.form_unchecked(&blocks[0], &blocks[1])
    }

    fn grad(&self, blocks: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
        let (x, y) = (&blocks[0], &blocks[1]);
        let g = self.0.contract_y_unchecked(y);
        let h = self.0.contract_x_unchecked(x);
        let gx: Vec<f64> = mat_vec(&g, x).into_iter().map(|t| 2.0 * t).collect();
        let gy: Vec<f64> = mat_vec(&h, y).into_iter().map(|t| 2.0 * t).collect();
        let value = quad(&g, x);
        (value, vec![gx, gy])
    }
}

struct MatrixObjective<'a>(&'a DMatrix<f64>);

impl BlockObjective for MatrixObjective<'_> {
    fn eval(&self, blocks: &[Vec<f64>]) -> f64 {
        quad(self.0, &blocks[0])
    }

    fn grad(&self, blocks: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
        let mx = mat_vec(self.0, &blocks[0]);
        let value = blocks[0].iter().zip(&mx).map(|(a, b)| a * b).sum();
        (value, vec![mx.into_iter().map(|t| 2.0 * t).collect()])
    }
}

/// Projected gradient descent with backtracking (halving from step 1).
fn projected_descent<O: BlockObjective>(obj: &O, start: Vec<Vec<f64>>) -> (f64, Vec<Vec<f64>>) {
    let mut point = start;
    let (mut value, mut grads) = obj.grad(&point);
    for _ in 0..MAX_PGD_ITERS {
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-20 {
            let trial: Vec<Vec<f64>> = point
                .iter()
                .zip(&grads)
                .map(|(b, g)| {
                    let moved: Vec<f64> = b.iter().zip(g).map(|(p, d)| p - step * d).collect();
                    project_to_simplex(&moved)
                })
                .collect();
            // Armijo along the projection arc: F(z') <= F(z) + σ ∇Fᵀ(z' - z)
            let slope: f64 = trial
                .iter()
                .zip(&point)
                .zip(&grads)
                .map(|((t, p), g)| t.iter().zip(p).zip(g).map(|((t, p), g)| g * (t - p)).sum::<f64>())
                .sum();
            let trial_value = obj.eval(&trial);
            if slope < 0.0 && trial_value <= value + ARMIJO * slope {
                accepted = Some((trial_value, trial));
                break;
            }
            if slope >= 0.0 {
                break;
            }
            step *= 0.5;
        }
        let Some((new_value, new_point)) = accepted else {
            break;
        };
        let change = value - new_value;
        point = new_point;
        let (v, g) = obj.grad(&point);
        value = v;
        grads = g;
        if change <= INNER_TOL * (1.0 + value.abs()) {
            break;
        }
    }
    (value, point)
}

/// Minimum of the form over `Δ_m × Δ_n`.
///
/// Combines the exhaustive vertex scan `(e_i, e_j)`, a coarse simplex grid, and
/// projected gradient descent from the best vertex, the best grid point, the
/// barycenters, and `opts.starts` random simplex points.
pub fn simplex_min(a: &BiquadraticTensor, opts: &MinimizeOptions) -> Result<SimplexMinResult> {
    let (m, n) = (a.m(), a.n());
    let mut vertex_min = VertexMin {
        i: 0,
        j: 0,
        value: f64::INFINITY,
    };
    for i in 0..m {
        for j in 0..n {
            let v = a.get(i, j, i, j);
            if v < vertex_min.value {
                vertex_min = VertexMin { i, j, value: v };
            }
        }
    }
    let basis = |dim: usize, k: usize| {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        e
    };
    let (xs, ys) = trim_grid(simplex_candidates(m, 64), simplex_candidates(n, 64), m, n);
    let (grid_value, gp, gq) = grid_scan(a, &xs, &ys);

    let mut starts = vec![
        vec![basis(m, vertex_min.i), basis(n, vertex_min.j)],
        vec![xs[gp].clone(), ys[gq].clone()],
        vec![vec![1.0 / m as f64; m], vec![1.0 / n as f64; n]],
    ];
    let mut rng = random::rng(opts.seed);
    for _ in 0..opts.random_starts(m, n) {
        starts.push(vec![random::simplex_vec(m, &mut rng), random::simplex_vec(n, &mut rng)]);
    }

    let mut best = if vertex_min.value <= grid_value {
        (vertex_min.value, starts[0].clone())
    } else {
        (grid_value, starts[1].clone())
    };
    let obj = TensorObjective(a);
    for start in &starts {
        let (value, point) = projected_descent(&obj, start.clone());
        if value < best.0 {
            best = (value, point);
        }
    }
    let (value, mut point) = best;
    let argmin_y = point.pop().unwrap();
    let argmin_x = point.pop().unwrap();
    Ok(SimplexMinResult {
        value,
        argmin_x,
        argmin_y,
        starts_used: starts.len(),
        vertex_min,
    })
}

/// Copositive iff the simplex minimum is at least `-tol`.
pub fn is_copositive(a: &BiquadraticTensor, tol: Option<f64>, opts: &MinimizeOptions) -> Result<Verdict> {
    let tol = resolve_tol(a, tol)?;
    let r = simplex_min(a, opts)?;
    Ok(verdict_from(a, CheckKind::Copositive, r.value, -tol, r.argmin_x, r.argmin_y, r.starts_used, opts.seed))
}

/// Strictly copositive iff the simplex minimum is at least `+tol`.
pub fn is_strictly_copositive(
    a: &BiquadraticTensor,
    tol: Option<f64>,
    opts: &MinimizeOptions,
) -> Result<Verdict> {
    let tol = resolve_tol(a, tol)?;
    let r = simplex_min(a, opts)?;
    Ok(verdict_from(
        a,
        CheckKind::StrictCopositive,
        r.value,
        tol,
        r.argmin_x,
        r.argmin_y,
        r.starts_used,
        opts.seed,
    ))
}

// ---------------------------------------------------------------------------
// matrices

fn check_small_symmetric(mat: &DMatrix<f64>) -> Result<()> {
    check_symmetric(mat)?;
    if mat.nrows() == 0 || mat.nrows() > MATRIX_DIM_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "matrix dimension must be in 1..={MATRIX_DIM_LIMIT}, got {}",
            mat.nrows()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSimplexMin {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub starts_used: usize,
}

/// Minimum of `xᵀMx` over the unit simplex.
pub fn matrix_simplex_min(mat: &DMatrix<f64>, opts: &MinimizeOptions) -> Result<MatrixSimplexMin> {
    check_small_symmetric(mat)?;
    let dim = mat.nrows();
    let mut best = (f64::INFINITY, Vec::new());
    let mut starts: Vec<Vec<Vec<f64>>> = Vec::new();
    for p in simplex_candidates(dim, 256) {
        let v = quad(mat, &p);
        if v < best.0 {
            best = (v, p);
        }
    }
    starts.push(vec![best.1.clone()]);
    starts.push(vec![vec![1.0 / dim as f64; dim]]);
    let mut rng = random::rng(opts.seed);
    for _ in 0..opts.starts.unwrap_or(8 + dim) {
        starts.push(vec![random::simplex_vec(dim, &mut rng)]);
    }
    let obj = MatrixObjective(mat);
    for start in &starts {
        let (value, mut point) = projected_descent(&obj, start.clone());
        if value < best.0 {
            best = (value, point.pop().unwrap());
        }
    }
    Ok(MatrixSimplexMin {
        value: best.0,
        argmin: best.1,
        starts_used: starts.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixVerdict {
    pub copositive: bool,
    pub value: f64,
    /// Simplex point with `xᵀMx < -tol`, present on a negative verdict.
    pub witness: Option<Vec<f64>>,
}

pub fn matrix_copositive(mat: &DMatrix<f64>, tol: f64, opts: &MinimizeOptions) -> Result<MatrixVerdict> {
    let r = matrix_simplex_min(mat, opts)?;
    let copositive = r.value >= -tol;
    Ok(MatrixVerdict {
        copositive,
        value: r.value,
        witness: (!copositive).then_some(r.argmin),
    })
}

/// Outcome of [`matrix_cp_heuristic`]. There is no "not CP" outcome.
#[derive(Debug, Clone, PartialEq)]
pub enum CpHeuristic {
    /// Nonnegative vectors with `max|M - Σ u uᵀ| = residual <= tol`.
    Factors { factors: Vec<Vec<f64>>, residual: f64 },
    Inconclusive {
        /// Entrywise nonnegative and psd (to `tol`). Failing this screen rules out
        /// complete positivity; passing it suffices only for dimension <= 4.
        doubly_nonnegative: bool,
        /// Best factorization residual reached, when a search was run.
        best_residual: Option<f64>,
    },
}

/// Real roots of the monic cubic `s³ + b s² + c s + d`.
fn real_cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    let mut roots = if disc > 0.0 {
        let sq = disc.sqrt();
        vec![(-0.5 * q + sq).cbrt() + (-0.5 * q - sq).cbrt()]
    } else if p == 0.0 {
        vec![0.0]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };
    for t in roots.iter_mut() {
        *t -= shift;
        for _ in 0..2 {
            let f = ((*t + b) * *t + c) * *t + d;
            let df = (3.0 * *t + 2.0 * b) * *t + c;
            if df != 0.0 {
                *t -= f / df;
            }
        }
    }
    roots
}

/// Coordinate descent on `‖M - HHᵀ‖_F²` over `H >= 0`. Each update minimizes the
/// quartic in a single entry exactly.
fn symnmf_coordinate_descent(mat: &DMatrix<f64>, mut h: DMatrix<f64>, tol: f64, sweeps: usize) -> (DMatrix<f64>, f64) {
    let (dim, rank) = (h.nrows(), h.ncols());
    let mut e = mat - &h * h.transpose();
    for _ in 0..sweeps {
        for j in 0..rank {
            for i in 0..dim {
                let hij = h[(i, j)];
                let col_norm2: f64 = h.column(j).norm_squared();
                let eh: f64 = (0..dim).map(|t| e[(i, t)] * h[(t, j)]).sum();
                let eii = e[(i, i)];
                let quartic = |s: f64| {
                    s.powi(4) + 4.0 * hij * s.powi(3) + 2.0 * (col_norm2 + hij * hij - eii) * s * s
                        - 4.0 * eh * s
                };
                let mut best = (0.0, 0.0);
                let mut consider = |s: f64| {
                    if s >= -hij && s.is_finite() {
                        let v = quartic(s);
                        if v < best.1 {
                            best = (s, v);
                        }
                    }
                };
                consider(-hij);
                for s in real_cubic_roots(3.0 * hij, col_norm2 + hij * hij - eii, -eh) {
                    consider(s);
                }
                let s = best.0;
                if s == 0.0 {
                    continue;
                }
                for t in 0..dim {
                    let delta = s * h[(t, j)];
                    e[(i, t)] -= delta;
                    e[(t, i)] -= delta;
                }
                e[(i, i)] -= s * s;
                h[(i, j)] = (hij + s).max(0.0);
            }
        }
        if e.amax() <= tol {
            break;
        }
    }
    let residual = (mat - &h * h.transpose()).amax();
    (h, residual)
}

/// Damped Gauss–Newton on the positive entries of `H` for `HHᵀ = M`, entries
/// clamped at zero after each step.
fn gauss_newton_polish(mat: &DMatrix<f64>, mut h: DMatrix<f64>, tol: f64) -> (DMatrix<f64>, f64) {
    let dim = h.nrows();
    let residual_of = |h: &DMatrix<f64>| (mat - h * h.transpose()).amax();
    let mut current = residual_of(&h);
    let mut damping = 1e-6;
    for _ in 0..100 {
        if current <= tol {
            break;
        }
        let free: Vec<(usize, usize)> = (0..h.ncols())
            .flat_map(|j| (0..dim).map(move |i| (i, j)))
            .filter(|&(i, j)| h[(i, j)] > 0.0)
            .collect();
        if free.is_empty() {
            break;
        }
        let rows: Vec<(usize, usize)> = (0..dim).flat_map(|r| (r..dim).map(move |c| (r, c))).collect();
        let e = mat - &h * h.transpose();
        let mut jac = DMatrix::zeros(rows.len(), free.len());
        for (q, &(r, c)) in rows.iter().enumerate() {
            for (p, &(i, j)) in free.iter().enumerate() {
                let mut d = 0.0;
                if r == i {
                    d += h[(c, j)];
                }
                if c == i {
                    d += h[(r, j)];
                }
                jac[(q, p)] = d;
            }
        }
        let rhs = nalgebra::DVector::from_iterator(rows.len(), rows.iter().map(|&(r, c)| e[(r, c)]));
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * rhs;
        let mut improved = false;
        while damping < 1e12 {
            let mut lhs = normal.clone();
            for p in 0..free.len() {
                lhs[(p, p)] += damping * (1.0 + normal[(p, p)]);
            }
            let Some(step) = lhs.cholesky().map(|ch| ch.solve(&grad)) else {
                damping *= 10.0;
                continue;
            };
            let mut trial = h.clone();
            for (p, &(i, j)) in free.iter().enumerate() {
                trial[(i, j)] = (trial[(i, j)] + step[p]).max(0.0);
            }
            let r = residual_of(&trial);
            if r < current {
                h = trial;
                current = r;
                damping = (damping * 0.1).max(1e-15);
                improved = true;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (h, current)
}

/// Searches for `M = Σ_r u_r u_rᵀ` with `u_r >= 0`.
///
/// Screens for double nonnegativity first, then tries exact shortcuts (diagonal,
/// rank one) and finally seeded symmetric nonnegative factorization by coordinate
/// descent for inner dimensions `rank(M) ..= dim(dim+1)/2`.
pub fn matrix_cp_heuristic(mat: &DMatrix<f64>, tol: f64, iters: usize, seed: u64) -> Result<CpHeuristic> {
    check_small_symmetric(mat)?;
    let dim = mat.nrows();
    let eig = symmetric_eigen(mat, "matrix CP screen")?;
    let dnn = mat.min() >= -tol && eig.values[0] >= -tol;
    if !dnn {
        return Ok(CpHeuristic::Inconclusive {
            doubly_nonnegative: false,
            best_residual: None,
        });
    }
    let finish = |factors: Vec<Vec<f64>>| {
        let residual = (mat - decompose::gram_sum(&factors)).amax();
        (residual <= tol).then_some(CpHeuristic::Factors { factors, residual })
    };

    // diagonal
    let off_diag = (0..dim).all(|r| (0..dim).all(|c| r == c || mat[(r, c)] == 0.0));
    if off_diag {
        let factors = (0..dim)
            .filter(|&r| mat[(r, r)] > 0.0)
            .map(|r| {
                let mut e = vec![0.0; dim];
                e[r] = mat[(r, r)].sqrt();
                e
            })
            .collect::<Vec<_>>();
        if factors.is_empty() {
            return Ok(CpHeuristic::Factors {
                factors: vec![vec![0.0; dim]],
                residual: 0.0,
            });
        }
        if let Some(done) = finish(factors) {
            return Ok(done);
        }
    }

    // rank one with a sign-consistent eigenvector
    let lead = eig.values[dim - 1];
    let rank = eig.values.iter().filter(|&&v| v > tol).count();
    if rank == 1 {
        let v: Vec<f64> = eig.vectors.column(dim - 1).iter().map(|t| t * lead.sqrt()).collect();
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        let u: Vec<f64> = v.iter().map(|t| (sign * t).max(0.0)).collect();
        if let Some(done) = finish(vec![u]) {
            return Ok(done);
        }
    }

    let mut rng = random::rng(seed);
    let mut best_residual = f64::INFINITY;
    let max_rank = dim * (dim + 1) / 2;
    let scale = (mat.mean().max(0.0) + 1e-300).sqrt();
    for inner in rank.max(1)..=max_rank {
        for attempt in 0..4 {
            let init = if attempt == 0 {
                // |eigenvector| columns, largest eigenvalues first
                DMatrix::from_fn(dim, inner, |r, c| {
                    let col = dim - 1 - (c % dim);
                    (eig.vectors[(r, col)] * eig.values[col].max(0.0).sqrt()).abs()
                })
            } else {
                DMatrix::from_fn(dim, inner, |_, _| scale * rng.random::<f64>())
            };
            let (h, residual) = symnmf_coordinate_descent(mat, init, tol, iters);
            let (h, residual) = if residual > tol && residual < 1e-2 * (1.0 + mat.amax()) {
                gauss_newton_polish(mat, h, tol)
            } else {
                (h, residual)
            };
            best_residual = best_residual.min(residual);
            if residual <= tol {
                let factors: Vec<Vec<f64>> = (0..inner)
                    .map(|c| h.column(c).iter().copied().collect::<Vec<f64>>())
                    .filter(|v: &Vec<f64>| v.iter().any(|t| *t > 0.0))
                    .collect();
                if let Some(done) = finish(factors) {
                    return Ok(done);
                }
            }
        }
    }
    Ok(CpHeuristic::Inconclusive {
        doubly_nonnegative: true,
        best_residual: Some(best_residual),
    })
}

// ---------------------------------------------------------------------------
// duality and strong complete positivity

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub pairs: usize,
    pub min_pairing: f64,
    pub min_index: usize,
    pub pairings: Vec<f64>,
}

/// The `k`-th copositive partner: cycles through entrywise-nonnegative tensors,
/// positive Cauchy tensors, outer products of psd matrices and tensors with a psd
/// flattening (the last two have negative entries in general).
fn copositive_sample(k: usize, m: usize, n: usize, rng: &mut CorpusRng) -> Result<BiquadraticTensor> {
    match k % 4 {
        0 => random::random_symmetric(m, n, 0.0, 1.0, rng),
        1 => {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
            let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
            let c: Vec<f64> = (0..m)
                .map(|_| rng.random_range((0.05 - dmin)..2.0))
                .map(|v: f64| if v == 0.0 { 0.01 } else { v })
                .collect();
            generators::cauchy(&GeneratingVectors::new(c, d)?)
        }
        2 => {
            let gram = |dim: usize, rng: &mut CorpusRng| {
                let f = DMatrix::from_fn(dim, dim, |_, _| {
                    rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, rng)
                });
                &f * f.transpose()
            };
            let b = gram(m, rng);
            let c = gram(n, rng);
            // enforce exact symmetry after the product
            let sym = |x: DMatrix<f64>| (&x + x.transpose()) * 0.5;
            generators::outer(&MatrixFactorPair::new(sym(b), sym(c))?)
        }
        _ => {
            let r = rng.random_range(1..=4);
            Ok(random::random_weak_cp(m, n, r, rng)?.reconstruct())
        }
    }
}

/// Pairs `count` random CPB tensors with random copositive tensors and checks
/// `A • B >= -1e-12` for each. A violation is a hard error naming the sample.
pub fn duality_sample_check(count: usize, seed: u64) -> Result<DualityReport> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let mut rng = random::rng(seed);
    let mut pairings = Vec::with_capacity(count);
    let mut min = (f64::INFINITY, 0);
    for k in 0..count {
        let m = rng.random_range(1..=4);
        let n = rng.random_range(1..=4);
        let r = rng.random_range(1..=5);
        let cpb = random::random_cpb(m, n, r, &mut rng)?.reconstruct();
        let cop = copositive_sample(k, m, n, &mut rng)?;
        let value = cpb.pairing(&cop)?;
        if value < -1e-12 {
            return Err(Error::DualityViolation { index: k, value });
        }
        if value < min.0 {
            min = (value, k);
        }
        pairings.push(value);
    }
    Ok(DualityReport {
        pairs: count,
        min_pairing: min.0,
        min_index: min.1,
        pairings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongCpbVerdict {
    pub spans: SpanReport,
    /// Nonnegative decomposition whose vectors span both spaces.
    pub strongly_cpb: bool,
    pub pd: Verdict,
    /// False only if the tensor is pd while a span fails, which would contradict
    /// "CPB and pd implies strongly CPB" (up to the numeric span test).
    pub consistent: bool,
}

/// Span verdicts for a nonnegative decomposition of `a`, cross-checked against
/// positive definiteness.
pub fn strongly_cpb_check(
    d: &CpDecomposition,
    a: &BiquadraticTensor,
    tol: f64,
    opts: &MinimizeOptions,
) -> Result<StrongCpbVerdict> {
    if !d.is_nonneg() {
        return Err(Error::InvalidParameter(
            "strong complete positivity needs a nonnegative decomposition".into(),
        ));
    }
    let err = d.reconstruct().max_abs_diff(a)?;
    let allowed = tol * (1.0 + a.max_abs());
    if err > allowed {
        return Err(Error::ReconstructionMismatch {
            max_abs_error: err,
            tol: allowed,
        });
    }
    let spans = decompose::spans(d);
    let pd = is_pd(a, None, opts)?;
    let both = spans.u_spans && spans.v_spans;
    Ok(StrongCpbVerdict {
        spans,
        strongly_cpb: both,
        consistent: !pd.verdict || both,
        pd,
    })
}

/// Smallest eigenvalue of a symmetric matrix (exposed for reports).
pub fn matrix_min_eigenvalue(mat: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(mat)?;
    min_eigenvalue(mat, "matrix eigenvalues")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cauchy, diagonal_counterexample, pascal};

    fn e(dim: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    }

    fn identity_like(m: usize, n: usize) -> BiquadraticTensor {
        generators::outer(
            &MatrixFactorPair::new(DMatrix::identity(m, m), DMatrix::identity(n, n)).unwrap(),
        )
        .unwrap()
    }

    /// Dense oracle: angle grid over x with the exact inner minimum over y.
    fn grid_oracle(a: &BiquadraticTensor, step: f64) -> f64 {
        let pts: Vec<Vec<f64>> = match a.m() {
            1 => vec![vec![1.0]],
            2 => (0..)
                .map(|k| k as f64 * step)
                .take_while(|t| *t < std::f64::consts::PI)
                .map(|t| vec![t.cos(), t.sin()])
                .collect(),
            3 => {
                let mut v = Vec::new();
                let mut th = 0.0;
                while th <= std::f64::consts::PI + 1e-12 {
                    let mut ph = 0.0;
                    while ph < std::f64::consts::PI {
                        v.push(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                        ph += step;
                    }
                    th += step;
                }
                v
            }
            _ => unreachable!(),
        };
        pts.iter()
            .map(|x| {
                let h = a.contract_x(x).unwrap();
                nalgebra::SymmetricEigen::new(h).eigenvalues.min()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_to_simplex(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[0.5, 0.5, -3.0, 1.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p.iter().all(|t| *t >= 0.0));
        assert_eq!(simplex_candidates(1, 64), vec![vec![1.0]]);
        assert!(simplex_candidates(3, 64).len() <= 64);
        assert_eq!(sphere_candidates(2).len(), 4);
    }

    #[test]
    fn sphere_min_examples() {
        let opts = MinimizeOptions::default();
        for (m, n) in [(1, 1), (2, 3), (4, 2)] {
            let r = sphere_min(&identity_like(m, n), &opts).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
        let r = sphere_min(&diagonal_counterexample(2).unwrap(), &opts).unwrap();
        assert!(r.value.abs() < 1e-14);
        assert!(r.value <= r.grid_min);
        assert!((r.argmin_x.iter().map(|t| t * t).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((r.argmin_y.iter().map(|t| t * t).sum::<f64>() - 1.0).abs() < 1e-12);

        let p = pascal(3, 3).unwrap();
        let r = sphere_min(&p, &opts).unwrap();
        let oracle = grid_oracle(&p, 0.05);
        assert!(r.value > 0.0);
        assert!(r.value <= oracle + 1e-12);
        assert!(oracle - r.value < 5e-3, "{} vs {oracle}", r.value);
    }

    #[test]
    fn psd_pd_examples() {
        let opts = MinimizeOptions::default();
        let r1 = BiquadraticTensor::rank_one(&[1.0, 2.0], &[0.5, -1.0, 1.0]).unwrap();
        assert!(is_psd(&r1, None, &opts).unwrap().verdict);
        let pd = is_pd(&r1, None, &opts).unwrap();
        assert!(!pd.verdict);
        assert!(pd.witness.unwrap().form_value < pd.threshold);

        assert!(is_pd(&pascal(2, 2).unwrap(), None, &opts).unwrap().verdict);

        let neg = BiquadraticTensor::rank_one(&e(2, 0), &e(2, 0)).unwrap().scale(-1.0);
        let v = is_psd(&neg, None, &opts).unwrap();
        assert!(!v.verdict);
        assert_eq!(v.value, -1.0);
        let w = v.witness.unwrap();
        assert_eq!(w.form_value, -1.0);
        assert_eq!(w.x.iter().map(|t| t.abs()).collect::<Vec<_>>(), e(2, 0));
        assert!(is_psd(&neg, Some(-1.0), &opts).is_err());
    }

    #[test]
    fn simplex_min_examples() {
        let opts = MinimizeOptions::default();
        let c = cauchy(&GeneratingVectors::new(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap()).unwrap();
        let r = simplex_min(&c, &opts).unwrap();
        // bound from e^{-c_i s} >= e^{-c_max s} on the simplex: min >= 1/(2(2+2))
        assert!(r.value >= 0.125 - 1e-12, "{}", r.value);
        assert!((r.argmin_x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.argmin_x.iter().chain(&r.argmin_y).all(|t| *t >= 0.0));

        let mut raw = vec![0.0; 16];
        raw[0] = -1.0;
        let t = BiquadraticTensor::symmetrize(&raw, 2, 2).unwrap();
        let r = simplex_min(&t, &opts).unwrap();
        assert_eq!(r.value, -1.0);
        assert_eq!(r.vertex_min, VertexMin { i: 0, j: 0, value: -1.0 });

        let d = diagonal_counterexample(2).unwrap();
        let r = simplex_min(&d, &opts).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn copositivity_verdicts() {
        let opts = MinimizeOptions::with_seed(9);
        let mut rng = random::rng(4);
        let t = random::random_symmetric(3, 2, 0.0, 1.0, &mut rng).unwrap();
        assert!(is_copositive(&t, None, &opts).unwrap().verdict);

        let gv = GeneratingVectors::new(vec![1.0, -2.0], vec![1.0, 1.5]).unwrap();
        let a = cauchy(&gv).unwrap();
        let v = is_copositive(&a, None, &opts).unwrap();
        assert!(!v.verdict);
        assert!(v.witness.unwrap().form_value < 0.0);
        let r = simplex_min(&a, &opts).unwrap();
        assert_eq!((r.vertex_min.i, r.vertex_min.j), (1, 1));
        assert_eq!(r.vertex_min.value, 1.0 / (2.0 * (-2.0 + 1.5)));

        assert!(is_strictly_copositive(&pascal(2, 3).unwrap(), None, &opts).unwrap().verdict);
        let d = diagonal_counterexample(2).unwrap();
        let v = is_strictly_copositive(&d, None, &opts).unwrap();
        assert!(!v.verdict);
        assert_eq!(v.value, 0.0);
        assert!(is_copositive(&d, None, &opts).unwrap().verdict);
    }

    #[test]
    fn psd_implies_copositive_on_corpus() {
        let opts = MinimizeOptions::with_seed(2);
        let mut rng = random::rng(31);
        for k in 0..30 {
            let (m, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let t = if k % 2 == 0 {
                random::random_weak_cp(m, n, 2, &mut rng).unwrap().reconstruct()
            } else {
                random::random_symmetric(m, n, -1.0, 1.0, &mut rng).unwrap()
            };
            let psd = is_psd(&t, None, &opts).unwrap();
            let cop = is_copositive(&t, None, &opts).unwrap();
            assert!(!psd.verdict || cop.verdict, "case {k}");
        }
    }

    #[test]
    fn sphere_min_matches_grid_on_small_instances() {
        let opts = MinimizeOptions::with_seed(5);
        let mut rng = random::rng(77);
        for _ in 0..12 {
            let (m, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let t = random::random_symmetric(m, n, -1.0, 1.0, &mut rng).unwrap();
            let r = sphere_min(&t, &opts).unwrap();
            let oracle = grid_oracle(&t, 0.02);
            assert!(r.value <= oracle + 1e-12);
            assert!((oracle - r.value).abs() <= 5e-3, "{m}x{n}: {} vs {oracle}", r.value);
        }
    }

    #[test]
    fn matrix_copositive_examples() {
        let opts = MinimizeOptions::default();
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 1.0]);
        let v = matrix_copositive(&m, 1e-8, &opts).unwrap();
        assert!(!v.copositive);
        assert!((v.value + 0.5).abs() < 1e-12);
        let w = v.witness.unwrap();
        assert!((w[0] - 0.5).abs() < 1e-6 && (w[1] - 0.5).abs() < 1e-6);

        let nonneg = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0]);
        assert!(matrix_copositive(&nonneg, 1e-8, &opts).unwrap().copositive);
        let f = DMatrix::from_row_slice(3, 2, &[1.0, -2.0, 0.5, 1.0, -1.0, 0.3]);
        let psd = &f * f.transpose();
        let psd = (&psd + psd.transpose()) * 0.5;
        assert!(matrix_copositive(&psd, 1e-8, &opts).unwrap().copositive);
        assert!(matrix_copositive(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]), 1e-8, &opts).is_err());
    }

    #[test]
    fn cubic_roots() {
        // (s-1)(s-2)(s+3) = s³ - 7s + 6
        let mut r = real_cubic_roots(0.0, -7.0, 6.0);
        r.sort_by(f64::total_cmp);
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // s³ + s + 1 has one real root
        let r = real_cubic_roots(0.0, 1.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0].powi(3) + r[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_cp_examples() {
        let id = DMatrix::<f64>::identity(3, 3);
        match matrix_cp_heuristic(&id, 1e-8, 1000, 0).unwrap() {
            CpHeuristic::Factors { factors, residual } => {
                assert_eq!(factors, vec![e(3, 0), e(3, 1), e(3, 2)]);
                assert_eq!(residual, 0.0);
            }
            other => panic!("{other:?}"),
        }
        let v = nalgebra::DVector::from_vec(vec![0.5, 1.0, 2.0]);
        let vv = &v * v.transpose();
        match matrix_cp_heuristic(&vv, 1e-8, 1000, 0).unwrap() {
            CpHeuristic::Factors { factors, residual } => {
                assert_eq!(factors.len(), 1);
                assert!(residual < 1e-12);
                assert!(factors[0].iter().zip(v.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
            }
            other => panic!("{other:?}"),
        }
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        match matrix_cp_heuristic(&m, 1e-8, 5000, 0).unwrap() {
            CpHeuristic::Factors { factors, residual } => {
                assert!(residual <= 1e-8);
                assert!(factors.iter().flatten().all(|t| *t >= 0.0));
                assert!((decompose::gram_sum(&factors) - &m).amax() <= 1e-8);
            }
            other => panic!("{other:?}"),
        }
        let not_dnn = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0]);
        assert_eq!(
            matrix_cp_heuristic(&not_dnn, 1e-8, 100, 0).unwrap(),
            CpHeuristic::Inconclusive {
                doubly_nonnegative: false,
                best_residual: None
            }
        );
    }

    #[test]
    fn matrix_cp_on_random_dnn_small() {
        let mut rng = random::rng(8);
        for _ in 0..10 {
            let dim = rng.random_range(2..=4);
            let factors: Vec<Vec<f64>> = (0..dim)
                .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
                .collect();
            let m = decompose::gram_sum(&factors);
            match matrix_cp_heuristic(&m, 1e-8, 20_000, 1).unwrap() {
                CpHeuristic::Factors { residual, .. } => assert!(residual <= 1e-8),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn duality_examples() {
        let b = random::random_symmetric(2, 2, 0.0, 1.0, &mut random::rng(3)).unwrap();
        let a = BiquadraticTensor::rank_one(&e(2, 0), &e(2, 0)).unwrap();
        assert_eq!(a.pairing(&b).unwrap(), b.get(0, 0, 0, 0));

        let report = duality_sample_check(200, 42).unwrap();
        assert!(report.min_pairing >= -1e-12);
        assert_eq!(report.pairings.len(), 200);
        assert!(duality_sample_check(0, 1).is_err());

        let c = cauchy(&GeneratingVectors::new(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap()).unwrap();
        let cpb = random::random_cpb(2, 2, 3, &mut random::rng(1)).unwrap().reconstruct();
        assert!(cpb.pairing(&c).unwrap() > 0.0);
    }

    #[test]
    fn strongly_cpb_examples() {
        let opts = MinimizeOptions::default();
        let d = decompose::pascal_cp(3, 3).unwrap();
        let v = strongly_cpb_check(&d, &pascal(3, 3).unwrap(), 1e-9, &opts).unwrap();
        assert!(v.strongly_cpb && v.pd.verdict && v.consistent);

        let d = CpDecomposition::new(2, 2, vec![crate::tensor::VectorPair::new(e(2, 0), e(2, 0))]).unwrap();
        let v = strongly_cpb_check(&d, &d.reconstruct(), 1e-9, &opts).unwrap();
        assert!(!v.strongly_cpb && !v.pd.verdict && v.consistent);

        let d = decompose::diagonal_cp(2).unwrap();
        let v = strongly_cpb_check(&d, &diagonal_counterexample(2).unwrap(), 1e-9, &opts).unwrap();
        assert!(v.strongly_cpb && !v.pd.verdict && v.consistent);

        assert!(matches!(
            strongly_cpb_check(&d, &pascal(2, 2).unwrap(), 1e-9, &opts),
            Err(Error::ReconstructionMismatch { .. })
        ));
    }
}

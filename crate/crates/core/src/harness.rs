//! Seeded verification suites, one per structural result:
//!
//! | id   | property |
//! |------|----------|
//! | T2.1 | CPB • copositive >= 0; weakly CP tensors are SOS |
//! | T2.2 | CPB and pd implies strongly CPB; the diagonal tensor is strongly CPB but not pd |
//! | T3.1 | `B⊗C` is CPB iff `B`, `C` are CP: lift and extraction round trips |
//! | T3.2 | `B⊗C` is copositive iff `±B`, `±C` are both copositive |
//! | T4.1 | Cauchy tensor: CPB iff strictly copositive iff `c_i + d_j > 0` |
//! | T4.2 | Pascal tensors are pd and strongly CPB |
//!
//! Each case records a nonnegative `residual` (an error or a violation margin) so
//! the reports can be compared across runs.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::decompose::{self, FactorExtraction, Residual};
use crate::error::{Error, Result};
use crate::flatten;
use crate::generators::{self, GeneratingVectors, MatrixFactorPair};
use crate::positivity::{self, MinimizeOptions};
use crate::random::{self, CorpusRng};
use crate::tensor::BiquadraticTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Verdict threshold; `None` uses each check's scaled default.
    pub tol: Option<f64>,
    pub starts: Option<usize>,
    /// Sample count for the randomized suites.
    pub count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: None,
            starts: None,
            count: 100,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
            }
        }
        if self.starts == Some(0) {
            return Err(Error::InvalidParameter("starts must be >= 1".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("count must be >= 1".into()));
        }
        Ok(())
    }

    fn opts(&self, salt: u64) -> MinimizeOptions {
        MinimizeOptions {
            starts: self.starts,
            seed: self.seed.wrapping_add(salt),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    #[serde(rename = "T2.1")]
    T21,
    #[serde(rename = "T2.2")]
    T22,
    #[serde(rename = "T3.1")]
    T31,
    #[serde(rename = "T3.2")]
    T32,
    #[serde(rename = "T4.1")]
    T41,
    #[serde(rename = "T4.2")]
    T42,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [Self::T21, Self::T22, Self::T31, Self::T32, Self::T41, Self::T42];

    pub fn name(self) -> &'static str {
        match self {
            Self::T21 => "T2.1",
            Self::T22 => "T2.2",
            Self::T31 => "T3.1",
            Self::T32 => "T3.2",
            Self::T41 => "T4.1",
            Self::T42 => "T4.2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub case: String,
    pub passed: bool,
    pub residual: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub cases_run: usize,
    pub cases_passed: usize,
    pub worst_residual: f64,
    pub details: Vec<CaseRecord>,
}

impl TheoremReport {
    pub fn all_passed(&self) -> bool {
        self.cases_passed == self.cases_run
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.details.iter().filter(|c| !c.passed)
    }
}

struct Collector {
    id: TheoremId,
    cases: Vec<CaseRecord>,
}

impl Collector {
    fn new(id: TheoremId) -> Self {
        Self { id, cases: Vec::new() }
    }

    fn record(&mut self, case: impl Into<String>, passed: bool, residual: f64, note: impl Into<String>) {
        // a non-finite residual is itself a failure
        let (passed, residual) = if residual.is_finite() {
            (passed, residual)
        } else {
            (false, f64::MAX)
        };
        self.cases.push(CaseRecord {
            case: case.into(),
            passed,
            residual,
            note: note.into(),
        });
    }

    /// Records a domain error as a failed case instead of aborting the suite.
    fn record_error(&mut self, case: impl Into<String>, e: &Error) {
        self.record(case, false, f64::MAX, e.to_string());
    }

    fn finish(self) -> TheoremReport {
        let cases_passed = self.cases.iter().filter(|c| c.passed).count();
        let worst_residual = self.cases.iter().map(|c| c.residual).fold(0.0, f64::max);
        TheoremReport {
            theorem_id: self.id,
            cases_run: self.cases.len(),
            cases_passed,
            worst_residual,
            details: self.cases,
        }
    }
}

/// Runs one suite.
pub fn verify(id: TheoremId, cfg: &RunConfig) -> Result<TheoremReport> {
    cfg.validate()?;
    let mut c = Collector::new(id);
    match id {
        TheoremId::T21 => suite_duality(cfg, &mut c),
        TheoremId::T22 => suite_strong(cfg, &mut c),
        TheoremId::T31 => suite_outer_cp(cfg, &mut c),
        TheoremId::T32 => suite_outer_copositive(cfg, &mut c),
        TheoremId::T41 => suite_cauchy(cfg, &mut c),
        TheoremId::T42 => suite_pascal(cfg, &mut c),
    }
    Ok(c.finish())
}

pub fn verify_all(cfg: &RunConfig) -> Result<Vec<TheoremReport>> {
    TheoremId::ALL.into_iter().map(|id| verify(id, cfg)).collect()
}

fn rel_err(approx: f64, exact: f64) -> f64 {
    (approx - exact).abs() / (1.0 + exact.abs())
}

fn probe(rng: &mut CorpusRng, m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    (random::normal_vec(m, rng), random::normal_vec(n, rng))
}

// ---------------------------------------------------------------------------

fn suite_duality(cfg: &RunConfig, c: &mut Collector) {
    match positivity::duality_sample_check(cfg.count, cfg.seed) {
        Ok(report) => {
            for (k, &p) in report.pairings.iter().enumerate() {
                c.record(format!("pairing {k}"), p >= -1e-12, (-p).max(0.0), format!("A•B = {p:e}"));
            }
        }
        Err(e) => c.record_error("pairing sampler", &e),
    }

    let mut rng = random::rng(cfg.seed ^ 0x5eed_0021);
    for k in 0..cfg.count.div_ceil(10) {
        let (m, n, r) = (rng.random_range(1..=4), rng.random_range(1..=4), rng.random_range(1..=5));
        let case = format!("weak CP {k} ({m}x{n}, r={r}) is SOS");
        let mut run = || -> Result<(f64, f64)> {
            let d = random::random_weak_cp(m, n, r, &mut rng)?;
            let a = d.reconstruct();
            let sos = flatten::sos_from_cp(&d)?;
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let (x, y) = probe(&mut rng, m, n);
                worst = worst.max(rel_err(sos.eval(&x, &y)?, a.eval_form(&x, &y)?));
            }
            let flat = flatten::flattening_psd_check(&a, flatten::default_tol(&a))?;
            Ok((worst, flat.min_eigenvalue))
        };
        match run() {
            Ok((worst, min_eig)) => c.record(
                case,
                worst <= 1e-10 && min_eig >= -1e-10,
                worst,
                format!("flattening min eigenvalue {min_eig:e}"),
            ),
            Err(e) => c.record_error(case, &e),
        }
    }
}

fn suite_strong(cfg: &RunConfig, c: &mut Collector) {
    for m in 2..=4 {
        let case = format!("diagonal counterexample m={m}");
        let run = || -> Result<(bool, f64, String)> {
            let a = generators::diagonal_counterexample(m)?;
            let d = decompose::diagonal_cp(m)?;
            let mut e1 = vec![0.0; m];
            e1[0] = 1.0;
            let mut e2 = vec![0.0; m];
            e2[1] = 1.0;
            let f = a.eval_form(&e1, &e2)?;
            let check = positivity::strongly_cpb_check(&d, &a, 1e-12, &cfg.opts(m as u64))?;
            let cop = positivity::is_copositive(&a, cfg.tol, &cfg.opts(m as u64))?;
            let ok = f == 0.0 && check.strongly_cpb && !check.pd.verdict && cop.verdict && check.consistent;
            Ok((ok, f.abs(), format!("F(e1,e2) = {f}, pd value {:e}", check.pd.value)))
        };
        match run() {
            Ok((ok, r, note)) => c.record(case, ok, r, note),
            Err(e) => c.record_error(case, &e),
        }
    }

    let mut rng = random::rng(cfg.seed ^ 0x5eed_0022);
    for k in 0..cfg.count.div_ceil(5) {
        let (m, n, r) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=6));
        let case = format!("random CPB {k} ({m}x{n}, r={r})");
        let mut run = || -> Result<(bool, String)> {
            let d = random::random_cpb(m, n, r, &mut rng)?;
            let a = d.reconstruct();
            let v = positivity::strongly_cpb_check(&d, &a, 1e-12, &cfg.opts(k as u64))?;
            Ok((
                v.consistent,
                format!(
                    "pd={} spans=({}, {}) value {:e}",
                    v.pd.verdict, v.spans.u_spans, v.spans.v_spans, v.pd.value
                ),
            ))
        };
        match run() {
            Ok((ok, note)) => c.record(case, ok, 0.0, note),
            Err(e) => c.record_error(case, &e),
        }
    }
}

fn nonneg_factors(rng: &mut CorpusRng, dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

fn suite_outer_cp(cfg: &RunConfig, c: &mut Collector) {
    let mut rng = random::rng(cfg.seed ^ 0x5eed_0031);
    for k in 0..cfg.count {
        let (m, n) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let (rb, rc) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let bf = nonneg_factors(&mut rng, m, rb);
        let cf = nonneg_factors(&mut rng, n, rc);
        let case = format!("factor set {k} ({m}x{n}, r=({rb},{rc}))");
        let run = || -> Result<(bool, f64, String)> {
            let b = decompose::gram_sum(&bf);
            let cm = decompose::gram_sum(&cf);
            let target = generators::outer(&MatrixFactorPair::new(b.clone(), cm.clone())?)?;
            let lifted = decompose::lift_matrix_cp(&bf, &cf)?;
            let lift_res = Residual::between(&lifted.reconstruct(), &target)?.relative_error;
            let extraction = decompose::extract_factors(&target, decompose::DEFAULT_EXTRACT_TOL)?;
            let FactorExtraction::Decomposable { factors, residual } = extraction else {
                return Ok((false, extraction.residual(), "outer product not recognised".into()));
            };
            // gauge: B' = tB and C' = C/t with t read off the largest entry of B
            let (pr, pc) = b.iamax_full();
            let t = factors.b[(pr, pc)] / b[(pr, pc)];
            let gauge_err = (&factors.b - &b * t).amax().max((&factors.c - &cm / t).amax());
            let gauge_rel = gauge_err / (1.0 + b.amax() * t.abs()).max(1.0 + cm.amax() / t.abs());
            let extract_ok = residual <= 1e-10 * (1.0 + target.max_abs()) && t > 0.0 && gauge_rel <= 1e-10;
            Ok((
                lift_res <= 1e-12 && extract_ok,
                lift_res.max(residual),
                format!("lift rel {lift_res:e}, extract {residual:e}, gauge {gauge_rel:e}"),
            ))
        };
        match run() {
            Ok((ok, r, note)) => c.record(case, ok, r, note),
            Err(e) => c.record_error(case, &e),
        }
    }

    // "if" direction from matrices alone: CP factors found for B, C lift to a CPB
    // decomposition of B⊗C
    for k in 0..cfg.count.div_ceil(10) {
        let (m, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let b = decompose::gram_sum(&nonneg_factors(&mut rng, m, m));
        let cm = decompose::gram_sum(&nonneg_factors(&mut rng, n, n));
        let case = format!("matrix CP search {k} ({m}x{n})");
        let run = || -> Result<(bool, f64, String)> {
            let found = |mat: &DMatrix<f64>| -> Result<Option<Vec<Vec<f64>>>> {
                Ok(match positivity::matrix_cp_heuristic(mat, 1e-9, 20_000, cfg.seed)? {
                    positivity::CpHeuristic::Factors { factors, .. } => Some(factors),
                    positivity::CpHeuristic::Inconclusive { .. } => None,
                })
            };
            let (Some(bf), Some(cf)) = (found(&b)?, found(&cm)?) else {
                return Ok((false, f64::MAX, "matrix CP search inconclusive".into()));
            };
            let target = generators::outer(&MatrixFactorPair::new(b.clone(), cm.clone())?)?;
            let d = decompose::lift_matrix_cp(&bf, &cf)?;
            let res = Residual::between(&d.reconstruct(), &target)?;
            Ok((
                d.is_nonneg() && res.relative_error <= 1e-8,
                res.relative_error,
                format!("{} lifted pairs", d.len()),
            ))
        };
        match run() {
            Ok((ok, r, note)) => c.record(case, ok, r, note),
            Err(e) => c.record_error(case, &e),
        }
    }
}

/// Symmetric matrix drawn from one of four families so that copositive,
/// anti-copositive and mixed signs all occur.
pub fn random_factor_matrix(dim: usize, rng: &mut CorpusRng) -> DMatrix<f64> {
    let family = rng.random_range(0..4);
    let mut mat = match family {
        0 => {
            let f = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
            &f * f.transpose()
        }
        1 => DMatrix::from_fn(dim, dim, |_, _| rng.random_range(0.0..1.0)),
        _ => DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0)),
    };
    mat = (&mat + mat.transpose()) * 0.5;
    if family == 2 || (family < 2 && rng.random::<bool>()) {
        mat = -mat;
    }
    mat
}

/// Predicted copositivity of `B⊗C` from the simplex ranges of `B` and `C`.
pub fn sign_law_prediction(
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    tol: f64,
    opts: &MinimizeOptions,
) -> Result<(bool, [f64; 4])> {
    let b_min = positivity::matrix_simplex_min(b, opts)?.value;
    let b_max = -positivity::matrix_simplex_min(&(-b), opts)?.value;
    let c_min = positivity::matrix_simplex_min(c, opts)?.value;
    let c_max = -positivity::matrix_simplex_min(&(-c), opts)?.value;
    let same_sign = (b_min >= -tol && c_min >= -tol) || (b_max <= tol && c_max <= tol);
    Ok((same_sign, [b_min, b_max, c_min, c_max]))
}

fn suite_outer_copositive(cfg: &RunConfig, c: &mut Collector) {
    let mut rng = random::rng(cfg.seed ^ 0x5eed_0032);
    let tol = cfg.tol.unwrap_or(1e-8);
    for k in 0..cfg.count {
        let (m, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let b = random_factor_matrix(m, &mut rng);
        let cm = random_factor_matrix(n, &mut rng);
        let case = format!("sign law {k} ({m}x{n})");
        let opts = cfg.opts(k as u64);
        let run = || -> Result<(bool, f64, String)> {
            let a = generators::outer(&MatrixFactorPair::new(b.clone(), cm.clone())?)?;
            let verdict = positivity::is_copositive(&a, Some(tol), &opts)?;
            let (predicted, ranges) = sign_law_prediction(&b, &cm, tol, &opts)?;
            // the simplex minimum of B⊗C is the smallest corner product of the ranges
            let corner = [ranges[0] * ranges[2], ranges[0] * ranges[3], ranges[1] * ranges[2], ranges[1] * ranges[3]]
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok((
                verdict.verdict == predicted,
                (verdict.value - corner).abs(),
                format!("tensor min {:e}, predicted {predicted}, ranges {ranges:?}", verdict.value),
            ))
        };
        match run() {
            Ok((ok, r, note)) => c.record(case, ok, r, note),
            Err(e) => c.record_error(case, &e),
        }
    }
}

/// Random generating vectors with `c, d` uniform on `[-1, 2)`, `m, n` in `1..=3`,
/// `|min(c_i + d_j)| >= 0.05`, and all Cauchy entries defined.
pub fn random_generating_vectors(rng: &mut CorpusRng) -> GeneratingVectors {
    loop {
        let (m, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..2.0)).collect();
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
        let Ok(gv) = GeneratingVectors::new(c, d) else {
            continue;
        };
        if gv.min_mixed_sum().0.abs() < 0.05 || generators::cauchy(&gv).is_err() {
            continue;
        }
        return gv;
    }
}

fn suite_cauchy(cfg: &RunConfig, c: &mut Collector) {
    let mut rng = random::rng(cfg.seed ^ 0x5eed_0041);
    for k in 0..cfg.count {
        let gv = random_generating_vectors(&mut rng);
        let (min_sum, i, j) = gv.min_mixed_sum();
        let case = format!("generating vectors {k} (c={:?}, d={:?})", gv.c, gv.d);
        let opts = cfg.opts(k as u64);
        let run = || -> Result<(bool, f64, String)> {
            let a = generators::cauchy(&gv)?;
            if min_sum > 0.0 {
                let cp = decompose::cauchy_cp(&gv, 1e-8)?;
                let sc = positivity::is_strictly_copositive(&a, cfg.tol, &opts)?;
                Ok((
                    cp.decomposition.is_nonneg() && cp.residual.max_abs_error <= 1e-8 && sc.verdict,
                    cp.residual.max_abs_error,
                    format!("{} pairs, simplex min {:e}", cp.decomposition.len(), sc.value),
                ))
            } else {
                let cop = positivity::is_copositive(&a, cfg.tol, &opts)?;
                let vertex = a.get(i, j, i, j);
                let expected = 1.0 / (2.0 * (gv.c[i] + gv.d[j]));
                let witness_ok = cop
                    .witness
                    .as_ref()
                    .is_some_and(|w| a.eval_form(&w.x, &w.y).is_ok_and(|f| f < 0.0));
                let cp_refused = matches!(decompose::cauchy_cp(&gv, 1e-8), Err(Error::CauchyConditionViolated { .. }));
                Ok((
                    !cop.verdict && witness_ok && vertex == expected && vertex < 0.0 && cp_refused,
                    0.0,
                    format!("vertex ({},{}) value {vertex:e}", i + 1, j + 1),
                ))
            }
        };
        match run() {
            Ok((ok, r, note)) => c.record(case, ok, r, note),
            Err(e) => c.record_error(case, &e),
        }
    }
}

/// Relative pd threshold for Pascal tensors, near the eigen-solver accuracy.
pub const PASCAL_PD_TOL: f64 = 1e-12;

fn suite_pascal(cfg: &RunConfig, c: &mut Collector) {
    for m in 1..=4 {
        for n in 1..=4 {
            let case = format!("pascal {m}x{n}");
            let opts = cfg.opts((m * 10 + n) as u64);
            let run = || -> Result<(bool, f64, String)> {
                let a = generators::pascal(m, n)?;
                let d = decompose::pascal_cp(m, n)?;
                let res = Residual::between(&d.reconstruct(), &a)?;
                let strong = positivity::strongly_cpb_check(&d, &a, 1e-9, &opts)?;
                // entries grow like (2(m+n))! while the sphere minimum shrinks, so the
                // scaled default threshold is too coarse here
                let pd_tol = cfg.tol.unwrap_or(PASCAL_PD_TOL * (1.0 + a.max_abs()));
                let pd = positivity::is_pd(&a, Some(pd_tol), &opts)?;
                Ok((
                    res.relative_error <= 1e-9 && strong.strongly_cpb && pd.verdict && strong.consistent,
                    res.relative_error,
                    format!("{} pairs, sphere min {:e} (threshold {pd_tol:e})", d.len(), pd.value),
                ))
            };
            match run() {
                Ok((ok, r, note)) => c.record(case, ok, r, note),
                Err(e) => c.record_error(case, &e),
            }
        }
    }
}

/// Tensor used by several suites and the CLI examples.
pub fn negated_rank_one(m: usize, n: usize) -> Result<BiquadraticTensor> {
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    if m == 0 || n == 0 {
        return Err(Error::EmptyDimension { m, n });
    }
    u[0] = 1.0;
    v[0] = 1.0;
    Ok(BiquadraticTensor::rank_one(&u, &v)?.scale(-1.0))
}

//! JSON documents for tensors, decompositions, SOS certificates and reports.
//!
//! Writers emit pretty-printed JSON with a trailing newline and a fixed key order,
//! so the same value always serializes to the same bytes. Readers validate
//! everything and report problems as [`Error::Format`].

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::decompose::{CpDecomposition, FactorExtraction, Residual};
use crate::error::{Error, Result};
use crate::flatten::{CpbBattery, SosDecomposition};
use crate::positivity::Verdict;
use crate::tensor::{BiquadraticTensor, VectorPair};

/// `{"m", "n", "entries", "symmetric"}` with entries in lexicographic
/// `(i, j, k, l)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorDocument {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
}

/// A tensor read from a document, plus diagnostics for the caller to print.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDocument {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDocument {
    pub m: usize,
    pub n: usize,
    pub nonneg: bool,
    pub pairs: Vec<PairDocument>,
}

/// Each factor is an `m x n` matrix flattened row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosDocument {
    pub m: usize,
    pub n: usize,
    pub factors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualDocument {
    pub max_abs_error: f64,
    pub relative_error: f64,
}

impl From<Residual> for ResidualDocument {
    fn from(r: Residual) -> Self {
        Self {
            max_abs_error: r.max_abs_error,
            relative_error: r.relative_error,
        }
    }
}

/// `true`, `false` or `"inconclusive"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VerdictValue {
    Decided(bool),
    Undecided(String),
}

impl VerdictValue {
    pub fn inconclusive() -> Self {
        Self::Undecided("inconclusive".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryDocument {
    pub entrywise_nonneg: bool,
    pub flattening_psd: bool,
    pub copositive_numeric: bool,
    pub min_entry: f64,
    pub min_eigenvalue: f64,
    pub simplex_min: f64,
}

/// Verdict report. `certification` is `"numeric"` for verdicts backed only by the
/// minimizer and `"witness"` when a point violating the property is included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub check: String,
    pub verdict: VerdictValue,
    pub value: f64,
    pub witness: Option<WitnessDocument>,
    pub starts: usize,
    pub seed: u64,
    pub certification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatteryDocument>,
}

impl ReportDocument {
    pub fn from_verdict(v: &Verdict) -> Self {
        Self {
            check: v.check.name().into(),
            verdict: VerdictValue::Decided(v.verdict),
            value: v.value,
            witness: v.witness.as_ref().map(|w| WitnessDocument {
                x: w.x.clone(),
                y: w.y.clone(),
            }),
            starts: v.starts,
            seed: v.seed,
            certification: if v.witness.is_some() { "witness" } else { "numeric" }.into(),
            battery: None,
        }
    }

    /// A failed battery condition certifies "not CPB" (`false`); passing all of them
    /// proves nothing (`"inconclusive"`). `value` is the simplex minimum.
    pub fn from_battery(b: &CpbBattery, starts: usize, seed: u64) -> Self {
        Self {
            check: "necessary-cpb".into(),
            verdict: if b.all_pass() {
                VerdictValue::inconclusive()
            } else {
                VerdictValue::Decided(false)
            },
            value: b.simplex_min,
            witness: None,
            starts,
            seed,
            certification: "numeric".into(),
            battery: Some(BatteryDocument {
                entrywise_nonneg: b.entrywise_nonneg,
                flattening_psd: b.flattening_psd,
                copositive_numeric: b.copositive_numeric,
                min_entry: b.min_entry,
                min_eigenvalue: b.min_eigenvalue,
                simplex_min: b.simplex_min,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPairDocument {
    pub m: usize,
    pub n: usize,
    /// Row-major `m x m`.
    pub b: Vec<f64>,
    /// Row-major `n x n`.
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionDocument {
    pub decomposable: bool,
    /// The factors when decomposable, otherwise the best candidate.
    pub factors: MatrixPairDocument,
    pub residual: f64,
}

impl ExtractionDocument {
    pub fn from_extraction(e: &FactorExtraction) -> Self {
        let (fp, residual) = match e {
            FactorExtraction::Decomposable { factors, residual }
            | FactorExtraction::NotDecomposable {
                candidate: factors,
                residual,
            } => (factors, *residual),
        };
        Self {
            decomposable: e.is_decomposable(),
            factors: MatrixPairDocument {
                m: fp.b.nrows(),
                n: fp.c.nrows(),
                b: row_major(&fp.b),
                c: row_major(&fp.c),
            },
            residual,
        }
    }
}

/// Output of `decompose`: exactly one payload field is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeOutput {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sos: Option<SosDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionDocument>,
    pub residual: ResidualDocument,
}

fn row_major(mat: &DMatrix<f64>) -> Vec<f64> {
    (0..mat.nrows())
        .flat_map(|r| (0..mat.ncols()).map(move |c| mat[(r, c)]))
        .collect()
}

fn format_err(e: Error) -> Error {
    match e {
        Error::Format(_) | Error::Io(_) => e,
        other => Error::Format(other.to_string()),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// tensors

pub fn tensor_document(a: &BiquadraticTensor) -> TensorDocument {
    TensorDocument {
        m: a.m(),
        n: a.n(),
        entries: a.entries().to_vec(),
        symmetric: Some(true),
    }
}

pub fn tensor_to_json(a: &BiquadraticTensor) -> Result<String> {
    to_json(&tensor_document(a))
}

/// Parses a tensor document. Data that is not declared symmetric, or that fails
/// the symmetry check, is symmetrized with a warning.
pub fn tensor_from_json(text: &str) -> Result<Ingested<BiquadraticTensor>> {
    let doc: TensorDocument = serde_json::from_str(text)?;
    tensor_from_document(doc)
}

pub fn tensor_from_document(doc: TensorDocument) -> Result<Ingested<BiquadraticTensor>> {
    let TensorDocument {
        m,
        n,
        entries,
        symmetric,
    } = doc;
    let expected = m * n * m * n;
    if m == 0 || n == 0 || entries.len() != expected {
        return Err(Error::Format(format!(
            "tensor with m={m}, n={n} needs {expected} entries, got {}",
            entries.len()
        )));
    }
    let mut warnings = Vec::new();
    let exact = BiquadraticTensor::is_symmetric_buffer(&entries, m, n);
    let tensor = if exact {
        BiquadraticTensor::try_from_symmetric(entries, m, n).map_err(format_err)?
    } else {
        let t = BiquadraticTensor::symmetrize(&entries, m, n).map_err(format_err)?;
        let gap = t
            .entries()
            .iter()
            .zip(&entries)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        let declared = match symmetric {
            Some(true) => "declared symmetric but is not",
            Some(false) => "declared non-symmetric",
            None => "has no symmetry flag and is not symmetric",
        };
        warnings.push(format!(
            "warning: tensor {declared}; symmetrized on ingest (max change {gap:e})"
        ));
        t
    };
    Ok(Ingested {
        value: tensor,
        warnings,
    })
}

pub fn read_tensor(path: &Path) -> Result<Ingested<BiquadraticTensor>> {
    tensor_from_json(&read_text(path)?)
}

// ---------------------------------------------------------------------------
// decompositions

pub fn decomposition_document(d: &CpDecomposition) -> DecompositionDocument {
    DecompositionDocument {
        m: d.m(),
        n: d.n(),
        nonneg: d.is_nonneg(),
        pairs: d
            .pairs()
            .iter()
            .map(|p| PairDocument {
                u: p.u.clone(),
                v: p.v.clone(),
            })
            .collect(),
    }
}

pub fn decomposition_from_document(doc: DecompositionDocument) -> Result<CpDecomposition> {
    let pairs = doc.pairs.into_iter().map(|p| VectorPair::new(p.u, p.v)).collect();
    CpDecomposition::with_declared_flag(doc.m, doc.n, pairs, doc.nonneg).map_err(format_err)
}

/// Accepts a bare decomposition document or a `decompose` output carrying one.
pub fn decomposition_from_json(text: &str) -> Result<CpDecomposition> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let doc = match value.get("decomposition") {
        Some(inner) => serde_json::from_value(inner.clone())?,
        None => serde_json::from_value(value)?,
    };
    decomposition_from_document(doc)
}

pub fn read_decomposition(path: &Path) -> Result<CpDecomposition> {
    decomposition_from_json(&read_text(path)?)
}

// ---------------------------------------------------------------------------
// SOS certificates

pub fn sos_document(s: &SosDecomposition) -> SosDocument {
    SosDocument {
        m: s.m,
        n: s.n,
        factors: s.factors.iter().map(row_major).collect(),
    }
}

pub fn sos_from_document(doc: SosDocument) -> Result<SosDecomposition> {
    let (m, n) = (doc.m, doc.n);
    if m == 0 || n == 0 {
        return Err(Error::Format(format!("SOS dimensions must be positive (m={m}, n={n})")));
    }
    let factors = doc
        .factors
        .into_iter()
        .enumerate()
        .map(|(r, f)| {
            if f.len() != m * n || f.iter().any(|v| !v.is_finite()) {
                return Err(Error::Format(format!(
                    "SOS factor {} must hold {} finite entries",
                    r + 1,
                    m * n
                )));
            }
            Ok(DMatrix::from_row_slice(m, n, &f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SosDecomposition { m, n, factors })
}

/// Accepts a bare SOS document or a `decompose` output carrying one.
pub fn sos_from_json(text: &str) -> Result<SosDecomposition> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let doc = match value.get("sos") {
        Some(inner) => serde_json::from_value(inner.clone())?,
        None => serde_json::from_value(value)?,
    };
    sos_from_document(doc)
}

/// Parses a row-major square matrix and checks exact symmetry.
pub fn symmetric_matrix_from_rows(dim: usize, data: &[f64]) -> Result<DMatrix<f64>> {
    if data.len() != dim * dim {
        return Err(Error::Format(format!(
            "matrix of size {dim} needs {} entries, got {}",
            dim * dim,
            data.len()
        )));
    }
    let mat = DMatrix::from_row_slice(dim, dim, data);
    crate::linalg::check_symmetric(&mat).map_err(format_err)?;
    Ok(mat)
}

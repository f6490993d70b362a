//! `biquad`: generate, check, decompose and pair biquadratic tensors.
//!
//! Exit codes: 0 computed (for `verify`: every case passed), 1 domain or
//! precondition error, 2 I/O or format error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use biquad::decompose::{self, Residual};
use biquad::error::{Error, Result};
use biquad::flatten;
use biquad::generators::{self, GeneratingVectors, MatrixFactorPair};
use biquad::harness::{self, RunConfig, TheoremId};
use biquad::io::{self, DecomposeOutput, ExtractionDocument, ReportDocument, ResidualDocument};
use biquad::positivity::{self, MinimizeOptions};
use biquad::random;
use biquad::tensor::BiquadraticTensor;

#[derive(Parser, Debug)]
#[command(name = "biquad", version, about = "Completely positive, copositive, psd and SOS biquadratic tensors")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance (meaning depends on the command; see --help of each).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Random starts for the minimizers (default 8 + m + n).
    #[arg(long, global = true)]
    starts: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a tensor (and its decomposition, for families that carry one).
    Gen(GenArgs),
    /// Numerical positivity verdict for a tensor file.
    Check {
        #[arg(value_enum)]
        check: CheckArg,
        tensor: PathBuf,
    },
    /// Build a decomposition and report its residual.
    Decompose(DecomposeArgs),
    /// Print the pairing A•B of two tensor files.
    Pair { a: PathBuf, b: PathBuf },
    /// Run a verification suite; exits 0 only when every case passes.
    Verify {
        /// all, T2.1, T2.2, T3.1, T3.2, T4.1 or T4.2
        theorem: String,
        /// Sample count for randomized suites.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Cauchy,
    CauchyDec,
    Pascal,
    PascalDec,
    Outer,
    DiagCounterexample,
    RandomCpb,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of pairs for random-cpb.
    #[arg(long)]
    r: Option<usize>,
    /// Generating vector c, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    c: Option<Vec<f64>>,
    /// Generating vector d, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    d: Option<Vec<f64>>,
    /// Matrix B for outer, row-major, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bmat: Option<Vec<f64>>,
    /// Matrix C for outer, row-major, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    cmat: Option<Vec<f64>>,
    /// Decomposition output (default: the tensor path with `.cp.json`).
    #[arg(long)]
    decomp_out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CheckArg {
    Psd,
    Pd,
    Copositive,
    StrictCopositive,
    NecessaryCpb,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    PascalExact,
    CauchyQuad,
    SosFlatten,
    Lift,
    ExtractFactors,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(value_enum)]
    method: Method,
    /// Tensor file for sos-flatten and extract-factors.
    tensor: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    c: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    d: Option<Vec<f64>>,
    /// Nonnegative CP factors of B for lift: vectors separated by `;`, entries by `,`.
    #[arg(long)]
    b_factors: Option<String>,
    /// Nonnegative CP factors of C for lift.
    #[arg(long)]
    c_factors: Option<String>,
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidParameter(format!("missing required flag --{flag}")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn read_tensor(path: &Path) -> Result<BiquadraticTensor> {
    let ingested = io::read_tensor(path)?;
    for w in &ingested.warnings {
        eprintln!("{}: {w}", path.display());
    }
    Ok(ingested.value)
}

fn square_matrix(data: &[f64], flag: &str) -> Result<DMatrix<f64>> {
    let dim = (data.len() as f64).sqrt().round() as usize;
    if dim == 0 || dim * dim != data.len() {
        return Err(Error::InvalidParameter(format!(
            "--{flag} needs a square number of entries, got {}",
            data.len()
        )));
    }
    Ok(DMatrix::from_row_slice(dim, dim, data))
}

fn factor_list(text: &str, flag: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(|vec| {
            vec.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidParameter(format!("--{flag}: `{t}`: {e}")))
                })
                .collect()
        })
        .collect()
}

fn decomposition_path(out: Option<&Path>, explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    let out = out?;
    let name = out.file_name()?.to_string_lossy();
    let stem = name.strip_suffix(".json").unwrap_or(&name);
    Some(out.with_file_name(format!("{stem}.cp.json")))
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<()> {
    let dims = || -> Result<(usize, usize)> { Ok((need(args.m, "m")?, need(args.n, "n")?)) };
    let gv = || -> Result<GeneratingVectors> {
        GeneratingVectors::new(need(args.c.clone(), "c")?, need(args.d.clone(), "d")?)
    };
    let (tensor, decomposition) = match args.family {
        Family::Cauchy => {
            let gv = gv()?;
            let a = generators::cauchy(&gv)?;
            let (min_sum, i, j) = gv.min_mixed_sum();
            if min_sum <= 0.0 {
                eprintln!(
                    "warning: c_{} + d_{} = {min_sum} <= 0; this Cauchy tensor is not completely positive and not strictly copositive",
                    i + 1,
                    j + 1
                );
            }
            (a, None)
        }
        Family::CauchyDec => (generators::cauchy_decomposable(&gv()?)?, None),
        Family::Pascal => {
            let (m, n) = dims()?;
            (generators::pascal(m, n)?, None)
        }
        Family::PascalDec => {
            let (m, n) = dims()?;
            (generators::pascal_decomposable(m, n)?, None)
        }
        Family::Outer => {
            let b = square_matrix(&need(args.bmat.clone(), "bmat")?, "bmat")?;
            let c = square_matrix(&need(args.cmat.clone(), "cmat")?, "cmat")?;
            (generators::outer(&MatrixFactorPair::new(b, c)?)?, None)
        }
        Family::DiagCounterexample => {
            let m = need(args.m, "m")?;
            let d = decompose::diagonal_cp(m)?;
            (generators::diagonal_counterexample(m)?, Some(d))
        }
        Family::RandomCpb => {
            let (m, n) = dims()?;
            let r = need(args.r, "r")?;
            if r == 0 {
                return Err(Error::InvalidParameter("--r must be >= 1".into()));
            }
            let d = random::random_cpb(m, n, r, &mut random::rng(cli.seed))?;
            (d.reconstruct(), Some(d))
        }
    };
    emit(cli.out.as_deref(), &io::tensor_to_json(&tensor)?)?;
    if let Some(d) = decomposition {
        match decomposition_path(cli.out.as_deref(), args.decomp_out.as_deref()) {
            Some(path) => io::write_json(&path, &io::decomposition_document(&d))?,
            None => eprintln!("warning: decomposition not written; pass --out or --decomp-out"),
        }
    }
    Ok(())
}

fn cmd_check(cli: &Cli, check: CheckArg, path: &Path) -> Result<()> {
    let a = read_tensor(path)?;
    let opts = MinimizeOptions {
        starts: cli.starts,
        seed: cli.seed,
    };
    let report = match check {
        CheckArg::Psd => ReportDocument::from_verdict(&positivity::is_psd(&a, cli.tol, &opts)?),
        CheckArg::Pd => ReportDocument::from_verdict(&positivity::is_pd(&a, cli.tol, &opts)?),
        CheckArg::Copositive => ReportDocument::from_verdict(&positivity::is_copositive(&a, cli.tol, &opts)?),
        CheckArg::StrictCopositive => {
            ReportDocument::from_verdict(&positivity::is_strictly_copositive(&a, cli.tol, &opts)?)
        }
        CheckArg::NecessaryCpb => {
            let tol = cli.tol.unwrap_or_else(|| flatten::default_tol(&a));
            let battery = flatten::necessary_cpb_battery(&a, tol, &opts)?;
            let starts = positivity::simplex_min(&a, &opts)?.starts_used;
            ReportDocument::from_battery(&battery, starts, cli.seed)
        }
    };
    emit(cli.out.as_deref(), &io::to_json(&report)?)
}

/// Fails when the relative residual exceeds `tol`; `scale` is `max|target|`.
fn check_residual(r: &Residual, tol: f64, scale: f64) -> Result<()> {
    if r.relative_error > tol {
        return Err(Error::ReconstructionMismatch {
            max_abs_error: r.max_abs_error,
            tol: tol * scale.max(1.0),
        });
    }
    Ok(())
}

fn cmd_decompose(cli: &Cli, args: &DecomposeArgs) -> Result<()> {
    let method_name = args.method.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    let mut output = DecomposeOutput {
        method: method_name,
        decomposition: None,
        sos: None,
        extraction: None,
        residual: ResidualDocument {
            max_abs_error: 0.0,
            relative_error: 0.0,
        },
    };
    let mut failure = None;
    match args.method {
        Method::PascalExact => {
            let (m, n) = (need(args.m, "m")?, need(args.n, "n")?);
            let d = decompose::pascal_cp(m, n)?;
            let r = Residual::between(&d.reconstruct(), &generators::pascal(m, n)?)?;
            failure = check_residual(&r, cli.tol.unwrap_or(1e-9), d.reconstruct().max_abs()).err();
            output.decomposition = Some(io::decomposition_document(&d));
            output.residual = r.into();
        }
        Method::CauchyQuad => {
            let gv = GeneratingVectors::new(need(args.c.clone(), "c")?, need(args.d.clone(), "d")?)?;
            let cp = decompose::cauchy_cp(&gv, cli.tol.unwrap_or(1e-8))?;
            output.decomposition = Some(io::decomposition_document(&cp.decomposition));
            output.residual = cp.residual.into();
        }
        Method::SosFlatten => {
            let a = read_tensor(&need(args.tensor.clone(), "tensor")?)?;
            let tol = cli.tol.unwrap_or_else(|| flatten::default_tol(&a));
            let sos = flatten::sos_from_flattening(&a, tol)?;
            let r = Residual::between(&sos.to_tensor()?, &a)?;
            // dropped eigenvalues are at most tol each
            let allowed = (a.m() * a.n()) as f64 * tol / a.max_abs().max(f64::MIN_POSITIVE);
            failure = check_residual(&r, allowed.max(1e-12), a.max_abs()).err();
            output.sos = Some(io::sos_document(&sos));
            output.residual = r.into();
        }
        Method::Lift => {
            let bf = factor_list(&need(args.b_factors.clone(), "b-factors")?, "b-factors")?;
            let cf = factor_list(&need(args.c_factors.clone(), "c-factors")?, "c-factors")?;
            let d = decompose::lift_matrix_cp(&bf, &cf)?;
            let target = generators::outer(&MatrixFactorPair::new(
                decompose::gram_sum(&bf),
                decompose::gram_sum(&cf),
            )?)?;
            let r = Residual::between(&d.reconstruct(), &target)?;
            failure = check_residual(&r, cli.tol.unwrap_or(1e-12), target.max_abs()).err();
            output.decomposition = Some(io::decomposition_document(&d));
            output.residual = r.into();
        }
        Method::ExtractFactors => {
            let a = read_tensor(&need(args.tensor.clone(), "tensor")?)?;
            let e = decompose::extract_factors(&a, cli.tol.unwrap_or(decompose::DEFAULT_EXTRACT_TOL))?;
            let scale = a.max_abs();
            output.residual = ResidualDocument {
                max_abs_error: e.residual(),
                relative_error: if scale > 0.0 { e.residual() / scale } else { e.residual() },
            };
            if !e.is_decomposable() {
                eprintln!("not decomposable: residual {:e}", e.residual());
            }
            output.extraction = Some(ExtractionDocument::from_extraction(&e));
        }
    }
    emit(cli.out.as_deref(), &io::to_json(&output)?)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn cmd_pair(cli: &Cli, a: &Path, b: &Path) -> Result<()> {
    let value = read_tensor(a)?.pairing(&read_tensor(b)?)?;
    emit(cli.out.as_deref(), &format!("{value}\n"))
}

/// Returns whether every case passed.
fn cmd_verify(cli: &Cli, theorem: &str, count: usize) -> Result<bool> {
    let cfg = RunConfig {
        seed: cli.seed,
        tol: cli.tol,
        starts: cli.starts,
        count,
    };
    let reports = if theorem.eq_ignore_ascii_case("all") {
        harness::verify_all(&cfg)?
    } else {
        let id = TheoremId::parse(theorem)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theorem id `{theorem}`")))?;
        vec![harness::verify(id, &cfg)?]
    };
    let text = if reports.len() == 1 {
        io::to_json(&reports[0])?
    } else {
        io::to_json(&reports)?
    };
    emit(cli.out.as_deref(), &text)?;
    let mut ok = true;
    for r in &reports {
        eprintln!(
            "{}: {}/{} passed, worst residual {:e}",
            r.theorem_id.name(),
            r.cases_passed,
            r.cases_run,
            r.worst_residual
        );
        for f in r.failures() {
            eprintln!("  FAILED {}: {}", f.case, f.note);
        }
        ok &= r.all_passed();
    }
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("--tol must be positive, got {tol}")));
        }
    }
    if cli.starts == Some(0) {
        return Err(Error::InvalidParameter("--starts must be >= 1".into()));
    }
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args).map(|_| true),
        Command::Check { check, tensor } => cmd_check(cli, *check, tensor).map(|_| true),
        Command::Decompose(args) => cmd_decompose(cli, args).map(|_| true),
        Command::Pair { a, b } => cmd_pair(cli, a, b).map(|_| true),
        Command::Verify { theorem, count } => cmd_verify(cli, theorem, *count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

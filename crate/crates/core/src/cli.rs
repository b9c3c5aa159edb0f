//! Command-line surface: `coeffs`, `walk`, `extract`, `eval`, `verify`,
//! `model`.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 walk routes disagree,
//! 4 insufficient grid or quadrature resolution, 5 membership or Gram check
//! failed.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::Error;
use crate::exactnum::to_f64;
use crate::models::{self, ModelParams};
use crate::seqfile::{self, format_float, format_rational};
use crate::series::{self, SphericalModel};
use crate::walk::{self, CoeffSeq};
use crate::weights::{self, Parity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_WALK_MISMATCH: i32 = 3;
pub const EXIT_RESOLUTION: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

/// Default trapezoid grid for Fourier extraction from a model.
pub const DEFAULT_GRID: usize = 16_385;

#[derive(Debug, Parser)]
#[command(
    name = "schoenberg",
    version,
    about = "Dimension walks for Schoenberg coefficients on spheres"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Odd,
    Even,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Odd => Parity::OddTarget,
            ParityArg::Even => Parity::EvenTarget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RowFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Recursive,
    Both,
}

#[derive(Debug, clap::Args)]
pub struct ModelArgs {
    /// Decay exponent of the hs family.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Constant c_n of the hs family.
    #[arg(long)]
    pub c: Option<f64>,
    /// c_0 of the hs family (defaults to c).
    #[arg(long)]
    pub c0: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> ModelParams {
        ModelParams {
            epsilon: self.epsilon,
            c: self.c,
            c0: self.c0,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print one closed-form weight row.
    Coeffs {
        #[arg(long, value_enum)]
        parity: ParityArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: RowFormat,
    },
    /// Walk a sequence file up by 2k dimensions.
    Walk {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "closed")]
        method: Method,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: SeqFormat,
    },
    /// Extract Fourier (dim 1) or Legendre (dim 2) coefficients.
    Extract {
        /// Registered model name.
        #[arg(long, conflicts_with = "samples", required_unless_present = "samples")]
        model: Option<String>,
        /// JSON file {"psi": [...]} sampled on theta_j = j pi / (M - 1).
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n_max: usize,
        /// Trapezoid grid size for dim 1 (model input).
        #[arg(long)]
        grid: Option<usize>,
        /// Gauss-Legendre order for dim 2.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: SeqFormat,
        #[command(flatten)]
        params: ModelArgs,
    },
    /// Evaluate the series of a sequence file at angles in [0, pi].
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// Angles; accepts numbers and forms like pi, pi/2, 2pi/3.
        #[arg(long = "theta", value_delimiter = ',', num_args = 1.., required = true, allow_hyphen_values = true)]
        thetas: Vec<String>,
    },
    /// Membership report and optional Gram matrix check.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Also report positive-entry counts by parity.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        gram: bool,
        /// Sphere dimension for the Gram check (defaults to the file's).
        #[arg(long)]
        dimension: Option<usize>,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the coefficient sequence of a registered model family.
    Model {
        name: String,
        #[arg(long)]
        n_max: usize,
        /// Walk the family by 2k dimensions before writing.
        #[arg(long)]
        walked_k: Option<usize>,
        /// With --walked-k on example31: use the Beta closed form.
        #[arg(long, requires = "walked_k")]
        closed_form: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: SeqFormat,
        #[command(flatten)]
        params: ModelArgs,
    },
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InsufficientResolution(_) => EXIT_RESOLUTION,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command, writing to the
/// given streams. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Coeffs {
            parity,
            n,
            k,
            format,
        } => cmd_coeffs(parity.into(), n, k, format, out),
        Command::Walk {
            input,
            k,
            method,
            output,
            format,
        } => cmd_walk(&input, k, method, output.as_deref(), format, out, err),
        Command::Extract {
            model,
            samples,
            dim,
            n_max,
            grid,
            order,
            output,
            format,
            params,
        } => {
            let source = match (model, samples) {
                (Some(m), None) => Source::Model(m, params.params()),
                (None, Some(p)) => Source::Samples(p),
                _ => return Err(Failure::usage("give exactly one of --model or --samples")),
            };
            cmd_extract(
                source,
                dim,
                n_max,
                grid,
                order,
                output.as_deref(),
                format,
                out,
            )
        }
        Command::Eval { input, thetas } => cmd_eval(&input, &thetas, out),
        Command::Verify {
            input,
            strict,
            gram,
            dimension,
            points,
            seed,
        } => cmd_verify(
            &input,
            strict,
            gram.then_some((dimension, points, seed)),
            out,
        ),
        Command::Model {
            name,
            n_max,
            walked_k,
            closed_form,
            output,
            format,
            params,
        } => cmd_model(
            &name,
            &params.params(),
            n_max,
            walked_k,
            closed_form,
            output.as_deref(),
            format,
            out,
        ),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::usage(format!("I/O error: {e}"))
}

fn emit(
    seq: &CoeffSeq,
    output: Option<&Path>,
    format: SeqFormat,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let text = match format {
        SeqFormat::Json => seqfile::seq_to_json(seq),
        SeqFormat::Csv => seqfile::seq_to_csv(seq),
    };
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(io_failure),
    }
}

fn read_input(path: &Path) -> Result<CoeffSeq, Failure> {
    seqfile::read_seq(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn cmd_coeffs(
    parity: Parity,
    n: usize,
    k: usize,
    format: RowFormat,
    out: &mut dyn Write,
) -> CmdResult {
    let row = weights::weights(parity, n, k)?;
    let exact: Vec<String> = row.weights.iter().map(format_rational).collect();
    let floats: Vec<f64> = row.weights.iter().map(to_f64).collect();
    let float_text: Vec<String> = floats.iter().map(|x| format_float(*x)).collect();
    let sum = format_rational(&row.total());
    let text = match format {
        RowFormat::Text => format!(
            "{}\n{}\nsum: {sum}\n",
            exact.join(", "),
            float_text.join(", ")
        ),
        RowFormat::Csv => {
            let symbol = match parity {
                Parity::OddTarget => "a",
                Parity::EvenTarget => "u",
            };
            let header: Vec<String> = (0..=k).map(|i| format!("{symbol}_{i}")).collect();
            format!(
                "{}\n{}\n{}\n",
                header.join(","),
                exact.join(","),
                float_text.join(",")
            )
        }
        RowFormat::Json => {
            let v = serde_json::json!({
                "parity": parity.to_string(),
                "n": n,
                "k": k,
                "weights": exact,
                "floats": floats,
                "sum": sum,
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("json value")
            )
        }
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn nonnegativity_line(seq: &CoeffSeq) -> String {
    match seq.negative_entries().first() {
        None => "nonnegative: yes".to_string(),
        Some(n) => format!(
            "nonnegative: no ({} negative entries, first at n={n})",
            seq.negative_entries().len()
        ),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_walk(
    input: &Path,
    k: usize,
    method: Method,
    output: Option<&Path>,
    format: SeqFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let seq = read_input(input)?;
    let (result, comparison) = match method {
        Method::Closed => (walk::walk_closed_form(&seq, k)?, None),
        Method::Recursive => (walk::walk_recursive(&seq, k)?, None),
        Method::Both => {
            let c = walk::compare_walks(&seq, k)?;
            (c.closed.clone(), Some(c))
        }
    };
    emit(&result, output, format, out)?;
    // reports go to stdout only when the sequence itself went to a file
    let mut report = String::new();
    if let Some(c) = &comparison {
        report.push_str(&format!("max_discrepancy: {:e}\n", c.max_discrepancy));
    }
    report.push_str(&nonnegativity_line(&result));
    report.push('\n');
    if output.is_some() {
        out.write_all(report.as_bytes()).map_err(io_failure)?;
    } else {
        err.write_all(report.as_bytes()).map_err(io_failure)?;
    }
    match comparison {
        Some(c) if !c.agree => Err(Failure {
            code: EXIT_WALK_MISMATCH,
            message: format!(
                "closed-form and recursive walks disagree (max relative discrepancy {:e})",
                c.max_discrepancy
            ),
        }),
        _ => Ok(EXIT_OK),
    }
}

pub enum Source {
    Model(String, ModelParams),
    Samples(PathBuf),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleFile {
    psi: Vec<f64>,
    #[serde(default)]
    theta: Option<Vec<f64>>,
}

fn read_samples(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let file: SampleFile = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let m = file.psi.len();
    if m < 2 {
        return Err(Failure::usage("sample file needs at least 2 values"));
    }
    if file.psi.iter().any(|x| !x.is_finite()) {
        return Err(Failure::usage("sample values must be finite"));
    }
    if let Some(theta) = &file.theta {
        if theta.len() != m {
            return Err(Failure::usage("theta and psi lengths differ"));
        }
        for (j, t) in theta.iter().enumerate() {
            let expected = j as f64 * PI / (m - 1) as f64;
            if (t - expected).abs() > 1e-9 {
                return Err(Failure::usage(format!(
                    "samples must lie on the uniform grid j pi / (M - 1); theta[{j}] = {t}"
                )));
            }
        }
    }
    Ok(file.psi)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_extract(
    source: Source,
    dim: usize,
    n_max: usize,
    grid: Option<usize>,
    order: Option<usize>,
    output: Option<&Path>,
    format: SeqFormat,
    out: &mut dyn Write,
) -> CmdResult {
    if dim != 1 && dim != 2 {
        return Err(Failure::usage(format!("--dim must be 1 or 2, got {dim}")));
    }
    let model = match source {
        Source::Model(name, params) => models::model_by_name(&name, &params)?,
        Source::Samples(path) => {
            let samples = read_samples(&path)?;
            let fourier = series::extract_fourier_samples(&samples, n_max)?;
            if dim == 1 {
                emit(&fourier, output, format, out)?;
                return Ok(EXIT_OK);
            }
            // cosine interpolant of the samples, band-limited to the grid
            let band = (samples.len() - 1) / 2;
            let interp = series::extract_fourier_samples(&samples, band)?;
            SphericalModel::from_series("samples", &interp)
        }
    };
    let seq = if dim == 1 {
        let grid = grid.unwrap_or_else(|| DEFAULT_GRID.max(2 * n_max + 1));
        series::extract_fourier(&model, n_max, grid)?
    } else {
        let order = order.unwrap_or(2 * n_max + 64);
        series::extract_legendre(&model, n_max, order)?
    };
    emit(&seq, output, format, out)?;
    Ok(EXIT_OK)
}

/// Parses an angle such as `0.5`, `pi`, `pi/2`, `2pi/3` or `3*pi/4`.
pub fn parse_angle(s: &str) -> Result<f64, Failure> {
    let bad = || Failure::usage(format!("cannot parse angle '{s}'"));
    let t = s.trim().to_ascii_lowercase();
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coef = t[..pos].trim().trim_end_matches('*').trim();
    let coef = if coef.is_empty() {
        1.0
    } else if coef == "-" {
        -1.0
    } else {
        coef.parse::<f64>().map_err(|_| bad())?
    };
    let rest = t[pos + 2..].trim();
    let div = if rest.is_empty() {
        1.0
    } else {
        rest.strip_prefix('/')
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?
    };
    Ok(coef * PI / div)
}

pub fn cmd_eval(input: &Path, thetas: &[String], out: &mut dyn Write) -> CmdResult {
    let seq = read_input(input)?;
    let angles = thetas
        .iter()
        .map(|s| parse_angle(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::from("theta,psi\n");
    for t in angles {
        let v = series::evaluate_series(&seq, t)?;
        text.push_str(&format!("{},{}\n", format_float(t), format_float(v)));
    }
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(
    input: &Path,
    strict: bool,
    gram: Option<(Option<usize>, usize, u64)>,
    out: &mut dyn Write,
) -> CmdResult {
    let seq = read_input(input)?;
    let report = series::check_membership(&seq, strict);
    let mut pass = report.passes();
    let mut text = report.to_string();
    if let Some((dimension, points, seed)) = gram {
        let model = SphericalModel::from_series("input", &seq);
        let g = series::gram_psd_check(&model, dimension.unwrap_or(seq.dimension()), points, seed)?;
        pass &= g.psd_pass;
        text.push_str(&g.to_string());
    }
    text.push_str(if pass {
        "result: pass\n"
    } else {
        "result: FAIL\n"
    });
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_model(
    name: &str,
    params: &ModelParams,
    n_max: usize,
    walked_k: Option<usize>,
    closed_form: bool,
    output: Option<&Path>,
    format: SeqFormat,
    out: &mut dyn Write,
) -> CmdResult {
    if walked_k == Some(0) {
        return Err(Failure::usage("--walked-k must be at least 1"));
    }
    let seq = match (name, walked_k) {
        ("example31", None) => models::example_fourier_seq(n_max)?,
        ("example31", Some(k)) if closed_form => models::example_walked_seq(n_max, k)?,
        ("example31", Some(k)) => {
            walk::walk_closed_form(&models::example_fourier_seq(n_max + 2 * k)?, k)?
        }
        ("hs", _) if closed_form => {
            return Err(Failure::usage(
                "--closed-form is only available for example31",
            ))
        }
        ("hs", None) => models::hs_model_seq(&params.hs_spec()?, n_max)?,
        ("hs", Some(k)) => {
            walk::walk_closed_form(&models::hs_model_seq(&params.hs_spec()?, n_max + 2 * k)?, k)?
        }
        (other, _) => {
            return Err(Failure::usage(format!(
                "unknown model family '{other}' (known: example31, hs)"
            )))
        }
    };
    emit(&seq, output, format, out)?;
    Ok(EXIT_OK)
}

/// Caps rayon's global pool from `SCHOENBERG_THREADS`, if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("SCHOENBERG_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

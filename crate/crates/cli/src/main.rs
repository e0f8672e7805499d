//! Command-line front end: kernel norms, sandwich bounds, asymptotic
//! estimates, verification of single cases and whole sweeps.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fourier_bounds::asymptotics::{estimate, threshold_n0, threshold_n1, FormulaId};
use fourier_bounds::bounds::{sandwich, PreparedKernel};
use fourier_bounds::harness::{exit_code, sweep, verify_case, write_report, GridConfig, HarnessError, ReportFormat};
use fourier_bounds::{KernelParams, NormOrder, QuadratureConfig, TruncationIndex};
use serde::Serialize;

const EXIT_NUMERIC: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "fourier-bounds", version, about = "Fourier-sum error bounds on generalized Poisson classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output encoding.
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Case {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long)]
    n: u64,
    /// Norm exponent; `inf` for the uniform norm.
    #[arg(long, default_value = "2")]
    s: NormOrder,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// L_s norm of the kernel tail, scaled by e^{αn^r}.
    Norm(Case),
    /// Lower bound, upper bound and best-constant deviation.
    Sandwich(Case),
    /// Evaluate one asymptotic formula.
    Estimate {
        #[command(flatten)]
        case: Case,
        #[arg(long)]
        formula: FormulaId,
    },
    /// Sandwich plus every relevant estimate and its implied coefficients.
    Verify(Case),
    /// Evaluate a TOML parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads, overriding the config file.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Admissibility thresholds n₀(α, r, p) for p ∈ {1, 2, s, ∞} and n₁(α, r).
    Thresholds {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: Option<NormOrder>,
    },
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Numeric(inner) => inner.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<fourier_bounds::NumericError> for Failure {
    fn from(e: fourier_bounds::NumericError) -> Self {
        match e {
            fourier_bounds::NumericError::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl Case {
    fn resolve(&self) -> Result<(KernelParams, TruncationIndex, NormOrder, QuadratureConfig), Failure> {
        let params = KernelParams::new(self.alpha, self.r, self.beta)?;
        let n = TruncationIndex::new(self.n)?;
        let s = self.s.validate()?;
        let mut cfg = QuadratureConfig::default();
        if let Some(t) = self.tol {
            cfg.rel_tol = t;
        }
        cfg.validate()?;
        Ok((params, n, s, cfg))
    }
}

#[derive(Serialize)]
struct NormRow {
    alpha: f64,
    r: f64,
    beta: f64,
    n: u64,
    s: String,
    norm_scaled: f64,
    log_scale: f64,
    value: f64,
}

#[derive(Serialize)]
struct ThresholdRow {
    p: String,
    n0: Option<u64>,
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows<T: Serialize>(rows: &[T], format: ReportFormat, out: &mut dyn Write) -> Result<(), Failure> {
    let fail = |e: String| Failure::Numeric(format!("output: {e}"));
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(|e| fail(e.to_string()))?;
            writeln!(out).map_err(|e| fail(e.to_string()))?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for row in rows {
                w.serialize(row).map_err(|e| fail(e.to_string()))?;
            }
            w.flush().map_err(|e| fail(e.to_string()))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let format: ReportFormat = cli.format.parse()?;
    let mut out = sink(&cli.out)?;
    let code = match cli.command {
        Command::Norm(case) => {
            let (params, n, s, cfg) = case.resolve()?;
            let k = PreparedKernel::new(&params, n)?;
            let norm = k.upper(s, &cfg)? * PI;
            let row = NormRow {
                alpha: params.alpha,
                r: params.r,
                beta: params.beta,
                n: n.get(),
                s: s.to_string(),
                norm_scaled: norm,
                log_scale: k.log_scale,
                value: norm * k.log_scale.exp(),
            };
            write_rows(&[row], format, &mut out)?;
            0
        }
        Command::Sandwich(case) => {
            let (params, n, s, cfg) = case.resolve()?;
            write_rows(&[sandwich(&params, n, s, &cfg)?], format, &mut out)?;
            0
        }
        Command::Estimate { case, formula } => {
            let (params, n, s, _) = case.resolve()?;
            write_rows(&[estimate(formula, &params, n, s)?], format, &mut out)?;
            0
        }
        Command::Verify(case) => {
            let (params, n, s, cfg) = case.resolve()?;
            let reports = [verify_case(&params, n, s, &cfg)?];
            write_report(&reports, format, &mut out)?;
            exit_code(&reports) as u8
        }
        Command::Sweep { config, jobs } => {
            let mut grid = GridConfig::load(&config)?;
            if let Some(j) = jobs {
                grid.jobs = j;
            }
            let reports = sweep(&grid)?;
            write_report(&reports, format, &mut out)?;
            exit_code(&reports) as u8
        }
        Command::Thresholds { alpha, r, s } => {
            let mut orders = vec![NormOrder::Finite(1.0), NormOrder::Finite(2.0), NormOrder::Infinity];
            if let Some(s) = s {
                let s = s.validate()?;
                if !orders.contains(&s) {
                    orders.insert(2, s);
                }
            }
            let mut rows = Vec::new();
            for p in orders {
                rows.push(ThresholdRow {
                    p: p.to_string(),
                    n0: overflow_as_none(threshold_n0(alpha, r, p))?,
                });
            }
            rows.push(ThresholdRow {
                p: "n1".into(),
                n0: overflow_as_none(threshold_n1(alpha, r))?,
            });
            write_rows(&rows, format, &mut out)?;
            0
        }
    };
    out.flush().map_err(|e| Failure::Numeric(format!("output: {e}")))?;
    Ok(code)
}

fn overflow_as_none(t: fourier_bounds::Result<u64>) -> Result<Option<u64>, Failure> {
    match t {
        Ok(v) => Ok(Some(v)),
        Err(fourier_bounds::NumericError::ThresholdOverflow(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

//! Verification of the numeric sandwich against the asymptotic estimates,
//! parameter sweeps and report emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::asymptotics::{estimate, formulas_for, AsymptoticEstimate, FormulaId};
use crate::bounds::{sandwich, SandwichBounds};
use crate::error::NumericError;
use crate::kernel::{KernelParams, ScaledValue, TruncationIndex};
use crate::norms::{NormOrder, QuadratureConfig};

/// Failures outside the numeric layers.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One estimate together with the coefficients implied by both sandwich sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateCheck {
    pub estimate: AsymptoticEstimate,
    /// `None` when the envelope vanishes identically.
    pub gamma_implied_lower: Option<f64>,
    pub gamma_implied_upper: Option<f64>,
    /// Only set for applicable estimates with an explicit coefficient bound.
    pub within_envelope: Option<bool>,
}

impl EstimateCheck {
    fn new(estimate: AsymptoticEstimate, bounds: &SandwichBounds) -> Self {
        let implied = |v: f64| {
            (estimate.envelope_unit > 0.0)
                .then(|| estimate.implied_gamma(ScaledValue::new(v, bounds.log_scale).rescaled(estimate.log_scale)))
        };
        let gamma_implied_lower = implied(bounds.lower);
        let gamma_implied_upper = implied(bounds.upper);
        let within_envelope = match (estimate.applicable, estimate.gamma_bound) {
            (true, Some(g)) => Some(
                [gamma_implied_lower, gamma_implied_upper]
                    .iter()
                    .all(|x| x.is_some_and(|x| x.abs() <= g)),
            ),
            _ => None,
        };
        EstimateCheck {
            estimate,
            gamma_implied_lower,
            gamma_implied_upper,
            within_envelope,
        }
    }
}

/// Everything computed for one (α, r, β, n, s) case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub params: KernelParams,
    pub n: u64,
    pub s: NormOrder,
    pub sandwich: Option<SandwichBounds>,
    pub estimates: Vec<EstimateCheck>,
    /// True when some estimate with an explicit bound is asserted at this n.
    pub applicable: bool,
    /// r = 1, s = 1: |upper − main| · n(1 − e^{−α})/e^{−α} against the
    /// elliptic-integral main term.
    pub trend_statistic: Option<f64>,
    pub error: Option<String>,
    pub wall_time_ms: u64,
}

impl VerificationReport {
    /// Some when the case was evaluated and carries asserted checks.
    pub fn passed(&self) -> Option<bool> {
        if self.error.is_some() || !self.applicable {
            return None;
        }
        Some(self.estimates.iter().all(|e| e.within_envelope != Some(false)))
    }
}

/// Stable 16-hex-digit identifier of the rounded parameter tuple.
pub fn case_id(params: &KernelParams, n: u64, s: NormOrder) -> String {
    let key = format!("{:.12e}|{:.12e}|{:.12e}|{}|{}", params.alpha, params.r, params.beta, n, s);
    let digest = Sha256::digest(key.as_bytes());
    hex::encode(&digest[..8])
}

/// Sandwich, every estimate relevant to (r, s), and their implied coefficients.
pub fn verify_case(
    params: &KernelParams,
    n: TruncationIndex,
    s: NormOrder,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport, NumericError> {
    let start = Instant::now();
    let s = s.validate()?;
    let bounds = sandwich(params, n, s, cfg)?;
    let mut estimates = Vec::new();
    for id in formulas_for(params, s) {
        match estimate(id, params, n, s) {
            Ok(e) => estimates.push(EstimateCheck::new(e, &bounds)),
            // e.g. the logarithmic main term at tiny n
            Err(NumericError::Domain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let applicable = estimates
        .iter()
        .any(|e| e.estimate.applicable && e.estimate.gamma_bound.is_some());
    let trend_statistic = estimates
        .iter()
        .find(|e| e.estimate.formula_id == FormulaId::Stechkin)
        .map(|e| {
            let q = (-params.alpha).exp();
            let residual = ScaledValue::new(bounds.upper, bounds.log_scale).rescaled(e.estimate.log_scale) - e.estimate.main_term;
            residual.abs() * n.get() as f64 * (1.0 - q) / q
        });
    Ok(VerificationReport {
        case_id: case_id(params, n.get(), s),
        params: *params,
        n: n.get(),
        s,
        sandwich: Some(bounds),
        estimates,
        applicable,
        trend_statistic,
        error: None,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

fn failed_report(alpha: f64, r: f64, beta: f64, n: u64, s: NormOrder, err: String) -> VerificationReport {
    let params = KernelParams { alpha, r, beta };
    VerificationReport {
        case_id: case_id(&params, n, s),
        params,
        n,
        s,
        sandwich: None,
        estimates: Vec::new(),
        applicable: false,
        trend_statistic: None,
        error: Some(err),
        wall_time_ms: 0,
    }
}

/// Parameter grid of a sweep, read from TOML.
///
/// ```toml
/// alpha = [0.5, 1.0]
/// r = [0.5]
/// beta = [0.0]
/// s = [1, 2, "inf"]
/// n = [16, 64]
/// jobs = 2
///
/// [quadrature]
/// rel_tol = 1e-10
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub alpha: Vec<f64>,
    pub r: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: Vec<f64>,
    pub s: Vec<NormOrder>,
    pub n: Vec<u64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub jobs: usize,
}

fn default_beta() -> Vec<f64> {
    vec![0.0]
}

impl FromStr for GridConfig {
    type Err = HarnessError;

    fn from_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: GridConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.quadrature.validate()?;
        if [cfg.alpha.len(), cfg.r.len(), cfg.beta.len(), cfg.s.len(), cfg.n.len()].contains(&0) {
            return Err(HarnessError::Config("every grid list must be non-empty".into()));
        }
        Ok(cfg)
    }
}

impl GridConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        fs::read_to_string(path).map_err(io_err(path))?.parse()
    }

    pub fn case_count(&self) -> usize {
        self.alpha.len() * self.r.len() * self.beta.len() * self.s.len() * self.n.len()
    }
}

/// Evaluates the Cartesian product of the grid; failures stay in their row.
/// Rows come back ordered by case id whatever the thread count.
pub fn sweep(grid: &GridConfig) -> Result<Vec<VerificationReport>, HarnessError> {
    let mut cases = Vec::with_capacity(grid.case_count());
    for &alpha in &grid.alpha {
        for &r in &grid.r {
            for &beta in &grid.beta {
                for &s in &grid.s {
                    for &n in &grid.n {
                        cases.push((alpha, r, beta, s, n));
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(grid.jobs)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let run = |&(alpha, r, beta, s, n): &(f64, f64, f64, NormOrder, u64)| {
        let outcome = KernelParams::new(alpha, r, beta)
            .and_then(|p| Ok((p, TruncationIndex::new(n)?)))
            .and_then(|(p, idx)| verify_case(&p, idx, s, &grid.quadrature));
        outcome.unwrap_or_else(|e| failed_report(alpha, r, beta, n, s, e.to_string()))
    };
    let mut rows: Vec<VerificationReport> = pool.install(|| cases.par_iter().map(run).collect());
    rows.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    Ok(rows)
}

/// Output encodings of `emit_report`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(HarnessError::Config(format!("unknown format {other:?}"))),
        }
    }
}

const PER_FORMULA: [&str; 6] = ["main", "envelope", "gamma_lower", "gamma_upper", "within", "applicable"];

pub fn csv_header() -> Vec<String> {
    let mut head: Vec<String> = [
        "case_id",
        "alpha",
        "r",
        "beta",
        "n",
        "s",
        "lower_scaled",
        "upper_scaled",
        "log_scale",
        "best_constant",
        "h_star",
        "lambda_star",
    ]
    .iter()
    .map(|c| c.to_string())
    .collect();
    for f in FormulaId::ALL {
        head.extend(PER_FORMULA.iter().map(|c| format!("{f}_{c}")));
    }
    head.extend(["trend_statistic".to_string(), "error".to_string()]);
    head
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T, F: Fn(T) -> String>(x: Option<T>, f: F) -> String {
    x.map(f).unwrap_or_default()
}

fn csv_row(rep: &VerificationReport) -> Vec<String> {
    let mut row = vec![
        rep.case_id.clone(),
        num(rep.params.alpha),
        num(rep.params.r),
        num(rep.params.beta),
        rep.n.to_string(),
        rep.s.to_string(),
    ];
    let sw = rep.sandwich.as_ref();
    for field in [
        |b: &SandwichBounds| b.lower,
        |b: &SandwichBounds| b.upper,
        |b: &SandwichBounds| b.log_scale,
        |b: &SandwichBounds| b.best_constant,
        |b: &SandwichBounds| b.h_star,
        |b: &SandwichBounds| b.lambda_star,
    ] {
        row.push(opt(sw.map(field), num));
    }
    for f in FormulaId::ALL {
        match rep.estimates.iter().find(|e| e.estimate.formula_id == f) {
            Some(e) => row.extend([
                num(e.estimate.main_term),
                num(e.estimate.envelope_unit),
                opt(e.gamma_implied_lower, num),
                opt(e.gamma_implied_upper, num),
                opt(e.within_envelope, |b| b.to_string()),
                e.estimate.applicable.to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), PER_FORMULA.len())),
        }
    }
    row.push(opt(rep.trend_statistic, num));
    row.push(rep.error.clone().unwrap_or_default());
    row
}

/// Writes reports as CSV (one row per case) or JSON (array of reports).
pub fn write_report<W: Write>(reports: &[VerificationReport], format: ReportFormat, out: W) -> Result<(), HarnessError> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(csv_header())?;
            for rep in reports {
                w.write_record(csv_row(rep))?;
            }
            w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
        }
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, reports).map_err(|e| HarnessError::Config(e.to_string()))?;
            out.write_all(b"\n").map_err(|e| HarnessError::Csv(e.into()))?;
        }
    }
    Ok(())
}

pub fn emit_report(reports: &[VerificationReport], format: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut buf = std::io::BufWriter::new(file);
    write_report(reports, format, &mut buf)?;
    buf.flush().map_err(io_err(path))
}

/// Process exit status summarizing a set of reports.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    if reports.iter().any(|r| r.error.is_some()) {
        2
    } else if reports.iter().any(|r| r.passed() == Some(false)) {
        1
    } else {
        0
    }
}

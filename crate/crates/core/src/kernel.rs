//! Generalized Poisson kernels, their tails past a truncation index, and the
//! exponential tail sums that control them.
//!
//! Every tail quantity is stored in factored form: the tail
//! `Σ_{k≥n} e^{-αk^r} cos(kt − βπ/2)` is kept as `e^{-αn^r} · Q(t)` where the
//! scaled coefficients `e^{-α(k^r − n^r)}` start at one. At the orders where
//! the asymptotic statements apply the raw magnitudes sit far below the
//! smallest normal double, so nothing downstream ever sees them unscaled.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use serde::{Deserialize, Serialize};

use crate::error::{domain, NumericError, Result};
use crate::norms::PeriodicFunction;
use crate::quad::CompensatedSum;

/// The triple (α, r, β) of a generalized Poisson kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub alpha: f64,
    pub r: f64,
    pub beta: f64,
}

impl KernelParams {
    pub fn new(alpha: f64, r: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("r must be positive, got {r}"));
        }
        if !beta.is_finite() {
            return domain(format!("beta must be finite, got {beta}"));
        }
        Ok(KernelParams { alpha, r, beta })
    }

    /// βπ/2.
    pub fn phase(&self) -> f64 {
        self.beta * PI / 2.0
    }

    /// αr, the combination every asymptotic formula is written in.
    pub fn alpha_r(&self) -> f64 {
        self.alpha * self.r
    }

    /// -α n^r, the log-scale shared by all tail quantities at order n.
    pub fn log_scale(&self, n: TruncationIndex) -> f64 {
        -self.alpha * (n.get() as f64).powf(self.r)
    }
}

/// Order boundary n ≥ 1: the Fourier sum is S_{n-1} and the tail starts at k = n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruncationIndex(u64);

impl TruncationIndex {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return domain("truncation index must be >= 1");
        }
        Ok(TruncationIndex(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// A positive quantity carried as `scaled · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub scaled: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn new(scaled: f64, log_scale: f64) -> Self {
        ScaledValue { scaled, log_scale }
    }

    /// The raw value; underflows to zero at large orders.
    pub fn value(&self) -> f64 {
        self.scaled * self.log_scale.exp()
    }

    /// Re-expresses the value against another log-scale.
    pub fn rescaled(&self, log_scale: f64) -> f64 {
        self.scaled * (self.log_scale - log_scale).exp()
    }
}

/// `(n + m)^r − n^r` without cancellation.
pub(crate) fn power_gap(n: u64, r: f64, m: f64) -> f64 {
    let nf = n as f64;
    nf.powf(r) * (r * (m / nf).ln_1p()).exp_m1()
}

/// `k · t` reduced to roughly (−π, π], exact enough for k up to 2^53.
pub(crate) fn phase_mod(k: u64, t: f64) -> f64 {
    const TWO_PI_HI: f64 = 6.283_185_307_179_586;
    const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;
    let kf = k as f64;
    let p = kf * t;
    let err = kf.mul_add(t, -p);
    let q = (p / TWO_PI_HI).round();
    q.mul_add(-TWO_PI_HI, p) - q * TWO_PI_LO + err
}

/// Upper bound on `∫_k^∞ e^{-c(t^r − n^r)} dt`, from
/// Γ(a, x) ≤ x^{a-1}e^{-x} / (1 − (a−1)/x) with a = 1/r, x = c k^r.
fn remainder_bound(n: u64, r: f64, c: f64, k: f64) -> f64 {
    let gap = power_gap(n, r, k - n as f64);
    let base = k.powf(1.0 - r) / (c * r) * (-c * gap).exp();
    if r >= 1.0 {
        return base;
    }
    let denom = 1.0 - (1.0 - r) / (r * c * k.powf(r));
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        base / denom
    }
}

/// Relative size of the neglected remainder when truncating tail series.
pub const TAIL_REL_TOL: f64 = 1e-18;

/// Largest number of terms any tail series is allowed to use.
pub const MAX_TAIL_TERMS: usize = 1 << 23;

/// Scaled terms `e^{-c((n+m)^r − n^r)}`, m = 0, 1, ..., truncated once the
/// integral-comparison remainder falls below `TAIL_REL_TOL` of the sum.
pub(crate) fn tail_terms(n: TruncationIndex, r: f64, c: f64, max_terms: usize) -> Result<Vec<f64>> {
    let n = n.get();
    let mut terms = Vec::new();
    let mut acc = CompensatedSum::default();
    let mut m = 0usize;
    loop {
        let a = (-c * power_gap(n, r, m as f64)).exp();
        terms.push(a);
        acc.add(a);
        m += 1;
        if m % 64 == 0 || a < 1e-30 {
            let last = (n + m as u64 - 1) as f64;
            if remainder_bound(n, r, c, last) <= TAIL_REL_TOL * acc.value() {
                return Ok(terms);
            }
        }
        if m >= max_terms {
            return Err(NumericError::TruncationBudget { limit: max_terms });
        }
    }
}

/// `Σ_{k≥n} e^{-w α k^r}` as (scaled value, log-scale −wαn^r).
pub fn tail_sum(params: &KernelParams, n: TruncationIndex, weight: f64) -> Result<ScaledValue> {
    if !(weight > 0.0 && weight.is_finite()) {
        return domain(format!("weight must be positive, got {weight}"));
    }
    let c = weight * params.alpha;
    let terms = tail_terms(n, params.r, c, MAX_TAIL_TERMS)?;
    // smallest terms first
    let sum: CompensatedSum = terms.iter().rev().copied().collect();
    Ok(ScaledValue::new(sum.value(), -c * (n.get() as f64).powf(params.r)))
}

/// The kernel tail P⁽ⁿ⁾(t) in factored form `e^{-αn^r} · Q(t)`.
pub fn kernel_tail_eval(params: &KernelParams, n: TruncationIndex, t: f64) -> Result<ScaledValue> {
    let series = ModulatedSeries::kernel_tail(params, n)?;
    Ok(ScaledValue::new(series.eval(t), params.log_scale(n)))
}

/// Abel-summed closed form of `Σ_{k≥1} q^k cos(kt − βπ/2)`.
pub fn poisson_closed_form(q: f64, beta: f64, t: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("poisson_closed_form needs 0 < q < 1, got {q}"));
    }
    let phase = beta * PI / 2.0;
    let num = q * (t - phase).cos() - q * q * phase.cos();
    Ok(num / (1.0 - 2.0 * q * t.cos() + q * q))
}

/// A real 2π-periodic function written as a carrier times a complex envelope:
///
/// `f(t) = Re( e^{i(Nt − φ)} · Σ_{m≥0} c_m e^{imt} )`
///
/// with integer carrier N. Kernel tails, their shifted differences and their
/// convolutions with smooth densities all have this shape.
#[derive(Debug, Clone)]
pub struct ModulatedSeries {
    carrier: u64,
    phase: f64,
    coeffs: Vec<Complex64>,
}

const BLOCK: usize = 64;

impl ModulatedSeries {
    pub fn new(carrier: u64, phase: f64, coeffs: Vec<Complex64>) -> Self {
        ModulatedSeries {
            carrier,
            phase,
            coeffs,
        }
    }

    /// The scaled kernel tail Q(t) for the given order.
    pub fn kernel_tail(params: &KernelParams, n: TruncationIndex) -> Result<Self> {
        Self::kernel_tail_with_budget(params, n, MAX_TAIL_TERMS)
    }

    pub fn kernel_tail_with_budget(params: &KernelParams, n: TruncationIndex, max_terms: usize) -> Result<Self> {
        let terms = tail_terms(n, params.r, params.alpha, max_terms)?;
        Ok(ModulatedSeries {
            carrier: n.get(),
            phase: params.phase(),
            coeffs: terms.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        })
    }

    pub fn carrier(&self) -> u64 {
        self.carrier
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Σ |c_m|, a bound on the envelope modulus.
    pub fn l1_coeffs(&self) -> f64 {
        self.coeffs.iter().rev().map(|c| c.norm()).collect::<CompensatedSum>().value()
    }

    /// `t ↦ f(t) − f(t + h)`.
    pub fn shifted_difference(&self, h: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * (Complex64::new(1.0, 0.0) - Complex64::cis(phase_mod(self.carrier + m as u64, h))))
            .collect();
        ModulatedSeries {
            carrier: self.carrier,
            phase: self.phase,
            coeffs,
        }
    }

    /// Multiplies the coefficient of frequency k by `multiplier(k)`.
    pub fn with_multiplier<M: Fn(u64) -> Complex64>(&self, multiplier: M) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * multiplier(self.carrier + m as u64))
            .collect();
        ModulatedSeries {
            carrier: self.carrier,
            phase: self.phase,
            coeffs,
        }
    }

    fn rotated_sum(&self, first_freq: u64, t: f64, phase: f64) -> Complex64 {
        let step = Complex64::cis(t);
        let mut total = Complex64::new(0.0, 0.0);
        for (b, block) in self.coeffs.chunks(BLOCK).enumerate() {
            let k0 = first_freq + (b * BLOCK) as u64;
            let mut z = Complex64::cis(phase_mod(k0, t) - phase);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in block {
                acc += c * z;
                z *= step;
            }
            total += acc;
        }
        total
    }

    /// f(t).
    pub fn eval(&self, t: f64) -> f64 {
        self.rotated_sum(self.carrier, t, self.phase).re
    }

    /// The envelope Σ c_m e^{imt}.
    pub fn envelope_eval(&self, t: f64) -> Complex64 {
        self.rotated_sum(0, t, 0.0)
    }

    /// f at `offset + 2πj/grid`, j = 0..grid, by folding coefficients into
    /// one inverse FFT (exact sampling, no truncation beyond the series).
    pub fn sample_grid(&self, grid: usize, offset: f64) -> Vec<f64> {
        let mut bins = vec![Complex64::new(0.0, 0.0); grid];
        let g = grid as u64;
        for (m, c) in self.coeffs.iter().enumerate() {
            let k = self.carrier + m as u64;
            let z = if offset == 0.0 {
                *c
            } else {
                c * Complex64::cis(phase_mod(k, offset))
            };
            bins[(k % g) as usize] += z;
        }
        inverse_fft(&mut bins);
        let rot = Complex64::cis(-self.phase);
        bins.into_iter().map(|v| (v * rot).re).collect()
    }

    /// The envelope at 2πj/grid, j = 0..grid.
    pub fn envelope_grid(&self, grid: usize) -> Vec<Complex64> {
        let mut bins = vec![Complex64::new(0.0, 0.0); grid];
        for (m, c) in self.coeffs.iter().enumerate() {
            bins[m % grid] += c;
        }
        inverse_fft(&mut bins);
        bins
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn inverse_fft(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
}

impl PeriodicFunction for ModulatedSeries {
    fn eval(&self, t: f64) -> f64 {
        ModulatedSeries::eval(self, t)
    }

    fn sample(&self, grid: usize, offset: f64) -> Vec<f64> {
        self.sample_grid(grid, offset)
    }

    fn bandwidth(&self) -> usize {
        self.carrier as usize + self.coeffs.len()
    }
}

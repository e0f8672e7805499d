//! Two-sided bounds on the worst-case Fourier-sum error over the class
//! generated by the unit L₁ ball:
//!
//! `(1/2π) sup_h ‖P⁽ⁿ⁾ − P⁽ⁿ⁾(·+h)‖_s ≤ 𝓔ₙ ≤ (1/π) ‖P⁽ⁿ⁾‖_s`,
//!
//! together with the best-constant deviation `(1/π) inf_λ ‖P⁽ⁿ⁾ − λ‖_s`.
//! All values are scaled by `e^{αn^r}`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, NumericError, Result};
use crate::kernel::{phase_mod, KernelParams, ModulatedSeries, ScaledValue, TruncationIndex};
use crate::norms::{abs_pow, carrier_averaged_norm, periodic_ls_norm, periodic_ls_norm_single_pass, NormOrder, PeriodicFunction, QuadratureConfig};
use crate::quad::{golden_max, golden_min, CompensatedSum};

/// How the norms of a case are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Periodic quadrature of the full series.
    Direct,
    /// Averaging over the carrier, exact up to terms of order e^{-2αr n^r}.
    Carrier,
}

/// Largest uniform grid the direct route will start from.
pub const DIRECT_GRID_LIMIT: usize = 1 << 20;

/// Minimum αr·n^r for the carrier route.
pub const CARRIER_MIN_EXPONENT: f64 = 20.0;

/// Lower and upper bounds, best-constant deviation and their maximizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichBounds {
    pub lower: f64,
    pub upper: f64,
    pub best_constant: f64,
    pub log_scale: f64,
    pub h_star: f64,
    pub lambda_star: f64,
    pub route: Route,
}

/// The kernel tail together with the evaluation route chosen for it.
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    pub series: ModulatedSeries,
    pub route: Route,
    pub log_scale: f64,
}

impl PreparedKernel {
    pub fn new(params: &KernelParams, n: TruncationIndex) -> Result<Self> {
        let series = ModulatedSeries::kernel_tail(params, n)?;
        let direct_grid = (4 * series.bandwidth()).max(64).next_power_of_two();
        let exponent = params.alpha_r() * (n.get() as f64).powf(params.r);
        let route = if direct_grid <= DIRECT_GRID_LIMIT {
            Route::Direct
        } else if exponent >= CARRIER_MIN_EXPONENT {
            Route::Carrier
        } else {
            return Err(NumericError::NoRoute(format!(
                "kernel tail needs {} terms, direct grid {direct_grid} exceeds {DIRECT_GRID_LIMIT} and alpha*r*n^r = {exponent:.3} is below {CARRIER_MIN_EXPONENT}",
                series.len()
            )));
        };
        Ok(PreparedKernel {
            series,
            route,
            log_scale: params.log_scale(n),
        })
    }

    fn norm_of(&self, f: &ModulatedSeries, s: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
        match self.route {
            Route::Direct => periodic_ls_norm(f, s, cfg),
            Route::Carrier => carrier_averaged_norm(f, s, cfg),
        }
    }

    /// (1/π)‖P⁽ⁿ⁾‖_s, scaled.
    pub fn upper(&self, s: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(self.norm_of(&self.series, s, cfg)? / PI)
    }

    /// (1/2π)‖P⁽ⁿ⁾ − P⁽ⁿ⁾(·+h)‖_s, scaled.
    pub fn shifted_difference(&self, h: f64, s: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(self.norm_of(&self.series.shifted_difference(h), s, cfg)? / (2.0 * PI))
    }

    /// Sup over h of the shifted-difference bound; returns (value, h*).
    pub fn lower(&self, s: NormOrder, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        match self.route {
            Route::Direct => self.lower_direct(s, cfg),
            Route::Carrier => self.lower_carrier(s, cfg),
        }
    }

    /// Shifted-difference value used while searching over h: a single pass
    /// on the direct route, the full norm on the carrier route.
    fn search_difference(&self, h: f64, s: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
        match self.route {
            Route::Direct => Ok(periodic_ls_norm_single_pass(&self.series.shifted_difference(h), s, cfg)? / (2.0 * PI)),
            Route::Carrier => self.shifted_difference(h, s, cfg),
        }
    }

    fn refine_shift(&self, centre: f64, radius: f64, tol: f64, s: NormOrder, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        golden_max(|h| self.search_difference(h, s, cfg), centre - radius, centre + radius, tol)
    }

    fn lower_direct(&self, s: NormOrder, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        let n = self.series.carrier() as usize;
        let shifts = (8 * n).max(128).next_power_of_two();
        let screen_grid = shifts.max((2 * self.series.bandwidth()).min(1 << 16).next_power_of_two());
        let samples = self.series.sample_grid(screen_grid, 0.0);
        let stride = screen_grid / shifts;
        let screened: Vec<f64> = (0..shifts)
            .map(|j| screen_difference(&samples, j * stride, s))
            .collect();
        let best_j = (1..shifts)
            .max_by(|&x, &y| screened[x].total_cmp(&screened[y]).then(y.cmp(&x)))
            .unwrap_or(1);
        let step = 2.0 * PI / shifts as f64;
        let seed = PI / n as f64;
        let mut best = (seed, self.search_difference(seed, s, cfg)?);
        for centre in [best_j as f64 * step, seed] {
            let (h, v) = self.refine_shift(centre, step, 1e-6, s, cfg)?;
            if v > best.1 {
                best = (h, v);
            }
        }
        Ok((self.shifted_difference(best.0, s, cfg)?, best.0))
    }

    fn lower_carrier(&self, s: NormOrder, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        // with h = (ω + 2πk)/N the difference envelope is D(t) − e^{iω}D(t+h):
        // screen over phase ω and the slow shift h
        let n = self.series.carrier() as f64;
        let grid = (2 * self.series.len()).max(256).next_power_of_two();
        let env = self.series.envelope_grid(grid);
        let step = 2.0 * PI / grid as f64;
        let mut shifts: Vec<i64> = (-16..=16).collect();
        shifts.extend((0..32).map(|j| (j * grid / 32) as i64));
        let mut best = (0.0, 0i64, f64::NEG_INFINITY);
        for l in 0..8 {
            let omega = 2.0 * PI * l as f64 / 8.0;
            let rot = Complex64::cis(omega);
            for &j in &shifts {
                let shift = j.rem_euclid(grid as i64) as usize;
                let v = screen_envelope_difference(&env, shift, rot, s);
                if v > best.2 {
                    best = (omega, j, v);
                }
            }
        }
        let (omega, j, _) = best;
        let slow = j as f64 * step;
        let k = ((n * slow - omega) / (2.0 * PI)).round();
        let centre = (omega + 2.0 * PI * k) / n;
        let tol = (1e-3 / n).min(1e-6);
        let seed = PI / n;
        let mut result = (seed, self.shifted_difference(seed, s, cfg)?);
        let radius = 0.25 * PI / n;
        let centres: &[f64] = if (centre - seed).abs() <= tol { &[seed] } else { &[centre, seed] };
        for &c in centres {
            let (h, v) = self.refine_shift(c, radius, tol, s, cfg)?;
            if v > result.1 {
                result = (h, v);
            }
        }
        Ok((result.1, result.0))
    }

    /// (1/π) inf_λ ‖P⁽ⁿ⁾ − λ‖_s, scaled; returns (value, λ*).
    pub fn best_constant(&self, s: NormOrder, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        self.best_constant_given_upper(s, cfg, None)
    }

    fn best_constant_given_upper(&self, s: NormOrder, cfg: &QuadratureConfig, upper: Option<f64>) -> Result<(f64, f64)> {
        let upper = || upper.map_or_else(|| self.upper(s, cfg), Ok);
        match self.route {
            // the tail has zero mean, so the L2 projection onto constants is 0
            _ if s == NormOrder::Finite(2.0) => Ok((upper()?, 0.0)),
            Route::Direct => {
                let m = self.series.l1_coeffs();
                let cached = CachedSamples::new(&self.series);
                let (lambda, _) = golden_min(
                    |lambda| periodic_ls_norm_single_pass(&cached.offset(lambda), s, cfg),
                    -m,
                    m,
                    1e-10 * m,
                )?;
                Ok((periodic_ls_norm(&cached.offset(lambda), s, cfg)? / PI, lambda))
            }
            // the constant part of the optimum is exponentially small here
            Route::Carrier => Ok((upper()?, 0.0)),
        }
    }
}

/// Trapezoid screen of ∫|f − f(·+shift)|^s (or the max for s = ∞).
fn screen_difference(samples: &[f64], shift: usize, s: NormOrder) -> f64 {
    let n = samples.len();
    let diff = (0..n).map(|i| (samples[i] - samples[(i + shift) % n]).abs());
    match s {
        NormOrder::Infinity => diff.fold(0.0, f64::max),
        NormOrder::Finite(sv) => diff.map(|d| abs_pow(d, sv)).collect::<CompensatedSum>().value(),
    }
}

fn screen_envelope_difference(env: &[Complex64], shift: usize, rot: Complex64, s: NormOrder) -> f64 {
    // every fourth node: enough to rank candidate shifts
    const STRIDE: usize = 4;
    let n = env.len();
    let diff = (0..n).step_by(STRIDE).map(|i| env[i] - rot * env[(i + shift) % n]);
    match s {
        NormOrder::Infinity => diff.map(|d| d.norm()).fold(0.0, f64::max),
        NormOrder::Finite(sv) if sv == 1.0 => diff.map(|d| d.norm()).sum(),
        NormOrder::Finite(sv) if sv == 2.0 => diff.map(|d| d.norm_sqr()).sum(),
        NormOrder::Finite(sv) => diff.map(|d| d.norm_sqr().powf(0.5 * sv)).sum(),
    }
}

/// Grid samples of a series, memoized so that the λ-search does not
/// recompute the same transforms.
struct CachedSamples<'a> {
    series: &'a ModulatedSeries,
    cache: Mutex<HashMap<(usize, u64), Arc<Vec<f64>>>>,
}

impl<'a> CachedSamples<'a> {
    fn new(series: &'a ModulatedSeries) -> Self {
        CachedSamples {
            series,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, grid: usize, offset: f64) -> Arc<Vec<f64>> {
        let key = (grid, offset.to_bits());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Arc::clone(v);
        }
        let v = Arc::new(self.series.sample_grid(grid, offset));
        self.cache.lock().unwrap().insert(key, Arc::clone(&v));
        v
    }

    fn offset(&self, lambda: f64) -> Offset<'_, 'a> {
        Offset { base: self, lambda }
    }
}

/// `t ↦ f(t) − λ`.
struct Offset<'b, 'a> {
    base: &'b CachedSamples<'a>,
    lambda: f64,
}

impl PeriodicFunction for Offset<'_, '_> {
    fn eval(&self, t: f64) -> f64 {
        self.base.series.eval(t) - self.lambda
    }

    fn sample(&self, grid: usize, offset: f64) -> Vec<f64> {
        self.base.get(grid, offset).iter().map(|v| v - self.lambda).collect()
    }

    fn bandwidth(&self) -> usize {
        self.base.series.bandwidth()
    }
}

/// (1/π)‖P⁽ⁿ⁾‖_s in scaled units.
pub fn upper_bound(params: &KernelParams, n: TruncationIndex, s: NormOrder, cfg: &QuadratureConfig) -> Result<ScaledValue> {
    let k = PreparedKernel::new(params, n)?;
    Ok(ScaledValue::new(k.upper(s, cfg)?, k.log_scale))
}

/// (1/2π) sup_h ‖P⁽ⁿ⁾ − P⁽ⁿ⁾(·+h)‖_s in scaled units, with the maximizing h.
pub fn lower_bound(params: &KernelParams, n: TruncationIndex, s: NormOrder, cfg: &QuadratureConfig) -> Result<(ScaledValue, f64)> {
    let k = PreparedKernel::new(params, n)?;
    let (v, h) = k.lower(s, cfg)?;
    Ok((ScaledValue::new(v, k.log_scale), h))
}

/// (1/π) inf_λ ‖P⁽ⁿ⁾ − λ‖_s in scaled units, with the minimizing λ (scaled).
pub fn best_constant_deviation(
    params: &KernelParams,
    n: TruncationIndex,
    s: NormOrder,
    cfg: &QuadratureConfig,
) -> Result<(ScaledValue, f64)> {
    let k = PreparedKernel::new(params, n)?;
    let (v, lambda) = k.best_constant(s, cfg)?;
    Ok((ScaledValue::new(v, k.log_scale), lambda))
}

/// All three quantities for one case, sharing the kernel tail.
pub fn sandwich(params: &KernelParams, n: TruncationIndex, s: NormOrder, cfg: &QuadratureConfig) -> Result<SandwichBounds> {
    let k = PreparedKernel::new(params, n)?;
    let upper = k.upper(s, cfg)?;
    let (lower, h_star) = k.lower(s, cfg)?;
    let (best_constant, lambda_star) = k.best_constant_given_upper(s, cfg, Some(upper))?;
    Ok(SandwichBounds {
        lower,
        upper,
        best_constant,
        log_scale: k.log_scale,
        h_star,
        lambda_star,
        route: k.route,
    })
}

/// Fourier multipliers ρ̂(k), k = 0..count, of a C^∞ bump of unit mass
/// supported on [−ε, ε]; trapezoid rule on a grid resolving the bump.
fn bump_multipliers(eps: f64, count: usize) -> Vec<f64> {
    let per_support = 256.0;
    let grid = ((per_support * PI / eps) as usize).max(4 * count).max(64).next_power_of_two();
    let h = 2.0 * PI / grid as f64;
    let bump = |t: f64| {
        let u = t / eps;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    };
    let mut buf: Vec<Complex64> = (0..grid)
        .map(|j| {
            let t = if j <= grid / 2 { h * j as f64 } else { h * j as f64 - 2.0 * PI };
            Complex64::new(bump(t), 0.0)
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(grid).process(&mut buf);
    let mass = buf[0].re;
    buf.iter().take(count).map(|z| z.re / mass).collect()
}

/// (1/π)‖P⁽ⁿ⁾ ∗ φ‖_s for φ = ½(ρ_ε(· − a) − ρ_ε(· − b)), a member of the
/// zero-mean unit L₁ ball; tends to the lower bound as ε → 0 with b − a = h*.
pub fn empirical_class_lower_bound(
    params: &KernelParams,
    n: TruncationIndex,
    s: NormOrder,
    eps: f64,
    a: f64,
    b: f64,
) -> Result<ScaledValue> {
    if !(eps > 0.0 && eps < PI) {
        return domain(format!("mollifier width must lie in (0, pi), got {eps}"));
    }
    let k = PreparedKernel::new(params, n)?;
    let series = &k.series;
    let rho = bump_multipliers(eps, series.bandwidth() + 1);
    let conv = series.with_multiplier(|freq| {
        let diff = Complex64::cis(phase_mod(freq, -a)) - Complex64::cis(phase_mod(freq, -b));
        0.5 * rho[freq as usize] * diff
    });
    let norm = k.norm_of(&conv, s, &QuadratureConfig::default())?;
    Ok(ScaledValue::new(norm / PI, k.log_scale))
}

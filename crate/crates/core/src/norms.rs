//! L_s norms of smooth 2π-periodic functions and the 𝒥_s(υ) integral.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, NumericError, Result};
use crate::kernel::{phase_mod, ModulatedSeries};
use crate::quad::{adaptive_gk, golden_max, CompensatedSum, GL8_UNIT};
use crate::specfun::{cos_norm, gauss_2f1, HypergeometricArgs};

/// The exponent s ∈ [1, ∞] of an L_s norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

impl NormOrder {
    pub fn finite(s: f64) -> Result<Self> {
        if !(s >= 1.0) || !s.is_finite() {
            return domain(format!("norm order must satisfy 1 <= s < inf, got {s}"));
        }
        Ok(NormOrder::Finite(s))
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            NormOrder::Finite(s) => NormOrder::finite(s),
            NormOrder::Infinity => Ok(self),
        }
    }

    /// s′ with 1/s + 1/s′ = 1.
    pub fn conjugate(self) -> NormOrder {
        match self {
            NormOrder::Infinity => NormOrder::Finite(1.0),
            NormOrder::Finite(s) if s == 1.0 => NormOrder::Infinity,
            NormOrder::Finite(s) => NormOrder::Finite(s / (s - 1.0)),
        }
    }

    /// 1/s, zero at s = ∞.
    pub fn reciprocal(self) -> f64 {
        match self {
            NormOrder::Finite(s) => 1.0 / s,
            NormOrder::Infinity => 0.0,
        }
    }

    /// s as a float, `f64::INFINITY` for ∞.
    pub fn value(self) -> f64 {
        match self {
            NormOrder::Finite(s) => s,
            NormOrder::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, NormOrder::Infinity)
    }

    fn is_even_integer(self) -> bool {
        matches!(self, NormOrder::Finite(s) if s.fract() == 0.0 && (s as u64) % 2 == 0)
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::Finite(s) => write!(f, "{s}"),
            NormOrder::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for NormOrder {
    type Err = crate::error::NumericError;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(NormOrder::Infinity);
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_infinite() && v > 0.0 => Ok(NormOrder::Infinity),
            Ok(v) => NormOrder::finite(v),
            Err(_) => domain(format!("cannot parse norm order from {text:?}")),
        }
    }
}

impl Serialize for NormOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormOrder::Finite(s) => serializer.serialize_f64(*s),
            NormOrder::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for NormOrder {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(v) if v.is_infinite() && v > 0.0 => Ok(NormOrder::Infinity),
            Raw::Num(v) => NormOrder::finite(v),
            Raw::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Accuracy controls shared by all norm evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_refinements: u32,
    pub sup_grid: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            max_refinements: 24,
            sup_grid: 4096,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return domain(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if self.max_refinements < 1 {
            return domain("max_refinements must be >= 1");
        }
        if self.sup_grid < 64 || !self.sup_grid.is_power_of_two() {
            return domain(format!("sup_grid must be a power of two >= 64, got {}", self.sup_grid));
        }
        Ok(())
    }
}

/// A real 2π-periodic function that can be evaluated pointwise and sampled on
/// shifted uniform grids.
pub trait PeriodicFunction: Sync {
    fn eval(&self, t: f64) -> f64;

    /// Values at `offset + 2πj/grid`, j = 0..grid.
    fn sample(&self, grid: usize, offset: f64) -> Vec<f64> {
        let h = 2.0 * PI / grid as f64;
        (0..grid).map(|j| self.eval(offset + h * j as f64)).collect()
    }

    /// Highest frequency present, or 0 if unknown.
    fn bandwidth(&self) -> usize {
        0
    }
}

impl<F: Fn(f64) -> f64 + Sync> PeriodicFunction for F {
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Largest grid any periodic norm evaluation may use.
pub const MAX_GRID: usize = 1 << 24;

/// ‖f‖_s over one period.
pub fn periodic_ls_norm<F: PeriodicFunction + ?Sized>(f: &F, s: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
    let s = s.validate()?;
    cfg.validate()?;
    match s {
        NormOrder::Infinity => Ok(periodic_sup(f, cfg)),
        NormOrder::Finite(sv) => {
            let mut grid = (4 * f.bandwidth()).max(64).next_power_of_two();
            let mut prev: Option<f64> = None;
            for _ in 0..=cfg.max_refinements {
                if grid > MAX_GRID {
                    break;
                }
                let value = integrate_abs_pow(f, sv, s.is_even_integer(), grid).powf(1.0 / sv);
                if let Some(p) = prev {
                    if (value - p).abs() <= cfg.rel_tol * value.abs() {
                        return Ok(value);
                    }
                }
                prev = Some(value);
                grid *= 2;
            }
            Err(NumericError::QuadratureNonConvergence {
                rel_tol: cfg.rel_tol,
                refinements: cfg.max_refinements as usize,
                last: prev.unwrap_or(f64::NAN),
            })
        }
    }
}

/// |v|^s with the common exponents spelled out.
pub(crate) fn abs_pow(v: f64, s: f64) -> f64 {
    let a = v.abs();
    match s {
        1.0 => a,
        1.5 => a * a.sqrt(),
        2.0 => a * a,
        3.0 => a * a * a,
        4.0 => (a * a) * (a * a),
        _ => a.powf(s),
    }
}

/// One pass of the base rule on the starting grid of `periodic_ls_norm`,
/// without the doubling check. Meant for locating optima that are then
/// re-evaluated with the full rule.
pub fn periodic_ls_norm_single_pass<F: PeriodicFunction + ?Sized>(f: &F, s: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
    let s = s.validate()?;
    cfg.validate()?;
    Ok(match s {
        NormOrder::Infinity => periodic_sup(f, cfg),
        NormOrder::Finite(sv) => {
            let grid = (4 * f.bandwidth()).max(64).next_power_of_two();
            integrate_abs_pow(f, sv, s.is_even_integer(), grid).powf(1.0 / sv)
        }
    })
}

/// ∫₀^{2π} |f|^s on a grid of `grid` cells.
fn integrate_abs_pow<F: PeriodicFunction + ?Sized>(f: &F, s: f64, smooth: bool, grid: usize) -> f64 {
    let h = 2.0 * PI / grid as f64;
    let nodes = f.sample(grid, 0.0);
    let has_kink = !smooth && (0..grid).any(|j| nodes[j] == 0.0 || nodes[j] * nodes[(j + 1) % grid] < 0.0);
    if !has_kink {
        let sum: CompensatedSum = nodes.iter().map(|&v| abs_pow(v, s)).collect();
        return h * sum.value();
    }

    // composite Gauss–Legendre, one shifted sampling per node
    let inner: Vec<Vec<f64>> = GL8_UNIT.iter().map(|&(x, _)| f.sample(grid, x * h)).collect();
    let bw = f.bandwidth();
    let interp = BandInterp { nodes: &nodes, h };
    let local = |t: f64| if bw > 0 && 4 * bw <= grid { interp.eval(t) } else { f.eval(t) };
    let mut acc = CompensatedSum::default();
    for j in 0..grid {
        let left = nodes[j];
        let right = nodes[(j + 1) % grid];
        let a = h * j as f64;
        let b = a + h;
        let cell = if left == 0.0 {
            split_cell(&local, s, a, b, a)
        } else if left * right < 0.0 {
            match refine_zero(&local, a, b) {
                Some(z) => split_cell(&local, s, a, b, z),
                None => gl_cell(&inner, j, s, h),
            }
        } else {
            gl_cell(&inner, j, s, h)
        };
        acc.add(cell);
    }
    acc.value()
}

/// Windowed-sinc reconstruction from samples at spacing `h`, valid when the
/// sampling rate is at least four times the highest frequency.
struct BandInterp<'a> {
    nodes: &'a [f64],
    h: f64,
}

impl BandInterp<'_> {
    const HALF_WIDTH: i64 = 24;

    fn eval(&self, t: f64) -> f64 {
        let g = self.nodes.len() as i64;
        let w = Self::HALF_WIDTH as f64;
        // exponential-of-semicircle window; its spectrum fits in a quarter band
        let beta = 0.5 * PI * w;
        let u = t / self.h;
        let base = u.floor();
        let frac = u - base;
        let sin_frac = (PI * frac).sin();
        let mut acc = 0.0;
        for m in (1 - Self::HALF_WIDTH)..=Self::HALF_WIDTH {
            let x = frac - m as f64;
            let y = x / w;
            if y.abs() >= 1.0 {
                continue;
            }
            let window = (beta * ((1.0 - y * y).sqrt() - 1.0)).exp();
            let sinc = if x.abs() < 1e-14 {
                1.0
            } else {
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                sign * sin_frac / (PI * x)
            };
            let j = (base as i64 + m).rem_euclid(g) as usize;
            acc += self.nodes[j] * sinc * window;
        }
        acc
    }
}

fn gl_cell(inner: &[Vec<f64>], j: usize, s: f64, h: f64) -> f64 {
    h * GL8_UNIT
        .iter()
        .zip(inner)
        .map(|(&(_, w), col)| w * abs_pow(col[j], s))
        .sum::<f64>()
}

/// ∫_a^b |f|^s when f vanishes at z ∈ [a, b]; each side uses t = z ± d·w².
fn split_cell<F: PeriodicFunction + ?Sized>(f: &F, s: f64, a: f64, b: f64, z: f64) -> f64 {
    let side = |len: f64, dir: f64| -> f64 {
        if len <= 0.0 {
            return 0.0;
        }
        GL8_UNIT
            .iter()
            .map(|&(w, wt)| wt * 2.0 * len * w * abs_pow(f.eval(z + dir * len * w * w), s))
            .sum()
    };
    side(z - a, -1.0) + side(b - z, 1.0)
}

/// Zero of f in [a, b] by the Illinois method, finishing with bisection.
fn refine_zero<F: PeriodicFunction + ?Sized>(f: &F, mut a: f64, mut b: f64) -> Option<f64> {
    const TOL: f64 = 1e-13;
    let mut fa = f.eval(a);
    let mut fb = f.eval(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa * fb > 0.0 {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..60 {
        if (b - a).abs() <= TOL {
            return Some(0.5 * (a + b));
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f.eval(c);
        if fc == 0.0 {
            return Some(c);
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else {
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        b = c;
        fb = fc;
    }
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let mut flo = f.eval(lo);
    while hi - lo > TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f.eval(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm * flo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Some(0.5 * (lo + hi))
}

fn periodic_sup<F: PeriodicFunction + ?Sized>(f: &F, cfg: &QuadratureConfig) -> f64 {
    let grid = cfg.sup_grid.max((16 * f.bandwidth()).next_power_of_two());
    let samples: Vec<f64> = f.sample(grid, 0.0).into_iter().map(f64::abs).collect();
    refine_top_maxima(&samples, |t| f.eval(t).abs())
}

/// Grid max of periodic samples on [0, 2π), improved by golden-section search
/// in the neighbourhood of the three largest local maxima.
fn refine_top_maxima<G: Fn(f64) -> f64>(samples: &[f64], g: G) -> f64 {
    let grid_max = samples.iter().copied().fold(0.0, f64::max);
    top_maxima(samples, g).into_iter().fold(grid_max, |m, (_, v)| m.max(v))
}

/// The three largest local maxima of periodic samples, each refined by
/// golden-section search; returns (location, value) pairs.
fn top_maxima<G: Fn(f64) -> f64>(samples: &[f64], g: G) -> Vec<(f64, f64)> {
    let n = samples.len();
    let h = 2.0 * PI / n as f64;
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| {
            let prev = samples[(j + n - 1) % n];
            let next = samples[(j + 1) % n];
            samples[j] >= prev && samples[j] >= next
        })
        .collect();
    peaks.sort_by(|&x, &y| samples[y].total_cmp(&samples[x]).then(x.cmp(&y)));
    peaks
        .iter()
        .take(3)
        .map(|&j| {
            let t = h * j as f64;
            golden_max(|x| Ok(g(x)), t - h, t + h, 1e-10 * h.max(1e-3)).unwrap_or((t, samples[j]))
        })
        .collect()
}

/// Norm of a carrier-modulated series through the averaging identity
///
/// `‖Re(e^{i(Nt−φ)}D(t))‖_s^s ≈ (‖cos‖_s^s / 2π) · ∫₀^{2π} |D(t)|^s dt`,
///
/// whose error is governed by the Fourier coefficients of |D|^s e^{2ij arg D}
/// at frequencies 2jN and is exponentially small when the envelope is much
/// smoother than the carrier. For s = ∞ this is sup |D|.
pub fn carrier_averaged_norm(series: &ModulatedSeries, s: NormOrder, cfg: &QuadratureConfig) -> Result<f64> {
    let s = s.validate()?;
    cfg.validate()?;
    let mut grid = (2 * series.len()).max(64).next_power_of_two();
    match s {
        NormOrder::Infinity => {
            // |f| peaks on carrier lobes where Nt − φ + arg D(t) ≡ 0 (mod π);
            // search the lobes around each envelope maximum
            let grid = grid.max(cfg.sup_grid) * 4;
            let env: Vec<f64> = series.envelope_grid(grid).iter().map(|z| z.norm()).collect();
            let n = series.carrier() as f64;
            let half = 0.5 * PI / n;
            let mut best = 0.0f64;
            for (t0, _) in top_maxima(&env, |t| series.envelope_eval(t).norm()) {
                let psi = phase_mod(series.carrier(), t0) - series.phase() + series.envelope_eval(t0).arg();
                let centre = t0 - psi.rem_euclid(PI) / n;
                for k in -2..=3 {
                    let tk = centre + k as f64 * PI / n;
                    let (_, v) = golden_max(|x| Ok(series.eval(x).abs()), tk - half, tk + half, 1e-10 * half)?;
                    best = best.max(v);
                }
            }
            Ok(best)
        }
        NormOrder::Finite(sv) => {
            let scale = cos_norm(s).powf(sv) / (2.0 * PI);
            let mut last = f64::NAN;
            for _ in 0..=cfg.max_refinements {
                if grid > MAX_GRID {
                    break;
                }
                // the even nodes alone give the half-grid rule, so one
                // transform yields both estimates of the convergence check
                let env = series.envelope_grid(grid);
                let mut fine = CompensatedSum::default();
                let mut coarse = CompensatedSum::default();
                for (i, z) in env.iter().enumerate() {
                    let v = z.norm().powf(sv);
                    fine.add(v);
                    if i % 2 == 0 {
                        coarse.add(v);
                    }
                }
                let h = 2.0 * PI / grid as f64;
                let value = (scale * h * fine.value()).powf(1.0 / sv);
                let half = (scale * 2.0 * h * coarse.value()).powf(1.0 / sv);
                if (value - half).abs() <= cfg.rel_tol * value {
                    return Ok(value);
                }
                last = value;
                grid *= 2;
            }
            Err(NumericError::QuadratureNonConvergence {
                rel_tol: cfg.rel_tol,
                refinements: cfg.max_refinements as usize,
                last,
            })
        }
    }
}

const J_REL_TOL: f64 = 1e-14;

/// ∫₀^v (t² + 1)^{−s/2} dt; the part beyond 1 is taken in the variable ln t.
fn j_integral(v: f64, s: f64) -> Result<f64> {
    let head = adaptive_gk(|t| (t * t + 1.0).powf(-0.5 * s), 0.0, v.min(1.0), J_REL_TOL)?;
    if v <= 1.0 {
        return Ok(head);
    }
    let tail = adaptive_gk(
        |w| (w * (1.0 - s)).exp() * (1.0 + (-2.0 * w).exp()).powf(-0.5 * s),
        0.0,
        v.ln(),
        J_REL_TOL,
    )?;
    Ok(head + tail)
}

/// 𝒥_s(v) = ‖(t² + 1)^{−1/2}‖_{L_s[0, v]}.
pub fn j_s(v: f64, s: NormOrder) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return domain(format!("j_s needs finite v > 0, got {v}"));
    }
    match s.validate()? {
        NormOrder::Infinity => Ok(1.0),
        NormOrder::Finite(sv) => Ok(j_integral(v, sv)?.powf(1.0 / sv)),
    }
}

/// lim_{v→∞} 𝒥_s(v) = F(1/2, (3−s)/2; 3/2; 1)^{1/s}, s > 1.
pub fn j_s_limit(s: NormOrder) -> Result<f64> {
    match s.validate()? {
        NormOrder::Finite(sv) if sv > 1.0 => {
            let f = gauss_2f1(HypergeometricArgs::new(0.5, 0.5 * (3.0 - sv), 1.5, 1.0))?;
            Ok(f.powf(1.0 / sv))
        }
        _ => domain("j_s_limit needs finite s > 1"),
    }
}

/// ∫_v^∞ (t² + 1)^{−s/2} dt for s > 1, v ≥ 1, in the variable ln t.
fn j_tail(v: f64, s: f64) -> Result<f64> {
    // e^{w(1−s)} decays; past w = 800/(s−1) nothing representable is left
    let upper = v.ln() + (800.0 / (s - 1.0)).min(2000.0);
    let mut total = 0.0;
    let mut lo = v.ln();
    while lo < upper {
        let hi = (lo + 8.0 / (s - 1.0).max(0.05)).min(upper);
        total += adaptive_gk(
            |w| (w * (1.0 - s)).exp() * (1.0 + (-2.0 * w).exp()).powf(-0.5 * s),
            lo,
            hi,
            J_REL_TOL,
        )?;
        lo = hi;
    }
    Ok(total)
}

/// Θ⁽¹⁾ in 𝒥_s(v) = 𝒥_s(∞) + Θ⁽¹⁾/(s−1) · v^{1−s}, v = πn^{1−r}/(αr).
///
/// The difference 𝒥_s(v) − 𝒥_s(∞) is taken as 𝒥_s(∞)·expm1(ln1p(−T/𝒥_s(∞)^s)/s)
/// with T the integral beyond v, so no cancellation occurs at large v.
pub fn tail_integral_residual(alpha: f64, r: f64, s: f64, n: crate::kernel::TruncationIndex) -> Result<f64> {
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("tail_integral_residual needs 0 < r < 1, got {r}"));
    }
    if !(s > 1.0 && s.is_finite()) {
        return domain(format!("tail_integral_residual needs finite s > 1, got {s}"));
    }
    let v = PI * (n.get() as f64).powf(1.0 - r) / (alpha * r);
    let limit_pow = j_s_limit(NormOrder::Finite(s))?.powf(s);
    let tail = if v >= 1.0 {
        j_tail(v, s)?
    } else {
        limit_pow - j_integral(v, s)?
    };
    let limit = limit_pow.powf(1.0 / s);
    let diff = limit * ((-tail / limit_pow).ln_1p() / s).exp_m1();
    Ok(diff * (s - 1.0) * v.powf(s - 1.0))
}

//! Closed-form asymptotic estimates of the worst-case Fourier-sum error,
//! their remainder envelopes and the admissibility thresholds n₀, n₁.
//!
//! Every estimate is written as `main_term + γ · envelope_unit` with both
//! terms scaled by `e^{-log_scale}`, so an implied coefficient is simply
//! `(numeric − main_term) / envelope_unit` in scaled units.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, NumericError, Result};
use crate::kernel::{tail_sum, KernelParams, ScaledValue, TruncationIndex};
use crate::norms::{j_s, j_s_limit, NormOrder};
use crate::specfun::{cos_norm, elliptic_k, gauss_2f1, k_sq_constant, HypergeometricArgs};

/// Identifies which asymptotic statement an estimate evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    /// Main term with 𝒥_s at finite argument, 0 < r < 1, 1 ≤ s ≤ ∞.
    Theorem1,
    /// Main term with the limiting hypergeometric constant, 1 < s < ∞.
    Theorem2,
    /// The s = 2 specialization of `Theorem2`.
    Corollary1,
    /// Sharper s = 2 envelope derived from the exact s = 2 identity.
    RefinedS2,
    /// Logarithmic main term at s = 1.
    Theorem3,
    /// Uniform approximation on classes generated by L_p balls, 1 < p < ∞.
    Theorem4,
    /// `(4/π²) ln n^{1−r}` at s = 1, 0 < r < 1.
    ClassicalS1,
    /// `n^{1−r}/(παr)` at s = ∞, 0 < r < 1.
    ClassicalSup,
    /// r = 1, s = 1 elliptic-integral constant with O(1/n) remainder.
    Nikolsky,
    /// r = 1, s = 1 elliptic-integral constant with refined remainder.
    Stechkin,
    /// r = 1, any s, through K(s, q).
    Serdyuk2005,
    /// r = 1, any s, hypergeometric form including the exact s = 2 case.
    UnifiedStar4,
    /// r > 1, s = 1, with an explicit bound on the coefficient.
    Stepanets,
    /// r > 1, s = 1, sharper remainder.
    Telyakovsky,
    /// r > 1, any s.
    SerdyukLs,
}

impl FormulaId {
    pub const ALL: [FormulaId; 15] = [
        FormulaId::Theorem1,
        FormulaId::Theorem2,
        FormulaId::Corollary1,
        FormulaId::RefinedS2,
        FormulaId::Theorem3,
        FormulaId::Theorem4,
        FormulaId::ClassicalS1,
        FormulaId::ClassicalSup,
        FormulaId::Nikolsky,
        FormulaId::Stechkin,
        FormulaId::Serdyuk2005,
        FormulaId::UnifiedStar4,
        FormulaId::Stepanets,
        FormulaId::Telyakovsky,
        FormulaId::SerdyukLs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::Theorem1 => "theorem1",
            FormulaId::Theorem2 => "theorem2",
            FormulaId::Corollary1 => "corollary1",
            FormulaId::RefinedS2 => "refined_s2",
            FormulaId::Theorem3 => "theorem3",
            FormulaId::Theorem4 => "theorem4",
            FormulaId::ClassicalS1 => "classical_s1",
            FormulaId::ClassicalSup => "classical_sup",
            FormulaId::Nikolsky => "nikolsky",
            FormulaId::Stechkin => "stechkin",
            FormulaId::Serdyuk2005 => "serdyuk2005",
            FormulaId::UnifiedStar4 => "unified_star4",
            FormulaId::Stepanets => "stepanets",
            FormulaId::Telyakovsky => "telyakovsky",
            FormulaId::SerdyukLs => "serdyuk_ls",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| NumericError::Domain(format!("unknown formula id {s:?}")))
    }
}

/// `main_term + γ · envelope_unit`, both scaled by `e^{-log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub formula_id: FormulaId,
    pub main_term: f64,
    pub envelope_unit: f64,
    pub log_scale: f64,
    /// Explicit bound on |γ|; `None` when only an unspecified O(1) is known.
    pub gamma_bound: Option<f64>,
    /// Smallest order from which the statement is asserted; `None` if it lies
    /// beyond the searchable range.
    pub threshold_used: Option<u64>,
    pub applicable: bool,
    /// Main term with the hypergeometric argument e^{-α} instead of e^{-2α}
    /// (`unified_star4` only).
    pub alternate_main_term: Option<f64>,
}

impl AsymptoticEstimate {
    fn new(formula_id: FormulaId, main_term: f64, envelope_unit: f64, log_scale: f64) -> Self {
        AsymptoticEstimate {
            formula_id,
            main_term,
            envelope_unit,
            log_scale,
            gamma_bound: None,
            threshold_used: Some(1),
            applicable: true,
            alternate_main_term: None,
        }
    }

    fn bounded(mut self, gamma_bound: f64) -> Self {
        self.gamma_bound = Some(gamma_bound);
        self
    }

    fn gated(mut self, n: TruncationIndex, threshold: Result<u64>) -> Result<Self> {
        match threshold {
            Ok(t) => {
                self.threshold_used = Some(t);
                self.applicable = n.get() >= t;
            }
            Err(NumericError::ThresholdOverflow(_)) => {
                self.threshold_used = None;
                self.applicable = false;
            }
            Err(e) => return Err(e),
        }
        Ok(self)
    }

    /// (value − main_term)/envelope_unit for a scaled value on the same scale.
    pub fn implied_gamma(&self, scaled_value: f64) -> f64 {
        (scaled_value - self.main_term) / self.envelope_unit
    }
}

/// σ(s) and ξ(s) of the r = 1 remainder terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaXi {
    pub sigma: u8,
    pub xi: u8,
}

pub fn sigma_xi(s: NormOrder) -> SigmaXi {
    let sigma = if s == NormOrder::Finite(1.0) { 1 } else { 2 };
    let xi = if s == NormOrder::Finite(2.0) { 0 } else { 1 };
    SigmaXi { sigma, xi }
}

/// |γ| bound of Theorems 1, 2 and 4.
pub const GAMMA_THEOREM1: f64 = 14.0 * PI * 14.0 * PI;

pub fn gamma_corollary1() -> f64 {
    392.0 * PI.powf(2.5)
}

pub fn gamma_refined_s2() -> f64 {
    let c = 54.0 * PI.powi(3);
    (c / (c - 1.0)).sqrt()
}

pub fn gamma_theorem3() -> f64 {
    20.0 * PI.powi(4)
}

fn check_fractional_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("this statement needs 0 < r < 1, got r = {r}"));
    }
    Ok(())
}

/// Largest order the threshold searches will consider.
pub const THRESHOLD_LIMIT: u64 = 1 << 52;

const THRESHOLD_SLACK: f64 = 1e-12;

/// The defining inequality of n₀(α, r, p) at order n.
pub fn n0_condition(alpha: f64, r: f64, p: NormOrder, n: u64) -> bool {
    let ar = alpha * r;
    let nf = n as f64;
    let (chi, rhs) = match p {
        NormOrder::Finite(pv) if pv == 1.0 => (1.0, 1.0 / 14.0),
        NormOrder::Finite(pv) => (pv, (pv - 1.0) / pv / (3.0 * PI).powi(3)),
        NormOrder::Infinity => (1.0, 1.0 / (3.0 * PI).powi(3)),
    };
    let lhs = 1.0 / (ar * nf.powf(r)) + ar * chi / nf.powf(1.0 - r);
    lhs <= rhs * (1.0 + THRESHOLD_SLACK)
}

/// The defining inequality of n₁(α, r) at order n.
pub fn n1_condition(alpha: f64, r: f64, n: u64) -> bool {
    let ar = alpha * r;
    let nf = n as f64;
    let v = PI * nf.powf(1.0 - r) / ar;
    let lhs = (1.0 + v.ln()) / (ar * nf.powf(r)) + ar / nf.powf(1.0 - r);
    lhs <= (1.0 / (3.0 * PI).powi(3)) * (1.0 + THRESHOLD_SLACK)
}

/// Smallest n ≥ lo with `cond(n)`, for a predicate that stays true once true.
fn first_true<C: Fn(u64) -> bool>(cond: C, lo: u64) -> Result<u64> {
    if cond(lo) {
        return Ok(lo);
    }
    let mut bad = lo;
    let mut good = lo.max(1) * 2;
    while !cond(good) {
        bad = good;
        if good >= THRESHOLD_LIMIT {
            return Err(NumericError::ThresholdOverflow(THRESHOLD_LIMIT));
        }
        good = (good * 2).min(THRESHOLD_LIMIT);
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if cond(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// n₀(α, r, p): the left side decreases strictly in n, so a doubling bracket
/// followed by bisection finds the smallest admissible order.
pub fn threshold_n0(alpha: f64, r: f64, p: NormOrder) -> Result<u64> {
    check_fractional_r(r)?;
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let p = p.validate()?;
    first_true(|n| n0_condition(alpha, r, p, n), 1)
}

/// n₁(α, r). The left side decreases for n past
/// n* = (e^{(1−2r)/r} αr/π)^{1/(1−r)}; below n* it is scanned directly.
pub fn threshold_n1(alpha: f64, r: f64) -> Result<u64> {
    check_fractional_r(r)?;
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let c = PI / (alpha * r);
    let turn = (((1.0 - 2.0 * r) / r).exp() / c).powf(1.0 / (1.0 - r)).ceil();
    const SCAN_LIMIT: u64 = 10_000_000;
    if turn > SCAN_LIMIT as f64 {
        return Err(NumericError::ThresholdOverflow(SCAN_LIMIT));
    }
    let turn = (turn as u64).max(1);
    if let Some(n) = (1..turn).find(|&n| n1_condition(alpha, r, n)) {
        return Ok(n);
    }
    first_true(|n| n1_condition(alpha, r, n), turn)
}

struct Common {
    ar: f64,
    nf: f64,
    v: f64,
    log_scale: f64,
}

fn common(params: &KernelParams, n: TruncationIndex) -> Common {
    let nf = n.get() as f64;
    let ar = params.alpha_r();
    Common {
        ar,
        nf,
        v: PI * nf.powf(1.0 - params.r) / ar,
        log_scale: params.log_scale(n),
    }
}

/// Theorem 1: 𝒥_s at v = πn^{1−r}/(αr), 0 < r < 1, 1 ≤ s ≤ ∞.
pub fn theorem1_estimate(params: &KernelParams, n: TruncationIndex, s: NormOrder) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    let s = s.validate()?;
    let c = common(params, n);
    let r = params.r;
    let inv_sp = 1.0 - s.reciprocal();
    let pow = c.nf.powf((1.0 - r) * inv_sp);
    let j = j_s(c.v, s)?;
    let main = pow * cos_norm(s) * PI.powf(-(1.0 + s.reciprocal())) * c.ar.powf(-inv_sp) * j;
    let env = pow * (c.ar.powf(-(1.0 + inv_sp)) * j * c.nf.powf(-r) + c.nf.powf(-(1.0 - r) * inv_sp));
    AsymptoticEstimate::new(FormulaId::Theorem1, main, env, c.log_scale)
        .bounded(GAMMA_THEOREM1)
        .gated(n, threshold_n0(params.alpha, r, s.conjugate()))
}

fn finite_above_one(s: NormOrder, what: &str) -> Result<f64> {
    match s.validate()? {
        NormOrder::Finite(v) if v > 1.0 => Ok(v),
        _ => domain(format!("{what} needs 1 < s < inf, got {s}")),
    }
}

/// Theorem 2: 𝒥_s replaced by its limit F(1/2, (3−s)/2; 3/2; 1)^{1/s}.
pub fn theorem2_estimate(params: &KernelParams, n: TruncationIndex, s: NormOrder) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    let sv = finite_above_one(s, "theorem2")?;
    let c = common(params, n);
    let r = params.r;
    let inv_sp = 1.0 - 1.0 / sv;
    let sp = sv / (sv - 1.0);
    let pow = c.nf.powf((1.0 - r) * inv_sp);
    let main = pow * cos_norm(s) * PI.powf(-(1.0 + 1.0 / sv)) * c.ar.powf(-inv_sp) * j_s_limit(s)?;
    let env = pow
        * ((1.0 + c.ar.powf((sv - 1.0) * inv_sp) / (sv - 1.0)) * c.nf.powf(-(1.0 - r) * inv_sp)
            + sp.powf(1.0 / sv) * c.ar.powf(-(1.0 + inv_sp)) * c.nf.powf(-r));
    AsymptoticEstimate::new(FormulaId::Theorem2, main, env, c.log_scale)
        .bounded(GAMMA_THEOREM1)
        .gated(n, threshold_n0(params.alpha, r, s.conjugate()))
}

fn s2_main(c: &Common, r: f64) -> f64 {
    c.nf.powf(0.5 * (1.0 - r)) / (2.0 * PI * c.ar).sqrt()
}

/// Corollary 1: the s = 2 case of Theorem 2.
pub fn corollary1_estimate(params: &KernelParams, n: TruncationIndex) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    let c = common(params, n);
    let r = params.r;
    let main = s2_main(&c, r);
    let env = main * ((c.ar + c.ar.sqrt()) * c.nf.powf(-0.5 * (1.0 - r)) + 2f64.sqrt() / c.ar * c.nf.powf(-r));
    AsymptoticEstimate::new(FormulaId::Corollary1, main, env, c.log_scale)
        .bounded(gamma_corollary1())
        .gated(n, threshold_n0(params.alpha, r, NormOrder::Finite(2.0)))
}

/// (1/√π)(Σ_{k≥n} e^{-2αk^r})^{1/2}, the exact s = 2 error, any r > 0.
pub fn exact_s2(params: &KernelParams, n: TruncationIndex) -> Result<ScaledValue> {
    let ts = tail_sum(params, n, 2.0)?;
    Ok(ScaledValue::new((ts.scaled / PI).sqrt(), 0.5 * ts.log_scale))
}

/// The s = 2 estimate with the sharper envelope [n^{-r}/(2αr) + αr n^{-(1−r)}].
pub fn refined_s2(params: &KernelParams, n: TruncationIndex) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    let c = common(params, n);
    let r = params.r;
    let main = s2_main(&c, r);
    let env = main * (c.nf.powf(-r) / (2.0 * c.ar) + c.ar * c.nf.powf(-(1.0 - r)));
    AsymptoticEstimate::new(FormulaId::RefinedS2, main, env, c.log_scale)
        .bounded(gamma_refined_s2())
        .gated(n, threshold_n0(params.alpha, r, NormOrder::Finite(2.0)))
}

/// Theorem 3: (4/π²) ln(πn^{1−r}/(αr)) with envelope 1 (scaled), s = 1.
pub fn theorem3_estimate(params: &KernelParams, n: TruncationIndex) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    let c = common(params, n);
    let main = 4.0 / (PI * PI) * c.v.ln();
    if !(main > 0.0) {
        return domain(format!("log main term is not positive at n = {}", n.get()));
    }
    AsymptoticEstimate::new(FormulaId::Theorem3, main, 1.0, c.log_scale)
        .bounded(gamma_theorem3())
        .gated(n, threshold_n1(params.alpha, params.r))
}

/// Theorem 4: uniform error on the class generated by the L_p unit ball.
pub fn theorem4_estimate(params: &KernelParams, p: NormOrder, n: TruncationIndex) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    let pv = finite_above_one(p, "theorem4")?;
    let pc = pv / (pv - 1.0);
    let c = common(params, n);
    let r = params.r;
    let pow = c.nf.powf((1.0 - r) / pv);
    let f = gauss_2f1(HypergeometricArgs::new(0.5, 0.5 * (3.0 - pc), 1.5, 1.0))?;
    let main = pow
        * cos_norm(NormOrder::Finite(pc))
        * PI.powf(-(1.0 + 1.0 / pc))
        * c.ar.powf(-1.0 / pv)
        * f.powf(1.0 / pc);
    let env = pow
        * ((1.0 + c.ar.powf((pc - 1.0) / pv) / (pc - 1.0)) * c.nf.powf(-(1.0 - r) / pv)
            + pv.powf(1.0 / pc) * c.ar.powf(-(1.0 + 1.0 / pv)) * c.nf.powf(-r));
    AsymptoticEstimate::new(FormulaId::Theorem4, main, env, c.log_scale)
        .bounded(GAMMA_THEOREM1)
        .gated(n, threshold_n0(params.alpha, r, p))
}

/// (4/π²) ln n^{1−r} at s = 1 with an O(1) envelope; needs n ≥ 2.
pub fn classical_s1(params: &KernelParams, n: TruncationIndex) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    if n.get() < 2 {
        return domain("classical_s1 needs n >= 2");
    }
    let c = common(params, n);
    let main = 4.0 / (PI * PI) * (1.0 - params.r) * c.nf.ln();
    Ok(AsymptoticEstimate::new(FormulaId::ClassicalS1, main, 1.0, c.log_scale))
}

/// n^{1−r}/(παr) at s = ∞ with envelope n^{1−r}[n^{-r}/(αr)² + n^{-(1−r)}].
pub fn classical_sup(params: &KernelParams, n: TruncationIndex) -> Result<AsymptoticEstimate> {
    check_fractional_r(params.r)?;
    let c = common(params, n);
    let r = params.r;
    let pow = c.nf.powf(1.0 - r);
    let main = pow / (PI * c.ar);
    let env = pow * (c.nf.powf(-r) / (c.ar * c.ar) + c.nf.powf(-(1.0 - r)));
    Ok(AsymptoticEstimate::new(FormulaId::ClassicalSup, main, env, c.log_scale))
}

/// The r = 1 statements; q = e^{-α}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum R1Variant {
    Nikolsky,
    Stechkin,
    Serdyuk2005,
    UnifiedStar4,
}

pub fn historical_r1(s: NormOrder, alpha: f64, n: TruncationIndex, variant: R1Variant) -> Result<AsymptoticEstimate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let s = s.validate()?;
    let q = (-alpha).exp();
    let nf = n.get() as f64;
    let log_scale = -alpha * nf;
    let SigmaXi { sigma, xi } = sigma_xi(s);
    let r1_tail = q / (nf * (1.0 - q).powi(sigma as i32));
    let est = match variant {
        R1Variant::Nikolsky | R1Variant::Stechkin => {
            if s != NormOrder::Finite(1.0) {
                return domain(format!("{variant:?} is an s = 1 statement, got s = {s}"));
            }
            let main = 8.0 / (PI * PI) * elliptic_k(q)?;
            let (id, env) = if variant == R1Variant::Nikolsky {
                (FormulaId::Nikolsky, 1.0 / nf)
            } else {
                (FormulaId::Stechkin, q / ((1.0 - q) * nf))
            };
            AsymptoticEstimate::new(id, main, env, log_scale)
        }
        R1Variant::Serdyuk2005 => {
            let k = match s {
                NormOrder::Infinity => 0.5 / (1.0 - q),
                NormOrder::Finite(_) => k_sq_constant(s, q)?.value,
            };
            let main = 2.0 / PI.powf(1.0 + s.reciprocal()) * cos_norm(s) * k;
            AsymptoticEstimate::new(FormulaId::Serdyuk2005, main, r1_tail, log_scale)
        }
        R1Variant::UnifiedStar4 => match s {
            NormOrder::Infinity => {
                let mut e = AsymptoticEstimate::new(
                    FormulaId::UnifiedStar4,
                    1.0 / (PI * (1.0 - q)),
                    q / (nf * (1.0 - q).powi(2)),
                    log_scale,
                );
                e.alternate_main_term = Some(e.main_term);
                e
            }
            NormOrder::Finite(sv) => {
                let hyper = |z: f64| -> Result<f64> {
                    Ok(cos_norm(s) / PI * gauss_2f1(HypergeometricArgs::new(0.5 * sv, 0.5 * sv, 1.0, z))?.powf(1.0 / sv))
                };
                let mut e = AsymptoticEstimate::new(FormulaId::UnifiedStar4, hyper(q * q)?, xi as f64 * r1_tail, log_scale);
                e.alternate_main_term = Some(hyper(q)?);
                e
            }
        },
    };
    Ok(est)
}

/// The r > 1 statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RLargeVariant {
    Stepanets,
    Telyakovsky,
    SerdyukLs,
}

pub fn historical_r_large(
    params: &KernelParams,
    n: TruncationIndex,
    s: NormOrder,
    variant: RLargeVariant,
) -> Result<AsymptoticEstimate> {
    let r = params.r;
    if !(r > 1.0) {
        return domain(format!("this statement needs r > 1, got r = {r}"));
    }
    let s = s.validate()?;
    let alpha = params.alpha;
    let ar = params.alpha_r();
    let nf = n.get() as f64;
    let log_scale = params.log_scale(n);
    let x = ar * nf.powf(r - 1.0);
    let bracket = (1.0 + 1.0 / x) * (-x).exp();
    if variant != RLargeVariant::SerdyukLs && s != NormOrder::Finite(1.0) {
        return domain(format!("{variant:?} is an s = 1 statement, got s = {s}"));
    }
    let est = match variant {
        RLargeVariant::Stepanets => AsymptoticEstimate::new(FormulaId::Stepanets, 4.0 / PI, bracket, log_scale).bounded(2.0),
        RLargeVariant::Telyakovsky => {
            let gap1 = (nf + 1.0).powf(r) - nf.powf(r);
            let gap2 = (nf + 2.0).powf(r) - nf.powf(r);
            let env = (-2.0 * alpha * gap1).exp() + (1.0 + 1.0 / (ar * (nf + 2.0).powf(r))) * (-alpha * gap2).exp();
            AsymptoticEstimate::new(FormulaId::Telyakovsky, 4.0 / PI, env, log_scale)
        }
        RLargeVariant::SerdyukLs => AsymptoticEstimate::new(FormulaId::SerdyukLs, cos_norm(s) / PI, bracket, log_scale),
    };
    Ok(est)
}

/// Evaluates any formula by id; for `Theorem4`, `s` is the class exponent p.
pub fn estimate(formula: FormulaId, params: &KernelParams, n: TruncationIndex, s: NormOrder) -> Result<AsymptoticEstimate> {
    let need_s = |want: f64| -> Result<()> {
        if s != NormOrder::Finite(want) {
            return domain(format!("{formula} is an s = {want} statement, got s = {s}"));
        }
        Ok(())
    };
    let need_r1 = || -> Result<()> {
        if params.r != 1.0 {
            return domain(format!("{formula} needs r = 1, got r = {}", params.r));
        }
        Ok(())
    };
    match formula {
        FormulaId::Theorem1 => theorem1_estimate(params, n, s),
        FormulaId::Theorem2 => theorem2_estimate(params, n, s),
        FormulaId::Corollary1 => {
            need_s(2.0)?;
            corollary1_estimate(params, n)
        }
        FormulaId::RefinedS2 => {
            need_s(2.0)?;
            refined_s2(params, n)
        }
        FormulaId::Theorem3 => {
            need_s(1.0)?;
            theorem3_estimate(params, n)
        }
        FormulaId::Theorem4 => theorem4_estimate(params, s, n),
        FormulaId::ClassicalS1 => {
            need_s(1.0)?;
            classical_s1(params, n)
        }
        FormulaId::ClassicalSup => {
            if s != NormOrder::Infinity {
                return domain(format!("{formula} is an s = inf statement, got s = {s}"));
            }
            classical_sup(params, n)
        }
        FormulaId::Nikolsky => {
            need_r1()?;
            historical_r1(s, params.alpha, n, R1Variant::Nikolsky)
        }
        FormulaId::Stechkin => {
            need_r1()?;
            historical_r1(s, params.alpha, n, R1Variant::Stechkin)
        }
        FormulaId::Serdyuk2005 => {
            need_r1()?;
            historical_r1(s, params.alpha, n, R1Variant::Serdyuk2005)
        }
        FormulaId::UnifiedStar4 => {
            need_r1()?;
            historical_r1(s, params.alpha, n, R1Variant::UnifiedStar4)
        }
        FormulaId::Stepanets => historical_r_large(params, n, s, RLargeVariant::Stepanets),
        FormulaId::Telyakovsky => historical_r_large(params, n, s, RLargeVariant::Telyakovsky),
        FormulaId::SerdyukLs => historical_r_large(params, n, s, RLargeVariant::SerdyukLs),
    }
}

/// Formulas that describe the sandwiched quantity for this (r, s).
pub fn formulas_for(params: &KernelParams, s: NormOrder) -> Vec<FormulaId> {
    let r = params.r;
    let mut out = Vec::new();
    if r > 0.0 && r < 1.0 {
        out.push(FormulaId::Theorem1);
        match s {
            NormOrder::Finite(v) if v == 1.0 => out.extend([FormulaId::Theorem3, FormulaId::ClassicalS1]),
            NormOrder::Finite(v) => {
                out.push(FormulaId::Theorem2);
                if v == 2.0 {
                    out.extend([FormulaId::Corollary1, FormulaId::RefinedS2]);
                }
            }
            NormOrder::Infinity => out.push(FormulaId::ClassicalSup),
        }
    } else if r == 1.0 {
        if s == NormOrder::Finite(1.0) {
            out.extend([FormulaId::Nikolsky, FormulaId::Stechkin]);
        }
        out.extend([FormulaId::Serdyuk2005, FormulaId::UnifiedStar4]);
    } else if r > 1.0 {
        if s == NormOrder::Finite(1.0) {
            out.extend([FormulaId::Stepanets, FormulaId::Telyakovsky]);
        }
        out.push(FormulaId::SerdyukLs);
    }
    out
}

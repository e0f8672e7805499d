//! Scalar special functions: Gamma, Beta, the complete elliptic integral of
//! the first kind, the Gauss hypergeometric function and the closed-form
//! constants built from them.

use std::f64::consts::PI;

use crate::error::{domain, NumericError, Result};
use crate::norms::{periodic_ls_norm, NormOrder, QuadratureConfig};

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_gamma(x: f64) -> f64 {
    // valid for x >= 0.5
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma_fn needs x > 0, got {x}"));
    }
    Ok(gamma_real(x))
}

/// Γ on the real line away from the poles (reflection for x < 1/2).
fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * lanczos_gamma(1.0 - x))
    } else {
        lanczos_gamma(x)
    }
}

/// B(x, y) = Γ(x)Γ(y)/Γ(x+y).
pub fn beta_fn(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain(format!("beta_fn needs positive arguments, got ({x}, {y})"));
    }
    Ok(gamma_real(x) * gamma_real(y) / gamma_real(x + y))
}

/// Complete elliptic integral of the first kind 𝐊(q), modulus q ∈ [0, 1).
pub fn elliptic_k(q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return domain(format!("elliptic_k needs 0 <= q < 1, got {q}"));
    }
    let mut a = 1.0_f64;
    let mut b = ((1.0 - q) * (1.0 + q)).sqrt();
    while (a - b).abs() > 1e-15 * a {
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(PI / (2.0 * a))
}

/// Arguments of F(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricArgs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeometricArgs {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        HypergeometricArgs { a, b, c, z }
    }
}

const HYP_MAX_TERMS: usize = 1_000_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Gauss hypergeometric function: power series for |z| < 1, Gauss's
/// theorem at z = 1.
pub fn gauss_2f1(args: HypergeometricArgs) -> Result<f64> {
    let HypergeometricArgs { a, b, c, z } = args;
    if is_nonpositive_integer(c) {
        return domain(format!("c = {c} is zero or a negative integer"));
    }
    if z == 1.0 {
        let excess = c - a - b;
        if excess <= 0.0 {
            return domain(format!("F(a,b;c;1) diverges: c - a - b = {excess}"));
        }
        return Ok(gamma_real(c) * gamma_real(excess) / (gamma_real(c - a) * gamma_real(c - b)));
    }
    if !(z.abs() < 1.0) {
        return domain(format!("series branch needs |z| < 1, got {z}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut small_run = 0;
    for k in 0..HYP_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            small_run += 1;
            if small_run == 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(NumericError::SeriesNonConvergence {
        terms: HYP_MAX_TERMS,
    })
}

/// ‖cos‖_s over one period.
pub fn cos_norm(s: NormOrder) -> f64 {
    match s {
        NormOrder::Infinity => 1.0,
        NormOrder::Finite(s) => {
            let inner = 2.0 * PI.sqrt() * gamma_real(0.5 * (s + 1.0)) / gamma_real(0.5 * s + 1.0);
            inner.powf(1.0 / s)
        }
    }
}

/// K(s, q) evaluated two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSqConstant {
    /// Hypergeometric form (the returned value).
    pub value: f64,
    /// Direct quadrature of the defining L_s norm.
    pub quadrature: f64,
}

/// K(s, q) = 2^{-1-1/s} ‖(1 − 2q cos t + q²)^{-1/2}‖_s for 1 ≤ s < ∞.
pub fn k_sq_constant(s: NormOrder, q: f64) -> Result<KSqConstant> {
    let s_val = match s {
        NormOrder::Finite(v) => v,
        NormOrder::Infinity => return domain("k_sq_constant needs finite s"),
    };
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("k_sq_constant needs 0 < q < 1, got {q}"));
    }
    let f = gauss_2f1(HypergeometricArgs::new(0.5 * s_val, 0.5 * s_val, 1.0, q * q))?;
    let value = 0.5 * PI.powf(1.0 / s_val) * f.powf(1.0 / s_val);

    let cfg = QuadratureConfig {
        rel_tol: 1e-13,
        ..QuadratureConfig::default()
    };
    let integrand = move |t: f64| (1.0 - 2.0 * q * t.cos() + q * q).powf(-0.5);
    let norm = periodic_ls_norm(&integrand, s, &cfg)?;
    let quadrature = norm / 2f64.powf(1.0 + 1.0 / s_val);
    Ok(KSqConstant { value, quadrature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_gk;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_classical_values() {
        assert!(rel(gamma_fn(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-14);
        assert!(rel(gamma_fn(10.0).unwrap(), 362_880.0) < 1e-13);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn gamma_recurrence_on_grid() {
        for i in 1..200 {
            let x = i as f64 * 0.25;
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn beta_values() {
        assert!(rel(beta_fn(0.5, 0.5).unwrap(), PI) < 1e-14);
        assert!(rel(beta_fn(1.0, 1.0).unwrap(), 1.0) < 1e-14);
        // ∫₀^∞ u^{-1/2}(u+1)^{-2} du, u = w², as a quadrature oracle
        let oracle = adaptive_gk(|w: f64| 2.0 / (w * w + 1.0).powi(2), 0.0, 1.0, 1e-14).unwrap()
            + adaptive_gk(|v: f64| 2.0 * v * v / (1.0 + v * v).powi(2), 0.0, 1.0, 1e-14).unwrap();
        assert!(rel(beta_fn(0.5, 1.5).unwrap(), oracle) < 1e-12);
        assert!(rel(oracle, PI / 2.0) < 1e-12);
        assert!(beta_fn(0.0, 1.0).is_err());
        assert!((beta_fn(0.3, 2.7).unwrap() - beta_fn(2.7, 0.3).unwrap()).abs() < 1e-14);
    }

    fn elliptic_quadrature(q: f64) -> f64 {
        adaptive_gk(|t: f64| 1.0 / (1.0 - q * q * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14).unwrap()
    }

    #[test]
    fn elliptic_k_against_quadrature() {
        assert!(rel(elliptic_k(0.0).unwrap(), PI / 2.0) < 1e-15);
        for q in [0.5, 0.9] {
            assert!((elliptic_k(q).unwrap() - elliptic_quadrature(q)).abs() < 1e-10);
        }
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(-0.1).is_err());
    }

    #[test]
    fn elliptic_k_strictly_increasing() {
        let mut prev = elliptic_k(0.0).unwrap();
        for i in 1..100 {
            let v = elliptic_k(i as f64 / 100.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn hypergeometric_closed_forms() {
        let v = gauss_2f1(HypergeometricArgs::new(1.0, 1.0, 1.0, 0.25)).unwrap();
        assert!(rel(v, 4.0 / 3.0) < 1e-14);
        let v = gauss_2f1(HypergeometricArgs::new(0.5, 0.5, 1.5, 1.0)).unwrap();
        assert!(rel(v, PI / 2.0) < 1e-12);
        let q: f64 = 0.3;
        let v = gauss_2f1(HypergeometricArgs::new(0.5, 0.5, 1.0, q * q)).unwrap();
        assert!(rel(v, 2.0 / PI * elliptic_k(q).unwrap()) < 1e-13);
    }

    #[test]
    fn hypergeometric_domain_errors() {
        assert!(gauss_2f1(HypergeometricArgs::new(1.0, 1.0, -2.0, 0.5)).is_err());
        assert!(gauss_2f1(HypergeometricArgs::new(1.0, 1.0, 0.0, 0.5)).is_err());
        assert!(gauss_2f1(HypergeometricArgs::new(1.0, 1.0, 1.5, 1.0)).is_err());
        assert!(gauss_2f1(HypergeometricArgs::new(1.0, 1.0, 1.5, 1.5)).is_err());
    }

    #[test]
    fn cos_norm_closed_form_vs_quadrature() {
        assert!(rel(cos_norm(NormOrder::Finite(1.0)), 4.0) < 1e-14);
        assert!(rel(cos_norm(NormOrder::Finite(2.0)), PI.sqrt()) < 1e-14);
        assert_eq!(cos_norm(NormOrder::Infinity), 1.0);
        for s in [1.0, 1.5, 2.0, 3.0, 8.0] {
            // |cos|^s on [0, π/2] is smooth; the full period is four copies
            let quarter = adaptive_gk(|t: f64| t.cos().powf(s), 0.0, PI / 2.0, 1e-14).unwrap();
            let oracle = (4.0 * quarter).powf(1.0 / s);
            assert!(rel(cos_norm(NormOrder::Finite(s)), oracle) < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn normalized_cos_norm_is_monotone() {
        let vals: Vec<f64> = [
            NormOrder::Finite(1.0),
            NormOrder::Finite(2.0),
            NormOrder::Finite(4.0),
            NormOrder::Infinity,
        ]
        .iter()
        .map(|&s| (2.0 * PI).powf(-s.reciprocal()) * cos_norm(s))
        .collect();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-15);
        }
    }

    #[test]
    fn k_sq_constant_cases() {
        let k = k_sq_constant(NormOrder::Finite(1.0), 0.5).unwrap();
        assert!((k.value - elliptic_k(0.5).unwrap()).abs() < 1e-12);
        let k = k_sq_constant(NormOrder::Finite(2.0), 0.5).unwrap();
        assert!(rel(k.value, PI.sqrt() / 2.0 * 2.0 / 3f64.sqrt()) < 1e-14);
        let k = k_sq_constant(NormOrder::Finite(3.0), 0.4).unwrap();
        assert!((k.value - k.quadrature).abs() < 1e-8);
        for q in [0.1, 0.5, 0.9] {
            let k = k_sq_constant(NormOrder::Finite(1.0), q).unwrap();
            assert!((k.value - elliptic_k(q).unwrap()).abs() <= 1e-8);
            assert!((k.quadrature - elliptic_k(q).unwrap()).abs() <= 1e-8);
        }
        assert!(k_sq_constant(NormOrder::Infinity, 0.5).is_err());
        assert!(k_sq_constant(NormOrder::Finite(2.0), 1.0).is_err());
    }
}

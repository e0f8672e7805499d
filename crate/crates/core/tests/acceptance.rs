//! Acceptance criteria, one PASS/FAIL line each. With `--strict` the run
//! exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fourier_bounds::asymptotics::{
    exact_s2, gamma_refined_s2, gamma_theorem3, historical_r1, n0_condition, n1_condition, refined_s2, theorem1_estimate,
    theorem3_estimate, threshold_n0, threshold_n1, R1Variant, GAMMA_THEOREM1,
};
use fourier_bounds::bounds::{sandwich, upper_bound};
use fourier_bounds::norms::{j_s_limit, tail_integral_residual};
use fourier_bounds::specfun::{elliptic_k, gauss_2f1, k_sq_constant, HypergeometricArgs};
use fourier_bounds::{KernelParams, NormOrder, QuadratureConfig, ScaledValue, TruncationIndex};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn idx(n: u64) -> TruncationIndex {
    TruncationIndex::new(n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn parseval_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        for r in [0.25, 0.5, 0.75] {
            for n in [4u64, 16, 64, 256] {
                let p = KernelParams::new(alpha, r, 0.0).unwrap();
                let exact = exact_s2(&p, idx(n)).unwrap();
                match upper_bound(&p, idx(n), NormOrder::Finite(2.0), &cfg()) {
                    Ok(up) => {
                        let e = rel(up.rescaled(exact.log_scale), exact.scaled);
                        worst = worst.max(e);
                        if e > 1e-8 {
                            failures.push(format!("(α={alpha}, r={r}, n={n}) rel {e:.1e}"));
                        }
                    }
                    Err(e) => failures.push(format!("(α={alpha}, r={r}, n={n}) {e}")),
                }
            }
        }
    }
    let detail = format!("max rel err {worst:.2e} over evaluated cases, {} of 36 failing", failures.len());
    if failures.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}: {}", failures.join("; ")))
    }
}

fn r1_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for n in [1u64, 8, 64] {
            let p = KernelParams::new(alpha, 1.0, 0.0).unwrap();
            let x = exact_s2(&p, idx(n)).unwrap();
            let closed = ScaledValue::new(1.0 / (PI * (1.0 - (-2.0 * alpha).exp())).sqrt(), -alpha * n as f64);
            worst = worst.max(rel(x.rescaled(closed.log_scale), closed.scaled));
        }
    }
    outcome(worst <= 1e-12, format!("max rel err {worst:.2e}"))
}

fn special_function_identities() -> Outcome {
    let mut checks = Vec::new();
    for z in [0.1, 0.5, 0.9] {
        let f = gauss_2f1(HypergeometricArgs::new(1.0, 1.0, 1.0, z)).unwrap();
        checks.push((format!("F(1,1;1;{z})"), rel(f, 1.0 / (1.0 - z)), 1e-12));
    }
    let f = gauss_2f1(HypergeometricArgs::new(0.5, 0.5, 1.5, 1.0)).unwrap();
    checks.push(("F(1/2,1/2;3/2;1)".into(), rel(f, PI / 2.0), 1e-10));
    for q in [0.1, 0.5, 0.9] {
        let k = k_sq_constant(NormOrder::Finite(1.0), q).unwrap().value;
        checks.push((format!("K(1,{q})"), rel(k, elliptic_k(q).unwrap()), 1e-8));
    }
    let j = j_s_limit(NormOrder::Finite(2.0)).unwrap();
    checks.push(("J_lim(2)".into(), rel(j, (PI / 2.0).sqrt()), 1e-10));
    let bad: Vec<_> = checks.iter().filter(|(_, e, tol)| e > tol).map(|(name, e, _)| format!("{name} {e:.1e}")).collect();
    let worst = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    outcome(bad.is_empty(), format!("{} identities, max rel err {worst:.2e} {}", checks.len(), bad.join("; ")))
}

fn theorem1_envelope() -> Outcome {
    let p = KernelParams::new(1.0, 0.5, 0.0).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for s in [NormOrder::Finite(1.0), NormOrder::Finite(1.5), NormOrder::Finite(3.0), NormOrder::Infinity] {
        let n0 = threshold_n0(1.0, 0.5, s.conjugate()).unwrap();
        for n in [n0, 2 * n0] {
            let est = theorem1_estimate(&p, idx(n), s).unwrap();
            match sandwich(&p, idx(n), s, &cfg()) {
                Ok(b) => {
                    let g = |v: f64| est.implied_gamma(ScaledValue::new(v, b.log_scale).rescaled(est.log_scale));
                    let (gl, gu) = (g(b.lower), g(b.upper));
                    let ok = est.applicable && gl.abs() <= GAMMA_THEOREM1 && gu.abs() <= GAMMA_THEOREM1;
                    pass &= ok;
                    parts.push(format!("s={s} n={n}: γ=({gl:.3e}, {gu:.3e})"));
                }
                Err(e) => {
                    pass = false;
                    parts.push(format!("s={s} n={n}: {e}"));
                }
            }
        }
    }
    outcome(pass, format!("bound {GAMMA_THEOREM1:.1}; {}", parts.join("; ")))
}

fn theorem3_envelope() -> Outcome {
    let p = KernelParams::new(1.0, 0.5, 0.0).unwrap();
    let n1 = threshold_n1(1.0, 0.5).unwrap();
    let est = theorem3_estimate(&p, idx(n1)).unwrap();
    let bound = gamma_theorem3();
    match sandwich(&p, idx(n1), NormOrder::Finite(1.0), &cfg()) {
        Ok(b) => {
            let g = |v: f64| est.implied_gamma(ScaledValue::new(v, b.log_scale).rescaled(est.log_scale));
            let (gl, gu) = (g(b.lower), g(b.upper));
            let pass = est.applicable && gl.abs() <= bound && gu.abs() <= bound;
            outcome(pass, format!("n1={n1}, bound {bound:.1}, γ=({gl:.4}, {gu:.4})"))
        }
        Err(e) => outcome(false, format!("n1={n1}: {e}")),
    }
}

fn refined_s2_envelope() -> Outcome {
    let p = KernelParams::new(1.0, 0.5, 0.0).unwrap();
    let n0 = threshold_n0(1.0, 0.5, NormOrder::Finite(2.0)).unwrap();
    let bound = gamma_refined_s2();
    let mut gammas = Vec::new();
    for n in [n0, 2 * n0, 4 * n0] {
        let est = refined_s2(&p, idx(n)).unwrap();
        let x = exact_s2(&p, idx(n)).unwrap();
        gammas.push((est.applicable, est.implied_gamma(x.rescaled(est.log_scale))));
    }
    let pass = gammas.iter().all(|&(a, g)| a && g.abs() < bound + 1e-9);
    let list: Vec<_> = gammas.iter().map(|g| format!("{:.6}", g.1)).collect();
    outcome(pass, format!("n0={n0}, bound {bound:.6}, γ=[{}]", list.join(", ")))
}

fn theta_bound() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 20 {
        let alpha = rng.gen_range(0.2..3.0);
        let r = rng.gen_range(0.1..0.9);
        let s = rng.gen_range(1.1..6.0);
        let sp = NormOrder::Finite(s).conjugate();
        let Ok(n0) = threshold_n0(alpha, r, sp) else { continue };
        let n = n0 + rng.gen_range(0..=n0);
        match tail_integral_residual(alpha, r, s, idx(n)) {
            Ok(t) => worst = worst.max(t.abs()),
            Err(e) => return outcome(false, format!("(α={alpha:.3}, r={r:.3}, s={s:.3}, n={n}): {e}")),
        }
        cases += 1;
    }
    outcome(worst < 2.0, format!("20 cases, max |Θ| = {worst:.4}"))
}

fn sandwich_ordering() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let orders = [
        NormOrder::Finite(1.0),
        NormOrder::Finite(1.5),
        NormOrder::Finite(2.0),
        NormOrder::Finite(4.0),
        NormOrder::Infinity,
    ];
    let mut violations = Vec::new();
    let mut errors = Vec::new();
    for _ in 0..100 {
        let alpha = rng.gen_range(0.2..3.0);
        let r = rng.gen_range(0.1..0.9);
        let beta = rng.gen_range(0.0..4.0);
        let n = rng.gen_range(2..=128u64);
        let s = orders[rng.gen_range(0..orders.len())];
        let p = KernelParams::new(alpha, r, beta).unwrap();
        match sandwich(&p, idx(n), s, &cfg()) {
            Ok(b) if b.lower <= b.upper * (1.0 + 1e-9) => {}
            Ok(b) => violations.push(format!("(α={alpha:.3}, r={r:.3}, n={n}, s={s}) {} > {}", b.lower, b.upper)),
            Err(e) => errors.push(format!("(α={alpha:.3}, r={r:.3}, n={n}, s={s}) {e}")),
        }
    }
    let detail = format!(
        "{} evaluated, {} ordering violations, {} not evaluable",
        100 - errors.len(),
        violations.len(),
        errors.len()
    );
    let mut notes = violations.clone();
    notes.extend(errors.iter().take(3).cloned());
    outcome(violations.is_empty() && errors.is_empty(), format!("{detail}; {}", notes.join("; ")))
}

fn threshold_correctness() -> Outcome {
    let mut problems = Vec::new();
    match threshold_n0(1.0, 0.5, NormOrder::Finite(1.0)) {
        Ok(1225) => {}
        other => problems.push(format!("n0(1,0.5,1) = {other:?}")),
    }
    let mut rng = StdRng::seed_from_u64(3);
    let orders = [
        NormOrder::Finite(1.0),
        NormOrder::Finite(1.5),
        NormOrder::Finite(2.0),
        NormOrder::Finite(3.0),
        NormOrder::Infinity,
    ];
    let mut cases = 0;
    while cases < 20 {
        let alpha = rng.gen_range(0.2..3.0);
        let r = rng.gen_range(0.1..0.9);
        let p = orders[rng.gen_range(0..orders.len())];
        let (Ok(n0), Ok(n0_1), Ok(n1)) = (threshold_n0(alpha, r, p), threshold_n0(alpha, r, NormOrder::Finite(1.0)), threshold_n1(alpha, r))
        else {
            continue;
        };
        cases += 1;
        let tag = format!("(α={alpha:.3}, r={r:.3}, p={p})");
        if !n0_condition(alpha, r, p, n0) || (n0 > 1 && n0_condition(alpha, r, p, n0 - 1)) {
            problems.push(format!("{tag} n0={n0} not minimal"));
        }
        if !n1_condition(alpha, r, n1) || (n1 > 1 && n1_condition(alpha, r, n1 - 1)) {
            problems.push(format!("{tag} n1={n1} not minimal"));
        }
        if n1 <= n0_1 {
            problems.push(format!("{tag} n1={n1} <= n0={n0_1}"));
        }
    }
    outcome(problems.is_empty(), format!("n0(1,0.5,1) and 20 random cases; {}", problems.join("; ")))
}

fn stechkin_trend() -> Outcome {
    let alpha = 1.0;
    let q = (-alpha as f64).exp();
    let p = KernelParams::new(alpha, 1.0, 0.0).unwrap();
    let mut residuals = Vec::new();
    for n in [16u64, 32, 64, 128] {
        let est = historical_r1(NormOrder::Finite(1.0), alpha, idx(n), R1Variant::Stechkin).unwrap();
        let up = match upper_bound(&p, idx(n), NormOrder::Finite(1.0), &cfg()) {
            Ok(u) => u,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        let resid = (up.rescaled(est.log_scale) - est.main_term).abs() * n as f64 * (1.0 - q) / q;
        residuals.push(resid);
    }
    let bounded = residuals.iter().all(|r| r.is_finite());
    let monotone = residuals.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let list: Vec<_> = residuals.iter().map(|r| format!("{r:.4e}")).collect();
    outcome(bounded && monotone, format!("residual·n(1−q)/q = [{}]", list.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("Parseval exactness", parseval_exactness, Duration::from_secs(10)),
        ("r=1 closed forms", r1_closed_forms, Duration::from_secs(1)),
        ("special-function identities", special_function_identities, Duration::from_secs(1)),
        ("Theorem 1 envelope", theorem1_envelope, Duration::from_secs(300)),
        ("Theorem 3 envelope", theorem3_envelope, Duration::from_secs(120)),
        ("refined s=2 envelope", refined_s2_envelope, Duration::from_secs(5)),
        ("Θ bound", theta_bound, Duration::from_secs(30)),
        ("sandwich ordering", sandwich_ordering, Duration::from_secs(600)),
        ("threshold correctness", threshold_correctness, Duration::from_secs(5)),
        ("Stechkin trend", stechkin_trend, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let on_time = took <= *budget;
        let pass = out.pass && on_time;
        if !pass {
            failed += 1;
        }
        let timing = if on_time { String::new() } else { format!(" [over budget {}s]", budget.as_secs()) };
        println!(
            "criterion {:>2} {:<28} {} ({:.1}s){} {}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            timing,
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    // report-only by default; `--strict` turns any failing criterion into a failing exit
    let strict = std::env::args().any(|a| a == "--strict");
    if failed == 0 || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Cross-check suites: reference fixtures, identity and recurrence residuals,
//! two-route agreement, and neutrix-limit oracles for every closed form.
//!
//! Each case yields one [`CaseRecord`]; a suite passes iff all its records do.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::incgamma::{
    lower_gamma, lower_gamma_deriv, neg_int_identity_rhs, regularized_integral, series_generic, EvalConfig,
};
use crate::incgamma_star::{
    gamma_star, star_deriv, star_regularized, star_series_generic, star_step_up, NegativeArgument,
};
use crate::neutrix::{
    basis_for_integrand, log_power_columns, verify_case, verify_case_columns, verify_composite, with_vanishing, Column,
    EpsilonGrid, NegligibleTerm, OraclePiece, VerifyReport,
};
use crate::polygamma::{polygamma_neg_int, polygamma_neutrix_integral, psi_neg_int, EULER_GAMMA};
use crate::quadrature::{integrate, QuadratureConfig};

pub const FIXTURE_TOL: f64 = 5e-6;
pub const FIXTURE_TOL_SHORT: f64 = 1e-4;
pub const IDENTITY_REL_TOL: f64 = 1e-9;
pub const RECURRENCE_REL_TOL: f64 = 1e-10;
pub const TWO_PATH_REL_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-6;
pub const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Fixtures,
    Identities,
    Recurrences,
    TwoPath,
    Oracle,
    All,
}

impl Suite {
    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Fixtures => "fixtures",
            Suite::Identities => "identities",
            Suite::Recurrences => "recurrences",
            Suite::TwoPath => "two_path",
            Suite::Oracle => "oracle",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub suite: &'static str,
    pub name: String,
    pub expected: f64,
    pub actual: Option<f64>,
    pub abs_diff: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_rms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseRecord {
    fn compare(suite: &'static str, name: String, expected: f64, actual: Result<f64>, tol: f64) -> Self {
        match actual {
            Ok(v) => {
                let d = (v - expected).abs();
                Self {
                    suite,
                    name,
                    expected,
                    actual: Some(v),
                    abs_diff: Some(d),
                    tol,
                    pass: d < tol,
                    residual_rms: None,
                    condition_estimate: None,
                    error: None,
                }
            }
            Err(e) => Self {
                suite,
                name,
                expected,
                actual: None,
                abs_diff: None,
                tol,
                pass: false,
                residual_rms: None,
                condition_estimate: None,
                error: Some(e.to_string()),
            },
        }
    }

    fn from_report(suite: &'static str, r: VerifyReport) -> Self {
        Self {
            suite,
            name: r.name,
            expected: r.closed_form,
            actual: r.fitted,
            abs_diff: r.abs_diff,
            tol: r.tol,
            pass: r.pass,
            residual_rms: r.residual_rms,
            condition_estimate: r.condition_estimate,
            error: r.error,
        }
    }

    /// Re-judge against a different tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.pass = self.abs_diff.is_some_and(|d| d < tol);
        self
    }
}

/// Relative residual `|a - b| / max(scales)`, reported as a comparison of the
/// two sides with the relative tolerance turned into an absolute one.
fn relative(suite: &'static str, name: String, lhs: Result<f64>, rhs: Result<f64>, scale: f64, rel: f64) -> CaseRecord {
    match (lhs, rhs) {
        (Ok(l), Ok(r)) => CaseRecord::compare(suite, name, r, Ok(l), rel * scale),
        (Err(e), _) | (_, Err(e)) => CaseRecord::compare(suite, name, f64::NAN, Err(e), rel * scale),
    }
}

pub fn run(suite: Suite, cfg: &EvalConfig) -> Vec<CaseRecord> {
    match suite {
        Suite::Fixtures => fixtures(cfg),
        Suite::Identities => identities(cfg),
        Suite::Recurrences => recurrences(cfg),
        Suite::TwoPath => two_path(cfg),
        Suite::Oracle => oracle(),
        Suite::All => {
            let mut out = fixtures(cfg);
            out.extend(identities(cfg));
            out.extend(recurrences(cfg));
            out.extend(two_path(cfg));
            out.extend(oracle());
            out
        }
    }
}

/// Reference values for `γ(0, x)` and `γ*(0, x)`.
pub const GAMMA_ZERO_FIXTURES: [(f64, f64); 3] = [(0.5, -1.13699), (0.75, -0.917556), (1.0, -0.7966)];
pub const STAR_ZERO_FIXTURES: [(f64, f64); 4] = [
    (-1.0 / 3.0, 0.735308),
    (-0.5, 0.122996),
    (-0.75, -0.630117),
    (-1.0, -1.3179),
];

pub fn fixtures(cfg: &EvalConfig) -> Vec<CaseRecord> {
    let mut out = Vec::new();
    for (x, v) in GAMMA_ZERO_FIXTURES {
        let got = lower_gamma(0.0, x, cfg).map(|e| e.value);
        out.push(CaseRecord::compare("fixtures", format!("incgamma(0, {x})"), v, got, FIXTURE_TOL));
    }
    for (x, v) in STAR_ZERO_FIXTURES {
        // -1.3179 carries five digits only
        let tol = if x == -1.0 { FIXTURE_TOL_SHORT } else { FIXTURE_TOL };
        let got = NegativeArgument::new(x).and_then(|a| gamma_star(0.0, a, cfg)).map(|e| e.value);
        out.push(CaseRecord::compare("fixtures", format!("incgamma_star(0, {x:.6})"), v, got, tol));
    }
    out
}

pub fn identities(cfg: &EvalConfig) -> Vec<CaseRecord> {
    let mut out = Vec::new();
    for m in 1..=6u32 {
        for x in [0.5, 1.0, 2.0, 4.0] {
            let mf = m as f64;
            let rhs = neg_int_identity_rhs(m, x);
            let lhs = lower_gamma(-mf, x, cfg)
                .and_then(|a| Ok(a.value + lower_gamma(1.0 - mf, x, cfg)?.value / mf));
            out.push(relative(
                "identities",
                format!("neg_int_identity(m={m}, x={x})"),
                lhs,
                Ok(rhs),
                rhs.abs().max(1.0),
                IDENTITY_REL_TOL,
            ));
        }
    }
    out
}

fn tight(cfg: &EvalConfig) -> EvalConfig {
    EvalConfig {
        quad: QuadratureConfig::new(1e-15, 1e-14, 4000).expect("valid quadrature config"),
        ..*cfg
    }
}

pub fn recurrences(cfg: &EvalConfig) -> Vec<CaseRecord> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    // γ(α+1, x) = α γ(α, x) - x^α e^{-x}
    let mut n = 0;
    while n < 50 {
        let alpha: f64 = rng.gen_range(-4.0..4.0);
        let x: f64 = rng.gen_range(0.1..5.0);
        if (alpha - alpha.round()).abs() < 1e-3 {
            continue;
        }
        n += 1;
        let name = format!("incgamma_recurrence(alpha={alpha:.6}, x={x:.6})");
        let (a1, a0) = match (lower_gamma(alpha + 1.0, x, cfg), lower_gamma(alpha, x, cfg)) {
            (Ok(a1), Ok(a0)) => (a1.value, a0.value),
            (Err(e), _) | (_, Err(e)) => {
                out.push(CaseRecord::compare("recurrences", name, f64::NAN, Err(e), RECURRENCE_REL_TOL));
                continue;
            }
        };
        let p = x.powf(alpha) * (-x).exp();
        let scale = a1.abs().max((alpha * a0).abs()).max(p);
        out.push(relative("recurrences", name, Ok(a1), Ok(alpha * a0 - p), scale, RECURRENCE_REL_TOL));
    }

    // γ*(α+1, x₋) = -α γ*(α, x₋) - x₋^α e^{x₋}
    let mut n = 0;
    while n < 50 {
        let alpha: f64 = rng.gen_range(0.1..4.0);
        let xm: f64 = rng.gen_range(0.1..2.0);
        if (alpha - alpha.round()).abs() < 1e-3 {
            continue;
        }
        n += 1;
        let name = format!("incgamma_star_recurrence(alpha={alpha:.6}, x_minus={xm:.6})");
        let arg = match NegativeArgument::from_minus(xm) {
            Ok(a) => a,
            Err(e) => {
                out.push(CaseRecord::compare("recurrences", name, f64::NAN, Err(e), RECURRENCE_REL_TOL));
                continue;
            }
        };
        let (s1, s0) = match (gamma_star(alpha + 1.0, arg, cfg), gamma_star(alpha, arg, cfg)) {
            (Ok(s1), Ok(s0)) => (s1.value, s0.value),
            (Err(e), _) | (_, Err(e)) => {
                out.push(CaseRecord::compare("recurrences", name, f64::NAN, Err(e), RECURRENCE_REL_TOL));
                continue;
            }
        };
        let scale = s1.abs().max((alpha * s0).abs()).max(xm.powf(alpha) * xm.exp());
        out.push(relative(
            "recurrences",
            name,
            Ok(s1),
            Ok(star_step_up(alpha, s0, xm)),
            scale,
            RECURRENCE_REL_TOL,
        ));
    }

    // ψ^(n)(x+1) = ψ^(n)(x) + (-1)^n n!/x^{n+1}, both sides from the integral route
    let tcfg = tight(cfg);
    for n in 0..=3u32 {
        for x in [-3.7, -2.5, -1.5, -0.5, 0.3, 1.5, 2.5, 3.3] {
            let name = format!("polygamma_recurrence(n={n}, x={x})");
            let nf = crate::summation::factorial(n as usize);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let step = sign * nf / f64::powi(x, n as i32 + 1);
            match (polygamma_neutrix_integral(n, x + 1.0, &tcfg), polygamma_neutrix_integral(n, x, &tcfg)) {
                (Ok(p1), Ok(p0)) => {
                    let scale = p1.value.abs().max(p0.value.abs()).max(step.abs());
                    out.push(relative(
                        "recurrences",
                        name,
                        Ok(p1.value),
                        Ok(p0.value + step),
                        scale,
                        RECURRENCE_REL_TOL,
                    ));
                }
                (Err(e), _) | (_, Err(e)) => {
                    out.push(CaseRecord::compare("recurrences", name, f64::NAN, Err(e), RECURRENCE_REL_TOL))
                }
            }
        }
    }
    out
}

pub const TWO_PATH_ALPHAS: [f64; 5] = [-0.3, -1.7, -2.5, -3.2, -4.6];
pub const TWO_PATH_ABS_X: [f64; 5] = [0.4, 1.0, 2.0, 3.5, 5.0];

pub fn two_path(cfg: &EvalConfig) -> Vec<CaseRecord> {
    let mut out = Vec::new();
    for alpha in TWO_PATH_ALPHAS {
        for x in TWO_PATH_ABS_X {
            let s = series_generic(alpha, x, cfg).map(|e| e.value);
            let q = regularized_integral(alpha, x, cfg).map(|e| e.value);
            let scale = s.as_ref().map(|v| v.abs().max(1.0)).unwrap_or(1.0);
            out.push(relative(
                "two_path",
                format!("incgamma(alpha={alpha}, x={x})"),
                q,
                s,
                scale,
                TWO_PATH_REL_TOL,
            ));
            let s = NegativeArgument::from_minus(x)
                .and_then(|a| star_series_generic(alpha, a, cfg))
                .map(|e| e.value);
            let q = NegativeArgument::from_minus(x)
                .and_then(|a| star_regularized(alpha, a, cfg))
                .map(|e| e.value);
            let scale = s.as_ref().map(|v| v.abs().max(1.0)).unwrap_or(1.0);
            out.push(relative(
                "two_path",
                format!("incgamma_star(alpha={alpha}, x={})", -x),
                q,
                s,
                scale,
                TWO_PATH_REL_TOL,
            ));
        }
    }
    out
}

fn oracle_quad() -> QuadratureConfig {
    // far tighter than the fit acceptance threshold
    QuadratureConfig::new(1e-15, 1e-14, 4000).expect("valid quadrature config")
}

fn t(lambda: f64, r: u32) -> NegligibleTerm {
    NegligibleTerm::new(lambda, r).expect("valid basis term")
}

/// `∫_ε^x u^{α-1} ln^r u e^{-u} du`.
fn lower_family(alpha: f64, r: u32, x: f64) -> impl Fn(f64) -> Result<f64> + Sync {
    let q = oracle_quad();
    move |e| integrate(|u: f64| u.powf(alpha - 1.0) * u.ln().powi(r as i32) * (-u).exp(), e, x, &q).map(|v| v.value)
}

/// `∫_{-ε}^{-x₋} |u|^{α-1} ln^r |u| e^{-u} du = -∫_ε^{x₋} v^{α-1} ln^r v e^v dv`.
fn star_family(alpha: f64, r: u32, x_minus: f64) -> impl Fn(f64) -> Result<f64> + Sync {
    let q = oracle_quad();
    move |e| {
        integrate(|v: f64| v.powf(alpha - 1.0) * v.ln().powi(r as i32) * v.exp(), e, x_minus, &q).map(|v| -v.value)
    }
}

/// `∫_ε^1 t^{-m-1} ln^n t dt`.
fn log_moment_family(m: u32, n: u32) -> impl Fn(f64) -> Result<f64> + Sync {
    let q = oracle_quad();
    move |e| integrate(|t: f64| t.powi(-(m as i32) - 1) * t.ln().powi(n as i32), e, 1.0, &q).map(|v| v.value)
}

const ORACLE_TAIL: usize = 7;

/// Grouped columns for `∫_ε u^{α-1} ln^r u (power series in u)`: one per
/// exponent `α + k`, through the nonpositive ones and `ORACLE_TAIL` more.
pub fn incgamma_columns(alpha: f64, r: u32) -> Vec<Column> {
    let divergent = (0..).take_while(|&k| alpha + k as f64 <= 0.0).count();
    let exps: Vec<f64> = (0..divergent + ORACLE_TAIL).map(|k| alpha + k as f64).collect();
    log_power_columns(&exps, r)
}

/// `γ^(r)(α, x)` against its fitted neutrix limit.
pub fn incgamma_oracle(alpha: f64, r: u32, x: f64, tol: f64) -> VerifyReport {
    let cfg = tight(&EvalConfig::default());
    let name = format!("oracle incgamma_deriv(alpha={alpha}, x={x}, r={r})");
    let columns = incgamma_columns(alpha, r);
    let grid = EpsilonGrid::wide(columns.len());
    match lower_gamma_deriv(alpha, x, r, &cfg) {
        Ok(v) => verify_case_columns(name, v.value, lower_family(alpha, r, x), &columns, &grid, tol),
        Err(e) => failed_report(name, e, tol),
    }
}

/// `γ*^(r)(α, x₋)` against its fitted neutrix limit.
pub fn incgamma_star_oracle(alpha: f64, r: u32, x: f64, tol: f64) -> VerifyReport {
    let cfg = tight(&EvalConfig::default());
    let name = format!("oracle incgamma_star_deriv(alpha={alpha}, x={x}, r={r})");
    let columns = incgamma_columns(alpha, r);
    let grid = EpsilonGrid::wide(columns.len());
    let closed = NegativeArgument::new(x).and_then(|a| {
        if r == 0 {
            gamma_star(alpha, a, &cfg)
        } else {
            star_deriv(alpha, a, r, &cfg)
        }
    });
    match closed {
        Ok(v) => verify_case_columns(name, v.value, star_family(alpha, r, -x), &columns, &grid, tol),
        Err(e) => failed_report(name, e, tol),
    }
}

fn failed_report(name: String, e: crate::error::Error, tol: f64) -> VerifyReport {
    VerifyReport {
        name,
        closed_form: f64::NAN,
        fitted: None,
        abs_diff: None,
        tol,
        pass: false,
        residual_rms: None,
        condition_estimate: None,
        error: Some(e.to_string()),
    }
}

/// `-N-lim ∫_ε^1 t^{-m-1} ln^n t/(1-t) dt` term by term: each `t^{-i} ln^n t`
/// is fitted on its own, and `∫_0^1 ln^n t/(1-t) dt` is a plain integral.
pub fn polygamma_oracle(n: u32, m: u32, tol: f64) -> VerifyReport {
    let name = format!("oracle polygamma(n={n}, x=-{m})");
    let closed = match polygamma_neg_int(n, m) {
        Ok(v) => v,
        Err(e) => return failed_report(name, e, tol),
    };
    let q = oracle_quad();
    let kernel = integrate(|s: f64| s.ln().powi(n as i32) / (1.0 - s), 0.0, 0.5, &q).and_then(|lo| {
        // upper half in w = 1 - t
        let hi = integrate(|w: f64| (-w).ln_1p().powi(n as i32) / w, 0.0, 0.5, &q)?;
        Ok(lo.value + hi.value)
    });
    let kernel = match kernel {
        Ok(v) => v,
        Err(e) => return failed_report(name, e, tol),
    };
    let pieces: Vec<OraclePiece> = (1..=m + 1)
        .map(|i| {
            let basis = if i == 1 {
                basis_for_integrand(&[], n)
            } else {
                basis_for_integrand(&[1.0 - i as f64], n)
            };
            let grid = EpsilonGrid::wide(basis.len());
            let f = log_moment_family(i - 1, n);
            OraclePiece {
                f: Box::new(move |e| f(e).map(|v| -v)),
                basis,
                grid,
            }
        })
        .collect();
    verify_composite(name, closed, &pieces, -kernel, tol)
}

/// `-γ + N-lim ∫_ε^1 (1 - t^{-m-1})/(1-t) dt`.
pub fn digamma_oracle(m: u32, tol: f64) -> VerifyReport {
    let q = oracle_quad();
    let k = -(m as f64) - 1.0;
    let f = move |e: f64| {
        integrate(|s: f64| -(k * s.ln()).exp_m1() / (1.0 - s), e, 1.0, &q).map(|v| -EULER_GAMMA + v.value)
    };
    let powers: Vec<f64> = (1..=m).map(|i| -(i as f64)).collect();
    let basis = basis_for_integrand(&powers, 0);
    let grid = EpsilonGrid::wide(basis.len());
    verify_case(format!("oracle digamma(x=-{m})"), psi_neg_int(m), f, &basis, &grid, tol)
}

/// `N-lim ∫_ε^1 t^{-m-1} ln^n t dt` against `-n!/m^{n+1}`.
pub fn log_moment_oracle(m: u32, n: u32, tol: f64) -> VerifyReport {
    let basis = basis_for_integrand(&[-(m as f64)], n);
    let grid = EpsilonGrid::wide(basis.len());
    let closed = crate::quadrature::log_moment_finite_part(m, n);
    verify_case(
        format!("oracle log_moment(m={m}, n={n})"),
        closed,
        log_moment_family(m, n),
        &basis,
        &grid,
        tol,
    )
}

pub fn oracle() -> Vec<CaseRecord> {
    let mut out = Vec::new();
    for m in 1..=3 {
        for n in 1..=3 {
            out.push(CaseRecord::from_report("oracle", log_moment_oracle(m, n, ORACLE_TOL)));
        }
    }
    for n in 1..=3 {
        for m in 0..=3 {
            out.push(CaseRecord::from_report("oracle", polygamma_oracle(n, m, ORACLE_TOL)));
        }
    }
    for m in 0..=4 {
        out.push(CaseRecord::from_report("oracle", digamma_oracle(m, ORACLE_TOL)));
    }

    // the reference γ(0, 1) against the fitted neutrix limit
    let basis = with_vanishing(&[t(0.0, 1)], 6);
    out.push(CaseRecord::from_report(
        "oracle",
        verify_case(
            "oracle reference incgamma(0, 1)",
            -0.7966,
            lower_family(0.0, 0, 1.0),
            &basis,
            &EpsilonGrid::standard(basis.len()),
            FIXTURE_TOL,
        ),
    ));

    for (alpha, r, x) in [
        (0.0, 0, 1.0),
        (-2.0, 0, 1.0),
        (-1.5, 0, 2.0),
        (-0.5, 0, 0.7),
        (-1.0, 1, 0.5),
        (-1.5, 1, 1.0),
        (0.0, 2, 1.0),
        (-2.0, 2, 1.0),
        (-1.5, 2, 1.0),
    ] {
        out.push(CaseRecord::from_report("oracle", incgamma_oracle(alpha, r, x, ORACLE_TOL)));
    }
    for (alpha, r, x) in [(0.0, 0, -1.0), (-2.0, 0, -1.0), (-1.5, 0, -0.7), (-0.5, 1, -1.0), (0.0, 1, -2.0)] {
        out.push(CaseRecord::from_report("oracle", incgamma_star_oracle(alpha, r, x, ORACLE_TOL)));
    }
    for r in 1..=2 {
        for m in 1..=2 {
            for x in [-0.5, -1.0] {
                out.push(CaseRecord::from_report(
                    "oracle",
                    incgamma_star_oracle(-(m as f64), r, x, ORACLE_TOL),
                ));
            }
        }
    }
    out
}

//! Lower incomplete gamma `γ(α, x)` for every real `α` and `x > 0`, and its
//! `α`-derivatives `γ^(r)(α, x)`.
//!
//! For `α <= 0` the defining integral diverges at the origin; the value used
//! here is its neutrix limit, the constant left after discarding the
//! negligible terms `ε^λ ln^r ε` (`λ < 0`) and `ln^r ε` from
//! `∫_ε^x u^{α-1} e^{-u} du`.

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, integrate_oriented, Evaluation, Method, QuadratureConfig};
use crate::summation::{exp_remainder_scaled, factorial, ln_pow, series_done, CompensatedSum};

/// Where a real `α` falls in the case analysis of the regularized functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArgClass {
    Positive(f64),
    Zero,
    NegativeNonInteger(f64),
    /// `α = -m` with `m >= 1`.
    NegativeInteger(u32),
}

/// Classify `alpha`, snapping values within `integer_tol` of a nonpositive
/// integer onto it.
pub fn classify(alpha: f64, integer_tol: f64) -> ArgClass {
    let nearest = alpha.round();
    if nearest <= 0.0 && (alpha - nearest).abs() <= integer_tol {
        if nearest == 0.0 {
            ArgClass::Zero
        } else {
            ArgClass::NegativeInteger((-nearest) as u32)
        }
    } else if alpha > 0.0 {
        ArgClass::Positive(alpha)
    } else {
        ArgClass::NegativeNonInteger(alpha)
    }
}

/// Evaluation settings shared by the incomplete gamma evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Relative size of the last retained series term.
    pub series_tol: f64,
    pub max_terms: usize,
    /// Above this `|x|` the alternating series are abandoned for quadrature.
    pub large_x_switch: f64,
    /// Snapping distance used by [`classify`].
    pub integer_tol: f64,
    /// Largest derivative order accepted.
    pub max_deriv_order: u32,
    pub quad: QuadratureConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            series_tol: 1e-16,
            max_terms: 1000,
            large_x_switch: 10.0,
            integer_tol: 1e-12,
            max_deriv_order: 6,
            quad: QuadratureConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0) {
            return domain("series_tol must be positive");
        }
        if self.max_terms < 8 {
            return domain("max_terms must be at least 8");
        }
        if !(self.large_x_switch > 1.0) {
            return domain("large_x_switch must exceed 1");
        }
        if !(0.0..=1e-9).contains(&self.integer_tol) {
            return domain("integer_tol must lie in [0, 1e-9]");
        }
        QuadratureConfig::new(self.quad.abs_tol, self.quad.rel_tol, self.quad.max_subdivisions)?;
        Ok(())
    }

    pub fn with_series_tol(mut self, tol: f64) -> Self {
        self.series_tol = tol;
        self
    }

    pub fn with_max_deriv_order(mut self, order: u32) -> Self {
        self.max_deriv_order = order;
        self
    }

    pub(crate) fn check_deriv_order(&self, r: u32) -> Result<()> {
        if r > self.max_deriv_order {
            return domain(format!(
                "derivative order {r} exceeds the configured maximum {}",
                self.max_deriv_order
            ));
        }
        Ok(())
    }
}

/// Sum `term(k)` for `k = 0, 1, ...` under the crate-wide truncation rule.
/// `term` returns `None` for skipped indices.
pub(crate) fn sum_series(
    what: &'static str,
    scale: f64,
    cfg: &EvalConfig,
    mut term: impl FnMut(usize) -> Option<f64>,
) -> Result<(CompensatedSum, f64, usize)> {
    let mut s = CompensatedSum::new();
    for k in 0..cfg.max_terms {
        let Some(t) = term(k) else { continue };
        s.add(t);
        if series_done(k, scale, t, s.value(), cfg.series_tol) {
            return Ok((s, t.abs(), k + 1));
        }
    }
    Err(Error::ConvergenceFailure {
        what,
        err_est: f64::NAN,
        work: cfg.max_terms,
    })
}

fn series_eval(prefactor: f64, s: &CompensatedSum, last: f64, terms: usize, extra: f64) -> Evaluation {
    let value = prefactor * s.value() + extra;
    let err = prefactor.abs() * (last + s.rounding_bound()) + 2.0 * f64::EPSILON * extra.abs();
    Evaluation::new(value, err, Method::Series, terms)
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("incomplete gamma requires finite x > 0, got {x}"));
    }
    Ok(())
}

fn check_non_pole(alpha: f64, cfg: &EvalConfig) -> Result<()> {
    match classify(alpha, cfg.integer_tol) {
        ArgClass::Zero | ArgClass::NegativeInteger(_) => domain(format!(
            "alpha = {alpha} is a nonpositive integer; use the integer-order evaluator"
        )),
        _ => Ok(()),
    }
}

/// `γ(α, x)` by its neutrix definition, dispatching on the class of `α`.
pub fn lower_gamma(alpha: f64, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    if !alpha.is_finite() {
        return domain("alpha must be finite");
    }
    match classify(alpha, cfg.integer_tol) {
        ArgClass::Positive(a) | ArgClass::NegativeNonInteger(a) => {
            if x <= cfg.large_x_switch {
                series_generic(a, x, cfg)
            } else {
                regularized_integral(a, x, cfg)
            }
        }
        ArgClass::Zero => {
            if x <= cfg.large_x_switch {
                series_zero(x, cfg)
            } else {
                split_at_one(0, x, cfg)
            }
        }
        ArgClass::NegativeInteger(m) => {
            if x <= cfg.large_x_switch {
                series_neg_int(m, x, cfg)
            } else {
                split_at_one(m, x, cfg)
            }
        }
    }
}

/// `γ(-m, x) = γ(-m, 1) + ∫_1^x u^{-m-1} e^{-u} du`.
fn split_at_one(m: u32, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    let head = series_int_order(m, 1.0, cfg)?;
    let p = -(m as i32) - 1;
    let tail = integrate_oriented(|u: f64| u.powi(p) * (-u).exp(), 1.0, x, &cfg.quad)?;
    Ok(tail.plus(head).with_method(Method::RegularizedQuadrature))
}

/// `sum_k (-1)^k x^{α+k} / (k! (α+k))`, for `α` not a nonpositive integer.
pub fn series_generic(alpha: f64, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    check_non_pole(alpha, cfg)?;
    let mut p = 1.0;
    let (s, last, n) = sum_series("incomplete gamma series", x, cfg, |k| {
        if k > 0 {
            p *= -x / k as f64;
        }
        Some(p / (alpha + k as f64))
    })?;
    Ok(series_eval(x.powf(alpha), &s, last, n, 0.0))
}

/// `γ(0, x) = sum_{k>=1} (-x)^k / (k k!) + ln x`.
pub fn series_zero(x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    series_int_order(0, x, cfg)
}

/// `γ(-m, x) = sum_{k != m} (-1)^k x^{k-m} / (k! (k-m)) + (-1)^m ln x / m!`.
pub fn series_neg_int(m: u32, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    if m == 0 {
        return domain("series_neg_int requires m >= 1");
    }
    series_int_order(m, x, cfg)
}

fn series_int_order(m: u32, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    let mu = m as usize;
    let mut p = 1.0;
    let (s, last, n) = sum_series("integer-order incomplete gamma series", x, cfg, |k| {
        if k > 0 {
            p *= -x / k as f64;
        }
        (k != mu).then(|| p / (k as f64 - m as f64))
    })?;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let log_term = sign * x.ln() / factorial(mu);
    Ok(series_eval(x.powi(-(m as i32)), &s, last, n, log_term))
}

/// The `m` with `-m < α < -m + 1` (zero for `α > 0`).
pub(crate) fn regularization_order(alpha: f64) -> usize {
    if alpha > 0.0 {
        0
    } else {
        (-alpha).floor() as usize + 1
    }
}

/// Subtraction order actually used by the regularized integrals: the least
/// one, raised by one when `α + m < 1/2` so that the remaining `u^{α+m-1}`
/// singularity stays within reach of the quadrature. The extra subtracted
/// term has a positive power and changes nothing in the value.
pub(crate) fn quadrature_order(alpha: f64) -> usize {
    let m = regularization_order(alpha);
    if alpha + (m as f64) < 0.5 {
        m + 1
    } else {
        m
    }
}

/// `γ(α, x)` as the convergent integral of `u^{α-1}` times the order-`m`
/// Maclaurin remainder of `e^{-u}`, plus the integrated subtracted terms.
pub fn regularized_integral(alpha: f64, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    check_non_pole(alpha, cfg)?;
    let m = quadrature_order(alpha);
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let power = alpha + m as f64 - 1.0;
    // u^{α-1} (e^{-u} - P_m(-u)) = (-1)^m u^{α+m-1} S_m(-u)
    let body = integrate(
        |u: f64| sign * u.powf(power) * exp_remainder_scaled(-u, m),
        0.0,
        x,
        &cfg.quad,
    )?;
    let mut corr = CompensatedSum::new();
    let mut p = 1.0;
    for i in 0..m {
        if i > 0 {
            p *= -1.0 / i as f64;
        }
        corr.add(p * x.powf(alpha + i as f64) / (alpha + i as f64));
    }
    Ok(Evaluation::new(
        body.value + corr.value(),
        body.abs_err_est + corr.rounding_bound(),
        Method::RegularizedQuadrature,
        body.work,
    ))
}

/// Rising factorial `(α)_k = α (α+1) ... (α+k-1)`.
pub fn pochhammer(alpha: f64, k: usize) -> f64 {
    (0..k).map(|j| alpha + j as f64).product()
}

/// `γ(α, x)` recovered from `γ(α + steps, x)` by unwinding `γ(α+1, x) = α γ(α, x) - x^α e^{-x}`:
/// `γ(α, x) = γ(α+steps, x) / (α)_steps + e^{-x} sum_{k<steps} x^{α+k} / (α)_{k+1}`.
pub fn recurrence_shift(alpha: f64, x: f64, steps: u32, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    if steps == 0 {
        return domain("recurrence_shift requires steps >= 1");
    }
    let steps = steps as usize;
    for j in 0..steps {
        if (alpha + j as f64).abs() <= cfg.integer_tol.max(f64::MIN_POSITIVE) {
            return domain(format!("recurrence denominator alpha + {j} vanishes"));
        }
    }
    let top = series_generic(alpha + steps as f64, x, cfg)?;
    let poch = pochhammer(alpha, steps);
    let ex = (-x).exp();
    let mut s = CompensatedSum::new();
    let mut rising = 1.0;
    for k in 0..steps {
        rising *= alpha + k as f64;
        s.add(ex * x.powf(alpha + k as f64) / rising);
    }
    Ok(Evaluation::new(
        top.value / poch + s.value(),
        top.abs_err_est / poch.abs() + s.rounding_bound(),
        Method::Recurrence,
        top.work + steps,
    ))
}

/// `γ(-m, x) + γ(-m+1, x)/m - [(-1)^m/(m m!) - e^{-x} x^{-m}/m]`.
pub fn neg_int_identity_residual(m: u32, x: f64, cfg: &EvalConfig) -> Result<f64> {
    if m == 0 {
        return domain("identity requires m >= 1");
    }
    let mf = m as f64;
    let lhs = lower_gamma(-mf, x, cfg)?.value + lower_gamma(1.0 - mf, x, cfg)?.value / mf;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let rhs = sign / (mf * factorial(m as usize)) - (-x).exp() * x.powi(-(m as i32)) / mf;
    Ok(lhs - rhs)
}

/// The right-hand side `(-1)^m/(m m!) - e^{-x} x^{-m}/m` of the identity above.
pub fn neg_int_identity_rhs(m: u32, x: f64) -> f64 {
    let mf = m as f64;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign / (mf * factorial(m as usize)) - (-x).exp() * x.powi(-(m as i32)) / mf
}

/// Finite part of `∫_ε^x u^{β-1} ln^r u du` divided by `x^β`, for `β != 0`.
pub(crate) fn log_moment_scaled(beta: f64, r: usize, l: f64) -> f64 {
    let rf = factorial(r);
    let mut g = 0.0;
    for i in 0..r {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        g += sign * rf * ln_pow(l, r - i) / (factorial(r - i) * beta.powi(i as i32 + 1));
    }
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    g + sign * rf / beta.powi(r as i32 + 1)
}

/// `γ^(r)(α, x)` for `α` not a nonpositive integer, by the term-wise finite
/// parts of `(-1)^k/k! ∫ u^{α+k-1} ln^r u du`.
pub fn deriv_series_generic(alpha: f64, x: f64, r: u32, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    check_non_pole(alpha, cfg)?;
    if r == 0 {
        return domain("derivative order must be >= 1");
    }
    cfg.check_deriv_order(r)?;
    let l = x.ln();
    let mut p = 1.0;
    let (s, last, n) = sum_series("incomplete gamma derivative series", x, cfg, |k| {
        if k > 0 {
            p *= -x / k as f64;
        }
        Some(p * log_moment_scaled(alpha + k as f64, r as usize, l))
    })?;
    Ok(series_eval(x.powf(alpha), &s, last, n, 0.0))
}

/// `γ^(r)(-m, x)`: the `k != m` terms as in the generic series with
/// `α + k = k - m`, plus `(-1)^m ln^{r+1} x / ((r+1) m!)` from `k = m`.
pub fn deriv_series_neg_int(m: u32, x: f64, r: u32, cfg: &EvalConfig) -> Result<Evaluation> {
    if m == 0 {
        return domain("deriv_series_neg_int requires m >= 1");
    }
    deriv_series_int_order(m, x, r, cfg)
}

fn deriv_series_int_order(m: u32, x: f64, r: u32, cfg: &EvalConfig) -> Result<Evaluation> {
    check_x(x)?;
    if r == 0 {
        return domain("derivative order must be >= 1");
    }
    cfg.check_deriv_order(r)?;
    let (mu, ru) = (m as usize, r as usize);
    let l = x.ln();
    let mut p = 1.0;
    let (s, last, n) = sum_series("integer-order derivative series", x, cfg, |k| {
        if k > 0 {
            p *= -x / k as f64;
        }
        (k != mu).then(|| p * log_moment_scaled(k as f64 - m as f64, ru, l))
    })?;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let log_term = sign * ln_pow(l, ru + 1) / ((ru + 1) as f64 * factorial(mu));
    Ok(series_eval(x.powi(-(m as i32)), &s, last, n, log_term))
}

/// `γ^(r)(α, x)` for any real `α`; `r = 0` is [`lower_gamma`].
///
/// Above the large-argument switch the value is split as
/// `γ^(r)(α, 1) + ∫_1^x u^{α-1} ln^r u e^{-u} du`.
pub fn lower_gamma_deriv(alpha: f64, x: f64, r: u32, cfg: &EvalConfig) -> Result<Evaluation> {
    if r == 0 {
        return lower_gamma(alpha, x, cfg);
    }
    check_x(x)?;
    cfg.check_deriv_order(r)?;
    let class = classify(alpha, cfg.integer_tol);
    let at = |x: f64| match class {
        ArgClass::Positive(a) | ArgClass::NegativeNonInteger(a) => deriv_series_generic(a, x, r, cfg),
        ArgClass::Zero => deriv_series_int_order(0, x, r, cfg),
        ArgClass::NegativeInteger(m) => deriv_series_int_order(m, x, r, cfg),
    };
    if x <= cfg.large_x_switch {
        return at(x);
    }
    let a = match class {
        ArgClass::Positive(a) | ArgClass::NegativeNonInteger(a) => a,
        ArgClass::Zero => 0.0,
        ArgClass::NegativeInteger(m) => -(m as f64),
    };
    let head = at(1.0)?;
    let tail = integrate_oriented(
        |u: f64| u.powf(a - 1.0) * ln_pow(u.ln(), r as usize) * (-u).exp(),
        1.0,
        x,
        &cfg.quad,
    )?;
    Ok(tail.plus(head).with_method(Method::RegularizedQuadrature))
}

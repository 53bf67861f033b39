//! The incomplete-gamma-type function on the negative axis,
//! `γ*(α, x₋) = ∫_0^{-x₋} |u|^{α-1} e^{-u} du` for `x < 0`, extended to every
//! real `α` by the neutrix limit of `∫_{-ε}^{-x₋}`, together with its
//! `α`-derivatives.
//!
//! All integrals are evaluated after the substitution `v = -u`, so that
//! `γ*(α, x₋) = -∫_0^{x₋} v^{α-1} e^{v} dv` (regularized at `v = 0`).
//!
//! The recurrence carries `e^{x₋}` (not `e^{-x₋}`), and the subtracted
//! terms of the regularized integral have denominators `(α+i) i!`. For `α = -m` the power terms
//! `x₋^{i-m}/((m-i) i!)` enter with a plus sign, consistent with the
//! split form whose constant is `+sum_{i<m} 1/((m-i) i!)`.

use crate::error::{domain, Result};
use crate::incgamma::{classify, log_moment_scaled, quadrature_order, sum_series, ArgClass, EvalConfig};
use crate::quadrature::{integrate, integrate_oriented, power_log_finite_part, Evaluation, Method};
use crate::summation::{exp_remainder_scaled, factorial, ln_pow, CompensatedSum};

/// A strictly negative argument `x` together with `x₋ = -x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeArgument {
    x: f64,
    x_minus: f64,
}

impl NegativeArgument {
    pub fn new(x: f64) -> Result<Self> {
        if !(x < 0.0) || !x.is_finite() {
            return domain(format!("gamma_star requires a finite x < 0, got {x}"));
        }
        Ok(Self { x, x_minus: -x })
    }

    /// Build from `x₋ > 0`.
    pub fn from_minus(x_minus: f64) -> Result<Self> {
        Self::new(-x_minus)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn x_minus(&self) -> f64 {
        self.x_minus
    }
}

fn series_eval(prefactor: f64, s: &CompensatedSum, last: f64, n: usize, extra: f64) -> Evaluation {
    let value = prefactor * s.value() + extra;
    let err = prefactor.abs() * (last + s.rounding_bound()) + 2.0 * f64::EPSILON * extra.abs();
    Evaluation::new(value, err, Method::Series, n)
}

/// `γ*(α, x₋)` for any real `α`.
pub fn gamma_star(alpha: f64, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    if !alpha.is_finite() {
        return domain("alpha must be finite");
    }
    let small = arg.x_minus <= cfg.large_x_switch;
    match classify(alpha, cfg.integer_tol) {
        ArgClass::Positive(a) | ArgClass::NegativeNonInteger(a) => {
            if small {
                star_series_generic(a, arg, cfg)
            } else {
                star_regularized(a, arg, cfg)
            }
        }
        ArgClass::Zero => {
            if small {
                star_series_zero(arg, cfg)
            } else {
                star_int_order_regularized(0, arg, cfg)
            }
        }
        ArgClass::NegativeInteger(m) => {
            if small {
                star_series_neg_int(m, arg, cfg)
            } else {
                star_int_order_regularized(m, arg, cfg)
            }
        }
    }
}

/// `-sum_k x₋^{α+k} / ((α+k) k!)`.
pub fn star_series_generic(alpha: f64, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    if matches!(classify(alpha, cfg.integer_tol), ArgClass::Zero | ArgClass::NegativeInteger(_)) {
        return domain(format!("alpha = {alpha} is a nonpositive integer"));
    }
    let xm = arg.x_minus;
    let mut p = 1.0;
    let (s, last, n) = sum_series("gamma_star series", xm, cfg, |k| {
        if k > 0 {
            p *= xm / k as f64;
        }
        Some(p / (alpha + k as f64))
    })?;
    Ok(series_eval(-xm.powf(alpha), &s, last, n, 0.0))
}

/// `γ*(0, x₋) = -sum_{k>=1} x₋^k / (k k!) - ln x₋`.
pub fn star_series_zero(arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    star_series_int_order(0, arg, cfg)
}

/// `γ*(-m, x₋) = sum_{k != m} x₋^{k-m} / ((m-k) k!) - ln x₋ / m!`.
pub fn star_series_neg_int(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    if m == 0 {
        return domain("star_series_neg_int requires m >= 1");
    }
    star_series_int_order(m, arg, cfg)
}

fn star_series_int_order(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    let xm = arg.x_minus;
    let mu = m as usize;
    let mut p = 1.0;
    let (s, last, n) = sum_series("integer-order gamma_star series", xm, cfg, |k| {
        if k > 0 {
            p *= xm / k as f64;
        }
        (k != mu).then(|| p / (m as f64 - k as f64))
    })?;
    let log_term = -xm.ln() / factorial(mu);
    Ok(series_eval(xm.powi(-(m as i32)), &s, last, n, log_term))
}

/// `-∫_0^{x₋} v^{α-1} [e^v - sum_{i<m} v^i/i!] dv - sum_{i<m} x₋^{α+i} / ((α+i) i!)`
/// with `m` the subtraction order (one more than needed when `α` lies just
/// above an integer).
pub fn star_regularized(alpha: f64, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    if matches!(classify(alpha, cfg.integer_tol), ArgClass::Zero | ArgClass::NegativeInteger(_)) {
        return domain(format!("alpha = {alpha} is a nonpositive integer"));
    }
    let xm = arg.x_minus;
    let m = quadrature_order(alpha);
    let power = alpha + m as f64 - 1.0;
    let body = integrate(|v: f64| v.powf(power) * exp_remainder_scaled(v, m), 0.0, xm, &cfg.quad)?;
    let mut corr = CompensatedSum::new();
    for i in 0..m {
        corr.add(-xm.powf(alpha + i as f64) / ((alpha + i as f64) * factorial(i)));
    }
    Ok(Evaluation::new(
        corr.value() - body.value,
        body.abs_err_est + corr.rounding_bound(),
        Method::RegularizedQuadrature,
        body.work,
    ))
}

/// `γ*(-m, x₋)` by regularized quadrature; the split at `x₋ = 1` is used
/// when `x₋ > 1`.
pub fn star_neg_int_regularized(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    if m == 0 {
        return domain("star_neg_int_regularized requires m >= 1");
    }
    star_int_order_regularized(m, arg, cfg)
}

fn star_int_order_regularized(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    if arg.x_minus > 1.0 {
        star_int_order_split(m, arg, cfg)
    } else {
        star_int_order_direct(m, arg, cfg)
    }
}

/// Direct form:
/// `-∫_0^{x₋} v^{-m-1} [e^v - sum_{i<=m} v^i/i!] dv + sum_{i<m} x₋^{i-m} / ((m-i) i!) - ln x₋ / m!`.
pub fn star_neg_int_direct(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    star_int_order_direct(m, arg, cfg)
}

fn star_int_order_direct(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    let xm = arg.x_minus;
    let mu = m as usize;
    // v^{-m-1} (e^v - P_{m+1}(v)) = S_{m+1}(v), smooth at 0
    let body = integrate(|v: f64| exp_remainder_scaled(v, mu + 1), 0.0, xm, &cfg.quad)?;
    let mut corr = CompensatedSum::new();
    for i in 0..mu {
        corr.add(xm.powi(i as i32 - m as i32) / ((mu - i) as f64 * factorial(i)));
    }
    corr.add(-xm.ln() / factorial(mu));
    Ok(Evaluation::new(
        corr.value() - body.value,
        body.abs_err_est + corr.rounding_bound(),
        Method::RegularizedQuadrature,
        body.work,
    ))
}

/// Split form:
/// `-∫_1^{x₋} v^{-m-1} e^v dv - ∫_0^1 v^{-m-1} [e^v - sum_{i<=m} v^i/i!] dv + sum_{i<m} 1/((m-i) i!)`.
pub fn star_neg_int_split(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    star_int_order_split(m, arg, cfg)
}

fn star_int_order_split(m: u32, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    let xm = arg.x_minus;
    let mu = m as usize;
    let p = -(m as i32) - 1;
    let outer = integrate_oriented(|v: f64| v.powi(p) * v.exp(), 1.0, xm, &cfg.quad)?;
    let inner = integrate(|v: f64| exp_remainder_scaled(v, mu + 1), 0.0, 1.0, &cfg.quad)?;
    let constant: f64 = (0..mu).map(|i| 1.0 / ((mu - i) as f64 * factorial(i))).sum();
    Ok(Evaluation::new(
        constant - outer.value - inner.value,
        outer.abs_err_est + inner.abs_err_est + 4.0 * f64::EPSILON * constant,
        Method::RegularizedQuadrature,
        outer.work + inner.work,
    ))
}

/// One upward step `γ*(α+1, x₋) = -α γ*(α, x₋) - x₋^α e^{x₋}` applied to a known value.
pub fn star_step_up(alpha: f64, value: f64, x_minus: f64) -> f64 {
    -alpha * value - x_minus.powf(alpha) * x_minus.exp()
}

/// `γ*(α+1, x₋)` computed from `γ*(α, x₋)` by the recurrence.
pub fn star_recurrence(alpha: f64, arg: NegativeArgument, cfg: &EvalConfig) -> Result<Evaluation> {
    if matches!(classify(alpha, cfg.integer_tol), ArgClass::Zero) {
        return domain("star_recurrence is undefined at alpha = 0");
    }
    let base = gamma_star(alpha, arg, cfg)?;
    let xm = arg.x_minus;
    let value = star_step_up(alpha, base.value, xm);
    let err = alpha.abs() * base.abs_err_est + 4.0 * f64::EPSILON * value.abs();
    Ok(Evaluation::new(value, err, Method::Recurrence, base.work + 1))
}

/// `γ*^(r)(α, x₋)` for any real `α` and `r >= 1`, from the convergent
/// regularized integrals:
///
/// * `α = 0`: `-∫_1^{x₋} v^{-1} ln^r v e^v dv - ∫_0^1 v^{-1} ln^r v (e^v - 1) dv`;
/// * `α = -m`: the same with the order-`m` subtraction, plus
///   `sum_{i<m} r! (m-i)^{-r-1} / i!`;
/// * otherwise the `α`-derivative of the regularized form, whose subtracted
///   terms become finite parts of `∫ v^{α+i-1} ln^r v dv`.
pub fn star_deriv(alpha: f64, arg: NegativeArgument, r: u32, cfg: &EvalConfig) -> Result<Evaluation> {
    if r == 0 {
        return domain("derivative order must be >= 1");
    }
    cfg.check_deriv_order(r)?;
    let xm = arg.x_minus;
    let ru = r as usize;
    match classify(alpha, cfg.integer_tol) {
        ArgClass::Zero => star_deriv_int_order(0, xm, ru, cfg),
        ArgClass::NegativeInteger(m) => star_deriv_int_order(m as usize, xm, ru, cfg),
        ArgClass::Positive(a) | ArgClass::NegativeNonInteger(a) => {
            let m = quadrature_order(a);
            let power = a + m as f64 - 1.0;
            let body = integrate(
                |v: f64| v.powf(power) * ln_pow(v.ln(), ru) * exp_remainder_scaled(v, m),
                0.0,
                xm,
                &cfg.quad,
            )?;
            let mut corr = CompensatedSum::new();
            for i in 0..m {
                corr.add(-power_log_finite_part(a + i as f64 - 1.0, r, xm)? / factorial(i));
            }
            Ok(Evaluation::new(
                corr.value() - body.value,
                body.abs_err_est + corr.rounding_bound(),
                Method::RegularizedQuadrature,
                body.work,
            ))
        }
    }
}

fn star_deriv_int_order(m: usize, xm: f64, r: usize, cfg: &EvalConfig) -> Result<Evaluation> {
    let p = -(m as i32) - 1;
    let outer = integrate_oriented(|v: f64| v.powi(p) * ln_pow(v.ln(), r) * v.exp(), 1.0, xm, &cfg.quad)?;
    let inner = integrate(
        |v: f64| ln_pow(v.ln(), r) * exp_remainder_scaled(v, m + 1),
        0.0,
        1.0,
        &cfg.quad,
    )?;
    let rf = factorial(r);
    let constant: f64 = (0..m)
        .map(|i| rf * ((m - i) as f64).powi(-(r as i32) - 1) / factorial(i))
        .sum();
    Ok(Evaluation::new(
        constant - outer.value - inner.value,
        outer.abs_err_est + inner.abs_err_est + 4.0 * f64::EPSILON * constant,
        Method::RegularizedQuadrature,
        outer.work + inner.work,
    ))
}

/// `γ*^(r)(α, x₋)` by term-wise finite parts,
/// `-sum_k (1/k!) FP ∫_0^{x₋} v^{α+k-1} ln^r v dv`; the term with
/// `α + k = 0` contributes `-ln^{r+1} x₋ / ((r+1) k!)`.
pub fn star_deriv_series(alpha: f64, arg: NegativeArgument, r: u32, cfg: &EvalConfig) -> Result<Evaluation> {
    if r == 0 {
        return domain("derivative order must be >= 1");
    }
    cfg.check_deriv_order(r)?;
    let xm = arg.x_minus;
    let l = xm.ln();
    let ru = r as usize;
    let (a, pole) = match classify(alpha, cfg.integer_tol) {
        ArgClass::Zero => (0.0, Some(0usize)),
        ArgClass::NegativeInteger(m) => (-(m as f64), Some(m as usize)),
        ArgClass::Positive(a) | ArgClass::NegativeNonInteger(a) => (a, None),
    };
    let mut p = 1.0;
    let (s, last, n) = sum_series("gamma_star derivative series", xm, cfg, |k| {
        if k > 0 {
            p *= xm / k as f64;
        }
        (Some(k) != pole).then(|| p * log_moment_scaled(a + k as f64, ru, l))
    })?;
    let extra = match pole {
        Some(m) => -ln_pow(l, ru + 1) / ((ru + 1) as f64 * factorial(m)),
        None => 0.0,
    };
    Ok(series_eval(-xm.powf(a), &s, last, n, extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn arg(x: f64) -> NegativeArgument {
        NegativeArgument::new(x).unwrap()
    }

    #[test]
    fn argument_validation() {
        assert!(NegativeArgument::new(0.0).is_err());
        assert!(NegativeArgument::new(1.0).is_err());
        assert!(NegativeArgument::new(f64::NEG_INFINITY).is_err());
        let a = arg(-2.5);
        assert_eq!(a.x_minus(), 2.5);
        assert_eq!(a.x(), -2.5);
    }

    #[test]
    fn closed_forms_at_positive_integers() {
        let e = std::f64::consts::E;
        let g1 = gamma_star(1.0, arg(-1.0), &cfg()).unwrap().value;
        assert!((g1 - (1.0 - e)).abs() < 1e-15);
        let g2 = star_series_generic(2.0, arg(-1.0), &cfg()).unwrap().value;
        assert!((g2 + 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_star_zero_values() {
        for &(x, v, tol) in &[
            (-1.0 / 3.0, 0.735308, 5e-6),
            (-0.5, 0.122996, 5e-6),
            (-0.75, -0.630117, 5e-6),
            (-1.0, -1.3179, 1e-4),
        ] {
            let got = star_series_zero(arg(x), &cfg()).unwrap().value;
            assert!((got - v).abs() < tol, "x={x}: {got}");
        }
    }

    #[test]
    fn neg_int_series_reference() {
        // independent 50-term partial sum of 1 - sum_{k>=2} 1/((k-1) k!)
        let mut reference = 1.0;
        let mut fact = 1.0;
        for k in 1..50 {
            fact *= k as f64;
            if k >= 2 {
                reference -= 1.0 / ((k - 1) as f64 * fact);
            }
        }
        let got = star_series_neg_int(1, arg(-1.0), &cfg()).unwrap().value;
        assert!((got - reference).abs() < 1e-12);
        assert!((got - 0.4003797).abs() < 5e-7, "{got}");
    }

    #[test]
    fn regularized_agrees_with_series() {
        for &(a, x, tol) in &[(1.5, -1.0, 1e-10), (-0.5, -1.0, 1e-9), (-1.5, -2.0, 1e-8), (-0.5, -0.5, 1e-9)] {
            let s = star_series_generic(a, arg(x), &cfg()).unwrap().value;
            let q = star_regularized(a, arg(x), &cfg()).unwrap().value;
            assert!((s - q).abs() < tol, "a={a} x={x}: {s} {q}");
        }
    }

    #[test]
    fn neg_int_regularized_agrees_with_series() {
        for &(m, x, tol) in &[(1u32, -1.0, 1e-9), (1, -0.5, 1e-9), (3, -0.5, 1e-8), (2, -3.0, 1e-8)] {
            let s = star_series_neg_int(m, arg(x), &cfg()).unwrap().value;
            let q = star_neg_int_regularized(m, arg(x), &cfg()).unwrap().value;
            assert!((s - q).abs() < tol, "m={m} x={x}: {s} {q}");
        }
        let d = star_neg_int_direct(1, arg(-1.0), &cfg()).unwrap().value;
        let s = star_neg_int_split(1, arg(-1.0), &cfg()).unwrap().value;
        assert!((d - s).abs() < 1e-10);
    }

    #[test]
    fn recurrence_examples() {
        let c = cfg();
        let g2 = star_recurrence(1.0, arg(-1.0), &c).unwrap().value;
        assert!((g2 + 1.0).abs() < 1e-14);
        let up = star_recurrence(0.5, arg(-0.5), &c).unwrap().value;
        let direct = star_series_generic(1.5, arg(-0.5), &c).unwrap().value;
        assert!((up - direct).abs() < 1e-10);
        let up = star_recurrence(-0.5, arg(-1.0), &c).unwrap().value;
        let direct = star_series_generic(0.5, arg(-1.0), &c).unwrap().value;
        assert!((up - direct).abs() < 1e-9);
        assert!(star_recurrence(0.0, arg(-1.0), &c).is_err());
    }

    #[test]
    fn deriv_constant_term_at_m1_r1() {
        // the closed constant contributes exactly 1 at m = r = 1
        let c = cfg();
        let full = star_deriv(-1.0, arg(-1.0), 1, &c).unwrap().value;
        let inner = integrate(|v: f64| v.ln() * exp_remainder_scaled(v, 2), 0.0, 1.0, &c.quad).unwrap().value;
        assert!((full - (1.0 - inner)).abs() < 1e-12);
    }

    #[test]
    fn deriv_matches_alpha_finite_difference() {
        let c = cfg();
        let h = 1e-5;
        for &a in &[-0.5, 0.7, -1.3, 2.2] {
            let fd = (gamma_star(a + h, arg(-1.0), &c).unwrap().value - gamma_star(a - h, arg(-1.0), &c).unwrap().value)
                / (2.0 * h);
            let d = star_deriv(a, arg(-1.0), 1, &c).unwrap().value;
            assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0), "a={a}: fd {fd} vs {d}");
        }
    }

    #[test]
    fn deriv_series_and_integrals_agree() {
        let c = cfg();
        for &a in &[0.0, -1.0, -2.0, -0.5, 1.5, -2.25] {
            for &x in &[-0.5, -1.0, -2.0] {
                for r in 1..=3 {
                    let q = star_deriv(a, arg(x), r, &c).unwrap().value;
                    let s = star_deriv_series(a, arg(x), r, &c).unwrap().value;
                    assert!((q - s).abs() < 1e-8 * q.abs().max(1.0), "a={a} x={x} r={r}: {q} {s}");
                }
            }
        }
    }

    #[test]
    fn large_argument_switch_is_continuous() {
        let c = cfg();
        for &a in &[0.0, -2.0, -0.5, 1.5] {
            let x = -c.large_x_switch;
            let below = gamma_star(a, arg(x), &c).unwrap().value;
            let above = gamma_star(a, arg(x * (1.0 + 1e-12)), &c).unwrap().value;
            assert!((below - above).abs() < 1e-9 * below.abs().max(1.0), "a={a}: {below} {above}");
        }
    }
}

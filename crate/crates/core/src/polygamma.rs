//! Digamma and polygamma functions on the whole real line.
//!
//! For `x > 0` these are the classical functions. Negative non-integers are
//! reached through the recurrence `ψ^(n)(x+1) = ψ^(n)(x) + (-1)^n n!/x^{n+1}`;
//! at the nonpositive integers the value is the neutrix limit of
//! `-∫_ε^1 t^{x-1} ln^n t / (1-t) dt`, which has the closed forms
//! `ψ(-m) = -γ + H_m` and
//! `ψ^(n)(-m) = sum_{i=1}^m n!/i^{n+1} + (-1)^{n+1} n! ζ(n+1)`.

use std::sync::OnceLock;

use crate::error::{domain, Error, Result};
use crate::incgamma::{classify, regularization_order, ArgClass, EvalConfig};
use crate::quadrature::{integrate, power_log_finite_part, Evaluation, Method};
use crate::summation::{factorial, ln_pow, CompensatedSum};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const ZETA_CACHE_MAX: usize = 64;

/// Constants used by the polygamma closed forms.
#[derive(Debug, Clone)]
pub struct MathConstants {
    pub euler_gamma: f64,
    /// `zeta_cache[s - 2] = ζ(s)` for `2 <= s <= 64`.
    zeta_cache: Vec<f64>,
}

impl MathConstants {
    /// Process-wide instance; the ζ table is filled on first use and never
    /// mutated afterwards.
    pub fn global() -> &'static MathConstants {
        static CONSTANTS: OnceLock<MathConstants> = OnceLock::new();
        CONSTANTS.get_or_init(|| MathConstants {
            euler_gamma: EULER_GAMMA,
            zeta_cache: (2..=ZETA_CACHE_MAX as u32)
                .map(|s| if s < 20 { zeta_eta_accelerated(s) } else { zeta_direct_large(s) })
                .collect(),
        })
    }

    pub fn zeta(&self, s: u32) -> Result<f64> {
        match s {
            0 | 1 => domain(format!("zeta_int requires s >= 2, got {s}")),
            s if (s as usize) <= ZETA_CACHE_MAX => Ok(self.zeta_cache[s as usize - 2]),
            // 2^{-s} already sits below half an ulp of 1
            _ => Ok(1.0),
        }
    }
}

/// `ζ(s) = η(s) / (1 - 2^{1-s})` with the alternating series for `η`
/// accelerated by Chebyshev-weighted partial sums (Cohen, Rodriguez
/// Villegas and Zagier). The error after `n` terms is about `5.8^{-n}`.
fn zeta_eta_accelerated(s: u32) -> f64 {
    const N: i32 = 26;
    let mut d = (3.0 + 8f64.sqrt()).powi(N);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut sum = CompensatedSum::new();
    for k in 0..N {
        c = b - c;
        sum.add(c * ((k + 1) as f64).powi(-(s as i32)));
        let kf = k as f64;
        b *= (kf + N as f64) * (kf - N as f64) / ((kf + 0.5) * (kf + 1.0));
    }
    let eta = sum.value() / d;
    eta / (1.0 - 2f64.powi(1 - s as i32))
}

/// `1 + sum_{k>=2} k^{-s}`, summed smallest-first; for `s >= 20` eight
/// terms leave a tail below `1e-18`.
fn zeta_direct_large(s: u32) -> f64 {
    let tail: f64 = (2..=9).rev().map(|k| (k as f64).powi(-(s as i32))).sum();
    1.0 + tail
}

/// `ζ(s)` for integer `s >= 2`.
pub fn zeta_int(s: u32) -> Result<f64> {
    MathConstants::global().zeta(s)
}

/// Harmonic number `H_m = sum_{i=1}^m 1/i`.
pub fn harmonic(m: u32) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).collect::<CompensatedSum>().value()
}

// B_2, B_4, ..., B_30
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// `ψ^(n)(x)` for `x > 0`: shift upward with the recurrence until the
/// argument is large, then close with the Euler-Maclaurin asymptotic series.
pub fn polygamma_positive(n: u32, x: f64) -> Result<Evaluation> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("polygamma_positive requires finite x > 0, got {x}"));
    }
    let nu = n as usize;
    let threshold = 10.0 + n as f64;
    let mut shifted = CompensatedSum::new();
    let mut y = x;
    let mut shifts = 0usize;
    while y < threshold {
        shifted.add(y.powi(-(n as i32) - 1));
        y += 1.0;
        shifts += 1;
    }

    let mut asym = CompensatedSum::new();
    let mut last = f64::INFINITY;
    let mut used = 0usize;
    if n == 0 {
        asym.add(y.ln());
        asym.add(-0.5 / y);
    } else {
        asym.add(factorial(nu - 1) / y.powi(n as i32));
        asym.add(factorial(nu) / (2.0 * y.powi(n as i32 + 1)));
    }
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let k2 = 2 * (k + 1);
        let t = if n == 0 {
            -b / (k2 as f64 * y.powi(k2 as i32))
        } else {
            b * factorial(k2 + nu - 1) / (factorial(k2) * y.powi((k2 + nu) as i32))
        };
        if t.abs() >= last {
            break; // the asymptotic series has started to diverge
        }
        asym.add(t);
        last = t.abs();
        used += 1;
        if last <= 1e-17 * asym.value().abs() {
            break;
        }
    }
    let scale = if n == 0 {
        -1.0
    } else {
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        sign * factorial(nu)
    };
    let tail_sign = if n == 0 { 1.0 } else { scale / factorial(nu) };
    let value = tail_sign * asym.value() + scale * shifted.value();
    let err = last + asym.rounding_bound() + factorial(nu) * shifted.rounding_bound();
    if !(err <= 1e-12 * value.abs().max(1.0)) {
        return Err(Error::ConvergenceFailure {
            what: "polygamma asymptotic tail",
            err_est: err,
            work: shifts + used,
        });
    }
    Ok(Evaluation::new(value, err, Method::Series, shifts + used))
}

/// `ψ(-m) = -γ + H_m`.
pub fn psi_neg_int(m: u32) -> f64 {
    -EULER_GAMMA + harmonic(m)
}

/// `ψ^(n)(-m) = sum_{i=1}^m n!/i^{n+1} + (-1)^{n+1} n! ζ(n+1)` for `n >= 1`.
pub fn polygamma_neg_int(n: u32, m: u32) -> Result<f64> {
    if n == 0 {
        return domain("polygamma_neg_int requires n >= 1 (use psi_neg_int for n = 0)");
    }
    let nf = factorial(n as usize);
    let mut s: CompensatedSum = (1..=m).map(|i| nf / (i as f64).powi(n as i32 + 1)).collect();
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    s.add(sign * nf * zeta_int(n + 1)?);
    Ok(s.value())
}

/// `ψ^(n)(x)` for every real `x`.
pub fn polygamma_any(n: u32, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    if !x.is_finite() {
        return domain("polygamma requires finite x");
    }
    match classify(x, cfg.integer_tol) {
        ArgClass::Positive(x) => polygamma_positive(n, x),
        ArgClass::Zero => neg_int_value(n, 0),
        ArgClass::NegativeInteger(m) => neg_int_value(n, m),
        ArgClass::NegativeNonInteger(x) => {
            let m = regularization_order(x);
            let base = polygamma_positive(n, x + m as f64)?;
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            let nf = factorial(n as usize);
            let corr: CompensatedSum = (0..m).map(|k| sign * nf / (x + k as f64).powi(n as i32 + 1)).collect();
            Ok(Evaluation::new(
                base.value - corr.value(),
                base.abs_err_est + corr.rounding_bound(),
                Method::Recurrence,
                base.work + m,
            ))
        }
    }
}

fn neg_int_value(n: u32, m: u32) -> Result<Evaluation> {
    let v = if n == 0 { psi_neg_int(m) } else { polygamma_neg_int(n, m)? };
    Ok(Evaluation::closed_form(v))
}

/// `ψ^(n)(x)` from the regularized integral representation.
///
/// With `r` the least nonnegative integer such that `x + r > 0`, the kernel
/// `1/(1-t)` is split as `sum_{i<r} t^i + t^r/(1-t)`. The remainder gives a
/// convergent integral; each monomial contributes the finite part of
/// `∫_0^1 t^{x+i-1} ln^n t dt`, i.e. `(-1)^n n!/(x+i)^{n+1}`, or `0` when
/// `x + i = 0`. For `n = 0` the numerator `1 - t^{x-1}` is used, with the
/// Euler-Mascheroni constant added back.
pub fn polygamma_neutrix_integral(n: u32, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
    if !x.is_finite() {
        return domain("polygamma requires finite x");
    }
    let x = match classify(x, cfg.integer_tol) {
        ArgClass::Zero => 0.0,
        ArgClass::NegativeInteger(m) => -(m as f64),
        ArgClass::Positive(x) | ArgClass::NegativeNonInteger(x) => x,
    };
    let r = if x > 0.0 { 0 } else { (-x).floor() as usize + 1 };
    let c = x + r as f64 - 1.0;
    let nu = n as usize;

    // split at 1/2; the upper half is integrated in w = 1 - t. On the lower
    // half the t^c term is integrated exactly, leaving t^{c+1}, which stays
    // resolvable as x + r -> 0.
    let head = power_log_finite_part(c, n, 0.5)?;
    let head = Evaluation::new(head, 8.0 * f64::EPSILON * head.abs(), Method::ClosedForm, 1);
    let (lower, upper) = if n == 0 {
        let lower = integrate(|t: f64| (1.0 - t.powf(c + 1.0)) / (1.0 - t), 0.0, 0.5, &cfg.quad)?.plus(head.scaled(-1.0));
        let upper = integrate(|w: f64| -(c * (-w).ln_1p()).exp_m1() / w, 0.0, 0.5, &cfg.quad)?;
        (lower, upper)
    } else {
        let lower = integrate(|t: f64| t.powf(c + 1.0) * ln_pow(t.ln(), nu) / (1.0 - t), 0.0, 0.5, &cfg.quad)?.plus(head);
        let upper = integrate(
            |w: f64| {
                let l = (-w).ln_1p();
                (c * l).exp() * ln_pow(l, nu) / w
            },
            0.0,
            0.5,
            &cfg.quad,
        )?;
        (lower, upper)
    };

    let nf = factorial(nu);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let finite_parts: CompensatedSum = (0..r)
        .map(|i| x + i as f64)
        .filter(|&b| b != 0.0)
        .map(|b| if n == 0 { 1.0 / b } else { sign * nf / b.powi(n as i32 + 1) })
        .collect();
    let integral = lower.value + upper.value;
    let value = if n == 0 {
        -EULER_GAMMA + integral - finite_parts.value()
    } else {
        -(integral + finite_parts.value())
    };
    Ok(Evaluation::new(
        value,
        lower.abs_err_est + upper.abs_err_est + finite_parts.rounding_bound(),
        Method::RegularizedQuadrature,
        lower.work + upper.work,
    ))
}

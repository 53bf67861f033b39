//! Adaptive quadrature for integrands with integrable endpoint singularities,
//! plus the closed-form antiderivatives and finite parts that the regularized
//! evaluators are built from.
//!
//! The interval is mapped onto the real line with the double-exponential
//! substitution `u = a + (b - a) (1 + tanh(pi/2 sinh t)) / 2`, which turns an
//! endpoint behaviour like `|u - a|^beta` (`beta > -1`) into a doubly
//! exponentially decaying integrand in `t`. The transformed integrand is then
//! integrated on a truncated `t` range by adaptive bisection with a 7/15-point
//! Gauss-Kronrod pair; the per-panel error estimate is the difference between
//! the two nested rules.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::summation::{factorial, ln_pow, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1 {
            return domain("quadrature tolerances must be positive and max_subdivisions >= 1");
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Same configuration with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    RegularizedQuadrature,
    Recurrence,
    ClosedForm,
    NeutrixFit,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::RegularizedQuadrature => "regularized_quadrature",
            Method::Recurrence => "recurrence",
            Method::ClosedForm => "closed_form",
            Method::NeutrixFit => "neutrix_fit",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A computed value with its error estimate and provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub abs_err_est: f64,
    pub method: Method,
    /// Terms summed or panels used.
    pub work: usize,
}

impl Evaluation {
    pub fn new(value: f64, abs_err_est: f64, method: Method, work: usize) -> Self {
        debug_assert!(abs_err_est >= 0.0);
        Self {
            value,
            abs_err_est: abs_err_est.abs(),
            method,
            work,
        }
    }

    pub(crate) fn closed_form(value: f64) -> Self {
        Self::new(value, 4.0 * f64::EPSILON * value.abs(), Method::ClosedForm, 1)
    }

    /// Combine two evaluations additively; the method of `self` is kept.
    pub(crate) fn plus(self, other: Evaluation) -> Self {
        Self::new(
            self.value + other.value,
            self.abs_err_est + other.abs_err_est,
            self.method,
            self.work + other.work,
        )
    }

    pub(crate) fn scaled(self, factor: f64) -> Self {
        Self::new(
            self.value * factor,
            self.abs_err_est * factor.abs(),
            self.method,
            self.work,
        )
    }

    pub(crate) fn with_method(self, method: Method) -> Self {
        Self { method, ..self }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Half-width of the truncated `t` range; at `|t| = T_MAX` the distance to the
/// endpoint is about `e^{-680}` of the interval length.
const T_MAX: f64 = 6.07;
const INITIAL_PANELS: usize = 12;

struct Transformed<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    a: f64,
    b: f64,
}

impl<F: Fn(f64) -> f64> Transformed<'_, F> {
    /// Value of the transformed integrand at `t`.
    fn eval(&self, t: f64) -> Result<f64> {
        let s = FRAC_PI_2 * t.sinh();
        let q = (-2.0 * s.abs()).exp();
        let width = self.b - self.a;
        // distance to the nearer endpoint, in units of the interval length
        let d = q / (1.0 + q);
        let weight = width * FRAC_PI_2 * t.cosh() * 2.0 * q / ((1.0 + q) * (1.0 + q));
        if weight == 0.0 || d == 0.0 {
            return Ok(0.0);
        }
        let u = if s < 0.0 {
            self.a + width * d
        } else {
            self.b - width * d
        };
        if u <= self.a || u >= self.b {
            // the node rounds onto an endpoint; its weight is negligible
            return Ok(0.0);
        }
        let v = (self.f)(u) * weight;
        if v.is_finite() {
            Ok(v)
        } else {
            domain(format!("integrand is not finite at u = {u:e}"))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    resabs: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(g: &Transformed<'_, F>, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g.eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = (fc * WGK[7]).abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g.eval(center - dx)?;
        let f2 = g.eval(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    let roundoff = 50.0 * f64::EPSILON * resabs;
    if err < roundoff {
        err = roundoff;
    }
    Ok(Panel {
        lo,
        hi,
        value,
        err,
        resabs,
    })
}

/// Integrate `f` over `(a, b)`.
///
/// `f` is never evaluated at the endpoints, so integrable endpoint
/// singularities are allowed. Nodes cluster doubly exponentially at both ends;
/// a singular endpoint at `0` is resolved down to subnormal distances.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Evaluation> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return domain(format!("integration requires finite a < b, got a = {a}, b = {b}"));
    }
    let g = Transformed { f: &f, a, b };
    // A non-integrable endpoint leaves the transformed integrand non-negligible
    // at the truncation point.
    let edge = g.eval(-T_MAX)?.abs().max(g.eval(T_MAX)?.abs());
    if edge > cfg.abs_tol * 1e-3 {
        return Err(Error::ConvergenceFailure {
            what: "adaptive quadrature (endpoint singularity too strong)",
            err_est: edge,
            work: 0,
        });
    }
    let step = 2.0 * T_MAX / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS + cfg.max_subdivisions);
    for i in 0..INITIAL_PANELS {
        let lo = -T_MAX + step * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { T_MAX } else { lo + step };
        panels.push(gauss_kronrod(&g, lo, hi)?);
    }

    let mut subdivisions = 0usize;
    loop {
        let value: CompensatedSum = panels.iter().map(|p| p.value).collect();
        let value = value.value();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        let roundoff_floor: f64 = panels.iter().map(|p| 50.0 * f64::EPSILON * p.resabs).sum();
        if err <= tol || err <= roundoff_floor * 1.000001 {
            return Ok(Evaluation::new(value, err, Method::RegularizedQuadrature, panels.len()));
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::ConvergenceFailure {
                what: "adaptive quadrature",
                err_est: err,
                work: panels.len(),
            });
        }
        // bisect the worst panel that can still be split
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.err > 50.0 * f64::EPSILON * p.resabs && (p.hi - p.lo) > 1e-12)
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(Error::ConvergenceFailure {
                what: "adaptive quadrature",
                err_est: err,
                work: panels.len(),
            });
        };
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.lo + p.hi);
        panels.push(gauss_kronrod(&g, p.lo, mid)?);
        panels.push(gauss_kronrod(&g, mid, p.hi)?);
        subdivisions += 1;
    }
}

/// Integrate over `(a, b)` in either orientation, with `∫_a^b = -∫_b^a`.
pub(crate) fn integrate_oriented<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    if a == b {
        return Ok(Evaluation::new(0.0, 0.0, Method::RegularizedQuadrature, 0));
    }
    if a < b {
        integrate(f, a, b, cfg)
    } else {
        Ok(integrate(f, b, a, cfg)?.scaled(-1.0))
    }
}

/// Antiderivative of `ln^r |u|`:
/// `sum_{i<r} (-1)^i r!/(r-i)! u ln^{r-i}|u| + (-1)^r r! u`.
pub fn log_power_antiderivative(u: f64, r: u32) -> Result<f64> {
    if u == 0.0 {
        return domain("log_power_antiderivative requires u != 0");
    }
    if r == 0 {
        return domain("log_power_antiderivative requires r >= 1");
    }
    let r = r as usize;
    let l = u.abs().ln();
    let rf = factorial(r);
    let mut s = CompensatedSum::new();
    for i in 0..r {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        s.add(sign * rf / factorial(r - i) * u * ln_pow(l, r - i));
    }
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    s.add(sign * rf * u);
    Ok(s.value())
}

/// Antiderivative of `u^{-s-1} ln^r |u|`:
/// `-sum_{i<r} r!/(r-i)! s^{-i-1} u^{-s} ln^{r-i}|u| - r! s^{-r-1} u^{-s}`.
pub fn power_log_antiderivative(u: f64, s: u32, r: u32) -> Result<f64> {
    if u == 0.0 {
        return domain("power_log_antiderivative requires u != 0");
    }
    if r == 0 || s == 0 {
        return domain("power_log_antiderivative requires r >= 1 and s >= 1");
    }
    let (r, sf) = (r as usize, s as f64);
    let l = u.abs().ln();
    let rf = factorial(r);
    let us = u.powi(-(s as i32));
    let mut acc = CompensatedSum::new();
    for i in 0..r {
        acc.add(-rf / factorial(r - i) * sf.powi(-(i as i32) - 1) * us * ln_pow(l, r - i));
    }
    acc.add(-rf * sf.powi(-(r as i32) - 1) * us);
    Ok(acc.value())
}

/// Finite part of `∫_ε^1 t^{-m-1} ln^n t dt`, which is `-n!/m^{n+1}`.
pub fn log_moment_finite_part(m: u32, n: u32) -> f64 {
    -factorial(n as usize) / (m as f64).powi(n as i32 + 1)
}

/// Finite part of `∫_ε^x u^alpha ln^r u du` as `ε -> 0`.
///
/// For `alpha = -1` this is `ln^{r+1} x / (r + 1)`; otherwise the repeated
/// integration-by-parts sum, which for `alpha > -1` is the ordinary integral.
pub fn power_log_finite_part(alpha: f64, r: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("finite part requires x > 0, got {x}"));
    }
    let r = r as usize;
    let l = x.ln();
    if alpha == -1.0 {
        return Ok(ln_pow(l, r + 1) / (r + 1) as f64);
    }
    let p = alpha + 1.0;
    let xp = x.powf(p);
    let rf = factorial(r);
    let mut s = CompensatedSum::new();
    for k in 0..r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s.add(sign * rf * xp * ln_pow(l, r - k) / (p.powi(k as i32 + 1) * factorial(r - k)));
    }
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    s.add(sign * rf * xp / p.powi(r as i32 + 1));
    Ok(s.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn exponential_on_unit_interval() {
        let e = integrate(|u| (-u).exp(), 0.0, 1.0, &cfg()).unwrap();
        assert!((e.value - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert!(e.abs_err_est <= 1e-12_f64.max(1e-10 * e.value.abs()));
    }

    #[test]
    fn inverse_sqrt_singularity() {
        // oracle: sum_{k>=1} (-1)^k / (k! (k + 1/2)), summed to 1e-16
        let mut oracle = 0.0;
        let mut fact = 1.0;
        for k in 1..40 {
            fact *= k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            oracle += sign / (fact * (k as f64 + 0.5));
        }
        assert!((oracle + 0.5063517).abs() < 5e-8);
        let e = integrate(|u| u.powf(-0.5) * (-u).exp_m1(), 0.0, 1.0, &cfg()).unwrap();
        assert!((e.value - oracle).abs() < 1e-12, "{} vs {}", e.value, oracle);
    }

    #[test]
    fn tighter_tolerance_agrees_within_coarse_estimate() {
        let f = |u: f64| u.powi(-2) * (-u).exp();
        let coarse = integrate(f, 1.0, 2.0, &QuadratureConfig::new(1e-6, 1e-6, 2000).unwrap()).unwrap();
        let fine = integrate(f, 1.0, 2.0, &QuadratureConfig::new(1e-7, 1e-7, 2000).unwrap()).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.abs_err_est + fine.abs_err_est);
    }

    #[test]
    fn strong_singularity_near_minus_one() {
        // ∫_0^1 u^{-0.9} du = 10
        let e = integrate(|u| u.powf(-0.9), 0.0, 1.0, &cfg()).unwrap();
        assert!((e.value - 10.0).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn log_singularity() {
        // ∫_0^1 ln^2 u du = 2
        let e = integrate(|u| u.ln().powi(2), 0.0, 1.0, &cfg()).unwrap();
        assert!((e.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn bad_interval_is_domain_error() {
        assert!(matches!(integrate(|u| u, 1.0, 1.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(integrate(|u| u, 2.0, 1.0, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn non_integrable_input_fails() {
        let e = integrate(|u| 1.0 / u, 0.0, 1.0, &QuadratureConfig::new(1e-12, 1e-10, 50).unwrap());
        assert!(e.is_err());
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(log_power_antiderivative(1.0, 1).unwrap(), -1.0);
        assert_eq!(log_power_antiderivative(1.0, 2).unwrap(), 2.0);
        assert!(log_power_antiderivative(std::f64::consts::E, 1).unwrap().abs() < 1e-15);
        assert_eq!(power_log_antiderivative(1.0, 1, 1).unwrap(), -1.0);
        assert_eq!(power_log_antiderivative(1.0, 2, 3).unwrap(), -0.375);
        assert!(log_power_antiderivative(0.0, 1).is_err());
        assert!(power_log_antiderivative(0.0, 1, 1).is_err());
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        let h = 1e-6;
        let u = 0.7;
        let d = (power_log_antiderivative(u + h, 1, 2).unwrap() - power_log_antiderivative(u - h, 1, 2).unwrap())
            / (2.0 * h);
        let target = u.powi(-2) * u.ln().powi(2);
        assert!((d - target).abs() < 1e-6 * target.abs());
        for &u in &[-2.5f64, 0.3, 4.0] {
            let d = (log_power_antiderivative(u + h, 3).unwrap() - log_power_antiderivative(u - h, 3).unwrap())
                / (2.0 * h);
            let target = u.abs().ln().powi(3);
            assert!((d - target).abs() < 1e-6 * target.abs().max(1.0));
        }
    }

    #[test]
    fn log_moment_values() {
        assert_eq!(log_moment_finite_part(1, 1), -1.0);
        assert_eq!(log_moment_finite_part(2, 3), -0.375);
        assert!((log_moment_finite_part(3, 1) + 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn power_log_finite_part_examples() {
        let e = std::f64::consts::E;
        assert!((power_log_finite_part(-1.0, 1, e).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(power_log_finite_part(0.0, 1, 1.0).unwrap(), -1.0);
        // r = 0, alpha > -1: plain integral
        assert!((power_log_finite_part(1.5, 0, 2.0).unwrap() - 2f64.powf(2.5) / 2.5).abs() < 1e-14);
        assert!(power_log_finite_part(0.5, 1, 0.0).is_err());
    }

    #[test]
    fn power_log_finite_part_matches_quadrature_when_convergent() {
        // alpha > -1 makes the integral convergent: ∫_0^x u^a ln^r u du
        for &(a, r, x) in &[(-0.5, 2u32, 1.7), (0.3, 3, 0.6), (2.0, 1, 3.0)] {
            let q = integrate(|u: f64| u.powf(a) * u.ln().powi(r as i32), 0.0, x, &cfg()).unwrap();
            let c = power_log_finite_part(a, r, x).unwrap();
            assert!((q.value - c).abs() < 1e-10 * c.abs().max(1.0), "{a} {r} {x}: {} {}", q.value, c);
        }
    }
}

use neutrix_specfun::incgamma::{
    lower_gamma, lower_gamma_deriv, neg_int_identity_residual, neg_int_identity_rhs, recurrence_shift, series_generic, EvalConfig,
};
use neutrix_specfun::incgamma_star::{gamma_star, star_deriv, star_step_up, NegativeArgument};
use neutrix_specfun::neutrix::{extract_finite_part, EpsilonGrid, NegligibleTerm};
use neutrix_specfun::polygamma::{polygamma_any, polygamma_neg_int, polygamma_neutrix_integral, psi_neg_int};
use neutrix_specfun::quadrature::{integrate, power_log_finite_part, QuadratureConfig};
use proptest::prelude::*;

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

fn g(alpha: f64, x: f64) -> f64 {
    lower_gamma(alpha, x, &cfg()).unwrap().value
}

fn gs(alpha: f64, x: f64) -> f64 {
    gamma_star(alpha, NegativeArgument::new(x).unwrap(), &cfg()).unwrap().value
}

fn gd(alpha: f64, x: f64, r: u32) -> f64 {
    lower_gamma_deriv(alpha, x, r, &cfg()).unwrap().value
}

fn gsd(alpha: f64, x: f64, r: u32) -> f64 {
    star_deriv(alpha, NegativeArgument::new(x).unwrap(), r, &cfg()).unwrap().value
}

/// Five-point central difference.
fn diff(f: &impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// `diff` checked against `expected`, allowing for the rounding noise
/// `ε |f| / h` that a large function value puts into the difference quotient.
fn gradient_ok(f: impl Fn(f64) -> f64, x: f64, h: f64, expected: f64, rel: f64) -> (bool, f64) {
    let d = diff(&f, x, h);
    let noise = 16.0 * f64::EPSILON * f(x).abs() / h;
    ((d - expected).abs() <= rel * expected.abs().max(1.0) + noise, d)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn non_integer_alpha() -> impl Strategy<Value = f64> {
    (-4.9f64..2.9).prop_filter("away from integers", |a| (a - a.round()).abs() > 0.05)
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![non_integer_alpha(), (0u32..=4).prop_map(|m| -(m as f64))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quadrature_is_additive(b in 0.1f64..3.0, w in 0.1f64..3.0, p in -0.9f64..2.0) {
        let q = QuadratureConfig::default();
        let f = |u: f64| u.powf(p) * (-u).exp();
        let c = b + w;
        let whole = integrate(f, 0.0, c, &q).unwrap();
        let left = integrate(f, 0.0, b, &q).unwrap();
        let right = integrate(f, b, c, &q).unwrap();
        let bound = whole.abs_err_est + left.abs_err_est + right.abs_err_est + 1e-14 * whole.value.abs();
        prop_assert!((whole.value - left.value - right.value).abs() <= bound);
    }

    #[test]
    fn finite_part_of_convergent_power_is_the_integral(alpha in -0.95f64..3.0, x in 0.1f64..5.0) {
        let fp = power_log_finite_part(alpha, 0, x).unwrap();
        let exact = x.powf(alpha + 1.0) / (alpha + 1.0);
        prop_assert!(close(fp, exact, 1e-12));
    }

    #[test]
    fn incgamma_x_gradient(alpha in alpha_strategy(), x in 0.3f64..6.0) {
        let integrand = x.powf(alpha - 1.0) * (-x).exp();
        let (ok, d) = gradient_ok(|t| g(alpha, t), x, 1e-3 * x, integrand, 1e-7);
        prop_assert!(ok, "d={d} integrand={integrand}");
    }

    #[test]
    fn incgamma_deriv_x_gradient(alpha in alpha_strategy(), x in 0.3f64..6.0, r in 1u32..=3) {
        let integrand = x.powf(alpha - 1.0) * x.ln().powi(r as i32) * (-x).exp();
        let (ok, d) = gradient_ok(|t| gd(alpha, t, r), x, 1e-3 * x, integrand, 1e-7);
        prop_assert!(ok, "d={d} integrand={integrand}");
    }

    #[test]
    fn incgamma_star_x_gradient(alpha in alpha_strategy(), xm in 0.3f64..6.0) {
        let integrand = -xm.powf(alpha - 1.0) * xm.exp();
        let (ok, d) = gradient_ok(|t| gs(alpha, -t), xm, 1e-3 * xm, integrand, 1e-7);
        prop_assert!(ok, "d={d} integrand={integrand}");
    }

    #[test]
    fn incgamma_star_deriv_x_gradient(alpha in alpha_strategy(), xm in 0.3f64..6.0, r in 1u32..=3) {
        let integrand = -xm.powf(alpha - 1.0) * xm.ln().powi(r as i32) * xm.exp();
        let (ok, d) = gradient_ok(|t| gsd(alpha, -t, r), xm, 1e-3 * xm, integrand, 1e-7);
        prop_assert!(ok, "d={d} integrand={integrand}");
    }

    #[test]
    fn incgamma_recurrence(alpha in non_integer_alpha(), x in 0.1f64..8.0) {
        let lhs = g(alpha + 1.0, x);
        let rhs = alpha * g(alpha, x) - x.powf(alpha) * (-x).exp();
        prop_assert!((lhs - rhs).abs() < 1e-10 * g(alpha, x).abs().max(1.0), "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn incgamma_star_recurrence(alpha in non_integer_alpha(), xm in 0.1f64..8.0) {
        let lhs = gs(alpha + 1.0, -xm);
        let rhs = star_step_up(alpha, gs(alpha, -xm), xm);
        let scale = gs(alpha, -xm).abs().max(xm.powf(alpha) * xm.exp()).max(1.0);
        prop_assert!((lhs - rhs).abs() < 1e-10 * scale, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn incgamma_negative_integer_identity(m in 1u32..=6, x in 0.1f64..8.0) {
        let res = neg_int_identity_residual(m, x, &cfg()).unwrap();
        let scale = g(-(m as f64), x).abs().max(neg_int_identity_rhs(m, x).abs()).max(1.0);
        prop_assert!(res.abs() < 1e-10 * scale, "m={m} x={x} residual={res}");
    }

    #[test]
    fn two_paths_agree(alpha in -4.9f64..-0.1, x in 0.2f64..5.0, steps in 1u32..=5) {
        prop_assume!((alpha - alpha.round()).abs() > 0.05);
        let a = series_generic(alpha, x, &cfg()).unwrap().value;
        let b = recurrence_shift(alpha, x, steps, &cfg()).unwrap().value;
        prop_assert!(close(a, b, 1e-8), "series={a} recurrence={b}");
    }

    #[test]
    fn polygamma_routes_agree_positive(n in 0u32..=3, x in 0.1f64..5.0) {
        let a = polygamma_any(n, x, &cfg()).unwrap().value;
        let b = polygamma_neutrix_integral(n, x, &cfg()).unwrap().value;
        prop_assert!(close(a, b, 1e-8), "n={n} x={x}: {a} vs {b}");
    }

    #[test]
    fn polygamma_routes_agree_negative(n in 0u32..=3, x in -4.9f64..-0.1) {
        prop_assume!((x - x.round()).abs() > 0.05);
        let a = polygamma_any(n, x, &cfg()).unwrap().value;
        let b = polygamma_neutrix_integral(n, x, &cfg()).unwrap().value;
        prop_assert!(close(a, b, 1e-8), "n={n} x={x}: {a} vs {b}");
    }

    #[test]
    fn polygamma_derivative_chain(n in 0u32..=2, x in 0.3f64..5.0) {
        let d = diff(&|t| polygamma_any(n, t, &cfg()).unwrap().value, x, 1e-3 * x);
        let next = polygamma_any(n + 1, x, &cfg()).unwrap().value;
        prop_assert!((d - next).abs() <= 1e-5 * next.abs().max(1.0), "d={d} next={next}");
    }

    #[test]
    fn neutrix_limit_recovers_constant(c in -10.0f64..10.0, a1 in -3.0f64..3.0, a2 in -3.0f64..3.0) {
        let basis = vec![NegligibleTerm::new(-1.0, 0).unwrap(), NegligibleTerm::new(0.0, 1).unwrap()];
        let f = move |e: f64| Ok(c + a1 / e + a2 * e.ln());
        let fit = extract_finite_part(f, &basis, &EpsilonGrid::standard(basis.len())).unwrap();
        prop_assert!((fit.finite_part - c).abs() <= 1e-10 * (1.0 + c.abs()), "fit={} c={c}", fit.finite_part);
    }
}

#[test]
fn star_gradient_at_listed_orders() {
    for alpha in [0.5, 1.5, -0.5, -1.5, 0.0, -1.0, -2.0, -3.0] {
        for xm in [0.5, 1.0, 2.5] {
            let integrand = -f64::powf(xm, alpha - 1.0) * f64::exp(xm);
            let (ok, d) = gradient_ok(|t| gs(alpha, -t), xm, 1e-3 * xm, integrand, 1e-7);
            assert!(ok, "alpha={alpha} x=-{xm}: {d} vs {integrand}");
        }
    }
}

#[test]
fn polygamma_at_negative_integers_grows_with_m() {
    for n in 1..=4 {
        for m in 0..10 {
            let a = polygamma_neg_int(n, m).unwrap();
            let b = polygamma_neg_int(n, m + 1).unwrap();
            assert!(b > a, "n={n} m={m}");
        }
    }
    for m in 0..10 {
        assert!(psi_neg_int(m + 1) > psi_neg_int(m));
    }
}

#[test]
fn polygamma_near_pole_is_dominated_by_the_pole() {
    // ψ^(n)(-m + δ) ≈ (-1)^{n+1} n! / δ^{n+1} as δ → 0
    for n in 0u32..=2 {
        for m in 0u32..=3 {
            for &delta in &[1e-2, 1e-3, 1e-4] {
                let x = -(m as f64) + delta;
                let v = polygamma_any(n, x, &cfg()).unwrap().value;
                let nf: f64 = (1..=n).map(|k| k as f64).product();
                let pole = if n % 2 == 0 { -1.0 } else { 1.0 } * nf / delta.powi(n as i32 + 1);
                let rel = ((v - pole) / pole).abs();
                assert!(rel < 50.0 * delta, "n={n} m={m} delta={delta}: rel={rel}");
            }
        }
    }
}

#[test]
fn polygamma_routes_agree_next_to_poles() {
    for n in 0u32..=3 {
        for m in 0u32..=3 {
            for delta in [1e-2, 3e-3, -1e-2, -3e-3] {
                let x = -(m as f64) + delta;
                let a = polygamma_any(n, x, &cfg()).unwrap().value;
                let b = polygamma_neutrix_integral(n, x, &cfg()).unwrap().value;
                assert!(close(a, b, 1e-8), "n={n} x={x}: {a} vs {b}");
            }
        }
    }
}

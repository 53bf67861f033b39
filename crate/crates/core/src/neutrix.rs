//! Numerical neutrix limits.
//!
//! Given a family `F(ε)` of divergent integrals, the neutrix limit is the
//! constant `c` for which `F(ε) - c` is a finite combination of negligible
//! functions `ε^λ ln^r ε` (`λ < 0`), `ln^r ε` (`r >= 1`), and functions that
//! vanish as `ε -> 0`. It is recovered here by sampling `F` on a geometric
//! grid and solving the linear least-squares problem
//!
//! ```text
//! F(ε_j) ≈ c + sum_t a_t ε_j^{λ_t} ln^{r_t} ε_j
//! ```
//!
//! with unit-norm column scaling and a Householder QR factorization. A basis
//! with no terms at all means `F` converges; its limit is then taken by Wynn's
//! epsilon algorithm, which removes any geometric (power-of-`ε`) error terms
//! without knowing their exponents.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// One basis function `ε^λ ln^r ε`.
///
/// Terms with `λ < 0`, or `λ = 0` and `r >= 1`, are the divergent negligible
/// functions; terms with `λ > 0` vanish at zero and are also negligible, and
/// may be added to absorb the convergent part of a family sampled at
/// moderate `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegligibleTerm {
    pub lambda: f64,
    pub log_power: u32,
}

impl NegligibleTerm {
    pub fn new(lambda: f64, log_power: u32) -> Result<Self> {
        if lambda == 0.0 && log_power == 0 {
            return domain("the constant is the finite part and cannot be a basis term");
        }
        if !lambda.is_finite() {
            return domain("basis exponent must be finite");
        }
        Ok(Self { lambda, log_power })
    }

    pub fn eval(&self, eps: f64) -> f64 {
        let p = if self.lambda == 0.0 { 1.0 } else { eps.powf(self.lambda) };
        p * eps.ln().powi(self.log_power as i32)
    }

    pub fn is_vanishing(&self) -> bool {
        self.lambda > 0.0
    }
}

/// Geometric sample points `ε_j = eps0 · ratio^j`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonGrid {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl EpsilonGrid {
    pub fn new(eps0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 < 0.5) {
            return domain(format!("eps0 must lie in (0, 1/2), got {eps0}"));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return domain(format!("grid ratio must lie in (0, 1), got {ratio}"));
        }
        if count < 3 {
            return domain("grid needs at least three points");
        }
        Ok(Self { eps0, ratio, count })
    }

    /// The standard grid for a fit with `coefficients` unknowns besides the
    /// constant: `eps0 = 0.1`, `ratio = 0.6`, eight more points than unknowns.
    pub fn standard(coefficients: usize) -> Self {
        Self {
            eps0: 0.1,
            ratio: 0.6,
            count: coefficients + 1 + 8,
        }
    }

    /// A grid reaching out to `eps0 = 0.45` with ratio `0.7` and ten spare
    /// points, for families that are exact in their basis: the large `ε`
    /// keep the divergent columns small, so relative evaluation noise stays
    /// far below the fitted constant.
    pub fn wide(coefficients: usize) -> Self {
        Self {
            eps0: 0.45,
            ratio: 0.7,
            count: coefficients + 1 + 10,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.eps0 * self.ratio.powi(j as i32)).collect()
    }

    pub fn with_eps0(self, eps0: f64) -> Self {
        Self { eps0, ..self }
    }
}

/// Result of a finite-part extraction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeutrixFit {
    pub finite_part: f64,
    pub coefficients: Vec<(NegligibleTerm, f64)>,
    pub residual_rms: f64,
    pub condition_estimate: f64,
}

const MAX_CONDITION: f64 = 1e10;
const RESIDUAL_THRESHOLD: f64 = 1e-6;

/// A fixed linear combination of negligible terms, fitted with one coefficient.
///
/// When the integrand is known to be `u^{α-1} ln^r u` times a power series,
/// each exponent `β = α + k` of the expansion brings the whole polynomial
/// `ε^β P(ln ε)` of the antiderivative, not `r + 1` free terms; grouping them
/// keeps the fit well conditioned at higher log powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub terms: Vec<(NegligibleTerm, f64)>,
}

impl Column {
    pub fn single(t: NegligibleTerm) -> Self {
        Self { terms: vec![(t, 1.0)] }
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.terms.iter().map(|(t, w)| w * t.eval(eps)).sum()
    }
}

/// Columns `ε^β P_r(ln ε; β)` from `∫_ε u^{β-1} ln^r u du` for each exponent
/// `β`; `β = 0` gives `ln^{r+1} ε`.
pub fn log_power_columns(exponents: &[f64], r: u32) -> Vec<Column> {
    exponents
        .iter()
        .map(|&beta| {
            if beta == 0.0 {
                return Column::single(NegligibleTerm {
                    lambda: 0.0,
                    log_power: r + 1,
                });
            }
            // d/du [u^β Σ_q c_q ln^q u] = u^{β-1} ln^r u with
            // c_q = (-1)^{r-q} r! / (q! β^{r-q+1})
            let mut terms = Vec::new();
            let mut c = 1.0 / beta;
            for q in (0..=r).rev() {
                terms.push((NegligibleTerm { lambda: beta, log_power: q }, c));
                c *= -(q as f64) / beta;
            }
            Column { terms }
        })
        .collect()
}

/// Fit `F` on `grid` against the constant plus `basis`, returning the constant.
pub fn extract_finite_part<F>(f: F, basis: &[NegligibleTerm], grid: &EpsilonGrid) -> Result<NeutrixFit>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let columns: Vec<Column> = basis.iter().copied().map(Column::single).collect();
    extract_finite_part_columns(f, &columns, grid)
}

/// [`extract_finite_part`] with grouped columns.
pub fn extract_finite_part_columns<F>(f: F, columns: &[Column], grid: &EpsilonGrid) -> Result<NeutrixFit>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let eps = grid.points();
    if grid.count < columns.len() + 1 + 3 {
        return domain(format!(
            "grid of {} points is too small for {} fitted coefficients",
            grid.count,
            columns.len() + 1
        ));
    }
    if eps.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
        return domain("all grid points must lie in (0, 1/2)");
    }
    let values: Vec<f64> = eps.par_iter().map(|&e| f(e)).collect::<Result<_>>()?;
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return domain(format!("F is not finite at eps = {:e}", eps[bad]));
    }
    if columns.is_empty() {
        return Ok(wynn_limit(&values));
    }
    least_squares(&eps, &values, columns)
}

fn least_squares(eps: &[f64], values: &[f64], columns: &[Column]) -> Result<NeutrixFit> {
    let rows = eps.len();
    let cols = columns.len() + 1;
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    // rows are weighted by 1/max(1, |F|): evaluation noise is relative to |F|
    let weights: Vec<f64> = values.iter().map(|v| 1.0 / v.abs().max(1.0)).collect();
    for (i, &e) in eps.iter().enumerate() {
        a[(i, 0)] = weights[i];
        for (j, c) in columns.iter().enumerate() {
            a[(i, j + 1)] = weights[i] * c.eval(e);
        }
    }
    let scales: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    if scales.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return domain("basis column is identically zero or overflows on the grid");
    }
    for (j, &s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let b = DVector::from_iterator(rows, values.iter().zip(&weights).map(|(v, w)| v * w));

    let qr = a.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..cols).map(|j| r[(j, j)].abs()).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if dmin > 0.0 { (dmax / dmin).max(1.0) } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let qtb = qr.q().transpose() * &b;
    let y = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::IllConditioned { condition })?;
    let resid = &b - &a * &y;
    let residual_rms = (resid
        .iter()
        .zip(&weights)
        .map(|(r, w)| (r / w).powi(2))
        .sum::<f64>()
        / rows as f64)
        .sqrt();
    let fmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = RESIDUAL_THRESHOLD * fmax;
    if residual_rms > threshold {
        return Err(Error::FitRejected {
            residual_rms,
            threshold,
        });
    }
    let coef: Vec<f64> = y.iter().zip(&scales).map(|(v, s)| v / s).collect();
    Ok(NeutrixFit {
        finite_part: coef[0],
        coefficients: columns
            .iter()
            .zip(&coef[1..])
            .flat_map(|(c, &a)| c.terms.iter().map(move |&(t, w)| (t, a * w)))
            .collect(),
        residual_rms,
        condition_estimate: condition,
    })
}

/// Limit of a convergent sequence by Wynn's epsilon algorithm.
fn wynn_limit(seq: &[f64]) -> NeutrixFit {
    // prev = column k-1, cur = column k; even columns hold limit estimates
    let mut prev = vec![0.0; seq.len() + 1];
    let mut cur = seq.to_vec();
    let mut best = *seq.last().unwrap();
    let mut best_err = (seq[seq.len() - 1] - seq[seq.len() - 2]).abs();
    let mut k = 0usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut degenerate = false;
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d.abs() <= 1e-15 * cur[j + 1].abs().max(f64::MIN_POSITIVE) {
                degenerate = true;
                break;
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        if degenerate || next.is_empty() {
            break;
        }
        k += 1;
        if k.is_multiple_of(2) {
            let n = next.len();
            let est = next[n - 1];
            let err = if n >= 2 { (next[n - 1] - next[n - 2]).abs() } else { best_err };
            if !est.is_finite() {
                break;
            }
            if err <= best_err {
                best = est;
                best_err = err;
            }
        }
        prev = cur;
        cur = next;
    }
    NeutrixFit {
        finite_part: best,
        coefficients: Vec::new(),
        residual_rms: best_err,
        condition_estimate: 1.0,
    }
}

/// Divergent basis for an integrand whose small-`ε` expansion produces the
/// powers `ε^λ` (`λ` in `powers`, all negative) with up to `max_log` logarithms:
/// every `(λ, r)` with `r <= max_log`, plus `(0, r)` for `1 <= r <= max_log + 1`.
pub fn basis_for_integrand(powers: &[f64], max_log: u32) -> Vec<NegligibleTerm> {
    let mut out: Vec<NegligibleTerm> = Vec::new();
    let mut push = |t: NegligibleTerm| {
        if !out.contains(&t) {
            out.push(t);
        }
    };
    let mut sorted = powers.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &lambda in &sorted {
        if lambda == 0.0 {
            continue;
        }
        for r in 0..=max_log {
            push(NegligibleTerm { lambda, log_power: r });
        }
    }
    for r in 1..=max_log + 1 {
        push(NegligibleTerm {
            lambda: 0.0,
            log_power: r,
        });
    }
    out
}

/// Append the first `order` vanishing exponents `λ + k > 0` generated by the
/// exponents already in `basis` (each with the basis' log powers), so a fit at
/// moderate `ε` can absorb the convergent remainder of the family.
pub fn with_vanishing(basis: &[NegligibleTerm], order: usize) -> Vec<NegligibleTerm> {
    let max_log = basis
        .iter()
        .map(|t| if t.lambda == 0.0 { t.log_power.saturating_sub(1) } else { t.log_power })
        .max()
        .unwrap_or(0);
    let mut seeds: Vec<f64> = basis.iter().map(|t| t.lambda).collect();
    if seeds.is_empty() {
        seeds.push(0.0);
    }
    let mut exps: Vec<f64> = Vec::new();
    for &s in &seeds {
        for k in 1..=order + 3 {
            let p = s + k as f64;
            if p > 0.0 && !exps.iter().any(|&e| (e - p).abs() < 1e-12) {
                exps.push(p);
            }
        }
    }
    exps.sort_by(f64::total_cmp);
    exps.truncate(order);
    let mut out = basis.to_vec();
    for &lambda in &exps {
        for r in 0..=max_log {
            out.push(NegligibleTerm { lambda, log_power: r });
        }
    }
    out
}

/// Outcome of checking a closed form against a finite-part fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub closed_form: f64,
    pub fitted: Option<f64>,
    pub abs_diff: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub residual_rms: Option<f64>,
    pub condition_estimate: Option<f64>,
    pub error: Option<String>,
}

/// Run [`extract_finite_part`] and compare with `closed_form`. Fit errors are
/// reported as failed cases rather than propagated.
pub fn verify_case<F>(
    name: impl Into<String>,
    closed_form: f64,
    f: F,
    basis: &[NegligibleTerm],
    grid: &EpsilonGrid,
    tol: f64,
) -> VerifyReport
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let columns: Vec<Column> = basis.iter().copied().map(Column::single).collect();
    verify_case_columns(name, closed_form, f, &columns, grid, tol)
}

/// [`verify_case`] with grouped columns.
pub fn verify_case_columns<F>(
    name: impl Into<String>,
    closed_form: f64,
    f: F,
    columns: &[Column],
    grid: &EpsilonGrid,
    tol: f64,
) -> VerifyReport
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let name = name.into();
    match extract_finite_part_columns(f, columns, grid) {
        Ok(fit) => {
            let diff = (fit.finite_part - closed_form).abs();
            VerifyReport {
                name,
                closed_form,
                fitted: Some(fit.finite_part),
                abs_diff: Some(diff),
                tol,
                pass: diff < tol,
                residual_rms: Some(fit.residual_rms),
                condition_estimate: Some(fit.condition_estimate),
                error: None,
            }
        }
        Err(e) => VerifyReport {
            name,
            closed_form,
            fitted: None,
            abs_diff: None,
            tol,
            pass: false,
            residual_rms: None,
            condition_estimate: None,
            error: Some(e.to_string()),
        },
    }
}

/// One fitted family in a composite oracle.
pub struct OraclePiece<'a> {
    pub f: Box<dyn Fn(f64) -> Result<f64> + Sync + 'a>,
    pub basis: Vec<NegligibleTerm>,
    pub grid: EpsilonGrid,
}

/// Like [`verify_case`], but the fitted value is `constant` plus the sum of
/// the finite parts of several families. Diagnostics are the worst over the
/// pieces.
pub fn verify_composite(
    name: impl Into<String>,
    closed_form: f64,
    pieces: &[OraclePiece<'_>],
    constant: f64,
    tol: f64,
) -> VerifyReport {
    let name = name.into();
    let mut total = constant;
    let mut rms = 0.0f64;
    let mut cond = 1.0f64;
    for p in pieces {
        match extract_finite_part(&p.f, &p.basis, &p.grid) {
            Ok(fit) => {
                total += fit.finite_part;
                rms = rms.max(fit.residual_rms);
                cond = cond.max(fit.condition_estimate);
            }
            Err(e) => {
                return VerifyReport {
                    name,
                    closed_form,
                    fitted: None,
                    abs_diff: None,
                    tol,
                    pass: false,
                    residual_rms: None,
                    condition_estimate: None,
                    error: Some(e.to_string()),
                }
            }
        }
    }
    let diff = (total - closed_form).abs();
    VerifyReport {
        name,
        closed_form,
        fitted: Some(total),
        abs_diff: Some(diff),
        tol,
        pass: diff < tol,
        residual_rms: Some(rms),
        condition_estimate: Some(cond),
        error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, log_moment_finite_part, QuadratureConfig};

    fn t(lambda: f64, r: u32) -> NegligibleTerm {
        NegligibleTerm::new(lambda, r).unwrap()
    }

    #[test]
    fn constant_term_rejected() {
        assert!(NegligibleTerm::new(0.0, 0).is_err());
        assert!(NegligibleTerm::new(-1.0, 0).is_ok());
    }

    #[test]
    fn grid_validation() {
        assert!(EpsilonGrid::new(0.5, 0.6, 10).is_err());
        assert!(EpsilonGrid::new(0.1, 1.0, 10).is_err());
        assert!(EpsilonGrid::new(0.1, 0.6, 2).is_err());
        let g = EpsilonGrid::new(0.1, 0.5, 4).unwrap();
        assert_eq!(g.points(), vec![0.1, 0.05, 0.025, 0.0125]);
    }

    #[test]
    fn exact_log_basis() {
        let basis = [t(0.0, 1)];
        let fit = extract_finite_part(|e| Ok(3.0 + e.ln()), &basis, &EpsilonGrid::standard(1)).unwrap();
        assert!((fit.finite_part - 3.0).abs() < 1e-13);
        assert!((fit.coefficients[0].1 - 1.0).abs() < 1e-13);
        assert!(fit.residual_rms < 1e-13);
    }

    #[test]
    fn convergent_family_uses_extrapolation() {
        let fit = extract_finite_part(|e| Ok(5.0 + e.sqrt()), &[], &EpsilonGrid::standard(0)).unwrap();
        assert!((fit.finite_part - 5.0).abs() < 1e-12, "{}", fit.finite_part);
    }

    #[test]
    fn too_small_grid_is_rejected() {
        let basis = basis_for_integrand(&[-1.0], 1);
        let g = EpsilonGrid::new(0.1, 0.6, 6).unwrap();
        assert!(extract_finite_part(Ok, &basis, &g).is_err());
    }

    #[test]
    fn unmodelled_divergence_is_rejected() {
        // ε^{-2} is not in the basis
        let basis = [t(-1.0, 0)];
        let r = extract_finite_part(|e| Ok(1.0 + e.powi(-2)), &basis, &EpsilonGrid::standard(1));
        assert!(matches!(r, Err(Error::FitRejected { .. })), "{r:?}");
    }

    #[test]
    fn duplicate_columns_are_ill_conditioned() {
        let basis = [t(-1.0, 0), t(-1.0, 0)];
        let r = extract_finite_part(|e| Ok(1.0 / e), &basis, &EpsilonGrid::standard(2));
        assert!(matches!(r, Err(Error::IllConditioned { .. })), "{r:?}");
    }

    #[test]
    fn basis_construction() {
        assert_eq!(basis_for_integrand(&[-1.0], 0), vec![t(-1.0, 0), t(0.0, 1)]);
        assert_eq!(
            basis_for_integrand(&[-2.0, -1.0], 0),
            vec![t(-2.0, 0), t(-1.0, 0), t(0.0, 1)]
        );
        assert_eq!(
            basis_for_integrand(&[-1.0], 1),
            vec![t(-1.0, 0), t(-1.0, 1), t(0.0, 1), t(0.0, 2)]
        );
        // duplicates collapse
        assert_eq!(basis_for_integrand(&[-1.0, -1.0], 0).len(), 2);
    }

    #[test]
    fn vanishing_extension() {
        let b = with_vanishing(&basis_for_integrand(&[-0.5], 0), 2);
        let lambdas: Vec<f64> = b.iter().map(|t| t.lambda).collect();
        assert_eq!(lambdas, vec![-0.5, 0.0, 0.5, 1.0]);
    }

    fn log_moment(m: u32, n: u32) -> impl Fn(f64) -> Result<f64> + Sync {
        let q = QuadratureConfig::new(1e-15, 1e-14, 4000).unwrap();
        move |e| integrate(|t: f64| t.powi(-(m as i32) - 1) * t.ln().powi(n as i32), e, 1.0, &q).map(|v| v.value)
    }

    #[test]
    fn log_moment_example_standard_grid() {
        let basis = [t(-1.0, 0), t(-1.0, 1), t(0.0, 1)];
        let fit = extract_finite_part(log_moment(1, 1), &basis, &EpsilonGrid::standard(3)).unwrap();
        assert!((fit.finite_part + 1.0).abs() < 1e-10, "{}", fit.finite_part);
        assert_eq!(fit.coefficients.len(), 3);
    }

    #[test]
    fn log_moments_through_five() {
        for m in 1..=5u32 {
            for n in 1..=5u32 {
                let cols = log_power_columns(&[-(m as f64), 0.0], n);
                let fit = extract_finite_part_columns(log_moment(m, n), &cols, &EpsilonGrid::wide(cols.len())).unwrap();
                let want = log_moment_finite_part(m, n);
                assert!((fit.finite_part - want).abs() < 1e-6, "m={m} n={n}: {} vs {want}", fit.finite_part);
            }
        }
    }

    #[test]
    fn fit_stable_under_grid_halving() {
        for m in 1..=3u32 {
            for n in 1..=3u32 {
                let basis = basis_for_integrand(&[-(m as f64)], n);
                let g = EpsilonGrid::wide(basis.len());
                let a = extract_finite_part(log_moment(m, n), &basis, &g).unwrap().finite_part;
                let b = extract_finite_part(log_moment(m, n), &basis, &g.with_eps0(g.eps0 / 2.0))
                    .unwrap()
                    .finite_part;
                assert!((a - b).abs() < 1e-7, "m={m} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn spurious_term_is_harmless_or_flagged() {
        for m in 1..=3u32 {
            for n in 1..=3u32 {
                let mut basis = basis_for_integrand(&[-(m as f64)], n);
                let g = EpsilonGrid::wide(basis.len() + 1);
                let a = extract_finite_part(log_moment(m, n), &basis, &g).unwrap().finite_part;
                basis.push(t(-3.0, 0));
                match extract_finite_part(log_moment(m, n), &basis, &g) {
                    Ok(fit) => assert!((fit.finite_part - a).abs() < 1e-6, "m={m} n={n}"),
                    Err(e) => assert!(matches!(e, Error::IllConditioned { .. }), "m={m} n={n}: {e}"),
                }
            }
        }
    }

    #[test]
    fn reference_gamma_zero_one() {
        let q = QuadratureConfig::new(1e-15, 1e-14, 4000).unwrap();
        let f = |e: f64| integrate(|u: f64| (-u).exp() / u, e, 1.0, &q).map(|v| v.value);
        let basis = with_vanishing(&[t(0.0, 1)], 6);
        let rep = verify_case("g01", -0.7966, f, &basis, &EpsilonGrid::standard(basis.len()), 5e-6);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn columns_differentiate_to_the_integrand() {
        for (beta, r) in [(-2.0, 2u32), (-0.5, 1), (1.5, 3), (0.0, 2)] {
            let c = &log_power_columns(&[beta], r)[0];
            for e in [0.05, 0.2, 0.4] {
                let h = 1e-6 * e;
                let fd = (c.eval(e + h) - c.eval(e - h)) / (2.0 * h);
                let want = if beta == 0.0 {
                    (r + 1) as f64 * e.ln().powi(r as i32) / e
                } else {
                    e.powf(beta - 1.0) * e.ln().powi(r as i32)
                };
                assert!((fd - want).abs() < 1e-6 * want.abs(), "beta={beta} r={r} e={e}");
            }
        }
    }

    #[test]
    fn grouped_fit_expands_coefficients() {
        let cols = log_power_columns(&[-1.0], 1);
        let f = |e: f64| Ok(2.0 + 3.0 * cols[0].eval(e));
        let fit = extract_finite_part_columns(f, &cols, &EpsilonGrid::standard(1)).unwrap();
        assert!((fit.finite_part - 2.0).abs() < 1e-12);
        assert_eq!(fit.coefficients.len(), 2);
    }

    #[test]
    fn failed_fit_becomes_failed_report() {
        let rep = verify_case("bad", 1.0, |_| Err(Error::Domain("nope".into())), &[t(-1.0, 0)], &EpsilonGrid::standard(1), 1e-6);
        assert!(!rep.pass);
        assert!(rep.error.is_some());
    }
}

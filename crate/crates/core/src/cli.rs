//! Command-line front end: `eval`, `table` and `verify`.

use std::ffi::OsString;
use std::io::{self, Write};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::incgamma::{lower_gamma, lower_gamma_deriv, EvalConfig};
use crate::incgamma_star::{gamma_star, star_deriv, NegativeArgument};
use crate::polygamma::polygamma_any;
use crate::quadrature::Evaluation;
use crate::verify::{self, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

const MAX_TABLE_POINTS: usize = 1_000_000;

const EXIT_CODES: &str = "Exit codes:
  0  success
  1  verify: at least one case failed
  2  usage or domain error
  3  convergence failure (table: at least one row failed)";

#[derive(Debug, Parser)]
#[command(name = "neutrix-specfun", version, about = "Incomplete gamma and polygamma functions at all real orders", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one function at one point.
    Eval(EvalArgs),
    /// Evaluate a function over a grid of parameters.
    Table(TableArgs),
    /// Run the cross-check suites and print one JSON line per case.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Function {
    Incgamma,
    IncgammaDeriv,
    IncgammaStar,
    IncgammaStarDeriv,
    Polygamma,
}

impl Function {
    pub fn as_str(&self) -> &'static str {
        match self {
            Function::Incgamma => "incgamma",
            Function::IncgammaDeriv => "incgamma-deriv",
            Function::IncgammaStar => "incgamma-star",
            Function::IncgammaStarDeriv => "incgamma-star-deriv",
            Function::Polygamma => "polygamma",
        }
    }

    fn is_deriv(&self) -> bool {
        matches!(self, Function::IncgammaDeriv | Function::IncgammaStarDeriv)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Series truncation tolerance.
    #[arg(long, env = "NEUTRIX_SPECFUN_TOL")]
    pub series_tol: Option<f64>,
    /// Distance within which an order counts as a nonpositive integer.
    #[arg(long)]
    pub integer_tol: Option<f64>,
    /// Highest derivative order accepted.
    #[arg(long)]
    pub max_deriv: Option<u32>,
    /// Return the literal zero of γ* for x > 0 instead of rejecting it.
    #[arg(long)]
    pub allow_zero_branch: bool,
    /// Add wall_time_ms to text and JSON records.
    #[arg(long)]
    pub timing: bool,
}

impl ConfigArgs {
    pub fn eval_config(&self) -> Result<EvalConfig> {
        let mut cfg = EvalConfig::default();
        if let Some(t) = self.series_tol {
            cfg.series_tol = t;
        }
        if let Some(t) = self.integer_tol {
            cfg.integer_tol = t;
        }
        if let Some(d) = self.max_deriv {
            cfg.max_deriv_order = d;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    pub function: Function,
    /// Order α of the incomplete gamma functions.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
    pub alpha: Option<f64>,
    /// Order n of the polygamma function.
    #[arg(long)]
    pub n: Option<u32>,
    /// Argument (x < 0 for the star variants).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
    pub x: f64,
    /// Derivative order r in α (default 1 for the -deriv functions).
    #[arg(long)]
    pub deriv_order: Option<u32>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    pub function: Function,
    /// Values of α: comma-separated numbers, fractions p/q, or ranges a:b:step.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Values of n, same syntax (integers only).
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// Values of x, same syntax.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Derivative orders, same syntax (integers only).
    #[arg(long, allow_hyphen_values = true)]
    pub deriv_order: Option<String>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Replace every case's tolerance with this absolute value.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Parameters of one evaluation; absent ones are omitted from records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deriv_order: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionRequest {
    pub function: Function,
    pub params: Params,
}

impl FunctionRequest {
    /// Check presence and domain of the parameters for `function`, filling in
    /// the default derivative order.
    pub fn new(function: Function, alpha: Option<f64>, n: Option<u32>, x: f64, deriv_order: Option<u32>) -> Result<Self> {
        let params = match function {
            Function::Polygamma => {
                if alpha.is_some() {
                    return domain("polygamma takes --n, not --alpha");
                }
                if deriv_order.is_some() {
                    return domain("polygamma takes its order as --n, not --deriv-order");
                }
                let Some(n) = n else {
                    return domain("polygamma requires --n");
                };
                Params {
                    alpha: None,
                    n: Some(n),
                    x,
                    deriv_order: None,
                }
            }
            f => {
                if n.is_some() {
                    return domain(format!("{} takes --alpha, not --n", f.as_str()));
                }
                let Some(alpha) = alpha else {
                    return domain(format!("{} requires --alpha", f.as_str()));
                };
                let deriv_order = if f.is_deriv() {
                    Some(deriv_order.unwrap_or(1))
                } else {
                    if deriv_order.is_some_and(|r| r != 0) {
                        return domain(format!("{} has no --deriv-order; use {}-deriv", f.as_str(), f.as_str()));
                    }
                    None
                };
                Params {
                    alpha: Some(alpha),
                    n: None,
                    x,
                    deriv_order,
                }
            }
        };
        if !x.is_finite() || params.alpha.is_some_and(|a| !a.is_finite()) {
            return domain("parameters must be finite");
        }
        Ok(Self { function, params })
    }

    pub fn evaluate(&self, cfg: &EvalConfig, allow_zero_branch: bool) -> Result<Evaluation> {
        let p = &self.params;
        let alpha = p.alpha.unwrap_or(0.0);
        let r = p.deriv_order.unwrap_or(0);
        let star_arg = || -> Result<Option<NegativeArgument>> {
            if p.x > 0.0 && allow_zero_branch {
                Ok(None)
            } else {
                NegativeArgument::new(p.x).map(Some)
            }
        };
        let ev = match self.function {
            Function::Incgamma => lower_gamma(alpha, p.x, cfg)?,
            Function::IncgammaDeriv => lower_gamma_deriv(alpha, p.x, r, cfg)?,
            Function::IncgammaStar => match star_arg()? {
                Some(a) => gamma_star(alpha, a, cfg)?,
                None => Evaluation::closed_form(0.0),
            },
            Function::IncgammaStarDeriv => match star_arg()? {
                Some(a) if r == 0 => gamma_star(alpha, a, cfg)?,
                Some(a) => star_deriv(alpha, a, r, cfg)?,
                None => {
                    cfg.check_deriv_order(r)?;
                    Evaluation::closed_form(0.0)
                }
            },
            Function::Polygamma => polygamma_any(p.n.unwrap_or(0), p.x, cfg)?,
        };
        if !ev.value.is_finite() {
            return Err(Error::ConvergenceFailure {
                what: "non-finite result",
                err_est: f64::INFINITY,
                work: ev.work,
            });
        }
        Ok(ev)
    }
}

/// One emitted record. `value` is absent exactly when `error` is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub function: Function,
    pub params: Params,
    pub value: Option<f64>,
    pub abs_err_est: Option<f64>,
    pub method: Option<String>,
    pub terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl OutputRecord {
    /// Run `req`, rounding the value to 15 significant digits. The rounding
    /// is added to `abs_err_est` so the printed value stays within it.
    pub fn compute(req: &FunctionRequest, cfg: &EvalConfig, allow_zero_branch: bool, timing: bool) -> (Self, Option<Error>) {
        let start = Instant::now();
        let res = req.evaluate(cfg, allow_zero_branch);
        let wall = timing.then(|| (start.elapsed().as_secs_f64() * 1e6).round() / 1e3);
        match res {
            Ok(ev) => {
                let value = round_sig(ev.value, 15);
                let err = round_up_sig(ev.abs_err_est + (value - ev.value).abs(), 15);
                (
                    Self {
                        function: req.function,
                        params: req.params,
                        value: Some(value),
                        abs_err_est: Some(err),
                        method: Some(ev.method.as_str().to_string()),
                        terms: Some(ev.work),
                        wall_time_ms: wall,
                        error: None,
                    },
                    None,
                )
            }
            Err(e) => (
                Self {
                    function: req.function,
                    params: req.params,
                    value: None,
                    abs_err_est: None,
                    method: None,
                    terms: None,
                    wall_time_ms: wall,
                    error: Some(e.to_string()),
                },
                Some(e),
            ),
        }
    }

    pub fn request(&self) -> FunctionRequest {
        FunctionRequest {
            function: self.function,
            params: self.params,
        }
    }

    fn param_cells(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        let mut v = Vec::new();
        if let Some(a) = p.alpha {
            v.push(("alpha", exact(a)));
        }
        if let Some(n) = p.n {
            v.push(("n", n.to_string()));
        }
        v.push(("x", exact(p.x)));
        if let Some(r) = p.deriv_order {
            v.push(("deriv_order", r.to_string()));
        }
        v
    }

    pub fn to_text(&self) -> String {
        let args: Vec<String> = self.param_cells().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        let head = format!("{}({})", self.function.as_str(), args.join(", "));
        let mut line = match (&self.error, self.value) {
            (Some(e), _) => format!("{head}: error: {e}"),
            (None, Some(v)) => format!(
                "{head} = {}  (abs_err_est {}, method {}, terms {})",
                fmt_sig(v, 7),
                fmt_sig(self.abs_err_est.unwrap_or(0.0), 2),
                self.method.as_deref().unwrap_or(""),
                self.terms.unwrap_or(0)
            ),
            (None, None) => format!("{head}: error"),
        };
        if let Some(t) = self.wall_time_ms {
            line.push_str(&format!("  [{t:.3} ms]"));
        }
        line
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["function".to_string()];
        h.extend(self.param_cells().into_iter().map(|(k, _)| k.to_string()));
        h.extend(["value", "abs_err_est", "method"].map(String::from));
        h
    }

    pub fn csv_row(&self) -> Vec<String> {
        let mut r = vec![self.function.as_str().to_string()];
        r.extend(self.param_cells().into_iter().map(|(_, v)| v));
        match self.value {
            Some(v) => {
                r.push(fmt_sig(v, 15));
                r.push(fmt_sig(self.abs_err_est.unwrap_or(0.0), 15));
                r.push(self.method.clone().unwrap_or_default());
            }
            None => r.extend(["", "", "error"].map(String::from)),
        }
        r
    }
}

/// Shortest decimal that reads back as `v`.
fn exact(v: f64) -> String {
    serde_json::to_string(&v).expect("finite parameter")
}

/// `v` in the style of C's `%.{sig}g`.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, v);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let prec = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.prec$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn round_sig(v: f64, sig: usize) -> f64 {
    format!("{:.*e}", sig - 1, v).parse().unwrap_or(v)
}

fn round_up_sig(v: f64, sig: usize) -> f64 {
    let r = round_sig(v, sig);
    if r >= v {
        r
    } else {
        let s = format!("{:.*e}", sig - 1, v);
        let exp: i32 = s.split_once('e').map(|(_, e)| e.parse().unwrap_or(0)).unwrap_or(0);
        round_sig(r + 10f64.powi(exp - sig as i32 + 1), sig)
    }
}

/// A number, possibly written as a fraction `p/q`.
pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("invalid number '{s}'"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("invalid number '{s}'"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("invalid number '{s}'"))?,
    };
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

/// Comma-separated values, fractions, and inclusive ranges `a:b:step`,
/// returned sorted ascending without duplicates.
pub fn parse_values(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_number(v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_number(a)?, parse_number(b)?, parse_number(step)?);
                if !(step > 0.0) {
                    return Err(format!("range step must be positive in '{item}'"));
                }
                if b < a {
                    return Err(format!("range end below start in '{item}'"));
                }
                let count = ((b - a) / step * (1.0 + 1e-12)).floor() as usize + 1;
                if count > MAX_TABLE_POINTS {
                    return Err(format!("range '{item}' has more than {MAX_TABLE_POINTS} points"));
                }
                // points computed from the index, not by accumulation
                out.extend((0..count).map(|k| a + k as f64 * step));
            }
            _ => return Err(format!("expected a value or a:b:step, got '{item}'")),
        }
    }
    if out.is_empty() {
        return Err("empty value list".into());
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn parse_integers(spec: &str) -> std::result::Result<Vec<u32>, String> {
    parse_values(spec)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(format!("expected a nonnegative integer, got {v}"))
            }
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_CONVERGENCE,
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Eval(a) => cmd_eval(&a, &mut out),
        Command::Table(a) => cmd_table(&a, &mut out),
        Command::Verify(a) => cmd_verify(&a, &mut out),
    };
    let _ = out.flush();
    code
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

pub fn cmd_eval(a: &EvalArgs, out: &mut impl Write) -> i32 {
    let cfg = match a.config.eval_config() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let req = match FunctionRequest::new(a.function, a.alpha, a.n, a.x, a.deriv_order) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let (rec, err) = OutputRecord::compute(&req, &cfg, a.config.allow_zero_branch, a.config.timing);
    if let Some(e) = err {
        return fail(&e);
    }
    let text = match a.config.format {
        Format::Text => rec.to_text() + "\n",
        Format::Json => rec.to_json() + "\n",
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let _ = w.write_record(rec.csv_header());
            let _ = w.write_record(rec.csv_row());
            String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
        }
    };
    let _ = out.write_all(text.as_bytes());
    EXIT_OK
}

fn table_requests(a: &TableArgs) -> Result<Vec<FunctionRequest>> {
    let usage = |m: String| Error::Domain(m);
    let xs = parse_values(&a.x).map_err(usage)?;
    let mut reqs = Vec::new();
    match a.function {
        Function::Polygamma => {
            let Some(ns) = &a.n else {
                return domain("polygamma requires --n");
            };
            if a.alpha.is_some() || a.deriv_order.is_some() {
                return domain("polygamma takes --n and --x only");
            }
            for n in parse_integers(ns).map_err(usage)? {
                for &x in &xs {
                    reqs.push(FunctionRequest::new(a.function, None, Some(n), x, None)?);
                }
            }
        }
        f => {
            let Some(alphas) = &a.alpha else {
                return domain(format!("{} requires --alpha", f.as_str()));
            };
            if a.n.is_some() {
                return domain(format!("{} takes --alpha, not --n", f.as_str()));
            }
            let orders: Vec<Option<u32>> = match &a.deriv_order {
                Some(s) => parse_integers(s).map_err(usage)?.into_iter().map(Some).collect(),
                None => vec![None],
            };
            for alpha in parse_values(alphas).map_err(usage)? {
                for &x in &xs {
                    for &r in &orders {
                        reqs.push(FunctionRequest::new(f, Some(alpha), None, x, r)?);
                    }
                }
            }
        }
    }
    if reqs.len() > MAX_TABLE_POINTS {
        return domain(format!("table has more than {MAX_TABLE_POINTS} points"));
    }
    Ok(reqs)
}

pub fn cmd_table(a: &TableArgs, out: &mut impl Write) -> i32 {
    let cfg = match a.config.eval_config() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let reqs = match table_requests(a) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    // rayon's indexed collect keeps the request order
    let rows: Vec<(OutputRecord, Option<Error>)> = reqs
        .par_iter()
        .map(|r| OutputRecord::compute(r, &cfg, a.config.allow_zero_branch, a.config.timing))
        .collect();
    let mut failed = false;
    for (rec, err) in &rows {
        if let Some(e) = err {
            failed = true;
            eprintln!("error: {}: {e}", rec.to_text().split(':').next().unwrap_or(""));
        }
    }
    match a.config.format {
        Format::Text => {
            for (rec, _) in &rows {
                let _ = writeln!(out, "{}", rec.to_text());
            }
        }
        Format::Json => {
            for (rec, _) in &rows {
                let _ = writeln!(out, "{}", rec.to_json());
            }
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut *out);
            if let Some((first, _)) = rows.first() {
                let _ = w.write_record(first.csv_header());
            }
            for (rec, _) in &rows {
                let _ = w.write_record(rec.csv_row());
            }
            let _ = w.flush();
        }
    }
    if failed {
        EXIT_CONVERGENCE
    } else {
        EXIT_OK
    }
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut impl Write) -> i32 {
    if let Some(t) = a.tol {
        if !(t > 0.0) {
            eprintln!("error: --tol must be positive");
            return EXIT_USAGE;
        }
    }
    let cfg = EvalConfig::default();
    let mut all_pass = true;
    let mut n = 0usize;
    let mut failed = 0usize;
    for rec in verify::run(a.suite, &cfg) {
        let rec = match a.tol {
            Some(t) => rec.with_tol(t),
            None => rec,
        };
        n += 1;
        if !rec.pass {
            all_pass = false;
            failed += 1;
        }
        let _ = writeln!(out, "{}", serde_json::to_string(&rec).expect("records serialize"));
    }
    eprintln!("verify {}: {} cases, {} failed", a.suite.as_str(), n, failed);
    if all_pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(-1.1369957, 7), "-1.136996");
        assert_eq!(fmt_sig(0.5, 15), "0.5");
        assert_eq!(fmt_sig(1.0e-7, 3), "1e-07");
        assert_eq!(fmt_sig(123456789.0, 4), "1.235e+08");
        assert_eq!(fmt_sig(9.9999999, 3), "10");
        assert_eq!(fmt_sig(0.0, 7), "0");
    }

    #[test]
    fn rounding_up_never_shrinks() {
        for v in [1.234_567_890_123_456_8e-17, 0.3, 7.777_777_777_777_778] {
            assert!(round_up_sig(v, 15) >= v);
        }
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("1,0.5,-1/2").unwrap(), vec![-0.5, 0.5, 1.0]);
        assert_eq!(parse_values("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_values("0:0.3:0.1").unwrap().len(), 4);
        assert_eq!(parse_values("1,1").unwrap(), vec![1.0]);
        assert!(parse_values("1:0:1").is_err());
        assert!(parse_values("0:1:0").is_err());
        assert!(parse_values("1/0").is_err());
        assert!(parse_values("a").is_err());
        assert!(parse_integers("0.5").is_err());
    }

    #[test]
    fn request_validation() {
        assert!(FunctionRequest::new(Function::Polygamma, None, None, 1.0, None).is_err());
        assert!(FunctionRequest::new(Function::Incgamma, None, None, 1.0, None).is_err());
        assert!(FunctionRequest::new(Function::Incgamma, Some(0.0), None, 1.0, Some(2)).is_err());
        let r = FunctionRequest::new(Function::IncgammaDeriv, Some(0.0), None, 1.0, None).unwrap();
        assert_eq!(r.params.deriv_order, Some(1));
    }

    #[test]
    fn zero_branch_is_opt_in() {
        let cfg = EvalConfig::default();
        let r = FunctionRequest::new(Function::IncgammaStar, Some(0.0), None, 0.5, None).unwrap();
        assert!(matches!(r.evaluate(&cfg, false), Err(Error::Domain(_))));
        assert_eq!(r.evaluate(&cfg, true).unwrap().value, 0.0);
    }

    #[test]
    fn json_key_order() {
        let req = FunctionRequest::new(Function::Incgamma, Some(0.0), None, 0.5, None).unwrap();
        let (rec, _) = OutputRecord::compute(&req, &EvalConfig::default(), false, false);
        let j = rec.to_json();
        let keys = ["\"function\"", "\"params\"", "\"value\"", "\"abs_err_est\"", "\"method\"", "\"terms\""];
        let pos: Vec<usize> = keys.iter().map(|k| j.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{j}");
        assert!(!j.contains("wall_time_ms"));
    }
}

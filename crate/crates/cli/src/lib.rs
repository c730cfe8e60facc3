//! The `rf` command line.
//!
//! Exit codes: 0 success, 1 usage/parse/domain error, 2 an integral did not
//! converge, 3 some verification check failed.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use rf_core::elementary::{
    e_const, exp_construct, hyperbolic, inverse_fn, log_construct, pow_construct, ApproxValue,
    Hyperbolic, Inverse,
};
use rf_core::expr::{parse, Expr};
use rf_core::format::{csv_num, format_sig, human_num};
use rf_core::integrator::{
    convergence_report, IntegrationResult, Integrator, SingularEnd, DEFAULT_MAX_N,
};
use rf_core::theorems::{self, CheckReport, Verifier};
use rf_core::{Error, TagRule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_CHECKS_FAILED: i32 = 3;

pub const DEFAULT_TOL: f64 = 1e-8;
const MIN_MAX_N: usize = 1 << 6;
const MAX_MAX_N: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ImproperEnd {
    Lower,
    Upper,
}

#[derive(Parser, Debug)]
#[command(
    name = "rf",
    version,
    about = "Riemann-sum integration and checks of the calculus identities"
)]
struct Cli {
    /// Absolute tolerance (default 1e-8; verify uses per-suite defaults)
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Largest partition size, a power of two in [2^6, 2^26]
    #[arg(long, global = true)]
    max_n: Option<usize>,

    /// Tag rule: left, right or midpoint
    #[arg(long, global = true, default_value = "midpoint")]
    rule: TagRule,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    output: OutputFormat,

    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for verify (default: available parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate an expression in t from A to B
    Integrate(IntegrateArgs),
    /// Run the catalog, derivative table and theorem checks
    Verify {
        /// Only run checks whose name contains this substring
        #[arg(long)]
        filter: Option<String>,
    },
    /// Print successive Riemann sums and the estimated order of convergence
    Converge(ConvergeArgs),
    /// Evaluate a constructive elementary function
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    expr: String,
    #[arg(allow_hyphen_values = true)]
    a: String,
    #[arg(allow_hyphen_values = true)]
    b: String,
    /// Endpoint where the integrand is singular
    #[arg(long, value_enum)]
    improper: Option<ImproperEnd>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    expr: String,
    #[arg(allow_hyphen_values = true)]
    a: String,
    #[arg(allow_hyphen_values = true)]
    b: String,
    #[arg(long, default_value_t = 8)]
    n_from: usize,
    #[arg(long, default_value_t = 65536)]
    n_to: usize,
    /// Exact value of the integral, used for the error column and the order
    #[arg(long, allow_hyphen_values = true)]
    exact: Option<String>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// log, exp, e, pow, sinh, cosh, tanh, arsinh, arcosh, artanh, arcsin, arctan
    fname: String,
    /// Argument(s); pow takes base then exponent
    #[arg(allow_negative_numbers = true, num_args = 0..=2)]
    args: Vec<String>,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
}

/// Validated global settings.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub tolerance: f64,
    pub max_n: usize,
    pub rule: TagRule,
    pub output: OutputFormat,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the command line with `args` (including the program name), reading
/// environment variables through `env`. Returns the exit code.
pub fn run<I, T>(
    args: I,
    env: &dyn Fn(&str) -> Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli, env, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn config(cli: &Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<CliConfig, Error> {
    let tolerance = cli.tol.unwrap_or(DEFAULT_TOL);
    check_tolerance(tolerance)?;
    let max_n = match (cli.max_n, env("RF_MAX_N")) {
        (Some(n), _) => n,
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("RF_MAX_N is not an integer: {v:?}")))?,
        (None, None) => DEFAULT_MAX_N,
    };
    if !max_n.is_power_of_two() || !(MIN_MAX_N..=MAX_MAX_N).contains(&max_n) {
        return Err(Error::InvalidArgument(format!(
            "max-n must be a power of two between 2^6 and 2^26, got {max_n}"
        )));
    }
    Ok(CliConfig {
        tolerance,
        max_n,
        rule: cli.rule.clone(),
        output: cli.output,
    })
}

fn check_tolerance(tol: f64) -> Result<(), Error> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

fn dispatch(cli: Cli, env: &dyn Fn(&str) -> Option<String>, io: &mut Io<'_>) -> Result<i32, Error> {
    let cfg = config(&cli, env)?;
    match cli.command {
        Command::Integrate(args) => cmd_integrate(&args, &cfg, io),
        Command::Verify { ref filter } => {
            let filter = filter.as_deref();
            let verifier = Verifier::new(Integrator::default().max_n(cfg.max_n));
            let job = || verify_reports(&verifier, filter, cli.tol, cli.seed);
            let reports = match cli.jobs {
                Some(0) => return Err(Error::InvalidArgument("jobs must be at least 1".into())),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("cannot start {n} workers: {e}")))?
                    .install(job),
                None => job(),
            };
            print_verify(filter, &reports, &cfg, io)
        }
        Command::Converge(args) => cmd_converge(&args, &cfg, io),
        Command::Eval(args) => cmd_eval(&args, &cfg, io),
    }
}

/// A constant expression such as `pi/2` or `-1`.
fn parse_bound(text: &str) -> Result<f64, Error> {
    let e: Expr = parse(text)?;
    if !e.is_constant() {
        return Err(Error::InvalidArgument(format!(
            "{text:?} must be a constant expression"
        )));
    }
    e.eval(0.0)
}

fn write_io(r: std::io::Result<()>) -> Result<(), Error> {
    r.map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))
}

fn json_num(x: f64) -> Value {
    if x.is_finite() {
        // 17 significant digits survive a round trip through JSON readers.
        serde_json::from_str(&csv_num(x)).unwrap_or(Value::Null)
    } else {
        Value::Null
    }
}

fn cmd_integrate(args: &IntegrateArgs, cfg: &CliConfig, io: &mut Io<'_>) -> Result<i32, Error> {
    let f = parse(&args.expr)?;
    let (a, b) = (parse_bound(&args.a)?, parse_bound(&args.b)?);
    let integ = Integrator::with_rule(cfg.rule.clone()).max_n(cfg.max_n);
    let r: IntegrationResult = match args.improper {
        None => integ.integrate(&f, a, b, cfg.tolerance)?,
        Some(end) => {
            let end = match end {
                ImproperEnd::Lower => SingularEnd::Lower,
                ImproperEnd::Upper => SingularEnd::Upper,
            };
            integ.integrate_improper(&f, a, b, end, cfg.tolerance)?
        }
    };
    let text = match cfg.output {
        OutputFormat::Human => format!(
            "value           {}\nerror_estimate  {}\nn_final         {}\nevaluations     {}\nconverged       {}\n",
            human_num(r.value),
            human_num(r.error_estimate),
            r.n_final,
            r.evaluations,
            r.converged
        ),
        OutputFormat::Csv => format!(
            "value,error_estimate,n_final,evaluations,converged\n{},{},{},{},{}\n",
            csv_num(r.value),
            csv_num(r.error_estimate),
            r.n_final,
            r.evaluations,
            r.converged
        ),
        OutputFormat::Json => {
            let v = json!({
                "value": json_num(r.value),
                "error_estimate": json_num(r.error_estimate),
                "n_final": r.n_final,
                "evaluations": r.evaluations,
                "converged": r.converged,
            });
            format!("{v}\n")
        }
    };
    write_io(io.out.write_all(text.as_bytes()))?;
    if r.converged {
        Ok(EXIT_OK)
    } else {
        write_io(writeln!(
            io.err,
            "warning: no convergence to tolerance {} (last difference {})",
            human_num(cfg.tolerance),
            human_num(r.error_estimate)
        ))?;
        Ok(EXIT_NOT_CONVERGED)
    }
}

/// Default tolerances per suite when `--tol` is not given.
const CATALOG_TOL: f64 = 1e-6;
const DERIVATIVE_TOL: f64 = 1e-5;
const LOG_EQUATION_TOL: f64 = 3e-12;
const LOG_EQUATION_PAIRS: usize = 200;

/// Every check whose name contains `filter`, sorted by name. Quadrature uses
/// the midpoint rule whatever `--rule` says; only the cap is configurable.
fn verify_reports(
    verifier: &Verifier,
    filter: Option<&str>,
    tol: Option<f64>,
    seed: u64,
) -> Vec<CheckReport> {
    let keep = |name: &str| filter.map_or(true, |f| name.contains(f));
    let (catalog_tol, deriv_tol, log_tol) = match tol {
        Some(t) => (t, t, t),
        None => (CATALOG_TOL, DERIVATIVE_TOL, LOG_EQUATION_TOL),
    };

    let entries: Vec<_> = theorems::catalog()
        .into_iter()
        .filter(|e| keep(e.name))
        .collect();
    let mut reports = verifier.run_entries(&entries, catalog_tol);
    reports.extend(verifier.substitution_showcases(catalog_tol));
    reports.extend(verifier.ftc_showcases(deriv_tol));
    reports.extend(theorems::derivative_table_check(deriv_tol));
    reports.extend(theorems::product_chain_check(deriv_tol));
    reports.push(theorems::log_functional_equation_check(
        seed,
        LOG_EQUATION_PAIRS,
        log_tol,
    ));
    reports.retain(|r| keep(&r.name));
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    reports
}

fn print_verify(
    filter: Option<&str>,
    reports: &[CheckReport],
    cfg: &CliConfig,
    io: &mut Io<'_>,
) -> Result<i32, Error> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no checks match filter {:?}",
            filter.unwrap_or_default()
        )));
    }
    let text = match cfg.output {
        OutputFormat::Csv => theorems::reports_to_csv(reports),
        OutputFormat::Json => format!(
            "{}\n",
            Value::Array(reports.iter().map(report_json).collect())
        ),
        OutputFormat::Human => human_reports(reports),
    };
    write_io(io.out.write_all(text.as_bytes()))?;
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_CHECKS_FAILED
    })
}

fn report_json(r: &CheckReport) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), Value::from(r.name.clone()));
    m.insert("lhs".into(), json_num(r.lhs));
    m.insert("rhs".into(), json_num(r.rhs));
    m.insert("abs_diff".into(), json_num(r.abs_diff));
    m.insert("tol".into(), json_num(r.tol));
    m.insert("pass".into(), Value::from(r.pass));
    m.insert("anchor".into(), Value::from(r.anchor.clone()));
    if let Some(e) = &r.error {
        m.insert("error".into(), Value::from(e.clone()));
    }
    Value::Object(m)
}

fn human_reports(reports: &[CheckReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.name.chars().count())
        .max()
        .unwrap_or(0);
    let mut s = String::new();
    for r in reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "{status}  {:<width$}  diff {:<16}  tol {}",
            r.name,
            human_num(r.abs_diff),
            human_num(r.tol)
        ));
        if let Some(e) = &r.error {
            s.push_str(&format!("  ({e})"));
        }
        s.push('\n');
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    s.push_str(&format!("{passed}/{} checks passed\n", reports.len()));
    s
}

fn cmd_converge(args: &ConvergeArgs, cfg: &CliConfig, io: &mut Io<'_>) -> Result<i32, Error> {
    let f = parse(&args.expr)?;
    let (a, b) = (parse_bound(&args.a)?, parse_bound(&args.b)?);
    let exact = args.exact.as_deref().map(parse_bound).transpose()?;
    if args.n_from == 0 || args.n_to < args.n_from {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n-from <= n-to, got {} and {}",
            args.n_from, args.n_to
        )));
    }
    if args.n_to > cfg.max_n {
        return Err(Error::InvalidArgument(format!(
            "n-to {} exceeds max-n {}",
            args.n_to, cfg.max_n
        )));
    }
    let ns: Vec<usize> = std::iter::successors(Some(args.n_from), |&n| n.checked_mul(2))
        .take_while(|&n| n <= args.n_to)
        .collect();
    let report = convergence_report(&f, a, b, &cfg.rule, &ns, exact)?;
    let text = match cfg.output {
        OutputFormat::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| json!({"n": r.n, "value": json_num(r.value), "diff": r.diff.map_or(Value::Null, json_num)}))
                .collect();
            format!(
                "{}\n",
                json!({"rows": rows, "estimated_order": json_num(report.estimated_order)})
            )
        }
        OutputFormat::Csv | OutputFormat::Human => report.to_csv(),
    };
    write_io(io.out.write_all(text.as_bytes()))?;
    Ok(EXIT_OK)
}

/// Digits printed by `eval` in human mode: enough to show the accuracy the
/// constructive functions reach.
const EVAL_DIGITS: usize = 16;

fn cmd_eval(args: &EvalArgs, cfg: &CliConfig, io: &mut Io<'_>) -> Result<i32, Error> {
    if !(args.eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {}",
            args.eps
        )));
    }
    let nums = args
        .args
        .iter()
        .map(|s| parse_bound(s))
        .collect::<Result<Vec<f64>, Error>>()?;
    let want = |n: usize| -> Result<(), Error> {
        if nums.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{} takes {n} argument(s), got {}",
                args.fname,
                nums.len()
            )))
        }
    };
    let name = args.fname.as_str();
    let result: ApproxOrValue = match name {
        "e" => {
            want(0)?;
            ApproxOrValue::Value(e_const(args.eps))
        }
        "log" => {
            want(1)?;
            ApproxOrValue::Approx(log_construct(nums[0], args.eps)?)
        }
        "exp" => {
            want(1)?;
            ApproxOrValue::Value(exp_construct(nums[0], args.eps))
        }
        "pow" => {
            want(2)?;
            ApproxOrValue::Value(pow_construct(nums[0], nums[1], args.eps)?)
        }
        "sinh" | "cosh" | "tanh" => {
            want(1)?;
            let kind = match name {
                "sinh" => Hyperbolic::Sinh,
                "cosh" => Hyperbolic::Cosh,
                _ => Hyperbolic::Tanh,
            };
            ApproxOrValue::Value(hyperbolic(kind, nums[0])?)
        }
        "arsinh" | "arcosh" | "artanh" | "arcsin" | "arctan" => {
            want(1)?;
            let kind: Inverse = name.parse()?;
            ApproxOrValue::Value(inverse_fn(kind, nums[0], args.eps)?)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown function {other:?}; expected one of log, exp, e, pow, sinh, cosh, tanh, arsinh, arcosh, artanh, arcsin, arctan"
            )))
        }
    };
    let (value, bound) = match result {
        ApproxOrValue::Approx(v) => (v.value, Some(v.bound)),
        ApproxOrValue::Value(v) => (v, None),
    };
    if !value.is_finite() {
        return Err(Error::Domain(format!(
            "{name} overflows for the given argument"
        )));
    }
    let text = match cfg.output {
        OutputFormat::Human => {
            let mut s = format!("{}\n", format_sig(value, EVAL_DIGITS));
            if let Some(b) = bound {
                s.push_str(&format!("bound {}\n", human_num(b)));
            }
            s
        }
        OutputFormat::Csv => format!(
            "function,value,bound\n{name},{},{}\n",
            csv_num(value),
            bound.map(csv_num).unwrap_or_default()
        ),
        OutputFormat::Json => format!(
            "{}\n",
            json!({"function": name, "value": json_num(value), "bound": bound.map_or(Value::Null, json_num)})
        ),
    };
    write_io(io.out.write_all(text.as_bytes()))?;
    Ok(EXIT_OK)
}

enum ApproxOrValue {
    Approx(ApproxValue),
    Value(f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("rf").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn max_n_precedence() {
        let none = |_: &str| None;
        let env64 = |k: &str| (k == "RF_MAX_N").then(|| "64".to_string());
        let c = cli(&["eval", "e"]);
        assert_eq!(config(&c, &none).unwrap().max_n, DEFAULT_MAX_N);
        assert_eq!(config(&c, &env64).unwrap().max_n, 64);
        let c = cli(&["--max-n", "128", "eval", "e"]);
        assert_eq!(config(&c, &env64).unwrap().max_n, 128);
    }

    #[test]
    fn bad_settings_are_rejected() {
        let none = |_: &str| None;
        for args in [
            &["--max-n", "100", "eval", "e"][..],
            &["--max-n", "32", "eval", "e"],
            &["--max-n", "134217728", "eval", "e"],
            &["--tol", "0", "eval", "e"],
            &["--tol=-1e-3", "eval", "e"],
        ] {
            assert!(config(&cli(args), &none).is_err(), "{args:?}");
        }
        let junk = |_: &str| Some("lots".to_string());
        assert!(config(&cli(&["eval", "e"]), &junk).is_err());
    }

    #[test]
    fn bounds_are_constant_expressions() {
        assert_eq!(parse_bound("-1").unwrap(), -1.0);
        assert_eq!(parse_bound("pi/2").unwrap(), std::f64::consts::FRAC_PI_2);
        assert!(matches!(parse_bound("t"), Err(Error::InvalidArgument(_))));
        assert!(matches!(parse_bound("1+"), Err(Error::Parse { .. })));
    }

    #[test]
    fn json_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(json_num(x).as_f64(), Some(x));
        }
        assert_eq!(json_num(f64::NAN), Value::Null);
        assert_eq!(json_num(f64::INFINITY), Value::Null);
    }
}

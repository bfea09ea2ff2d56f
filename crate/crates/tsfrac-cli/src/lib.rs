//! Command-line front end for the `tsfrac` crate: evaluate fractional
//! derivatives and integrals on time scales, compare the two chain
//! rules, verify the weighted integral inequalities on given or
//! randomized data, and scan any operator across a range of orders.
//!
//! Exit codes: 0 on success, 2 for usage and text-parse errors, 3 for
//! domain or evaluation errors, 4 when a verification run produced at
//! least one `satisfied = false` report. Results go to standard output
//! (`--output table` or `--output json`); errors go to standard error.

mod json;
pub mod trials;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tsfrac::{
    cauchy_schwarz, chain_rule_i, chain_rule_ii, frac_derivative, frac_integral,
    hermite_hadamard, holder, jensen, minkowski, reversed_holder, ChainReport, Density,
    DerivMethod, Error, Func, InequalityContext, InequalityReport, Shape, TimeScale,
};

use json::to_json_line;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A bad flag value noticed after clap has parsed the command line;
/// mapped to the usage exit code like any other malformed invocation.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

#[derive(Parser)]
#[command(
    name = "tsfrac",
    version,
    about = "Fractional calculus on time scales: derivatives, integrals, chain rules, inequality verification"
)]
struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = Output::Table)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Json,
}

impl Output {
    fn name(self) -> &'static str {
        match self {
            Output::Table => "table",
            Output::Json => "json",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fractional derivative of f at a point of the scale.
    Deriv(DerivArgs),
    /// Fractional integral of f over the half-open range [from, to).
    Integ(IntegArgs),
    /// First chain rule: derivative of f(g(.)) against its factored form.
    Chain1(Chain1Args),
    /// Second chain rule: factor through the image scale of nu.
    Chain2(Chain2Args),
    /// Check one inequality, or sample all of them on seeded instances.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Scan an operator across a range of orders.
    #[command(subcommand)]
    Sweep(SweepCmd),
}

#[derive(Args, Serialize)]
struct DerivArgs {
    /// Scale text, e.g. "Z:1..10", "h:0.5:1..4", "q:2:0..6",
    /// "set:{0.5,1,2.25}", "R:0..1", or a union(...) of those.
    #[arg(long)]
    scale: String,
    /// Order of the derivative, in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Function expression in the variable t.
    #[arg(long)]
    f: String,
    /// Scale point to differentiate at.
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
}

#[derive(Args, Serialize)]
struct IntegArgs {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Order of the integral, in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Function expression in the variable t.
    #[arg(long)]
    f: String,
    /// Lower end of the range.
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    /// Upper end of the range (excluded); below `from` flips the sign.
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
}

#[derive(Args, Serialize)]
struct Chain1Args {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Order, in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Outer function; must be symbolically differentiable.
    #[arg(long)]
    f: String,
    /// Inner function.
    #[arg(long)]
    g: String,
    /// Scale point to evaluate at.
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
}

#[derive(Args, Serialize)]
struct Chain2Args {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Order, in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Outer function, differentiated on the image scale.
    #[arg(long)]
    w: String,
    /// Inner function; must be strictly increasing on the scale.
    #[arg(long)]
    nu: String,
    /// Scale point to evaluate at.
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
    /// Tolerance of the rule's jump-compatibility hypothesis.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Weighted Holder comparison with exponent p > 1.
    Holder(ExponentArgs),
    /// Cauchy-Schwarz: Holder at p = 2, in square-root form.
    Cs(TripleArgs),
    /// Reversed Holder for p < 0 and f bounded away from zero.
    Rholder(ExponentArgs),
    /// Weighted Minkowski comparison with exponent p > 1.
    Minkowski(ExponentArgs),
    /// Jensen comparison for a convex or concave outer function.
    Jensen(JensenArgs),
    /// Weighted Hermite-Hadamard chain around the weighted center.
    Hh(HhArgs),
    /// Run every checker on seeded random instances.
    All(AllArgs),
}

#[derive(Args, Serialize)]
struct RangeArgs {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Order, in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Lower end of the range; the scale minimum when omitted.
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    /// Upper end of the range; the scale maximum when omitted.
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
}

#[derive(Args, Serialize)]
struct TripleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    range: RangeArgs,
    /// First function.
    #[arg(long)]
    f: String,
    /// Second function.
    #[arg(long)]
    g: String,
    /// Weight expression.
    #[arg(long, default_value = "1")]
    h: String,
}

#[derive(Args, Serialize)]
struct ExponentArgs {
    #[command(flatten)]
    #[serde(flatten)]
    triple: TripleArgs,
    /// Exponent.
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
}

#[derive(Args, Serialize)]
struct JensenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    range: RangeArgs,
    /// Convex or concave function applied to the weighted mean.
    #[arg(long)]
    f: String,
    /// Inner function whose weighted mean is taken.
    #[arg(long)]
    g: String,
    /// Weight expression.
    #[arg(long, default_value = "1")]
    h: String,
    /// Curvature override; detected from samples when omitted.
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
}

#[derive(Args, Serialize)]
struct HhArgs {
    #[command(flatten)]
    #[serde(flatten)]
    range: RangeArgs,
    /// Function whose mean is bracketed.
    #[arg(long)]
    f: String,
    /// Nonnegative weight expression.
    #[arg(long, default_value = "1")]
    w: String,
    /// Curvature override; detected from samples when omitted.
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
}

#[derive(Args, Serialize)]
struct AllArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 10)]
    trials: u64,
    /// RNG seed; falls back to the TSFRAC_SEED variable, then to 0.
    #[arg(long)]
    #[serde(skip)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ShapeArg {
    Convex,
    Concave,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Shape {
        match s {
            ShapeArg::Convex => Shape::Convex,
            ShapeArg::Concave => Shape::Concave,
        }
    }
}

#[derive(Subcommand)]
enum SweepCmd {
    /// Derivative of f at a fixed point, one row per order.
    Deriv(SweepDerivArgs),
    /// Integral of f over a fixed range, one row per order.
    Integ(SweepIntegArgs),
    /// First chain rule at a fixed point, one row per order.
    Chain1(SweepChain1Args),
    /// Second chain rule at a fixed point, one row per order.
    Chain2(SweepChain2Args),
}

#[derive(Args, Serialize)]
struct SweepDerivArgs {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Orders: START:STEP:END, or a single value.
    #[arg(long)]
    alphas: String,
    /// Function expression in the variable t.
    #[arg(long)]
    f: String,
    /// Scale point to differentiate at.
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
}

#[derive(Args, Serialize)]
struct SweepIntegArgs {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Orders: START:STEP:END, or a single value.
    #[arg(long)]
    alphas: String,
    /// Function expression in the variable t.
    #[arg(long)]
    f: String,
    /// Lower end of the range.
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    /// Upper end of the range (excluded).
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
}

#[derive(Args, Serialize)]
struct SweepChain1Args {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Orders: START:STEP:END, or a single value.
    #[arg(long)]
    alphas: String,
    /// Outer function; must be symbolically differentiable.
    #[arg(long)]
    f: String,
    /// Inner function.
    #[arg(long)]
    g: String,
    /// Scale point to evaluate at.
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
}

#[derive(Args, Serialize)]
struct SweepChain2Args {
    /// Scale text.
    #[arg(long)]
    scale: String,
    /// Orders: START:STEP:END, or a single value.
    #[arg(long)]
    alphas: String,
    /// Outer function, differentiated on the image scale.
    #[arg(long)]
    w: String,
    /// Inner function; must be strictly increasing on the scale.
    #[arg(long)]
    nu: String,
    /// Scale point to evaluate at.
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
    /// Tolerance of the rule's jump-compatibility hypothesis.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

/// Parses the command line, runs it, and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    }
}

/// Usage and text-parse problems exit with 2, everything else that the
/// library reports is a domain or evaluation failure and exits with 3.
fn classify(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::EmptyScale
            | Error::InvalidSegment(_)
            | Error::InvalidAlpha { .. }
            | Error::InvalidExponent { .. }
            | Error::EmptyRange { .. },
        ) => 2,
        _ => 3,
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    command: &'static str,
    config: &'a C,
    results: Vec<R>,
    version: &'static str,
}

#[derive(Serialize)]
struct ConfigEcho<'a, A: Serialize> {
    #[serde(flatten)]
    args: &'a A,
    output: &'static str,
}

fn emit<C: Serialize, R: Serialize>(
    command: &'static str,
    config: &C,
    results: Vec<R>,
) -> String {
    to_json_line(&Envelope { command, config, results, version: VERSION })
}

fn dispatch(cli: &Cli) -> anyhow::Result<i32> {
    let out = cli.output;
    match &cli.command {
        Command::Deriv(args) => run_deriv(args, out),
        Command::Integ(args) => run_integ(args, out),
        Command::Chain1(args) => run_chain1(args, out),
        Command::Chain2(args) => run_chain2(args, out),
        Command::Verify(cmd) => run_verify(cmd, out),
        Command::Sweep(cmd) => run_sweep(cmd, out),
    }
}

fn method_name(m: DerivMethod) -> &'static str {
    match m {
        DerivMethod::ScatteredQuotient => "scattered-quotient",
        DerivMethod::SymbolicDense => "symbolic-dense",
        DerivMethod::FiniteDifferenceDense => "finite-difference-dense",
        DerivMethod::LimitAtZero => "limit-at-zero",
    }
}

fn density_name(side: &str, d: Density) -> String {
    match d {
        Density::Scattered => format!("{side}-scattered"),
        Density::Dense => format!("{side}-dense"),
    }
}

fn run_deriv(args: &DerivArgs, out: Output) -> anyhow::Result<i32> {
    let ts: TimeScale = args.scale.parse()?;
    let f = Func::from_text(&args.f)?;
    let r = frac_derivative(&f, &ts, args.at, args.alpha)?;
    match out {
        Output::Json => {
            let config = ConfigEcho { args, output: out.name() };
            print!("{}", emit("deriv", &config, vec![r]));
        }
        Output::Table => {
            println!("derivative of {} at t = {} on {}", args.f, args.at, args.scale);
            println!("  order   {}", r.alpha);
            println!("  value   {}", r.value);
            println!("  class   {}", density_name("right", r.point_class.right));
            println!("  method  {}", method_name(r.method));
        }
    }
    Ok(0)
}

fn run_integ(args: &IntegArgs, out: Output) -> anyhow::Result<i32> {
    let ts: TimeScale = args.scale.parse()?;
    let f = Func::from_text(&args.f)?;
    let r = frac_integral(&f, &ts, args.from, args.to, args.alpha)?;
    match out {
        Output::Json => {
            let config = ConfigEcho { args, output: out.name() };
            print!("{}", emit("integ", &config, vec![r]));
        }
        Output::Table => {
            println!(
                "integral of {} over [{}, {}) on {}",
                args.f, args.from, args.to, args.scale
            );
            println!("  order            {}", args.alpha);
            println!("  value            {}", r.value);
            println!("  discrete part    {}", r.discrete_part);
            println!("  continuous part  {}", r.continuous_part);
            println!("  error estimate   {:e}", r.abs_error_estimate);
        }
    }
    Ok(0)
}

fn print_chain_table(r: &ChainReport) {
    println!("  lhs         {}", r.lhs);
    println!("  rhs         {}", r.rhs);
    println!("  gap         {:e}", r.abs_gap);
    println!("  hypothesis  {}", if r.hypothesis_ok { "holds" } else { "fails" });
    println!("  quad error  {:e}", r.quadrature_error);
}

fn run_chain1(args: &Chain1Args, out: Output) -> anyhow::Result<i32> {
    let ts: TimeScale = args.scale.parse()?;
    let f = Func::from_text(&args.f)?;
    let g = Func::from_text(&args.g)?;
    let r = chain_rule_i(&f, &g, &ts, args.at, args.alpha)?;
    match out {
        Output::Json => {
            let config = ConfigEcho { args, output: out.name() };
            print!("{}", emit("chain1", &config, vec![r]));
        }
        Output::Table => {
            println!(
                "first chain rule for {} after {} at t = {} (order {})",
                args.f, args.g, args.at, args.alpha
            );
            print_chain_table(&r);
        }
    }
    Ok(0)
}

fn run_chain2(args: &Chain2Args, out: Output) -> anyhow::Result<i32> {
    let ts: TimeScale = args.scale.parse()?;
    let w = Func::from_text(&args.w)?;
    let nu = Func::from_text(&args.nu)?;
    let r = chain_rule_ii(&w, &nu, &ts, args.at, args.alpha, args.epsilon)?;
    match out {
        Output::Json => {
            let config = ConfigEcho { args, output: out.name() };
            print!("{}", emit("chain2", &config, vec![r]));
        }
        Output::Table => {
            println!(
                "second chain rule for {} after {} at t = {} (order {})",
                args.w, args.nu, args.at, args.alpha
            );
            print_chain_table(&r);
        }
    }
    Ok(0)
}

/// Renders one report and picks the exit code: 4 when violated.
fn finish_verify<C: Serialize>(
    check: &'static str,
    config: &C,
    report: InequalityReport,
    out: Output,
) -> anyhow::Result<i32> {
    let code = if report.satisfied { 0 } else { 4 };
    match out {
        Output::Json => print!("{}", emit("verify", config, vec![report])),
        Output::Table => {
            println!(
                "{check}: {}",
                if report.satisfied { "satisfied" } else { "VIOLATED" }
            );
            println!("  lhs         {}", report.lhs);
            println!("  rhs         {}", report.rhs);
            println!("  slack       {}", report.slack);
            println!("  quad error  {:e}", report.quadrature_error);
            if let Some(shape) = report.shape {
                println!(
                    "  shape       {}",
                    match shape {
                        Shape::Convex => "convex",
                        Shape::Concave => "concave",
                    }
                );
            }
            if let Some(chain) = report.chain {
                println!("  lower       {}", chain.lower);
                println!("  mid         {}", chain.mid);
                println!("  upper       {}", chain.upper);
                println!("  center      {}", chain.center);
            }
        }
    }
    Ok(code)
}

#[derive(Serialize)]
struct CheckConfig<'a, A: Serialize> {
    check: &'static str,
    #[serde(flatten)]
    args: &'a A,
    output: &'static str,
}

fn context_of<'t>(range: &RangeArgs, ts: &'t TimeScale) -> InequalityContext<'t> {
    InequalityContext {
        ts,
        a: range.from.unwrap_or_else(|| ts.min()),
        b: range.to.unwrap_or_else(|| ts.max()),
        alpha: range.alpha,
    }
}

fn run_verify(cmd: &VerifyCmd, out: Output) -> anyhow::Result<i32> {
    match cmd {
        VerifyCmd::Holder(args) => {
            let ts: TimeScale = args.triple.range.scale.parse()?;
            let cx = context_of(&args.triple.range, &ts);
            let f = Func::from_text(&args.triple.f)?;
            let g = Func::from_text(&args.triple.g)?;
            let h = Func::from_text(&args.triple.h)?;
            let report = holder(&f, &g, &h, args.p, &cx)?;
            let config = CheckConfig { check: "holder", args, output: out.name() };
            finish_verify("holder", &config, report, out)
        }
        VerifyCmd::Cs(args) => {
            let ts: TimeScale = args.range.scale.parse()?;
            let cx = context_of(&args.range, &ts);
            let f = Func::from_text(&args.f)?;
            let g = Func::from_text(&args.g)?;
            let h = Func::from_text(&args.h)?;
            let report = cauchy_schwarz(&f, &g, &h, &cx)?;
            let config = CheckConfig { check: "cs", args, output: out.name() };
            finish_verify("cauchy-schwarz", &config, report, out)
        }
        VerifyCmd::Rholder(args) => {
            let ts: TimeScale = args.triple.range.scale.parse()?;
            let cx = context_of(&args.triple.range, &ts);
            let f = Func::from_text(&args.triple.f)?;
            let g = Func::from_text(&args.triple.g)?;
            let h = Func::from_text(&args.triple.h)?;
            let report = reversed_holder(&f, &g, &h, args.p, &cx)?;
            let config = CheckConfig { check: "rholder", args, output: out.name() };
            finish_verify("reversed-holder", &config, report, out)
        }
        VerifyCmd::Minkowski(args) => {
            let ts: TimeScale = args.triple.range.scale.parse()?;
            let cx = context_of(&args.triple.range, &ts);
            let f = Func::from_text(&args.triple.f)?;
            let g = Func::from_text(&args.triple.g)?;
            let h = Func::from_text(&args.triple.h)?;
            let report = minkowski(&f, &g, &h, args.p, &cx)?;
            let config = CheckConfig { check: "minkowski", args, output: out.name() };
            finish_verify("minkowski", &config, report, out)
        }
        VerifyCmd::Jensen(args) => {
            let ts: TimeScale = args.range.scale.parse()?;
            let cx = context_of(&args.range, &ts);
            let phi = Func::from_text(&args.f)?;
            let g = Func::from_text(&args.g)?;
            let h = Func::from_text(&args.h)?;
            let report = jensen(&g, &h, &phi, args.shape.map(Shape::from), &cx)?;
            let config = CheckConfig { check: "jensen", args, output: out.name() };
            finish_verify("jensen", &config, report, out)
        }
        VerifyCmd::Hh(args) => {
            let ts: TimeScale = args.range.scale.parse()?;
            let cx = context_of(&args.range, &ts);
            let f = Func::from_text(&args.f)?;
            let w = Func::from_text(&args.w)?;
            let report = hermite_hadamard(&f, &w, args.shape.map(Shape::from), &cx)?;
            let config = CheckConfig { check: "hh", args, output: out.name() };
            finish_verify("hermite-hadamard", &config, report, out)
        }
        VerifyCmd::All(args) => run_verify_all(args, out),
    }
}

#[derive(Serialize)]
struct AllConfig {
    check: &'static str,
    trials: u64,
    seed: u64,
    output: &'static str,
}

#[derive(Serialize)]
struct TrialRecord {
    #[serde(flatten)]
    draw: trials::TrialDraw,
    reports: Vec<trials::LabeledReport>,
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, UsageError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("TSFRAC_SEED") {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            UsageError(format!("TSFRAC_SEED must be an unsigned integer, got `{text}`"))
        }),
        Err(_) => Ok(0),
    }
}

fn run_verify_all(args: &AllArgs, out: Output) -> anyhow::Result<i32> {
    if args.trials == 0 {
        return Err(UsageError("--trials must be at least 1".into()).into());
    }
    let seed = resolve_seed(args.seed)?;
    let mut records = Vec::with_capacity(args.trials as usize);
    let mut violations = 0usize;
    for trial in 0..args.trials {
        let draw = trials::draw(seed, trial);
        let reports = trials::run_trial(&draw)?;
        violations += reports.iter().filter(|r| !r.report.satisfied).count();
        records.push(TrialRecord { draw, reports });
    }
    let config =
        AllConfig { check: "all", trials: args.trials, seed, output: out.name() };
    match out {
        Output::Json => print!("{}", emit("verify", &config, records)),
        Output::Table => {
            for record in &records {
                for labeled in &record.reports {
                    println!(
                        "trial {:>4}  {:<17} {}  slack {:e}",
                        record.draw.trial,
                        labeled.check,
                        if labeled.report.satisfied { "ok       " } else { "VIOLATED " },
                        labeled.report.slack,
                    );
                }
            }
            println!(
                "{} trials, {} checks, {} violations (seed {})",
                args.trials,
                args.trials * 7,
                violations,
                seed,
            );
        }
    }
    Ok(if violations > 0 { 4 } else { 0 })
}

/// Expands `START:STEP:END` (or a single number) into the list of
/// orders to scan. An empty expansion is a usage error.
fn parse_alphas(text: &str) -> Result<Vec<f64>, UsageError> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| UsageError(format!("`{p}` in --alphas is not a number")))
        })
        .collect::<Result<_, _>>()?;
    match nums[..] {
        [single] => Ok(vec![single]),
        [start, step, end] => {
            if step.is_nan() || step <= 0.0 {
                return Err(UsageError("--alphas step must be positive".into()));
            }
            let mut orders = Vec::new();
            for k in 0.. {
                let alpha = start + step * k as f64;
                if alpha > end + 1e-12 {
                    break;
                }
                orders.push(alpha);
            }
            if orders.is_empty() {
                return Err(UsageError(format!("--alphas {text} expands to no orders")));
            }
            Ok(orders)
        }
        _ => Err(UsageError("--alphas expects START:STEP:END or a single order".into())),
    }
}

#[derive(Serialize)]
struct DerivRow {
    alpha: f64,
    value: f64,
}

#[derive(Serialize)]
struct IntegRow {
    alpha: f64,
    value: f64,
    abs_error_estimate: f64,
}

#[derive(Serialize)]
struct ChainRow {
    alpha: f64,
    lhs: f64,
    rhs: f64,
    abs_gap: f64,
    hypothesis_ok: bool,
}

#[derive(Serialize)]
struct SweepConfig<'a, A: Serialize> {
    operator: &'static str,
    #[serde(flatten)]
    args: &'a A,
    output: &'static str,
}

fn run_sweep(cmd: &SweepCmd, out: Output) -> anyhow::Result<i32> {
    match cmd {
        SweepCmd::Deriv(args) => {
            let ts: TimeScale = args.scale.parse()?;
            let f = Func::from_text(&args.f)?;
            let mut rows = Vec::new();
            for alpha in parse_alphas(&args.alphas)? {
                let r = frac_derivative(&f, &ts, args.at, alpha)?;
                rows.push(DerivRow { alpha, value: r.value });
            }
            let config = SweepConfig { operator: "deriv", args, output: out.name() };
            match out {
                Output::Json => print!("{}", emit("sweep", &config, rows)),
                Output::Table => {
                    println!("derivative of {} at t = {} on {}", args.f, args.at, args.scale);
                    for row in &rows {
                        println!("  alpha {:<22} value {}", row.alpha, row.value);
                    }
                }
            }
            Ok(0)
        }
        SweepCmd::Integ(args) => {
            let ts: TimeScale = args.scale.parse()?;
            let f = Func::from_text(&args.f)?;
            let mut rows = Vec::new();
            for alpha in parse_alphas(&args.alphas)? {
                let r = frac_integral(&f, &ts, args.from, args.to, alpha)?;
                rows.push(IntegRow {
                    alpha,
                    value: r.value,
                    abs_error_estimate: r.abs_error_estimate,
                });
            }
            let config = SweepConfig { operator: "integ", args, output: out.name() };
            match out {
                Output::Json => print!("{}", emit("sweep", &config, rows)),
                Output::Table => {
                    println!(
                        "integral of {} over [{}, {}) on {}",
                        args.f, args.from, args.to, args.scale
                    );
                    for row in &rows {
                        println!("  alpha {:<22} value {}", row.alpha, row.value);
                    }
                }
            }
            Ok(0)
        }
        SweepCmd::Chain1(args) => {
            let ts: TimeScale = args.scale.parse()?;
            let f = Func::from_text(&args.f)?;
            let g = Func::from_text(&args.g)?;
            let mut rows = Vec::new();
            for alpha in parse_alphas(&args.alphas)? {
                let r = chain_rule_i(&f, &g, &ts, args.at, alpha)?;
                rows.push(ChainRow {
                    alpha,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    abs_gap: r.abs_gap,
                    hypothesis_ok: r.hypothesis_ok,
                });
            }
            let config = SweepConfig { operator: "chain1", args, output: out.name() };
            match out {
                Output::Json => print!("{}", emit("sweep", &config, rows)),
                Output::Table => {
                    println!(
                        "first chain rule for {} after {} at t = {} on {}",
                        args.f, args.g, args.at, args.scale
                    );
                    for row in &rows {
                        println!(
                            "  alpha {:<22} lhs {:<24} rhs {:<24} gap {:e}",
                            row.alpha, row.lhs, row.rhs, row.abs_gap
                        );
                    }
                }
            }
            Ok(0)
        }
        SweepCmd::Chain2(args) => {
            let ts: TimeScale = args.scale.parse()?;
            let w = Func::from_text(&args.w)?;
            let nu = Func::from_text(&args.nu)?;
            let mut rows = Vec::new();
            for alpha in parse_alphas(&args.alphas)? {
                let r = chain_rule_ii(&w, &nu, &ts, args.at, alpha, args.epsilon)?;
                rows.push(ChainRow {
                    alpha,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    abs_gap: r.abs_gap,
                    hypothesis_ok: r.hypothesis_ok,
                });
            }
            let config = SweepConfig { operator: "chain2", args, output: out.name() };
            match out {
                Output::Json => print!("{}", emit("sweep", &config, rows)),
                Output::Table => {
                    println!(
                        "second chain rule for {} after {} at t = {} on {}",
                        args.w, args.nu, args.at, args.scale
                    );
                    for row in &rows {
                        println!(
                            "  alpha {:<22} lhs {:<24} rhs {:<24} hypothesis {}",
                            row.alpha,
                            row.lhs,
                            row.rhs,
                            if row.hypothesis_ok { "holds" } else { "fails" }
                        );
                    }
                }
            }
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_ranges_expand_inclusively() {
        assert_eq!(parse_alphas("0.5:0.25:1.0").unwrap(), vec![0.5, 0.75, 1.0]);
        assert_eq!(parse_alphas("0.75").unwrap(), vec![0.75]);
        assert!(parse_alphas("0.9:0.1:0.5").is_err());
        assert!(parse_alphas("0.1:0:0.5").is_err());
        assert!(parse_alphas("a:b").is_err());
    }

    #[test]
    fn error_classification_matches_the_exit_contract() {
        let usage: anyhow::Error = UsageError("bad".into()).into();
        assert_eq!(classify(&usage), 2);
        let parse: anyhow::Error = Error::Syntax { offset: 0, message: "x".into() }.into();
        assert_eq!(classify(&parse), 2);
        let exponent: anyhow::Error = Error::InvalidExponent { p: 1.0 }.into();
        assert_eq!(classify(&exponent), 2);
        let domain: anyhow::Error = Error::PointNotInScale { point: 99.0 }.into();
        assert_eq!(classify(&domain), 3);
        let quad: anyhow::Error =
            Error::QuadratureFailure { achieved: 1.0, requested: 0.5 }.into();
        assert_eq!(classify(&quad), 3);
    }

    #[test]
    fn command_line_grammar_parses_the_documented_forms() {
        Cli::try_parse_from([
            "tsfrac", "deriv", "--scale", "Z:1..10", "--alpha", "0.5", "--f", "t^2", "--at", "4",
        ])
        .unwrap();
        Cli::try_parse_from([
            "tsfrac", "verify", "hh", "--scale", "Z:1..5", "--alpha", "0.5", "--f", "t^2", "--w",
            "1",
        ])
        .unwrap();
        Cli::try_parse_from([
            "tsfrac", "verify", "all", "--trials", "100", "--seed", "42", "--output", "json",
        ])
        .unwrap();
        Cli::try_parse_from([
            "tsfrac", "sweep", "deriv", "--scale", "Z:1..10", "--alphas", "0.5:0.25:1.0", "--f",
            "t^2", "--at", "4",
        ])
        .unwrap();
        assert!(Cli::try_parse_from(["tsfrac", "frobnicate"]).is_err());
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 diverging estimate,
//! 3 exhausted budget, 4 failed checks. Results go to stdout, diagnostics to
//! stderr. Output is a pure function of the arguments.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::bv::{bv_two_norm_2g, BvFunction};
use crate::error::{Error, Result};
use crate::expr::parse_constant;
use crate::function::{parse_function, CatalogId, FunctionSpec, Interval};
use crate::harness::{
    check_2g_axioms, check_pairing_axioms, check_variation_theorems, AxiomReport,
};
use crate::spaces::{make_euclidean_modulus, make_modulus_product, pairing_by_name, Pairing};
use crate::variation::{
    estimate_variation, RefineConfig, Status, Strategy, TraceEntry, VariationEstimate,
};
use crate::vector::ComplexVector;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIVERGING: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Default partition budget of the `check` command; the full default makes
/// the theorem suite slow without changing its verdicts.
const CHECK_MAX_POINTS: usize = 4096;

#[derive(Debug, Parser)]
#[command(
    name = "bivar",
    version,
    about = "Variation of curves measured through generalized two-norms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the variation of one function.
    Variation(VariationArgs),
    /// Evaluate the bounded-variation two-norm of two functions.
    Bvnorm(BvnormArgs),
    /// Run the randomized axiom and theorem checks.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Axioms,
    Theorems,
    #[value(name = "2g")]
    TwoG,
    All,
}

#[derive(Debug, Args)]
struct Common {
    /// Interval as `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    /// Constant second argument, e.g. `sqrt(2)` or `-i/2`.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long)]
    pairing: Option<String>,
    #[arg(long)]
    gain_tol: Option<f64>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    divergence_cap: Option<f64>,
    #[arg(long)]
    divergence_levels: Option<usize>,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    #[arg(long)]
    probe_depth: Option<u32>,
    #[arg(long, value_enum)]
    output: Option<Output>,
    #[arg(long)]
    seed: Option<u64>,
    /// File of `key=value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VariationArgs {
    /// Catalog name or expression in `t`.
    #[arg(long = "fn", allow_hyphen_values = true)]
    function: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BvnormArgs {
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, allow_hyphen_values = true)]
    h: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Keys accepted in a `--config` file.
const CONFIG_KEYS: &[&str] = &[
    "function",
    "pairing",
    "k",
    "interval",
    "gain_tol",
    "max_points",
    "divergence_cap",
    "divergence_levels",
    "strategy",
    "probe_depth",
    "output",
    "seed",
];

/// Settings after merging flags, the config file, and defaults.
#[derive(Debug, Clone)]
struct Settings {
    function: Option<String>,
    pairing_name: String,
    pairing: Pairing,
    k_text: String,
    k: ComplexVector,
    interval: Interval,
    refine: RefineConfig,
    output: Output,
    seed: u64,
}

fn read_config(path: &PathBuf) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
        let key = key.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "line {}: unknown key `{key}`",
                n + 1
            )));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for {key}")))
}

fn parse_interval(text: &str) -> Result<Interval> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("interval `{text}` is not of the form lo,hi")))?;
    Interval::new(
        parse_value("interval", lo.trim())?,
        parse_value("interval", hi.trim())?,
    )
}

fn parse_k(text: &str) -> Result<ComplexVector> {
    ComplexVector::new(parse_constant(text)?)
}

fn resolve(
    common: &Common,
    function: Option<&str>,
    defaults: (&str, &str, RefineConfig),
) -> Result<Settings> {
    let file = match &common.config {
        Some(path) => read_config(path)?,
        None => Vec::new(),
    };
    let from_file = |key: &str| {
        file.iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
    };

    let (default_interval, default_k, mut refine) = defaults;
    let pairing_name = common
        .pairing
        .clone()
        .or_else(|| from_file("pairing"))
        .unwrap_or("euclidean-modulus".into());
    let k_text = common
        .k
        .clone()
        .or_else(|| from_file("k"))
        .unwrap_or(default_k.into());
    let interval_text = common
        .interval
        .clone()
        .or_else(|| from_file("interval"))
        .unwrap_or(default_interval.into());

    macro_rules! field {
        ($name:ident) => {
            if let Some(v) = common.$name {
                refine.$name = v;
            } else if let Some(v) = from_file(stringify!($name)) {
                refine.$name = parse_value(stringify!($name), &v)?;
            }
        };
    }
    field!(gain_tol);
    field!(max_points);
    field!(divergence_cap);
    field!(divergence_levels);
    field!(strategy);
    field!(probe_depth);
    refine.validate()?;

    let output = match (common.output, from_file("output")) {
        (Some(o), _) => o,
        (None, Some(v)) => Output::from_str(&v, false)
            .map_err(|_| Error::Config(format!("invalid output `{v}`")))?,
        (None, None) => Output::Json,
    };
    let seed = match (common.seed, from_file("seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => parse_value("seed", &v)?,
        (None, None) => 0,
    };

    Ok(Settings {
        function: function
            .map(str::to_string)
            .or_else(|| from_file("function")),
        pairing: pairing_by_name(&pairing_name)?,
        pairing_name,
        k: parse_k(&k_text)?,
        k_text,
        interval: parse_interval(&interval_text)?,
        refine,
        output,
        seed,
    })
}

fn function_for(text: &str, s: &Settings) -> Result<FunctionSpec> {
    parse_function(text, s.pairing.dim_a(), s.interval)
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    function: Option<&'a str>,
    pairing: &'a str,
    k: &'a str,
    interval: [f64; 2],
    gain_tol: f64,
    max_points: usize,
    divergence_cap: f64,
    divergence_levels: usize,
    strategy: Strategy,
    probe_depth: u32,
    seed: u64,
}

impl<'a> ConfigEcho<'a> {
    fn new(s: &'a Settings, function: Option<&'a str>) -> Self {
        let r = &s.refine;
        Self {
            function,
            pairing: &s.pairing_name,
            k: &s.k_text,
            interval: [s.interval.lo(), s.interval.hi()],
            gain_tol: r.gain_tol,
            max_points: r.max_points,
            divergence_cap: r.divergence_cap,
            divergence_levels: r.divergence_levels,
            strategy: r.strategy,
            probe_depth: r.probe_depth,
            seed: s.seed,
        }
    }
}

#[derive(Serialize)]
struct VariationDoc<'a> {
    value: f64,
    status: Status,
    trace: &'a [TraceEntry],
    partition_size: usize,
    config: ConfigEcho<'a>,
}

#[derive(Serialize)]
struct BvnormDoc {
    value: Option<f64>,
    #[serde(rename = "Vf")]
    vf: f64,
    #[serde(rename = "Vh")]
    vh: f64,
    status: Status,
}

fn exit_for(status: Status) -> i32 {
    match status {
        Status::Converged => EXIT_OK,
        Status::Diverging => EXIT_DIVERGING,
        Status::BudgetExhausted => EXIT_BUDGET,
    }
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn cmd_variation(args: &VariationArgs) -> Result<(i32, String)> {
    let s = resolve(
        &args.common,
        args.function.as_deref(),
        ("0,1", "1", RefineConfig::default()),
    )?;
    let text = s
        .function
        .clone()
        .ok_or_else(|| Error::Config("missing --fn".into()))?;
    let g = function_for(&text, &s)?;
    let est = estimate_variation(&g, &*s.pairing, &s.k, &s.refine)?;
    let out = match s.output {
        Output::Json => json(&VariationDoc {
            value: est.value,
            status: est.status,
            trace: &est.trace,
            partition_size: est.final_partition.len(),
            config: ConfigEcho::new(&s, Some(&text)),
        }),
        Output::Csv => trace_csv(&est),
        Output::Pretty => {
            let mut out = String::new();
            writeln!(out, "function   {text}").unwrap();
            writeln!(out, "pairing    {}  k = {}", s.pairing_name, s.k_text).unwrap();
            writeln!(out, "interval   {}", s.interval).unwrap();
            writeln!(out, "value      {}", est.value).unwrap();
            writeln!(out, "status     {}", est.status).unwrap();
            writeln!(out, "levels     {}", est.trace.len() - 1).unwrap();
            writeln!(out, "points     {}", est.final_partition.len()).unwrap();
            out
        }
    };
    Ok((exit_for(est.status), out))
}

fn trace_csv(est: &VariationEstimate) -> String {
    let mut out = String::from("level,points,sum\n");
    for e in &est.trace {
        writeln!(out, "{},{},{}", e.level, e.points, e.sum).unwrap();
    }
    out
}

fn cmd_bvnorm(args: &BvnormArgs) -> Result<(i32, String)> {
    let s = resolve(&args.common, None, ("0,1", "1", RefineConfig::default()))?;
    let f = function_for(&args.f, &s)?;
    let h = function_for(&args.h, &s)?;
    let vf = estimate_variation(&f, &*s.pairing, &s.k, &s.refine)?;
    let vh = estimate_variation(&h, &*s.pairing, &s.k, &s.refine)?;
    let status = [vf.status, vh.status]
        .into_iter()
        .max_by_key(|st| match st {
            Status::Converged => 0,
            Status::BudgetExhausted => 1,
            Status::Diverging => 2,
        })
        .expect("two statuses");
    let value = if status == Status::Converged {
        let f = BvFunction::new(f, s.pairing.clone(), s.k.clone(), s.refine)?;
        let h = BvFunction::new(h, s.pairing.clone(), s.k.clone(), s.refine)?;
        Some(bv_two_norm_2g(&f, &h)?)
    } else {
        None
    };
    let doc = BvnormDoc {
        value,
        vf: vf.value,
        vh: vh.value,
        status,
    };
    let out = match s.output {
        Output::Json => json(&doc),
        Output::Csv => {
            let v = value.map_or(String::new(), |v| v.to_string());
            format!(
                "value,Vf,Vh,status\n{v},{},{},{}\n",
                vf.value, vh.value, status
            )
        }
        Output::Pretty => {
            let v = value.map_or("undefined".to_string(), |v| v.to_string());
            format!(
                "||f, h||_2G = {v}\nV(f) = {} ({})\nV(h) = {} ({})\n",
                vf.value, vf.status, vh.value, vh.status
            )
        }
    };
    Ok((exit_for(status), out))
}

fn prefixed(mut report: AxiomReport, prefix: &str) -> AxiomReport {
    for c in &mut report.checks {
        c.name = format!("{prefix}:{}", c.name);
    }
    report
}

/// Converged functions used by the `2g` suite.
fn two_g_functions(s: &Settings) -> Result<Vec<BvFunction>> {
    let dim = s.pairing.dim_a();
    let mut specs = Vec::new();
    for id in [
        CatalogId::LinearIi,
        CatalogId::MonotoneId,
        CatalogId::ConstC,
    ] {
        if id.dim() <= dim {
            specs.push(FunctionSpec::catalog(id, s.interval).embedded(dim)?);
        }
    }
    specs.push(FunctionSpec::constant(
        &ComplexVector::zeros(dim),
        s.interval,
    ));
    let mut fs = specs
        .into_iter()
        .map(|g| BvFunction::new(g, s.pairing.clone(), s.k.clone(), s.refine))
        .collect::<Result<Vec<_>>>()?;
    fs.push(fs[0].scaled_formula(Complex64::new(2.0, 0.0)));
    Ok(fs)
}

fn cmd_check(args: &CheckArgs) -> Result<(i32, String)> {
    let defaults = RefineConfig {
        max_points: CHECK_MAX_POINTS,
        ..RefineConfig::default()
    };
    let s = resolve(&args.common, None, ("0,1", "sqrt(2)", defaults))?;
    let run = |suite: Suite| matches!(args.suite, Suite::All) || args.suite == suite;

    let mut report = AxiomReport {
        checks: Vec::new(),
        seed: s.seed,
    };
    if args.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if run(Suite::Axioms) {
        let pairings: Vec<(String, Pairing)> = match &args.common.pairing {
            Some(_) => vec![(s.pairing_name.clone(), s.pairing.clone())],
            None => vec![
                ("euclidean-modulus".into(), make_euclidean_modulus()),
                ("modulus-product".into(), make_modulus_product()),
            ],
        };
        for (name, p) in pairings {
            let r = check_pairing_axioms(&*p, p.is_symmetric(), args.trials, s.seed)?;
            report.extend(prefixed(r, &name));
        }
    }
    if run(Suite::Theorems) {
        let names: Vec<&str> = CatalogId::ALL
            .iter()
            .filter(|id| id.dim() <= s.pairing.dim_a())
            .map(|id| id.name())
            .collect();
        let r =
            check_variation_theorems(&names, &*s.pairing, &s.k, &s.refine, s.seed, args.trials)?;
        report.extend(prefixed(r, "theorems"));
    }
    if run(Suite::TwoG) {
        let r = check_2g_axioms(&two_g_functions(&s)?, args.trials, s.seed)?;
        report.extend(prefixed(r, "2g"));
    }

    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let out = match s.output {
        Output::Json => json(&report),
        Output::Csv => {
            let mut out = String::from("name,trials,failures\n");
            for c in &report.checks {
                writeln!(out, "{},{},{}", c.name, c.trials, c.failures).unwrap();
            }
            out
        }
        Output::Pretty => {
            let mut out = String::new();
            for c in &report.checks {
                let verdict = if c.passed() { "ok" } else { "FAILED" };
                writeln!(
                    out,
                    "{:<40} {:>6} trials {:>6} failures  {verdict}",
                    c.name, c.trials, c.failures
                )
                .unwrap();
                if let Some(w) = &c.worst_witness {
                    writeln!(out, "    lhs {} > rhs {}  at {}", w.lhs, w.rhs, w.inputs).unwrap();
                }
            }
            out
        }
    };
    Ok((code, out))
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Variation(a) => cmd_variation(a),
        Command::Bvnorm(a) => cmd_bvnorm(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok((code, out)) => {
            let _ = stdout.write_all(out.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

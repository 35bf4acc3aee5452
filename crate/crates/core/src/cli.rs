//! The `thetafact` command line.
//!
//! Exit codes: 0 success, 1 an identity failed, 2 a dimension did not round
//! to an integer, 3 unbounded enumeration, 64 usage or guard violation,
//! 74 the `--out` file could not be written.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use serde_json::{json, Value};

use crate::factorization::{
    verify_beta_dim_compat, verify_degeneration, verify_main_theorem_dims, verify_unitarity, verify_zagier,
    verify_zagier_matrix, IdentityReport, RhsVariant,
};
use crate::gluing::{build_graded_space, random_betas, verify_gluing, DimSource};
use crate::indexsets::{
    enumerate_a_delta, enumerate_a_double_prime, enumerate_a_general, enumerate_a_pq, enumerate_a_prime,
    enumerate_sa_prime, BundleExponents, LabelPair, StratumIndex,
};
use crate::verlinde::{DimensionResult, VerlindeTable, DEFAULT_TOLERANCE};
use crate::{Error, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILED: i32 = 1;
pub const EXIT_ROUNDING: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

pub const TOLERANCE_ENV: &str = "THETAFACT_TOLERANCE";

#[derive(Debug, Parser)]
#[command(name = "thetafact", version, about = "Verlinde dimensions, DFT-minor identities and an exact gluing model")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Arithmetic route for identity checks.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,

    /// Relative tolerance for rounding and float comparisons.
    #[arg(long, global = true, env = TOLERANCE_ENV, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,

    /// Seed for the random gluing maps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a dimension.
    Dim {
        #[arg(value_enum)]
        target: DimTarget,
        #[command(flatten)]
        args: DimArgs,
    },
    /// List an index set.
    Enumerate {
        #[arg(value_enum)]
        set: SetKind,
        #[command(flatten)]
        args: EnumArgs,
    },
    /// Run an identity suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        args: VerifyArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DimTarget {
    Svb,
    Spb,
    Vb,
    Pb,
    Gvb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SetKind {
    Aprime,
    Adoubleprime,
    Saprime,
    Adelta,
    Apq,
    Ageneral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Degeneration,
    Zagier,
    ZagierMatrix,
    Unitarity,
    BetaCompat,
    Main,
    Gluing,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RhsArg {
    Corrected,
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DimsArg {
    Unit,
    Verlinde,
}

#[derive(Debug, Args)]
struct DimArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long, default_value_t = 2)]
    genus: u32,
    /// `a′` for `spb`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    aprime: Option<Vec<i64>>,
    /// `a` for `pb`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<i64>>,
    /// `b` for `pb`; defaults to `b_i = κ − a_{n−i+1}`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
struct EnumArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<i64>,
    /// Stratum set `I`, comma separated; a bare `--I` means the empty set.
    #[arg(long = "I", num_args = 0..=1, default_missing_value = "")]
    i_set: Option<String>,
    /// Stratum set `J`, comma separated; a bare `--J` means the empty set.
    #[arg(long = "J", num_args = 0..=1, default_missing_value = "")]
    j_set: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    primed: bool,
    #[arg(long = "m-exp", value_delimiter = ',', allow_hyphen_values = true)]
    m_exp: Option<Vec<i64>>,
    #[arg(long = "l-exp", value_delimiter = ',', allow_hyphen_values = true)]
    l_exp: Option<Vec<i64>>,
    #[arg(long, allow_hyphen_values = true)]
    e: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<i64>,
    /// Print only the cardinality.
    #[arg(long)]
    count: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long, default_value_t = 2)]
    genus: u32,
    #[arg(long, value_enum, default_value_t = RhsArg::Corrected)]
    rhs: RhsArg,
    /// Order of the DFT matrix; defaults to `n + κ`.
    #[arg(long)]
    m: Option<usize>,
    /// Column set `B`, comma separated; all `n`-subsets when omitted.
    #[arg(long = "B", value_delimiter = ',')]
    b_set: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = DimsArg::Unit)]
    dims: DimsArg,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn required<T>(v: Option<T>, flag: &str) -> CmdResult<T> {
    v.ok_or_else(|| Failure::Usage(format!("missing required flag --{flag}")))
}

fn parse_set(s: &str, flag: &str) -> CmdResult<BTreeSet<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Usage(format!("--{flag}: cannot parse {t:?}"))))
        .collect()
}

fn stratum(n: usize, args: &EnumArgs) -> CmdResult<StratumIndex> {
    let i = parse_set(args.i_set.as_deref().unwrap_or(""), "I")?;
    let j = parse_set(args.j_set.as_deref().unwrap_or(""), "J")?;
    Ok(StratumIndex::new(n, i, j)?)
}

/// What a command produced, before formatting.
enum Payload {
    Dim {
        name: String,
        params: Value,
        result: DimensionResult,
    },
    Labels {
        name: String,
        params: Value,
        labels: Vec<LabelPair>,
        count_only: bool,
    },
    Reports {
        suite: String,
        reports: Vec<IdentityReport>,
    },
}

fn run_dim(target: DimTarget, args: &DimArgs, tolerance: f64) -> CmdResult<Payload> {
    let n = required(args.n, "n")?;
    let kappa = required(args.kappa, "kappa")?;
    let g = args.genus;
    let table = VerlindeTable::with_tolerance(n, kappa, tolerance)?;
    let mut params = json!({"n": n, "kappa": kappa, "genus": g});
    let result = match target {
        DimTarget::Svb => table.svb(g)?,
        DimTarget::Vb => table.vb(g)?,
        DimTarget::Gvb => table.gvb(g)?,
        DimTarget::Spb => {
            let a = required(args.aprime.clone(), "aprime")?;
            params["aprime"] = json!(a);
            table.spb(g, &a)?
        }
        DimTarget::Pb => {
            let a = required(args.a.clone(), "a")?;
            let x = match &args.b {
                Some(b) if b.len() != a.len() => {
                    return Err(Failure::Usage("--a and --b must have the same length".into()))
                }
                Some(b) => LabelPair::new(a, b.clone()),
                None => LabelPair::from_a(a, kappa as i64),
            };
            params["a"] = json!(x.a);
            params["b"] = json!(x.b);
            table.pb(g, &x)?
        }
    };
    let name = format!("dim-{}", target.to_possible_value().expect("plain variant").get_name());
    Ok(Payload::Dim { name, params, result })
}

fn run_enumerate(set: SetKind, args: &EnumArgs) -> CmdResult<Payload> {
    let n = required(args.n, "n")?;
    if n < 1 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let kappa = || -> CmdResult<i64> {
        let k = required(args.kappa, "kappa")?;
        if k < 1 {
            return Err(Failure::Usage("--kappa must be at least 1".into()));
        }
        Ok(k)
    };
    let mut params = json!({"n": n});
    let labels = match set {
        SetKind::Aprime => {
            let k = kappa()?;
            params["kappa"] = json!(k);
            enumerate_a_prime(n, k)
        }
        SetKind::Adoubleprime => {
            let k = kappa()?;
            params["kappa"] = json!(k);
            enumerate_a_double_prime(n, k)
        }
        SetKind::Saprime => {
            let k = kappa()?;
            params["kappa"] = json!(k);
            enumerate_sa_prime(n, k)
        }
        SetKind::Adelta => {
            let k = kappa()?;
            let s = stratum(n, args)?;
            params["kappa"] = json!(k);
            params["I"] = json!(s.i_set());
            params["J"] = json!(s.j_set());
            enumerate_a_delta(n, k, &s)
        }
        SetKind::Apq => {
            let k = kappa()?;
            let p = required(args.p, "p")?;
            let q = required(args.q, "q")?;
            params["kappa"] = json!(k);
            params["p"] = json!(p);
            params["q"] = json!(q);
            params["primed"] = json!(args.primed);
            enumerate_a_pq(n, k, p, q, args.primed)?
        }
        SetKind::Ageneral => {
            let l = BundleExponents::new(
                required(args.m_exp.clone(), "m-exp")?,
                required(args.l_exp.clone(), "l-exp")?,
                required(args.e, "e")?,
                required(args.d, "d")?,
            )?;
            let s = stratum(n, args)?;
            params["I"] = json!(s.i_set());
            params["J"] = json!(s.j_set());
            params["bundle"] = serde_json::to_value(&l).expect("serializable");
            enumerate_a_general(&l, &s)?
        }
    };
    let name = set.to_possible_value().expect("plain variant").get_name().to_string();
    Ok(Payload::Labels {
        name,
        params,
        labels,
        count_only: args.count,
    })
}

fn all_subsets(m: usize, n: usize) -> Vec<Vec<usize>> {
    (0..m).combinations(n).collect()
}

fn b_sets(args: &VerifyArgs, m: usize, n: usize) -> Vec<Vec<usize>> {
    match &args.b_set {
        Some(b) => vec![b.clone()],
        None => all_subsets(m, n),
    }
}

fn run_verify(suite: Suite, args: &VerifyArgs, mode: Mode, tolerance: f64, seed: u64) -> CmdResult<Payload> {
    let g = args.genus;
    let nk = || -> CmdResult<(usize, u32)> { Ok((required(args.n, "n")?, required(args.kappa, "kappa")?)) };
    let matrix_params = || -> CmdResult<(usize, usize)> {
        let n = required(args.n, "n")?;
        let m = match (args.m, args.kappa) {
            (Some(m), _) => m,
            (None, Some(k)) => n + k as usize,
            (None, None) => return Err(Failure::Usage("missing required flag --m (or --kappa)".into())),
        };
        Ok((m, n))
    };
    let rhs = match args.rhs {
        RhsArg::Corrected => RhsVariant::Corrected,
        RhsArg::Printed => RhsVariant::Printed,
    };
    let dims = match args.dims {
        DimsArg::Unit => DimSource::Unit,
        DimsArg::Verlinde => DimSource::Verlinde { genus: g },
    };
    let dims_label = match args.dims {
        DimsArg::Unit => "unit",
        DimsArg::Verlinde => "verlinde",
    };
    let mut reports = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Degeneration) {
        let (n, k) = nk()?;
        reports.push(verify_degeneration(n, k, g, tolerance)?);
    }
    if wants(Suite::Zagier) {
        let (n, k) = nk()?;
        reports.extend(verify_zagier(n, k, mode, rhs, tolerance)?);
    }
    if wants(Suite::ZagierMatrix) {
        let (m, n) = matrix_params()?;
        for b in b_sets(args, m, n) {
            reports.push(verify_zagier_matrix(m, n, &b, mode, tolerance)?);
        }
    }
    if wants(Suite::Unitarity) {
        let (m, n) = matrix_params()?;
        for b in b_sets(args, m, n) {
            reports.push(verify_unitarity(m, n, &b, mode, tolerance)?);
        }
    }
    if wants(Suite::BetaCompat) {
        let (n, k) = nk()?;
        reports.extend(verify_beta_dim_compat(n, k, g, tolerance)?);
    }
    if wants(Suite::Main) {
        let (n, k) = nk()?;
        reports.push(verify_main_theorem_dims(n, k, g, tolerance)?);
    }
    if wants(Suite::Gluing) {
        let (n, k) = nk()?;
        let space = build_graded_space(n, k, &dims)?;
        reports.extend(verify_gluing(&random_betas(&space, seed)?, dims_label)?);
    }
    let suite = suite.to_possible_value().expect("plain variant").get_name().to_string();
    Ok(Payload::Reports { suite, reports })
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn int_or_raw(v: &crate::factorization::ReportValue) -> String {
    match v.integer {
        Some(i) => i.to_string(),
        None => format!("{}", v.raw),
    }
}

fn render(payload: &Payload, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let doc = match payload {
                Payload::Dim { name, params, result } => json!({
                    "name": name,
                    "params": params,
                    "value": result.value,
                    "raw": result.raw,
                    "residual": result.residual,
                }),
                Payload::Labels {
                    name,
                    params,
                    labels,
                    count_only,
                } => {
                    let mut doc = json!({"name": name, "params": params, "count": labels.len()});
                    if !count_only {
                        doc["labels"] = serde_json::to_value(labels).expect("serializable");
                    }
                    doc
                }
                Payload::Reports { suite, reports } => json!({
                    "suite": suite,
                    "passed": reports.iter().all(|r| r.passed),
                    "reports": reports,
                }),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            match payload {
                Payload::Dim { name, params, result } => {
                    w.write_record(["name", "params", "value", "raw", "residual"]).expect("in-memory");
                    w.write_record([
                        name.clone(),
                        compact(params),
                        result.value.to_string(),
                        result.raw.to_string(),
                        result.residual.to_string(),
                    ])
                    .expect("in-memory");
                }
                Payload::Labels {
                    labels, count_only, ..
                } => {
                    if *count_only {
                        w.write_record(["count"]).expect("in-memory");
                        w.write_record([labels.len().to_string()]).expect("in-memory");
                    } else {
                        w.write_record(["a", "b"]).expect("in-memory");
                        for x in labels {
                            w.write_record([x.a.iter().join(" "), x.b.iter().join(" ")]).expect("in-memory");
                        }
                    }
                }
                Payload::Reports { reports, .. } => {
                    w.write_record(["name", "params", "lhs", "rhs", "residual", "passed", "mode"])
                        .expect("in-memory");
                    for r in reports {
                        w.write_record([
                            r.name.clone(),
                            compact(&serde_json::to_value(&r.params).expect("serializable")),
                            r.lhs.raw.to_string(),
                            r.rhs.raw.to_string(),
                            r.max_residual.to_string(),
                            r.passed.to_string(),
                            r.mode.to_string(),
                        ])
                        .expect("in-memory");
                    }
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
        }
        OutputFormat::Text => {
            let mut s = String::new();
            match payload {
                Payload::Dim { name, params, result } => {
                    writeln!(
                        s,
                        "{name} {} = {} (raw {}, residual {:e})",
                        compact(params),
                        result.value,
                        result.raw,
                        result.residual
                    )
                    .unwrap();
                }
                Payload::Labels {
                    labels, count_only, ..
                } => {
                    if *count_only {
                        writeln!(s, "{}", labels.len()).unwrap();
                    } else {
                        for x in labels {
                            writeln!(s, "{x}").unwrap();
                        }
                    }
                }
                Payload::Reports { suite, reports } => {
                    for r in reports {
                        writeln!(
                            s,
                            "{} {} {} lhs={} rhs={} residual={:e} mode={}",
                            if r.passed { "PASS" } else { "FAIL" },
                            r.name,
                            compact(&serde_json::to_value(&r.params).expect("serializable")),
                            int_or_raw(&r.lhs),
                            int_or_raw(&r.rhs),
                            r.max_residual,
                            r.mode
                        )
                        .unwrap();
                    }
                    let passed = reports.iter().filter(|r| r.passed).count();
                    writeln!(s, "{suite}: {passed}/{} passed", reports.len()).unwrap();
                }
            }
            s
        }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::NonInteger { .. } => EXIT_ROUNDING,
        Error::UnboundedIndexSet(_) => EXIT_UNBOUNDED,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    if cli.tolerance.is_nan() || cli.tolerance <= 0.0 {
        return Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: "error: --tolerance must be positive\n".into(),
        };
    }
    let mode = Mode::from(cli.mode);
    let result = match &cli.command {
        Command::Dim { target, args } => run_dim(*target, args, cli.tolerance),
        Command::Enumerate { set, args } => run_enumerate(*set, args),
        Command::Verify { suite, args } => run_verify(*suite, args, mode, cli.tolerance, cli.seed),
    };
    let payload = match result {
        Ok(p) => p,
        Err(Failure::Usage(msg)) => {
            return Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
        Err(Failure::Lib(e)) => {
            return Outcome {
                code: error_code(&e),
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    let code = match &payload {
        Payload::Reports { reports, .. } if !reports.iter().all(|r| r.passed) => EXIT_IDENTITY_FAILED,
        _ => EXIT_OK,
    };
    let text = render(&payload, cli.output);
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: EXIT_IO,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let outcome = run(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("thetafact").chain(args.iter().copied()))
    }

    #[test]
    fn dim_examples() {
        let o = run_args(&["dim", "gvb", "--n", "2", "--kappa", "2", "--genus", "2", "--output", "json"]);
        assert_eq!(o.code, 0);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["value"], 10);
        let o = run_args(&["dim", "spb", "--n", "2", "--kappa", "2", "--aprime", "0,1", "--output", "json"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["value"], 4);
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run_args(&["dim", "svb", "--kappa", "1"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "zagier", "--n", "9", "--kappa", "1"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn stratum_flags_accept_empty_sets() {
        let o = run_args(&["enumerate", "adelta", "--n", "2", "--kappa", "1", "--I", "1", "--J"]);
        assert_eq!(o.code, 0);
        assert_eq!(o.stdout, "((0,1),(0,1))\n((1,1),(0,0))\n");
    }
}

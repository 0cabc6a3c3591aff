//! `tripack`: generate instances, run the three algorithms, benchmark them
//! against the brute-force optimum, check the analysis inequalities, and
//! verify the LP dual certificate.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tripack_core::alg1::run_alg1;
use tripack_core::alg2::run_alg2;
use tripack_core::alg3::run_alg3;
use tripack_core::analysis::{analyze, CHECK_NAMES};
use tripack_core::bench::{best_of_three, run_bench, BenchOptions, GeneratorKind, GeneratorSpec, DEFAULT_WEIGHT_BOUND};
use tripack_core::instance::{validate_packing, weight_of};
use tripack_core::io::{load_instance, save_instance, to_json};
use tripack_core::lpcert::{build_primal, verify_dual, DualCertificate, NUM_CONSTRAINTS};
use tripack_core::oracle::{opt_3pp, OracleLimits};
use tripack_core::rational::{self, Rational};
use tripack_core::stars::StarBackendChoice;
use tripack_core::{Error, Instance, ThreePathPacking};

#[derive(Parser)]
#[command(name = "tripack", version, about = "Maximum weight 3-path packing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm, or all three and keep the best.
    Solve(SolveArgs),
    /// Run many generated instances and report weights and ratios.
    Bench(BenchArgs),
    /// Check the analysis inequalities on one instance.
    CheckLemmas(CheckArgs),
    /// Verify a dual certificate of the trade-off LP.
    VerifyCert(CertArgs),
    /// Brute-force optimum of one instance.
    Oracle(OracleArgs),
    /// Write a generated instance as JSON.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    UniformInt,
    ZeroOne,
    Metric,
    /// The 6-vertex instance with three unit edges.
    #[value(alias = "fig1")]
    Counterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    /// Exact for hosts up to 14 vertices, arc-set beyond.
    Auto,
    Exact,
    Arcset,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Best,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Source {
    /// Instance file (JSON or whitespace text form).
    #[arg(long, conflicts_with = "kind")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_BOUND)]
    weight_bound: u64,
    /// Instance number within the seeded batch.
    #[arg(long, default_value_t = 0)]
    index: u64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "best")]
    alg: Alg,
    #[arg(long, value_enum, default_value = "auto")]
    star_backend: Backend,
    /// Also compute the optimum and the ratio.
    #[arg(long)]
    with_oracle: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "uniform-int")]
    kind: Kind,
    /// Repeat one instance file instead of generating.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_BOUND)]
    weight_bound: u64,
    #[arg(long)]
    with_oracle: bool,
    #[arg(long)]
    with_lemmas: bool,
    #[arg(long, value_enum, default_value = "auto")]
    star_backend: Backend,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Fill the millis column with wall-clock times.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "auto")]
    star_backend: Backend,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CertArgs {
    /// JSON file `{"lambdas": [...], "scale": k}`; defaults to the built-in certificate.
    #[arg(long)]
    lambda_file: Option<PathBuf>,
    /// Write the primal LP in plain-text form to this path.
    #[arg(long)]
    emit_lp: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Failed,
}

fn input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Io { .. } | Error::Parse(_) | Error::InvalidInstance(_) | Error::TooLarge { .. } | Error::InfeasibleSize { .. }
    )
}

fn generator_kind(kind: Kind) -> GeneratorKind {
    match kind {
        Kind::UniformInt => GeneratorKind::UniformInt,
        Kind::ZeroOne => GeneratorKind::ZeroOne,
        Kind::Metric => GeneratorKind::Metric,
        Kind::Counterexample => GeneratorKind::Counterexample,
    }
}

fn load(source: &Source) -> tripack_core::Result<Instance> {
    match (&source.input, source.kind) {
        (Some(path), _) => load_instance(path),
        (None, kind) => GeneratorSpec {
            kind: generator_kind(kind.unwrap_or(Kind::UniformInt)),
            n: source.n,
            weight_bound: source.weight_bound,
            seed: source.seed,
        }
        .generate(source.index),
    }
}

fn backend(b: Backend, n: usize) -> StarBackendChoice {
    match b {
        Backend::Auto => StarBackendChoice::for_size(2 * n / 3),
        Backend::Exact => StarBackendChoice::exact(),
        Backend::Arcset => StarBackendChoice::arcset(),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> tripack_core::Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(path: Option<&Path>, value: &Value) -> tripack_core::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    write_out(path, &(text + "\n"))
}

fn packing_json(p: &ThreePathPacking) -> Value {
    json!(p.paths)
}

fn checked(instance: &Instance, p: ThreePathPacking) -> tripack_core::Result<(ThreePathPacking, Rational)> {
    if let Some(v) = validate_packing(instance, &p).first() {
        return Err(Error::Internal(format!("algorithm returned an invalid packing: {v}")));
    }
    let w = weight_of(instance, &p)?;
    Ok((p, w))
}

fn solve(args: &SolveArgs, limits: &OracleLimits) -> tripack_core::Result<Status> {
    let instance = load(&args.source)?;
    let choice = backend(args.star_backend, instance.n());
    let (label, packing, weight, per_alg) = match args.alg {
        Alg::Best => {
            let b = best_of_three(&instance, choice)?;
            let weights: Vec<String> = b.weights.iter().map(rational::to_compact).collect();
            let label = format!("alg{}", b.best + 1);
            (label, b.best_packing().clone(), b.best_weight().clone(), Some(weights))
        }
        Alg::One => {
            let (p, w) = checked(&instance, run_alg1(&instance)?)?;
            ("alg1".to_string(), p, w, None)
        }
        Alg::Two => {
            let (p, w) = checked(&instance, run_alg2(&instance)?)?;
            ("alg2".to_string(), p, w, None)
        }
        Alg::Three => {
            let (p, w) = checked(&instance, run_alg3(&instance, choice)?)?;
            ("alg3".to_string(), p, w, None)
        }
    };
    let mut out = json!({
        "n": instance.n(),
        "algorithm": label,
        "weight": rational::to_compact(&weight),
        "packing": packing_json(&packing),
    });
    if let Some(w) = per_alg {
        out["weights"] = json!(w);
    }
    let mut status = Status::Ok;
    if args.with_oracle {
        let (_, opt) = opt_3pp(&instance, limits)?;
        out["opt"] = json!(rational::to_compact(&opt));
        if opt > Rational::default() {
            let r = &weight / &opt;
            out["ratio"] = json!(rational::to_pq(&r));
            if matches!(args.alg, Alg::Best) && r < rational::ratio(10, 17) {
                status = Status::Failed;
            }
        }
    }
    write_json(args.output.as_deref(), &out)?;
    Ok(status)
}

fn bench(args: &BenchArgs, limits: &OracleLimits) -> tripack_core::Result<Status> {
    let kind = match &args.input {
        Some(p) => GeneratorKind::File(p.clone()),
        None => generator_kind(args.kind),
    };
    let spec = GeneratorSpec {
        kind,
        n: args.n,
        weight_bound: args.weight_bound,
        seed: args.seed,
    };
    let opts = BenchOptions {
        count: args.count,
        with_oracle: args.with_oracle,
        with_lemmas: args.with_lemmas,
        star_backend: match args.star_backend {
            Backend::Auto => None,
            b => Some(backend(b, args.n)),
        },
        timing: args.timing,
    };
    let report = run_bench(&spec, &opts, limits)?;
    match args.format {
        Format::Csv => write_out(args.output.as_deref(), &report.to_csv()?)?,
        Format::Json => write_json(args.output.as_deref(), &report.to_json())?,
    }
    let pq = |q: Option<Rational>| q.map(|q| rational::to_pq(&q)).unwrap_or_else(|| "-".into());
    eprintln!(
        "{} instances, min ratio {}, mean ratio {}, lemma failures {}, below 10/17: {}",
        report.records.len(),
        pq(report.min_ratio()),
        pq(report.mean_ratio()),
        report.lemma_failures(),
        report.floor_violations()
    );
    Ok(if report.ok() { Status::Ok } else { Status::Failed })
}

fn check_lemmas(args: &CheckArgs, limits: &OracleLimits) -> tripack_core::Result<Status> {
    let instance = load(&args.source)?;
    let report = analyze(&instance, limits, backend(args.star_backend, instance.n()))?;
    let id = args
        .source
        .input
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| format!("seed{}-{}", args.source.seed, args.source.index));
    write_json(args.output.as_deref(), &report.to_json(&id))?;
    match &report.skipped {
        Some(reason) => eprintln!("skipped: {reason}"),
        None => eprintln!(
            "{} of {} checks pass",
            report.checks.iter().filter(|c| c.pass()).count(),
            CHECK_NAMES.len()
        ),
    }
    for f in report.failures() {
        eprintln!("FAILED {f}");
    }
    Ok(if report.all_pass() { Status::Ok } else { Status::Failed })
}

fn parse_lambda_file(path: &Path) -> tripack_core::Result<DualCertificate> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let entries = doc
        .get("lambdas")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("lambda file needs a \"lambdas\" array".into()))?;
    if entries.len() != NUM_CONSTRAINTS {
        return Err(Error::Parse(format!(
            "expected {NUM_CONSTRAINTS} lambdas, found {}",
            entries.len()
        )));
    }
    let scale = match doc.get("scale") {
        None | Some(Value::Null) => rational::one(),
        Some(v) => entry(v)?,
    };
    if scale <= Rational::default() {
        return Err(Error::Parse("scale must be positive".into()));
    }
    let lambda = entries
        .iter()
        .map(|v| entry(v).map(|q| q / &scale))
        .collect::<tripack_core::Result<Vec<_>>>()?;
    Ok(DualCertificate { lambda })
}

fn entry(v: &Value) -> tripack_core::Result<Rational> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => rational::parse(&n.to_string()),
        Value::String(s) => rational::parse(s),
        other => Err(Error::Parse(format!("{other} is not an integer or \"p/q\" string"))),
    }
}

fn verify_cert(args: &CertArgs) -> tripack_core::Result<Status> {
    if let Some(path) = &args.emit_lp {
        write_out(Some(path), &build_primal().to_text())?;
    }
    let cert = match &args.lambda_file {
        Some(p) => parse_lambda_file(p)?,
        None => DualCertificate::builtin(),
    };
    let report = verify_dual(&cert);
    let mut table = String::new();
    for r in &report.rows {
        let mark = if r.pass { "ok  " } else { "FAIL" };
        table.push_str(&format!("{mark} {:<14} {:>12} <= {}\n", r.name, r.lhs, r.rhs));
    }
    for m in &report.transcription_mismatches {
        table.push_str(&format!("FAIL transcription {m}\n"));
    }
    table.push_str(&format!("objective {}\n", rational::to_pq(&report.objective)));
    let ok = report.feasible && report.transcription_mismatches.is_empty();
    table.push_str(if ok { "certificate feasible\n" } else { "certificate infeasible\n" });
    for v in &report.violated {
        table.push_str(&format!("violated {v}\n"));
    }
    write_out(args.output.as_deref(), &table)?;
    Ok(if ok { Status::Ok } else { Status::Failed })
}

fn oracle(args: &OracleArgs, limits: &OracleLimits) -> tripack_core::Result<Status> {
    let instance = load(&args.source)?;
    let (packing, opt) = opt_3pp(&instance, limits)?;
    let out = json!({
        "n": instance.n(),
        "opt": rational::to_compact(&opt),
        "packing": packing_json(&packing),
    });
    write_json(args.output.as_deref(), &out)?;
    Ok(Status::Ok)
}

fn generate(args: &GenerateArgs) -> tripack_core::Result<Status> {
    let instance = load(&args.source)?;
    match &args.output {
        Some(p) => save_instance(p, &instance)?,
        None => write_json(None, &to_json(&instance))?,
    }
    Ok(Status::Ok)
}

fn run(cli: &Cli) -> tripack_core::Result<Status> {
    let limits = OracleLimits::from_env()?;
    match &cli.command {
        Command::Solve(a) => solve(a, &limits),
        Command::Bench(a) => bench(a, &limits),
        Command::CheckLemmas(a) => check_lemmas(a, &limits),
        Command::VerifyCert(a) => verify_cert(a),
        Command::Oracle(a) => oracle(a, &limits),
        Command::Generate(a) => generate(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if input_error(&e) { 2 } else { 1 })
        }
    }
}

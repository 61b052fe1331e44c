use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use num_bigint::BigUint;
use slp_core::enumerate::{build_frontiers, run_levels, DedupMode, EnumerateError, LevelOptions};
use slp_core::numtheory::{factorial, is_prime_u64, primorial, FactorBudget};
use slp_core::search::{search_target, SearchError, SearchOptions, TargetKind, TargetSpec};
use slp_core::store::{append_result, load_ledger, render_tables, stats_table, RunDir, StoreError};
use slp_core::{evaluate, Program, ProgramError, TargetMode};

/// Exhaustive search for shortest straight-line programs over +, -, *.
#[derive(Parser, Debug)]
#[command(name = "slp", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// More progress output on stderr (-v debug, -vv trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Only report warnings and errors on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate program classes level by level and write reached/covered statistics.
    Enumerate(EnumerateArgs),
    /// Search for the shortest programs computing targets or their multiples.
    Search(SearchArgs),
    /// Evaluate a program and check normalization and an optional target.
    Verify(VerifyArgs),
    /// Render the result tables from a ledger.
    Tables(TablesArgs),
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    /// Longest program length to enumerate.
    #[arg(long)]
    max_len: usize,
    /// Run directory for frontiers and stats.tsv; resumes from checkpoints there.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-value time allowance for the rho phase of factorization.
    #[arg(long, default_value_t = 10_000)]
    factor_budget_ms: u64,
    /// Longest level stored as a frontier; one more can be counted without storing.
    #[arg(long, default_value_t = 8)]
    materialize_up_to: usize,
    /// Longest level for which covered statistics are computed.
    #[arg(long, default_value_t = 8)]
    covered_up_to: usize,
    /// Re-check full value sets whenever digests match.
    #[arg(long)]
    verify_digests: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Factorial,
    Primorial,
    Integer,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Multiple,
}

impl From<Mode> for TargetMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => TargetMode::Exact,
            Mode::Multiple => TargetMode::Multiple,
        }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Parameter for factorial and integer targets: `5` or a range `2..14`.
    #[arg(long)]
    n: Option<String>,
    /// Prime bound for primorial targets: `13` or a range `2..17`.
    #[arg(long)]
    p: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Multiple)]
    mode: Mode,
    /// Longest program length searched.
    #[arg(long)]
    max_len: usize,
    /// Length at which stored frontiers hand over to depth-first search
    /// (default: min(max-len - 1, 7)). 0 searches from the empty program.
    #[arg(long)]
    handoff: Option<usize>,
    /// Run directory: frontiers are read from and saved to it, results are
    /// appended to its results.tsv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record and exit 0 even when the node budget cuts a search short.
    #[arg(long)]
    allow_partial: bool,
    /// Abort each search after this many nodes.
    #[arg(long)]
    node_budget: Option<u64>,
    /// Timestamp written to the ledger (default: SOURCE_DATE_EPOCH or now).
    #[arg(long)]
    timestamp: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Program text, e.g. `{1,1,+},{1,2,+},{2,3,*}`.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    program: Option<String>,
    /// File with one program per line; `#` starts a comment line.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Target integer.
    #[arg(long, conflicts_with_all = ["factorial", "primorial"])]
    target: Option<BigUint>,
    /// Target n!.
    #[arg(long, conflicts_with = "primorial")]
    factorial: Option<u64>,
    /// Target p#.
    #[arg(long)]
    primorial: Option<u64>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
}

#[derive(Args, Debug)]
struct TablesArgs {
    /// Ledger file (results.tsv).
    #[arg(long)]
    ledger: PathBuf,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_STORAGE: u8 = 3;
const EXIT_INCOMPLETE: u8 = 4;

/// An error carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }

    fn config(msg: impl std::fmt::Display) -> Self {
        Failure::new(EXIT_CONFIG, anyhow!("{msg}"))
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::new(EXIT_STORAGE, e)
    }
}

impl From<EnumerateError> for Failure {
    fn from(e: EnumerateError) -> Self {
        let code = match &e {
            EnumerateError::Store(_) => EXIT_STORAGE,
            EnumerateError::Config(_) => EXIT_CONFIG,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "warn",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }

    let result = match cli.command {
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Search(args) => cmd_search(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Tables(args) => cmd_tables(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<u8, Failure> {
    if args.max_len == 0 {
        return Err(Failure::config("--max-len must be at least 1"));
    }
    let opts = LevelOptions {
        max_len: args.max_len,
        materialize_up_to: args.materialize_up_to,
        covered_up_to: args.covered_up_to,
        dedup: if args.verify_digests {
            DedupMode::Verified
        } else {
            DedupMode::Digest
        },
        budget: FactorBudget::with_time(Duration::from_millis(args.factor_budget_ms)),
    };
    let dir = args.out.map(RunDir::create).transpose()?;
    let run = run_levels(&opts, dir.as_ref())?;
    print!("{}", stats_table(&run.stats));
    Ok(0)
}

/// Parses `5`, `2..14`, `2..=14` or `2-14` as an inclusive range.
fn parse_range(text: &str) -> Result<(u64, u64), Failure> {
    let bad = || Failure::config(format!("cannot parse range '{text}'"));
    let parse = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let (lo, hi) = if let Some((a, b)) = text.split_once("..=") {
        (parse(a)?, parse(b)?)
    } else if let Some((a, b)) = text.split_once("..") {
        (parse(a)?, parse(b)?)
    } else if let Some((a, b)) = text.split_once('-') {
        (parse(a)?, parse(b)?)
    } else {
        let v = parse(text)?;
        (v, v)
    };
    if lo > hi {
        return Err(Failure::config(format!("range '{text}' is empty")));
    }
    Ok((lo, hi))
}

fn timestamp(explicit: Option<String>) -> String {
    if let Some(t) = explicit {
        return t;
    }
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
    humantime::format_rfc3339_seconds(UNIX_EPOCH + Duration::from_secs(secs)).to_string()
}

fn cmd_search(args: SearchArgs) -> Result<u8, Failure> {
    let kind = match args.kind {
        Kind::Factorial => TargetKind::Factorial,
        Kind::Primorial => TargetKind::Primorial,
        Kind::Integer => TargetKind::Integer,
    };
    let range_text = match (kind, &args.n, &args.p) {
        (TargetKind::Primorial, None, Some(p)) => p,
        (TargetKind::Primorial, _, _) => return Err(Failure::config("primorial targets take --p")),
        (_, Some(n), None) => n,
        _ => return Err(Failure::config(format!("{kind} targets take --n"))),
    };
    let (lo, hi) = parse_range(range_text)?;
    let params: Vec<u64> = match kind {
        TargetKind::Primorial => (lo..=hi).filter(|&p| is_prime_u64(p)).collect(),
        _ => (lo..=hi).collect(),
    };
    if params.is_empty() {
        return Err(Failure::config(format!("no primes in '{range_text}'")));
    }
    let mode = TargetMode::from(args.mode);
    let targets = params
        .iter()
        .map(|&p| TargetSpec::new(kind, p, mode))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::config)?;

    if args.max_len == 0 {
        return Err(Failure::config("--max-len must be at least 1"));
    }
    let handoff = args.handoff.unwrap_or_else(|| (args.max_len - 1).min(7));
    if handoff > args.max_len {
        return Err(Failure::config(format!(
            "--handoff {handoff} exceeds --max-len {}",
            args.max_len
        )));
    }

    let dir = args.out.map(RunDir::create).transpose()?;
    let frontiers = build_frontiers(handoff, dir.as_ref(), DedupMode::Digest)?;
    let opts = SearchOptions {
        node_budget: args.node_budget,
        ..Default::default()
    };
    let stamp = timestamp(args.timestamp);

    let mut status = 0;
    for target in &targets {
        info!("searching {target}");
        let outcome = match search_target(target, args.max_len, &frontiers, &opts) {
            Ok(o) => o,
            Err(SearchError::Incomplete(o)) => {
                warn!("{}: node budget exhausted", target.description);
                if !args.allow_partial {
                    status = EXIT_INCOMPLETE;
                }
                *o
            }
            Err(e) => return Err(Failure::new(EXIT_FAILURE, e)),
        };
        let partial = if outcome.complete { "" } else { " (incomplete)" };
        println!("{} [{}]: {}{partial}", target.description, mode, outcome.verdict());
        for (p, _) in &outcome.found {
            println!("  {p}");
        }
        if let Some(dir) = &dir {
            if outcome.complete || args.allow_partial {
                append_result(&outcome.to_record(stamp.clone()), &dir.ledger_path())?;
            }
        }
    }
    Ok(status)
}

fn verify_target(args: &VerifyArgs) -> Result<Option<BigUint>, Failure> {
    if let Some(t) = &args.target {
        return Ok(Some(t.clone()));
    }
    if let Some(n) = args.factorial {
        return Ok(Some(factorial(n)));
    }
    if let Some(p) = args.primorial {
        return primorial(p).map(Some).map_err(Failure::config);
    }
    Ok(None)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let target = verify_target(&args)?;
    let mode = TargetMode::from(args.mode);
    let texts: Vec<String> = match (&args.program, &args.file) {
        (Some(p), _) => vec![p.clone()],
        (None, Some(path)) => read_program_lines(path)?,
        (None, None) => return Err(Failure::config("give --program or --file")),
    };
    let mut failures = 0;
    for text in &texts {
        if !verify_one(text, target.as_ref(), mode) {
            failures += 1;
        }
    }
    Ok(if failures == 0 { 0 } else { EXIT_FAILURE })
}

fn read_program_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| Failure::new(EXIT_CONFIG, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

/// Prints the trace and verdicts; true when everything passes.
fn verify_one(text: &str, target: Option<&BigUint>, mode: TargetMode) -> bool {
    let program = match Program::parse(text) {
        Ok(p) => p,
        Err(e) => {
            println!("{text}");
            match e {
                ProgramError::Syntax { position, .. } => {
                    println!("  {}^", " ".repeat(position));
                    println!("PARSE ERROR: {e}");
                }
                ProgramError::InvalidIndex { .. } => println!("PARSE ERROR: {e}"),
            }
            return false;
        }
    };
    println!("{program}");
    let eval = match evaluate::<BigUint>(&program) {
        Ok(e) => e,
        Err(e) => {
            println!("EVALUATION ERROR: {e}");
            return false;
        }
    };
    println!("  x1 = 1");
    for (t, step) in program.steps().iter().enumerate() {
        println!(
            "  x{} = x{} {} x{} = {}",
            t + 2,
            step.a,
            step.op.symbol(),
            step.b,
            eval.values()[t + 1]
        );
    }
    println!("length: {}", program.len());
    let normalized = eval.is_normalized();
    println!(
        "normalized: {}",
        if normalized {
            "yes"
        } else {
            "NO (repeated or zero value)"
        }
    );
    let mut ok = normalized;
    if let Some(n) = target {
        let hit = eval.computes_target(n, mode);
        match (hit, mode) {
            (true, TargetMode::Exact) => println!("target {n} (exact): computed"),
            (true, TargetMode::Multiple) => {
                let v = eval.values().iter().find(|v| **v != BigUint::ZERO && (*v % n) == BigUint::ZERO);
                println!("target {n} (multiple): computed via {}", v.expect("hit"));
            }
            (false, _) => println!("target {n} ({mode}): MISSED"),
        }
        ok &= hit;
    }
    println!("verdict: {}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn cmd_tables(args: TablesArgs) -> Result<u8, Failure> {
    let records = load_ledger(&args.ledger)?;
    let report = render_tables(&records);
    print!("{}", report.text);
    if report.failures > 0 {
        eprintln!("error: {} row(s) failed verification", report.failures);
        return Ok(EXIT_FAILURE);
    }
    Ok(0)
}

//! Command-line front end: generate instances, run the sweep, query the
//! exact oracle, verify the structural invariants, and sweep sizes and
//! seeds for growth and ratio measurements.
//!
//! Exit codes: 0 on success, 1 on failed verification and internal errors,
//! 2 on usage and input errors (bad flags, unreadable or malformed files,
//! argument values out of range).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use arboral::analysis::{
    self, dyadic_partitions, equal_half_partitions, LemmaSelection, Partition,
};
use arboral::generate::{self, enumerate_permutations, GeneratorSpec, Pattern};
use arboral::geometry::Instance;
use arboral::greedy;
use arboral::io::{
    instance_hash, parse_instance, ratio_json, scale_csv, stats_csv, write_instance, OracleFile,
    ScaleRow, TraceFile, VerifyFile,
};
use arboral::oracle::{self, ceil_log2, OracleStatus, SearchLimits};

#[derive(Parser)]
#[command(name = "arboral", version, about = "Arborally satisfied supersets of access sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated access sequence to a file.
    Gen(GenArgs),
    /// Run the online sweep over an instance and report its cost.
    Run(RunArgs),
    /// Find an exact minimum augmentation (small instances only).
    Oracle(OracleArgs),
    /// Check the cost-bound invariants over an instance's trace.
    Verify(VerifyArgs),
    /// Measure sweep cost across sizes and seeds.
    Scale(ScaleArgs),
    /// Compare sweep cost against the exact optimum.
    Ratio(RatioArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    Sequential,
    Reverse,
    Random,
    BitReversal,
    Zigzag,
}

impl From<PatternArg> for Pattern {
    fn from(p: PatternArg) -> Pattern {
        match p {
            PatternArg::Sequential => Pattern::Sequential,
            PatternArg::Reverse => Pattern::Reverse,
            PatternArg::Random => Pattern::Random,
            PatternArg::BitReversal => Pattern::BitReversal,
            PatternArg::Zigzag => Pattern::Zigzag,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Access pattern to generate.
    #[arg(long, value_enum)]
    pattern: PatternArg,
    /// Number of keys (and accesses).
    #[arg(long)]
    n: u32,
    /// Seed for the random pattern; ignored by the deterministic ones.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file for the instance text.
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Instance file (one key per line).
    #[arg(long)]
    input: PathBuf,
    /// Write the full trace as JSON.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Write per-step statistics as CSV.
    #[arg(long)]
    stats_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file (one key per line).
    #[arg(long)]
    input: PathBuf,
    /// Cap on solution size; defaults to n ceil(log2 n) + n.
    #[arg(long)]
    max_size: Option<usize>,
    /// Cap on search nodes across all deepening rounds.
    #[arg(long)]
    node_budget: Option<u64>,
    /// Write the result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionsArg {
    /// Recursive halving of the key range.
    Dyadic,
    /// Every contiguous pair of equal-length blocks.
    AllHalves,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LemmaArg {
    CornerGrowth,
    CornerDecay,
    ExposureSource,
    StateChanges,
    CrossAdditions,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file (one key per line).
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated subset of checks to run; all by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    lemmas: Option<Vec<LemmaArg>>,
    /// Partition family to check.
    #[arg(long, value_enum, default_value = "dyadic")]
    partitions: PartitionsArg,
    /// Write the full report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ScaleArgs {
    /// Instance sizes, comma separated (e.g. 64,256,1024).
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u32>,
    /// Random seeds 0..seeds per size.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Write the growth curve as CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Every permutation of 1..=n.
    Exhaustive,
    /// Uniformly sampled permutations.
    Sample,
}

#[derive(Args)]
struct RatioArgs {
    /// Number of keys per instance.
    #[arg(long)]
    n: u32,
    /// Instance selection mode.
    #[arg(long, value_enum, default_value = "sample")]
    mode: ModeArg,
    /// Sample count for sample mode.
    #[arg(long, default_value_t = 100)]
    samples: u64,
    /// Base seed for sample mode; instance i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on oracle solution size.
    #[arg(long)]
    max_size: Option<usize>,
    /// Cap on oracle search nodes per instance.
    #[arg(long)]
    node_budget: Option<u64>,
    /// Write the per-instance report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scale(args) => cmd_scale(args),
        Command::Ratio(args) => cmd_ratio(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {:#}", err);
            if err.is::<InputError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

/// Wrapper marking an error as the user's input rather than a failed check,
/// so `main` can exit with code 2 (the same code clap uses for bad flags).
#[derive(Debug)]
struct InputError(anyhow::Error);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(err: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(InputError(err.into()))
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading instance file {}", path.display()))
        .map_err(input_err)?;
    parse_instance(&text)
        .with_context(|| format!("parsing instance file {}", path.display()))
        .map_err(input_err)
}

/// Cheap up-front check so a long run cannot end in an unwritable path.
fn validate_out_path(path: &Path) -> Result<()> {
    let ok = match path.parent() {
        None => false,
        Some(dir) => dir.as_os_str().is_empty() || dir.is_dir(),
    };
    if !ok {
        return Err(input_err(anyhow!(
            "output path {} is not inside an existing directory",
            path.display()
        )));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(input_err)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    validate_out_path(&args.out)?;
    let spec = GeneratorSpec { pattern: args.pattern.into(), n: args.n, seed: args.seed };
    let instance = generate::generate(spec).map_err(input_err)?;
    write_file(&args.out, &write_instance(&instance))?;
    println!(
        "generated {} n={} hash={}",
        args.out.display(),
        instance.n(),
        instance_hash(&instance)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    for path in [&args.trace_out, &args.stats_out].into_iter().flatten() {
        validate_out_path(path)?;
    }
    let instance = read_instance(&args.input)?;
    let trace = greedy::run(&instance);
    let augmented = trace.augmented();
    if !arboral::geometry::is_satisfied(&augmented.points()) {
        bail!("internal error: sweep output is not satisfied");
    }
    if let Some(path) = &args.trace_out {
        write_file(path, &TraceFile::from_trace(&trace).to_json())?;
    }
    if let Some(path) = &args.stats_out {
        write_file(path, &stats_csv(&trace))?;
    }
    println!(
        "n={} added={} total={} hash={}",
        instance.n(),
        trace.added_count(),
        instance.n() as usize + trace.added_count(),
        instance_hash(&instance)
    );
    Ok(ExitCode::SUCCESS)
}

fn limits_with(n: u32, max_size: Option<usize>, node_budget: Option<u64>) -> SearchLimits {
    let mut limits = SearchLimits::defaults_for(n);
    if let Some(k) = max_size {
        limits.size_limit = k;
    }
    if let Some(b) = node_budget {
        limits.node_budget = b;
    }
    limits
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    if let Some(path) = &args.out {
        validate_out_path(path)?;
    }
    let instance = read_instance(&args.input)?;
    let limits = limits_with(instance.n(), args.max_size, args.node_budget);
    let result = oracle::min_arb(&instance, &limits);
    if let Some(added) = &result.added {
        if !oracle::solution_is_valid(&instance, added) {
            bail!("internal error: oracle solution is not satisfied");
        }
    }
    if let Some(path) = &args.out {
        write_file(path, &OracleFile::from_result(instance.n(), &result).to_json())?;
    }
    match result.status {
        OracleStatus::Exact => println!(
            "status=exact size={} nodes={}",
            result.size().expect("exact results carry a solution"),
            result.nodes_expanded
        ),
        OracleStatus::BudgetExhausted => {
            println!("status=budget_exhausted nodes={}", result.nodes_expanded)
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn selection_from(lemmas: &Option<Vec<LemmaArg>>) -> LemmaSelection {
    match lemmas {
        None => LemmaSelection::all(),
        Some(list) => {
            let mut sel = LemmaSelection::none();
            for lemma in list {
                match lemma {
                    LemmaArg::CornerGrowth => sel.corner_growth = true,
                    LemmaArg::CornerDecay => sel.corner_decay = true,
                    LemmaArg::ExposureSource => sel.exposure_source = true,
                    LemmaArg::StateChanges => sel.state_changes = true,
                    LemmaArg::CrossAdditions => sel.cross_additions = true,
                }
            }
            sel
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    if let Some(path) = &args.report {
        validate_out_path(path)?;
    }
    let instance = read_instance(&args.input)?;
    let trace = greedy::run(&instance);
    let selection = selection_from(&args.lemmas);
    let partitions: Vec<Partition> = match args.partitions {
        PartitionsArg::Dyadic => dyadic_partitions(instance.n()),
        PartitionsArg::AllHalves => equal_half_partitions(instance.n()),
    };
    let reports = analysis::verify_partitions(&trace, &partitions, selection);
    let global = analysis::verify_global_bound(&trace);
    let file = VerifyFile::new(&trace, &global, &reports);
    if let Some(path) = &args.report {
        write_file(path, &file.to_json())?;
    }

    println!(
        "n={} added={} hash={}",
        instance.n(),
        trace.added_count(),
        instance_hash(&instance)
    );
    println!(
        "global_bound {} (added {} <= {})",
        if global.holds { "ok" } else { "FAILED" },
        global.measured,
        global.bound
    );
    // Worst slack per lemma across partitions, hard checks first.
    let mut by_lemma: Vec<(&'static str, bool, i64, i64)> = Vec::new();
    for report in &reports {
        for check in &report.checks {
            let slack = check.bound - check.measured;
            match by_lemma.iter_mut().find(|(name, ..)| *name == check.lemma.as_str()) {
                Some(entry) => {
                    entry.1 &= check.holds || check.soft;
                    entry.2 = entry.2.min(slack);
                    entry.3 += i64::from(!check.holds && !check.soft);
                }
                None => by_lemma.push((
                    check.lemma.as_str(),
                    check.holds || check.soft,
                    slack,
                    i64::from(!check.holds && !check.soft),
                )),
            }
        }
    }
    for (name, ok, slack, failures) in &by_lemma {
        if *ok {
            println!("{} ok (worst slack {})", name, slack);
        } else {
            println!("{} FAILED ({} partitions)", name, failures);
        }
    }
    let soft_misses: usize = reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .filter(|c| c.soft && !c.holds)
        .count();
    if soft_misses > 0 {
        println!("soft_misses={}", soft_misses);
    }
    if file.all_hard_hold() {
        println!("PASS partitions={}", partitions.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL partitions={}", partitions.len());
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_scale(args: ScaleArgs) -> Result<ExitCode> {
    if args.n.is_empty() {
        return Err(input_err(anyhow!("at least one size is required")));
    }
    if let Some(&bad) = args.n.iter().find(|&&n| n == 0) {
        return Err(input_err(anyhow!("sizes must be at least 1, got {}", bad)));
    }
    if let Some(path) = &args.out {
        validate_out_path(path)?;
    }
    let jobs: Vec<(u32, u64)> = args
        .n
        .iter()
        .flat_map(|&n| (0..args.seeds).map(move |seed| (n, seed)))
        .collect();
    let rows: Vec<ScaleRow> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let instance = generate::generate(GeneratorSpec {
                pattern: Pattern::Random,
                n,
                seed,
            })
            .expect("random pattern accepts any positive n");
            let trace = greedy::run(&instance);
            ScaleRow {
                n,
                seed,
                added: trace.added_count(),
                bound: 7 * n as u64 * ceil_log2(n) as u64,
                instance_hash: instance_hash(&instance),
            }
        })
        .collect();
    for &n in &args.n {
        let worst = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.added)
            .max()
            .expect("every size has at least one row");
        println!(
            "n={} seeds={} max_added={} bound={}",
            n,
            args.seeds,
            worst,
            7 * n as u64 * ceil_log2(n) as u64
        );
    }
    let csv = scale_csv(&rows);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{}", csv),
    }
    // The CSV is already on disk at this point, so a violation still leaves
    // its witness row behind.
    if let Some(bad) = rows.iter().find(|r| r.added as u64 > r.bound) {
        bail!(
            "cost bound violated: n={} seed={} added={} exceeds {}",
            bad.n,
            bad.seed,
            bad.added,
            bad.bound
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_ratio(args: RatioArgs) -> Result<ExitCode> {
    if args.n == 0 {
        return Err(input_err(anyhow!("--n must be at least 1")));
    }
    if let Some(path) = &args.out {
        validate_out_path(path)?;
    }
    let instances: Vec<Instance> = match args.mode {
        ModeArg::Exhaustive => {
            if args.n > 6 {
                return Err(input_err(anyhow!(
                    "exhaustive mode enumerates n! instances; use --mode sample for n > 6"
                )));
            }
            enumerate_permutations(args.n).collect()
        }
        ModeArg::Sample => (0..args.samples)
            .map(|i| {
                generate::generate(GeneratorSpec {
                    pattern: Pattern::Random,
                    n: args.n,
                    seed: args.seed + i,
                })
                .map_err(input_err)
            })
            .collect::<Result<_>>()?,
    };
    let limits = limits_with(args.n, args.max_size, args.node_budget);
    let rows: Vec<_> = instances
        .par_iter()
        .enumerate()
        .map(|(index, instance)| oracle::ratio_row(index, instance, &limits))
        .collect();
    let report = oracle::aggregate_ratios(rows);
    if let Some(path) = &args.out {
        write_file(path, &ratio_json(&report))?;
    }
    let exhausted = report.rows.iter().filter(|r| r.opt_total.is_none()).count();
    match (report.max_ratio, report.mean_ratio) {
        (Some(max), Some(mean)) => println!(
            "instances={} exhausted={} max_ratio={:.6} mean_ratio={:.6}",
            report.rows.len(),
            exhausted,
            max,
            mean
        ),
        _ => println!(
            "instances={} exhausted={} (no exact results)",
            report.rows.len(),
            exhausted
        ),
    }
    Ok(ExitCode::SUCCESS)
}

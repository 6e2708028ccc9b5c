//! Command-line front end. Exit codes: 0 success, 1 verification or
//! invariant failure, 2 usage or I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::element::{keys_of, Element};
use crate::harness::{generate, reference_sort_counted, GenKind, GenSpec};
use crate::io::{read_keys, write_keys, Format};
use crate::observe::InvariantChecker;
use crate::sim::{replay, replay_capacity, search_breaking_sequence_report, RunLenSequence};
use crate::sort::{timsort_with, SortError};
use crate::stack::{required_stack_capacity, CollapsePolicy};
use crate::verify::{run_all, Scale, VerifyConfig};
use crate::MIN_RUN;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "tsort", version, about = "Timsort with a checked run stack")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sort a file of i64 keys.
    Sort(SortArgs),
    /// Write a generated input array.
    Gen(GenArgs),
    /// Replay or search run-length sequences on the abstract stack.
    Sim(SimArgs),
    /// Time the sort against the reference sort and write CSV.
    Bench(BenchArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct SortArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, default_value = "text")]
    pub format: Format,
    /// Check the stack invariant after every stack mutation and report the
    /// deepest stack on stderr.
    #[arg(long)]
    pub check_invariants: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = MIN_RUN)]
    pub u: usize,
    /// Key alphabet size for uniform-random.
    #[arg(long)]
    pub alphabet: Option<u64>,
    /// Extremal stack depth for worst-case.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    #[arg(long, default_value = "fixed")]
    pub policy: CollapsePolicy,
    /// A sequence like `16,17,34`, or a file holding one.
    #[arg(long, conflicts_with = "search", required_unless_present = "search")]
    pub replay: Option<String>,
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 20)]
    pub max_runs: usize,
    #[arg(long, default_value_t = 1)]
    pub u: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    /// Stack capacity for replay; defaults to the slots a sequence of this
    /// total and minimum run length can need.
    #[arg(long)]
    pub capacity: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    pub sizes: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "uniform-random,run-structured"
    )]
    pub kinds: Vec<GenKind>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    #[arg(long)]
    pub full: bool,
    /// Collapse rule wired into the sort; `legacy` is a mutation check.
    #[arg(long, default_value = "fixed", hide = true)]
    pub collapse: CollapsePolicy,
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    ExitCode::from(run(cli))
}

pub fn run(cli: Cli) -> u8 {
    let out = std::io::stdout();
    let mut out = out.lock();
    match cli.command {
        Command::Sort(a) => cmd_sort(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Sim(a) => cmd_sim(a, &mut out),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a, &mut out),
    }
}

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn cmd_sort(a: SortArgs) -> u8 {
    let keys = match read_keys(&a.input, a.format) {
        Ok(k) => k,
        Err(e) => return usage(e),
    };
    let mut elems = Element::tagged(&keys);
    let result = if a.check_invariants {
        let mut checker = InvariantChecker::new();
        let r = timsort_with(&mut elems, CollapsePolicy::Fixed, &mut checker);
        eprintln!(
            "max_stack_depth={} checks={}",
            checker.max_depth, checker.checks
        );
        r
    } else {
        timsort_with(&mut elems, CollapsePolicy::Fixed, ())
    };
    match result {
        Ok(_) => {}
        Err(e @ SortError::Violation(_)) | Err(e @ SortError::Stack(_)) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    }
    match write_keys(&a.output, &keys_of(&elems), a.format) {
        Ok(()) => EXIT_OK,
        Err(e) => usage(e),
    }
}

fn cmd_gen(a: GenArgs) -> u8 {
    if a.kind == GenKind::WorstCase && a.depth.is_none() && a.n == 0 {
        return usage("worst-case needs --depth or --n");
    }
    if a.depth.is_some_and(|d| d < 2) {
        return usage("--depth must be at least 2");
    }
    if a.u == 0 {
        return usage("--u must be positive");
    }
    let spec = GenSpec {
        kind: a.kind,
        n: a.n,
        seed: a.seed,
        u: a.u,
        alphabet: a.alphabet,
        depth: a.depth,
    };
    match write_keys(&a.output, &keys_of(&generate(&spec)), a.format) {
        Ok(()) => EXIT_OK,
        Err(e) => usage(e),
    }
}

fn read_sequence(arg: &str, u: usize) -> Result<RunLenSequence, String> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?
    } else {
        arg.to_string()
    };
    RunLenSequence::parse(&text, u).map_err(|e| e.to_string())
}

fn cmd_sim(a: SimArgs, out: &mut impl Write) -> u8 {
    if a.u == 0 {
        return usage("--u must be positive");
    }
    if a.search {
        if a.max_runs < 3 {
            return usage("--max-runs must be at least 3");
        }
        let r = search_breaking_sequence_report(a.policy, a.max_runs, a.u, a.budget);
        let line = r
            .sequence
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        let _ = writeln!(out, "{line}");
        return EXIT_OK;
    }
    let seq = match read_sequence(a.replay.as_deref().unwrap_or_default(), a.u) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let capacity = a
        .capacity
        .unwrap_or_else(|| replay_capacity(seq.total(), seq.u()));
    if capacity == 0 {
        return usage("--capacity must be positive");
    }
    let t = replay(&seq, a.policy, capacity);
    let stack: Vec<String> = t.final_stack.iter().map(|l| l.to_string()).collect();
    let _ = writeln!(out, "max_depth,{}", t.max_depth);
    let _ = writeln!(out, "violations,{}", t.violations.len());
    let _ = writeln!(out, "final_stack,{}", stack.join(","));
    for (step, fault) in &t.violations {
        let _ = writeln!(out, "violation,{step},{fault}");
    }
    if t.violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

/// Seed for one benchmark cell: the base seed offset by the repeat index.
fn bench_seed(base: u64, repeat: usize) -> u64 {
    base.wrapping_add(repeat as u64)
}

fn cmd_bench(a: BenchArgs) -> u8 {
    let mut w = match csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Never)
        .from_path(&a.csv)
    {
        Ok(w) => w,
        Err(e) => return usage(format!("{}: {e}", a.csv.display())),
    };
    let header = [
        "kind",
        "n",
        "seed",
        "repeat",
        "algo",
        "nanos",
        "max_stack_depth",
        "comparisons",
    ];
    if let Err(e) = w.write_record(header) {
        return usage(e);
    }
    for &kind in &a.kinds {
        for &n in &a.sizes {
            for repeat in 0..a.repeats {
                let seed = bench_seed(a.seed, repeat);
                let input = generate(&GenSpec::new(kind, n, seed));
                let n = input.len();

                let mut v = input.clone();
                let start = Instant::now();
                let stats = match timsort_with(&mut v, CollapsePolicy::Fixed, ()) {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_FAIL;
                    }
                };
                let nanos = start.elapsed().as_nanos();
                if stats.max_stack_depth > required_stack_capacity(n as u64) {
                    eprintln!(
                        "error: stack depth {} over capacity for n={n}",
                        stats.max_stack_depth
                    );
                    return EXIT_FAIL;
                }
                let row = |algo: &str, nanos: u128, depth: usize, cmp: u64| {
                    [
                        kind.to_string(),
                        n.to_string(),
                        seed.to_string(),
                        repeat.to_string(),
                        algo.to_string(),
                        nanos.to_string(),
                        depth.to_string(),
                        cmp.to_string(),
                    ]
                };
                let first = row("timsort", nanos, stats.max_stack_depth, stats.comparisons);

                let start = Instant::now();
                let (_, cmp) = reference_sort_counted(&input);
                let second = row("reference", start.elapsed().as_nanos(), 0, cmp);
                for r in [first, second] {
                    if let Err(e) = w.write_record(&r) {
                        return usage(e);
                    }
                }
            }
        }
    }
    match w.flush() {
        Ok(()) => EXIT_OK,
        Err(e) => usage(e),
    }
}

fn cmd_verify(a: VerifyArgs, out: &mut impl Write) -> u8 {
    let scale = if a.full { Scale::Full } else { Scale::Quick };
    let results = run_all(VerifyConfig {
        scale,
        policy: a.collapse,
    });
    for r in &results {
        let _ = writeln!(out, "{r}");
    }
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

//! `sunit`: solve S-unit equations and check abc triples from the command
//! line. Output is one JSON record per line.

mod records;

use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sunit_core::abc::verify_baker;
use sunit_core::arith::{PrimeSet, DEFAULT_PRECISION_CAP};
use sunit_core::solver::{solve_sunit_partial, Alternation, SolverConfig};

use records::{emit, Baker, Class, Failure, Summary, Triple};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_FAILURE: u8 = 4;

#[derive(Parser)]
#[command(name = "sunit", version, about = "Solve x + y = 1 in S-units and check abc triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the S-unit equation for one or more prime sets.
    Solve(SolveArgs),
    /// Check Baker's explicit abc inequality on all solved triples with
    /// rad(abc) <= N.
    VerifyAbc(VerifyArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SetSelection {
    /// Comma-separated primes, e.g. 2,3,5.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// The k smallest primes, or every k in a range A..B.
    #[arg(long, value_parser = parse_range)]
    first_n: Option<RangeInclusive<usize>>,
    /// Every set of primes whose product is at most N.
    #[arg(long)]
    radical_max: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    sets: SetSelection,
    /// Also emit one record per symmetry class.
    #[arg(long)]
    full: bool,
    /// Print the table `n,count` as CSV instead of records.
    #[arg(long, conflicts_with = "full")]
    csv: bool,
    /// Include wall-clock timings in summaries (makes output run-dependent).
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest radical rad(abc) to check.
    #[arg(long)]
    radical_max: u64,
    /// Number of highest-quality triples to list.
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SolverArgs {
    /// Worker threads (default: all cores).
    #[arg(long, env = "SUNIT_THREADS")]
    threads: Option<usize>,
    /// Candidate cap for a descending de Weger band.
    #[arg(long, default_value_t = 1000)]
    fp_cap: usize,
    /// Memory budget for the enumeration table, in bytes.
    #[arg(long, default_value_t = 1 << 30)]
    mem_budget: usize,
    /// Maximal interval-arithmetic precision, in bits.
    #[arg(long, default_value_t = DEFAULT_PRECISION_CAP)]
    precision_cap: u32,
    /// Try the volume-based start value before the fixed schedule.
    #[arg(long)]
    informed_start: bool,
    /// Alternate refined stages by wall time instead of work counters.
    #[arg(long)]
    wall_time_alternation: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            // The global pool is configured once in `main`.
            threads: None,
            fp_cap: self.fp_cap,
            mem_budget: self.mem_budget,
            precision_cap: self.precision_cap,
            informed_start: self.informed_start,
            alternation: if self.wall_time_alternation {
                Alternation::WallTime
            } else {
                Alternation::WorkUnits
            },
        }
    }
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => {
            let k = num(s)?;
            Ok(k..=k)
        }
    }
}

fn prime_sets(sel: &SetSelection) -> Result<Vec<PrimeSet>, String> {
    if let Some(ps) = &sel.primes {
        return PrimeSet::new(ps.iter().copied())
            .map(|s| vec![s])
            .map_err(|e| format!("invalid prime list: {e}"));
    }
    if let Some(r) = &sel.first_n {
        return Ok(r.clone().map(PrimeSet::first_n).collect());
    }
    Ok(PrimeSet::all_with_radical_at_most(sel.radical_max.unwrap_or(0)))
}

fn strings(s: &PrimeSet) -> Vec<String> {
    s.primes().iter().map(u64::to_string).collect()
}

fn solve(args: &SolveArgs, out: &mut impl Write) -> io::Result<u8> {
    let sets = match prime_sets(&args.sets) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let config = args.solver.config();
    let mut code = 0;
    if args.csv {
        writeln!(out, "n,count")?;
    }
    for set in &sets {
        let clock = Instant::now();
        let (sols, error) = match solve_sunit_partial(set, &config) {
            Ok(s) => (s, None),
            Err(p) => {
                code = code.max(if p.error.is_budget() { EXIT_BUDGET } else { EXIT_FAILURE });
                (p.partial, Some(p.error))
            }
        };
        let elapsed = clock.elapsed();
        if args.csv {
            match &error {
                None => writeln!(out, "{},{}", set.len(), sols.class_count())?,
                Some(e) => eprintln!("error: S = {set}: {e}"),
            }
            continue;
        }
        let timings = args.timings.then_some(elapsed);
        emit(out, &Summary::new(&sols, timings, error.as_ref().map(|e| e.to_string())))?;
        if let Some(e) = &error {
            emit(
                out,
                &Failure {
                    kind: "error",
                    primes: strings(set),
                    message: e.to_string(),
                    budget: e.is_budget(),
                },
            )?;
        }
        if args.full {
            for (class, prov) in sols.classes.iter().zip(&sols.provenance) {
                emit(out, &Class::new(&sols, class, prov))?;
            }
        }
    }
    out.flush()?;
    Ok(code)
}

fn verify(args: &VerifyArgs, out: &mut impl Write) -> io::Result<u8> {
    if args.radical_max < 2 {
        eprintln!("error: --radical-max must be at least 2");
        return Ok(EXIT_INVALID);
    }
    let report = match verify_baker(args.radical_max, &args.solver.config()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            emit(
                out,
                &Failure {
                    kind: "error",
                    primes: Vec::new(),
                    message: e.to_string(),
                    budget: e.is_budget(),
                },
            )?;
            return Ok(if e.is_budget() { EXIT_BUDGET } else { EXIT_FAILURE });
        }
    };
    let excluded: Vec<[String; 3]> = report
        .excluded
        .iter()
        .map(|t| [t.a.to_string(), t.b.to_string(), t.c.to_string()])
        .collect();
    emit(
        out,
        &Baker {
            kind: "baker",
            radical_max: args.radical_max.to_string(),
            sets: report.sets.len().to_string(),
            triples: report.triples.len().to_string(),
            violations: report.violations.len().to_string(),
            note: (!excluded.is_empty()).then(|| "(1,1,2) excluded".to_string()),
            excluded,
        },
    )?;
    for t in &report.violations {
        emit(out, &Triple::new("violation", None, t))?;
    }
    for (i, t) in report.top(args.top).into_iter().enumerate() {
        emit(out, &Triple::new("top", Some(i + 1), t))?;
    }
    Ok(if report.violations.is_empty() { 0 } else { EXIT_VIOLATION })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Solve(a) => a.solver.threads,
        Command::VerifyAbc(a) => a.solver.threads,
    };
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match &cli.command {
        Command::Solve(a) => solve(a, &mut out),
        Command::VerifyAbc(a) => verify(a, &mut out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        // A closed pipe is not an error of ours.
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

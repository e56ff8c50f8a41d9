//! `gks`: verify tables, play and simulate strategies, search for tables.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gks_core::block::{structural_verify_block, BlockReport, StructuralOptions};
use gks_core::code_table::{parse_table, serialize_table, verify_table, TableReport};
use gks_core::exponent::{exponent, format_significant};
use gks_core::search::{search_table, SearchOutcome, SearchProblem};
use gks_core::sim::{interactive_play, simulate_batch, AdversaryKind, Descriptor, SimError};
use gks_core::verify::{
    verify_augmented, verify_exhaustive, verify_sampled, verify_structural, Orders,
    DEFAULT_GAME_BUDGET,
};
use gks_core::{canonical_table, compose, theorem2, Flood, Strategy};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gks",
    version,
    about = "Strategies, verifiers and table search for the GKS game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a table's coverage, ball disjointness and block protocol.
    Verify {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in verification suite.
    Selftest {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
    /// Play many games against a stock adversary.
    Simulate {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "random")]
        adversary: AdversaryKind,
        #[arg(long)]
        json: bool,
    },
    /// Play one game as Merlin.
    Play {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Search for an underlined-codeword table.
    Search {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long = "budget-ms")]
        budget_ms: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
    },
    /// Print ln K / ln N.
    Exponent {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Quick,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Verify { table, json } => cmd_verify(&table, json),
        Command::Selftest { level } => cmd_selftest(level),
        Command::Simulate {
            strategy,
            trials,
            seed,
            adversary,
            json,
        } => cmd_simulate(&strategy, trials, seed, adversary, json),
        Command::Play { strategy, record } => cmd_play(&strategy, record.as_deref()),
        Command::Search {
            m,
            u,
            seed,
            budget_ms,
            out,
            parallel,
        } => cmd_search(m, u, seed, budget_ms, out.as_deref(), parallel),
        Command::Exponent { k, n } => match exponent::<f64>(k, n) {
            Ok(e) => {
                println!("{}", format_significant(e, 10));
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                eprintln!("error: {e}");
                Ok(ExitCode::from(EXIT_USAGE))
            }
        },
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    table: String,
    pass: bool,
    elapsed_ms: u128,
    table_report: TableReport,
    structural: Option<BlockReport>,
}

fn cmd_verify(path: &Path, json: bool) -> Result<ExitCode> {
    let start = Instant::now();
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table = match parse_table(&text) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return Ok(ExitCode::from(EXIT_FAIL));
        }
    };
    let table_report = verify_table(&table);
    let structural = (table.u() < table.m())
        .then(|| structural_verify_block(Arc::new(table), StructuralOptions::default()));
    let pass = table_report.pass() && structural.as_ref().is_some_and(|s| s.pass());
    let out = VerifyOutput {
        table: path.display().to_string(),
        pass,
        elapsed_ms: start.elapsed().as_millis(),
        table_report,
        structural,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        print!("{}", out.table_report);
        match &out.structural {
            Some(s) => {
                println!(
                    "block protocol: {} ({}/{} configurations, {} order samples, {} order failures)",
                    verdict(s.pass()),
                    s.passed,
                    s.cases,
                    s.order_samples,
                    s.order_failures
                );
                for f in &s.failures {
                    println!(
                        "  first {:?} last {} {:?}: {}",
                        f.first, f.last, f.mode, f.reason
                    );
                }
            }
            None => println!("block protocol: FAIL (no free positions)"),
        }
        println!("{}: {}", out.table, verdict(pass));
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn cmd_selftest(level: Level) -> Result<ExitCode> {
    let full = level == Level::Full;
    let mut ok = true;
    let mut check = |name: String, pass: bool, detail: String| {
        println!("[{}] {name}: {detail}", verdict(pass));
        ok &= pass;
    };

    let max_flood = if full { 8 } else { 6 };
    for n in 1..=max_flood {
        let r = verify_exhaustive(&Flood::new(n), DEFAULT_GAME_BUDGET)?;
        check(
            format!("flood:{n} exhaustive"),
            r.pass() && r.max_set_size == n,
            format!(
                "{}/{} games won, max |S| = {}",
                r.wins, r.games, r.max_set_size
            ),
        );
        let a = verify_augmented(&Flood::new(n), Orders::Exhaustive, DEFAULT_GAME_BUDGET)?;
        check(
            format!("flood:{n} transmit"),
            a.pass(),
            format!("{} checks, {} failures", a.checks, a.failures),
        );
    }

    let table = Arc::new(canonical_table());
    let tr = verify_table(&table);
    check(
        "canonical table".into(),
        tr.pass(),
        format!(
            "{} rows, {} distinct ball members",
            tr.coverage.rows, tr.disjointness.distinct_members
        ),
    );
    let samples = if full { 100_000 } else { 10_000 };
    let br = structural_verify_block(
        table.clone(),
        StructuralOptions {
            order_samples: samples,
            seed: 0,
        },
    );
    check(
        "block protocol".into(),
        br.pass(),
        format!(
            "{}/{} configurations, {} order samples",
            br.passed, br.cases, br.order_samples
        ),
    );

    let t2 = theorem2(table, "@canonical");
    let sr = verify_structural(&t2, DEFAULT_GAME_BUDGET)?;
    check(
        "theorem2 structural".into(),
        sr.pass() && sr.max_set_size == 9,
        format!(
            "{}/{} games won, max |S| = {}",
            sr.wins, sr.games, sr.max_set_size
        ),
    );
    let games = if full { 100_000 } else { 5_000 };
    let rr = verify_sampled(&t2, games, 0);
    check(
        "theorem2 random games".into(),
        rr.pass() && rr.set_sizes.keys().all(|&s| s == 9),
        format!(
            "{}/{} games won, max |S| = {}",
            rr.wins, rr.games, rr.max_set_size
        ),
    );
    let ar = verify_augmented(
        &t2,
        Orders::Sampled {
            count: if full { 1000 } else { 200 },
            seed: 0,
        },
        DEFAULT_GAME_BUDGET,
    )?;
    check(
        "theorem2 transmit".into(),
        ar.pass(),
        format!("{} checks, {} failures", ar.checks, ar.failures),
    );

    let ff = compose(Arc::new(Flood::new(2)), Arc::new(Flood::new(2)));
    let fr = verify_exhaustive(&ff, DEFAULT_GAME_BUDGET)?;
    check(
        ff.describe(),
        fr.pass() && fr.max_set_size <= 4,
        format!(
            "{}/{} games won, max |S| = {}",
            fr.wins, fr.games, fr.max_set_size
        ),
    );

    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn resolve(descriptor: &str) -> Result<Arc<dyn Strategy>, ExitCode> {
    let parsed: Descriptor = descriptor.parse().map_err(|e: SimError| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })?;
    parsed.resolve().map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_FAIL)
    })
}

fn cmd_simulate(
    descriptor: &str,
    trials: u64,
    seed: u64,
    adversary: AdversaryKind,
    json: bool,
) -> Result<ExitCode> {
    let strategy = match resolve(descriptor) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let report = simulate_batch(strategy.as_ref(), adversary, trials, seed, true);
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{report}");
    }
    Ok(if report.all_won() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn cmd_play(descriptor: &str, record: Option<&Path>) -> Result<ExitCode> {
    let strategy = match resolve(descriptor) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let stdin = io::stdin();
    let stdout = io::stdout();
    match interactive_play(strategy.as_ref(), stdin.lock(), stdout.lock(), 0) {
        Ok(result) => {
            if let Some(path) = record {
                let mut f = BufWriter::new(
                    fs::File::create(path)
                        .with_context(|| format!("creating {}", path.display()))?,
                );
                serde_json::to_writer_pretty(&mut f, &result)?;
                writeln!(f)?;
            }
            if !result.win {
                eprintln!("defect: strategy lost\n{}", result.transcript);
            }
            Ok(if result.win {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            })
        }
        Err(SimError::Game(gks_core::game::GameError::Aborted)) => {
            eprintln!("aborted");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_search(
    m: usize,
    u: usize,
    seed: u64,
    budget_ms: u64,
    out: Option<&Path>,
    parallel: bool,
) -> Result<ExitCode> {
    let mut problem = SearchProblem::new(m, u, seed).with_wall(Duration::from_millis(budget_ms));
    problem.parallel = parallel;
    let report = match search_table(&problem) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    };
    let summary = format!(
        "nodes={} restarts={} wall_ms={}",
        report.nodes,
        report.restarts,
        report.elapsed.as_millis()
    );
    match report.outcome {
        SearchOutcome::Found(table) => {
            let text = serialize_table(&table);
            eprintln!("found m={m} u={u} {summary}");
            match out {
                Some(path) => {
                    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        SearchOutcome::Unsat(kind) => {
            println!(
                "unsat ({}) m={m} u={u} {summary}",
                serde_json::to_value(kind)?.as_str().unwrap_or("?")
            );
            Ok(ExitCode::from(EXIT_FAIL))
        }
        SearchOutcome::Timeout { best_depth } => {
            println!("timeout m={m} u={u} best_depth={best_depth} {summary}");
            Ok(ExitCode::from(EXIT_BUDGET))
        }
    }
}

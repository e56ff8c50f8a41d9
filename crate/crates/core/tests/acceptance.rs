//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod support;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gks_core::block::{structural_verify_block, StructuralOptions};
use gks_core::code_table::{parse_table, serialize_table, verify_table};
use gks_core::exponent::exponent;
use gks_core::game::{run_game, RandomAdversary};
use gks_core::search::{
    brute_force_oracle, search_table, SearchOutcome, SearchProblem, UnsatKind,
    DEFAULT_ORACLE_BUDGET,
};
use gks_core::verify::{
    verify_augmented, verify_exhaustive, verify_sampled, verify_structural, Orders,
    DEFAULT_GAME_BUDGET,
};
use gks_core::{canonical_table, compose, theorem2, Flood, Strategy, CANONICAL_TABLE_TEXT};

use support::DirectTheorem2;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(limit: Duration, start: Instant, pass: bool, detail: String) -> Outcome {
    let took = start.elapsed();
    let pass = pass && took <= limit;
    Outcome {
        pass,
        detail: format!("{detail} in {:.2?} (limit {:?})", took, limit),
    }
}

fn table_verifies() -> Outcome {
    let start = Instant::now();
    let table = canonical_table();
    let r = verify_table(&table);
    within(
        Duration::from_secs(1),
        start,
        r.pass() && r.coverage.rows == 220 && r.disjointness.distinct_members == 2200,
        format!(
            "{} rows, {} distinct ball members",
            r.coverage.rows, r.disjointness.distinct_members
        ),
    )
}

fn block_structural() -> Outcome {
    let start = Instant::now();
    let r = structural_verify_block(
        Arc::new(canonical_table()),
        StructuralOptions {
            order_samples: 10_000,
            seed: 0,
        },
    );
    within(
        Duration::from_secs(5),
        start,
        r.pass() && r.cases == 7920 && r.order_samples >= 10_000,
        format!(
            "{}/{} configurations, {} order samples",
            r.passed, r.cases, r.order_samples
        ),
    )
}

fn theorem2_games() -> Outcome {
    let start = Instant::now();
    let t2 = theorem2(Arc::new(canonical_table()), "@canonical");
    let random = verify_sampled(&t2, 100_000, 0);
    let structural = match verify_structural(&t2, DEFAULT_GAME_BUDGET) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let only_nine = |sizes: &std::collections::BTreeMap<usize, u64>| sizes.keys().all(|&s| s == 9);
    within(
        Duration::from_secs(60),
        start,
        random.pass()
            && random.games == 100_000
            && only_nine(&random.set_sizes)
            && structural.pass()
            && structural.games == 35_640
            && only_nine(&structural.set_sizes),
        format!(
            "random {}/{} won, structural {}/{} won, |S| sizes {:?}",
            random.wins,
            random.games,
            structural.wins,
            structural.games,
            structural.set_sizes.keys().collect::<Vec<_>>()
        ),
    )
}

fn exponents() -> Outcome {
    let cases = [(9, 108, 0.469280), (5, 30, 0.473197), (11, 165, 0.46962)];
    let mut pass = true;
    let mut got = Vec::new();
    for (k, n, want) in cases {
        let e = exponent::<f64>(k, n).expect("valid domain");
        pass &= (e - want).abs() <= 5e-5;
        got.push(format!("({k},{n})={e:.6}"));
    }
    Outcome {
        pass,
        detail: got.join(" "),
    }
}

fn theorem2_squared() -> Outcome {
    let start = Instant::now();
    let t2: Arc<dyn Strategy> = Arc::new(theorem2(Arc::new(canonical_table()), "@canonical"));
    let sq = compose(t2.clone(), t2);
    let games = verify_sampled(&sq, 10_000, 1);
    let transmit = match verify_augmented(
        &sq,
        Orders::Sampled {
            count: 1000,
            seed: 1,
        },
        DEFAULT_GAME_BUDGET,
    ) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    within(
        Duration::from_secs(300),
        start,
        sq.len() == 11_664 && games.pass() && games.max_set_size <= 81 && transmit.pass(),
        format!(
            "n={}, {}/{} won, max |S| = {}, transmit {}/{} ok",
            sq.len(),
            games.wins,
            games.games,
            games.max_set_size,
            transmit.checks - transmit.failures,
            transmit.checks
        ),
    )
}

fn direct_matches_composed() -> Outcome {
    let table = canonical_table();
    let direct = DirectTheorem2::new(&table);
    let composed = theorem2(Arc::new(table), "@canonical");
    let mut mismatches = 0;
    let mut first = None;
    for seed in 0..10_000u64 {
        let a = run_game(&direct, &mut RandomAdversary::new(108, seed));
        let b = run_game(&composed, &mut RandomAdversary::new(108, seed));
        let same = match (&a, &b) {
            (Ok(x), Ok(y)) => x.transcript == y.transcript && x.win && y.win,
            _ => false,
        };
        if !same {
            mismatches += 1;
            first.get_or_insert(seed);
        }
    }
    Outcome {
        pass: mismatches == 0,
        detail: match first {
            None => "10000 seeded games, identical transcripts".into(),
            Some(s) => format!("{mismatches} mismatches, first at seed {s}"),
        },
    }
}

fn flood_exhaustive() -> Outcome {
    let mut pass = true;
    let mut games = 0;
    for n in 1..=8 {
        match verify_exhaustive(&Flood::new(n), DEFAULT_GAME_BUDGET) {
            Ok(r) => {
                pass &= r.pass() && r.max_set_size == n;
                games += r.games;
            }
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: e.to_string(),
                }
            }
        }
    }
    Outcome {
        pass,
        detail: format!("n = 1..=8, {games} games"),
    }
}

fn search_agrees() -> Outcome {
    let run = |m, u| {
        search_table(&SearchProblem::new(m, u, 0).with_wall(Duration::from_secs(10)))
            .expect("supported size")
            .outcome
    };
    let counting = run(3, 1) == SearchOutcome::Unsat(UnsatKind::Counting);
    let one_one = run(1, 1);
    let two_one = run(2, 1);
    let agree = one_one.is_found()
        && two_one == SearchOutcome::Unsat(UnsatKind::Exhausted)
        && brute_force_oracle(1, 1, DEFAULT_ORACLE_BUDGET).is_ok_and(|o| o.is_found())
        && brute_force_oracle(2, 1, DEFAULT_ORACLE_BUDGET)
            .is_ok_and(|o| o.verdict() == Some(false));
    let exhausted = run(4, 1) == SearchOutcome::Unsat(UnsatKind::Exhausted);
    Outcome {
        pass: counting && agree && exhausted,
        detail: format!("(3,1) counting: {counting}, (1,1)/(2,1) agree with oracle: {agree}, (4,1) exhausted: {exhausted}"),
    }
}

fn round_trip() -> Outcome {
    let table = canonical_table();
    let text = serialize_table(&table);
    let data = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect()
    };
    let again = parse_table(&text).map(|t| serialize_table(&t));
    let pass = data(CANONICAL_TABLE_TEXT) == data(&text) && again.as_deref() == Ok(text.as_str());
    Outcome {
        pass,
        detail: format!("{} data lines", data(&text).len()),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("canonical table verifies", table_verifies),
        ("block structural proof", block_structural),
        ("theorem2 wins with |S| = 9", theorem2_games),
        ("cost exponents", exponents),
        ("theorem2 composed with itself", theorem2_squared),
        (
            "direct strategy matches composition",
            direct_matches_composed,
        ),
        ("flood exhaustive", flood_exhaustive),
        ("search soundness on small sizes", search_agrees),
        ("table round trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "[{}] {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

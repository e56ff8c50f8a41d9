//! Backtracking search for underlined-codeword tables.
//!
//! Rows are placed one `u`-subset at a time in colexicographic order. A row
//! is a choice of its `m - u` free bits; it is admissible when none of its
//! punctured-ball members is already occupied. Occupancy is a bitset over the
//! whole `2^m` cube. Value order within a row is a seeded bijection of the
//! free-bit assignments, redrawn at every restart; restarts follow a doubling
//! node-limit schedule until the budget runs out.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::code_table::{binomial, verify_table, CodeTable, Codeword};

/// Largest block length the search accepts (occupancy is a `2^m`-bit set).
pub const MAX_SEARCH_LEN: usize = 26;

const FIRST_RESTART_NODES: u64 = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("need 1 <= u <= m <= {max} (got m={m}, u={u})", max = MAX_SEARCH_LEN)]
    Unsupported { m: usize, u: usize },
    #[error("{needed} assignments needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchBudget {
    pub wall: Option<Duration>,
    pub nodes: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchProblem {
    pub m: usize,
    pub u: usize,
    pub seed: u64,
    pub budget: SearchBudget,
    /// Run seeded restarts on all cores; the first verified table wins.
    pub parallel: bool,
}

impl SearchProblem {
    pub fn new(m: usize, u: usize, seed: u64) -> Self {
        SearchProblem {
            m,
            u,
            seed,
            budget: SearchBudget::default(),
            parallel: false,
        }
    }

    pub fn with_wall(mut self, wall: Duration) -> Self {
        self.budget.wall = Some(wall);
        self
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.budget.nodes = Some(nodes);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnsatKind {
    /// The balls cannot fit in the cube.
    Counting,
    /// Complete enumeration found nothing.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(CodeTable),
    Unsat(UnsatKind),
    Timeout { best_depth: usize },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    /// `Some(true)` for Found, `Some(false)` for Unsat, `None` on timeout.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            SearchOutcome::Found(_) => Some(true),
            SearchOutcome::Unsat(_) => Some(false),
            SearchOutcome::Timeout { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
    pub restarts: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountingBound {
    /// `C(m, u) * (m - u + 1)`: total size of the disjoint balls.
    pub lhs: u128,
    /// `2^m`.
    pub rhs: u128,
    pub feasible: bool,
}

/// Necessary condition for a table: the balls must fit in the cube.
pub fn counting_bound(m: usize, u: usize) -> CountingBound {
    let lhs = binomial(m as u64, u as u64).saturating_mul((m - u + 1) as u128);
    let rhs = if m >= 128 { u128::MAX } else { 1u128 << m };
    CountingBound {
        lhs,
        rhs,
        feasible: lhs <= rhs,
    }
}

struct Row {
    base: u64,
    free: Vec<u32>,
}

fn ball(row: &Row, w: u64) -> impl Iterator<Item = u64> + '_ {
    std::iter::once(w).chain(row.free.iter().map(move |&p| w ^ (1 << p)))
}

impl Row {
    fn width(&self) -> u32 {
        self.free.len() as u32
    }

    /// Spreads the low bits of `a` over the free positions.
    fn word(&self, a: u64) -> u64 {
        self.free
            .iter()
            .enumerate()
            .fold(self.base, |w, (j, &p)| w | ((a >> j & 1) << p))
    }
}

fn colex_rows(m: usize, u: usize) -> Vec<Row> {
    let mut masks: Vec<u64> = (0..m)
        .combinations(u)
        .map(|s| s.iter().fold(0u64, |acc, &p| acc | 1 << p))
        .collect();
    // colex order on subsets is numeric order on their masks
    masks.sort_unstable();
    masks
        .into_iter()
        .map(|base| Row {
            base,
            free: (0..m as u32).filter(|&p| base >> p & 1 == 0).collect(),
        })
        .collect()
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(bits: usize) -> Self {
        Bitset(vec![0; bits.div_ceil(64)])
    }

    fn get(&self, i: u64) -> bool {
        self.0[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    fn toggle(&mut self, i: u64) {
        self.0[(i >> 6) as usize] ^= 1 << (i & 63);
    }
}

/// Seeded bijection on `0..2^width`: `i -> (mul * i + add) mod 2^width`.
#[derive(Clone, Copy)]
struct ValueOrder {
    mul: u64,
    add: u64,
}

impl ValueOrder {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        ValueOrder {
            mul: rng.gen::<u64>() | 1,
            add: rng.gen(),
        }
    }

    fn nth(&self, i: u64, width: u32) -> u64 {
        let mask = if width >= 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        self.mul.wrapping_mul(i).wrapping_add(self.add) & mask
    }
}

enum Attempt {
    Found(Vec<u64>),
    Exhausted,
    Stopped { best_depth: usize },
}

struct Limits<'a> {
    start: Instant,
    wall: Option<Duration>,
    node_limit: Option<u64>,
    stop: &'a AtomicBool,
}

impl Limits<'_> {
    fn expired(&self) -> bool {
        self.stop.load(Ordering::Relaxed) || self.wall.is_some_and(|w| self.start.elapsed() >= w)
    }
}

/// One depth-first pass. Every admissible placement counts as a node.
fn attempt(
    rows: &[Row],
    m: usize,
    orders: &[ValueOrder],
    limits: &Limits<'_>,
    nodes: &mut u64,
) -> Attempt {
    let mut occupied = Bitset::new(1usize << m);
    let mut next = vec![0u64; rows.len() + 1];
    let mut placed = vec![0u64; rows.len()];
    let mut depth = 0usize;
    let mut best_depth = 0usize;
    let mut local_nodes = 0u64;
    let mut probes = 0u64;

    loop {
        if depth == rows.len() {
            *nodes += local_nodes;
            return Attempt::Found(placed);
        }
        let row = &rows[depth];
        let count = 1u64 << row.width();
        let mut advanced = false;
        while next[depth] < count {
            let i = next[depth];
            next[depth] += 1;
            probes += 1;
            let w = row.word(orders[depth].nth(i, row.width()));
            if ball(row, w).all(|x| !occupied.get(x)) {
                for x in ball(row, w) {
                    occupied.toggle(x);
                }
                placed[depth] = w;
                depth += 1;
                next[depth] = 0;
                best_depth = best_depth.max(depth);
                local_nodes += 1;
                advanced = true;
                break;
            }
        }
        if probes >= 4096 {
            probes = 0;
            if limits.expired() {
                *nodes += local_nodes;
                return Attempt::Stopped { best_depth };
            }
        }
        if depth < rows.len() && limits.node_limit.is_some_and(|l| local_nodes >= l) {
            *nodes += local_nodes;
            return Attempt::Stopped { best_depth };
        }
        if !advanced {
            if depth == 0 {
                *nodes += local_nodes;
                return Attempt::Exhausted;
            }
            depth -= 1;
            for x in ball(&rows[depth], placed[depth]) {
                occupied.toggle(x);
            }
        }
    }
}

fn restart_orders(rows: &[Row], seed: u64, restart: u64) -> Vec<ValueOrder> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    rows.iter().map(|_| ValueOrder::draw(&mut rng)).collect()
}

fn build_table(m: usize, u: usize, words: &[u64], rows: &[Row]) -> CodeTable {
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let codewords = words
        .iter()
        .zip(rows)
        .map(|(&w, r)| {
            Codeword::from_masks(m, w, r.base & full).expect("row keeps its underlined ones")
        })
        .collect();
    CodeTable::new(m, u, codewords).expect("row shape is valid")
}

fn finish(m: usize, u: usize, words: &[u64], rows: &[Row]) -> SearchOutcome {
    let table = build_table(m, u, words, rows);
    let report = verify_table(&table);
    assert!(report.pass(), "search produced an invalid table:\n{report}");
    SearchOutcome::Found(table)
}

/// Restart loop shared by the sequential and parallel modes. Worker `w` of
/// `stride` runs restarts `w, w + stride, ...`.
fn run_restarts(
    rows: &[Row],
    problem: &SearchProblem,
    limits_start: Instant,
    stop: &AtomicBool,
    total_nodes: &AtomicU64,
    worker: u64,
    stride: u64,
) -> (Attempt, u64, usize) {
    let mut restarts = 0u64;
    let mut best = 0usize;
    let mut r = worker;
    loop {
        let used = total_nodes.load(Ordering::Relaxed);
        let remaining = problem.budget.nodes.map(|b| b.saturating_sub(used));
        if remaining == Some(0) || stop.load(Ordering::Relaxed) {
            return (Attempt::Stopped { best_depth: best }, restarts, best);
        }
        let schedule = FIRST_RESTART_NODES.saturating_mul(1u64 << r.min(40));
        let limit = remaining.map_or(schedule, |rem| rem.min(schedule));
        let limits = Limits {
            start: limits_start,
            wall: problem.budget.wall,
            node_limit: Some(limit),
            stop,
        };
        let orders = restart_orders(rows, problem.seed, r);
        let mut nodes = 0u64;
        let outcome = attempt(rows, problem.m, &orders, &limits, &mut nodes);
        total_nodes.fetch_add(nodes, Ordering::Relaxed);
        restarts += 1;
        match outcome {
            Attempt::Stopped { best_depth } => {
                best = best.max(best_depth);
                if limits.expired() {
                    return (Attempt::Stopped { best_depth: best }, restarts, best);
                }
            }
            done => return (done, restarts, best),
        }
        r += stride;
    }
}

/// Searches for a table with full coverage and disjoint balls.
pub fn search_table(problem: &SearchProblem) -> Result<SearchReport, SearchError> {
    let (m, u) = (problem.m, problem.u);
    if u == 0 || u > m || m > MAX_SEARCH_LEN {
        return Err(SearchError::Unsupported { m, u });
    }
    let start = Instant::now();
    if !counting_bound(m, u).feasible {
        return Ok(SearchReport {
            outcome: SearchOutcome::Unsat(UnsatKind::Counting),
            nodes: 0,
            restarts: 0,
            elapsed: start.elapsed(),
        });
    }
    let rows = colex_rows(m, u);
    let stop = AtomicBool::new(false);
    let total_nodes = AtomicU64::new(0);

    let (outcome, restarts) = if problem.parallel {
        search_parallel(&rows, problem, start, &stop, &total_nodes)
    } else {
        let (attempt, restarts, best) =
            run_restarts(&rows, problem, start, &stop, &total_nodes, 0, 1);
        let outcome = match attempt {
            Attempt::Found(words) => finish(m, u, &words, &rows),
            Attempt::Exhausted => SearchOutcome::Unsat(UnsatKind::Exhausted),
            Attempt::Stopped { .. } => SearchOutcome::Timeout { best_depth: best },
        };
        (outcome, restarts)
    };
    Ok(SearchReport {
        outcome,
        nodes: total_nodes.load(Ordering::Relaxed),
        restarts,
        elapsed: start.elapsed(),
    })
}

fn search_parallel(
    rows: &[Row],
    problem: &SearchProblem,
    start: Instant,
    stop: &AtomicBool,
    total_nodes: &AtomicU64,
) -> (SearchOutcome, u64) {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let found: Mutex<Option<Vec<u64>>> = Mutex::new(None);
    let exhausted = AtomicBool::new(false);
    let restarts = AtomicU64::new(0);
    let best = AtomicU64::new(0);
    std::thread::scope(|scope| {
        for w in 0..workers {
            let (found, exhausted, restarts, best) = (&found, &exhausted, &restarts, &best);
            scope.spawn(move || {
                let (attempt, r, b) =
                    run_restarts(rows, problem, start, stop, total_nodes, w, workers);
                restarts.fetch_add(r, Ordering::Relaxed);
                best.fetch_max(b as u64, Ordering::Relaxed);
                match attempt {
                    Attempt::Found(words) => {
                        found.lock().unwrap().get_or_insert(words);
                        stop.store(true, Ordering::Relaxed);
                    }
                    Attempt::Exhausted => {
                        exhausted.store(true, Ordering::Relaxed);
                        stop.store(true, Ordering::Relaxed);
                    }
                    Attempt::Stopped { .. } => {}
                }
            });
        }
    });
    let restarts = restarts.load(Ordering::Relaxed);
    if let Some(words) = found.into_inner().unwrap() {
        return (finish(problem.m, problem.u, &words, rows), restarts);
    }
    if exhausted.load(Ordering::Relaxed) {
        // unsatisfiability is only claimed by a sequential complete pass
        let never = AtomicBool::new(false);
        let limits = Limits {
            start,
            wall: problem.budget.wall,
            node_limit: None,
            stop: &never,
        };
        let mut nodes = 0;
        let orders = restart_orders(rows, problem.seed, 0);
        let outcome = attempt(rows, problem.m, &orders, &limits, &mut nodes);
        total_nodes.fetch_add(nodes, Ordering::Relaxed);
        return match outcome {
            Attempt::Found(words) => (finish(problem.m, problem.u, &words, rows), restarts + 1),
            Attempt::Exhausted => (SearchOutcome::Unsat(UnsatKind::Exhausted), restarts + 1),
            Attempt::Stopped { best_depth } => {
                (SearchOutcome::Timeout { best_depth }, restarts + 1)
            }
        };
    }
    (
        SearchOutcome::Timeout {
            best_depth: best.load(Ordering::Relaxed) as usize,
        },
        restarts,
    )
}

/// Default cap on assignments enumerated by [`brute_force_oracle`].
pub const DEFAULT_ORACLE_BUDGET: u128 = 1 << 24;

/// Enumerates every free-bit assignment with no pruning. Shares nothing
/// with [`search_table`] beyond the final [`verify_table`] call.
pub fn brute_force_oracle(m: usize, u: usize, budget: u128) -> Result<SearchOutcome, SearchError> {
    if u == 0 || u > m || m > MAX_SEARCH_LEN {
        return Err(SearchError::Unsupported { m, u });
    }
    let subsets: Vec<Vec<usize>> = (0..m).combinations(u).collect();
    let free_bits = (m - u) as u32;
    let per_row = 1u128 << free_bits;
    let needed = (0..subsets.len()).try_fold(1u128, |acc, _| acc.checked_mul(per_row));
    let needed = match needed {
        Some(n) if n <= budget => n,
        other => {
            return Err(SearchError::BudgetExceeded {
                needed: other.unwrap_or(u128::MAX),
                budget,
            })
        }
    };
    let words_for = |assignment: &[u64]| -> Vec<u64> {
        subsets
            .iter()
            .zip(assignment)
            .map(|(s, &a)| {
                let mut w: u64 = s.iter().map(|&p| 1u64 << p).sum();
                let mut j = 0;
                for p in 0..m {
                    if !s.contains(&p) {
                        w |= (a >> j & 1) << p;
                        j += 1;
                    }
                }
                w
            })
            .collect()
    };
    let mut assignment = vec![0u64; subsets.len()];
    for _ in 0..needed {
        let words = words_for(&assignment);
        let mut seen = HashSet::new();
        let disjoint = words.iter().zip(&subsets).all(|(&w, s)| {
            seen.insert(w)
                && (0..m)
                    .filter(|p| !s.contains(p))
                    .all(|p| seen.insert(w ^ (1 << p)))
        });
        if disjoint {
            let rows = words
                .iter()
                .zip(&subsets)
                .map(|(&w, s)| {
                    let underline = s.iter().map(|&p| 1u64 << p).sum();
                    Codeword::from_masks(m, w, underline).expect("underlined ones kept")
                })
                .collect();
            let table = CodeTable::new(m, u, rows).expect("valid row shape");
            assert!(verify_table(&table).pass());
            return Ok(SearchOutcome::Found(table));
        }
        // odometer step
        for digit in assignment.iter_mut() {
            *digit += 1;
            if (*digit as u128) < per_row {
                break;
            }
            *digit = 0;
        }
    }
    Ok(SearchOutcome::Unsat(UnsatKind::Exhausted))
}

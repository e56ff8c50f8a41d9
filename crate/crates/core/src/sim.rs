//! Strategy descriptors, batch simulation and interactive play.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::block::CodeBlock;
use crate::code_table::{parse_table, verify_table, CodeTable, TableError};
use crate::compose::{compose, theorem2};
use crate::flood::Flood;
use crate::game::{
    run_game, Adversary, Board, GameError, GameResult, RandomAdversary, Strategy, SweepAdversary,
    Transcript,
};

/// Table path that resolves to the built-in canonical table.
pub const CANONICAL_TABLE: &str = "@canonical";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("bad strategy descriptor {0:?}")]
    Descriptor(String),
    #[error("cannot read table {path}: {source}")]
    TableIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("table {path}: {source}")]
    TableParse { path: PathBuf, source: TableError },
    #[error("table {path} fails verification:\n{report}")]
    TableInvalid { path: PathBuf, report: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `flood:<n>`, `block:<table>`, `theorem2:<table>` or `compose(<d>,<d>)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Descriptor {
    Flood(usize),
    Block(PathBuf),
    Theorem2(PathBuf),
    Compose(Box<Descriptor>, Box<Descriptor>),
}

impl FromStr for Descriptor {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimError::Descriptor(s.to_string());
        let s = s.trim();
        if let Some(body) = s.strip_prefix("compose(").and_then(|r| r.strip_suffix(')')) {
            let mut depth = 0i32;
            let mut split = None;
            for (i, c) in body.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        split = Some(i);
                        break;
                    }
                    _ => {}
                }
                if depth < 0 {
                    return Err(bad());
                }
            }
            let i = split.ok_or_else(bad)?;
            let outer = body[..i].parse().map_err(|_| bad())?;
            let inner = body[i + 1..].parse().map_err(|_| bad())?;
            return Ok(Descriptor::Compose(Box::new(outer), Box::new(inner)));
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        if arg.is_empty() {
            return Err(bad());
        }
        match kind {
            "flood" => match arg.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Descriptor::Flood(n)),
                _ => Err(bad()),
            },
            "block" => Ok(Descriptor::Block(arg.into())),
            "theorem2" => Ok(Descriptor::Theorem2(arg.into())),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Flood(n) => write!(f, "flood:{n}"),
            Descriptor::Block(p) => write!(f, "block:{}", p.display()),
            Descriptor::Theorem2(p) => write!(f, "theorem2:{}", p.display()),
            Descriptor::Compose(a, b) => write!(f, "compose({a},{b})"),
        }
    }
}

/// Loads a table file (or the built-in one) and checks it.
pub fn load_verified_table(path: &Path) -> Result<CodeTable, SimError> {
    let table = if path.as_os_str() == CANONICAL_TABLE {
        crate::canonical_table()
    } else {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::TableIo {
            path: path.to_path_buf(),
            source,
        })?;
        parse_table(&text).map_err(|source| SimError::TableParse {
            path: path.to_path_buf(),
            source,
        })?
    };
    let report = verify_table(&table);
    if !report.pass() || table.u() >= table.m() {
        return Err(SimError::TableInvalid {
            path: path.to_path_buf(),
            report: report.to_string(),
        });
    }
    Ok(table)
}

impl Descriptor {
    /// Builds the strategy, loading and verifying each table once.
    pub fn resolve(&self) -> Result<Arc<dyn Strategy>, SimError> {
        self.resolve_with(&mut HashMap::new())
    }

    fn resolve_with(
        &self,
        tables: &mut HashMap<PathBuf, Arc<CodeTable>>,
    ) -> Result<Arc<dyn Strategy>, SimError> {
        let mut table = |path: &PathBuf| -> Result<Arc<CodeTable>, SimError> {
            if let Some(t) = tables.get(path) {
                return Ok(t.clone());
            }
            let t = Arc::new(load_verified_table(path)?);
            tables.insert(path.clone(), t.clone());
            Ok(t)
        };
        Ok(match self {
            Descriptor::Flood(n) => Arc::new(Flood::new(*n)),
            Descriptor::Block(p) => Arc::new(CodeBlock::new(table(p)?, self.to_string())),
            Descriptor::Theorem2(p) => Arc::new(theorem2(table(p)?, &p.display().to_string())),
            Descriptor::Compose(a, b) => {
                Arc::new(compose(a.resolve_with(tables)?, b.resolve_with(tables)?))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdversaryKind {
    Random,
    Sweep,
}

impl FromStr for AdversaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(AdversaryKind::Random),
            "sweep" => Ok(AdversaryKind::Sweep),
            _ => Err(format!(
                "unknown adversary {s:?} (expected random or sweep)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    pub strategy: String,
    pub adversary: AdversaryKind,
    pub seed: u64,
    pub games: u64,
    pub wins: u64,
    pub errors: u64,
    pub max_set_size: usize,
    pub set_size_histogram: BTreeMap<usize, u64>,
    /// Lowest-numbered lost game, if any.
    pub first_loss: Option<Loss>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Loss {
    pub trial: u64,
    pub reason: String,
    pub transcript: Option<Transcript>,
}

impl BatchReport {
    fn empty(strategy: String, adversary: AdversaryKind, seed: u64) -> Self {
        BatchReport {
            strategy,
            adversary,
            seed,
            games: 0,
            wins: 0,
            errors: 0,
            max_set_size: 0,
            set_size_histogram: BTreeMap::new(),
            first_loss: None,
        }
    }

    fn record(mut self, trial: u64, outcome: Result<GameResult, GameError>) -> Self {
        self.games += 1;
        let loss = match outcome {
            Ok(res) => {
                self.max_set_size = self.max_set_size.max(res.set_size);
                *self.set_size_histogram.entry(res.set_size).or_default() += 1;
                if res.win {
                    self.wins += 1;
                    None
                } else {
                    Some(Loss {
                        trial,
                        reason: "Bob's set misses Merlin's position or is too large".into(),
                        transcript: Some(res.transcript),
                    })
                }
            }
            Err(e) => {
                self.errors += 1;
                Some(Loss {
                    trial,
                    reason: e.to_string(),
                    transcript: None,
                })
            }
        };
        if let Some(l) = loss {
            self.keep_loss(l);
        }
        self
    }

    fn keep_loss(&mut self, loss: Loss) {
        if self
            .first_loss
            .as_ref()
            .is_none_or(|l| loss.trial < l.trial)
        {
            self.first_loss = Some(loss);
        }
    }

    fn merge(mut self, other: BatchReport) -> Self {
        self.games += other.games;
        self.wins += other.wins;
        self.errors += other.errors;
        self.max_set_size = self.max_set_size.max(other.max_set_size);
        for (size, n) in other.set_size_histogram {
            *self.set_size_histogram.entry(size).or_default() += n;
        }
        if let Some(l) = other.first_loss {
            self.keep_loss(l);
        }
        self
    }

    pub fn all_won(&self) -> bool {
        self.wins == self.games
    }
}

impl fmt::Display for BatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "strategy:  {}", self.strategy)?;
        writeln!(f, "adversary: {:?} (seed {})", self.adversary, self.seed)?;
        writeln!(f, "games:     {}", self.games)?;
        writeln!(f, "wins:      {}", self.wins)?;
        writeln!(f, "max |S|:   {}", self.max_set_size)?;
        for (size, n) in &self.set_size_histogram {
            writeln!(f, "  |S| = {size}: {n}")?;
        }
        if let Some(l) = &self.first_loss {
            writeln!(f, "first loss at trial {}: {}", l.trial, l.reason)?;
            if let Some(t) = &l.transcript {
                writeln!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

/// Plays `trials` games; trial `i` uses adversary seed `seed + i`, so the
/// parallel and sequential reports are identical.
pub fn simulate_batch(
    strategy: &dyn Strategy,
    adversary: AdversaryKind,
    trials: u64,
    seed: u64,
    parallel: bool,
) -> BatchReport {
    let n = strategy.len();
    let describe = strategy.describe();
    let play = |trial: u64| {
        let s = seed.wrapping_add(trial);
        match adversary {
            AdversaryKind::Random => run_game(strategy, &mut RandomAdversary::new(n, s)),
            AdversaryKind::Sweep => run_game(strategy, &mut SweepAdversary::new(n, s)),
        }
    };
    let empty = || BatchReport::empty(describe.clone(), adversary, seed);
    if parallel {
        (0..trials)
            .into_par_iter()
            .fold(empty, |r, t| r.record(t, play(t)))
            .reduce(empty, BatchReport::merge)
    } else {
        (0..trials).fold(empty(), |r, t| r.record(t, play(t)))
    }
}

/// Merlin driven by a human over a line-oriented stream.
///
/// Each input line may hold several comma-separated tokens: a position to
/// reveal, `auto` to hand the rest of the game to a seeded random Merlin,
/// and `bit=0`/`bit=1` (or a bare `0`/`1`) for the final bit.
pub struct InteractiveAdversary<R, W> {
    input: R,
    output: W,
    pending: Vec<String>,
    auto: Option<ChaCha8Rng>,
    seed: u64,
}

impl<R: BufRead, W: Write> InteractiveAdversary<R, W> {
    pub fn new(input: R, output: W, seed: u64) -> Self {
        InteractiveAdversary {
            input,
            output,
            pending: Vec::new(),
            auto: None,
            seed,
        }
    }

    pub fn output(&mut self) -> &mut W {
        &mut self.output
    }

    fn next_token(&mut self, prompt: &str) -> Result<String, GameError> {
        while self.pending.is_empty() {
            write!(self.output, "{prompt}").map_err(|_| GameError::Aborted)?;
            self.output.flush().map_err(|_| GameError::Aborted)?;
            let mut line = String::new();
            let read = self
                .input
                .read_line(&mut line)
                .map_err(|_| GameError::Aborted)?;
            if read == 0 {
                writeln!(self.output).ok();
                return Err(GameError::Aborted);
            }
            self.pending = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .rev()
                .collect();
        }
        Ok(self.pending.pop().expect("non-empty"))
    }

    fn say(&mut self, msg: impl fmt::Display) -> Result<(), GameError> {
        writeln!(self.output, "{msg}").map_err(|_| GameError::Aborted)
    }

    fn show(&mut self, board: &Board) -> Result<(), GameError> {
        let open = board.open_positions();
        self.say(format_args!("board: {board}"))?;
        self.say(format_args!("open:  {open:?}"))
    }
}

impl<R: BufRead, W: Write> Adversary for InteractiveAdversary<R, W> {
    fn next_index(&mut self, board: &Board) -> Result<usize, GameError> {
        if let Some(rng) = self.auto.as_mut() {
            let open = board.open_positions();
            return Ok(*open.choose(rng).expect("open position"));
        }
        self.show(board)?;
        loop {
            let token = self.next_token("reveal> ")?;
            if token == "auto" {
                self.say("auto: random Merlin plays the rest")?;
                self.auto = Some(ChaCha8Rng::seed_from_u64(self.seed));
                return self.next_index(board);
            }
            match token.parse::<usize>() {
                Ok(i) if board.is_open(i) => return Ok(i),
                Ok(i) if (1..=board.len()).contains(&i) => {
                    self.say(format_args!("position {i} is already filled"))?
                }
                _ => self.say(format_args!(
                    "enter a position in 1..={} or `auto`",
                    board.len()
                ))?,
            }
        }
    }

    fn final_bit(&mut self, board: &Board, position: usize) -> Result<bool, GameError> {
        if let Some(rng) = self.auto.as_mut() {
            return Ok(rng.gen());
        }
        self.show(board)?;
        self.say(format_args!("Merlin fills position {position}"))?;
        loop {
            let token = self.next_token("bit> ")?;
            match token.strip_prefix("bit=").unwrap_or(&token) {
                "0" => return Ok(false),
                "1" => return Ok(true),
                _ => self.say("enter bit=0 or bit=1")?,
            }
        }
    }
}

/// Runs one game with a human Merlin, then prints Bob's answer.
pub fn interactive_play<R: BufRead, W: Write>(
    strategy: &dyn Strategy,
    input: R,
    output: W,
    seed: u64,
) -> Result<GameResult, SimError> {
    let mut merlin = InteractiveAdversary::new(input, output, seed);
    merlin.say(format_args!(
        "{}: n={} k={}",
        strategy.describe(),
        strategy.len(),
        strategy.k()
    ))?;
    let result = run_game(strategy, &mut merlin)?;
    let t = &result.transcript;
    merlin.say(format_args!("final: {}", t.written_bits))?;
    merlin.say(format_args!("S={:?} bit={}", t.bob_set, t.bob_bit as u8))?;
    merlin.say(if result.win {
        "win"
    } else {
        "LOSS (strategy defect)"
    })?;
    Ok(result)
}

//! The game engine and the strategy contract every strategy implements.
//!
//! Merlin reveals positions `1..=n` one at a time. Alice writes a bit at each
//! revealed position as soon as she sees it, except for the last one, which
//! Merlin fills himself. Bob then sees the finished string and names a set of
//! positions; Alice and Bob win if the set contains Merlin's position and has
//! at most `k` elements.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Errors raised by strategies. None of these occur in honest play against a
/// strategy built from a verified table; they signal a broken table, a broken
/// engine, or a corrupted transcript.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("position {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("decoder expected {expected} bits, got {found}")]
    WordLength { expected: usize, found: usize },
    #[error("word has more than one 1 (at {positions:?})")]
    MultipleOnes { positions: Vec<usize> },
    #[error("block {word} is not within one free flip of any codeword")]
    NoMatch { word: String },
    #[error("no table row is underlined at {0:?}")]
    LookupNotFound(Vec<usize>),
    #[error("protocol violation: {0}")]
    Protocol(String),
}

/// What Bob outputs: a set of 1-indexed positions (sorted, distinct) and the
/// bit Alice transmitted when she completed the instance herself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decoded {
    pub set: Vec<usize>,
    pub bit: bool,
}

/// Alice's side of one game. Sessions are deterministic.
pub trait AliceSession {
    /// Bit Alice writes at `index`, which has just been revealed.
    fn fill(&mut self, index: usize) -> Result<bool, StrategyError>;

    /// Bit Alice writes at the last position of the instance when she, not
    /// Merlin, fills it and wants Bob to decode `transmit`.
    fn fill_final(&mut self, index: usize, transmit: bool) -> Result<bool, StrategyError>;
}

/// A `(k, n)`-strategy with the bit-transmission hook.
///
/// If Merlin fills the last revealed position `p`, then `decode` returns a
/// set containing `p` of size at most `k`. If Alice fills all `n` positions
/// ending with `fill_final(_, b)`, then `decode` returns bit `b`.
pub trait Strategy: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Declared bound on Bob's set.
    fn k(&self) -> usize;

    fn session(&self) -> Box<dyn AliceSession + '_>;

    fn decode(&self, word: &[bool]) -> Result<Decoded, StrategyError>;

    /// Descriptor string (`flood:9`, `compose(...)`, ...).
    fn describe(&self) -> String;

    /// Number of representative arrival orders, if the strategy has a
    /// structural enumeration. Every reachable final string for this strategy
    /// is produced by one of these orders with one of the two Merlin bits.
    fn structural_orders(&self) -> Option<u128> {
        None
    }

    /// The `index`-th representative order; the last entry is Merlin's.
    fn structural_order(&self, index: u128) -> Vec<usize> {
        let _ = index;
        panic!("{} has no structural enumeration", self.describe())
    }
}

impl fmt::Debug for dyn Strategy + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Strategy({}, n={}, k={})",
            self.describe(),
            self.len(),
            self.k()
        )
    }
}

/// The partially filled string, as seen by the adversary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    cells: Vec<Option<bool>>,
}

impl Board {
    pub fn new(n: usize) -> Self {
        Board {
            cells: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, position: usize) -> Option<bool> {
        self.cells[position - 1]
    }

    pub fn is_open(&self, position: usize) -> bool {
        (1..=self.len()).contains(&position) && self.cells[position - 1].is_none()
    }

    pub fn open_positions(&self) -> Vec<usize> {
        (1..=self.len())
            .filter(|&p| self.cells[p - 1].is_none())
            .collect()
    }

    fn set(&mut self, position: usize, bit: bool) {
        self.cells[position - 1] = Some(bit);
    }

    fn into_bits(self) -> Vec<bool> {
        self.cells
            .into_iter()
            .map(|c| c.expect("board complete"))
            .collect()
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            f.write_str(match c {
                Some(true) => "1",
                Some(false) => "0",
                None => "_",
            })?;
        }
        Ok(())
    }
}

/// Merlin. Adversaries may look at the board before choosing.
pub trait Adversary {
    /// Next position to reveal to Alice. Called `n - 1` times.
    fn next_index(&mut self, board: &Board) -> Result<usize, GameError>;

    /// Merlin's bit for the one remaining position.
    fn final_bit(&mut self, board: &Board, position: usize) -> Result<bool, GameError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("adversary revealed {index}: {reason}")]
    AdversaryProtocol { index: usize, reason: String },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("game aborted")]
    Aborted,
}

/// Complete record of one game. Positions are 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub arrival_order: Vec<usize>,
    pub written_bits: String,
    pub merlin_pos: usize,
    pub merlin_bit: bool,
    pub bob_set: Vec<usize>,
    pub bob_bit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameResult {
    pub transcript: Transcript,
    pub win: bool,
    pub set_size: usize,
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order: Vec<String> = self.arrival_order.iter().map(|p| p.to_string()).collect();
        writeln!(f, "order: {}", order.join(","))?;
        writeln!(f, "bits:  {}", self.written_bits)?;
        writeln!(
            f,
            "merlin: position {} bit {}",
            self.merlin_pos, self.merlin_bit as u8
        )?;
        write!(f, "bob: set {:?} bit {}", self.bob_set, self.bob_bit as u8)
    }
}

pub(crate) fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Plays one game of `strategy` against `merlin`.
pub fn run_game(
    strategy: &dyn Strategy,
    merlin: &mut dyn Adversary,
) -> Result<GameResult, GameError> {
    let n = strategy.len();
    let mut board = Board::new(n);
    let mut order = Vec::with_capacity(n);
    let mut session = strategy.session();
    for _ in 1..n {
        let index = merlin.next_index(&board)?;
        if !(1..=n).contains(&index) {
            return Err(GameError::AdversaryProtocol {
                index,
                reason: format!("outside 1..={n}"),
            });
        }
        if board.get(index).is_some() {
            return Err(GameError::AdversaryProtocol {
                index,
                reason: "already revealed".into(),
            });
        }
        let bit = session.fill(index)?;
        board.set(index, bit);
        order.push(index);
    }
    drop(session);
    let merlin_pos = board.open_positions()[0];
    let merlin_bit = merlin.final_bit(&board, merlin_pos)?;
    board.set(merlin_pos, merlin_bit);
    order.push(merlin_pos);

    let word = board.into_bits();
    let decoded = strategy.decode(&word)?;
    let set_size = decoded.set.len();
    let win = set_size <= strategy.k() && decoded.set.binary_search(&merlin_pos).is_ok();
    Ok(GameResult {
        transcript: Transcript {
            arrival_order: order,
            written_bits: bits_string(&word),
            merlin_pos,
            merlin_bit,
            bob_set: decoded.set,
            bob_bit: decoded.bit,
        },
        win,
        set_size,
    })
}

/// Has Alice fill every position in `order`, the last one through
/// `fill_final(_, transmit)`. Returns the finished string.
pub fn complete_by_alice(
    strategy: &dyn Strategy,
    order: &[usize],
    transmit: bool,
) -> Result<Vec<bool>, StrategyError> {
    let n = strategy.len();
    assert_eq!(order.len(), n, "order must cover every position");
    let mut word = vec![false; n];
    let mut session = strategy.session();
    let (&last, head) = order.split_last().expect("n >= 1");
    for &i in head {
        word[i - 1] = session.fill(i)?;
    }
    word[last - 1] = session.fill_final(last, transmit)?;
    Ok(word)
}

/// Merlin with a fixed arrival order and final bit.
#[derive(Debug, Clone)]
pub struct FixedAdversary {
    order: Vec<usize>,
    bit: bool,
    next: usize,
}

impl FixedAdversary {
    /// `order` lists all `n` positions; its last entry is left for Merlin.
    pub fn new(order: Vec<usize>, bit: bool) -> Self {
        FixedAdversary {
            order,
            bit,
            next: 0,
        }
    }
}

impl Adversary for FixedAdversary {
    fn next_index(&mut self, _board: &Board) -> Result<usize, GameError> {
        let i = self.order.get(self.next).copied().unwrap_or(0);
        self.next += 1;
        Ok(i)
    }

    fn final_bit(&mut self, _board: &Board, position: usize) -> Result<bool, GameError> {
        match self.order.last() {
            Some(&p) if p == position => Ok(self.bit),
            _ => Err(GameError::AdversaryProtocol {
                index: position,
                reason: "order does not end at the open position".into(),
            }),
        }
    }
}

/// Uniformly random permutation and bit, fixed by the seed.
#[derive(Debug, Clone)]
pub struct RandomAdversary {
    inner: FixedAdversary,
}

impl RandomAdversary {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(&mut rng);
        let bit = rng.gen::<bool>();
        RandomAdversary {
            inner: FixedAdversary::new(order, bit),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.inner.order
    }

    pub fn bit(&self) -> bool {
        self.inner.bit
    }
}

impl Adversary for RandomAdversary {
    fn next_index(&mut self, board: &Board) -> Result<usize, GameError> {
        self.inner.next_index(board)
    }

    fn final_bit(&mut self, board: &Board, position: usize) -> Result<bool, GameError> {
        self.inner.final_bit(board, position)
    }
}

/// Deterministic structured permutations, indexed by a family id.
///
/// Ids cycle through identity, reversal, a stride walk and an interleave
/// of the two halves; higher ids rotate the result and alternate the bit.
#[derive(Debug, Clone)]
pub struct SweepAdversary {
    inner: FixedAdversary,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SweepAdversary {
    pub const KINDS: u64 = 4;

    pub fn new(n: usize, family: u64) -> Self {
        let kind = family % Self::KINDS;
        let bit = (family / Self::KINDS) % 2 == 1;
        let rotation = ((family / (2 * Self::KINDS)) % n.max(1) as u64) as usize;
        let base: Vec<usize> = match kind {
            0 => (1..=n).collect(),
            1 => (1..=n).rev().collect(),
            2 => {
                let mut stride = (n / 2).max(1) + 1;
                while gcd(stride, n) != 1 {
                    stride += 1;
                }
                (0..n).map(|i| (i * stride) % n + 1).collect()
            }
            _ => {
                let half = n.div_ceil(2);
                (0..half)
                    .flat_map(|i| [i + 1, i + 1 + half])
                    .filter(|&p| p <= n)
                    .collect()
            }
        };
        let mut order = base;
        order.rotate_left(rotation);
        SweepAdversary {
            inner: FixedAdversary::new(order, bit),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.inner.order
    }
}

impl Adversary for SweepAdversary {
    fn next_index(&mut self, board: &Board) -> Result<usize, GameError> {
        self.inner.next_index(board)
    }

    fn final_bit(&mut self, board: &Board, position: usize) -> Result<bool, GameError> {
        self.inner.final_bit(board, position)
    }
}

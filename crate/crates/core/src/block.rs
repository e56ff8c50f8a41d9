//! Single-block protocol over an underlined-codeword table.
//!
//! Alice writes ones at the first `u` positions she is shown, looks up the
//! row underlined exactly there, and copies that row for every later
//! position. At the block's last position she either copies the row
//! (transmitting 1) or writes its complement (transmitting 0), so a block
//! she completes alone is either a row or a row with one flipped free bit.
//! When Merlin fills the last position instead, Bob sees a row (and names
//! its free positions) or a row with one error (and names the error).

use std::sync::Arc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code_table::{
    binomial, bits_to_string, mask_positions, pack_bits, positions_mask, verify_table, CodeTable,
    DecodeResult, TableReport,
};
use crate::game::{AliceSession, Decoded, Strategy, StrategyError};

/// The `(m - u, m)`-strategy built on a table.
#[derive(Debug, Clone)]
pub struct CodeBlock {
    table: Arc<CodeTable>,
    label: String,
    // underline masks in the order used by the structural enumeration
    subsets: Option<Vec<u64>>,
}

const STRUCTURAL_SUBSET_LIMIT: u128 = 1 << 20;

impl CodeBlock {
    /// Wraps `table` without checking it. Sessions fail with
    /// [`StrategyError::LookupNotFound`] when a subset has no row.
    pub fn new(table: Arc<CodeTable>, label: impl Into<String>) -> Self {
        assert!(
            table.u() < table.m(),
            "block strategy needs at least one free position"
        );
        let subsets = (binomial(table.m() as u64, table.u() as u64) <= STRUCTURAL_SUBSET_LIMIT)
            .then(|| {
                (1..=table.m())
                    .combinations(table.u())
                    .map(|s| positions_mask(&s))
                    .collect()
            });
        CodeBlock {
            table,
            label: label.into(),
            subsets,
        }
    }

    /// Wraps `table` after it passes both table checks.
    pub fn verified(
        table: Arc<CodeTable>,
        label: impl Into<String>,
    ) -> Result<Self, Box<TableReport>> {
        let report = verify_table(&table);
        if !report.pass() || table.u() >= table.m() {
            return Err(Box::new(report));
        }
        Ok(CodeBlock::new(table, label))
    }

    pub fn table(&self) -> &CodeTable {
        &self.table
    }
}

struct BlockSession<'a> {
    table: &'a CodeTable,
    arrivals: usize,
    first: u64,
    assigned: Option<usize>,
}

impl BlockSession<'_> {
    fn assigned_bit(&self, index: usize) -> Result<bool, StrategyError> {
        let row = self
            .assigned
            .ok_or_else(|| StrategyError::Protocol("no codeword assigned yet".into()))?;
        Ok(self.table.rows()[row].bit(index))
    }

    fn arrive(&mut self, index: usize) -> Result<(), StrategyError> {
        let m = self.table.m();
        if !(1..=m).contains(&index) {
            return Err(StrategyError::IndexOutOfRange { index, n: m });
        }
        self.arrivals += 1;
        if self.arrivals > m {
            return Err(StrategyError::Protocol(format!("more than {m} arrivals")));
        }
        Ok(())
    }
}

impl AliceSession for BlockSession<'_> {
    fn fill(&mut self, index: usize) -> Result<bool, StrategyError> {
        self.arrive(index)?;
        let u = self.table.u();
        if self.arrivals > u {
            return self.assigned_bit(index);
        }
        self.first |= 1 << (index - 1);
        if self.arrivals == u {
            let row = self
                .table
                .lookup_index(self.first)
                .ok_or_else(|| StrategyError::LookupNotFound(mask_positions(self.first)))?;
            self.assigned = Some(row);
        }
        Ok(true)
    }

    fn fill_final(&mut self, index: usize, transmit: bool) -> Result<bool, StrategyError> {
        self.arrive(index)?;
        if self.arrivals != self.table.m() {
            return Err(StrategyError::Protocol(format!(
                "fill_final at arrival {} of {}",
                self.arrivals,
                self.table.m()
            )));
        }
        let bit = self.assigned_bit(index)?;
        Ok(if transmit { bit } else { !bit })
    }
}

impl Strategy for CodeBlock {
    fn len(&self) -> usize {
        self.table.m()
    }

    fn k(&self) -> usize {
        self.table.m() - self.table.u()
    }

    fn session(&self) -> Box<dyn AliceSession + '_> {
        Box::new(BlockSession {
            table: &self.table,
            arrivals: 0,
            first: 0,
            assigned: None,
        })
    }

    fn decode(&self, word: &[bool]) -> Result<Decoded, StrategyError> {
        let m = self.table.m();
        if word.len() != m {
            return Err(StrategyError::WordLength {
                expected: m,
                found: word.len(),
            });
        }
        let packed = pack_bits(word);
        match self.table.decode_packed(packed) {
            DecodeResult::Exact(row) => Ok(Decoded {
                set: self.table.rows()[row].free_positions(),
                bit: true,
            }),
            DecodeResult::OneError { position, .. } => Ok(Decoded {
                set: vec![position],
                bit: false,
            }),
            DecodeResult::NoMatch => Err(StrategyError::NoMatch {
                word: bits_to_string(packed, m),
            }),
        }
    }

    fn describe(&self) -> String {
        self.label.clone()
    }

    fn structural_orders(&self) -> Option<u128> {
        let free = (self.table.m() - self.table.u()) as u128;
        self.subsets.as_ref().map(|s| s.len() as u128 * free)
    }

    fn structural_order(&self, index: u128) -> Vec<usize> {
        let subsets = self
            .subsets
            .as_ref()
            .expect("structural enumeration available");
        let free = (self.table.m() - self.table.u()) as u128;
        let first = subsets[(index / free) as usize];
        let last = (1..=self.table.m())
            .filter(|&p| first >> (p - 1) & 1 == 0)
            .nth((index % free) as usize)
            .expect("index within range");
        canonical_order(self.table.m(), first, last)
    }
}

/// `first` ascending, then the remaining positions ascending, then `last`.
fn canonical_order(m: usize, first: u64, last: usize) -> Vec<usize> {
    let mut order = mask_positions(first);
    order.extend((1..=m).filter(|&p| first >> (p - 1) & 1 == 0 && p != last));
    order.push(last);
    order
}

/// How the last position of a block is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Completion {
    Alice { transmit: bool },
    Merlin { bit: bool },
}

impl Completion {
    pub const ALL: [Completion; 4] = [
        Completion::Alice { transmit: false },
        Completion::Alice { transmit: true },
        Completion::Merlin { bit: false },
        Completion::Merlin { bit: true },
    ];
}

/// Fills one block in `order`, completing its last position per `mode`.
pub fn complete_block(
    block: &CodeBlock,
    order: &[usize],
    mode: Completion,
) -> Result<u64, StrategyError> {
    let mut session = block.session();
    let (&last, head) = order.split_last().expect("non-empty order");
    let mut word = 0u64;
    for &i in head {
        if session.fill(i)? {
            word |= 1 << (i - 1);
        }
    }
    let bit = match mode {
        Completion::Alice { transmit } => session.fill_final(last, transmit)?,
        Completion::Merlin { bit } => bit,
    };
    if bit {
        word |= 1 << (last - 1);
    }
    Ok(word)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockFailure {
    pub first: Vec<usize>,
    pub last: usize,
    pub mode: Completion,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub cases: u64,
    pub passed: u64,
    pub max_set_size: usize,
    pub order_samples: u64,
    pub order_failures: u64,
    /// First few failures of either kind.
    pub failures: Vec<BlockFailure>,
}

impl BlockReport {
    pub fn pass(&self) -> bool {
        self.passed == self.cases && self.order_failures == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralOptions {
    pub order_samples: u64,
    pub seed: u64,
}

impl Default for StructuralOptions {
    fn default() -> Self {
        StructuralOptions {
            order_samples: 10_000,
            seed: 0,
        }
    }
}

const MAX_LISTED_FAILURES: usize = 32;

fn check_case(
    block: &CodeBlock,
    first: u64,
    last: usize,
    mode: Completion,
) -> Result<usize, String> {
    let table = block.table();
    let m = table.m();
    let word =
        complete_block(block, &canonical_order(m, first, last), mode).map_err(|e| e.to_string())?;
    let row = table
        .lookup_index(first)
        .ok_or_else(|| format!("lookup NotFound for {:?}", mask_positions(first)))?;
    let bits = |w: u64| bits_to_string(w, m);
    match mode {
        Completion::Alice { transmit: false } => match table.decode_packed(word) {
            DecodeResult::OneError { row: r, position } if r == row && position == last => Ok(1),
            other => Err(format!("block {} decoded as {other:?}", bits(word))),
        },
        Completion::Alice { transmit: true } => {
            if word == table.rows()[row].bits() {
                Ok(m - table.u())
            } else {
                Err(format!("block {} differs from its row", bits(word)))
            }
        }
        Completion::Merlin { .. } => {
            let mut as_bits = vec![false; m];
            for (i, b) in as_bits.iter_mut().enumerate() {
                *b = word >> i & 1 == 1;
            }
            let decoded = block.decode(&as_bits).map_err(|e| e.to_string())?;
            if decoded.set.contains(&last) && decoded.set.len() <= block.k() {
                Ok(decoded.set.len())
            } else {
                Err(format!(
                    "Bob names {:?} for block {}",
                    decoded.set,
                    bits(word)
                ))
            }
        }
    }
}

/// Exhaustively checks every (first-`u` set, last position, completion)
/// configuration of the block protocol, then samples random arrival orders
/// to confirm the completed block does not depend on the middle order.
pub fn structural_verify_block(table: Arc<CodeTable>, options: StructuralOptions) -> BlockReport {
    let m = table.m();
    let u = table.u();
    let block = CodeBlock::new(table, "block");
    let mut failures = Vec::new();
    let mut cases = 0u64;
    let mut passed = 0u64;
    let mut max_set_size = 0usize;
    let note = |failures: &mut Vec<BlockFailure>, f: BlockFailure| {
        if failures.len() < MAX_LISTED_FAILURES {
            failures.push(f);
        }
    };

    for first in (1..=m).combinations(u) {
        let first_mask = positions_mask(&first);
        for last in (1..=m).filter(|p| !first.contains(p)) {
            for mode in Completion::ALL {
                cases += 1;
                match check_case(&block, first_mask, last, mode) {
                    Ok(size) => {
                        passed += 1;
                        max_set_size = max_set_size.max(size);
                    }
                    Err(reason) => note(
                        &mut failures,
                        BlockFailure {
                            first: first.clone(),
                            last,
                            mode,
                            reason,
                        },
                    ),
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let positions: Vec<usize> = (1..=m).collect();
    let mut order_failures = 0u64;
    for _ in 0..options.order_samples {
        let mut shuffled = positions.clone();
        shuffled.shuffle(&mut rng);
        let first: Vec<usize> = shuffled[..u].to_vec();
        let last = shuffled[m - 1];
        let mode = Completion::ALL[rng.gen_range(0..4)];
        let first_mask = positions_mask(&first);
        let reference = complete_block(&block, &canonical_order(m, first_mask, last), mode);
        let sampled = complete_block(&block, &shuffled, mode);
        let same = match (&reference, &sampled) {
            (Ok(a), Ok(b)) => a == b,
            (Err(a), Err(b)) => a == b,
            _ => false,
        };
        if !same {
            order_failures += 1;
            let mut sorted = first;
            sorted.sort_unstable();
            note(
                &mut failures,
                BlockFailure {
                    first: sorted,
                    last,
                    mode,
                    reason: format!(
                        "order {shuffled:?} gives {sampled:?}, canonical gives {reference:?}"
                    ),
                },
            );
        }
    }

    BlockReport {
        cases,
        passed,
        max_set_size,
        order_samples: options.order_samples,
        order_failures,
        failures,
    }
}

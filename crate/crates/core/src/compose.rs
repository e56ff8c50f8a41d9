//! Composition of two strategies into one over `n * n'` positions.
//!
//! The string is cut into `n` blocks of `n'` positions; each block runs its
//! own inner session. When Alice completes a block herself, she asks the
//! outer session what bit block `i` should carry and transmits it through the
//! inner strategy's final fill. Bob decodes every block to get its set and
//! bit, runs the outer decoder on the block bits, and returns the union of
//! the sets of the blocks the outer decoder names. Merlin's block is the one
//! block Alice never completes, which is exactly the outer game's Merlin
//! position.

use std::sync::Arc;

use crate::block::CodeBlock;
use crate::code_table::CodeTable;
use crate::flood::Flood;
use crate::game::{AliceSession, Decoded, Strategy, StrategyError};
use crate::verify::{probe_games, GameReport, Probe, VerifyError};

/// `outer` played over blocks, each block an instance of `inner`.
#[derive(Clone)]
pub struct Composed {
    outer: Arc<dyn Strategy>,
    inner: Arc<dyn Strategy>,
    label: Option<String>,
    declared_k: Option<usize>,
}

impl std::fmt::Debug for Composed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Composed({})", self.describe())
    }
}

pub fn compose(outer: Arc<dyn Strategy>, inner: Arc<dyn Strategy>) -> Composed {
    Composed {
        outer,
        inner,
        label: None,
        declared_k: None,
    }
}

/// The `(9, 108)`-strategy: nine independent blocks under a flood outer
/// layer that always asks each block to differ from its codeword.
///
/// The generic composition bound would be `9 * 9`; this strategy declares
/// `k = 9` because Bob names either the free positions of Merlin's block
/// (the only block left equal to a codeword) or one error position per
/// block. The structural probe confirms it for a given table.
pub fn theorem2(table: Arc<CodeTable>, table_label: &str) -> Composed {
    let block = CodeBlock::new(table, format!("block:{table_label}"));
    let free = block.k();
    let mut c = compose(Arc::new(Flood::new(9)), Arc::new(block));
    c.label = Some(format!("theorem2:{table_label}"));
    c.declared_k = Some(free.max(9));
    c
}

impl Composed {
    pub fn outer(&self) -> &Arc<dyn Strategy> {
        &self.outer
    }

    pub fn inner(&self) -> &Arc<dyn Strategy> {
        &self.inner
    }

    /// 1-based (block, local position) of global position `j`.
    pub fn locate(&self, j: usize) -> (usize, usize) {
        let width = self.inner.len();
        ((j - 1) / width + 1, (j - 1) % width + 1)
    }

    pub fn global(&self, block: usize, local: usize) -> usize {
        (block - 1) * self.inner.len() + local
    }
}

struct ComposedSession<'a> {
    strategy: &'a Composed,
    outer: Box<dyn AliceSession + 'a>,
    inner: Vec<Option<Box<dyn AliceSession + 'a>>>,
    counts: Vec<usize>,
}

impl ComposedSession<'_> {
    /// Records arrival of global position `j`; returns (block, local, completes).
    fn arrive(&mut self, j: usize) -> Result<(usize, usize, bool), StrategyError> {
        let n = self.strategy.len();
        if !(1..=n).contains(&j) {
            return Err(StrategyError::IndexOutOfRange { index: j, n });
        }
        let (block, local) = self.strategy.locate(j);
        self.counts[block - 1] += 1;
        let completes = self.counts[block - 1] == self.strategy.inner.len();
        if self.inner[block - 1].is_none() {
            self.inner[block - 1] = Some(self.strategy.inner.session());
        }
        Ok((block, local, completes))
    }

    fn block(&mut self, block: usize) -> &mut dyn AliceSession {
        self.inner[block - 1]
            .as_deref_mut()
            .expect("session created on arrival")
    }
}

impl AliceSession for ComposedSession<'_> {
    fn fill(&mut self, j: usize) -> Result<bool, StrategyError> {
        let (block, local, completes) = self.arrive(j)?;
        if completes {
            let carry = self.outer.fill(block)?;
            self.block(block).fill_final(local, carry)
        } else {
            self.block(block).fill(local)
        }
    }

    fn fill_final(&mut self, j: usize, transmit: bool) -> Result<bool, StrategyError> {
        let (block, local, completes) = self.arrive(j)?;
        if !completes {
            return Err(StrategyError::Protocol(format!(
                "final position {j} arrived before block {block} was otherwise complete"
            )));
        }
        let carry = self.outer.fill_final(block, transmit)?;
        self.block(block).fill_final(local, carry)
    }
}

impl Strategy for Composed {
    fn len(&self) -> usize {
        self.outer.len() * self.inner.len()
    }

    fn k(&self) -> usize {
        self.declared_k.unwrap_or(self.outer.k() * self.inner.k())
    }

    fn session(&self) -> Box<dyn AliceSession + '_> {
        let blocks = self.outer.len();
        Box::new(ComposedSession {
            strategy: self,
            outer: self.outer.session(),
            inner: (0..blocks).map(|_| None).collect(),
            counts: vec![0; blocks],
        })
    }

    fn decode(&self, word: &[bool]) -> Result<Decoded, StrategyError> {
        let n = self.len();
        if word.len() != n {
            return Err(StrategyError::WordLength {
                expected: n,
                found: word.len(),
            });
        }
        let width = self.inner.len();
        let blocks: Vec<Decoded> = word
            .chunks(width)
            .map(|chunk| self.inner.decode(chunk))
            .collect::<Result<_, _>>()?;
        let carried: Vec<bool> = blocks.iter().map(|d| d.bit).collect();
        let outer = self.outer.decode(&carried)?;
        let mut set = Vec::with_capacity(outer.set.len() * self.inner.k());
        for &block in &outer.set {
            set.extend(
                blocks[block - 1]
                    .set
                    .iter()
                    .map(|&local| self.global(block, local)),
            );
        }
        // blocks ascend and each block's set ascends, so `set` is sorted
        Ok(Decoded {
            set,
            bit: outer.bit,
        })
    }

    fn describe(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            format!(
                "compose({},{})",
                self.outer.describe(),
                self.inner.describe()
            )
        })
    }

    /// Representative outer orders times representative inner orders. Every
    /// block other than Merlin's is played in natural order, in the outer
    /// order's block sequence; Merlin's block is played last.
    fn structural_orders(&self) -> Option<u128> {
        self.outer
            .structural_orders()?
            .checked_mul(self.inner.structural_orders()?)
    }

    fn structural_order(&self, index: u128) -> Vec<usize> {
        let inner_count = self.inner.structural_orders().expect("inner structure");
        let outer_order = self.outer.structural_order(index / inner_count);
        let inner_order = self.inner.structural_order(index % inner_count);
        let width = self.inner.len();
        let (&merlin_block, others) = outer_order.split_last().expect("outer order non-empty");
        let mut order = Vec::with_capacity(self.len());
        for &block in others {
            order.extend((1..=width).map(|local| self.global(block, local)));
        }
        order.extend(
            inner_order
                .iter()
                .map(|&local| self.global(merlin_block, local)),
        );
        order
    }
}

/// Worst-case Bob set size over the honest games chosen by `probe`. The
/// returned report carries `exact = false` for sampled probes.
pub fn measured_k(
    strategy: &dyn Strategy,
    probe: Probe,
    budget: u128,
) -> Result<GameReport, VerifyError> {
    probe_games(strategy, probe, budget)
}

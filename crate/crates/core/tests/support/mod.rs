//! A hand-written `(9, 108)` strategy that shares nothing with the
//! composition machinery: linear row scans, explicit block arithmetic.

#![allow(dead_code)]

use gks_core::code_table::CodeTable;
use gks_core::game::{AliceSession, Decoded, Strategy, StrategyError};

const BLOCKS: usize = 9;
const WIDTH: usize = 12;

pub struct DirectTheorem2 {
    rows: Vec<(Vec<bool>, Vec<bool>)>,
}

impl DirectTheorem2 {
    pub fn new(table: &CodeTable) -> Self {
        assert_eq!((table.m(), table.u()), (WIDTH, 3));
        let rows = table
            .rows()
            .iter()
            .map(|r| {
                (
                    (1..=WIDTH).map(|p| r.bit(p)).collect(),
                    (1..=WIDTH).map(|p| r.is_underlined(p)).collect(),
                )
            })
            .collect();
        DirectTheorem2 { rows }
    }

    fn row_for(&self, arrivals: &[usize]) -> Option<usize> {
        self.rows.iter().position(|(_, under)| {
            (0..WIDTH)
                .filter(|&i| under[i])
                .eq(arrivals.iter().copied())
        })
    }

    /// `Some(None)` for an exact row, `Some(Some(i))` for a single flipped
    /// free bit at local index `i`.
    fn scan(&self, chunk: &[bool]) -> Option<(usize, Option<usize>)> {
        for (r, (bits, under)) in self.rows.iter().enumerate() {
            let diff: Vec<usize> = (0..WIDTH).filter(|&i| bits[i] != chunk[i]).collect();
            match diff.as_slice() {
                [] => return Some((r, None)),
                [i] if !under[*i] => return Some((r, Some(*i))),
                _ => {}
            }
        }
        None
    }
}

struct DirectSession<'a> {
    strategy: &'a DirectTheorem2,
    arrivals: Vec<Vec<usize>>,
    row: Vec<Option<usize>>,
}

impl AliceSession for DirectSession<'_> {
    fn fill(&mut self, index: usize) -> Result<bool, StrategyError> {
        if !(1..=BLOCKS * WIDTH).contains(&index) {
            return Err(StrategyError::IndexOutOfRange {
                index,
                n: BLOCKS * WIDTH,
            });
        }
        let (b, i) = ((index - 1) / WIDTH, (index - 1) % WIDTH);
        self.arrivals[b].push(i);
        let seen = self.arrivals[b].len();
        if seen <= 3 {
            if seen == 3 {
                let mut first = self.arrivals[b].clone();
                first.sort_unstable();
                let r = self.strategy.row_for(&first).ok_or_else(|| {
                    StrategyError::LookupNotFound(first.iter().map(|i| i + 1).collect())
                })?;
                self.row[b] = Some(r);
            }
            return Ok(true);
        }
        let r = self.row[b].expect("row fixed after three arrivals");
        let bit = self.strategy.rows[r].0[i];
        // A block Alice finishes herself is pushed off its codeword.
        Ok(if seen == WIDTH { !bit } else { bit })
    }

    fn fill_final(&mut self, _index: usize, _transmit: bool) -> Result<bool, StrategyError> {
        Err(StrategyError::Protocol(
            "direct strategy does not transmit".into(),
        ))
    }
}

impl Strategy for DirectTheorem2 {
    fn len(&self) -> usize {
        BLOCKS * WIDTH
    }

    fn k(&self) -> usize {
        9
    }

    fn session(&self) -> Box<dyn AliceSession + '_> {
        Box::new(DirectSession {
            strategy: self,
            arrivals: vec![Vec::new(); BLOCKS],
            row: vec![None; BLOCKS],
        })
    }

    fn decode(&self, word: &[bool]) -> Result<Decoded, StrategyError> {
        if word.len() != BLOCKS * WIDTH {
            return Err(StrategyError::WordLength {
                expected: BLOCKS * WIDTH,
                found: word.len(),
            });
        }
        let mut exact = Vec::new();
        let mut flips = Vec::new();
        for b in 0..BLOCKS {
            let chunk = &word[b * WIDTH..(b + 1) * WIDTH];
            match self.scan(chunk) {
                Some((r, None)) => exact.push((b, r)),
                Some((_, Some(i))) => flips.push(b * WIDTH + i + 1),
                None => {
                    return Err(StrategyError::NoMatch {
                        word: chunk.iter().map(|&x| if x { '1' } else { '0' }).collect(),
                    })
                }
            }
        }
        let bit = !exact.is_empty();
        let set = match exact.as_slice() {
            [] => flips,
            [(b, r)] => (0..WIDTH)
                .filter(|&i| !self.rows[*r].1[i])
                .map(|i| b * WIDTH + i + 1)
                .collect(),
            _ => {
                return Err(StrategyError::MultipleOnes {
                    positions: exact.iter().map(|(b, _)| b + 1).collect(),
                })
            }
        };
        Ok(Decoded { set, bit })
    }

    fn describe(&self) -> String {
        "direct-theorem2".into()
    }
}

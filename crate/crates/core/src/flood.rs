//! The trivial `(n, n)`-strategy: Alice writes zeros, so a single 1 in the
//! final string can only be Merlin's.

use crate::game::{AliceSession, Decoded, Strategy, StrategyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flood {
    n: usize,
}

impl Flood {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "flood needs at least one position");
        Flood { n }
    }
}

struct FloodSession {
    n: usize,
}

impl FloodSession {
    fn check(&self, index: usize) -> Result<(), StrategyError> {
        if (1..=self.n).contains(&index) {
            Ok(())
        } else {
            Err(StrategyError::IndexOutOfRange { index, n: self.n })
        }
    }
}

impl AliceSession for FloodSession {
    fn fill(&mut self, index: usize) -> Result<bool, StrategyError> {
        self.check(index)?;
        Ok(false)
    }

    fn fill_final(&mut self, index: usize, transmit: bool) -> Result<bool, StrategyError> {
        self.check(index)?;
        Ok(transmit)
    }
}

impl Strategy for Flood {
    fn len(&self) -> usize {
        self.n
    }

    fn k(&self) -> usize {
        self.n
    }

    fn session(&self) -> Box<dyn AliceSession + '_> {
        Box::new(FloodSession { n: self.n })
    }

    fn decode(&self, word: &[bool]) -> Result<Decoded, StrategyError> {
        if word.len() != self.n {
            return Err(StrategyError::WordLength {
                expected: self.n,
                found: word.len(),
            });
        }
        let ones: Vec<usize> = (1..=self.n).filter(|&p| word[p - 1]).collect();
        match ones.len() {
            0 => Ok(Decoded {
                set: (1..=self.n).collect(),
                bit: false,
            }),
            1 => Ok(Decoded {
                set: ones,
                bit: true,
            }),
            _ => Err(StrategyError::MultipleOnes { positions: ones }),
        }
    }

    fn describe(&self) -> String {
        format!("flood:{}", self.n)
    }

    // Outcome depends only on which position is left last.
    fn structural_orders(&self) -> Option<u128> {
        Some(self.n as u128)
    }

    fn structural_order(&self, index: u128) -> Vec<usize> {
        let last = index as usize + 1;
        (1..=self.n).filter(|&p| p != last).chain([last]).collect()
    }
}

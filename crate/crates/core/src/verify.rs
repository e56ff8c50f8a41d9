//! Game-level verification: exhaustive play, structural sweeps, sampled
//! play, and the bit-transmission half of the strategy contract.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::game::{
    complete_by_alice, run_game, FixedAdversary, RandomAdversary, Strategy, Transcript,
};

/// Default cap on the number of games a probe may play: `8! * 2`.
pub const DEFAULT_GAME_BUDGET: u128 = 80_640;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("{needed} games needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("{0} has no structural enumeration")]
    NoStructure(String),
}

/// A lost or failed game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub arrival_order: Vec<usize>,
    pub merlin_bit: bool,
    pub reason: String,
    pub transcript: Option<Transcript>,
}

/// Which honest games to play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    /// Every permutation and both Merlin bits.
    Exhaustive,
    /// The strategy's representative orders and both Merlin bits.
    Structural,
    /// Random permutations and bits; game `i` uses seed `seed + i`.
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameReport {
    pub strategy: String,
    pub n: usize,
    pub k: usize,
    pub games: u64,
    pub wins: u64,
    pub max_set_size: usize,
    pub set_sizes: BTreeMap<usize, u64>,
    /// False for sampled probes: `max_set_size` is then only a lower bound.
    pub exact: bool,
    pub counterexample: Option<Counterexample>,
}

impl GameReport {
    pub fn pass(&self) -> bool {
        self.wins == self.games && self.counterexample.is_none()
    }
}

#[derive(Default)]
struct Tally {
    games: u64,
    wins: u64,
    max_set_size: usize,
    set_sizes: BTreeMap<usize, u64>,
    // (game index, counterexample) with the lowest index kept
    failure: Option<(u64, Counterexample)>,
}

impl Tally {
    fn record(mut self, index: u64, order: Vec<usize>, bit: bool, strategy: &dyn Strategy) -> Self {
        self.games += 1;
        let outcome = run_game(strategy, &mut FixedAdversary::new(order.clone(), bit));
        let failure = match outcome {
            Ok(res) => {
                self.max_set_size = self.max_set_size.max(res.set_size);
                *self.set_sizes.entry(res.set_size).or_default() += 1;
                if res.win {
                    self.wins += 1;
                    None
                } else {
                    Some(Counterexample {
                        arrival_order: order,
                        merlin_bit: bit,
                        reason: format!(
                            "Bob's set of size {} misses position {} or exceeds k={}",
                            res.set_size,
                            res.transcript.merlin_pos,
                            strategy.k()
                        ),
                        transcript: Some(res.transcript),
                    })
                }
            }
            Err(e) => Some(Counterexample {
                arrival_order: order,
                merlin_bit: bit,
                reason: e.to_string(),
                transcript: None,
            }),
        };
        if let Some(c) = failure {
            self.keep_failure(index, c);
        }
        self
    }

    fn keep_failure(&mut self, index: u64, c: Counterexample) {
        match &self.failure {
            Some((i, _)) if *i <= index => {}
            _ => self.failure = Some((index, c)),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.games += other.games;
        self.wins += other.wins;
        self.max_set_size = self.max_set_size.max(other.max_set_size);
        for (size, count) in other.set_sizes {
            *self.set_sizes.entry(size).or_default() += count;
        }
        if let Some((i, c)) = other.failure {
            self.keep_failure(i, c);
        }
        self
    }

    fn into_report(self, strategy: &dyn Strategy, exact: bool) -> GameReport {
        GameReport {
            strategy: strategy.describe(),
            n: strategy.len(),
            k: strategy.k(),
            games: self.games,
            wins: self.wins,
            max_set_size: self.max_set_size,
            set_sizes: self.set_sizes,
            exact,
            counterexample: self.failure.map(|(_, c)| c),
        }
    }
}

fn factorial_games(n: usize) -> u128 {
    (1..=n as u128)
        .try_fold(2u128, |acc, i| acc.checked_mul(i))
        .unwrap_or(u128::MAX)
}

/// Plays every arrival order with both Merlin bits.
pub fn verify_exhaustive(strategy: &dyn Strategy, budget: u128) -> Result<GameReport, VerifyError> {
    let n = strategy.len();
    let needed = factorial_games(n);
    if needed > budget {
        return Err(VerifyError::BudgetExceeded { needed, budget });
    }
    let mut tally = Tally::default();
    let mut index = 0u64;
    for order in (1..=n).permutations(n) {
        for bit in [false, true] {
            tally = tally.record(index, order.clone(), bit, strategy);
            index += 1;
        }
    }
    Ok(tally.into_report(strategy, true))
}

/// Plays every representative order of the strategy with both Merlin bits.
pub fn verify_structural(strategy: &dyn Strategy, budget: u128) -> Result<GameReport, VerifyError> {
    let orders = strategy
        .structural_orders()
        .ok_or_else(|| VerifyError::NoStructure(strategy.describe()))?;
    let needed = orders.saturating_mul(2);
    if needed > budget || needed > u64::MAX as u128 {
        return Err(VerifyError::BudgetExceeded { needed, budget });
    }
    let tally = (0..needed as u64)
        .into_par_iter()
        .fold(Tally::default, |t, g| {
            let order = strategy.structural_order((g / 2) as u128);
            t.record(g, order, g % 2 == 1, strategy)
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally.into_report(strategy, true))
}

/// Plays `count` random games; game `i` uses adversary seed `seed + i`.
pub fn verify_sampled(strategy: &dyn Strategy, count: u64, seed: u64) -> GameReport {
    let n = strategy.len();
    let tally = (0..count)
        .into_par_iter()
        .fold(Tally::default, |t, i| {
            let adv = RandomAdversary::new(n, seed.wrapping_add(i));
            t.record(i, adv.order().to_vec(), adv.bit(), strategy)
        })
        .reduce(Tally::default, Tally::merge);
    tally.into_report(strategy, false)
}

/// Plays honest games selected by `probe`.
pub fn probe_games(
    strategy: &dyn Strategy,
    probe: Probe,
    budget: u128,
) -> Result<GameReport, VerifyError> {
    match probe {
        Probe::Exhaustive => verify_exhaustive(strategy, budget),
        Probe::Structural => verify_structural(strategy, budget),
        Probe::Sampled { count, seed } => {
            if count as u128 > budget {
                return Err(VerifyError::BudgetExceeded {
                    needed: count as u128,
                    budget,
                });
            }
            Ok(verify_sampled(strategy, count, seed))
        }
    }
}

/// Arrival orders used by [`verify_augmented`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orders {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransmitFailure {
    pub arrival_order: Vec<usize>,
    pub transmit: bool,
    pub written_bits: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AugmentedReport {
    pub strategy: String,
    pub checks: u64,
    pub failures: u64,
    /// First few failures, in check order.
    pub examples: Vec<TransmitFailure>,
}

impl AugmentedReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

const MAX_LISTED_FAILURES: usize = 16;

fn check_transmit(
    strategy: &dyn Strategy,
    order: &[usize],
    transmit: bool,
) -> Option<TransmitFailure> {
    let fail = |bits: Option<String>, reason: String| TransmitFailure {
        arrival_order: order.to_vec(),
        transmit,
        written_bits: bits,
        reason,
    };
    match complete_by_alice(strategy, order, transmit) {
        Err(e) => Some(fail(None, e.to_string())),
        Ok(word) => {
            let bits = crate::game::bits_string(&word);
            match strategy.decode(&word) {
                Err(e) => Some(fail(Some(bits), e.to_string())),
                Ok(d) if d.bit != transmit => {
                    Some(fail(Some(bits), format!("decoded bit {}", d.bit as u8)))
                }
                Ok(_) => None,
            }
        }
    }
}

/// Checks that Alice can transmit either bit when she fills every position.
pub fn verify_augmented(
    strategy: &dyn Strategy,
    orders: Orders,
    budget: u128,
) -> Result<AugmentedReport, VerifyError> {
    let n = strategy.len();
    let order_list: Vec<Vec<usize>> = match orders {
        Orders::Exhaustive => {
            let needed = factorial_games(n);
            if needed > budget {
                return Err(VerifyError::BudgetExceeded { needed, budget });
            }
            (1..=n).permutations(n).collect()
        }
        Orders::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut base: Vec<usize> = (1..=n).collect();
            (0..count)
                .map(|_| {
                    base.shuffle(&mut rng);
                    base.clone()
                })
                .collect()
        }
    };
    let failures: Vec<(usize, TransmitFailure)> = order_list
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, order)| {
            [false, true].into_iter().filter_map(move |b| {
                check_transmit(strategy, order, b).map(|f| (2 * i + b as usize, f))
            })
        })
        .collect();
    let total = failures.len() as u64;
    let mut failures = failures;
    failures.sort_by_key(|(i, _)| *i);
    Ok(AugmentedReport {
        strategy: strategy.describe(),
        checks: order_list.len() as u64 * 2,
        failures: total,
        examples: failures
            .into_iter()
            .take(MAX_LISTED_FAILURES)
            .map(|(_, f)| f)
            .collect(),
    })
}

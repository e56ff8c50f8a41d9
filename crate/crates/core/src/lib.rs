//! Strategies for the GKS game.
//!
//! Merlin reveals the positions of an `n`-bit string one at a time; Alice
//! fills each as it arrives, Merlin fills the last one, and Bob must name at
//! most `k` positions including Merlin's. This crate provides:
//!
//! * [`code_table`]: underlined-codeword tables, their text format, the
//!   coverage and ball-disjointness checks, and single-error decoding;
//! * [`game`]: the engine, the strategy contract and stock adversaries;
//! * [`flood`] and [`block`]: the two building-block strategies;
//! * [`compose`]: composition of strategies and the `(9, 108)`-strategy;
//! * [`verify`]: exhaustive, structural and sampled game verification;
//! * [`search`]: backtracking search for new tables;
//! * [`sim`]: descriptors, batch simulation and interactive play;
//! * [`exponent`]: cost exponents `ln k / ln n`.

pub mod block;
pub mod code_table;
pub mod compose;
pub mod exponent;
pub mod flood;
pub mod game;
pub mod search;
pub mod sim;
pub mod verify;

pub use block::{structural_verify_block, CodeBlock};
pub use code_table::{
    parse_table, serialize_table, verify_table, CodeTable, Codeword, DecodeResult,
};
pub use compose::{compose, measured_k, theorem2, Composed};
pub use exponent::exponent;
pub use flood::Flood;
pub use game::{run_game, Adversary, AliceSession, Decoded, GameResult, Strategy, Transcript};
pub use search::{brute_force_oracle, counting_bound, search_table, SearchOutcome, SearchProblem};

/// The shipped `m = 12, u = 3` table in UCODE v1.
pub const CANONICAL_TABLE_TEXT: &str = include_str!("../../../tables/gks_12_3.ucode");

/// Parses [`CANONICAL_TABLE_TEXT`].
pub fn canonical_table() -> CodeTable {
    parse_table(CANONICAL_TABLE_TEXT).expect("shipped table parses")
}

use thiserror::Error;

use crate::game::Move;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value overflow computing term {index} of the ({c},{k})-nacci sequence")]
    Overflow { c: u32, k: u32, index: usize },

    #[error("move {mv} is not applicable to the current state")]
    IllegalMove { mv: Move },

    #[error("invalid state key: {0}")]
    InvalidKey(String),

    #[error("state budget of {budget} memo entries exceeded")]
    StateBudgetExceeded { budget: usize },

    #[error("cycle detected in the game graph at state {0}")]
    CycleDetected(String),

    #[error("greedy-largest play faced {} moves on index {index} at state {state}", .moves.len())]
    DeterminismViolation {
        state: String,
        index: u32,
        moves: Vec<Move>,
    },

    #[error("unsupported sequence ({c},{k}): {reason}")]
    UnsupportedSpec {
        c: u32,
        k: u32,
        reason: &'static str,
    },
}

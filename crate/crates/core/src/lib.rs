//! Engine, exhaustive solver and simulator for the Zeckendorf game on
//! `(c,k)`-nacci sequences.
//!
//! Start from [`GameState::initial`], list moves with [`GameState::legal_moves`] and
//! solve positions with [`Solver`].

pub mod error;
pub mod export;
pub mod game;
pub mod sequence;
pub mod simulate;
pub mod solver;

pub use error::{Error, Result};
pub use export::{export_tree, GameTreeExport, TreeFormat};
pub use game::{GameState, Move, MoveKind, StateJson, StateKey};
pub use sequence::{greedy_decompose, Decomposition, SequenceSpec};
pub use simulate::{random_playout, run_batch, PlayoutResult, RandomMover, SimulationStats};
pub use solver::{Label, SolveRecord, SolveTable, Solver};

//! Exhaustive N/P analysis of the game graph.
//!
//! The game is impartial under normal play, so the outcome is a function of the
//! position alone: a position is `P` (the player to move loses) when every child is
//! `N`, and `N` otherwise. Terminal positions are `P`. Player 2 wins a game exactly
//! when its initial position is `P`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{apply_dense, legal_moves_of, GameState, Move, StateKey};
use crate::sequence::{greedy_decompose, SequenceSpec};

pub const DEFAULT_STATE_BUDGET: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    /// The player to move wins.
    N,
    /// The player to move loses.
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolveRecord {
    pub label: Label,
    /// First move in canonical order leading to a `P` child; present iff `label == N`.
    pub winning_move: Option<Move>,
    /// Fewest moves to termination over all lines of play.
    pub min_len: u32,
    /// Most moves to termination over all lines of play.
    pub max_len: u32,
}

/// Memo table covering every position reachable from a root.
#[derive(Debug, Clone)]
pub struct SolveTable {
    spec: SequenceSpec,
    root: StateKey,
    records: HashMap<StateKey, SolveRecord>,
}

impl SolveTable {
    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn root_key(&self) -> &StateKey {
        &self.root
    }

    pub fn root(&self) -> &SolveRecord {
        &self.records[&self.root]
    }

    pub fn root_state(&self) -> GameState {
        GameState::from_key(&self.spec, &self.root).expect("root key is canonical")
    }

    pub fn get(&self, key: &StateKey) -> Option<&SolveRecord> {
        self.records.get(key)
    }

    pub fn record(&self, state: &GameState) -> Option<&SolveRecord> {
        self.records.get(&state.key())
    }

    /// Number of distinct positions reachable from the root.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateKey, &SolveRecord)> {
        self.records.iter()
    }

    /// 2 when the second player wins from the root with optimal play, else 1.
    pub fn winner(&self) -> u8 {
        match self.root().label {
            Label::P => 2,
            Label::N => 1,
        }
    }
}

/// Memoized depth-first solver with a cap on the number of memo entries.
#[derive(Debug, Clone, Copy)]
pub struct Solver {
    budget: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Solver {
            budget: DEFAULT_STATE_BUDGET,
        }
    }
}

struct Frame {
    key: StateKey,
    moves: Vec<Move>,
    next: usize,
    winning_move: Option<Move>,
    min_len: u32,
    max_len: u32,
}

impl Solver {
    pub fn with_budget(budget: usize) -> Self {
        Solver { budget }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn solve(&self, spec: &SequenceSpec, n: u64) -> Result<SolveTable> {
        self.solve_from(&GameState::initial(spec, n)?)
    }

    /// Solves every position reachable from `root`.
    ///
    /// The traversal is iterative. Positions on the current path are tracked, so a
    /// cycle in the move graph surfaces as [`Error::CycleDetected`] instead of a hang.
    pub fn solve_from(&self, root: &GameState) -> Result<SolveTable> {
        let spec = root.spec().clone();
        let (c, k) = (spec.c(), spec.k());
        let mut records: HashMap<StateKey, SolveRecord> = HashMap::new();
        let mut on_path: HashSet<StateKey> = HashSet::new();
        let mut stack: Vec<Frame> = Vec::new();

        let root_key = root.key();
        let push = |key: StateKey, stack: &mut Vec<Frame>, on_path: &mut HashSet<StateKey>| {
            let moves = legal_moves_of(c, k, key.dense());
            on_path.insert(key.clone());
            stack.push(Frame {
                key,
                moves,
                next: 0,
                winning_move: None,
                min_len: u32::MAX,
                max_len: 0,
            });
        };
        push(root_key.clone(), &mut stack, &mut on_path);

        while let Some(frame) = stack.last_mut() {
            if frame.next < frame.moves.len() {
                let mv = frame.moves[frame.next];
                let child = StateKey::from_dense_unchecked(
                    apply_dense(c, k, frame.key.dense(), mv).expect("listed moves apply"),
                );
                match records.get(&child) {
                    Some(rec) => {
                        frame.next += 1;
                        if rec.label == Label::P && frame.winning_move.is_none() {
                            frame.winning_move = Some(mv);
                        }
                        frame.min_len = frame.min_len.min(rec.min_len + 1);
                        frame.max_len = frame.max_len.max(rec.max_len + 1);
                    }
                    None => {
                        if on_path.contains(&child) {
                            let state = GameState::from_key(&spec, &child)?;
                            return Err(Error::CycleDetected(state.notation()));
                        }
                        if records.len() + on_path.len() >= self.budget {
                            return Err(Error::StateBudgetExceeded {
                                budget: self.budget,
                            });
                        }
                        push(child, &mut stack, &mut on_path);
                    }
                }
                continue;
            }

            let frame = stack.pop().expect("non-empty");
            on_path.remove(&frame.key);
            let record = if frame.moves.is_empty() {
                SolveRecord {
                    label: Label::P,
                    winning_move: None,
                    min_len: 0,
                    max_len: 0,
                }
            } else {
                SolveRecord {
                    label: if frame.winning_move.is_some() {
                        Label::N
                    } else {
                        Label::P
                    },
                    winning_move: frame.winning_move,
                    min_len: frame.min_len,
                    max_len: frame.max_len,
                }
            };
            records.insert(frame.key, record);
        }

        Ok(SolveTable {
            spec,
            root: root_key,
            records,
        })
    }
}

/// Solves the game on `n` with the default state budget.
pub fn solve(spec: &SequenceSpec, n: u64) -> Result<SolveTable> {
    Solver::default().solve(spec, n)
}

/// One of Player 2's options on their first turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplyOption {
    pub mv: Move,
    pub child: GameState,
    /// Moving here keeps Player 2 winning (the child is a `P` position for Player 1).
    pub preserves_win: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplyAnalysis {
    /// Position after Player 1's forced opening `{1^(n-2) ∧ 2}`.
    pub position: GameState,
    pub options: Vec<ReplyOption>,
}

impl ReplyAnalysis {
    pub fn has_winning_option(&self) -> bool {
        self.options.iter().any(|o| o.preserves_win)
    }

    pub fn has_losing_option(&self) -> bool {
        self.options.iter().any(|o| !o.preserves_win)
    }
}

/// Classifies Player 2's replies to the forced opening move.
///
/// Needs `n ≥ 3` so that Player 2 has a move at all.
pub fn winning_reply_analysis(
    solver: &Solver,
    spec: &SequenceSpec,
    n: u64,
) -> Result<ReplyAnalysis> {
    let table = solver.solve(spec, n)?;
    let root = table.root_state();
    let opening = root.legal_moves();
    if opening.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "expected a forced opening move, found {}",
            opening.len()
        )));
    }
    let position = root.apply(opening[0])?;
    if position.is_terminal() {
        return Err(Error::InvalidInput(format!(
            "n={n}: the game ends before Player 2 moves"
        )));
    }
    let options = position
        .legal_moves()
        .into_iter()
        .map(|mv| {
            let child = position.apply(mv)?;
            let rec = table.record(&child).expect("child reachable from root");
            Ok(ReplyOption {
                mv,
                preserves_win: rec.label == Label::P,
                child,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplyAnalysis { position, options })
}

/// Closed-form bounds on the number of moves, evaluated from the greedy decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthFormulas {
    /// `n − Z(n)`: every Fibonacci game takes at least this many moves (sharp).
    pub fibonacci_lower: Option<u64>,
    /// `4·n·log₂(n+1)`: sanity envelope for the `O(n log n)` Fibonacci upper bound.
    pub fibonacci_envelope: Option<f64>,
    /// `2n − GZD(n) − IGZD(n)`: upper bound for every spec other than `(1,1)`.
    pub general_upper: Option<u64>,
    /// `⌈(n − GZD(n))/2⌉`: Tribonacci lower bound.
    pub tribonacci_lower: Option<u64>,
}

/// Constant of the `C·n·log₂(n+1)` envelope.
pub const FIBONACCI_ENVELOPE_CONSTANT: f64 = 4.0;

impl LengthFormulas {
    pub fn for_game(spec: &SequenceSpec, n: u64) -> Result<Self> {
        let d = greedy_decompose(spec, n)?;
        let (gzd, igzd) = (d.summand_count(), d.index_sum());
        let fib = spec.is_fibonacci();
        Ok(LengthFormulas {
            fibonacci_lower: fib.then_some(n - gzd),
            fibonacci_envelope: fib
                .then(|| FIBONACCI_ENVELOPE_CONSTANT * n as f64 * ((n + 1) as f64).log2()),
            // δ starts at 2n and ends at GZD + IGZD.
            general_upper: (!fib).then(|| 2 * n - gzd - igzd),
            tribonacci_lower: (spec.c() == 1 && spec.k() == 2).then(|| (n - gzd).div_ceil(2)),
        })
    }

    /// Lower bound applicable to this spec, or 0.
    pub fn lower(&self) -> u64 {
        self.fibonacci_lower.or(self.tribonacci_lower).unwrap_or(0)
    }

    /// Upper bound applicable to this spec (the envelope for Fibonacci).
    pub fn upper(&self) -> f64 {
        match (self.general_upper, self.fibonacci_envelope) {
            (Some(u), _) => u as f64,
            (None, Some(e)) => e,
            (None, None) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthBounds {
    pub min_len: u32,
    pub max_len: u32,
    pub formulas: LengthFormulas,
    /// Fibonacci: `min_len == n − Z(n)` and `max_len` within the envelope.
    /// Otherwise: `max_len ≤ 2n − GZD − IGZD`, plus the Tribonacci lower bound on `(1,2)`.
    pub bounds_ok: bool,
}

pub fn game_length_bounds(solver: &Solver, spec: &SequenceSpec, n: u64) -> Result<LengthBounds> {
    let table = solver.solve(spec, n)?;
    length_bounds_from(&table, n)
}

/// Reads the root min/max lengths of a solved table and checks them against the formulas.
pub fn length_bounds_from(table: &SolveTable, n: u64) -> Result<LengthBounds> {
    let root = *table.root();
    let formulas = LengthFormulas::for_game(table.spec(), n)?;
    let (min_len, max_len) = (root.min_len as u64, root.max_len as u64);
    let mut ok = true;
    if let Some(lower) = formulas.fibonacci_lower {
        ok &= min_len == lower;
    }
    if let Some(envelope) = formulas.fibonacci_envelope {
        ok &= max_len as f64 <= envelope;
    }
    if let Some(upper) = formulas.general_upper {
        ok &= max_len <= upper;
    }
    if let Some(lower) = formulas.tribonacci_lower {
        ok &= min_len >= lower;
    }
    Ok(LengthBounds {
        min_len: root.min_len,
        max_len: root.max_len,
        formulas,
        bounds_ok: ok,
    })
}

/// Depths at which each position first and last appears, by breadth-first layering.
///
/// Used to check whether a position can be reached after both an odd and an even
/// number of moves.
pub fn depth_parity_report(spec: &SequenceSpec, n: u64, budget: usize) -> Result<ParityReport> {
    let root = GameState::initial(spec, n)?;
    let (c, k) = (spec.c(), spec.k());
    let mut parities: HashMap<StateKey, u8> = HashMap::new();
    let mut layer: HashSet<StateKey> = HashSet::from([root.key()]);
    let mut depth = 0u32;
    while !layer.is_empty() {
        let bit = 1u8 << (depth % 2);
        let mut next = HashSet::new();
        for key in &layer {
            *parities.entry(key.clone()).or_insert(0) |= bit;
            if parities.len() > budget {
                return Err(Error::StateBudgetExceeded { budget });
            }
            for mv in legal_moves_of(c, k, key.dense()) {
                let child = apply_dense(c, k, key.dense(), mv).expect("listed moves apply");
                next.insert(StateKey::from_dense_unchecked(child));
            }
        }
        layer = next;
        depth += 1;
    }
    let mixed: Vec<StateKey> = parities
        .iter()
        .filter(|(_, &p)| p == 0b11)
        .map(|(key, _)| key.clone())
        .collect();
    Ok(ParityReport {
        states: parities.len(),
        mixed_parity_states: mixed.len(),
        example: mixed
            .into_iter()
            .min()
            .map(|key| GameState::from_key(spec, &key).expect("reachable keys are canonical")),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub states: usize,
    /// Positions reachable after both an even and an odd number of moves.
    pub mixed_parity_states: usize,
    pub example: Option<GameState>,
}

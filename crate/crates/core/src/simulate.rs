//! Random playouts, greedy-largest Tribonacci play and batch statistics.
//!
//! Random play draws from Xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). A move is chosen from the canonical move
//! list with `index = (next_u64() · len) >> 64`, computed in 128-bit arithmetic, so any
//! port that implements those two published generators reproduces the same games.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{apply_dense, legal_moves_of, GameState, Move, MoveKind};
use crate::sequence::{greedy_decompose, SequenceSpec};
use crate::solver::{LengthFormulas, Solver};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MoveTally {
    pub full_combine: u64,
    pub low_combine: u64,
    pub reduce: u64,
}

impl MoveTally {
    fn record(&mut self, kind: MoveKind) {
        match kind {
            MoveKind::FullCombine => self.full_combine += 1,
            MoveKind::LowCombine => self.low_combine += 1,
            MoveKind::Reduce => self.reduce += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayoutResult {
    pub spec: SequenceSpec,
    pub n: u64,
    /// `None` for deterministic play.
    pub seed: Option<u64>,
    pub move_count: u64,
    /// Player who made the last move: 1 iff `move_count` is odd. A game with no moves
    /// is won by Player 2.
    pub winner: u8,
    pub tally: MoveTally,
    pub trace: Vec<Move>,
    pub final_state: GameState,
}

impl PlayoutResult {
    /// Reduce moves with pivot above `k + 1`, i.e. the splitting moves.
    pub fn splitting_moves(&self) -> usize {
        let k = self.spec.k();
        self.trace
            .iter()
            .filter(|m| m.kind == MoveKind::Reduce && m.pivot > k + 1)
            .count()
    }
}

pub fn winner_for(move_count: u64) -> u8 {
    if move_count % 2 == 1 {
        1
    } else {
        2
    }
}

/// Seeded uniform choice among canonical move lists. Each call consumes one draw,
/// so a sequence of choices is reproducible from the seed alone.
#[derive(Debug, Clone)]
pub struct RandomMover {
    rng: Xoshiro256PlusPlus,
}

impl RandomMover {
    pub fn new(seed: u64) -> Self {
        RandomMover {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// `None` only for an empty list, which consumes no draw.
    pub fn choose(&mut self, moves: &[Move]) -> Option<Move> {
        if moves.is_empty() {
            return None;
        }
        let idx = ((self.rng.next_u64() as u128 * moves.len() as u128) >> 64) as usize;
        Some(moves[idx])
    }
}

/// Plays uniformly random legal moves until the game ends.
pub fn random_playout(spec: &SequenceSpec, n: u64, seed: u64) -> Result<PlayoutResult> {
    let mut mover = RandomMover::new(seed);
    play(spec, n, Some(seed), |_, moves| {
        Ok(mover.choose(moves).expect("non-empty move list"))
    })
}

fn play(
    spec: &SequenceSpec,
    n: u64,
    seed: Option<u64>,
    mut choose: impl FnMut(&[u32], &[Move]) -> Result<Move>,
) -> Result<PlayoutResult> {
    let start = GameState::initial(spec, n)?;
    let (c, k) = (spec.c(), spec.k());
    let mut counts = start.dense().to_vec();
    let mut trace = Vec::new();
    let mut tally = MoveTally::default();
    loop {
        let moves = legal_moves_of(c, k, &counts);
        if moves.is_empty() {
            break;
        }
        let mv = choose(&counts, &moves)?;
        counts = apply_dense(c, k, &counts, mv).ok_or(Error::IllegalMove { mv })?;
        tally.record(mv.kind);
        trace.push(mv);
    }
    let final_state = GameState::from_pairs(
        spec,
        &counts
            .iter()
            .enumerate()
            .map(|(idx, &m)| (idx as u32 + 1, m))
            .collect::<Vec<_>>(),
    )?;
    let move_count = trace.len() as u64;
    Ok(PlayoutResult {
        spec: spec.clone(),
        n,
        seed,
        move_count,
        winner: winner_for(move_count),
        tally,
        trace,
        final_state,
    })
}

/// Greedy-largest play on any spec: always act on the greatest index taking part in
/// some legal move. Fails with [`Error::DeterminismViolation`] when more than one move
/// involves that index.
///
/// A move involves index `j` when `j` is in its consumed multiset. The greatest such
/// index over all legal moves is always some move's pivot, and only moves with that
/// pivot can involve it.
pub fn greedy_largest_playout(spec: &SequenceSpec, n: u64) -> Result<PlayoutResult> {
    if !(spec.c() == 1 && spec.k() == 2) {
        return Err(Error::UnsupportedSpec {
            c: spec.c(),
            k: spec.k(),
            reason: "greedy-largest play is only defined for the Tribonacci game",
        });
    }
    play(spec, n, None, |counts, moves| {
        let top = moves.iter().map(|m| m.pivot).max().expect("non-empty");
        let candidates: Vec<Move> = moves.iter().copied().filter(|m| m.pivot == top).collect();
        if candidates.len() > 1 {
            let state = GameState::from_pairs(
                spec,
                &counts
                    .iter()
                    .enumerate()
                    .map(|(idx, &m)| (idx as u32 + 1, m))
                    .collect::<Vec<_>>(),
            )?;
            return Err(Error::DeterminismViolation {
                state: state.notation(),
                index: top,
                moves: candidates,
            });
        }
        Ok(candidates[0])
    })
}

/// Greedy-largest play on the Tribonacci game `(1,2)`.
pub fn greedy_tribonacci_playout(n: u64) -> Result<PlayoutResult> {
    greedy_largest_playout(&SequenceSpec::tribonacci(), n)
}

/// Fewest moves over all lines of play, from the exhaustive solver.
pub fn min_moves_bruteforce(solver: &Solver, spec: &SequenceSpec, n: u64) -> Result<u32> {
    Ok(solver.solve(spec, n)?.root().min_len)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GameRow {
    pub game_index: u64,
    pub seed: u64,
    pub move_count: u64,
    pub winner: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationStats {
    pub c: u32,
    pub k: u32,
    pub n: u64,
    pub games: u64,
    pub base_seed: u64,
    pub mean: f64,
    /// Population variance of the move count.
    pub variance: f64,
    pub min: u64,
    pub max: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub player1_win_fraction: f64,
    /// Games whose final position differed from the greedy decomposition.
    pub terminal_mismatches: u64,
    pub lower_bound: u64,
    pub upper_bound: f64,
    pub bounds_ok: bool,
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub rows: Vec<GameRow>,
    pub stats: SimulationStats,
}

/// Runs `games` independent random playouts with seeds `base_seed + index`.
///
/// Results do not depend on `workers`; aggregates are exact integer sums.
pub fn run_batch(
    spec: &SequenceSpec,
    n: u64,
    games: u64,
    base_seed: u64,
    workers: usize,
) -> Result<Batch> {
    if games == 0 {
        return Err(Error::InvalidInput("games must be at least 1".into()));
    }
    let expected = greedy_decompose(spec, n)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<(GameRow, bool)> = pool.install(|| {
        (0..games)
            .into_par_iter()
            .map(|game_index| {
                let seed = base_seed.wrapping_add(game_index);
                let p = random_playout(spec, n, seed)?;
                let matches = p.final_state.dense() == expected.dense();
                Ok((
                    GameRow {
                        game_index,
                        seed,
                        move_count: p.move_count,
                        winner: p.winner,
                    },
                    matches,
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut histogram = BTreeMap::new();
    let (mut sum, mut sum_sq, mut p1_wins, mut mismatches) = (0u128, 0u128, 0u64, 0u64);
    for (row, matches) in &outcomes {
        *histogram.entry(row.move_count).or_insert(0) += 1;
        sum += row.move_count as u128;
        sum_sq += row.move_count as u128 * row.move_count as u128;
        p1_wins += (row.winner == 1) as u64;
        mismatches += (!matches) as u64;
    }
    let g = games as f64;
    let mean = sum as f64 / g;
    // Exact numerator: g·Σx² − (Σx)².
    let variance = (games as u128 * sum_sq - sum * sum) as f64 / (g * g);
    let min = *histogram.keys().next().expect("games ≥ 1");
    let max = *histogram.keys().next_back().expect("games ≥ 1");
    let formulas = LengthFormulas::for_game(spec, n)?;
    let (lower_bound, upper_bound) = (formulas.lower(), formulas.upper());

    let stats = SimulationStats {
        c: spec.c(),
        k: spec.k(),
        n,
        games,
        base_seed,
        mean,
        variance,
        min,
        max,
        histogram,
        player1_win_fraction: p1_wins as f64 / g,
        terminal_mismatches: mismatches,
        lower_bound,
        upper_bound,
        bounds_ok: min >= lower_bound && max as f64 <= upper_bound,
    };
    Ok(Batch {
        rows: outcomes.into_iter().map(|(row, _)| row).collect(),
        stats,
    })
}

/// `game_index,seed,move_count,winner` rows followed by `#`-prefixed summary lines.
pub fn write_games_csv<W: Write>(mut w: W, batch: &Batch) -> io::Result<()> {
    writeln!(w, "game_index,seed,move_count,winner")?;
    for r in &batch.rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.game_index, r.seed, r.move_count, r.winner
        )?;
    }
    let s = &batch.stats;
    writeln!(
        w,
        "# games={} c={} k={} n={} base_seed={}",
        s.games, s.c, s.k, s.n, s.base_seed
    )?;
    writeln!(
        w,
        "# mean={} variance={} min={} max={}",
        s.mean, s.variance, s.min, s.max
    )?;
    writeln!(w, "# player1_win_fraction={}", s.player1_win_fraction)?;
    Ok(())
}

/// `move_count,frequency` rows in ascending move count.
pub fn write_histogram_csv<W: Write>(mut w: W, stats: &SimulationStats) -> io::Result<()> {
    writeln!(w, "move_count,frequency")?;
    for (count, freq) in &stats.histogram {
        writeln!(w, "{count},{freq}")?;
    }
    Ok(())
}

//! Game sessions: the position, its history and the optional engine opponent.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use zeck_core::game::{GameState, Move, StateJson};
use zeck_core::sequence::SequenceSpec;
use zeck_core::simulate::{winner_for, RandomMover};
use zeck_core::solver::{Label, SolveTable, Solver};
use zeck_core::Error;

use crate::error::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Both players move through the API.
    #[default]
    Human,
    /// Player 2 replies with uniformly random legal moves.
    Random,
    /// Player 2 replies with the solver's winning move when it has one.
    Optimal,
}

impl Mode {
    fn has_engine(self) -> bool {
        self != Mode::Human
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Finished,
}

/// Replayable description of a session, as stored in snapshots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub n: u64,
    pub c: u32,
    pub k: u32,
    pub mode: Mode,
    pub seed: u64,
    pub moves: Vec<Move>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryEntry {
    pub player: u8,
    #[serde(rename = "move")]
    pub mv: Move,
    pub state: Vec<(u32, u32)>,
}

pub struct Session {
    id: String,
    n: u64,
    mode: Mode,
    seed: u64,
    state: GameState,
    history: Vec<HistoryEntry>,
    mover: RandomMover,
    table: Option<Arc<SolveTable>>,
}

/// What clients see of a session.
#[derive(Debug, Clone, Serialize)]
pub struct SessionView {
    pub id: String,
    pub n: u64,
    pub c: u32,
    pub k: u32,
    pub mode: Mode,
    pub seed: u64,
    pub state: StateJson,
    pub notation: String,
    pub turn: u8,
    pub status: Status,
    pub winner: Option<u8>,
    /// Set when the starting position already has no moves.
    pub trivial: bool,
    pub history: Vec<HistoryEntry>,
    pub legal_moves: Vec<Move>,
    /// Engine reply made in the same request, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine_move: Option<Move>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hint {
    pub player: u8,
    pub winning: bool,
    #[serde(rename = "move", skip_serializing_if = "Option::is_none")]
    pub mv: Option<Move>,
}

impl Session {
    /// A fresh session at `{1^n}`. Optimal mode solves the whole game up front.
    pub fn create(
        id: String,
        spec: &SequenceSpec,
        n: u64,
        mode: Mode,
        seed: u64,
        solver: &Solver,
    ) -> Result<Self, ApiError> {
        let state = GameState::initial(spec, n).map_err(ApiError::invalid)?;
        let table = match mode {
            Mode::Optimal => Some(Arc::new(
                solver.solve(spec, n).map_err(ApiError::from_core)?,
            )),
            _ => None,
        };
        Ok(Session {
            id,
            n,
            mode,
            seed,
            state,
            history: Vec::new(),
            mover: RandomMover::new(seed),
            table,
        })
    }

    /// Rebuilds a session by replaying its moves, checking that every engine move is
    /// the one the engine would make again.
    pub fn restore(record: &SessionRecord, solver: &Solver) -> Result<Self, ApiError> {
        let spec = SequenceSpec::new(record.c, record.k).map_err(ApiError::invalid)?;
        let mut session = Session::create(
            record.id.clone(),
            &spec,
            record.n,
            record.mode,
            record.seed,
            solver,
        )?;
        for (ply, &mv) in record.moves.iter().enumerate() {
            if session.mode.has_engine() && ply % 2 == 1 {
                let replayed = session.engine_choice();
                if replayed != Some(mv) {
                    return Err(ApiError::invalid(format!(
                        "session {}: engine move {mv} at ply {ply} does not replay",
                        record.id
                    )));
                }
            }
            session.push(mv)?;
        }
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn record(&self) -> SessionRecord {
        SessionRecord {
            id: self.id.clone(),
            n: self.n,
            c: self.state.spec().c(),
            k: self.state.spec().k(),
            mode: self.mode,
            seed: self.seed,
            moves: self.history.iter().map(|h| h.mv).collect(),
        }
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn turn(&self) -> u8 {
        1 + (self.history.len() % 2) as u8
    }

    pub fn is_finished(&self) -> bool {
        self.state.is_terminal()
    }

    pub fn winner(&self) -> Option<u8> {
        self.is_finished()
            .then(|| winner_for(self.history.len() as u64))
    }

    pub fn view(&self, engine_move: Option<Move>) -> SessionView {
        let spec = self.state.spec();
        SessionView {
            id: self.id.clone(),
            n: self.n,
            c: spec.c(),
            k: spec.k(),
            mode: self.mode,
            seed: self.seed,
            state: StateJson::from(&self.state),
            notation: self.state.notation(),
            turn: self.turn(),
            status: if self.is_finished() {
                Status::Finished
            } else {
                Status::InProgress
            },
            winner: self.winner(),
            trivial: self.history.is_empty() && self.is_finished(),
            history: self.history.clone(),
            legal_moves: self.state.legal_moves(),
            engine_move,
        }
    }

    fn push(&mut self, mv: Move) -> Result<(), ApiError> {
        if self.is_finished() {
            return Err(ApiError::finished());
        }
        if !self.state.is_applicable(mv) {
            return Err(ApiError::illegal(mv, &self.state));
        }
        let player = self.turn();
        self.state = self.state.apply(mv).map_err(ApiError::from_core)?;
        self.history.push(HistoryEntry {
            player,
            mv,
            state: self.state.pairs(),
        });
        Ok(())
    }

    fn engine_choice(&mut self) -> Option<Move> {
        let moves = self.state.legal_moves();
        match self.mode {
            Mode::Human => None,
            Mode::Random => self.mover.choose(&moves),
            Mode::Optimal => {
                let table = self.table.as_ref()?;
                table
                    .record(&self.state)
                    .and_then(|rec| rec.winning_move)
                    .or_else(|| moves.first().copied())
            }
        }
    }

    /// Applies the client's move and, against an engine, the engine's reply.
    /// Returns the reply.
    pub fn play(&mut self, mv: Move) -> Result<Option<Move>, ApiError> {
        self.push(mv)?;
        if !self.mode.has_engine() || self.is_finished() {
            return Ok(None);
        }
        let reply = self
            .engine_choice()
            .ok_or_else(|| ApiError::internal("engine found no move"))?;
        self.push(reply)?;
        Ok(Some(reply))
    }

    /// Solve table covering every position of this game, computed on first use.
    pub fn table(&mut self, solver: &Solver) -> Result<Arc<SolveTable>, ApiError> {
        if let Some(t) = &self.table {
            return Ok(t.clone());
        }
        let spec = self.state.spec().clone();
        let table = Arc::new(solver.solve(&spec, self.n).map_err(ApiError::from_core)?);
        self.table = Some(table.clone());
        Ok(table)
    }

    pub fn hint(&mut self, solver: &Solver) -> Result<Hint, ApiError> {
        if self.is_finished() {
            return Err(ApiError::finished());
        }
        let table = self.table(solver)?;
        let rec = table.record(&self.state).ok_or_else(|| {
            ApiError::from_core(Error::InvalidKey("position not in table".into()))
        })?;
        Ok(Hint {
            player: self.turn(),
            winning: rec.label == Label::N,
            mv: rec.winning_move,
        })
    }
}

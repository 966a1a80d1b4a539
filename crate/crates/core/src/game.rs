//! Positions and moves of the generalized Zeckendorf game.
//!
//! A position is a multiset of sequence indices. Three move families rewrite it while
//! preserving the represented total:
//!
//! * `FullCombine(i)`, `i ≥ k+1`: `c·S_{i-k} ∧ … ∧ c·S_i → S_{i+1}`
//! * `LowCombine(i)`, `2 ≤ i ≤ k`: `(c+1)·S_1 ∧ c·S_2 ∧ … ∧ c·S_i → S_{i+1}`
//! * `Reduce(i)`: `(c+1)·S_i →` `S_2` (`i = 1`), `S_{i+1}` (`1 < i < k+1`),
//!   `S_{i+1} ∧ S_1` (`i = k+1`) or `S_{i+1} ∧ c·S_{i-k-1}` (`i > k+1`)
//!
//! With `(c,k) = (1,1)` these are exactly the moves of the Fibonacci game.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{Decomposition, SequenceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    FullCombine,
    LowCombine,
    Reduce,
}

impl MoveKind {
    pub const ALL: [MoveKind; 3] = [
        MoveKind::FullCombine,
        MoveKind::LowCombine,
        MoveKind::Reduce,
    ];
}

/// One applicable rewrite, identified by its family and pivot index (1-based).
///
/// The derived ordering (kind, then pivot) is the canonical move order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub pivot: u32,
}

impl Move {
    pub fn full_combine(pivot: u32) -> Self {
        Move {
            kind: MoveKind::FullCombine,
            pivot,
        }
    }

    pub fn low_combine(pivot: u32) -> Self {
        Move {
            kind: MoveKind::LowCombine,
            pivot,
        }
    }

    pub fn reduce(pivot: u32) -> Self {
        Move {
            kind: MoveKind::Reduce,
            pivot,
        }
    }

    /// Indices (with multiplicities) the move removes, for a given `(c,k)`.
    pub fn consumed(&self, c: u32, k: u32) -> Vec<(u32, u32)> {
        let i = self.pivot;
        match self.kind {
            MoveKind::FullCombine => (i.saturating_sub(k)..=i).map(|j| (j, c)).collect(),
            MoveKind::LowCombine => (1..=i)
                .map(|j| (j, if j == 1 { c + 1 } else { c }))
                .collect(),
            MoveKind::Reduce => vec![(i, c + 1)],
        }
    }

    /// Indices (with multiplicities) the move adds.
    pub fn produced(&self, c: u32, k: u32) -> Vec<(u32, u32)> {
        let i = self.pivot;
        match self.kind {
            MoveKind::FullCombine | MoveKind::LowCombine => vec![(i + 1, 1)],
            MoveKind::Reduce if i <= k => vec![(i + 1, 1)],
            MoveKind::Reduce if i == k + 1 => vec![(1, 1), (i + 1, 1)],
            MoveKind::Reduce => vec![(i - k - 1, c), (i + 1, 1)],
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.kind, self.pivot)
    }
}

/// Canonical, hashable encoding of a position: `dense[i - 1]` is the multiplicity of
/// `S_i`, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(Box<[u32]>);

impl StateKey {
    /// Caller guarantees `dense` has no trailing zero.
    pub(crate) fn from_dense_unchecked(dense: Vec<u32>) -> Self {
        debug_assert!(dense.last().is_some_and(|&m| m > 0));
        StateKey(dense.into_boxed_slice())
    }

    pub fn dense(&self) -> &[u32] {
        &self.0
    }

    /// `(index, multiplicity)` pairs, ascending by index, multiplicities ≥ 1.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(idx, &m)| (idx as u32 + 1, m))
            .collect()
    }
}

/// A complete game position for a given sequence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    spec: SequenceSpec,
    counts: Vec<u32>,
    total: u64,
}

impl GameState {
    /// `{S_1^n}`.
    pub fn initial(spec: &SequenceSpec, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let copies = u32::try_from(n).map_err(|_| {
            Error::InvalidInput(format!("n={n} exceeds the supported multiplicity"))
        })?;
        Ok(GameState {
            spec: spec.clone(),
            counts: vec![copies],
            total: n,
        })
    }

    /// Builds a state from `(index, multiplicity)` pairs in any order; zero
    /// multiplicities are dropped and repeated indices add up.
    pub fn from_pairs(spec: &SequenceSpec, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut counts: Vec<u32> = Vec::new();
        for &(i, m) in pairs {
            if i == 0 {
                return Err(Error::InvalidKey("indices start at 1".into()));
            }
            let idx = i as usize - 1;
            if counts.len() <= idx {
                counts.resize(idx + 1, 0);
            }
            counts[idx] = counts[idx]
                .checked_add(m)
                .ok_or_else(|| Error::InvalidKey("multiplicity overflow".into()))?;
        }
        Self::from_dense(spec, counts)
    }

    fn from_dense(spec: &SequenceSpec, mut counts: Vec<u32>) -> Result<Self> {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        if counts.is_empty() {
            return Err(Error::InvalidKey(
                "a position needs at least one summand".into(),
            ));
        }
        let total = Decomposition::from_dense(spec, counts.clone())
            .map_err(|e| Error::InvalidKey(e.to_string()))?
            .value();
        Ok(GameState {
            spec: spec.clone(),
            counts,
            total,
        })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// Represented value `Σ m_i·S_i`; invariant under moves.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Multiplicity of `S_i` (zero when absent).
    pub fn count(&self, i: u32) -> u32 {
        count_at(&self.counts, i)
    }

    pub fn dense(&self) -> &[u32] {
        &self.counts
    }

    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.key().pairs()
    }

    pub fn key(&self) -> StateKey {
        StateKey(self.counts.clone().into_boxed_slice())
    }

    /// Inverse of [`GameState::key`]. Rejects keys that are not canonical.
    pub fn from_key(spec: &SequenceSpec, key: &StateKey) -> Result<Self> {
        match key.0.last() {
            None => Err(Error::InvalidKey("empty key".into())),
            Some(0) => Err(Error::InvalidKey("trailing zero multiplicity".into())),
            Some(_) => Self::from_dense(spec, key.0.to_vec()),
        }
    }

    /// Number of summands, `Σ m_i`.
    pub fn summand_count(&self) -> u64 {
        self.counts.iter().map(|&m| m as u64).sum()
    }

    /// `Σ m_i + Σ i·m_i`.
    pub fn delta(&self) -> u64 {
        delta_of(&self.counts)
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        legal_moves_of(self.spec.c(), self.spec.k(), &self.counts)
    }

    pub fn is_terminal(&self) -> bool {
        !has_move(self.spec.c(), self.spec.k(), &self.counts)
    }

    pub fn is_applicable(&self, m: Move) -> bool {
        applicable(self.spec.c(), self.spec.k(), &self.counts, m)
    }

    pub fn apply(&self, m: Move) -> Result<GameState> {
        let counts = apply_dense(self.spec.c(), self.spec.k(), &self.counts, m)
            .ok_or(Error::IllegalMove { mv: m })?;
        debug_assert!(counts.len() <= self.spec.max_index());
        Ok(GameState {
            spec: self.spec.clone(),
            counts,
            total: self.total,
        })
    }

    /// Recomputes the total from the multiplicities.
    pub fn recomputed_total(&self) -> Result<u64> {
        Ok(Decomposition::from_dense(&self.spec, self.counts.clone())?.value())
    }

    /// The multiplicities read as a decomposition of the total.
    pub fn as_decomposition(&self) -> Decomposition {
        Decomposition::from_dense(&self.spec, self.counts.clone())
            .expect("state totals are validated on construction")
    }

    /// Multiset notation using values, e.g. `{1^3 ∧ 2}`.
    pub fn notation(&self) -> String {
        let parts: Vec<String> = self
            .pairs()
            .into_iter()
            .map(|(i, m)| {
                let v = self.spec.values()[i as usize - 1];
                if m == 1 {
                    v.to_string()
                } else {
                    format!("{v}^{m}")
                }
            })
            .collect();
        format!("{{{}}}", parts.join(" ∧ "))
    }
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GameState({:?}, {})", self.spec, self.notation())
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())
    }
}

/// Wire form: `{"c":1,"k":1,"counts":[[1,3],[2,1]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateJson {
    pub c: u32,
    pub k: u32,
    pub counts: Vec<(u32, u32)>,
}

impl From<&GameState> for StateJson {
    fn from(s: &GameState) -> Self {
        StateJson {
            c: s.spec.c(),
            k: s.spec.k(),
            counts: s.pairs(),
        }
    }
}

impl TryFrom<StateJson> for GameState {
    type Error = Error;

    /// Strict decode: indices strictly ascending, every multiplicity ≥ 1.
    fn try_from(j: StateJson) -> Result<Self> {
        let spec = SequenceSpec::new(j.c, j.k)?;
        decode(&j.counts, &spec)
    }
}

impl Serialize for GameState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        StateJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GameState {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let j = StateJson::deserialize(deserializer)?;
        GameState::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Sparse canonical encoding, ascending by index.
pub fn encode(s: &GameState) -> Vec<(u32, u32)> {
    s.pairs()
}

/// Decodes a sparse key, rejecting anything that is not in canonical form.
pub fn decode(pairs: &[(u32, u32)], spec: &SequenceSpec) -> Result<GameState> {
    if pairs.is_empty() {
        return Err(Error::InvalidKey(
            "a position needs at least one summand".into(),
        ));
    }
    for w in pairs.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::InvalidKey(
                "indices must be strictly ascending".into(),
            ));
        }
    }
    if let Some(&(i, m)) = pairs.iter().find(|&&(i, m)| i == 0 || m == 0) {
        return Err(Error::InvalidKey(format!(
            "entry ({i},{m}) must have index ≥ 1 and multiplicity ≥ 1"
        )));
    }
    GameState::from_pairs(spec, pairs)
}

pub fn initial_state(spec: &SequenceSpec, n: u64) -> Result<GameState> {
    GameState::initial(spec, n)
}

pub fn legal_moves(s: &GameState) -> Vec<Move> {
    s.legal_moves()
}

pub fn apply(s: &GameState, m: Move) -> Result<GameState> {
    s.apply(m)
}

pub fn is_terminal(s: &GameState) -> bool {
    s.is_terminal()
}

pub fn delta(s: &GameState) -> u64 {
    s.delta()
}

// Dense-slice primitives shared by the solver and simulator.

#[inline]
pub(crate) fn count_at(counts: &[u32], i: u32) -> u32 {
    if i == 0 {
        return 0;
    }
    counts.get(i as usize - 1).copied().unwrap_or(0)
}

pub(crate) fn delta_of(counts: &[u32]) -> u64 {
    counts
        .iter()
        .enumerate()
        .map(|(idx, &m)| m as u64 * (idx as u64 + 2))
        .sum()
}

fn full_combine_ok(c: u32, k: u32, counts: &[u32], i: u32) -> bool {
    i > k && (i - k..=i).all(|j| count_at(counts, j) >= c)
}

fn low_combine_ok(c: u32, k: u32, counts: &[u32], i: u32) -> bool {
    (2..=k).contains(&i) && count_at(counts, 1) > c && (2..=i).all(|j| count_at(counts, j) >= c)
}

fn reduce_ok(c: u32, counts: &[u32], i: u32) -> bool {
    count_at(counts, i) > c
}

pub(crate) fn applicable(c: u32, k: u32, counts: &[u32], m: Move) -> bool {
    match m.kind {
        MoveKind::FullCombine => full_combine_ok(c, k, counts, m.pivot),
        MoveKind::LowCombine => low_combine_ok(c, k, counts, m.pivot),
        MoveKind::Reduce => m.pivot >= 1 && reduce_ok(c, counts, m.pivot),
    }
}

/// Every applicable move, in canonical order.
pub(crate) fn legal_moves_of(c: u32, k: u32, counts: &[u32]) -> Vec<Move> {
    let top = counts.len() as u32;
    let mut moves = Vec::new();
    // FullCombine(i) needs S_i present, so i ≤ top.
    for i in (k + 1)..=top {
        if full_combine_ok(c, k, counts, i) {
            moves.push(Move::full_combine(i));
        }
    }
    for i in 2..=k.min(top) {
        if low_combine_ok(c, k, counts, i) {
            moves.push(Move::low_combine(i));
        }
    }
    for i in 1..=top {
        if reduce_ok(c, counts, i) {
            moves.push(Move::reduce(i));
        }
    }
    moves
}

pub(crate) fn has_move(c: u32, k: u32, counts: &[u32]) -> bool {
    let top = counts.len() as u32;
    (1..=top).any(|i| reduce_ok(c, counts, i))
        || ((k + 1)..=top).any(|i| full_combine_ok(c, k, counts, i))
        || (2..=k.min(top)).any(|i| low_combine_ok(c, k, counts, i))
}

/// Applies `m` to dense multiplicities, or `None` when it is not applicable.
pub(crate) fn apply_dense(c: u32, k: u32, counts: &[u32], m: Move) -> Option<Vec<u32>> {
    if !applicable(c, k, counts, m) {
        return None;
    }
    let mut next = counts.to_vec();
    let top = m.pivot as usize + 1;
    if next.len() < top {
        next.resize(top, 0);
    }
    for (j, times) in m.consumed(c, k) {
        next[j as usize - 1] -= times;
    }
    for (j, times) in m.produced(c, k) {
        next[j as usize - 1] += times;
    }
    while next.last() == Some(&0) {
        next.pop();
    }
    Some(next)
}

//! Layered game-tree export.
//!
//! Layer `d` holds every distinct position reachable in exactly `d` moves, so a
//! position can appear in several layers but at most once per layer. Each node
//! carries the player who wins from it (given whose turn it is at that depth), and
//! one winning line for the overall winner is marked.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameState, Move, StateJson, StateKey};
use crate::sequence::SequenceSpec;
use crate::solver::{Label, SolveTable, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Dot,
    Json,
}

impl std::str::FromStr for TreeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(TreeFormat::Dot),
            "json" => Ok(TreeFormat::Json),
            other => Err(Error::InvalidInput(format!(
                "unknown tree format {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub depth: u32,
    pub state: GameState,
    /// 1 or 2: the player holding a winning strategy from this node.
    pub winner: u8,
    pub terminal: bool,
    pub on_winning_path: bool,
    /// Non-terminal node whose children were cut by the depth limit.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEdge {
    pub from: usize,
    pub to: usize,
    pub mv: Move,
}

#[derive(Debug, Clone)]
pub struct GameTreeExport {
    /// Nodes ordered by layer; node 0 is the root.
    pub nodes: Vec<TreeNode>,
    /// Edges in the canonical move order of their source node.
    pub edges: Vec<TreeEdge>,
    pub depth_limit: Option<u32>,
}

impl GameTreeExport {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn layer(&self, depth: u32) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(move |n| n.depth == depth)
    }

    pub fn depth(&self) -> u32 {
        self.nodes.last().map_or(0, |n| n.depth)
    }

    pub fn is_truncated(&self) -> bool {
        self.nodes.iter().any(|n| n.truncated)
    }

    /// Node ids along the marked winning path, root first.
    pub fn winning_path(&self) -> Vec<usize> {
        let mut path = vec![0];
        let mut at = 0;
        while let Some(e) = self
            .edges
            .iter()
            .find(|e| e.from == at && self.nodes[e.to].on_winning_path)
        {
            at = e.to;
            path.push(at);
        }
        path
    }

    pub fn render(&self, format: TreeFormat) -> String {
        match format {
            TreeFormat::Dot => self.to_dot(),
            TreeFormat::Json => {
                serde_json::to_string_pretty(&self.to_json()).expect("tree JSON serializes")
            }
        }
    }

    /// Graphviz rendering: red border for Player 1 wins, blue for Player 2, yellow fill
    /// for terminal positions and green fill along the winning path.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph zeckendorf {\n");
        out.push_str("  rankdir=TB;\n  node [shape=box, style=\"rounded,filled\", fillcolor=white, penwidth=2];\n");
        let mut depth = None;
        for (id, node) in self.nodes.iter().enumerate() {
            if depth != Some(node.depth) {
                if depth.is_some() {
                    out.push_str("  }\n");
                }
                depth = Some(node.depth);
                let _ = writeln!(out, "  subgraph layer_{} {{\n    rank=same;", node.depth);
            }
            let border = if node.winner == 1 { "red" } else { "blue" };
            let fill = match (node.on_winning_path, node.terminal) {
                (true, _) => "palegreen",
                (false, true) => "yellow",
                (false, false) => "white",
            };
            let mut extra = String::new();
            if node.terminal && node.on_winning_path {
                extra.push_str(", peripheries=2");
            }
            if node.truncated {
                extra.push_str(", style=\"rounded,filled,dashed\"");
            }
            let _ = writeln!(
                out,
                "    n{id} [label=\"{}\", color={border}, fillcolor={fill}{extra}];",
                node.state.notation()
            );
        }
        if depth.is_some() {
            out.push_str("  }\n");
        }
        for e in &self.edges {
            let on_path = self.nodes[e.from].on_winning_path && self.nodes[e.to].on_winning_path;
            let style = if on_path {
                ", color=green, penwidth=2"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{}\"{style}];",
                e.from, e.to, e.mv
            );
        }
        if self.is_truncated() {
            let _ = writeln!(
                out,
                "  truncated [shape=note, label=\"truncated at depth {}\"];",
                self.depth_limit.unwrap_or_default()
            );
        }
        out.push_str("}\n");
        out
    }

    /// Nested JSON, root first. A node reached again at the same depth through another
    /// parent is written once in full; later occurrences are stubs with `"ref": true`.
    pub fn to_json(&self) -> JsonNode {
        let mut children: Vec<Vec<(usize, Move)>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            children[e.from].push((e.to, e.mv));
        }
        let mut expanded = vec![false; self.nodes.len()];
        self.json_node(0, None, &children, &mut expanded)
    }

    fn json_node(
        &self,
        id: usize,
        mv: Option<Move>,
        children: &[Vec<(usize, Move)>],
        expanded: &mut [bool],
    ) -> JsonNode {
        let node = &self.nodes[id];
        let is_ref = expanded[id];
        expanded[id] = true;
        let kids = if is_ref {
            Vec::new()
        } else {
            children[id]
                .iter()
                .map(|&(to, m)| self.json_node(to, Some(m), children, expanded))
                .collect()
        };
        JsonNode {
            state: StateJson::from(&node.state),
            depth: node.depth,
            winner: node.winner,
            terminal: node.terminal,
            on_winning_path: node.on_winning_path,
            mv,
            truncated: node.truncated,
            is_ref,
            children: kids,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JsonNode {
    pub state: StateJson,
    pub depth: u32,
    pub winner: u8,
    pub terminal: bool,
    pub on_winning_path: bool,
    #[serde(rename = "move", skip_serializing_if = "Option::is_none")]
    pub mv: Option<Move>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
    #[serde(rename = "ref", skip_serializing_if = "std::ops::Not::not")]
    pub is_ref: bool,
    pub children: Vec<JsonNode>,
}

/// Winner from a position at `depth` given its label: Player 1 moves at even depths.
pub fn winner_at(label: Label, depth: u32) -> u8 {
    let mover = if depth.is_multiple_of(2) { 1 } else { 2 };
    match label {
        Label::N => mover,
        Label::P => 3 - mover,
    }
}

pub fn export_tree(
    solver: &Solver,
    spec: &SequenceSpec,
    n: u64,
    depth_limit: Option<u32>,
) -> Result<GameTreeExport> {
    let table = solver.solve(spec, n)?;
    build_export(&table, depth_limit, solver.budget())
}

/// Lays out the tree below the root of an already solved table.
pub fn build_export(
    table: &SolveTable,
    depth_limit: Option<u32>,
    node_budget: usize,
) -> Result<GameTreeExport> {
    let spec = table.spec();
    let path = winning_line(table)?;

    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut edges: Vec<TreeEdge> = Vec::new();
    let mut layer_ids: Vec<usize> = vec![0];
    let mut depth = 0u32;

    let make_node = |key: &StateKey, depth: u32| -> Result<TreeNode> {
        let rec = table
            .get(key)
            .ok_or_else(|| Error::InvalidKey("position missing from solve table".into()))?;
        let state = GameState::from_key(spec, key)?;
        Ok(TreeNode {
            depth,
            terminal: state.is_terminal(),
            winner: winner_at(rec.label, depth),
            on_winning_path: path.get(depth as usize) == Some(key),
            truncated: false,
            state,
        })
    };
    nodes.push(make_node(table.root_key(), 0)?);

    while !layer_ids.is_empty() {
        if depth_limit.is_some_and(|limit| depth >= limit) {
            for &id in &layer_ids {
                nodes[id].truncated = !nodes[id].terminal;
            }
            break;
        }
        let mut next_ids: Vec<usize> = Vec::new();
        let mut index: HashMap<StateKey, usize> = HashMap::new();
        for &from in &layer_ids {
            let state = nodes[from].state.clone();
            for mv in state.legal_moves() {
                let child = state.apply(mv)?.key();
                let to = match index.get(&child) {
                    Some(&to) => to,
                    None => {
                        let to = nodes.len();
                        if to >= node_budget {
                            return Err(Error::StateBudgetExceeded {
                                budget: node_budget,
                            });
                        }
                        nodes.push(make_node(&child, depth + 1)?);
                        index.insert(child, to);
                        next_ids.push(to);
                        to
                    }
                };
                edges.push(TreeEdge { from, to, mv });
            }
        }
        layer_ids = next_ids;
        depth += 1;
    }

    Ok(GameTreeExport {
        nodes,
        edges,
        depth_limit,
    })
}

/// One root-to-terminal line along which the overall winner always moves to a `P`
/// position. The loser's moves are taken first in canonical order.
pub fn winning_line(table: &SolveTable) -> Result<Vec<StateKey>> {
    let spec = table.spec();
    let mut key = table.root_key().clone();
    let mut line = vec![key.clone()];
    loop {
        let rec = table
            .get(&key)
            .ok_or_else(|| Error::InvalidKey("position missing from solve table".into()))?;
        let state = GameState::from_key(spec, &key)?;
        let mv = match rec.winning_move {
            Some(mv) => mv,
            None => match state.legal_moves().first() {
                Some(&mv) => mv,
                None => break,
            },
        };
        key = state.apply(mv)?.key();
        line.push(key.clone());
    }
    Ok(line)
}

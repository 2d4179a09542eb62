//! Generalized splittings over a gluing graph: the bicoloring and
//! acyclicity conditions, handle numbers, the amalgamated-genus formula,
//! and the correspondence between satisfying assignments and minimal
//! splittings of a block graph.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::blockgraph::{capability, BlockGraph, BlockType, StructuralReport};
use crate::formula::{Assignment, Formula, Node};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplittingError {
    #[error("handle count would be negative")]
    NegativeHandleCount,
    #[error("splitting fails validation: {0}")]
    InvalidSplitting(String),
    #[error("gluing graph is disconnected")]
    Disconnected,
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error("block {0} is not at genus 2")]
    NotGenusTwo(usize),
    #[error("block {0} uses a port bipartition outside its capability table")]
    UnlistedBipartition(usize),
    #[error("block graph fails structural checks: {0:?}")]
    Structural(Vec<String>),
    #[error("too many blocks for exhaustive search: {0} > {1}")]
    TooManyBlocks(usize, usize),
    #[error("malformed splitting: {0}")]
    Malformed(String),
    #[error("no assignment could be extracted: {0}")]
    ExtractionFailed(String),
}

/// The compression body a surface side belongs to: V ("black") or W
/// ("white"). Edges are oriented from their V side toward their W side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    V,
    W,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::V => Side::W,
            Side::W => Side::V,
        }
    }
}

/// An edge of the gluing graph: a gluing surface of genus `genus` between
/// blocks `u` and `v`. Multi-edges and self-loops are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GluingEdge {
    pub u: usize,
    pub v: usize,
    pub genus: u64,
}

/// The dual graph of a decomposition along gluing surfaces.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GluingGraph {
    pub n_vertices: usize,
    pub edges: Vec<GluingEdge>,
}

impl GluingGraph {
    /// Euler characteristic |V| − |E| as a signed quantity.
    pub fn chi(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.n_vertices).collect();
        fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..self.n_vertices).all(|i| find(&mut parent, i) == root)
    }

    /// Dual graph of a block graph: one torus gluing surface per block
    /// edge, indices aligned.
    pub fn from_block_graph(bg: &BlockGraph) -> GluingGraph {
        GluingGraph {
            n_vertices: bg.blocks.len(),
            edges: bg
                .edges
                .iter()
                .map(|e| GluingEdge { u: e.from.block, v: e.to.block, genus: 1 })
                .collect(),
        }
    }
}

/// The per-block bipartition of a splitting, as the spec's choice record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingChoice {
    pub block: usize,
    pub genus: u64,
    /// Incident (edge, end) stubs whose surface lies in the V body.
    pub v_side: Vec<(usize, usize)>,
    /// Incident (edge, end) stubs whose surface lies in the W body.
    pub w_side: Vec<(usize, usize)>,
}

/// A generalized splitting: one splitting surface per block (its genus)
/// plus, for every gluing surface, the compression body it lies in on each
/// side. `edge_colors[i][0]` is the side within block `edges[i].u`,
/// `edge_colors[i][1]` within `edges[i].v`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GeneralizedSplitting {
    pub graph: GluingGraph,
    pub vertex_genus: Vec<u64>,
    pub edge_colors: Vec<[Side; 2]>,
}

impl GeneralizedSplitting {
    pub fn choice(&self, block: usize) -> SplittingChoice {
        let mut v_side = Vec::new();
        let mut w_side = Vec::new();
        for (i, e) in self.graph.edges.iter().enumerate() {
            for (end, &vertex) in [e.u, e.v].iter().enumerate() {
                if vertex == block {
                    match self.edge_colors[i][end] {
                        Side::V => v_side.push((i, end)),
                        Side::W => w_side.push((i, end)),
                    }
                }
            }
        }
        SplittingChoice { block, genus: self.vertex_genus[block], v_side, w_side }
    }

    /// Swaps V and W everywhere; reverses every edge orientation, so
    /// validity is preserved.
    pub fn global_flip(&self) -> GeneralizedSplitting {
        GeneralizedSplitting {
            graph: self.graph.clone(),
            vertex_genus: self.vertex_genus.clone(),
            edge_colors: self
                .edge_colors
                .iter()
                .map(|c| [c[0].flip(), c[1].flip()])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Ok,
    /// The gluing surface of this edge lies in same-colored bodies on both
    /// sides.
    ColorClash { edge: usize },
    /// Edges forming a directed cycle when oriented V → W.
    Cycle { edges: Vec<usize> },
}

/// Checks the two conditions of a generalized splitting: opposite colors
/// across every gluing surface, and no directed cycle when each edge is
/// oriented from its V-side block to its W-side block.
pub fn validate(gs: &GeneralizedSplitting) -> Result<Validation, SplittingError> {
    let g = &gs.graph;
    if gs.vertex_genus.len() != g.n_vertices || gs.edge_colors.len() != g.edges.len() {
        return Err(SplittingError::Malformed(
            "choice vectors do not cover the graph".to_string(),
        ));
    }
    for (i, e) in g.edges.iter().enumerate() {
        if e.u >= g.n_vertices || e.v >= g.n_vertices {
            return Err(SplittingError::Malformed(format!("edge {i} is dangling")));
        }
        if gs.edge_colors[i][0] == gs.edge_colors[i][1] {
            return Ok(Validation::ColorClash { edge: i });
        }
    }
    // Orient every edge V → W and search for a directed cycle.
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n_vertices];
    for (i, e) in g.edges.iter().enumerate() {
        let (src, dst) = if gs.edge_colors[i][0] == Side::V { (e.u, e.v) } else { (e.v, e.u) };
        out[src].push((dst, i));
    }
    // Iterative DFS with colors: 0 unseen, 1 on stack, 2 done.
    let mut state = vec![0u8; g.n_vertices];
    let mut via_edge = vec![usize::MAX; g.n_vertices];
    let mut parent = vec![usize::MAX; g.n_vertices];
    for start in 0..g.n_vertices {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(frame) = stack.last_mut() {
            let v = frame.0;
            if frame.1 < out[v].len() {
                let (w, edge) = out[v][frame.1];
                frame.1 += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        via_edge[w] = edge;
                        parent[w] = v;
                        stack.push((w, 0));
                    }
                    1 => {
                        // Back edge: walk the stack chain from v up to w.
                        let mut cycle = vec![edge];
                        let mut x = v;
                        while x != w {
                            cycle.push(via_edge[x]);
                            x = parent[x];
                        }
                        cycle.reverse();
                        return Ok(Validation::Cycle { edges: cycle });
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    Ok(Validation::Ok)
}

/// Handle number of a compression body: `g(∂₊V) − Σ g(∂₋ components) +
/// |∂₋V| − 1`, with the handlebody convention that the `|∂₋V| − 1` term
/// floors at 0 (a genus-g handlebody has g one-handles).
pub fn handle_number(genus_plus: u64, minus_genera: &[u64]) -> Result<u64, SplittingError> {
    let sum: i128 = minus_genera.iter().map(|&g| g as i128).sum();
    let count = minus_genera.len().max(1) as i128;
    let h = genus_plus as i128 - sum + count - 1;
    if h < 0 {
        return Err(SplittingError::NegativeHandleCount);
    }
    Ok(h as u64)
}

/// Genus of the amalgamation: `Σ g(H_x) − Σ g(F_e) + 1 − χ(𝒢)`.
pub fn amalgamated_genus(gs: &GeneralizedSplitting) -> Result<u64, SplittingError> {
    match validate(gs)? {
        Validation::Ok => {}
        other => return Err(SplittingError::InvalidSplitting(format!("{other:?}"))),
    }
    if !gs.graph.is_connected() {
        return Err(SplittingError::Disconnected);
    }
    let sum_h: i128 = gs.vertex_genus.iter().map(|&g| g as i128).sum();
    let sum_f: i128 = gs.graph.edges.iter().map(|e| e.genus as i128).sum();
    let genus = sum_h - sum_f + 1 - gs.graph.chi() as i128;
    if genus < 0 {
        return Err(SplittingError::Malformed("negative genus".to_string()));
    }
    Ok(genus as u64)
}

// ---------------------------------------------------------------------------
// Block-graph splittings and the truth-value correspondence
// ---------------------------------------------------------------------------

/// For each block, its ports as (port index, edge index, end index) stubs.
fn block_stubs(bg: &BlockGraph) -> Vec<Vec<(usize, usize, usize)>> {
    let mut stubs = vec![Vec::new(); bg.blocks.len()];
    for (i, e) in bg.edges.iter().enumerate() {
        stubs[e.from.block].push((e.from.port, i, 0));
        stubs[e.to.block].push((e.to.port, i, 1));
    }
    for s in &mut stubs {
        s.sort();
    }
    stubs
}

/// Checks that the port bipartition induced by `gs` at each block is listed
/// in that block type's capability table.
fn check_capabilities(bg: &BlockGraph, gs: &GeneralizedSplitting) -> Result<(), SplittingError> {
    let stubs = block_stubs(bg);
    for b in &bg.blocks {
        let mut v_ports = BTreeSet::new();
        let mut w_ports = BTreeSet::new();
        for &(port, edge, end) in &stubs[b.id] {
            match gs.edge_colors[edge][end] {
                Side::V => v_ports.insert(port),
                Side::W => w_ports.insert(port),
            };
        }
        if !capability(b.block_type).iter().any(|c| c.matches(&v_ports, &w_ports)) {
            return Err(SplittingError::UnlistedBipartition(b.id));
        }
    }
    Ok(())
}

/// Builds the generalized splitting a satisfying assignment induces: each
/// gluing surface takes the truth value of its label; a true surface's
/// input-facing side is W (white) and its output-facing side V (black),
/// reversed for false surfaces. Every block then lands on a capability
/// bipartition at genus 2 and the result validates with amalgamated genus
/// `|Q| + 2`.
pub fn coloring_from_assignment(
    bg: &BlockGraph,
    a: &Assignment,
) -> Result<GeneralizedSplitting, SplittingError> {
    let q = bg
        .formula_label()
        .ok_or_else(|| SplittingError::Malformed("no END block".to_string()))?;
    if !q.eval(a) {
        return Err(SplittingError::NotSatisfying);
    }
    let graph = GluingGraph::from_block_graph(bg);
    let edge_colors = bg
        .edges
        .iter()
        .map(|e| {
            if e.label.eval(a) {
                [Side::V, Side::W] // producer black, consumer white
            } else {
                [Side::W, Side::V]
            }
        })
        .collect();
    let gs = GeneralizedSplitting {
        graph,
        vertex_genus: vec![2; bg.blocks.len()],
        edge_colors,
    };
    check_capabilities(bg, &gs)?;
    match validate(&gs)? {
        Validation::Ok => Ok(gs),
        other => Err(SplittingError::InvalidSplitting(format!(
            "assignment-induced coloring rejected: {other:?}"
        ))),
    }
}

/// Reads an assignment back off a valid all-genus-2 splitting: after
/// normalizing so the END block's input side is white, each variable takes
/// the truth value of its VAR block's output surface (true iff the
/// consumer-facing side is white). The result is checked to satisfy the
/// formula.
pub fn assignment_from_coloring(
    bg: &BlockGraph,
    gs: &GeneralizedSplitting,
) -> Result<Assignment, SplittingError> {
    match validate(gs)? {
        Validation::Ok => {}
        other => return Err(SplittingError::InvalidSplitting(format!("{other:?}"))),
    }
    if let Some(b) = gs.vertex_genus.iter().position(|&g| g != 2) {
        return Err(SplittingError::NotGenusTwo(b));
    }
    check_capabilities(bg, gs)?;
    let end = bg
        .end_block()
        .ok_or_else(|| SplittingError::Malformed("no END block".to_string()))?;
    let end_edge = bg
        .edges
        .iter()
        .position(|e| e.to.block == end.id)
        .ok_or_else(|| SplittingError::Malformed("END block has no edge".to_string()))?;
    // WLOG normalization: END's input-containing side must be white.
    let gs = if gs.edge_colors[end_edge][1] == Side::W { gs.clone() } else { gs.global_flip() };

    let q = bg.formula_label().unwrap().clone();
    let formula =
        Formula::new(q).map_err(|e| SplittingError::ExtractionFailed(e.to_string()))?;
    let mut values = vec![false; formula.n_vars() as usize];
    for b in &bg.blocks {
        if b.block_type != BlockType::Var {
            continue;
        }
        let var = match &b.ports[0].label {
            Node::Var(v) => *v,
            _ => return Err(SplittingError::Malformed(format!("VAR block {} mislabeled", b.id))),
        };
        let edge = bg
            .edges
            .iter()
            .position(|e| e.from.block == b.id)
            .ok_or_else(|| SplittingError::Malformed(format!("VAR block {} unglued", b.id)))?;
        values[(var - 1) as usize] = gs.edge_colors[edge][1] == Side::W;
    }
    let a = Assignment::new(values);
    if !formula.eval(&a) {
        return Err(SplittingError::ExtractionFailed(format!(
            "extracted assignment {a} does not satisfy the formula"
        )));
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// Minimal amalgamated genus search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinGenus {
    /// Some all-genus-2 capability splitting validates; the witness
    /// realizes this genus.
    Exact { genus: u64, witness: GeneralizedSplitting },
    /// No all-genus-2 splitting validates; the true minimum is at least
    /// this (unlisted bipartitions carry only a genus-3 lower bound).
    LowerBound { genus: u64 },
}

pub const MIN_GENUS_BLOCK_LIMIT: usize = 16;

/// Per-port side assignments a block type admits: every capability
/// bipartition with both sidedness choices.
fn block_options(t: BlockType) -> Vec<Vec<Side>> {
    let n = t.n_ports();
    let mut options = Vec::new();
    for entry in capability(t) {
        for flip in [false, true] {
            let mut sides = vec![Side::V; n];
            for p in 0..n {
                let in_a = entry.side_a.contains(&p);
                sides[p] = match (in_a, flip) {
                    (true, false) | (false, true) => Side::V,
                    _ => Side::W,
                };
            }
            if !options.contains(&sides) {
                options.push(sides);
            }
        }
    }
    options
}

/// Exhaustive search over per-block capability choices for a valid
/// generalized splitting with every block at genus 2. Returns the exact
/// minimum `|Q| + 2` with a witness when one exists, otherwise the sound
/// lower bound `|Q| + 3`.
pub fn min_genus(bg: &BlockGraph) -> Result<MinGenus, SplittingError> {
    let report: StructuralReport = crate::blockgraph::structural_check(bg);
    if !report.is_ok() {
        return Err(SplittingError::Structural(report.violations));
    }
    if bg.blocks.len() > MIN_GENUS_BLOCK_LIMIT {
        return Err(SplittingError::TooManyBlocks(bg.blocks.len(), MIN_GENUS_BLOCK_LIMIT));
    }
    let q_len = bg.formula_label().map(|n| n.length()).unwrap_or(0);
    let stubs = block_stubs(bg);
    let end_id = bg.end_block().map(|b| b.id).unwrap();

    // Visit blocks breadth-first from END so pruning bites early.
    let mut order = vec![end_id];
    let mut seen = vec![false; bg.blocks.len()];
    seen[end_id] = true;
    let mut head = 0;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); bg.blocks.len()];
    for e in &bg.edges {
        adj[e.from.block].push(e.to.block);
        adj[e.to.block].push(e.from.block);
    }
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
    }

    let options: Vec<Vec<Vec<Side>>> = bg
        .blocks
        .iter()
        .map(|b| {
            if b.id == end_id {
                // WLOG the END input side is white.
                vec![vec![Side::W]]
            } else {
                block_options(b.block_type)
            }
        })
        .collect();

    let mut colors: Vec<[Option<Side>; 2]> = vec![[None, None]; bg.edges.len()];
    let found = dfs_all(0, &order, &options, &stubs, &mut colors, bg);
    match found {
        Some(gs) => {
            let genus = amalgamated_genus(&gs)?;
            debug_assert_eq!(genus, q_len + 2);
            Ok(MinGenus::Exact { genus, witness: gs })
        }
        None => Ok(MinGenus::LowerBound { genus: q_len + 3 }),
    }
}

/// Like the inner search of [`min_genus`] but validates (including the
/// cycle check) every complete assignment before accepting it.
fn dfs_all(
    pos: usize,
    order: &[usize],
    options: &[Vec<Vec<Side>>],
    stubs: &[Vec<(usize, usize, usize)>],
    colors: &mut Vec<[Option<Side>; 2]>,
    bg: &BlockGraph,
) -> Option<GeneralizedSplitting> {
    if pos == order.len() {
        let gs = GeneralizedSplitting {
            graph: GluingGraph::from_block_graph(bg),
            vertex_genus: vec![2; bg.blocks.len()],
            edge_colors: colors.iter().map(|c| [c[0].unwrap(), c[1].unwrap()]).collect(),
        };
        return match validate(&gs) {
            Ok(Validation::Ok) => Some(gs),
            _ => None,
        };
    }
    let block = order[pos];
    'opts: for opt in &options[block] {
        let mut placed: Vec<(usize, usize)> = Vec::new();
        for &(port, edge, end) in &stubs[block] {
            let side = opt[port];
            let other = colors[edge][1 - end];
            if other == Some(side) {
                for &(e2, n2) in &placed {
                    colors[e2][n2] = None;
                }
                continue 'opts;
            }
            colors[edge][end] = Some(side);
            placed.push((edge, end));
        }
        if let Some(found) = dfs_all(pos + 1, order, options, stubs, colors, bg) {
            return Some(found);
        }
        for &(e2, n2) in &placed {
            colors[e2][n2] = None;
        }
    }
    None
}

//! Translation of a CNF formula into its tree of gadget blocks, plus the
//! static splitting-capability table for each block type.
//!
//! One VAR block per distinct variable, a left-comb chain of REP blocks
//! replicating a variable with several occurrences, one NOT per negation,
//! one OR/AND per connective mirroring the parse tree, and a single END
//! consuming the root. The result is a connected graph with `|Q| + 1`
//! blocks whose edges pair up all the block ports; since every block has
//! at most three ports, there are at most `3(|Q| + 1) / 2` edges. (The
//! graph is generally *not* a tree: a variable replicated into several
//! clauses closes cycles through the conjunction chain.)

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::formula::{Formula, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum BlockType {
    Var,
    Rep,
    Not,
    And,
    Or,
    End,
}

impl BlockType {
    pub fn n_inputs(self) -> usize {
        match self {
            BlockType::Var => 0,
            BlockType::Rep | BlockType::Not | BlockType::End => 1,
            BlockType::And | BlockType::Or => 2,
        }
    }

    pub fn n_outputs(self) -> usize {
        match self {
            BlockType::Var | BlockType::Not | BlockType::And | BlockType::Or => 1,
            BlockType::Rep => 2,
            BlockType::End => 0,
        }
    }

    pub fn n_ports(self) -> usize {
        self.n_inputs() + self.n_outputs()
    }

    /// Index of the preferred port, if the type has one: the REP input and
    /// the AND output.
    pub fn preferred_port(self) -> Option<usize> {
        match self {
            BlockType::Rep => Some(0),
            BlockType::And => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for BlockType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BlockType::Var => "VAR",
            BlockType::Rep => "REP",
            BlockType::Not => "NOT",
            BlockType::And => "AND",
            BlockType::Or => "OR",
            BlockType::End => "END",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortRole {
    Input,
    Output,
}

/// Port layout per type (inputs first, the OR/AND output always last):
/// VAR `[out]`; REP `[in*, out, out]`; NOT `[in, out]`; AND `[in, in, out*]`;
/// OR `[in, in, out]`; END `[in]`. `*` marks the preferred port.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub role: PortRole,
    pub label: Node,
    pub preferred: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: usize,
    pub block_type: BlockType,
    pub ports: Vec<Port>,
}

/// A port address: block id plus port index within that block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortRef {
    pub block: usize,
    pub port: usize,
}

/// A gluing edge joining one output port to one input port of equal label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEdge {
    pub from: PortRef,
    pub to: PortRef,
    pub label: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGraph {
    pub blocks: Vec<Block>,
    pub edges: Vec<BlockEdge>,
}

impl BlockGraph {
    pub fn block(&self, id: usize) -> &Block {
        &self.blocks[id]
    }

    pub fn end_block(&self) -> Option<&Block> {
        self.blocks.iter().find(|b| b.block_type == BlockType::End)
    }

    /// The formula the graph was built from, as carried by the END input.
    pub fn formula_label(&self) -> Option<&Node> {
        self.end_block().map(|b| &b.ports[0].label)
    }

    pub fn census(&self) -> BlockCensus {
        let mut c = BlockCensus::default();
        for b in &self.blocks {
            match b.block_type {
                BlockType::Var => c.var += 1,
                BlockType::Rep => c.rep += 1,
                BlockType::Not => c.not += 1,
                BlockType::And => c.and += 1,
                BlockType::Or => c.or += 1,
                BlockType::End => c.end += 1,
            }
        }
        c
    }

    /// Dot-format edge list for documentation.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph blocks {\n");
        for b in &self.blocks {
            out.push_str(&format!("  b{} [label=\"{} {}\"];\n", b.id, b.block_type, b.id));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  b{} -> b{} [label=\"{}\"];\n",
                e.from.block, e.to.block, e.label
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BlockCensus {
    pub var: usize,
    pub rep: usize,
    pub not: usize,
    pub and: usize,
    pub or: usize,
    pub end: usize,
}

impl BlockCensus {
    pub fn total(&self) -> usize {
        self.var + self.rep + self.not + self.and + self.or + self.end
    }
}

// ---------------------------------------------------------------------------
// Capability table
// ---------------------------------------------------------------------------

/// An unordered bipartition of a block's port indices together with the
/// genus of a splitting realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapabilityEntry {
    pub side_a: BTreeSet<usize>,
    pub side_b: BTreeSet<usize>,
    pub genus: u64,
}

impl CapabilityEntry {
    fn new(a: &[usize], b: &[usize]) -> CapabilityEntry {
        CapabilityEntry {
            side_a: a.iter().copied().collect(),
            side_b: b.iter().copied().collect(),
            genus: 2,
        }
    }

    /// Unordered match against a concrete port bipartition.
    pub fn matches(&self, x: &BTreeSet<usize>, y: &BTreeSet<usize>) -> bool {
        (&self.side_a == x && &self.side_b == y) || (&self.side_a == y && &self.side_b == x)
    }
}

/// The genus-2 splitting bipartitions each block type admits. Any
/// bipartition absent from the list carries only the conservative lower
/// bound of genus 3.
pub fn capability(t: BlockType) -> Vec<CapabilityEntry> {
    match t {
        BlockType::Var => vec![CapabilityEntry::new(&[0], &[])],
        BlockType::End => vec![CapabilityEntry::new(&[0], &[])],
        BlockType::Not => vec![CapabilityEntry::new(&[0, 1], &[])],
        BlockType::Rep => vec![CapabilityEntry::new(&[0], &[1, 2])],
        BlockType::And => vec![CapabilityEntry::new(&[0, 1], &[2])],
        BlockType::Or => vec![
            CapabilityEntry::new(&[0, 1], &[2]),
            CapabilityEntry::new(&[0, 2], &[1]),
            CapabilityEntry::new(&[1, 2], &[0]),
        ],
    }
}

/// Genus assumed for any port bipartition absent from the capability list.
pub const UNLISTED_GENUS_LOWER_BOUND: u64 = 3;

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

struct Builder {
    blocks: Vec<Block>,
    edges: Vec<BlockEdge>,
    /// Pending output ports carrying each variable, in source order.
    supplies: Vec<VecDeque<PortRef>>,
}

impl Builder {
    fn add_block(&mut self, block_type: BlockType, ports: Vec<Port>) -> usize {
        let id = self.blocks.len();
        debug_assert_eq!(ports.len(), block_type.n_ports());
        self.blocks.push(Block { id, block_type, ports });
        id
    }

    fn add_edge(&mut self, from: PortRef, to: PortRef) {
        let label = self.blocks[from.block].ports[from.port].label.clone();
        debug_assert_eq!(label, self.blocks[to.block].ports[to.port].label);
        self.edges.push(BlockEdge { from, to, label });
    }

    fn port(role: PortRole, label: Node) -> Port {
        Port { role, label, preferred: false }
    }

    /// VAR block plus a left-comb REP chain producing `k` supply outputs.
    fn build_variable(&mut self, var: u32, k: usize) {
        let label = Node::Var(var);
        let var_id = self.add_block(
            BlockType::Var,
            vec![Self::port(PortRole::Output, label.clone())],
        );
        let mut feed = PortRef { block: var_id, port: 0 };
        let mut queue = VecDeque::new();
        for i in 0..k.saturating_sub(1) {
            let rep_id = self.add_block(
                BlockType::Rep,
                vec![
                    Port { role: PortRole::Input, label: label.clone(), preferred: true },
                    Self::port(PortRole::Output, label.clone()),
                    Self::port(PortRole::Output, label.clone()),
                ],
            );
            self.add_edge(feed, PortRef { block: rep_id, port: 0 });
            queue.push_back(PortRef { block: rep_id, port: 1 });
            feed = PortRef { block: rep_id, port: 2 };
            if i == k - 2 {
                queue.push_back(feed);
            }
        }
        if k == 1 {
            queue.push_back(feed);
        }
        self.supplies[(var - 1) as usize] = queue;
    }

    /// Builds the operator blocks for `node` and returns the output port
    /// labeled with it.
    fn build_node(&mut self, node: &Node) -> PortRef {
        match node {
            Node::Var(v) => self.supplies[(*v - 1) as usize]
                .pop_front()
                .expect("supply exhausted: occurrence count mismatch"),
            Node::Not(inner) => {
                let src = self.build_node(inner);
                let id = self.add_block(
                    BlockType::Not,
                    vec![
                        Self::port(PortRole::Input, (**inner).clone()),
                        Self::port(PortRole::Output, node.clone()),
                    ],
                );
                self.add_edge(src, PortRef { block: id, port: 0 });
                PortRef { block: id, port: 1 }
            }
            Node::And(l, r) | Node::Or(l, r) => {
                let (ty, preferred_out) = if matches!(node, Node::And(_, _)) {
                    (BlockType::And, true)
                } else {
                    (BlockType::Or, false)
                };
                let src_l = self.build_node(l);
                let src_r = self.build_node(r);
                let id = self.add_block(
                    ty,
                    vec![
                        Self::port(PortRole::Input, (**l).clone()),
                        Self::port(PortRole::Input, (**r).clone()),
                        Port {
                            role: PortRole::Output,
                            label: node.clone(),
                            preferred: preferred_out,
                        },
                    ],
                );
                self.add_edge(src_l, PortRef { block: id, port: 0 });
                self.add_edge(src_r, PortRef { block: id, port: 1 });
                PortRef { block: id, port: 2 }
            }
        }
    }
}

fn count_occurrences(node: &Node, counts: &mut [usize]) {
    match node {
        Node::Var(v) => counts[(*v - 1) as usize] += 1,
        Node::Not(a) => count_occurrences(a, counts),
        Node::And(a, b) | Node::Or(a, b) => {
            count_occurrences(a, counts);
            count_occurrences(b, counts);
        }
    }
}

/// Builds the gadget tree for a normalized CNF formula: `|Q| + 1` blocks,
/// `|Q|` edges.
pub fn build_block_graph(f: &Formula) -> BlockGraph {
    let n = f.n_vars() as usize;
    let mut counts = vec![0usize; n];
    count_occurrences(f.root(), &mut counts);
    let mut b = Builder {
        blocks: Vec::new(),
        edges: Vec::new(),
        supplies: vec![VecDeque::new(); n],
    };
    for v in 1..=n {
        b.build_variable(v as u32, counts[v - 1]);
    }
    let root_out = b.build_node(f.root());
    let end_id = b.add_block(
        BlockType::End,
        vec![Builder::port(PortRole::Input, f.root().clone())],
    );
    b.add_edge(root_out, PortRef { block: end_id, port: 0 });
    BlockGraph { blocks: b.blocks, edges: b.edges }
}

// ---------------------------------------------------------------------------
// Structural checker
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct StructuralReport {
    pub violations: Vec<String>,
}

impl StructuralReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

/// Verifies the CNF wiring rules: port signatures, one edge per port with
/// matching labels, tree shape, block count `|Q| + 1`, and the routing
/// constraints (AND outputs feed AND/END; OR outputs feed AND/OR/END; NOT
/// outputs carry a negated literal).
pub fn structural_check(g: &BlockGraph) -> StructuralReport {
    let mut r = StructuralReport::default();
    for b in &g.blocks {
        let t = b.block_type;
        let inputs = b.ports.iter().filter(|p| p.role == PortRole::Input).count();
        let outputs = b.ports.len() - inputs;
        if inputs != t.n_inputs() || outputs != t.n_outputs() {
            r.fail(format!("block {}: {} has {inputs} inputs / {outputs} outputs", b.id, t));
        }
        for (i, p) in b.ports.iter().enumerate() {
            let should_prefer = t.preferred_port() == Some(i);
            if p.preferred != should_prefer {
                r.fail(format!("block {}: port {i} preferred flag mismatch for {}", b.id, t));
            }
        }
        match t {
            BlockType::Var | BlockType::Rep => {
                let var = b.ports.first().and_then(|p| match &p.label {
                    Node::Var(v) => Some(*v),
                    _ => None,
                });
                if var.is_none() || b.ports.iter().any(|p| p.label != Node::Var(var.unwrap())) {
                    r.fail(format!("block {}: {} ports must all carry one variable", b.id, t));
                }
            }
            BlockType::Not => {
                let expected = Node::Not(Box::new(b.ports[0].label.clone()));
                if !matches!(b.ports[0].label, Node::Var(_)) || b.ports[1].label != expected {
                    r.fail(format!("block {}: NOT must map a variable to its negation", b.id));
                }
            }
            BlockType::And | BlockType::Or => {
                let (l, r_) = (b.ports[0].label.clone(), b.ports[1].label.clone());
                let expected = if t == BlockType::And {
                    Node::And(Box::new(l), Box::new(r_))
                } else {
                    Node::Or(Box::new(l), Box::new(r_))
                };
                if b.ports[2].label != expected {
                    r.fail(format!("block {}: {} output label must combine its inputs", b.id, t));
                }
            }
            BlockType::End => {}
        }
    }

    let mut usage = vec![Vec::new(); g.blocks.len()];
    for b in &g.blocks {
        usage[b.id] = vec![0usize; b.ports.len()];
    }
    for (i, e) in g.edges.iter().enumerate() {
        for (pr, want, what) in [
            (e.from, PortRole::Output, "source"),
            (e.to, PortRole::Input, "target"),
        ] {
            match g.blocks.get(pr.block).and_then(|b| b.ports.get(pr.port)) {
                None => r.fail(format!("edge {i}: dangling {what} port {pr:?}")),
                Some(p) => {
                    usage[pr.block][pr.port] += 1;
                    if p.role != want {
                        r.fail(format!("edge {i}: {what} endpoint has wrong role"));
                    }
                    if p.label != e.label {
                        r.fail(format!("edge {i}: label differs from {what} port label"));
                    }
                }
            }
        }

        let (src_t, dst_t) = (
            g.blocks.get(e.from.block).map(|b| b.block_type),
            g.blocks.get(e.to.block).map(|b| b.block_type),
        );
        if let (Some(src), Some(dst)) = (src_t, dst_t) {
            let ok = match src {
                BlockType::And => matches!(dst, BlockType::And | BlockType::End),
                BlockType::Or => matches!(dst, BlockType::And | BlockType::Or | BlockType::End),
                BlockType::Not => {
                    matches!(dst, BlockType::And | BlockType::Or | BlockType::End)
                        && matches!(e.label, Node::Not(ref a) if matches!(**a, Node::Var(_)))
                }
                BlockType::Var | BlockType::Rep => !matches!(dst, BlockType::Var),
                BlockType::End => false,
            };
            if !ok {
                r.fail(format!("edge {i}: {src} output may not feed {dst}"));
            }
        }
    }
    for (bid, ports) in usage.iter().enumerate() {
        for (pid, &n) in ports.iter().enumerate() {
            if n != 1 {
                r.fail(format!("block {bid}: port {pid} used {n} times (want 1)"));
            }
        }
    }

    // Connectivity; the edge count is already forced to half the port
    // count by the one-edge-per-port rule above.
    if !g.blocks.is_empty() {
        let mut parent: Vec<usize> = (0..g.blocks.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &g.edges {
            if e.from.block >= g.blocks.len() || e.to.block >= g.blocks.len() {
                continue;
            }
            let (a, b) = (find(&mut parent, e.from.block), find(&mut parent, e.to.block));
            if a != b {
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        if (0..g.blocks.len()).any(|i| find(&mut parent, i) != root) {
            r.fail("graph is disconnected".to_string());
        }
        if 2 * g.edges.len() > 3 * g.blocks.len() {
            r.fail(format!(
                "edge count {} exceeds 3/2 of block count {}",
                g.edges.len(),
                g.blocks.len()
            ));
        }
    }

    let end_count = g.blocks.iter().filter(|b| b.block_type == BlockType::End).count();
    if end_count != 1 {
        r.fail(format!("expected exactly one END block, found {end_count}"));
    } else if let Some(q) = g.formula_label() {
        let expected = q.length() + 1;
        if g.blocks.len() as u64 != expected {
            r.fail(format!(
                "block count {} differs from |Q|+1 = {expected}",
                g.blocks.len()
            ));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_expr;

    fn graph(text: &str) -> BlockGraph {
        build_block_graph(&parse_expr(text).unwrap())
    }

    #[test]
    fn running_example_census() {
        let g = graph("(a|c)&(~a|b)&(b|c)");
        let c = g.census();
        assert_eq!(c.var, 3);
        assert_eq!(c.rep, 3);
        assert_eq!(c.not, 1);
        assert_eq!(c.or, 3);
        assert_eq!(c.and, 2);
        assert_eq!(c.end, 1);
        assert_eq!(c.total(), 13);
        // 30 ports pair into 15 gluing edges, within 3/2 of 13 blocks.
        assert_eq!(g.edges.len(), 15);
        assert!(structural_check(&g).is_ok());
    }

    #[test]
    fn single_variable() {
        let g = graph("a");
        assert_eq!(g.blocks.len(), 2);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.blocks[0].block_type, BlockType::Var);
        assert_eq!(g.blocks[1].block_type, BlockType::End);
        assert!(structural_check(&g).is_ok());
    }

    #[test]
    fn contradiction_census() {
        let g = graph("a&~a");
        let c = g.census();
        assert_eq!((c.var, c.rep, c.not, c.and, c.end), (1, 1, 1, 1, 1));
        assert_eq!(c.total(), 5);
        assert!(structural_check(&g).is_ok());
    }

    #[test]
    fn not_attaches_directly_to_single_occurrence_var() {
        let g = graph("~a");
        let c = g.census();
        assert_eq!((c.var, c.rep, c.not, c.end), (1, 0, 1, 1));
        assert_eq!(c.total(), 3); // |Q| = 2
        assert!(structural_check(&g).is_ok());
    }

    #[test]
    fn rep_chain_is_left_comb() {
        // Variable a occurs 3 times: expect 2 REP blocks chained.
        let g = graph("(a|a)|a");
        let c = g.census();
        assert_eq!((c.var, c.rep, c.or), (1, 2, 2));
        assert!(structural_check(&g).is_ok());
        // The second REP's input comes from the first REP's last output.
        let reps: Vec<&Block> = g
            .blocks
            .iter()
            .filter(|b| b.block_type == BlockType::Rep)
            .collect();
        let chain_edge = g.edges.iter().find(|e| {
            e.from.block == reps[0].id && e.to.block == reps[1].id
        });
        assert!(chain_edge.is_some());
        assert_eq!(chain_edge.unwrap().from.port, 2);
    }

    #[test]
    fn capability_table_shapes() {
        assert_eq!(capability(BlockType::Or).len(), 3);
        assert_eq!(capability(BlockType::And).len(), 1);
        let not = capability(BlockType::Not);
        assert_eq!(not.len(), 1);
        assert!(not[0].matches(&BTreeSet::from([0, 1]), &BTreeSet::new()));
        let and = &capability(BlockType::And)[0];
        assert!(and.matches(&BTreeSet::from([2]), &BTreeSet::from([0, 1])));
        for t in [BlockType::Var, BlockType::Rep, BlockType::Not, BlockType::And, BlockType::Or, BlockType::End] {
            for e in capability(t) {
                assert_eq!(e.genus, 2);
                let union: BTreeSet<usize> =
                    e.side_a.union(&e.side_b).copied().collect();
                assert_eq!(union, (0..t.n_ports()).collect());
            }
        }
    }

    #[test]
    fn structural_check_rejects_and_into_or() {
        let mut g = graph("(a&b)|c");
        // This formula is not CNF; the builder still produces it, and the
        // checker must flag the AND-output-to-OR-input edge.
        let bad = g.edges.iter().any(|e| {
            g.blocks[e.from.block].block_type == BlockType::And
                && g.blocks[e.to.block].block_type == BlockType::Or
        });
        assert!(bad);
        assert!(!structural_check(&g).is_ok());
        // Breaking the tree shape is also caught.
        g.edges.pop();
        assert!(!structural_check(&g).is_ok());
    }

    #[test]
    fn block_count_matches_length_plus_one() {
        for text in ["a", "~a", "a&b", "(a|b)&(~a|~b)", "(a|c)&(~a|b)&(b|c)"] {
            let f = parse_expr(text).unwrap();
            let g = build_block_graph(&f);
            assert_eq!(g.blocks.len() as u64, f.length() + 1, "{text}");
            let ports: usize = g.blocks.iter().map(|b| b.ports.len()).sum();
            assert_eq!(g.edges.len() * 2, ports, "{text}");
            assert!(g.edges.len() * 2 <= g.blocks.len() * 3, "{text}");
        }
    }

    #[test]
    fn labels_compose_along_edges() {
        let g = graph("(a|c)&(~a|b)&(b|c)");
        for e in &g.edges {
            assert_eq!(g.blocks[e.from.block].ports[e.from.port].label, e.label);
            assert_eq!(g.blocks[e.to.block].ports[e.to.port].label, e.label);
        }
    }

    #[test]
    fn dot_export_mentions_every_block() {
        let g = graph("a&b");
        let dot = g.to_dot();
        for b in &g.blocks {
            assert!(dot.contains(&format!("b{}", b.id)));
        }
    }
}

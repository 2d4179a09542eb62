//! Reduction from CNF satisfiability to bounded Heegaard genus: formula
//! handling, Farey-graph distance tools, gadget block graphs, generalized
//! splittings, triangulations, and the end-to-end compiler.

pub mod blockgraph;
pub mod compiler;
pub mod farey;
pub mod formula;
pub mod splitting;
pub mod tri;

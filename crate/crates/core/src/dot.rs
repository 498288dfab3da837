//! Graphviz export of the dressed upper/lower coupling graph.

use std::fmt::Write;

use crate::dressing::DressedSystem;

/// Bipartite graph with nodes `U1..`, `L1..` (dressed states, ascending
/// energy) and an edge wherever `|C| > tol_rank·σ_max`. Lower nodes of one
/// degenerate block share a cluster.
pub fn export_dot(dressed: &DressedSystem, sigma_max: f64, tol_rank: f64) -> String {
    let cutoff = tol_rank * sigma_max;
    let mut out = String::from("graph dressed {\n  rankdir=LR;\n  node [shape=circle];\n");
    out.push_str("  subgraph upper {\n    rank=same;\n");
    for (i, d) in dressed.delta.iter().enumerate() {
        writeln!(out, "    U{} [label=\"U{}\\n{:.6}\"];", i + 1, i + 1, d).unwrap();
    }
    out.push_str("  }\n");
    for (b, range) in dressed.blocks.iter().enumerate() {
        writeln!(out, "  subgraph cluster_block{} {{\n    label=\"block {}\";", b + 1, b + 1).unwrap();
        for k in range.clone() {
            writeln!(out, "    L{} [label=\"L{}\\n{:.6}\"];", k + 1, k + 1, dressed.omega[k]).unwrap();
        }
        out.push_str("  }\n");
    }
    for i in 0..dressed.n_upper() {
        for k in 0..dressed.n_lower() {
            let g = dressed.coupling[(i, k)].norm();
            if g > cutoff {
                writeln!(out, "  U{} -- L{} [label=\"{:.6}\", coupling={:e}];", i + 1, k + 1, g, g).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

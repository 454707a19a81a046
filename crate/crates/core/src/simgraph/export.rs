//! Text exports of similarity graphs. Weights are written with nine
//! significant digits in scientific notation.

use std::fmt::Write;

use super::{GraphMode, SimilarityGraph};

fn sig9(w: f64) -> String {
    format!("{w:.8e}")
}

/// Graphviz DOT, one undirected edge per nonzero upper-triangle weight.
/// `labels` overrides the numeric vertex names when given.
pub fn to_dot(g: &SimilarityGraph, labels: Option<&[String]>) -> String {
    let mut out = String::from("graph similarity {\n");
    let name = |i: usize| match labels {
        Some(l) => format!("{:?}", l[i]),
        None => i.to_string(),
    };
    for i in 0..g.num_vertices() {
        writeln!(out, "  {};", name(i)).unwrap();
    }
    for (i, j, w) in g.edges() {
        writeln!(out, "  {} -- {} [weight={}];", name(i), name(j), sig9(w)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Edge list: `#` header lines describing the construction, then one
/// `i<TAB>j<TAB>weight` line per edge with `i < j`.
pub fn to_edge_list(g: &SimilarityGraph) -> String {
    let c = g.construction();
    let mode = match c.mode {
        GraphMode::RowTopK { k } => format!("row_top_k k={k}"),
        GraphMode::GlobalTopEdges { k_per_vertex, edges } => {
            format!("global_top_edges k={k_per_vertex} edges={edges}")
        }
        GraphMode::Dense => "dense".to_string(),
    };
    let mut out = String::new();
    writeln!(out, "# vertices {}", g.num_vertices()).unwrap();
    writeln!(out, "# mode {mode} symmetrized={}", c.symmetrized).unwrap();
    for (i, j, w) in g.edges() {
        writeln!(out, "{i}\t{j}\t{}", sig9(w)).unwrap();
    }
    out
}

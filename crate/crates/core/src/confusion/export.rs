use std::fmt::Write;

use super::{BipartiteConfusion, OverlapMatrix};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn sorted_pairs(m: &OverlapMatrix, top: Option<usize>) -> Vec<(usize, usize, f64)> {
    let mut pairs = m.pairs();
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    if let Some(t) = top {
        pairs.truncate(t);
    }
    pairs
}

/// Undirected DOT graph of the `top` heaviest class pairs (all if `None`).
pub fn overlap_to_dot(m: &OverlapMatrix, top: Option<usize>) -> String {
    let mut out = String::from("graph overlap {\n");
    for name in &m.class_names {
        writeln!(out, "  {};", quote(name)).unwrap();
    }
    for (i, j, s) in sorted_pairs(m, top) {
        writeln!(
            out,
            "  {} -- {} [weight={s:.6}, label=\"{s:.6}\"];",
            quote(&m.class_names[i]),
            quote(&m.class_names[j])
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Tab-separated `class_a class_b score` lines, heaviest first.
pub fn overlap_to_text(m: &OverlapMatrix, top: Option<usize>) -> String {
    let mut out = format!("# classes {}\n", m.class_names.len());
    for (i, j, s) in sorted_pairs(m, top) {
        writeln!(out, "{}\t{}\t{s:.6}", m.class_names[i], m.class_names[j]).unwrap();
    }
    out
}

pub fn bipartite_to_dot(b: &BipartiteConfusion) -> String {
    let mut out = String::from("graph confusion {\n");
    out.push_str("  subgraph cluster_base {\n    label=\"base\";\n");
    for n in &b.base_names {
        writeln!(out, "    {};", quote(&format!("base:{n}"))).unwrap();
    }
    out.push_str("  }\n  subgraph cluster_novel {\n    label=\"novel\";\n");
    for n in &b.novel_names {
        writeln!(out, "    {};", quote(&format!("novel:{n}"))).unwrap();
    }
    out.push_str("  }\n");
    for &(i, j, s) in &b.edges {
        writeln!(
            out,
            "  {} -- {} [weight={s:.6}, label=\"{s:.6}\"];",
            quote(&format!("base:{}", b.base_names[i])),
            quote(&format!("novel:{}", b.novel_names[j]))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Tab-separated `base novel score` lines in retained-edge order.
pub fn bipartite_to_text(b: &BipartiteConfusion) -> String {
    let mut out = format!("# base {} novel {}\n", b.base_names.len(), b.novel_names.len());
    for &(i, j, s) in &b.edges {
        writeln!(out, "{}\t{}\t{s:.6}", b.base_names[i], b.novel_names[j]).unwrap();
    }
    out
}

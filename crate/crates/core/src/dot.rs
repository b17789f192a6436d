//! Graphviz rendering of graphs and distributions.

use crate::grid::PebbleGraph;
use crate::pebble::Distribution;

/// Renders the graph in DOT, one rank per slash so the staircase shape is
/// visible. Vertices carrying pebbles are doubled-circled and labelled with
/// their count.
pub fn render(g: &PebbleGraph, dist: Option<&Distribution>) -> String {
    let mut out = String::new();
    out.push_str("graph pebbling {\n");
    out.push_str(&format!("  label=\"{}\";\n", g.graph_id()));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle, fontsize=10];\n");
    for s in 1..=g.n_slashes() {
        let members = g.slash_vertices(s);
        if members.is_empty() {
            continue;
        }
        out.push_str(&format!("  {{ rank=same; // slash {s}\n"));
        for &v in members {
            let c = g.coord(v);
            let count = dist.map(|d| d.count(v)).unwrap_or(0);
            let label = if count > 0 {
                format!("{c}\\n{count}")
            } else {
                format!("{c}")
            };
            let extra = if count > 0 { ", peripheries=2" } else { "" };
            out.push_str(&format!("    v{v} [label=\"{label}\"{extra}];\n"));
        }
        out.push_str("  }\n");
    }
    for &(u, v) in g.edges() {
        out.push_str(&format!("  v{u} -- v{v};\n"));
    }
    out.push_str("}\n");
    out
}

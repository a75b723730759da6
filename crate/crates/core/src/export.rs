//! Deterministic DOT and JSON serialization.

use std::fmt::Write;

use serde_json::Value;

use crate::contraction::ContractionGraph;
use crate::quotient::QuotientGraph;
use crate::tree::TreeTower;
use crate::universe::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Dot,
    Text,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn quotient_body(u: &Universe, q: &QuotientGraph, tree: Option<&[crate::EdgeId]>, out: &mut String) {
    for (i, w) in q.words().iter().enumerate() {
        // The `\n` is a DOT line break, so the label is not escaped again.
        let label = format!("\"{w}\\nloops: {}\"", q.loops(i).annotation());
        writeln!(out, "  {} [label={label}];", quote(&w.to_string())).unwrap();
    }
    for c in q.cross_edges() {
        let style = match tree {
            Some(t) if t.contains(&c.edge) => ", style=bold",
            Some(_) => ", style=dashed",
            None => "",
        };
        writeln!(
            out,
            "  {} -- {} [label={}{style}];",
            quote(&q.words()[c.from].to_string()),
            quote(&q.words()[c.to].to_string()),
            quote(u.edge_name(c.edge))
        )
        .unwrap();
    }
}

pub fn quotient_dot(u: &Universe, q: &QuotientGraph) -> String {
    let mut out = String::from("graph quotient {\n");
    quotient_body(u, q, None, &mut out);
    out.push_str("}\n");
    out
}

pub fn contraction_dot(u: &Universe, g: &ContractionGraph) -> String {
    let mut out = String::from("graph contraction {\n");
    for c in g.vertices() {
        let name = u.vertex_name(c.representative);
        let label = if c.live {
            format!("[{name}]\\nlive")
        } else {
            format!("[{name}]")
        };
        writeln!(out, "  {} [label={}];", quote(name), quote(&label)).unwrap();
    }
    for &(e, a, b) in g.edges() {
        writeln!(
            out,
            "  {} -- {} [label={}];",
            quote(u.vertex_name(g.vertices()[a].representative)),
            quote(u.vertex_name(g.vertices()[b].representative)),
            quote(u.edge_name(e))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// One DOT document per tower level; tree edges bold, others dashed.
pub fn tower_dots(u: &Universe, t: &TreeTower) -> Vec<String> {
    t.quotients()
        .iter()
        .zip(&t.trees)
        .enumerate()
        .map(|(j, (q, tree))| {
            let mut out = format!("graph tower_{j} {{\n");
            quotient_body(u, q, Some(tree), &mut out);
            out.push_str("}\n");
            out
        })
        .collect()
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

//! Line-oriented graph text format and DOT export.
//!
//! ```text
//! mode simple|multi|undirected
//! v <id> [label]
//! e <tail-id> <head-id> <num>/<den>
//! ```
//!
//! `#` starts a comment line. Edge ids are assigned in `e`-line order.

use std::collections::HashMap;
use std::fmt::Write;

use super::{build_graph, CostGraph, GraphError, GraphMode, GraphSpec, VertexId, VertexSpec};
use crate::cost::RationalCost;

fn parse_error(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

pub fn parse_graph_text(text: &str) -> Result<CostGraph, GraphError> {
    let mut mode = None;
    let mut vertices: Vec<VertexSpec> = Vec::new();
    let mut index: HashMap<String, VertexId> = HashMap::new();
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "mode" => {
                if mode.is_some() {
                    return Err(parse_error(line_no, "mode declared twice"));
                }
                let m = match tokens.get(1).copied() {
                    Some("simple") => GraphMode::SimpleDirected,
                    Some("multi") => GraphMode::Multigraph,
                    Some("undirected") => GraphMode::SimpleUndirected,
                    other => {
                        return Err(parse_error(
                            line_no,
                            format!("expected `mode simple|multi|undirected`, found {:?}", other.unwrap_or("")),
                        ))
                    }
                };
                if tokens.len() > 2 {
                    return Err(parse_error(line_no, "trailing tokens after mode"));
                }
                mode = Some(m);
            }
            _ if mode.is_none() => return Err(parse_error(line_no, "the first directive must be `mode`")),
            "v" => {
                let (name, label) = match tokens.len() {
                    2 => (tokens[1], None),
                    3 => (tokens[1], Some(tokens[2].to_string())),
                    _ => return Err(parse_error(line_no, "expected `v <id> [label]`")),
                };
                let id = VertexId(vertices.len());
                if index.insert(name.to_string(), id).is_some() {
                    return Err(parse_error(line_no, format!("duplicate vertex id `{name}`")));
                }
                vertices.push(VertexSpec { name: name.to_string(), label });
            }
            "e" => {
                if tokens.len() != 4 {
                    return Err(parse_error(line_no, "expected `e <tail> <head> <num>/<den>`"));
                }
                let lookup = |name: &str| {
                    index
                        .get(name)
                        .copied()
                        .ok_or_else(|| parse_error(line_no, format!("unknown vertex `{name}`")))
                };
                let cost: RationalCost = tokens[3]
                    .parse()
                    .map_err(|e| parse_error(line_no, format!("bad cost: {e}")))?;
                edges.push((lookup(tokens[1])?, lookup(tokens[2])?, cost));
            }
            other => return Err(parse_error(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let mode = mode.ok_or_else(|| parse_error(0, "missing `mode` header"))?;
    build_graph(&GraphSpec { mode, vertices, edges })
}

pub fn write_graph_text(graph: &CostGraph) -> String {
    let mut out = String::new();
    writeln!(out, "mode {}", graph.mode().keyword()).unwrap();
    for v in graph.vertices() {
        match graph.vertex_label(v) {
            Some(label) => writeln!(out, "v {} {}", graph.vertex_name(v), label).unwrap(),
            None => writeln!(out, "v {}", graph.vertex_name(v)).unwrap(),
        }
    }
    for e in graph.edges() {
        writeln!(out, "e {} {} {}", graph.vertex_name(e.tail), graph.vertex_name(e.head), e.cost).unwrap();
    }
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering; nodes show labels when present, edges show costs.
pub fn to_dot(graph: &CostGraph) -> String {
    let (kind, arrow) = if graph.is_directed() { ("digraph", "->") } else { ("graph", "--") };
    let mut out = String::new();
    writeln!(out, "{kind} G {{").unwrap();
    for v in graph.vertices() {
        let label = graph.vertex_label(v).unwrap_or_else(|| graph.vertex_name(v));
        writeln!(out, "  {} [label={}];", dot_quote(graph.vertex_name(v)), dot_quote(label)).unwrap();
    }
    for e in graph.edges() {
        writeln!(
            out,
            "  {} {arrow} {} [label={}];",
            dot_quote(graph.vertex_name(e.tail)),
            dot_quote(graph.vertex_name(e.head)),
            dot_quote(&e.cost.to_string())
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

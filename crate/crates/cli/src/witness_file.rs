//! Witness files: an optional `start <vertex>` line, one edge id per line,
//! and a trailing `# cost=<c> length=<l>` summary. Lines starting with `#`
//! are ignored when reading.

use std::fmt::Write as _;

use klncc::graph::{walk_cost, CostGraph, EdgeId, GraphError, Walk};

pub fn write_witness(graph: &CostGraph, walk: &Walk) -> Result<String, GraphError> {
    let cost = walk_cost(graph, walk)?;
    let mut out = String::new();
    if !graph.is_directed() {
        writeln!(out, "start {}", graph.vertex_name(walk.start)).unwrap();
    }
    for e in &walk.edges {
        writeln!(out, "{e}").unwrap();
    }
    writeln!(out, "# cost={cost} length={}", walk.len()).unwrap();
    Ok(out)
}

pub fn parse_witness(graph: &CostGraph, text: &str) -> Result<Walk, String> {
    let mut start = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix("start ") {
            let v = graph
                .find_vertex(name.trim())
                .ok_or_else(|| format!("line {}: unknown vertex `{}`", i + 1, name.trim()))?;
            start = Some(v);
            continue;
        }
        let id: usize = line
            .parse()
            .map_err(|_| format!("line {}: expected an edge id, found `{line}`", i + 1))?;
        edges.push(EdgeId(id));
    }
    if edges.is_empty() {
        return Err("witness has no edges".into());
    }
    match start {
        Some(s) => Ok(Walk::new(s, edges)),
        None => Walk::from_edges(graph, edges).map_err(|e| e.to_string()),
    }
}

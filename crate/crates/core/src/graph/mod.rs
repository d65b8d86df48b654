//! Costed multigraphs with unit edge lengths.
//!
//! A [`CostGraph`] is immutable once built. Edge identity is positional: the
//! `i`-th edge added gets [`EdgeId`]`(i)`, so parallel copies in a multigraph
//! remain distinguishable, which trail semantics depend on.

mod text;
mod walk;
mod witness;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::RationalCost;

pub use text::{parse_graph_text, to_dot, write_graph_text};
pub use walk::{walk_cost, Walk};
pub use witness::{
    check_fpklncct_witness, check_klncc_witness, cycles_in_trail, verify_fpklncct_witness,
    verify_klncc_witness, CycleContainment, CycleFilter, CycleWitness, TrailSemantics,
    TrailWitness, WitnessDefect, WitnessError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    /// Directed, at most one edge per ordered pair, no self-loops.
    SimpleDirected,
    /// Directed, parallel edges and self-loops allowed.
    Multigraph,
    /// Undirected, at most one edge per unordered pair, no self-loops.
    SimpleUndirected,
}

impl GraphMode {
    pub fn is_directed(self) -> bool {
        !matches!(self, GraphMode::SimpleUndirected)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            GraphMode::SimpleDirected => "simple",
            GraphMode::Multigraph => "multi",
            GraphMode::SimpleUndirected => "undirected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: RationalCost,
}

impl Edge {
    /// Every edge has unit length.
    pub const LENGTH: usize = 1;

    /// The endpoint reached when traversing this edge from `from`, honouring
    /// direction only when `directed` is set.
    pub fn traverse_from(&self, from: VertexId, directed: bool) -> Option<VertexId> {
        if self.tail == from {
            Some(self.head)
        } else if !directed && self.head == from {
            Some(self.tail)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("simple graph already has an edge {tail} -> {head}")]
    DuplicateEdgeInSimpleMode { tail: VertexId, head: VertexId },
    #[error("self-loop at {0} is not allowed in a simple graph")]
    SelfLoopInSimpleMode(VertexId),
    #[error("edge endpoint {0} does not exist")]
    DanglingEndpoint(VertexId),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexName(String),
    #[error("edge {0} is not in the graph")]
    EdgeNotInGraph(EdgeId),
    #[error("vertex {0} is not in the graph")]
    VertexNotInGraph(VertexId),
    #[error("walk is disconnected at step {position}")]
    DisconnectedWalk { position: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub name: String,
    pub label: Option<String>,
}

/// Declarative description of a graph; [`build_graph`] validates it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub mode: GraphMode,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<(VertexId, VertexId, RationalCost)>,
}

pub fn build_graph(spec: &GraphSpec) -> Result<CostGraph, GraphError> {
    let mut builder = GraphBuilder::new(spec.mode);
    for v in &spec.vertices {
        builder.add_named_vertex(v.name.clone(), v.label.clone())?;
    }
    for &(tail, head, cost) in &spec.edges {
        builder.add_edge(tail, head, cost)?;
    }
    Ok(builder.build())
}

/// Incremental construction that rejects mode violations as they happen.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    mode: GraphMode,
    vertices: Vec<VertexSpec>,
    names: HashSet<String>,
    edges: Vec<Edge>,
    pairs: HashSet<(VertexId, VertexId)>,
}

impl GraphBuilder {
    pub fn new(mode: GraphMode) -> Self {
        Self {
            mode,
            vertices: Vec::new(),
            names: HashSet::new(),
            edges: Vec::new(),
            pairs: HashSet::new(),
        }
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    /// Adds a vertex named after its index.
    pub fn add_vertex(&mut self, label: Option<&str>) -> VertexId {
        let mut name = self.vertices.len().to_string();
        while self.names.contains(&name) {
            name.push('\'');
        }
        self.add_named_vertex(name, label.map(str::to_string))
            .expect("generated names are unique")
    }

    pub fn add_named_vertex(&mut self, name: String, label: Option<String>) -> Result<VertexId, GraphError> {
        if !self.names.insert(name.clone()) {
            return Err(GraphError::DuplicateVertexName(name));
        }
        self.vertices.push(VertexSpec { name, label });
        Ok(VertexId(self.vertices.len() - 1))
    }

    pub fn add_edge(&mut self, tail: VertexId, head: VertexId, cost: RationalCost) -> Result<EdgeId, GraphError> {
        for v in [tail, head] {
            if v.0 >= self.vertices.len() {
                return Err(GraphError::DanglingEndpoint(v));
            }
        }
        match self.mode {
            GraphMode::Multigraph => {}
            GraphMode::SimpleDirected | GraphMode::SimpleUndirected => {
                if tail == head {
                    return Err(GraphError::SelfLoopInSimpleMode(tail));
                }
                let key = if self.mode == GraphMode::SimpleUndirected && head < tail {
                    (head, tail)
                } else {
                    (tail, head)
                };
                if !self.pairs.insert(key) {
                    return Err(GraphError::DuplicateEdgeInSimpleMode { tail, head });
                }
            }
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge { id, tail, head, cost });
        Ok(id)
    }

    pub fn build(self) -> CostGraph {
        CostGraph::assemble(self.mode, self.vertices, self.edges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostGraph {
    mode: GraphMode,
    vertices: Vec<VertexSpec>,
    edges: Vec<Edge>,
    // (edge, far endpoint) per vertex; undirected edges appear at both ends.
    forward: Vec<Vec<(EdgeId, VertexId)>>,
    backward: Vec<Vec<(EdgeId, VertexId)>>,
}

impl CostGraph {
    fn assemble(mode: GraphMode, vertices: Vec<VertexSpec>, edges: Vec<Edge>) -> Self {
        let n = vertices.len();
        let mut forward = vec![Vec::new(); n];
        let mut backward = vec![Vec::new(); n];
        for e in &edges {
            forward[e.tail.0].push((e.id, e.head));
            backward[e.head.0].push((e.id, e.tail));
            if !mode.is_directed() {
                forward[e.head.0].push((e.id, e.tail));
                backward[e.tail.0].push((e.id, e.head));
            }
        }
        Self { mode, vertices, edges, forward, backward }
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn is_directed(&self) -> bool {
        self.mode.is_directed()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(id.0).ok_or(GraphError::EdgeNotInGraph(id))
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.0 < self.vertices.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0].name
    }

    pub fn vertex_label(&self, v: VertexId) -> Option<&str> {
        self.vertices[v.0].label.as_deref()
    }

    /// Resolves a vertex by its id token, falling back to its label.
    pub fn find_vertex(&self, token: &str) -> Option<VertexId> {
        self.vertices
            .iter()
            .position(|v| v.name == token)
            .or_else(|| self.vertices.iter().position(|v| v.label.as_deref() == Some(token)))
            .map(VertexId)
    }

    /// Edges leaving `v` (both orientations for undirected graphs), paired
    /// with the vertex they lead to.
    pub fn successors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.forward[v.0]
    }

    /// Edges entering `v`, paired with the vertex they come from.
    pub fn predecessors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.backward[v.0]
    }

    pub fn spec(&self) -> GraphSpec {
        GraphSpec {
            mode: self.mode,
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| (e.tail, e.head, e.cost)).collect(),
        }
    }

    /// Copy of the graph with one edge's cost replaced; ids are unchanged.
    pub fn with_edge_cost(&self, id: EdgeId, cost: RationalCost) -> Result<CostGraph, GraphError> {
        self.edge(id)?;
        let mut edges = self.edges.clone();
        edges[id.0].cost = cost;
        Ok(Self::assemble(self.mode, self.vertices.clone(), edges))
    }

    /// Copy of the graph with every cost rewritten by `f`.
    pub fn map_costs(&self, mut f: impl FnMut(&Edge) -> RationalCost) -> CostGraph {
        let edges = self.edges.iter().map(|e| Edge { cost: f(e), ..e.clone() }).collect();
        Self::assemble(self.mode, self.vertices.clone(), edges)
    }

    /// Copy of the graph without edge `id`; later edge ids shift down by one.
    pub fn without_edge(&self, id: EdgeId) -> Result<CostGraph, GraphError> {
        self.edge(id)?;
        let edges = self
            .edges
            .iter()
            .filter(|e| e.id != id)
            .enumerate()
            .map(|(i, e)| Edge { id: EdgeId(i), ..e.clone() })
            .collect();
        Ok(Self::assemble(self.mode, self.vertices.clone(), edges))
    }
}

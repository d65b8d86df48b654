use serde::{Deserialize, Serialize};

use super::{CostGraph, EdgeId, GraphError, VertexId};
use crate::cost::RationalCost;

/// An edge sequence anchored at a start vertex.
///
/// The start vertex fixes traversal direction in undirected graphs; in
/// directed graphs it must equal the tail of the first edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Walk {
    pub start: VertexId,
    pub edges: Vec<EdgeId>,
}

impl Walk {
    pub fn new(start: VertexId, edges: Vec<EdgeId>) -> Self {
        Self { start, edges }
    }

    pub fn empty(start: VertexId) -> Self {
        Self { start, edges: Vec::new() }
    }

    /// Infers the start vertex from the first edge. For undirected graphs
    /// both endpoints are tried, tail first.
    pub fn from_edges(graph: &CostGraph, edges: Vec<EdgeId>) -> Result<Self, GraphError> {
        let first = *edges.first().ok_or(GraphError::DisconnectedWalk { position: 0 })?;
        let e = graph.edge(first)?;
        let walk = Self::new(e.tail, edges);
        if graph.is_directed() || walk.vertices(graph).is_ok() {
            return Ok(walk);
        }
        let walk = Self::new(e.head, walk.edges);
        walk.vertices(graph)?;
        Ok(walk)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Visited vertex sequence, `len() + 1` entries long.
    pub fn vertices(&self, graph: &CostGraph) -> Result<Vec<VertexId>, GraphError> {
        if !graph.contains_vertex(self.start) {
            return Err(GraphError::VertexNotInGraph(self.start));
        }
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut cur = self.start;
        out.push(cur);
        for (position, &id) in self.edges.iter().enumerate() {
            cur = graph
                .edge(id)?
                .traverse_from(cur, graph.is_directed())
                .ok_or(GraphError::DisconnectedWalk { position })?;
            out.push(cur);
        }
        Ok(out)
    }
}

/// Exact cost of a connected walk.
pub fn walk_cost(graph: &CostGraph, walk: &Walk) -> Result<RationalCost, GraphError> {
    walk.vertices(graph)?;
    Ok(walk.edges.iter().map(|&e| graph.edges()[e.0].cost).sum())
}

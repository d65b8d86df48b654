//! Certificates for the two decision problems and their checkers.
//!
//! A cycle certificate is a simple cycle of length at least `k` with negative
//! total cost. A trail certificate is a closed trail through a fixed point
//! with negative cost in which every cycle it contains is at least `k` long.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{walk::Walk, CostGraph, EdgeId, GraphError, VertexId};
use crate::cost::RationalCost;

/// Which sub-structures of a trail count as "cycles contained in it".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleContainment {
    /// Any simple cycle formed by a subset of the trail's edges, wherever
    /// those edges sit in the sequence.
    #[default]
    EdgeSubset,
    /// Only closed runs of consecutive trail edges with distinct interior
    /// vertices.
    Contiguous,
}

/// Which contained cycles the length bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleFilter {
    #[default]
    All,
    NegativeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrailSemantics {
    pub containment: CycleContainment,
    pub filter: CycleFilter,
    /// Whether the trail must end where it starts.
    pub require_closed: bool,
}

impl Default for TrailSemantics {
    fn default() -> Self {
        Self {
            containment: CycleContainment::EdgeSubset,
            filter: CycleFilter::All,
            require_closed: true,
        }
    }
}

impl TrailSemantics {
    pub fn counts(&self, cost: RationalCost) -> bool {
        match self.filter {
            CycleFilter::All => true,
            CycleFilter::NegativeOnly => cost.is_negative(),
        }
    }
}

/// Why a walk was rejected as a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessDefect {
    #[error("walk is empty")]
    Empty,
    #[error("walk is disconnected at step {position}")]
    Disconnected { position: usize },
    #[error("edge {0} is used twice")]
    RepeatedEdge(EdgeId),
    #[error("vertex {0} is visited twice")]
    RepeatedVertex(VertexId),
    #[error("walk does not return to its start")]
    NotClosed,
    #[error("cycle length {length} is below k = {k}")]
    TooShort { length: usize, k: usize },
    #[error("cost not negative ({0})")]
    CostNotNegative(RationalCost),
    #[error("trail does not visit the fixed point {0}")]
    MissesFixedPoint(VertexId),
    #[error("trail contains a cycle of length {length} below k = {k}")]
    ShortCycle { length: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Defect(#[from] WitnessDefect),
}

fn resolve(graph: &CostGraph, walk: &Walk) -> Result<Vec<VertexId>, WitnessError> {
    walk.vertices(graph).map_err(|e| match e {
        GraphError::DisconnectedWalk { position } => WitnessDefect::Disconnected { position }.into(),
        other => other.into(),
    })
}

fn first_repeated_edge(edges: &[EdgeId]) -> Option<EdgeId> {
    let mut seen = HashSet::with_capacity(edges.len());
    edges.iter().copied().find(|e| !seen.insert(*e))
}

/// A simple cycle: closed, no repeated edge, no repeated interior vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    walk: Walk,
    vertices: Vec<VertexId>,
    cost: RationalCost,
}

impl CycleWitness {
    pub fn new(graph: &CostGraph, walk: Walk) -> Result<Self, WitnessError> {
        let vertices = resolve(graph, &walk)?;
        if walk.is_empty() {
            return Err(WitnessDefect::Empty.into());
        }
        if vertices.first() != vertices.last() {
            return Err(WitnessDefect::NotClosed.into());
        }
        if let Some(e) = first_repeated_edge(&walk.edges) {
            return Err(WitnessDefect::RepeatedEdge(e).into());
        }
        let mut seen = HashSet::with_capacity(vertices.len());
        if let Some(&v) = vertices[..vertices.len() - 1].iter().find(|v| !seen.insert(**v)) {
            return Err(WitnessDefect::RepeatedVertex(v).into());
        }
        let cost = walk.edges.iter().map(|e| graph.edges()[e.0].cost).sum();
        Ok(Self { walk, vertices, cost })
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn into_walk(self) -> Walk {
        self.walk
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.walk.edges
    }

    /// Closed vertex sequence; first and last entries coincide.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn cost(&self) -> RationalCost {
        self.cost
    }
}

/// A walk that never reuses an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrailWitness {
    walk: Walk,
    vertices: Vec<VertexId>,
    cost: RationalCost,
}

impl TrailWitness {
    pub fn new(graph: &CostGraph, walk: Walk) -> Result<Self, WitnessError> {
        let vertices = resolve(graph, &walk)?;
        if let Some(e) = first_repeated_edge(&walk.edges) {
            return Err(WitnessDefect::RepeatedEdge(e).into());
        }
        let cost = walk.edges.iter().map(|e| graph.edges()[e.0].cost).sum();
        Ok(Self { walk, vertices, cost })
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn into_walk(self) -> Walk {
        self.walk
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.walk.edges
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        !self.walk.is_empty() && self.vertices.first() == self.vertices.last()
    }

    pub fn cost(&self) -> RationalCost {
        self.cost
    }
}

impl fmt::Display for CycleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(ToString::to_string).collect();
        write!(f, "{} (cost {}, length {})", vs.join("->"), self.cost, self.len())
    }
}

/// Cycles contained in a trail, under the given containment reading.
///
/// With [`CycleContainment::EdgeSubset`] every simple cycle of the subgraph
/// spanned by the trail's edges is reported once. With
/// [`CycleContainment::Contiguous`] each closed run of consecutive edges with
/// distinct interior vertices is reported once per occurrence.
pub fn cycles_in_trail(graph: &CostGraph, trail: &TrailWitness, containment: CycleContainment) -> Vec<CycleWitness> {
    let walks = match containment {
        CycleContainment::Contiguous => contiguous_cycles(trail),
        CycleContainment::EdgeSubset => subset_cycles(graph, trail.edges()),
    };
    walks
        .into_iter()
        .map(|w| CycleWitness::new(graph, w).expect("enumerated cycles are simple"))
        .collect()
}

fn contiguous_cycles(trail: &TrailWitness) -> Vec<Walk> {
    let vs = trail.vertices();
    let mut out = Vec::new();
    for end in 1..vs.len() {
        let mut seen = HashSet::new();
        for start in (0..end).rev() {
            if vs[start] == vs[end] {
                out.push(Walk::new(vs[start], trail.edges()[start..end].to_vec()));
                break;
            }
            if !seen.insert(vs[start]) {
                break;
            }
        }
    }
    out
}

fn subset_cycles(graph: &CostGraph, edges: &[EdgeId]) -> Vec<Walk> {
    let in_trail: HashSet<EdgeId> = edges.iter().copied().collect();
    let vertices: BTreeSet<VertexId> = edges
        .iter()
        .flat_map(|&e| {
            let e = &graph.edges()[e.0];
            [e.tail, e.head]
        })
        .collect();
    let directed = graph.is_directed();
    let mut out = Vec::new();
    for &root in &vertices {
        let mut path = Vec::new();
        let mut on_path = HashSet::new();
        on_path.insert(root);
        subset_dfs(graph, &in_trail, directed, root, root, &mut path, &mut on_path, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn subset_dfs(
    graph: &CostGraph,
    in_trail: &HashSet<EdgeId>,
    directed: bool,
    root: VertexId,
    cur: VertexId,
    path: &mut Vec<EdgeId>,
    on_path: &mut HashSet<VertexId>,
    out: &mut Vec<Walk>,
) {
    for &(e, next) in graph.successors(cur) {
        if !in_trail.contains(&e) || path.contains(&e) {
            continue;
        }
        if next == root {
            // undirected cycles show up once per orientation; keep one
            if !directed && path.first().is_some_and(|&first| first > e) {
                continue;
            }
            let mut cycle = path.clone();
            cycle.push(e);
            out.push(Walk::new(root, cycle));
        } else if next > root && !on_path.contains(&next) {
            path.push(e);
            on_path.insert(next);
            subset_dfs(graph, in_trail, directed, root, next, path, on_path, out);
            on_path.remove(&next);
            path.pop();
        }
    }
}

/// Full check of a cycle certificate; returns the validated cycle.
pub fn check_klncc_witness(graph: &CostGraph, walk: &Walk, k: usize) -> Result<CycleWitness, WitnessError> {
    if k < 2 {
        return Err(GraphError::InvalidK(k).into());
    }
    let cycle = CycleWitness::new(graph, walk.clone())?;
    if cycle.len() < k {
        return Err(WitnessDefect::TooShort { length: cycle.len(), k }.into());
    }
    if !cycle.cost().is_negative() {
        return Err(WitnessDefect::CostNotNegative(cycle.cost()).into());
    }
    Ok(cycle)
}

/// True iff `walk` is a simple cycle of `graph` with length `>= k` and
/// negative cost. Only malformed references (unknown edges or vertices, bad
/// `k`) are errors.
pub fn verify_klncc_witness(graph: &CostGraph, walk: &Walk, k: usize) -> Result<bool, GraphError> {
    match check_klncc_witness(graph, walk, k) {
        Ok(_) => Ok(true),
        Err(WitnessError::Defect(_)) => Ok(false),
        Err(WitnessError::Graph(e)) => Err(e),
    }
}

/// Full check of a fixed-point trail certificate.
pub fn check_fpklncct_witness(
    graph: &CostGraph,
    walk: &Walk,
    fixed_point: VertexId,
    k: usize,
    semantics: &TrailSemantics,
) -> Result<TrailWitness, WitnessError> {
    if k < 2 {
        return Err(GraphError::InvalidK(k).into());
    }
    if !graph.contains_vertex(fixed_point) {
        return Err(GraphError::VertexNotInGraph(fixed_point).into());
    }
    let trail = TrailWitness::new(graph, walk.clone())?;
    if semantics.require_closed && !trail.is_closed() {
        return Err(WitnessDefect::NotClosed.into());
    }
    if !trail.vertices().contains(&fixed_point) {
        return Err(WitnessDefect::MissesFixedPoint(fixed_point).into());
    }
    if !trail.cost().is_negative() {
        return Err(WitnessDefect::CostNotNegative(trail.cost()).into());
    }
    let short = cycles_in_trail(graph, &trail, semantics.containment)
        .into_iter()
        .find(|c| c.len() < k && semantics.counts(c.cost()));
    if let Some(c) = short {
        return Err(WitnessDefect::ShortCycle { length: c.len(), k }.into());
    }
    Ok(trail)
}

pub fn verify_fpklncct_witness(
    graph: &CostGraph,
    walk: &Walk,
    fixed_point: VertexId,
    k: usize,
    semantics: &TrailSemantics,
) -> Result<bool, GraphError> {
    match check_fpklncct_witness(graph, walk, fixed_point, k, semantics) {
        Ok(_) => Ok(true),
        Err(WitnessError::Defect(_)) => Ok(false),
        Err(WitnessError::Graph(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, GraphMode};

    fn q(n: i128) -> RationalCost {
        RationalCost::integer(n)
    }

    fn graph(mode: GraphMode, n: usize, edges: &[(usize, usize, i128)]) -> CostGraph {
        let mut b = GraphBuilder::new(mode);
        for _ in 0..n {
            b.add_vertex(None);
        }
        for &(t, h, c) in edges {
            b.add_edge(VertexId(t), VertexId(h), q(c)).unwrap();
        }
        b.build()
    }

    fn walk(g: &CostGraph, ids: &[usize]) -> Walk {
        Walk::from_edges(g, ids.iter().map(|&i| EdgeId(i)).collect()).unwrap()
    }

    fn trail(g: &CostGraph, ids: &[usize]) -> TrailWitness {
        TrailWitness::new(g, walk(g, ids)).unwrap()
    }

    #[test]
    fn simple_path_contains_no_cycle() {
        let g = graph(GraphMode::SimpleDirected, 4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let t = trail(&g, &[0, 1, 2]);
        for c in [CycleContainment::EdgeSubset, CycleContainment::Contiguous] {
            assert!(cycles_in_trail(&g, &t, c).is_empty());
        }
    }

    #[test]
    fn back_and_forth_is_a_two_cycle() {
        let g = graph(GraphMode::SimpleDirected, 2, &[(0, 1, -1), (1, 0, 0)]);
        let t = trail(&g, &[0, 1]);
        for c in [CycleContainment::EdgeSubset, CycleContainment::Contiguous] {
            let cycles = cycles_in_trail(&g, &t, c);
            assert_eq!(cycles.len(), 1);
            assert_eq!(cycles[0].len(), 2);
        }
    }

    #[test]
    fn triangle_then_exit() {
        // a -> b -> c -> a -> d
        let g = graph(GraphMode::SimpleDirected, 4, &[(0, 1, 0), (1, 2, 0), (2, 0, 0), (0, 3, 0)]);
        let t = trail(&g, &[0, 1, 2, 3]);
        for c in [CycleContainment::EdgeSubset, CycleContainment::Contiguous] {
            let cycles = cycles_in_trail(&g, &t, c);
            assert_eq!(cycles.len(), 1);
            assert_eq!(cycles[0].vertices(), &[VertexId(0), VertexId(1), VertexId(2), VertexId(0)]);
        }
    }

    #[test]
    fn readings_differ_on_separated_opposite_edges() {
        // trail 0 1 2 1 0
        let g = graph(GraphMode::SimpleDirected, 3, &[(0, 1, 0), (1, 2, 0), (2, 1, 0), (1, 0, 0)]);
        let t = trail(&g, &[0, 1, 2, 3]);
        let contiguous = cycles_in_trail(&g, &t, CycleContainment::Contiguous);
        let subset = cycles_in_trail(&g, &t, CycleContainment::EdgeSubset);
        // contiguous: 1-2-1 at positions 1..3; 0..4 has repeated interior vertex 1
        assert_eq!(contiguous.len(), 1);
        assert_eq!(subset.len(), 2);
        assert!(subset.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn simple_cycle_contains_exactly_itself() {
        let g = graph(GraphMode::SimpleDirected, 4, &[(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 0, 0)]);
        let t = trail(&g, &[0, 1, 2, 3]);
        for c in [CycleContainment::EdgeSubset, CycleContainment::Contiguous] {
            let cycles = cycles_in_trail(&g, &t, c);
            assert_eq!(cycles.len(), 1);
            assert_eq!(cycles[0].edges(), t.edges());
        }
    }

    #[test]
    fn undirected_cycle_reported_once() {
        let g = graph(GraphMode::SimpleUndirected, 4, &[(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 0, 0)]);
        let t = trail(&g, &[0, 1, 2, 3]);
        assert_eq!(cycles_in_trail(&g, &t, CycleContainment::EdgeSubset).len(), 1);
    }

    #[test]
    fn parallel_copies_form_distinct_cycles() {
        let g = graph(GraphMode::Multigraph, 2, &[(0, 1, -1), (0, 1, -1), (1, 0, 0)]);
        let t = trail(&g, &[0, 2, 1]);
        // {e0,e2} and {e1,e2}
        assert_eq!(cycles_in_trail(&g, &t, CycleContainment::EdgeSubset).len(), 2);
    }

    #[test]
    fn klncc_verification() {
        let tri = graph(GraphMode::SimpleDirected, 3, &[(0, 1, -1), (1, 2, 0), (2, 0, 0)]);
        let w = walk(&tri, &[0, 1, 2]);
        assert!(verify_klncc_witness(&tri, &w, 3).unwrap());
        assert!(!verify_klncc_witness(&tri, &w, 4).unwrap());
        assert_eq!(
            check_klncc_witness(&tri, &w, 4).unwrap_err(),
            WitnessError::Defect(WitnessDefect::TooShort { length: 3, k: 4 })
        );

        let two = graph(GraphMode::SimpleDirected, 2, &[(0, 1, -1), (1, 0, 0)]);
        let w = walk(&two, &[0, 1]);
        assert!(verify_klncc_witness(&two, &w, 2).unwrap());
        assert!(!verify_klncc_witness(&two, &w, 3).unwrap());

        let bad = Walk::new(VertexId(0), vec![EdgeId(0), EdgeId(9)]);
        assert_eq!(verify_klncc_witness(&two, &bad, 2), Err(GraphError::EdgeNotInGraph(EdgeId(9))));
        assert_eq!(verify_klncc_witness(&two, &w, 1), Err(GraphError::InvalidK(1)));
    }

    #[test]
    fn klncc_rejects_non_simple_and_non_negative() {
        // figure eight through vertex 0
        let g = graph(GraphMode::SimpleDirected, 3, &[(0, 1, -1), (1, 0, -1), (0, 2, -1), (2, 0, -1)]);
        let w = walk(&g, &[0, 1, 2, 3]);
        assert_eq!(
            check_klncc_witness(&g, &w, 2).unwrap_err(),
            WitnessError::Defect(WitnessDefect::RepeatedVertex(VertexId(0)))
        );
        let z = graph(GraphMode::SimpleDirected, 3, &[(0, 1, 1), (1, 2, 0), (2, 0, -1)]);
        let err = check_klncc_witness(&z, &walk(&z, &[0, 1, 2]), 3).unwrap_err();
        assert_eq!(err.to_string(), "cost not negative (0/1)");
        let open = walk(&z, &[0, 1]);
        assert!(!verify_klncc_witness(&z, &open, 2).unwrap());
    }

    #[test]
    fn fixed_point_trail_verification() {
        // two triangles sharing vertex 0: 0 1 2 0 3 4 0, costs sum -1
        let g = graph(
            GraphMode::SimpleDirected,
            5,
            &[(0, 1, -1), (1, 2, 0), (2, 0, 0), (0, 3, 0), (3, 4, 0), (4, 0, 0)],
        );
        let sem = TrailSemantics::default();
        let w = walk(&g, &[0, 1, 2, 3, 4, 5]);
        assert!(verify_fpklncct_witness(&g, &w, VertexId(0), 3, &sem).unwrap());
        assert!(verify_fpklncct_witness(&g, &w, VertexId(4), 3, &sem).unwrap());
        assert!(!verify_fpklncct_witness(&g, &w, VertexId(0), 4, &sem).unwrap());

        // the second triangle alone does not visit vertex 1
        let w2 = walk(&g, &[3, 4, 5]);
        assert_eq!(
            check_fpklncct_witness(&g, &w2, VertexId(1), 3, &sem).unwrap_err(),
            WitnessError::Defect(WitnessDefect::MissesFixedPoint(VertexId(1)))
        );
        assert_eq!(
            verify_fpklncct_witness(&g, &w2, VertexId(9), 3, &sem),
            Err(GraphError::VertexNotInGraph(VertexId(9)))
        );
    }

    #[test]
    fn fixed_point_trail_rejects_embedded_two_cycle() {
        // closed trail 0 1 2 1 0
        let g = graph(GraphMode::SimpleDirected, 3, &[(0, 1, -1), (1, 2, 0), (2, 1, 0), (1, 0, 0)]);
        let w = walk(&g, &[0, 1, 2, 3]);
        let sem = TrailSemantics::default();
        assert_eq!(
            check_fpklncct_witness(&g, &w, VertexId(0), 3, &sem).unwrap_err(),
            WitnessError::Defect(WitnessDefect::ShortCycle { length: 2, k: 3 })
        );
        // the 1-2-1 cycle has cost 0, so filtering to negative cycles still
        // sees 0-1-0 (cost -1) of length 2
        let neg = TrailSemantics { filter: CycleFilter::NegativeOnly, ..sem };
        assert!(!verify_fpklncct_witness(&g, &w, VertexId(0), 3, &neg).unwrap());
    }

    #[test]
    fn open_trails_need_explicit_opt_in() {
        let g = graph(GraphMode::SimpleDirected, 3, &[(0, 1, -1), (1, 2, 0)]);
        let w = walk(&g, &[0, 1]);
        let closed = TrailSemantics::default();
        assert_eq!(
            check_fpklncct_witness(&g, &w, VertexId(0), 3, &closed).unwrap_err(),
            WitnessError::Defect(WitnessDefect::NotClosed)
        );
        let open = TrailSemantics { require_closed: false, ..closed };
        assert!(verify_fpklncct_witness(&g, &w, VertexId(0), 3, &open).unwrap());
    }
}

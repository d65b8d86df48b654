//! Exact, budgeted decision procedures.
//!
//! All searches run on integer costs: every rational cost is multiplied by
//! the least common multiple of the denominators, which preserves signs and
//! order. A search that runs out of budget reports
//! [`Detection::BudgetExceeded`], never [`Detection::NotFound`].

use std::collections::HashSet;

use num_integer::Integer;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::cost::RationalCost;
use crate::graph::{
    check_fpklncct_witness, check_klncc_witness, CostGraph, CycleContainment, CycleWitness, EdgeId, GraphError,
    TrailSemantics, TrailWitness, VertexId, Walk,
};

/// Limits for exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchBudget {
    max_expansions: u64,
    max_length: usize,
}

impl SearchBudget {
    pub const DEFAULT_EXPANSIONS: u64 = 50_000_000;

    /// Both limits must be positive.
    pub fn new(max_expansions: u64, max_length: usize) -> Result<Self, DetectorError> {
        if max_expansions == 0 || max_length == 0 {
            return Err(DetectorError::InvalidBudget);
        }
        Ok(Self { max_expansions, max_length })
    }

    /// Expansion limit only; cycle and trail length are unbounded.
    pub fn expansions(max_expansions: u64) -> Result<Self, DetectorError> {
        Self::new(max_expansions, usize::MAX)
    }

    pub fn max_expansions(&self) -> u64 {
        self.max_expansions
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    /// The same budget with the expansion limit multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            max_expansions: self.max_expansions.saturating_mul(factor.max(1)),
            max_length: self.max_length,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_expansions: Self::DEFAULT_EXPANSIONS, max_length: usize::MAX }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detection<W> {
    Found(W),
    /// The search space was exhausted within budget.
    NotFound,
    /// A limit was hit before the search finished; `expansions` is the
    /// number of search nodes expanded so far.
    BudgetExceeded { expansions: u64 },
}

impl<W> Detection<W> {
    pub fn is_found(&self) -> bool {
        matches!(self, Detection::Found(_))
    }

    pub fn is_budget_exceeded(&self) -> bool {
        matches!(self, Detection::BudgetExceeded { .. })
    }

    pub fn found(&self) -> Option<&W> {
        match self {
            Detection::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn into_found(self) -> Option<W> {
        match self {
            Detection::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(W) -> U) -> Detection<U> {
        match self {
            Detection::Found(w) => Detection::Found(f(w)),
            Detection::NotFound => Detection::NotFound,
            Detection::BudgetExceeded { expansions } => Detection::BudgetExceeded { expansions },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectorError {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("budget limits must be positive")]
    InvalidBudget,
    #[error("this detector needs a directed graph")]
    NotDirected,
    #[error("edge costs overflow 128-bit integers after scaling to a common denominator")]
    CostOverflow,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Integer costs with the same signs and order as the rational ones.
fn scaled_costs(graph: &CostGraph) -> Result<Vec<i128>, DetectorError> {
    let mut lcm: i128 = 1;
    for e in graph.edges() {
        let d = e.cost.denominator();
        lcm = lcm.checked_mul(d / lcm.gcd(&d)).ok_or(DetectorError::CostOverflow)?;
    }
    let costs = graph
        .edges()
        .iter()
        .map(|e| e.cost.numerator().checked_mul(lcm / e.cost.denominator()))
        .collect::<Option<Vec<_>>>()
        .ok_or(DetectorError::CostOverflow)?;
    // every partial sum of a walk without repeated edges stays in range
    costs
        .iter()
        .try_fold(0i128, |acc, c| acc.checked_add(c.checked_abs()?))
        .ok_or(DetectorError::CostOverflow)?;
    Ok(costs)
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    edge: usize,
    head: usize,
    cost: i128,
}

/// Outgoing arcs per vertex; undirected edges appear in both directions.
fn arc_lists(graph: &CostGraph, costs: &[i128]) -> Vec<Vec<Arc>> {
    graph
        .vertices()
        .map(|v| {
            graph
                .successors(v)
                .iter()
                .map(|&(e, h)| Arc { edge: e.0, head: h.0, cost: costs[e.0] })
                .collect()
        })
        .collect()
}

struct BudgetHit;

struct Counter {
    used: u64,
    budget: SearchBudget,
}

impl Counter {
    fn new(budget: SearchBudget) -> Self {
        Self { used: 0, budget }
    }

    fn expand(&mut self, new_length: usize) -> Result<(), BudgetHit> {
        self.used += 1;
        if self.used > self.budget.max_expansions || new_length > self.budget.max_length {
            return Err(BudgetHit);
        }
        Ok(())
    }
}

/// Negative cycle of length at least 2 by Bellman-Ford relaxation from a
/// virtual source, or `None`. Self-loops are ignored.
pub fn bellman_ford_negative_cycle(graph: &CostGraph) -> Result<Option<CycleWitness>, DetectorError> {
    if !graph.is_directed() {
        return Err(DetectorError::NotDirected);
    }
    let costs = scaled_costs(graph)?;
    let n = graph.vertex_count();
    let mut dist = vec![0i128; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let edges: Vec<_> = graph.edges().iter().filter(|e| e.tail != e.head).collect();

    let mut last_relaxed = None;
    for _ in 0..n {
        last_relaxed = None;
        for e in &edges {
            let candidate = dist[e.tail.0] + costs[e.id.0];
            if candidate < dist[e.head.0] {
                dist[e.head.0] = candidate;
                pred[e.head.0] = Some(e.id.0);
                last_relaxed = Some(e.head.0);
            }
        }
        if last_relaxed.is_none() {
            return Ok(None);
        }
    }
    let Some(mut v) = last_relaxed else { return Ok(None) };
    // n steps back along predecessors lands on the cycle
    for _ in 0..n {
        v = graph.edges()[pred[v].expect("relaxed vertices have predecessors")].tail.0;
    }
    let mut cycle = Vec::new();
    let mut cur = v;
    loop {
        let e = pred[cur].expect("cycle vertices have predecessors");
        cycle.push(EdgeId(e));
        cur = graph.edges()[e].tail.0;
        if cur == v {
            break;
        }
    }
    cycle.reverse();
    let witness = check_klncc_witness(graph, &Walk::new(VertexId(v), cycle), 2)
        .expect("predecessor cycles after n rounds are simple and negative");
    Ok(Some(witness))
}

/// Component of `root` in the subgraph induced by vertices `>= root`.
fn component_at_or_above(arcs: &[Vec<Arc>], root: usize) -> Vec<bool> {
    let n = arcs.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n - root, 0);
    for _ in root..n {
        g.add_node(());
    }
    for (v, out) in arcs.iter().enumerate().skip(root) {
        for a in out {
            if a.head >= root && a.head != v {
                g.add_edge(NodeIndex::new(v - root), NodeIndex::new(a.head - root), ());
            }
        }
    }
    let mut in_comp = vec![false; n];
    for scc in tarjan_scc(&g) {
        if scc.iter().any(|ix| ix.index() == 0) {
            for ix in scc {
                in_comp[ix.index() + root] = true;
            }
        }
    }
    in_comp
}

struct CycleSearch<'a> {
    arcs: &'a [Vec<Arc>],
    directed: bool,
    k: usize,
    root: usize,
    in_comp: Vec<bool>,
    on_path: Vec<bool>,
    /// Cheapest arc entering each vertex within the component, capped at 0.
    neg_in: Vec<i128>,
    path: Vec<usize>,
    counter: &'a mut Counter,
}

impl CycleSearch<'_> {
    /// `unvisited_bound` sums `neg_in` over component vertices not yet on
    /// the path (excluding the root).
    fn dfs(&mut self, cur: usize, cost: i128, unvisited_bound: i128) -> Result<bool, BudgetHit> {
        let closing_bound = self.neg_in[self.root];
        for i in 0..self.arcs[cur].len() {
            let a = self.arcs[cur][i];
            if !self.in_comp[a.head] || a.head == cur {
                continue;
            }
            let len = self.path.len() + 1;
            if a.head == self.root {
                if len >= self.k
                    && cost + a.cost < 0
                    // undirected: no edge twice, and each cycle in one orientation
                    && (self.directed || self.path.first().is_some_and(|&f| f < a.edge))
                {
                    self.path.push(a.edge);
                    return Ok(true);
                }
                continue;
            }
            if self.on_path[a.head] {
                continue;
            }
            let bound = unvisited_bound - self.neg_in[a.head];
            if cost + a.cost + bound + closing_bound >= 0 {
                continue;
            }
            self.counter.expand(len + 1)?;
            self.on_path[a.head] = true;
            self.path.push(a.edge);
            if self.dfs(a.head, cost + a.cost, bound)? {
                return Ok(true);
            }
            self.path.pop();
            self.on_path[a.head] = false;
        }
        Ok(false)
    }
}

fn search_cycle(graph: &CostGraph, costs: &[i128], k: usize, budget: SearchBudget) -> Detection<Walk> {
    let arcs = arc_lists(graph, costs);
    let n = arcs.len();
    let mut counter = Counter::new(budget);
    for root in 0..n {
        let in_comp = component_at_or_above(&arcs, root);
        let size = in_comp.iter().filter(|&&b| b).count();
        if size < k.max(if graph.is_directed() { 2 } else { 3 }) {
            continue;
        }
        let mut neg_in = vec![0i128; n];
        let mut has_negative = false;
        for (v, out) in arcs.iter().enumerate() {
            if !in_comp[v] {
                continue;
            }
            for a in out.iter().filter(|a| in_comp[a.head] && a.head != v) {
                neg_in[a.head] = neg_in[a.head].min(a.cost);
                has_negative |= a.cost < 0;
            }
        }
        if !has_negative {
            continue;
        }
        let unvisited: i128 = (0..n).filter(|&v| in_comp[v] && v != root).map(|v| neg_in[v]).sum();
        let mut on_path = vec![false; n];
        on_path[root] = true;
        let mut search = CycleSearch {
            arcs: &arcs,
            directed: graph.is_directed(),
            k,
            root,
            in_comp,
            on_path,
            neg_in,
            path: Vec::new(),
            counter: &mut counter,
        };
        match search.dfs(root, 0, unvisited) {
            Ok(true) => return Detection::Found(Walk::new(VertexId(root), search.path.into_iter().map(EdgeId).collect())),
            Ok(false) => {}
            Err(BudgetHit) => return Detection::BudgetExceeded { expansions: counter.used },
        }
    }
    Detection::NotFound
}

/// A simple cycle with at least `k` edges and negative cost.
///
/// Roots are tried in increasing vertex order; from each root the search
/// only visits larger vertices in the root's strongly connected component,
/// so every cycle is enumerated once per orientation. Branches whose cost
/// plus the cheapest possible completion is non-negative are cut.
/// Undirected graphs are searched as symmetric digraphs without reusing an
/// edge.
pub fn detect_klncc_exact(
    graph: &CostGraph,
    k: usize,
    budget: SearchBudget,
) -> Result<Detection<CycleWitness>, DetectorError> {
    if k < 2 {
        return Err(DetectorError::InvalidK(k));
    }
    let costs = scaled_costs(graph)?;
    Ok(search_cycle(graph, &costs, k, budget).map(|walk| {
        check_klncc_witness(graph, &walk, k).expect("search only returns simple negative cycles of length >= k")
    }))
}

/// A simple cycle with at least `k` edges, found by running
/// [`detect_klncc_exact`] with every cost set to `-1`.
pub fn detect_long_cycle(
    graph: &CostGraph,
    k: usize,
    budget: SearchBudget,
) -> Result<Detection<CycleWitness>, DetectorError> {
    let unit = graph.map_costs(|_| RationalCost::integer(-1));
    detect_klncc_exact(&unit, k, budget)
}

struct TrailSearch<'a> {
    arcs: Vec<Vec<Arc>>,
    directed: bool,
    k: usize,
    semantics: TrailSemantics,
    fixed_point: usize,
    start: usize,
    used: Vec<bool>,
    /// Earlier parallel copy with identical endpoints and cost, if any.
    twin_before: Vec<Option<usize>>,
    /// Arcs of used edges, for cycle checks.
    trail_arcs: Vec<Vec<Arc>>,
    edges: Vec<usize>,
    /// Visited vertex sequence and cost prefix sums, aligned.
    vertices: Vec<usize>,
    prefix: Vec<i128>,
    fixed_point_visits: usize,
    counter: &'a mut Counter,
}

impl TrailSearch<'_> {
    fn counts(&self, cost: i128) -> bool {
        self.semantics.counts(RationalCost::integer(cost))
    }

    /// Whether appending `a` (leaving the current end) closes a cycle that
    /// is too short and counts under the filter.
    fn closes_short_cycle(&self, from: usize, a: Arc) -> bool {
        if a.head == from {
            return 1 < self.k && self.counts(a.cost);
        }
        match self.semantics.containment {
            CycleContainment::Contiguous => {
                let end = self.vertices.len();
                let mut seen = HashSet::new();
                let cost_to_end = self.prefix[end - 1] + a.cost;
                for start in (0..end).rev() {
                    let v = self.vertices[start];
                    if v == a.head {
                        return end - start < self.k && self.counts(cost_to_end - self.prefix[start]);
                    }
                    if !seen.insert(v) {
                        return false;
                    }
                }
                false
            }
            CycleContainment::EdgeSubset => {
                // a short cycle through the new edge is a short simple path
                // back from its head to its tail over used edges
                let mut on_path = HashSet::from([a.head]);
                self.short_path_exists(a.head, from, a.cost, 1, &mut on_path)
            }
        }
    }

    fn short_path_exists(&self, cur: usize, target: usize, cost: i128, len: usize, on_path: &mut HashSet<usize>) -> bool {
        for &b in &self.trail_arcs[cur] {
            if b.head == target {
                if len + 1 < self.k && self.counts(cost + b.cost) {
                    return true;
                }
                continue;
            }
            if len + 2 < self.k && on_path.insert(b.head) {
                let hit = self.short_path_exists(b.head, target, cost + b.cost, len + 1, on_path);
                on_path.remove(&b.head);
                if hit {
                    return true;
                }
            }
        }
        false
    }

    fn push(&mut self, from: usize, a: Arc) {
        self.used[a.edge] = true;
        self.edges.push(a.edge);
        self.vertices.push(a.head);
        self.prefix.push(self.prefix.last().unwrap() + a.cost);
        self.trail_arcs[from].push(a);
        if !self.directed {
            self.trail_arcs[a.head].push(Arc { head: from, ..a });
        }
        if a.head == self.fixed_point {
            self.fixed_point_visits += 1;
        }
    }

    fn pop(&mut self, from: usize, a: Arc) {
        self.used[a.edge] = false;
        self.edges.pop();
        self.vertices.pop();
        self.prefix.pop();
        self.trail_arcs[from].pop();
        if !self.directed {
            self.trail_arcs[a.head].pop();
        }
        if a.head == self.fixed_point {
            self.fixed_point_visits -= 1;
        }
    }

    /// `unused_negative` sums the negative costs of edges not yet used.
    fn dfs(&mut self, cur: usize, cost: i128, unused_negative: i128) -> Result<bool, BudgetHit> {
        for i in 0..self.arcs[cur].len() {
            let a = self.arcs[cur][i];
            if self.used[a.edge] || self.twin_before[a.edge].is_some_and(|t| !self.used[t]) {
                continue;
            }
            let remaining = unused_negative - a.cost.min(0);
            let new_cost = cost + a.cost;
            if new_cost + remaining >= 0 && !(new_cost < 0 && self.found_after(a)) {
                continue;
            }
            if self.closes_short_cycle(cur, a) {
                continue;
            }
            self.counter.expand(self.edges.len() + 1)?;
            self.push(cur, a);
            if new_cost < 0 && self.is_done(a.head) {
                return Ok(true);
            }
            if new_cost + remaining < 0 && self.dfs(a.head, new_cost, remaining)? {
                return Ok(true);
            }
            self.pop(cur, a);
        }
        Ok(false)
    }

    fn found_after(&self, a: Arc) -> bool {
        if self.semantics.require_closed {
            a.head == self.start
        } else {
            self.fixed_point_visits > 0 || a.head == self.fixed_point
        }
    }

    fn is_done(&self, end: usize) -> bool {
        if self.semantics.require_closed {
            end == self.start
        } else {
            self.fixed_point_visits > 0
        }
    }
}

/// Closed trail through `fixed_point` with negative cost whose contained
/// cycles all have at least `k` edges, under the default reading of
/// "contained cycle" (see [`TrailSemantics`]).
pub fn detect_fpklncct_exact(
    graph: &CostGraph,
    fixed_point: VertexId,
    k: usize,
    budget: SearchBudget,
) -> Result<Detection<TrailWitness>, DetectorError> {
    detect_fpklncct_with(graph, fixed_point, k, budget, &TrailSemantics::default())
}

/// [`detect_fpklncct_exact`] under explicit semantics.
///
/// Closed trails are rotated to start at the fixed point, so only that
/// start is searched; open trails are searched from every start vertex in
/// increasing order. Among parallel edges with equal endpoints and cost the
/// lowest unused copy is always taken first. Every extension is rejected if
/// it closes a counted cycle shorter than `k`.
pub fn detect_fpklncct_with(
    graph: &CostGraph,
    fixed_point: VertexId,
    k: usize,
    budget: SearchBudget,
    semantics: &TrailSemantics,
) -> Result<Detection<TrailWitness>, DetectorError> {
    if k < 2 {
        return Err(DetectorError::InvalidK(k));
    }
    if !graph.contains_vertex(fixed_point) {
        return Err(GraphError::VertexNotInGraph(fixed_point).into());
    }
    let costs = scaled_costs(graph)?;
    let arcs = arc_lists(graph, &costs);
    let mut twin_before = vec![None; graph.edge_count()];
    let mut last_copy = std::collections::HashMap::new();
    for (i, e) in graph.edges().iter().enumerate() {
        if let Some(prev) = last_copy.insert((e.tail, e.head, costs[i]), i) {
            twin_before[i] = Some(prev);
        }
    }
    let all_negative: i128 = costs.iter().filter(|&&c| c < 0).sum();

    let starts: Vec<usize> = if semantics.require_closed {
        vec![fixed_point.0]
    } else {
        (0..graph.vertex_count()).collect()
    };
    let mut counter = Counter::new(budget);
    let n = graph.vertex_count();
    for start in starts {
        let mut search = TrailSearch {
            arcs: arcs.clone(),
            directed: graph.is_directed(),
            k,
            semantics: *semantics,
            fixed_point: fixed_point.0,
            start,
            used: vec![false; graph.edge_count()],
            twin_before: twin_before.clone(),
            trail_arcs: vec![Vec::new(); n],
            edges: Vec::new(),
            vertices: vec![start],
            prefix: vec![0],
            fixed_point_visits: usize::from(start == fixed_point.0),
            counter: &mut counter,
        };
        match search.dfs(start, 0, all_negative) {
            Ok(true) => {
                let walk = Walk::new(VertexId(start), search.edges.iter().map(|&e| EdgeId(e)).collect());
                let witness = check_fpklncct_witness(graph, &walk, fixed_point, k, semantics)
                    .expect("search maintains the trail invariants");
                return Ok(Detection::Found(witness));
            }
            Ok(false) => {}
            Err(BudgetHit) => return Ok(Detection::BudgetExceeded { expansions: counter.used }),
        }
    }
    Ok(Detection::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CycleFilter, GraphBuilder, GraphMode};
    use proptest::prelude::*;

    fn graph(mode: GraphMode, n: usize, edges: &[(usize, usize, i128)]) -> CostGraph {
        let mut b = GraphBuilder::new(mode);
        for _ in 0..n {
            b.add_vertex(None);
        }
        for &(t, h, c) in edges {
            b.add_edge(VertexId(t), VertexId(h), RationalCost::integer(c)).unwrap();
        }
        b.build()
    }

    fn ample() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn budget_must_be_positive() {
        assert_eq!(SearchBudget::new(0, 5), Err(DetectorError::InvalidBudget));
        assert_eq!(SearchBudget::new(5, 0), Err(DetectorError::InvalidBudget));
        assert_eq!(SearchBudget::expansions(3).unwrap().scaled(10).max_expansions(), 30);
    }

    #[test]
    fn scaling_preserves_signs() {
        let mut b = GraphBuilder::new(GraphMode::Multigraph);
        let (x, y) = (b.add_vertex(None), b.add_vertex(None));
        b.add_edge(x, y, RationalCost::new(1, 6).unwrap()).unwrap();
        b.add_edge(y, x, RationalCost::new(-1, 4).unwrap()).unwrap();
        assert_eq!(scaled_costs(&b.build()).unwrap(), vec![2, -3]);
    }

    #[test]
    fn scaling_overflow_is_reported() {
        let mut b = GraphBuilder::new(GraphMode::Multigraph);
        let (x, y) = (b.add_vertex(None), b.add_vertex(None));
        b.add_edge(x, y, RationalCost::new(1, i128::MAX).unwrap()).unwrap();
        b.add_edge(y, x, RationalCost::new(1, i128::MAX - 1).unwrap()).unwrap();
        assert_eq!(detect_klncc_exact(&b.build(), 2, ample()), Err(DetectorError::CostOverflow));
    }

    #[test]
    fn bellman_ford_basics() {
        let g = graph(GraphMode::SimpleDirected, 3, &[(0, 1, 1), (1, 2, 0), (2, 0, 2)]);
        assert!(bellman_ford_negative_cycle(&g).unwrap().is_none());
        let g = graph(GraphMode::SimpleDirected, 2, &[(0, 1, -1), (1, 0, 0)]);
        let c = bellman_ford_negative_cycle(&g).unwrap().unwrap();
        assert_eq!(c.cost(), RationalCost::integer(-1));
        assert_eq!(c.len(), 2);
        let u = graph(GraphMode::SimpleUndirected, 2, &[(0, 1, -1)]);
        assert_eq!(bellman_ford_negative_cycle(&u).unwrap_err(), DetectorError::NotDirected);
        // a negative self-loop alone is not a cycle of length >= 2
        let l = graph(GraphMode::Multigraph, 1, &[(0, 0, -5)]);
        assert!(bellman_ford_negative_cycle(&l).unwrap().is_none());
    }

    #[test]
    fn bellman_ford_cycle_reached_through_a_tail() {
        let g = graph(GraphMode::SimpleDirected, 5, &[(0, 1, -1), (1, 2, 0), (2, 3, -1), (3, 4, 1), (4, 2, -1)]);
        let c = bellman_ford_negative_cycle(&g).unwrap().unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.cost(), RationalCost::integer(-1));
    }

    #[test]
    fn klncc_length_filter() {
        let tri = graph(GraphMode::SimpleDirected, 3, &[(0, 1, 1), (1, 2, 1), (2, 0, -3)]);
        let c = detect_klncc_exact(&tri, 3, ample()).unwrap().into_found().unwrap();
        assert_eq!(c.cost(), RationalCost::integer(-1));
        let two = graph(GraphMode::SimpleDirected, 3, &[(0, 1, -1), (1, 0, -1), (1, 2, 5), (2, 0, 5)]);
        assert!(detect_klncc_exact(&two, 2, ample()).unwrap().is_found());
        assert_eq!(detect_klncc_exact(&two, 3, ample()).unwrap(), Detection::NotFound);
        assert_eq!(detect_klncc_exact(&two, 1, ample()).unwrap_err(), DetectorError::InvalidK(1));
    }

    #[test]
    fn klncc_on_undirected_graphs() {
        // a single edge is not a cycle
        let e = graph(GraphMode::SimpleUndirected, 2, &[(0, 1, -1)]);
        assert_eq!(detect_klncc_exact(&e, 2, ample()).unwrap(), Detection::NotFound);
        let sq = graph(GraphMode::SimpleUndirected, 4, &[(0, 1, 1), (1, 2, 1), (3, 2, 1), (0, 3, -4)]);
        let c = detect_klncc_exact(&sq, 4, ample()).unwrap().into_found().unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(detect_klncc_exact(&sq, 5, ample()).unwrap(), Detection::NotFound);
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let g = graph(
            GraphMode::SimpleDirected,
            4,
            &[(0, 1, -1), (1, 2, -1), (2, 3, -1), (3, 0, 10), (1, 0, 10), (2, 1, 10)],
        );
        let tiny = SearchBudget::expansions(1).unwrap();
        assert!(detect_klncc_exact(&g, 3, tiny).unwrap().is_budget_exceeded());
        let short = SearchBudget::new(1000, 2).unwrap();
        assert!(detect_klncc_exact(&g, 3, short).unwrap().is_budget_exceeded());
        assert_eq!(detect_klncc_exact(&g, 3, ample()).unwrap(), Detection::NotFound);
    }

    #[test]
    fn long_cycle_examples() {
        let five: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5, 7)).collect();
        let g = graph(GraphMode::SimpleDirected, 5, &five);
        assert!(detect_long_cycle(&g, 5, ample()).unwrap().is_found());
        assert_eq!(detect_long_cycle(&g, 6, ample()).unwrap(), Detection::NotFound);
        let tris = graph(
            GraphMode::SimpleDirected,
            6,
            &[(0, 1, 0), (1, 2, 0), (2, 0, 0), (3, 4, 0), (4, 5, 0), (5, 3, 0)],
        );
        assert_eq!(detect_long_cycle(&tris, 4, ample()).unwrap(), Detection::NotFound);
        assert!(detect_long_cycle(&tris, 3, ample()).unwrap().is_found());
    }

    #[test]
    fn trail_without_negative_edges() {
        let g = graph(GraphMode::Multigraph, 3, &[(0, 1, 0), (1, 2, 1), (2, 0, 0)]);
        assert_eq!(detect_fpklncct_exact(&g, VertexId(0), 3, ample()).unwrap(), Detection::NotFound);
    }

    #[test]
    fn trail_may_repeat_vertices() {
        // figure eight through 0: two triangles sharing vertex 0
        let g = graph(
            GraphMode::Multigraph,
            5,
            &[(0, 1, -1), (1, 2, 0), (2, 0, 0), (0, 3, 0), (3, 4, 0), (4, 0, 0)],
        );
        let t = detect_fpklncct_exact(&g, VertexId(3), 3, ample()).unwrap().into_found().unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(detect_fpklncct_exact(&g, VertexId(3), 4, ample()).unwrap(), Detection::NotFound);
    }

    #[test]
    fn trail_rejects_two_cycles_inside() {
        // 0 -> 1 -> 2 -> 0 with a detour 1 -> 3 -> 1 that would add a 2-cycle
        let g = graph(GraphMode::Multigraph, 4, &[(0, 1, 1), (1, 2, 0), (2, 0, 0), (1, 3, -5), (3, 1, 0)]);
        assert_eq!(detect_fpklncct_exact(&g, VertexId(0), 3, ample()).unwrap(), Detection::NotFound);
        assert!(detect_fpklncct_exact(&g, VertexId(0), 2, ample()).unwrap().is_found());
        // the negative-only filter ignores the non-negative outer triangle but
        // the 2-cycle itself is negative
        let neg_only = TrailSemantics { filter: CycleFilter::NegativeOnly, ..TrailSemantics::default() };
        assert_eq!(
            detect_fpklncct_with(&g, VertexId(0), 3, ample(), &neg_only).unwrap(),
            Detection::NotFound
        );
    }

    #[test]
    fn open_trails_are_searched_from_every_start() {
        let g = graph(GraphMode::Multigraph, 3, &[(0, 1, -1), (1, 2, 0)]);
        let open = TrailSemantics { require_closed: false, ..TrailSemantics::default() };
        let t = detect_fpklncct_with(&g, VertexId(2), 3, ample(), &open).unwrap().into_found().unwrap();
        assert!(t.cost().is_negative());
        assert_eq!(detect_fpklncct_exact(&g, VertexId(2), 3, ample()).unwrap(), Detection::NotFound);
    }

    #[test]
    fn trail_errors() {
        let g = graph(GraphMode::Multigraph, 1, &[]);
        assert!(matches!(
            detect_fpklncct_exact(&g, VertexId(4), 3, ample()),
            Err(DetectorError::Graph(GraphError::VertexNotInGraph(_)))
        ));
        assert_eq!(detect_fpklncct_exact(&g, VertexId(0), 0, ample()), Err(DetectorError::InvalidK(0)));
    }

    fn brute_force_has_cycle(g: &CostGraph, k: usize) -> bool {
        // enumerate all edge sequences of distinct edges up to |E| from each
        // vertex; independent of the search code
        fn go(g: &CostGraph, k: usize, start: VertexId, cur: VertexId, used: &mut Vec<EdgeId>) -> bool {
            if !used.is_empty() && cur == start {
                return verify_klncc(g, start, used, k);
            }
            for &(e, next) in g.successors(cur) {
                if used.contains(&e) || used.len() >= g.vertex_count() {
                    continue;
                }
                used.push(e);
                let hit = go(g, k, start, next, used);
                used.pop();
                if hit {
                    return true;
                }
            }
            false
        }
        fn verify_klncc(g: &CostGraph, start: VertexId, used: &[EdgeId], k: usize) -> bool {
            crate::graph::verify_klncc_witness(g, &Walk::new(start, used.to_vec()), k).unwrap()
        }
        g.vertices().any(|s| go(g, k, s, s, &mut Vec::new()))
    }

    fn random_digraph() -> impl Strategy<Value = CostGraph> {
        (2usize..7)
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(((0..n), (0..n), -3i128..=3), 0..16)))
            .prop_map(|(n, raw)| {
                let mut seen = HashSet::new();
                let edges: Vec<_> =
                    raw.into_iter().filter(|&(t, h, _)| t != h && seen.insert((t, h))).collect();
                graph(GraphMode::SimpleDirected, n, &edges)
            })
    }

    proptest! {
        #[test]
        fn bellman_ford_agrees_with_enumeration_at_k2(g in random_digraph()) {
            let bf = bellman_ford_negative_cycle(&g).unwrap();
            let exact = detect_klncc_exact(&g, 2, ample()).unwrap();
            prop_assert!(!exact.is_budget_exceeded());
            prop_assert_eq!(bf.is_some(), exact.is_found());
        }

        #[test]
        fn klncc_matches_brute_force(g in random_digraph(), k in 2usize..5) {
            let exact = detect_klncc_exact(&g, k, ample()).unwrap();
            prop_assert_eq!(exact.is_found(), brute_force_has_cycle(&g, k));
        }

        #[test]
        fn klncc_is_monotone_in_k(g in random_digraph(), k in 3usize..6) {
            if detect_klncc_exact(&g, k, ample()).unwrap().is_found() {
                for smaller in 2..k {
                    prop_assert!(detect_klncc_exact(&g, smaller, ample()).unwrap().is_found());
                }
            }
        }
    }
}

//! Gadget reductions from CNF formulas to costed graphs.
//!
//! Both constructions share a clause spine: vertices `u_k, v_k` per clause,
//! edges `(v_k, u_{k+1})` of cost 0 and a closing edge `(v_m, u_1)`. Every
//! literal occurrence gets a path `u_k -> entry -> ... -> exit -> v_k`
//! through its variable's lobe.
//!
//! * [`reduce_3sat_multigraph`]: one two-vertex lobe per variable with one
//!   cost `-1` edge per occurrence (forward for positive literals, backward
//!   for negative ones), connection edges of cost 0 and a closing edge of
//!   cost `m - 1`. A formula is satisfiable iff the multigraph has a
//!   negative closed trail through `u_1` whose cycles all have length >= 3.
//! * [`reduce_3o3sat_simple`]: for formulas where each variable occurs at
//!   most three times and never more often negatively than positively,
//!   lobes are simple graphs, positive literal edges cost `-2m`, negated
//!   literal paths cost `1/(m+1)` in total, positive connections cost `m`
//!   and the closing edge costs `-1`. A formula is satisfiable iff the graph
//!   has a negative simple cycle of length >= 3.
//! * [`reduce_undirected`]: the simple construction with every lobe edge
//!   subdivided, read as an undirected graph.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{
    evaluate, occurrence_profile, parse_dimacs, validate_3o3sat, Assignment, CnfError, CnfFormula, Literal,
    OccurrenceCase, OccurrenceViolation,
};
use crate::cost::RationalCost;
use crate::graph::{
    check_fpklncct_witness, check_klncc_witness, CostGraph, CycleWitness, EdgeId, GraphBuilder, GraphError,
    GraphMode, TrailSemantics, TrailWitness, VertexId, Walk, WitnessError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    #[serde(rename = "3sat-multi")]
    ThreeSatMulti,
    #[serde(rename = "3o3sat-simple")]
    ThreeO3SatSimple,
    #[serde(rename = "3o3sat-undirected")]
    ThreeO3SatUndirected,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::ThreeSatMulti => "3sat-multi",
            ReductionKind::ThreeO3SatSimple => "3o3sat-simple",
            ReductionKind::ThreeO3SatUndirected => "3o3sat-undirected",
        }
    }
}

/// Which lobe edges the undirected reduction subdivides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubdivisionScope {
    /// Every lobe edge, including negated-literal paths.
    #[default]
    AllLobeEdges,
    /// Only the `-2m` edges of plain literals; each lobe 2-cycle becomes a
    /// triangle.
    PlainLiteralEdges,
}

/// How a subdivided lobe edge shares the original cost between its halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCostMode {
    /// `(original, 0)`: the pair costs what the edge cost.
    #[default]
    Split,
    /// `(original, original)`: both halves keep the original cost.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("formula has no clauses")]
    EmptyFormula,
    #[error("not a 3-occurrence formula ({} offending variables)", .0.len())]
    Not3O3Sat(Vec<OccurrenceViolation>),
    #[error("x{var} occurs more often negated than plain; normalize the formula first")]
    NotNormalized { var: usize },
    #[error("undirected reduction needs k >= 4, got {0}")]
    KTooSmall(usize),
    #[error("assignment does not satisfy the formula")]
    AssignmentDoesNotSatisfy,
    #[error("literal {literal} does not occur in clause {clause}")]
    LiteralNotInClause { clause: usize, literal: Literal },
    #[error("chosen literals {0} and its negation clash")]
    InconsistentChoice(Literal),
    #[error("expected {clauses} chosen literals, got {got}")]
    ChoiceCount { clauses: usize, got: usize },
    #[error("operation needs a {expected} artifact, this one is {found}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error("not a witness: {0}")]
    NotAWitness(WitnessError),
    #[error("malformed provenance: {0}")]
    Provenance(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// The lobe path of one literal occurrence and its two connection edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralGadget {
    pub literal: Literal,
    pub clause: usize,
    /// Index of this occurrence in the variable's clause-ordered occurrence list.
    pub occurrence: usize,
    pub entry: VertexId,
    pub exit: VertexId,
    /// Lobe edges from `entry` to `exit`.
    pub literal_edges: Vec<EdgeId>,
    /// `(u_clause, entry)`.
    pub connection_in: EdgeId,
    /// `(exit, v_clause)`.
    pub connection_out: EdgeId,
}

/// A reduced graph with enough provenance to translate witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionArtifact {
    pub kind: ReductionKind,
    pub graph: CostGraph,
    /// The formula the graph encodes (after normalization, if any).
    pub formula: CnfFormula,
    /// `(u_k, v_k)` per clause.
    pub clause_vertices: Vec<(VertexId, VertexId)>,
    /// `u_1` for the multigraph reduction.
    pub fixed_point: Option<VertexId>,
    /// `(v_k, u_{k+1})` for `k < m`.
    pub chain_edges: Vec<EdgeId>,
    /// `(v_m, u_1)`.
    pub closing_edge: EdgeId,
    /// One per literal occurrence, in clause order then literal order.
    pub gadgets: Vec<LiteralGadget>,
    /// The `k` a decoded witness is checked against.
    pub k: usize,
    pub split_cost_mode: Option<SplitCostMode>,
    pub subdivision: Option<SubdivisionScope>,
    /// Variables whose polarity was flipped by normalization.
    pub flipped: Vec<bool>,
}

impl ReductionArtifact {
    pub fn m(&self) -> usize {
        self.formula.num_clauses()
    }

    pub fn u(&self, clause: usize) -> VertexId {
        self.clause_vertices[clause].0
    }

    pub fn v(&self, clause: usize) -> VertexId {
        self.clause_vertices[clause].1
    }

    pub fn is_clause_vertex(&self, v: VertexId) -> bool {
        self.clause_vertices.iter().any(|&(u, w)| u == v || w == v)
    }

    pub fn gadget(&self, clause: usize, literal: Literal) -> Option<&LiteralGadget> {
        self.gadgets.iter().find(|g| g.clause == clause && g.literal == literal)
    }

    /// The lobe of `var`: its gadgets in occurrence order.
    pub fn lobe(&self, var: usize) -> Vec<&LiteralGadget> {
        let mut lobe: Vec<_> = self.gadgets.iter().filter(|g| g.literal.var() == var).collect();
        lobe.sort_by_key(|g| g.occurrence);
        lobe
    }

    /// All edges inside lobes.
    pub fn lobe_edges(&self) -> HashSet<EdgeId> {
        self.gadgets.iter().flat_map(|g| g.literal_edges.iter().copied()).collect()
    }

    /// Maps an assignment of [`Self::formula`] back through normalization.
    pub fn to_original(&self, assignment: &Assignment) -> Assignment {
        Assignment::from_values(
            assignment
                .values()
                .iter()
                .zip(&self.flipped)
                .map(|(&v, &f)| v != f)
                .collect(),
        )
    }

    /// Records that `formula` was produced by flipping these variables.
    pub fn with_flips(mut self, flipped: Vec<bool>) -> Self {
        self.flipped = flipped;
        self
    }
}

struct Spine {
    builder: GraphBuilder,
    clause_vertices: Vec<(VertexId, VertexId)>,
    chain_edges: Vec<EdgeId>,
    closing_edge: EdgeId,
}

fn build_spine(mode: GraphMode, m: usize, closing_cost: RationalCost) -> Result<Spine, GraphError> {
    let mut builder = GraphBuilder::new(mode);
    let clause_vertices: Vec<_> = (1..=m)
        .map(|k| {
            let u = builder.add_vertex(Some(&format!("u{k}")));
            let v = builder.add_vertex(Some(&format!("v{k}")));
            (u, v)
        })
        .collect();
    let chain_edges = clause_vertices
        .windows(2)
        .map(|w| builder.add_edge(w[0].1, w[1].0, RationalCost::ZERO))
        .collect::<Result<Vec<_>, _>>()?;
    let closing_edge = builder.add_edge(clause_vertices[m - 1].1, clause_vertices[0].0, closing_cost)?;
    Ok(Spine { builder, clause_vertices, chain_edges, closing_edge })
}

/// Lobe part of a gadget, before its connection edges exist.
struct LobeSlot {
    entry: VertexId,
    exit: VertexId,
    literal_edges: Vec<EdgeId>,
}

/// Adds connection edges for every occurrence, in clause order.
fn connect(
    builder: &mut GraphBuilder,
    formula: &CnfFormula,
    clause_vertices: &[(VertexId, VertexId)],
    slots: &mut HashMap<(usize, Literal), (usize, LobeSlot)>,
    connection_cost: impl Fn(Literal) -> RationalCost,
) -> Result<Vec<LiteralGadget>, GraphError> {
    let mut gadgets = Vec::new();
    for (clause, lits) in formula.clauses().iter().enumerate() {
        let (u, v) = clause_vertices[clause];
        for &literal in lits {
            let (occurrence, slot) = slots.remove(&(clause, literal)).expect("every occurrence has a lobe slot");
            let cost = connection_cost(literal);
            let connection_in = builder.add_edge(u, slot.entry, cost)?;
            let connection_out = builder.add_edge(slot.exit, v, cost)?;
            gadgets.push(LiteralGadget {
                literal,
                clause,
                occurrence,
                entry: slot.entry,
                exit: slot.exit,
                literal_edges: slot.literal_edges,
                connection_in,
                connection_out,
            });
        }
    }
    Ok(gadgets)
}

/// Multigraph reduction from 3SAT; see the module docs.
pub fn reduce_3sat_multigraph(formula: &CnfFormula) -> Result<ReductionArtifact, ReductionError> {
    let m = formula.num_clauses();
    if m == 0 {
        return Err(ReductionError::EmptyFormula);
    }
    let Spine { mut builder, clause_vertices, chain_edges, closing_edge } =
        build_spine(GraphMode::Multigraph, m, RationalCost::integer(m as i128 - 1))?;

    let minus_one = RationalCost::integer(-1);
    let mut slots = HashMap::new();
    for var in occurrence_profile(formula).into_iter().filter(|v| v.total() > 0) {
        let y = builder.add_vertex(Some(&format!("x{}.y", var.var)));
        let z = builder.add_vertex(Some(&format!("x{}.z", var.var)));
        for (j, occ) in var.occurrences.iter().enumerate() {
            let (entry, exit) = if occ.positive { (y, z) } else { (z, y) };
            let edge = builder.add_edge(entry, exit, minus_one)?;
            let literal = Literal::new(var.var, occ.positive);
            slots.insert((occ.clause, literal), (j, LobeSlot { entry, exit, literal_edges: vec![edge] }));
        }
    }
    let gadgets = connect(&mut builder, formula, &clause_vertices, &mut slots, |_| RationalCost::ZERO)?;

    Ok(ReductionArtifact {
        kind: ReductionKind::ThreeSatMulti,
        graph: builder.build(),
        formula: formula.clone(),
        fixed_point: Some(clause_vertices[0].0),
        clause_vertices,
        chain_edges,
        closing_edge,
        gadgets,
        k: 3,
        split_cost_mode: None,
        subdivision: None,
        flipped: vec![false; formula.num_vars()],
    })
}

/// Simple-digraph reduction from normalized 3-occurrence 3SAT; see the
/// module docs.
pub fn reduce_3o3sat_simple(formula: &CnfFormula) -> Result<ReductionArtifact, ReductionError> {
    let m = formula.num_clauses();
    if m == 0 {
        return Err(ReductionError::EmptyFormula);
    }
    validate_3o3sat(formula).map_err(ReductionError::Not3O3Sat)?;
    let profile = occurrence_profile(formula);
    if let Some(v) = profile.iter().find(|v| !v.case().is_normalized()) {
        return Err(ReductionError::NotNormalized { var: v.var });
    }

    let mi = m as i128;
    let big = RationalCost::integer(mi);
    let literal_cost = RationalCost::integer(-2 * mi);
    let negation_cost = RationalCost::new(1, mi + 1).expect("m + 1 > 0");
    let half_negation_cost = RationalCost::new(1, 2 * mi + 2).expect("2m + 2 > 0");

    let Spine { mut builder, clause_vertices, chain_edges, closing_edge } =
        build_spine(GraphMode::SimpleDirected, m, RationalCost::integer(-1))?;

    let mut slots = HashMap::new();
    for var in &profile {
        let x = var.var;
        let pair = |b: &mut GraphBuilder, j: usize| {
            (
                b.add_vertex(Some(&format!("x{x}.y{}", j + 1))),
                b.add_vertex(Some(&format!("x{x}.z{}", j + 1))),
            )
        };
        let occ = &var.occurrences;
        let positives: Vec<usize> = (0..occ.len()).filter(|&j| occ[j].positive).collect();
        let negatives: Vec<usize> = (0..occ.len()).filter(|&j| !occ[j].positive).collect();
        let mut slot = |j: usize, s: LobeSlot| {
            slots.insert((occ[j].clause, Literal::new(x, occ[j].positive)), (j, s));
        };
        match var.case() {
            OccurrenceCase::Absent => {}
            OccurrenceCase::AllPositive => {
                for &j in &positives {
                    let (y, z) = pair(&mut builder, j);
                    let e = builder.add_edge(y, z, literal_cost)?;
                    slot(j, LobeSlot { entry: y, exit: z, literal_edges: vec![e] });
                }
            }
            OccurrenceCase::OnePositiveOneNegative => {
                // the negated occurrence reuses the pair backwards
                let (jp, jn) = (positives[0], negatives[0]);
                let (y, z) = pair(&mut builder, jp);
                let forward = builder.add_edge(y, z, literal_cost)?;
                let backward = builder.add_edge(z, y, negation_cost)?;
                slot(jp, LobeSlot { entry: y, exit: z, literal_edges: vec![forward] });
                slot(jn, LobeSlot { entry: z, exit: y, literal_edges: vec![backward] });
            }
            OccurrenceCase::TwoPositiveOneNegative => {
                let (j1, j2, j3) = (positives[0], positives[1], negatives[0]);
                let (y1, z1) = pair(&mut builder, j1);
                let (y2, z2) = pair(&mut builder, j2);
                let e1 = builder.add_edge(y1, z1, literal_cost)?;
                let e2 = builder.add_edge(y2, z2, literal_cost)?;
                // negation path z2 -> y2 -> z1 -> y1
                let n1 = builder.add_edge(z2, y2, half_negation_cost)?;
                let n2 = builder.add_edge(y2, z1, RationalCost::ZERO)?;
                let n3 = builder.add_edge(z1, y1, half_negation_cost)?;
                slot(j1, LobeSlot { entry: y1, exit: z1, literal_edges: vec![e1] });
                slot(j2, LobeSlot { entry: y2, exit: z2, literal_edges: vec![e2] });
                slot(j3, LobeSlot { entry: z2, exit: y1, literal_edges: vec![n1, n2, n3] });
            }
            _ => unreachable!("checked above"),
        }
    }
    let gadgets = connect(&mut builder, formula, &clause_vertices, &mut slots, |lit| {
        if lit.is_positive() {
            big
        } else {
            RationalCost::ZERO
        }
    })?;

    Ok(ReductionArtifact {
        kind: ReductionKind::ThreeO3SatSimple,
        graph: builder.build(),
        formula: formula.clone(),
        fixed_point: None,
        clause_vertices,
        chain_edges,
        closing_edge,
        gadgets,
        k: 3,
        split_cost_mode: None,
        subdivision: None,
        flipped: vec![false; formula.num_vars()],
    })
}

/// Undirected variant: every lobe edge `(a, b)` becomes `a - w - b` through
/// a fresh midpoint `w`, and all directions are dropped.
pub fn reduce_undirected(
    formula: &CnfFormula,
    k: usize,
    cost_mode: SplitCostMode,
) -> Result<ReductionArtifact, ReductionError> {
    reduce_undirected_with(formula, k, cost_mode, SubdivisionScope::AllLobeEdges)
}

/// [`reduce_undirected`] with a choice of which lobe edges get a midpoint.
pub fn reduce_undirected_with(
    formula: &CnfFormula,
    k: usize,
    cost_mode: SplitCostMode,
    scope: SubdivisionScope,
) -> Result<ReductionArtifact, ReductionError> {
    if k < 4 {
        return Err(ReductionError::KTooSmall(k));
    }
    let base = reduce_3o3sat_simple(formula)?;
    let graph = &base.graph;

    let mut owner: HashMap<EdgeId, usize> = HashMap::new();
    let subdivided = |g: &&LiteralGadget| scope == SubdivisionScope::AllLobeEdges || g.literal.is_positive();
    for g in base.gadgets.iter().filter(subdivided) {
        for &e in &g.literal_edges {
            owner.insert(e, g.literal.var());
        }
    }

    let mut builder = GraphBuilder::new(GraphMode::SimpleUndirected);
    for v in graph.vertices() {
        builder.add_vertex(graph.vertex_label(v));
    }
    let mut midpoints_per_var: HashMap<usize, usize> = HashMap::new();
    // old edge id -> new edge ids
    let mut remap: Vec<Vec<EdgeId>> = Vec::with_capacity(graph.edge_count());
    for e in graph.edges() {
        match owner.get(&e.id) {
            None => remap.push(vec![builder.add_edge(e.tail, e.head, e.cost)?]),
            Some(&var) => {
                let n = midpoints_per_var.entry(var).or_insert(0);
                *n += 1;
                let w = builder.add_vertex(Some(&format!("x{var}.w{n}")));
                let second = match cost_mode {
                    SplitCostMode::Split => RationalCost::ZERO,
                    SplitCostMode::Duplicate => e.cost,
                };
                let a = builder.add_edge(e.tail, w, e.cost)?;
                let b = builder.add_edge(w, e.head, second)?;
                remap.push(vec![a, b]);
            }
        }
    }
    let single = |e: EdgeId| remap[e.0][0];
    let gadgets = base
        .gadgets
        .iter()
        .map(|g| LiteralGadget {
            literal_edges: g.literal_edges.iter().flat_map(|e| remap[e.0].iter().copied()).collect(),
            connection_in: single(g.connection_in),
            connection_out: single(g.connection_out),
            ..g.clone()
        })
        .collect();

    Ok(ReductionArtifact {
        kind: ReductionKind::ThreeO3SatUndirected,
        graph: builder.build(),
        chain_edges: base.chain_edges.iter().map(|&e| single(e)).collect(),
        closing_edge: single(base.closing_edge),
        gadgets,
        k,
        split_cost_mode: Some(cost_mode),
        subdivision: Some(scope),
        ..base
    })
}

/// Which satisfied literal represents a clause in an encoded witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LiteralPolicy {
    /// Positive literals first, lowest variable index breaking ties. Gives
    /// the cheapest witness.
    #[default]
    PreferPositive,
    /// Negated literals first, lowest variable index breaking ties.
    PreferNegative,
}

/// One satisfied literal per clause under `policy`.
pub fn choose_literals(
    formula: &CnfFormula,
    assignment: &Assignment,
    policy: LiteralPolicy,
) -> Result<Vec<Literal>, ReductionError> {
    if assignment.num_vars() != formula.num_vars() || !evaluate(formula, assignment) {
        return Err(ReductionError::AssignmentDoesNotSatisfy);
    }
    let preferred = |lit: &Literal| match policy {
        LiteralPolicy::PreferPositive => !lit.is_positive(),
        LiteralPolicy::PreferNegative => lit.is_positive(),
    };
    Ok(formula
        .clauses()
        .iter()
        .map(|clause| {
            *clause
                .iter()
                .filter(|lit| lit.eval(assignment))
                .min_by_key(|lit| (preferred(lit), lit.var()))
                .expect("satisfied clause has a true literal")
        })
        .collect())
}

/// Walk `u_1 -> ... -> v_1 -> u_2 -> ... -> v_m -> u_1` through the chosen
/// literal of each clause.
fn spine_walk(artifact: &ReductionArtifact, choices: &[Literal]) -> Result<Walk, ReductionError> {
    let m = artifact.m();
    if choices.len() != m {
        return Err(ReductionError::ChoiceCount { clauses: m, got: choices.len() });
    }
    let chosen: HashSet<Literal> = choices.iter().copied().collect();
    if let Some(&lit) = choices.iter().find(|l| chosen.contains(&l.negated())) {
        return Err(ReductionError::InconsistentChoice(lit));
    }
    let mut edges = Vec::new();
    for (clause, &literal) in choices.iter().enumerate() {
        let g = artifact
            .gadget(clause, literal)
            .ok_or(ReductionError::LiteralNotInClause { clause, literal })?;
        edges.push(g.connection_in);
        edges.extend(&g.literal_edges);
        edges.push(g.connection_out);
        edges.push(if clause + 1 < m { artifact.chain_edges[clause] } else { artifact.closing_edge });
    }
    Ok(Walk::new(artifact.u(0), edges))
}

fn require_cycle_kind(artifact: &ReductionArtifact) -> Result<(), ReductionError> {
    match artifact.kind {
        ReductionKind::ThreeO3SatSimple | ReductionKind::ThreeO3SatUndirected => Ok(()),
        other => Err(ReductionError::WrongKind { expected: "3o3sat", found: other.name() }),
    }
}

/// Cycle witness for a satisfying assignment, choosing literals by
/// [`LiteralPolicy::PreferPositive`]. In the simple reduction its cost is
/// `t/(m+1) - 1` where `t` counts clauses represented by a negated literal.
pub fn encode_witness_cycle(artifact: &ReductionArtifact, assignment: &Assignment) -> Result<CycleWitness, ReductionError> {
    encode_witness_cycle_with(artifact, assignment, LiteralPolicy::PreferPositive)
}

pub fn encode_witness_cycle_with(
    artifact: &ReductionArtifact,
    assignment: &Assignment,
    policy: LiteralPolicy,
) -> Result<CycleWitness, ReductionError> {
    require_cycle_kind(artifact)?;
    let choices = choose_literals(&artifact.formula, assignment, policy)?;
    encode_cycle_for_literals(artifact, &choices)
}

/// Cycle through an explicit literal per clause. The choice must be
/// consistent (never a literal and its negation).
pub fn encode_cycle_for_literals(artifact: &ReductionArtifact, choices: &[Literal]) -> Result<CycleWitness, ReductionError> {
    require_cycle_kind(artifact)?;
    let walk = spine_walk(artifact, choices)?;
    CycleWitness::new(&artifact.graph, walk).map_err(ReductionError::NotAWitness)
}

/// Closed trail through `u_1` for a satisfying assignment in the multigraph
/// reduction; its cost is `-m + (m - 1) = -1`.
pub fn encode_witness_trail(artifact: &ReductionArtifact, assignment: &Assignment) -> Result<TrailWitness, ReductionError> {
    if artifact.kind != ReductionKind::ThreeSatMulti {
        return Err(ReductionError::WrongKind { expected: "3sat-multi", found: artifact.kind.name() });
    }
    let choices = choose_literals(&artifact.formula, assignment, LiteralPolicy::PreferPositive)?;
    let walk = spine_walk(artifact, &choices)?;
    TrailWitness::new(&artifact.graph, walk).map_err(ReductionError::NotAWitness)
}

/// Reads a satisfying assignment of [`ReductionArtifact::formula`] off a
/// verified witness.
///
/// For the multigraph reduction a variable is true iff the trail uses one of
/// its forward lobe edges. For the cycle reductions a variable is false iff
/// the cycle enters one of its negated-literal paths.
pub fn decode_assignment(artifact: &ReductionArtifact, walk: &Walk) -> Result<Assignment, ReductionError> {
    decode_assignment_with(artifact, walk, &TrailSemantics::default())
}

/// [`decode_assignment`] checking multigraph trails under `semantics`.
pub fn decode_assignment_with(
    artifact: &ReductionArtifact,
    walk: &Walk,
    semantics: &TrailSemantics,
) -> Result<Assignment, ReductionError> {
    let used: HashSet<EdgeId> = match artifact.kind {
        ReductionKind::ThreeSatMulti => {
            let p = artifact.fixed_point.expect("multigraph artifacts have a fixed point");
            check_fpklncct_witness(&artifact.graph, walk, p, artifact.k, semantics)
                .map_err(ReductionError::NotAWitness)?;
            walk.edges.iter().copied().collect()
        }
        ReductionKind::ThreeO3SatSimple | ReductionKind::ThreeO3SatUndirected => {
            check_klncc_witness(&artifact.graph, walk, artifact.k).map_err(ReductionError::NotAWitness)?;
            walk.edges.iter().copied().collect()
        }
    };
    let touches = |g: &LiteralGadget| g.literal_edges.iter().any(|e| used.contains(e));
    let mut assignment = match artifact.kind {
        ReductionKind::ThreeSatMulti => Assignment::uniform(artifact.formula.num_vars(), false),
        _ => Assignment::uniform(artifact.formula.num_vars(), true),
    };
    for g in artifact.gadgets.iter().filter(|g| touches(g)) {
        match (artifact.kind, g.literal.is_positive()) {
            (ReductionKind::ThreeSatMulti, true) => assignment.set(g.literal.var(), true),
            (ReductionKind::ThreeSatMulti, false) => {}
            (_, false) => assignment.set(g.literal.var(), false),
            (_, true) => {}
        }
    }
    Ok(assignment)
}

/// Serialized provenance that travels next to the graph text file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: ReductionKind,
    pub m: usize,
    pub k: usize,
    pub formula_dimacs: String,
    pub clause_vertices: Vec<(VertexId, VertexId)>,
    pub fixed_point: Option<VertexId>,
    pub chain_edges: Vec<EdgeId>,
    pub closing_edge: EdgeId,
    pub split_cost_mode: Option<SplitCostMode>,
    #[serde(default)]
    pub subdivision: Option<SubdivisionScope>,
    pub flipped: Vec<bool>,
    pub gadgets: Vec<LiteralGadget>,
}

impl ReductionArtifact {
    pub fn provenance(&self) -> Provenance {
        Provenance {
            kind: self.kind,
            m: self.m(),
            k: self.k,
            formula_dimacs: self.formula.to_dimacs(),
            clause_vertices: self.clause_vertices.clone(),
            fixed_point: self.fixed_point,
            chain_edges: self.chain_edges.clone(),
            closing_edge: self.closing_edge,
            split_cost_mode: self.split_cost_mode,
            subdivision: self.subdivision,
            flipped: self.flipped.clone(),
            gadgets: self.gadgets.clone(),
        }
    }

    pub fn provenance_json(&self) -> String {
        serde_json::to_string_pretty(&self.provenance()).expect("provenance serializes") + "\n"
    }

    /// Reassembles an artifact from a graph and its provenance, checking
    /// that every reference resolves.
    pub fn from_provenance(graph: CostGraph, provenance: Provenance) -> Result<Self, ReductionError> {
        let bad = |msg: String| ReductionError::Provenance(msg);
        let formula = parse_dimacs(&provenance.formula_dimacs)?;
        if formula.num_clauses() != provenance.m || provenance.clause_vertices.len() != provenance.m {
            return Err(bad("clause count mismatch".into()));
        }
        if provenance.flipped.len() != formula.num_vars() {
            return Err(bad("flip map has the wrong length".into()));
        }
        let vertex_ok = |v: VertexId| graph.contains_vertex(v);
        let edge_ok = |e: EdgeId| graph.edge(e).is_ok();
        let vertices_ok = provenance.clause_vertices.iter().all(|&(u, v)| vertex_ok(u) && vertex_ok(v))
            && provenance.fixed_point.map_or(true, vertex_ok)
            && provenance.gadgets.iter().all(|g| vertex_ok(g.entry) && vertex_ok(g.exit));
        let edges_ok = provenance.chain_edges.iter().all(|&e| edge_ok(e))
            && edge_ok(provenance.closing_edge)
            && provenance.gadgets.iter().all(|g| {
                edge_ok(g.connection_in) && edge_ok(g.connection_out) && g.literal_edges.iter().all(|&e| edge_ok(e))
            });
        if !vertices_ok || !edges_ok {
            return Err(bad("reference to a vertex or edge that is not in the graph".into()));
        }
        Ok(Self {
            kind: provenance.kind,
            graph,
            formula,
            clause_vertices: provenance.clause_vertices,
            fixed_point: provenance.fixed_point,
            chain_edges: provenance.chain_edges,
            closing_edge: provenance.closing_edge,
            gadgets: provenance.gadgets,
            k: provenance.k,
            split_cost_mode: provenance.split_cost_mode,
            subdivision: provenance.subdivision,
            flipped: provenance.flipped,
        })
    }

    pub fn from_provenance_json(graph: CostGraph, json: &str) -> Result<Self, ReductionError> {
        let provenance: Provenance =
            serde_json::from_str(json).map_err(|e| ReductionError::Provenance(e.to_string()))?;
        Self::from_provenance(graph, provenance)
    }
}

//! Random instances and property campaigns.
//!
//! A campaign draws seeded random formulas, reduces them, and checks that
//! the SAT oracle and the graph detector agree on feasibility. Satisfiable
//! instances are also pushed through encode, verify and decode. Every trial
//! is reproducible from its own seed.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{
    dpll_solve, evaluate, normalize_occurrences, Assignment, CnfError, CnfFormula, Literal, Normalized, SatOutcome,
};
use crate::cost::RationalCost;
use crate::detectors::{detect_fpklncct_with, detect_klncc_exact, Detection, DetectorError, SearchBudget};
use crate::graph::{
    check_fpklncct_witness, check_klncc_witness, write_graph_text, CostGraph, EdgeId, TrailSemantics, VertexId,
    Walk,
};
use crate::reductions::{
    decode_assignment_with, encode_witness_cycle, encode_witness_trail, reduce_3o3sat_simple, reduce_3sat_multigraph,
    reduce_undirected_with, ReductionArtifact, ReductionError, ReductionKind, SplitCostMode, SubdivisionScope,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("cannot place {clauses} clauses over {vars} variables")]
    InfeasibleParameters { vars: usize, clauses: usize },
    #[error("path enumeration exceeded {limit} steps")]
    EnumerationTooLarge { limit: u64 },
    #[error("operation needs a {expected} artifact, this one is {found}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples one clause of width `width` over `candidates`; with a planted
/// assignment, one literal is forced to agree with it.
fn sample_clause(
    rng: &mut ChaCha8Rng,
    candidates: &[usize],
    width: usize,
    planted: Option<&Assignment>,
) -> Vec<Literal> {
    let mut vars: Vec<usize> = candidates.choose_multiple(rng, width).copied().collect();
    vars.sort_unstable();
    let mut clause: Vec<Literal> = vars.into_iter().map(|v| Literal::new(v, rng.random_bool(0.5))).collect();
    if let Some(a) = planted {
        if !clause.iter().any(|l| l.eval(a)) {
            let i = rng.random_range(0..clause.len());
            clause[i] = clause[i].negated();
        }
    }
    clause
}

fn sample_3o3sat(rng: &mut ChaCha8Rng, n: usize, m: usize, planted: Option<&Assignment>) -> Result<CnfFormula, HarnessError> {
    if n == 0 || m == 0 || m > 3 * n {
        return Err(HarnessError::InfeasibleParameters { vars: n, clauses: m });
    }
    let mut capacity = vec![3usize; n + 1];
    let mut remaining = 3 * n;
    let mut clauses = Vec::with_capacity(m);
    for i in 0..m {
        let open: Vec<usize> = (1..=n).filter(|&v| capacity[v] > 0).collect();
        // keep at least one slot for every later clause
        let widest = 3.min(open.len()).min(remaining - (m - i - 1));
        let width = rng.random_range(1..=widest);
        let clause = sample_clause(rng, &open, width, planted);
        for lit in &clause {
            capacity[lit.var()] -= 1;
        }
        remaining -= width;
        clauses.push(clause);
    }
    Ok(CnfFormula::new(n, clauses)?)
}

fn sample_3sat(rng: &mut ChaCha8Rng, n: usize, m: usize, planted: Option<&Assignment>) -> Result<CnfFormula, HarnessError> {
    if n == 0 || m == 0 {
        return Err(HarnessError::InfeasibleParameters { vars: n, clauses: m });
    }
    let all: Vec<usize> = (1..=n).collect();
    let clauses = (0..m)
        .map(|_| {
            let width = rng.random_range(1..=3.min(n));
            sample_clause(rng, &all, width, planted)
        })
        .collect();
    Ok(CnfFormula::new(n, clauses)?)
}

fn random_assignment(rng: &mut ChaCha8Rng, n: usize) -> Assignment {
    Assignment::from_values((0..n).map(|_| rng.random_bool(0.5)).collect())
}

/// Random formula in which every variable occurs at most three times.
/// Clause widths are uniform in `1..=3` where the occurrence budget allows.
pub fn gen_random_3o3sat(n: usize, m: usize, seed: u64) -> Result<CnfFormula, HarnessError> {
    sample_3o3sat(&mut rng_for(seed), n, m, None)
}

/// Like [`gen_random_3o3sat`], but every clause agrees with a hidden random
/// assignment, which is returned alongside.
pub fn gen_planted_3o3sat(n: usize, m: usize, seed: u64) -> Result<(CnfFormula, Assignment), HarnessError> {
    let mut rng = rng_for(seed);
    let a = random_assignment(&mut rng, n);
    Ok((sample_3o3sat(&mut rng, n, m, Some(&a))?, a))
}

/// Random formula with clauses of width 1 to 3 and no occurrence cap.
pub fn gen_random_3sat(n: usize, m: usize, seed: u64) -> Result<CnfFormula, HarnessError> {
    sample_3sat(&mut rng_for(seed), n, m, None)
}

pub fn gen_planted_3sat(n: usize, m: usize, seed: u64) -> Result<(CnfFormula, Assignment), HarnessError> {
    let mut rng = rng_for(seed);
    let a = random_assignment(&mut rng, n);
    Ok((sample_3sat(&mut rng, n, m, Some(&a))?, a))
}

/// Deliberate damage applied to the reduced graph, to show that a campaign
/// can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// Negate the cost of `(v_m, u_1)`.
    FlipClosingEdge,
    /// Remove the first lobe edge on the path of the first negated literal.
    DropNegationEdge,
}

fn mutate(artifact: &ReductionArtifact, mutation: Mutation) -> Result<CostGraph, HarnessError> {
    let graph = &artifact.graph;
    Ok(match mutation {
        Mutation::None => graph.clone(),
        Mutation::FlipClosingEdge => {
            let cost = graph.edge(artifact.closing_edge).map_err(ReductionError::from)?.cost;
            graph.with_edge_cost(artifact.closing_edge, -cost).map_err(ReductionError::from)?
        }
        Mutation::DropNegationEdge => match artifact.gadgets.iter().find(|g| !g.literal.is_positive()) {
            Some(g) => graph.without_edge(g.literal_edges[0]).map_err(ReductionError::from)?,
            None => graph.clone(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorAnswer {
    Found,
    NotFound,
    BudgetExceeded,
}

impl DetectorAnswer {
    fn of<W>(d: &Detection<W>) -> Self {
        match d {
            Detection::Found(_) => DetectorAnswer::Found,
            Detection::NotFound => DetectorAnswer::NotFound,
            Detection::BudgetExceeded { .. } => DetectorAnswer::BudgetExceeded,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DetectorAnswer::Found => "found",
            DetectorAnswer::NotFound => "none",
            DetectorAnswer::BudgetExceeded => "budget-exceeded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Agree,
    Disagree,
    BudgetExceeded,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Agree => "agree",
            Verdict::Disagree => "disagree",
            Verdict::BudgetExceeded => "budget-exceeded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RoundtripOptions {
    pub split_cost_mode: SplitCostMode,
    pub subdivision: SubdivisionScope,
    pub mutation: Mutation,
    pub trail_semantics: TrailSemantics,
}

/// Outcome of one oracle-versus-detector comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub oracle_sat: bool,
    pub detector: DetectorAnswer,
    pub verdict: Verdict,
    /// Why the verdict is a disagreement.
    pub reason: Option<String>,
    pub artifact: ReductionArtifact,
    /// The graph the detector ran on (differs from the artifact's under a
    /// mutation).
    pub searched: CostGraph,
    pub witness: Option<Walk>,
}

/// Reduces `formula`, runs the oracle and the detector, and cross-checks
/// witnesses in both directions. Formulas for the 3-occurrence kinds are
/// normalized first. Under a mutation only feasibility is compared.
pub fn roundtrip_check(
    formula: &CnfFormula,
    kind: ReductionKind,
    k: usize,
    budget: SearchBudget,
    options: &RoundtripOptions,
) -> Result<TrialRecord, HarnessError> {
    let oracle = dpll_solve(formula);
    let (artifact, normalized) = match kind {
        ReductionKind::ThreeSatMulti => (reduce_3sat_multigraph(formula)?, None),
        ReductionKind::ThreeO3SatSimple => {
            let norm = normalize_occurrences(formula)?;
            (reduce_3o3sat_simple(&norm.formula)?.with_flips(norm.flipped.clone()), Some(norm))
        }
        ReductionKind::ThreeO3SatUndirected => {
            let norm = normalize_occurrences(formula)?;
            let art = reduce_undirected_with(&norm.formula, k, options.split_cost_mode, options.subdivision)?;
            (art.with_flips(norm.flipped.clone()), Some(norm))
        }
    };
    let searched = mutate(&artifact, options.mutation)?;
    let detection = match kind {
        ReductionKind::ThreeSatMulti => {
            let p = artifact.fixed_point.expect("multigraph artifacts have a fixed point");
            detect_fpklncct_with(&searched, p, k, budget, &options.trail_semantics)?.map(|t| t.into_walk())
        }
        _ => detect_klncc_exact(&searched, k, budget)?.map(|c| c.into_walk()),
    };
    let answer = DetectorAnswer::of(&detection);
    let witness = detection.into_found();

    let mut reason = None;
    if answer == DetectorAnswer::BudgetExceeded {
        // inconclusive
    } else if oracle.is_sat() != witness.is_some() {
        reason = Some(format!(
            "oracle says {}, detector says {}",
            if oracle.is_sat() { "SAT" } else { "UNSAT" },
            answer.name()
        ));
    } else if options.mutation == Mutation::None {
        reason = witness_roundtrip(formula, &artifact, normalized.as_ref(), &oracle, witness.as_ref(), k, options).err();
    }
    let verdict = match (answer, &reason) {
        (DetectorAnswer::BudgetExceeded, _) => Verdict::BudgetExceeded,
        (_, Some(_)) => Verdict::Disagree,
        (_, None) => Verdict::Agree,
    };
    Ok(TrialRecord { oracle_sat: oracle.is_sat(), detector: answer, verdict, reason, artifact, searched, witness })
}

/// Encode the oracle's assignment and decode the detector's witness.
fn witness_roundtrip(
    formula: &CnfFormula,
    artifact: &ReductionArtifact,
    normalized: Option<&Normalized>,
    oracle: &SatOutcome,
    witness: Option<&Walk>,
    k: usize,
    options: &RoundtripOptions,
) -> Result<(), String> {
    let (Some(assignment), Some(witness)) = (oracle.assignment(), witness) else {
        return Ok(());
    };
    let graph = &artifact.graph;
    let local = normalized.map_or_else(|| assignment.clone(), |n| n.to_normalized(assignment));
    match artifact.kind {
        ReductionKind::ThreeSatMulti => {
            let p = artifact.fixed_point.expect("multigraph artifacts have a fixed point");
            let trail = encode_witness_trail(artifact, &local).map_err(|e| format!("encode failed: {e}"))?;
            check_fpklncct_witness(graph, trail.walk(), p, k, &options.trail_semantics)
                .map_err(|e| format!("encoded trail rejected: {e}"))?;
        }
        _ => {
            let cycle = encode_witness_cycle(artifact, &local).map_err(|e| format!("encode failed: {e}"))?;
            check_klncc_witness(graph, cycle.walk(), k).map_err(|e| format!("encoded cycle rejected: {e}"))?;
        }
    }
    let decoded = decode_assignment_with(artifact, witness, &options.trail_semantics).map_err(|e| format!("decode failed: {e}"))?;
    if !evaluate(&artifact.formula, &decoded) || !evaluate(formula, &artifact.to_original(&decoded)) {
        return Err("decoded assignment does not satisfy the formula".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub kind: ReductionKind,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_vars: usize,
    pub max_clauses: usize,
    /// Share of trials drawn from the planted (always satisfiable) sampler.
    pub planted_fraction: f64,
    pub budget: SearchBudget,
    /// Budget multiplier for the single retry of an inconclusive trial.
    pub retry_factor: u64,
    pub options: RoundtripOptions,
}

impl CampaignConfig {
    pub fn new(kind: ReductionKind, k: usize, trials: usize, seed: u64) -> Self {
        let (max_vars, max_clauses) = match kind {
            ReductionKind::ThreeSatMulti => (5, 6),
            _ => (8, 10),
        };
        Self {
            kind,
            k,
            trials,
            seed,
            max_vars,
            max_clauses,
            planted_fraction: 0.5,
            budget: SearchBudget::default(),
            retry_factor: 10,
            options: RoundtripOptions::default(),
        }
    }
}

/// The formula of trial `index` and whether it was planted.
pub fn campaign_instance(config: &CampaignConfig, index: usize) -> Result<(u64, CnfFormula, bool), HarnessError> {
    let seed = config.seed.wrapping_add(index as u64);
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=config.max_vars.max(1));
    let planted = rng.random_bool(config.planted_fraction.clamp(0.0, 1.0));
    let assignment = random_assignment(&mut rng, n);
    let hidden = planted.then_some(&assignment);
    let formula = match config.kind {
        ReductionKind::ThreeSatMulti => {
            let m = rng.random_range(1..=config.max_clauses.max(1));
            sample_3sat(&mut rng, n, m, hidden)?
        }
        _ => {
            let m = rng.random_range(1..=config.max_clauses.max(1).min(3 * n));
            sample_3o3sat(&mut rng, n, m, hidden)?
        }
    };
    Ok((seed, formula, planted))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub seed: u64,
    pub vars: usize,
    pub clauses: usize,
    pub planted: bool,
    pub oracle_sat: bool,
    pub detector: DetectorAnswer,
    pub verdict: Verdict,
    pub retried: bool,
}

/// Everything needed to replay a disagreement offline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
    pub dimacs: String,
    pub graph: String,
    /// Detector witness as edge ids, if it found one.
    pub witness: Option<Vec<EdgeId>>,
    pub witness_start: Option<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub kind: ReductionKind,
    pub k: usize,
    pub seed: u64,
    pub mutation: Mutation,
    pub split_cost_mode: Option<SplitCostMode>,
    pub trials: usize,
    pub agreements: usize,
    pub budget_exceeded: usize,
    pub retried: usize,
    pub sat: usize,
    pub unsat: usize,
    pub planted: usize,
    pub disagreements: Vec<Disagreement>,
    pub outcomes: Vec<TrialOutcome>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CampaignReport {
    pub fn disagreement_count(&self) -> usize {
        self.disagreements.len()
    }

    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty() && self.budget_exceeded == 0
    }

    /// Line-oriented report: one line per trial, then the disagreements,
    /// then a summary. Contains no timing, so equal inputs give equal text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "campaign kind={} k={} seed={} trials={} mutation={}",
            self.kind.name(),
            self.k,
            self.seed,
            self.trials,
            serde_json::to_value(self.mutation).unwrap().as_str().unwrap()
        )
        .unwrap();
        for t in &self.outcomes {
            writeln!(
                out,
                "trial {} seed={} n={} m={} planted={} oracle={} detector={} verdict={}{}",
                t.index,
                t.seed,
                t.vars,
                t.clauses,
                if t.planted { "yes" } else { "no" },
                if t.oracle_sat { "sat" } else { "unsat" },
                t.detector.name(),
                t.verdict.name(),
                if t.retried { " retried" } else { "" }
            )
            .unwrap();
        }
        for d in &self.disagreements {
            writeln!(out, "disagreement trial={} seed={}: {}", d.index, d.seed, d.reason).unwrap();
        }
        writeln!(
            out,
            "summary trials={} agreements={} disagreements={} budget-exceeded={} retried={} sat={} unsat={} planted={}",
            self.trials,
            self.agreements,
            self.disagreements.len(),
            self.budget_exceeded,
            self.retried,
            self.sat,
            self.unsat,
            self.planted
        )
        .unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Runs `config.trials` independent trials in parallel. A trial that runs
/// out of budget is retried once with `retry_factor` times the budget before
/// it counts as budget-exceeded.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport, HarnessError> {
    let started = Instant::now();
    let results: Vec<(TrialOutcome, Option<Disagreement>)> = (0..config.trials)
        .into_par_iter()
        .map(|index| run_trial(config, index))
        .collect::<Result<_, _>>()?;

    let count = |f: &dyn Fn(&TrialOutcome) -> bool| results.iter().filter(|(t, _)| f(t)).count();
    let report = CampaignReport {
        kind: config.kind,
        k: config.k,
        seed: config.seed,
        mutation: config.options.mutation,
        split_cost_mode: (config.kind == ReductionKind::ThreeO3SatUndirected).then_some(config.options.split_cost_mode),
        trials: config.trials,
        agreements: count(&|t| t.verdict == Verdict::Agree),
        budget_exceeded: count(&|t| t.verdict == Verdict::BudgetExceeded),
        retried: count(&|t| t.retried),
        sat: count(&|t| t.oracle_sat),
        unsat: count(&|t| !t.oracle_sat),
        planted: count(&|t| t.planted),
        disagreements: results.iter().filter_map(|(_, d)| d.clone()).collect(),
        outcomes: results.into_iter().map(|(t, _)| t).collect(),
        wall_time: started.elapsed(),
    };
    debug_assert_eq!(report.agreements + report.disagreements.len() + report.budget_exceeded, report.trials);
    Ok(report)
}

fn run_trial(config: &CampaignConfig, index: usize) -> Result<(TrialOutcome, Option<Disagreement>), HarnessError> {
    let (seed, formula, planted) = campaign_instance(config, index)?;
    let mut record = roundtrip_check(&formula, config.kind, config.k, config.budget, &config.options)?;
    let mut retried = false;
    if record.verdict == Verdict::BudgetExceeded {
        retried = true;
        let bigger = config.budget.scaled(config.retry_factor);
        record = roundtrip_check(&formula, config.kind, config.k, bigger, &config.options)?;
    }
    let disagreement = (record.verdict == Verdict::Disagree).then(|| Disagreement {
        index,
        seed,
        reason: record.reason.clone().unwrap_or_default(),
        dimacs: formula.to_dimacs(),
        graph: write_graph_text(&record.searched),
        witness: record.witness.as_ref().map(|w| w.edges.clone()),
        witness_start: record.witness.as_ref().map(|w| w.start),
    });
    let outcome = TrialOutcome {
        index,
        seed,
        vars: formula.num_vars(),
        clauses: formula.num_clauses(),
        planted,
        oracle_sat: record.oracle_sat,
        detector: record.detector,
        verdict: record.verdict,
        retried,
    };
    Ok((outcome, disagreement))
}

/// A path that breaks one of the cost bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathViolation {
    pub walk: Walk,
    pub cost: RationalCost,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PathBoundReport {
    /// Paths `u_h -> v_l`, `h != l`, whose interior avoids clause vertices.
    pub cross_paths: usize,
    /// Such paths cheaper than `m`.
    pub cross_violations: Vec<PathViolation>,
    /// Paths between clause vertices that avoid the closing edge.
    pub spine_paths: usize,
    /// Such paths with negative cost.
    pub spine_violations: Vec<PathViolation>,
}

impl PathBoundReport {
    pub fn holds(&self) -> bool {
        self.cross_violations.is_empty() && self.spine_violations.is_empty()
    }
}

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 50_000_000;

struct PathEnumerator<'a> {
    graph: &'a CostGraph,
    is_clause: Vec<bool>,
    skip_edge: Option<EdgeId>,
    /// Stop at the first clause vertex instead of passing through it.
    stop_at_clause: bool,
    steps: u64,
    limit: u64,
    on_path: Vec<bool>,
    path: Vec<EdgeId>,
}

impl PathEnumerator<'_> {
    fn run(
        &mut self,
        start: VertexId,
        cur: VertexId,
        cost: RationalCost,
        visit: &mut dyn FnMut(VertexId, &[EdgeId], RationalCost),
    ) -> Result<(), HarnessError> {
        for &(e, next) in self.graph.successors(cur) {
            if Some(e) == self.skip_edge || self.on_path[next.0] {
                continue;
            }
            self.steps += 1;
            if self.steps > self.limit {
                return Err(HarnessError::EnumerationTooLarge { limit: self.limit });
            }
            let cost = cost + self.graph.edges()[e.0].cost;
            self.path.push(e);
            if self.is_clause[next.0] {
                visit(next, &self.path, cost);
            }
            if !(self.stop_at_clause && self.is_clause[next.0]) {
                self.on_path[next.0] = true;
                self.run(start, next, cost, visit)?;
                self.on_path[next.0] = false;
            }
            self.path.pop();
        }
        Ok(())
    }
}

/// Exhaustive check of the two path-cost bounds of the simple reduction:
/// every `u_h -> v_l` path (`h != l`) with no clause vertex inside costs at
/// least `m`, and every path between clause vertices that avoids the
/// closing edge costs at least 0.
pub fn check_path_bounds(artifact: &ReductionArtifact, limit: u64) -> Result<PathBoundReport, HarnessError> {
    if artifact.kind != ReductionKind::ThreeO3SatSimple {
        return Err(HarnessError::WrongKind { expected: "3o3sat-simple", found: artifact.kind.name() });
    }
    let graph = &artifact.graph;
    let m = RationalCost::integer(artifact.m() as i128);
    let mut is_clause = vec![false; graph.vertex_count()];
    for &(u, v) in &artifact.clause_vertices {
        is_clause[u.0] = true;
        is_clause[v.0] = true;
    }
    let clause_of_v = |x: VertexId| artifact.clause_vertices.iter().position(|&(_, v)| v == x);
    let mut report = PathBoundReport::default();
    let mut enumerator = PathEnumerator {
        graph,
        is_clause: is_clause.clone(),
        skip_edge: None,
        stop_at_clause: true,
        steps: 0,
        limit,
        on_path: vec![false; graph.vertex_count()],
        path: Vec::new(),
    };

    for (h, &(u, _)) in artifact.clause_vertices.iter().enumerate() {
        enumerator.on_path[u.0] = true;
        let mut visit = |end: VertexId, path: &[EdgeId], cost: RationalCost| {
            if clause_of_v(end).is_some_and(|l| l != h) {
                report.cross_paths += 1;
                if cost < m {
                    report.cross_violations.push(PathViolation { walk: Walk::new(u, path.to_vec()), cost });
                }
            }
        };
        enumerator.run(u, u, RationalCost::ZERO, &mut visit)?;
        enumerator.on_path[u.0] = false;
    }

    enumerator.skip_edge = Some(artifact.closing_edge);
    enumerator.stop_at_clause = false;
    let starts: Vec<VertexId> = artifact.clause_vertices.iter().flat_map(|&(u, v)| [u, v]).collect();
    for s in starts {
        enumerator.on_path[s.0] = true;
        let mut visit = |_: VertexId, path: &[EdgeId], cost: RationalCost| {
            report.spine_paths += 1;
            if cost.is_negative() {
                report.spine_violations.push(PathViolation { walk: Walk::new(s, path.to_vec()), cost });
            }
        };
        enumerator.run(s, s, RationalCost::ZERO, &mut visit)?;
        enumerator.on_path[s.0] = false;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::validate_3o3sat;

    fn fig() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(4, &[&[1, 3], &[-1, 2, 4], &[1, -2, 4]]).unwrap()
    }

    #[test]
    fn generator_examples() {
        let f = gen_random_3o3sat(4, 3, 7).unwrap();
        assert!(validate_3o3sat(&f).is_ok());
        assert_eq!(f.num_clauses(), 3);
        assert_eq!(gen_random_3o3sat(4, 3, 7).unwrap(), f);
        assert_eq!(
            gen_random_3o3sat(1, 10, 0).unwrap_err(),
            HarnessError::InfeasibleParameters { vars: 1, clauses: 10 }
        );
        // tight: every slot used
        let tight = gen_random_3o3sat(2, 6, 3).unwrap();
        assert!(validate_3o3sat(&tight).is_ok());
    }

    #[test]
    fn planted_generators_are_satisfied_by_their_plant() {
        for seed in 0..50 {
            let (f, a) = gen_planted_3o3sat(5, 9, seed).unwrap();
            assert!(validate_3o3sat(&f).is_ok());
            assert!(evaluate(&f, &a));
            let (g, b) = gen_planted_3sat(4, 6, seed).unwrap();
            assert!(evaluate(&g, &b));
        }
    }

    #[test]
    fn roundtrip_examples() {
        let opts = RoundtripOptions::default();
        let budget = SearchBudget::default();
        let r = roundtrip_check(&fig(), ReductionKind::ThreeO3SatSimple, 3, budget, &opts).unwrap();
        assert_eq!((r.verdict, r.oracle_sat, r.detector), (Verdict::Agree, true, DetectorAnswer::Found));

        let unsat = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1], &[2]]).unwrap();
        let r = roundtrip_check(&unsat, ReductionKind::ThreeO3SatSimple, 3, budget, &opts).unwrap();
        assert_eq!((r.verdict, r.oracle_sat, r.detector), (Verdict::Agree, false, DetectorAnswer::NotFound));

        let r = roundtrip_check(&fig(), ReductionKind::ThreeSatMulti, 3, budget, &opts).unwrap();
        assert_eq!((r.verdict, r.detector), (Verdict::Agree, DetectorAnswer::Found));
        let r = roundtrip_check(&unsat, ReductionKind::ThreeSatMulti, 3, budget, &opts).unwrap();
        assert_eq!((r.verdict, r.detector), (Verdict::Agree, DetectorAnswer::NotFound));
    }

    #[test]
    fn flipped_closing_edge_breaks_satisfiable_instances() {
        let opts = RoundtripOptions { mutation: Mutation::FlipClosingEdge, ..Default::default() };
        let r = roundtrip_check(&fig(), ReductionKind::ThreeO3SatSimple, 3, SearchBudget::default(), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Disagree);
        assert!(r.reason.unwrap().contains("oracle says SAT"));
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let r = roundtrip_check(
            &fig(),
            ReductionKind::ThreeO3SatSimple,
            3,
            SearchBudget::expansions(1).unwrap(),
            &RoundtripOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::BudgetExceeded);
    }

    #[test]
    fn small_campaign_is_deterministic() {
        let mut config = CampaignConfig::new(ReductionKind::ThreeO3SatSimple, 3, 12, 99);
        config.max_vars = 4;
        config.max_clauses = 5;
        let a = run_campaign(&config).unwrap();
        let b = run_campaign(&config).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.all_agree(), "{}", a.to_text());
        assert_eq!(a.agreements + a.disagreement_count() + a.budget_exceeded, a.trials);
    }

    #[test]
    fn path_bounds_on_running_example() {
        let art = reduce_3o3sat_simple(&fig()).unwrap();
        let r = check_path_bounds(&art, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.cross_paths > 0 && r.spine_paths > 0);
    }

    #[test]
    fn path_bounds_single_clause() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1]]).unwrap();
        let r = check_path_bounds(&reduce_3o3sat_simple(&f).unwrap(), 1000).unwrap();
        assert!(r.holds());
        assert_eq!(r.cross_paths, 0);
    }

    #[test]
    fn corrupted_connection_violates_cross_bound() {
        let mut art = reduce_3o3sat_simple(&fig()).unwrap();
        let g = art.gadget(0, Literal::pos(1)).unwrap().connection_out;
        art.graph = art.graph.with_edge_cost(g, RationalCost::ZERO).unwrap();
        let r = check_path_bounds(&art, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert!(!r.cross_violations.is_empty());
    }

    #[test]
    fn enumeration_limit_and_kind() {
        let art = reduce_3o3sat_simple(&fig()).unwrap();
        assert_eq!(check_path_bounds(&art, 3).unwrap_err(), HarnessError::EnumerationTooLarge { limit: 3 });
        let multi = reduce_3sat_multigraph(&fig()).unwrap();
        assert!(matches!(check_path_bounds(&multi, 10), Err(HarnessError::WrongKind { .. })));
    }
}

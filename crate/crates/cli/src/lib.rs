//! The `klncc` command line. [`run`] takes argv and two sinks and returns
//! the process exit status, so tests can drive it in-process.
//!
//! Exit status: 0 found / SAT / agree, 1 none / UNSAT / disagree, 2 budget
//! exceeded, 64 usage, 65 malformed input data, 66 missing input file,
//! 70 a found witness failed its own re-check, 74 I/O failure.

mod witness_file;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use klncc::cnf::{dpll_solve, evaluate, normalize_occurrences, parse_dimacs, CnfFormula, SatOutcome};
use klncc::detectors::{detect_fpklncct_with, detect_klncc_exact, Detection, DetectorError, SearchBudget};
use klncc::graph::{
    check_fpklncct_witness, check_klncc_witness, parse_graph_text, to_dot, write_graph_text, CostGraph,
    CycleContainment, CycleFilter, GraphError, TrailSemantics, VertexId, Walk, WitnessError,
};
use klncc::harness::{
    gen_planted_3o3sat, gen_planted_3sat, gen_random_3o3sat, gen_random_3sat, run_campaign, CampaignConfig,
    HarnessError, Mutation,
};
use klncc::reductions::{
    decode_assignment_with, reduce_3o3sat_simple, reduce_3sat_multigraph, reduce_undirected_with,
    ReductionArtifact, ReductionError, ReductionKind, SplitCostMode, SubdivisionScope,
};

pub use witness_file::{parse_witness, write_witness};

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_NONE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "klncc", version, about = "Long negative-cost cycles and the SAT reductions behind them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduce a DIMACS formula to a graph plus a provenance sidecar.
    Reduce(ReduceArgs),
    /// Search a graph for a negative cycle (or fixed-point trail) with all
    /// cycles of length >= k.
    Detect(DetectArgs),
    /// Solve a DIMACS formula with the DPLL oracle.
    SolveSat(SolveArgs),
    /// Check a witness file against a graph.
    Verify(VerifyArgs),
    /// Map a witness on a reduced graph back to a truth assignment.
    Decode(DecodeArgs),
    /// Generate a random formula in DIMACS form.
    Gen(GenArgs),
    /// Run an oracle-versus-detector campaign over random formulas.
    Roundtrip(RoundtripArgs),
    /// Render a graph in Graphviz DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "3sat-multi")]
    ThreeSatMulti,
    #[value(name = "3o3sat", alias = "3o3sat-simple")]
    ThreeO3Sat,
    #[value(name = "3o3sat-undirected")]
    ThreeO3SatUndirected,
}

impl From<KindArg> for ReductionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::ThreeSatMulti => ReductionKind::ThreeSatMulti,
            KindArg::ThreeO3Sat => ReductionKind::ThreeO3SatSimple,
            KindArg::ThreeO3SatUndirected => ReductionKind::ThreeO3SatUndirected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum CostModeArg {
    #[default]
    Split,
    Duplicate,
}

impl From<CostModeArg> for SplitCostMode {
    fn from(m: CostModeArg) -> Self {
        match m {
            CostModeArg::Split => SplitCostMode::Split,
            CostModeArg::Duplicate => SplitCostMode::Duplicate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum SubdivideArg {
    #[default]
    All,
    PlainLiteral,
}

impl From<SubdivideArg> for SubdivisionScope {
    fn from(s: SubdivideArg) -> Self {
        match s {
            SubdivideArg::All => SubdivisionScope::AllLobeEdges,
            SubdivideArg::PlainLiteral => SubdivisionScope::PlainLiteralEdges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum ReadingArg {
    #[default]
    EdgeSubset,
    Contiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum FilterArg {
    #[default]
    All,
    NegativeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum MutationArg {
    #[default]
    None,
    FlipClosingEdge,
    DropNegationEdge,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::None => Mutation::None,
            MutationArg::FlipClosingEdge => Mutation::FlipClosingEdge,
            MutationArg::DropNegationEdge => Mutation::DropNegationEdge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum GenKindArg {
    #[value(name = "3sat")]
    ThreeSat,
    #[default]
    #[value(name = "3o3sat")]
    ThreeO3Sat,
}

#[derive(Debug, Args)]
struct SemanticsArgs {
    /// Which edge sets of a trail count as contained cycles.
    #[arg(long, value_enum, default_value_t)]
    cycle_reading: ReadingArg,
    /// Apply the length bound only to negative contained cycles.
    #[arg(long, value_enum, default_value_t)]
    cycle_filter: FilterArg,
    /// Accept trails that do not return to their start.
    #[arg(long)]
    open_trail: bool,
}

impl SemanticsArgs {
    fn semantics(&self) -> TrailSemantics {
        TrailSemantics {
            containment: match self.cycle_reading {
                ReadingArg::EdgeSubset => CycleContainment::EdgeSubset,
                ReadingArg::Contiguous => CycleContainment::Contiguous,
            },
            filter: match self.cycle_filter {
                FilterArg::All => CycleFilter::All,
                FilterArg::NegativeOnly => CycleFilter::NegativeOnly,
            },
            require_closed: !self.open_trail,
        }
    }
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Maximum search-tree expansions.
    #[arg(long, env = "KLNCC_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
    /// Maximum number of edges in a candidate.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_length: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        let expansions = self.budget.unwrap_or(SearchBudget::DEFAULT_EXPANSIONS);
        let length = self.max_length.map_or(usize::MAX, |l| usize::try_from(l).unwrap_or(usize::MAX));
        SearchBudget::new(expansions, length).expect("both limits are positive")
    }
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Length bound recorded in the sidecar. The undirected reduction needs
    /// k >= 4 and defaults to 4.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    k: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    cost_mode: CostModeArg,
    #[arg(long, value_enum, default_value_t)]
    subdivide: SubdivideArg,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    /// Vertex id or label; switches to the fixed-point trail search.
    #[arg(long)]
    fixed_point: Option<String>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Write the witness here instead of to stdout.
    #[arg(long)]
    witness_out: Option<PathBuf>,
    #[command(flatten)]
    semantics: SemanticsArgs,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    cnf: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    witness: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long)]
    fixed_point: Option<String>,
    #[command(flatten)]
    semantics: SemanticsArgs,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    witness: PathBuf,
    /// Defaults to `<graph>.provenance.json`.
    #[arg(long)]
    provenance: Option<PathBuf>,
    #[command(flatten)]
    semantics: SemanticsArgs,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    vars: usize,
    #[arg(long)]
    clauses: usize,
    #[arg(long)]
    seed: u64,
    /// Plant a satisfying assignment.
    #[arg(long)]
    planted: bool,
    #[arg(long, value_enum, default_value_t)]
    kind: GenKindArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    #[arg(long)]
    trials: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_vars: Option<usize>,
    #[arg(long)]
    max_clauses: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    mutation: MutationArg,
    #[arg(long, value_enum, default_value_t)]
    cost_mode: CostModeArg,
    #[arg(long, value_enum, default_value_t)]
    subdivide: SubdivideArg,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    semantics: SemanticsArgs,
    /// Full JSON report, one record per trial.
    #[arg(long)]
    report_out: Option<PathBuf>,
    /// The text summary, also printed to stdout.
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportDotArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    fn data(path: &Path, err: impl std::fmt::Display) -> Self {
        Self::new(EXIT_DATA, format!("{}: {err}", path.display()))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::new(EXIT_IO, e.to_string())
    }
}

impl From<DetectorError> for Failure {
    fn from(e: DetectorError) -> Self {
        match e {
            DetectorError::InvalidK(_) | DetectorError::InvalidBudget | DetectorError::NotDirected => {
                Self::usage(e.to_string())
            }
            DetectorError::CostOverflow | DetectorError::Graph(_) => Self::new(EXIT_DATA, e.to_string()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InfeasibleParameters { .. } => Self::usage(e.to_string()),
            _ => Self::new(EXIT_DATA, e.to_string()),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        let code = if e.kind() == io::ErrorKind::NotFound { EXIT_NO_INPUT } else { EXIT_IO };
        Failure::new(code, format!("{}: {e}", path.display()))
    })
}

fn write_output(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<CostGraph, Failure> {
    parse_graph_text(&read_input(path)?).map_err(|e| Failure::data(path, e))
}

fn load_cnf(path: &Path) -> Result<CnfFormula, Failure> {
    parse_dimacs(&read_input(path)?).map_err(|e| Failure::data(path, e))
}

fn load_walk(graph: &CostGraph, path: &Path) -> Result<Walk, Failure> {
    parse_witness(graph, &read_input(path)?).map_err(|e| Failure::data(path, e))
}

fn sidecar_path(graph: &Path) -> PathBuf {
    let mut name = graph.as_os_str().to_owned();
    name.push(".provenance.json");
    PathBuf::from(name)
}

fn resolve_vertex(graph: &CostGraph, token: &str) -> Result<VertexId, Failure> {
    graph
        .find_vertex(token)
        .ok_or_else(|| Failure::usage(format!("--fixed-point: no vertex with id or label `{token}`")))
}

fn to_usize(k: u64) -> usize {
    usize::try_from(k).unwrap_or(usize::MAX)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit status. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                EXIT_FOUND
            };
        }
    };
    let outcome = match cli.command {
        Command::Reduce(a) => reduce(a, stdout),
        Command::Detect(a) => detect(a, stdout),
        Command::SolveSat(a) => solve_sat(a, stdout),
        Command::Verify(a) => verify(a, stdout),
        Command::Decode(a) => decode(a, stdout),
        Command::Gen(a) => gen(a, stdout),
        Command::Roundtrip(a) => roundtrip(a, stdout),
        Command::ExportDot(a) => export_dot(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "klncc: {}", f.message);
            f.code
        }
    }
}

fn reduce(a: ReduceArgs, out: &mut dyn Write) -> Outcome {
    let formula = load_cnf(&a.cnf)?;
    let k = a.k.map(to_usize);
    let reduction_failure = |e: ReductionError| match e {
        ReductionError::KTooSmall(_) => Failure::usage(e.to_string()),
        _ => Failure::data(&a.cnf, e),
    };
    let mut artifact = match a.kind {
        KindArg::ThreeSatMulti => reduce_3sat_multigraph(&formula).map_err(reduction_failure)?,
        KindArg::ThreeO3Sat => {
            let norm = normalize_occurrences(&formula).map_err(|e| Failure::data(&a.cnf, e))?;
            reduce_3o3sat_simple(&norm.formula).map_err(reduction_failure)?.with_flips(norm.flipped)
        }
        KindArg::ThreeO3SatUndirected => {
            let norm = normalize_occurrences(&formula).map_err(|e| Failure::data(&a.cnf, e))?;
            reduce_undirected_with(&norm.formula, k.unwrap_or(4), a.cost_mode.into(), a.subdivide.into())
                .map_err(reduction_failure)?
                .with_flips(norm.flipped)
        }
    };
    if let Some(k) = k {
        artifact.k = k;
    }
    write_output(&a.out, &write_graph_text(&artifact.graph))?;
    let sidecar = sidecar_path(&a.out);
    write_output(&sidecar, &artifact.provenance_json())?;
    writeln!(
        out,
        "kind={} vertices={} edges={} k={}{}",
        artifact.kind.name(),
        artifact.graph.vertex_count(),
        artifact.graph.edge_count(),
        artifact.k,
        match artifact.fixed_point {
            Some(p) => format!(" fixed-point={}", artifact.graph.vertex_name(p)),
            None => String::new(),
        }
    )?;
    Ok(EXIT_FOUND)
}

/// Re-reads a rendered witness and checks it from scratch.
fn self_check(
    graph: &CostGraph,
    text: &str,
    k: usize,
    fixed_point: Option<VertexId>,
    semantics: &TrailSemantics,
) -> Result<(), String> {
    let walk = parse_witness(graph, text)?;
    let checked = match fixed_point {
        Some(p) => check_fpklncct_witness(graph, &walk, p, k, semantics).map(|_| ()),
        None => check_klncc_witness(graph, &walk, k).map(|_| ()),
    };
    checked.map_err(|e| e.to_string())
}

fn detect(a: DetectArgs, out: &mut dyn Write) -> Outcome {
    let graph = load_graph(&a.graph)?;
    let k = to_usize(a.k);
    let budget = a.budget.budget();
    let semantics = a.semantics.semantics();
    let fixed_point = a.fixed_point.as_deref().map(|t| resolve_vertex(&graph, t)).transpose()?;
    let detection = match fixed_point {
        Some(p) => detect_fpklncct_with(&graph, p, k, budget, &semantics)?.map(|t| t.into_walk()),
        None => detect_klncc_exact(&graph, k, budget)?.map(|c| c.into_walk()),
    };
    let walk = match detection {
        Detection::Found(w) => w,
        Detection::NotFound => {
            writeln!(out, "none")?;
            return Ok(EXIT_NONE);
        }
        Detection::BudgetExceeded { expansions } => {
            writeln!(out, "budget exceeded after {expansions} expansions")?;
            return Ok(EXIT_BUDGET);
        }
    };
    let text = write_witness(&graph, &walk).map_err(|e| Failure::new(EXIT_SOFTWARE, e.to_string()))?;
    self_check(&graph, &text, k, fixed_point, &semantics)
        .map_err(|e| Failure::new(EXIT_SOFTWARE, format!("found witness failed re-verification: {e}")))?;
    match &a.witness_out {
        Some(path) => {
            write_output(path, &text)?;
            let summary = text.lines().last().unwrap_or_default().trim_start_matches("# ");
            writeln!(out, "found {summary}")?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_FOUND)
}

fn solve_sat(a: SolveArgs, out: &mut dyn Write) -> Outcome {
    let formula = load_cnf(&a.cnf)?;
    match dpll_solve(&formula) {
        SatOutcome::Sat(assignment) => {
            writeln!(out, "s SATISFIABLE\nv {assignment}")?;
            Ok(EXIT_FOUND)
        }
        SatOutcome::Unsat => {
            writeln!(out, "s UNSATISFIABLE")?;
            Ok(EXIT_NONE)
        }
    }
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let graph = load_graph(&a.graph)?;
    let walk = load_walk(&graph, &a.witness)?;
    let k = to_usize(a.k);
    let semantics = a.semantics.semantics();
    let fixed_point = a.fixed_point.as_deref().map(|t| resolve_vertex(&graph, t)).transpose()?;
    let checked = match fixed_point {
        Some(p) => check_fpklncct_witness(&graph, &walk, p, k, &semantics).map(|t| (t.cost(), t.len())),
        None => check_klncc_witness(&graph, &walk, k).map(|c| (c.cost(), c.len())),
    };
    match checked {
        Ok((cost, length)) => {
            writeln!(out, "valid cost={cost} length={length}")?;
            Ok(EXIT_FOUND)
        }
        Err(WitnessError::Defect(d)) => {
            writeln!(out, "invalid: {d}")?;
            Ok(EXIT_NONE)
        }
        Err(WitnessError::Graph(e @ GraphError::InvalidK(_))) => Err(Failure::usage(e.to_string())),
        Err(WitnessError::Graph(e)) => Err(Failure::data(&a.witness, e)),
    }
}

fn decode(a: DecodeArgs, out: &mut dyn Write) -> Outcome {
    let graph = load_graph(&a.graph)?;
    let walk = load_walk(&graph, &a.witness)?;
    let sidecar = a.provenance.clone().unwrap_or_else(|| sidecar_path(&a.graph));
    let artifact =
        ReductionArtifact::from_provenance_json(graph, &read_input(&sidecar)?).map_err(|e| Failure::data(&sidecar, e))?;
    match decode_assignment_with(&artifact, &walk, &a.semantics.semantics()) {
        Ok(local) => {
            let original = artifact.to_original(&local);
            let satisfied = evaluate(&artifact.formula, &local);
            writeln!(out, "v {original}")?;
            writeln!(out, "{}", if satisfied { "satisfies" } else { "does not satisfy" })?;
            Ok(if satisfied { EXIT_FOUND } else { EXIT_NONE })
        }
        Err(ReductionError::NotAWitness(e)) => {
            writeln!(out, "invalid: {e}")?;
            Ok(EXIT_NONE)
        }
        Err(e) => Err(Failure::data(&a.witness, e)),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Outcome {
    let formula = match (a.kind, a.planted) {
        (GenKindArg::ThreeSat, false) => gen_random_3sat(a.vars, a.clauses, a.seed)?,
        (GenKindArg::ThreeSat, true) => gen_planted_3sat(a.vars, a.clauses, a.seed)?.0,
        (GenKindArg::ThreeO3Sat, false) => gen_random_3o3sat(a.vars, a.clauses, a.seed)?,
        (GenKindArg::ThreeO3Sat, true) => gen_planted_3o3sat(a.vars, a.clauses, a.seed)?.0,
    };
    let text = formula.to_dimacs();
    match &a.out {
        Some(path) => write_output(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_FOUND)
}

fn roundtrip(a: RoundtripArgs, out: &mut dyn Write) -> Outcome {
    let mut config = CampaignConfig::new(a.kind.into(), to_usize(a.k), a.trials, a.seed);
    if let Some(n) = a.max_vars {
        config.max_vars = n;
    }
    if let Some(m) = a.max_clauses {
        config.max_clauses = m;
    }
    if config.max_vars == 0 || config.max_clauses == 0 {
        return Err(Failure::usage("--max-vars and --max-clauses must be positive"));
    }
    config.budget = a.budget.budget();
    config.options.mutation = a.mutation.into();
    config.options.split_cost_mode = a.cost_mode.into();
    config.options.subdivision = a.subdivide.into();
    config.options.trail_semantics = a.semantics.semantics();
    let report = run_campaign(&config)?;
    let text = report.to_text();
    out.write_all(text.as_bytes())?;
    if let Some(path) = &a.summary_out {
        write_output(path, &text)?;
    }
    if let Some(path) = &a.report_out {
        write_output(path, &report.to_json())?;
    }
    Ok(if report.disagreement_count() > 0 {
        EXIT_NONE
    } else if report.budget_exceeded > 0 {
        EXIT_BUDGET
    } else {
        EXIT_FOUND
    })
}

fn export_dot(a: ExportDotArgs, out: &mut dyn Write) -> Outcome {
    let graph = load_graph(&a.graph)?;
    let dot = to_dot(&graph);
    match &a.out {
        Some(path) => write_output(path, &dot)?,
        None => out.write_all(dot.as_bytes())?,
    }
    Ok(EXIT_FOUND)
}

//! CNF formulas with at most three literals per clause.
//!
//! Formulas are validated on construction: every clause has one to three
//! literals and never repeats a variable. Occurrence bookkeeping in the
//! reductions relies on that ("the j-th occurrence of x" is well defined
//! only when a variable shows up at most once per clause).

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A signed variable reference; variables are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    var: usize,
    positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        assert!(var >= 1, "variables are numbered from 1");
        Self { var, positive }
    }

    pub fn pos(var: usize) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: usize) -> Self {
        Self::new(var, false)
    }

    /// `3` is `x3`, `-3` is its negation, `0` is not a literal.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        (value != 0).then(|| Self::new(value.unsigned_abs() as usize, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn var(self) -> usize {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Self { var: self.var, positive: !self.positive }
    }

    pub fn eval(self, assignment: &Assignment) -> bool {
        assignment.value(self.var) == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "~x{}", self.var)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("clause {clause} has {len} literals; at most 3 are allowed")]
    ClauseTooLarge { clause: usize, len: usize },
    #[error("clause {clause} contains both x{var} and its negation")]
    TautologicalClause { clause: usize, var: usize },
    #[error("clause {clause} repeats literal {literal}")]
    DuplicateLiteral { clause: usize, literal: Literal },
    #[error("clause {clause} mentions x{var} but the formula has {num_vars} variables")]
    VariableOutOfRange { clause: usize, var: usize, num_vars: usize },
    #[error("not a 3-occurrence formula: {}", describe_violations(.0))]
    Not3O3Sat(Vec<OccurrenceViolation>),
}

fn describe_violations(v: &[OccurrenceViolation]) -> String {
    v.iter()
        .map(|o| format!("x{} occurs {} times", o.var, o.occurrences))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Clauses over variables `1..=num_vars`; clause indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, CnfError> {
        for (clause, lits) in clauses.iter().enumerate() {
            match lits.len() {
                0 => return Err(CnfError::EmptyClause { clause }),
                1..=3 => {}
                len => return Err(CnfError::ClauseTooLarge { clause, len }),
            }
            for (i, &lit) in lits.iter().enumerate() {
                if lit.var > num_vars {
                    return Err(CnfError::VariableOutOfRange { clause, var: lit.var, num_vars });
                }
                for &other in &lits[..i] {
                    if other == lit {
                        return Err(CnfError::DuplicateLiteral { clause, literal: lit });
                    }
                    if other.var == lit.var {
                        return Err(CnfError::TautologicalClause { clause, var: lit.var });
                    }
                }
            }
        }
        Ok(Self { num_vars, clauses })
    }

    /// Builds from DIMACS-style signed integers.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses
            .iter()
            .enumerate()
            .map(|(clause, c)| {
                c.iter()
                    .map(|&l| {
                        Literal::from_dimacs(l).ok_or(CnfError::Syntax {
                            line: 0,
                            message: format!("clause {clause} contains literal 0"),
                        })
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &[Literal] {
        &self.clauses[index]
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{} ", lit.to_dimacs()).unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("(empty)");
        }
        for clause in &self.clauses {
            let lits: Vec<String> = clause.iter().map(ToString::to_string).collect();
            write!(f, "({})", lits.join(" v "))?;
        }
        Ok(())
    }
}

/// Parses DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>` header,
/// then zero-terminated clauses that may span lines. A `%` line ends input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let syntax = |line: usize, message: String| CnfError::Syntax { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let (n, m) = match parts.as_slice() {
                ["p", "cnf", n, m] => (n.parse::<usize>(), m.parse::<usize>()),
                _ => return Err(syntax(line_no, format!("expected `p cnf <vars> <clauses>`, found `{line}`"))),
            };
            match (n, m) {
                (Ok(n), Ok(m)) => header = Some((n, m)),
                _ => return Err(syntax(line_no, format!("bad counts in `{line}`"))),
            }
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| syntax(line_no, "clause before `p cnf` header".into()))?;
        for token in line.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| syntax(line_no, format!("`{token}` is not an integer literal")))?;
            match Literal::from_dimacs(value) {
                None => clauses.push(std::mem::take(&mut current)),
                Some(lit) if lit.var > num_vars => {
                    return Err(CnfError::VariableOutOfRange { clause: clauses.len(), var: lit.var, num_vars })
                }
                Some(lit) => current.push(lit),
            }
        }
    }

    let (num_vars, num_clauses) = header.ok_or_else(|| syntax(last_line, "missing `p cnf` header".into()))?;
    if !current.is_empty() {
        return Err(syntax(last_line, "last clause is not terminated by 0".into()));
    }
    if clauses.len() != num_clauses {
        return Err(syntax(
            last_line,
            format!("header declares {num_clauses} clauses but {} were found", clauses.len()),
        ));
    }
    CnfFormula::new(num_vars, clauses)
}

/// A total truth assignment over `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn uniform(num_vars: usize, value: bool) -> Self {
        Self(vec![value; num_vars])
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Self(values)
    }

    /// Bit `i` of `bits` is the value of variable `i + 1`.
    pub fn from_bits(num_vars: usize, bits: u64) -> Self {
        Self((0..num_vars).map(|i| bits >> i & 1 == 1).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn value(&self, var: usize) -> bool {
        self.0[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.0[var - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Assignment {
    /// DIMACS solution style: `1 -2 3 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &v) in self.0.iter().enumerate() {
            write!(f, "{}{} ", if v { "" } else { "-" }, i + 1)?;
        }
        f.write_str("0")
    }
}

pub fn evaluate(formula: &CnfFormula, assignment: &Assignment) -> bool {
    formula
        .clauses
        .iter()
        .all(|clause| clause.iter().any(|lit| lit.eval(assignment)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub clause: usize,
    pub positive: bool,
}

/// Where and how often one variable occurs, in clause order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableOccurrences {
    pub var: usize,
    pub positive_count: usize,
    pub negative_count: usize,
    pub occurrences: Vec<Occurrence>,
}

/// Occurrence patterns of a variable in a 3-occurrence formula. The
/// reductions build gadgets for the first three only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OccurrenceCase {
    Absent,
    /// Only positive occurrences (one to three).
    AllPositive,
    /// One positive and one negative occurrence.
    OnePositiveOneNegative,
    /// Two positive occurrences and one negative.
    TwoPositiveOneNegative,
    /// Only negative occurrences.
    AllNegative,
    /// One positive occurrence and two negative.
    OnePositiveTwoNegative,
    /// More than three occurrences.
    Excessive,
}

impl OccurrenceCase {
    pub fn is_normalized(self) -> bool {
        matches!(
            self,
            Self::Absent | Self::AllPositive | Self::OnePositiveOneNegative | Self::TwoPositiveOneNegative
        )
    }
}

impl VariableOccurrences {
    pub fn total(&self) -> usize {
        self.positive_count + self.negative_count
    }

    pub fn case(&self) -> OccurrenceCase {
        match (self.positive_count, self.negative_count) {
            (p, n) if p + n > 3 => OccurrenceCase::Excessive,
            (0, 0) => OccurrenceCase::Absent,
            (_, 0) => OccurrenceCase::AllPositive,
            (1, 1) => OccurrenceCase::OnePositiveOneNegative,
            (2, 1) => OccurrenceCase::TwoPositiveOneNegative,
            (0, _) => OccurrenceCase::AllNegative,
            _ => OccurrenceCase::OnePositiveTwoNegative,
        }
    }
}

/// Per-variable occurrence counts and ordered occurrence lists; entry `i`
/// describes variable `i + 1`.
pub fn occurrence_profile(formula: &CnfFormula) -> Vec<VariableOccurrences> {
    let mut profile: Vec<VariableOccurrences> = (1..=formula.num_vars)
        .map(|var| VariableOccurrences { var, positive_count: 0, negative_count: 0, occurrences: Vec::new() })
        .collect();
    for (clause, lits) in formula.clauses.iter().enumerate() {
        for lit in lits {
            let entry = &mut profile[lit.var - 1];
            if lit.positive {
                entry.positive_count += 1;
            } else {
                entry.negative_count += 1;
            }
            entry.occurrences.push(Occurrence { clause, positive: lit.positive });
        }
    }
    profile
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceViolation {
    pub var: usize,
    pub occurrences: usize,
}

/// Ok iff every variable occurs at most three times.
pub fn validate_3o3sat(formula: &CnfFormula) -> Result<(), Vec<OccurrenceViolation>> {
    let violations: Vec<_> = occurrence_profile(formula)
        .into_iter()
        .filter(|v| v.total() > 3)
        .map(|v| OccurrenceViolation { var: v.var, occurrences: v.total() })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// A formula whose variables were polarity-flipped where negative
/// occurrences outnumbered positive ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalized {
    pub formula: CnfFormula,
    /// `flipped[i]` is set when variable `i + 1` now stands for the negation
    /// of the original variable.
    pub flipped: Vec<bool>,
}

impl Normalized {
    /// Maps an assignment of the normalized formula back to the original.
    pub fn to_original(&self, assignment: &Assignment) -> Assignment {
        self.translate(assignment)
    }

    /// Maps an assignment of the original formula to the normalized one.
    pub fn to_normalized(&self, assignment: &Assignment) -> Assignment {
        self.translate(assignment)
    }

    fn translate(&self, assignment: &Assignment) -> Assignment {
        Assignment(
            assignment
                .0
                .iter()
                .zip(&self.flipped)
                .map(|(&v, &flip)| v != flip)
                .collect(),
        )
    }
}

/// Rewrites all-negative and one-positive-two-negative variables into their
/// mirrored positive forms by renaming `x` to `~y`.
pub fn normalize_occurrences(formula: &CnfFormula) -> Result<Normalized, CnfError> {
    validate_3o3sat(formula).map_err(CnfError::Not3O3Sat)?;
    let flipped: Vec<bool> = occurrence_profile(formula)
        .iter()
        .map(|v| v.negative_count > v.positive_count)
        .collect();
    let clauses = formula
        .clauses
        .iter()
        .map(|clause| {
            clause
                .iter()
                .map(|&lit| if flipped[lit.var - 1] { lit.negated() } else { lit })
                .collect()
        })
        .collect();
    Ok(Normalized { formula: CnfFormula { num_vars: formula.num_vars, clauses }, flipped })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Assignment),
    Unsat,
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatOutcome::Sat(_))
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            SatOutcome::Sat(a) => Some(a),
            SatOutcome::Unsat => None,
        }
    }
}

/// Complete DPLL search with unit propagation.
///
/// Branches on the lowest-index unassigned variable, trying `true` first.
/// Variables left unconstrained once every clause is satisfied are set to
/// `true`.
pub fn dpll_solve(formula: &CnfFormula) -> SatOutcome {
    let mut values = vec![None; formula.num_vars];
    if dpll(formula, &mut values) {
        SatOutcome::Sat(Assignment(values.into_iter().map(|v| v.unwrap_or(true)).collect()))
    } else {
        SatOutcome::Unsat
    }
}

enum Propagation {
    Conflict,
    Satisfied,
    Open,
}

fn propagate(formula: &CnfFormula, values: &mut [Option<bool>]) -> Propagation {
    loop {
        let mut changed = false;
        let mut all_satisfied = true;
        for clause in &formula.clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for &lit in clause {
                match values[lit.var - 1] {
                    Some(v) if v == lit.positive => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            all_satisfied = false;
            match (open, unassigned) {
                (0, _) => return Propagation::Conflict,
                (1, Some(lit)) => {
                    values[lit.var - 1] = Some(lit.positive);
                    changed = true;
                }
                _ => {}
            }
        }
        if all_satisfied {
            return Propagation::Satisfied;
        }
        if !changed {
            return Propagation::Open;
        }
    }
}

fn dpll(formula: &CnfFormula, values: &mut Vec<Option<bool>>) -> bool {
    match propagate(formula, values) {
        Propagation::Conflict => return false,
        Propagation::Satisfied => return true,
        Propagation::Open => {}
    }
    let var = values
        .iter()
        .position(Option::is_none)
        .expect("an open clause has an unassigned variable");
    for choice in [true, false] {
        let mut next = values.clone();
        next[var] = Some(choice);
        if dpll(formula, &mut next) {
            *values = next;
            return true;
        }
    }
    false
}

//! Negative-cost cycles of bounded-below length.
//!
//! This crate models directed (multi)graphs with exact rational edge costs
//! and unit edge lengths, and provides:
//!
//! * exact detectors for long negative-cost cycles and for negative-cost
//!   trails through a fixed point ([`detectors`]),
//! * the polynomial reductions from 3SAT and 3-occurrence 3SAT that make
//!   those problems NP-hard, with witness translation both ways
//!   ([`reductions`]),
//! * a CNF toolkit with a DPLL oracle ([`cnf`]),
//! * a randomized property harness tying it all together ([`harness`]).

pub mod cnf;
pub mod cost;
pub mod detectors;
pub mod graph;
pub mod harness;
pub mod reductions;

pub use cost::RationalCost;

//! How the reading of "cycle contained in a trail" changes the multigraph
//! equivalence.

use klncc::cnf::CnfFormula;
use klncc::detectors::{detect_fpklncct_with, Detection, SearchBudget};
use klncc::graph::{CycleContainment, CycleFilter, TrailSemantics};
use klncc::harness::{run_campaign, CampaignConfig, CampaignReport, DetectorAnswer};
use klncc::reductions::{reduce_3sat_multigraph, ReductionKind};

fn campaign(semantics: TrailSemantics) -> CampaignReport {
    let mut config = CampaignConfig::new(ReductionKind::ThreeSatMulti, 3, 200, 42);
    config.options.trail_semantics = semantics;
    run_campaign(&config).unwrap()
}

fn mismatches(r: &CampaignReport) -> usize {
    r.outcomes
        .iter()
        .filter(|t| t.oracle_sat != (t.detector == DetectorAnswer::Found))
        .count()
}

fn semantics(containment: CycleContainment, filter: CycleFilter, require_closed: bool) -> TrailSemantics {
    TrailSemantics { containment, filter, require_closed }
}

#[test]
fn edge_subset_reading_matches_the_oracle_with_either_filter() {
    for filter in [CycleFilter::All, CycleFilter::NegativeOnly] {
        let r = campaign(semantics(CycleContainment::EdgeSubset, filter, true));
        assert!(r.all_agree(), "{filter:?}\n{}", r.to_text());
        assert!(r.unsat > 0);
    }
}

#[test]
fn contiguous_reading_accepts_unsatisfiable_formulas() {
    let r = campaign(semantics(CycleContainment::Contiguous, CycleFilter::All, true));
    assert!(mismatches(&r) > 0);
}

#[test]
fn open_trails_accept_unsatisfiable_formulas() {
    let r = campaign(semantics(CycleContainment::EdgeSubset, CycleFilter::All, false));
    assert!(mismatches(&r) > 0);
}

#[test]
fn smallest_contiguous_counterexample() {
    // x1 and not x1: the trail u1 y z v1 u2 z y v2 u1 uses y->z and z->y, but
    // never consecutively
    let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
    let art = reduce_3sat_multigraph(&f).unwrap();
    let p = art.fixed_point.unwrap();
    let budget = SearchBudget::default();
    let contiguous = semantics(CycleContainment::Contiguous, CycleFilter::All, true);
    let found = detect_fpklncct_with(&art.graph, p, 3, budget, &contiguous).unwrap();
    let trail = found.into_found().expect("contiguous reading finds a trail");
    assert_eq!(trail.len(), 8);
    assert_eq!(trail.cost(), klncc::RationalCost::integer(-1));

    let strict = detect_fpklncct_with(&art.graph, p, 3, budget, &TrailSemantics::default()).unwrap();
    assert_eq!(strict, Detection::NotFound);
}

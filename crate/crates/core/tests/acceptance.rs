//! Acceptance criteria 1-9, exact arithmetic, one line per criterion on
//! stderr.

use std::io::Write;

use brauer_casimir::casimir::OmegaMode;
use brauer_casimir::suites::{self, CriterionOutcome, DEFAULT_SEED};

fn report(outcome: CriterionOutcome) {
    let mut err = std::io::stderr().lock();
    writeln!(err, "{}", outcome.line()).unwrap();
    for r in outcome.reports.iter().filter(|r| !r.pass || !r.flags.is_empty()) {
        writeln!(err, "    {}", r.summary()).unwrap();
    }
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn criterion_1_brauer_structure() {
    report(suites::brauer_structure(5));
}

#[test]
fn criterion_2_jucys_murphy() {
    report(suites::jucys_murphy_suite(4, 5));
}

#[test]
fn criterion_3_representation() {
    report(suites::representation_suite(DEFAULT_SEED, 50));
}

#[test]
fn criterion_4_partial_traces() {
    report(suites::partial_trace_suite());
}

#[test]
fn criterion_5_defining_relations() {
    report(suites::defining_relations_suite());
}

#[test]
fn criterion_6_theorems() {
    report(suites::theorem_suite(&suites::theorem_grid(), OmegaMode::Coupled));
}

#[test]
fn criterion_7_corollaries() {
    report(suites::corollary_suite(&suites::corollary_grid(), OmegaMode::Coupled));
}

#[test]
fn criterion_8_trace_permutation() {
    report(suites::lemma_suite(DEFAULT_SEED, 20));
}

#[test]
fn criterion_9_symmetric_functions() {
    report(suites::symfun_suite());
}

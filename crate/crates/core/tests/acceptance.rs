//! Acceptance suite: every reference value and tolerance the build must
//! reproduce, one test per criterion, printing one line each. Run with
//! `cargo test -p mubnet --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use mubnet::reproduce::{self, CheckOutcome};

fn report(criterion: &str, outcomes: &[CheckOutcome], elapsed: Duration, budget: Option<Duration>) {
    for c in outcomes {
        println!(
            "ACCEPT {criterion} [{}] {}: {}",
            c.key,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    if let Some(b) = budget {
        println!(
            "ACCEPT {criterion} runtime {:.2?} (budget {:.2?}): {}",
            elapsed,
            b,
            if elapsed <= b { "PASS" } else { "FAIL" }
        );
    }
    assert!(
        outcomes.iter().all(|c| c.pass),
        "{criterion} failed: {:?}",
        outcomes.iter().filter(|c| !c.pass).map(|c| &c.key).collect::<Vec<_>>()
    );
    if let Some(b) = budget {
        assert!(elapsed <= b, "{criterion} exceeded runtime budget {b:?}: {elapsed:?}");
    }
}

fn run(filter: &str) -> (Vec<CheckOutcome>, Duration) {
    let start = Instant::now();
    let outcomes = reproduce::run_all(Some(filter));
    assert!(!outcomes.is_empty(), "no checks matched {filter:?}");
    (outcomes, start.elapsed())
}

#[test]
fn criterion_1_net_reproduction() {
    let (outcomes, elapsed) = run("net-d");
    assert_eq!(outcomes.len(), 3);
    report("criterion-1", &outcomes, elapsed, Some(Duration::from_secs(1)));
}

#[test]
fn criterion_2_mub_counts_and_quality() {
    let (outcomes, elapsed) = run("mubs-d");
    assert_eq!(outcomes.len(), 7);
    report("criterion-2", &outcomes, elapsed, Some(Duration::from_secs(10)));
}

#[test]
fn criterion_3_census_counts() {
    let (outcomes, elapsed) = run("census-d");
    assert_eq!(outcomes.len(), 4);
    report("criterion-3", &outcomes, elapsed, Some(Duration::from_secs(60)));
}

#[test]
fn criterion_4_net_cell_purity() {
    let (outcomes, _) = run("cell-purity-d");
    assert_eq!(outcomes.len(), 4);
    report("criterion-4", &outcomes, Duration::ZERO, None);
}

#[test]
fn criterion_5_latin_operator_law() {
    let (outcomes, _) = run("latin-operator-d");
    assert_eq!(outcomes.len(), 4);
    report("criterion-5", &outcomes, Duration::ZERO, None);
}

#[test]
fn criterion_6_shifting_property() {
    let (outcomes, _) = run("shifting-d");
    assert_eq!(outcomes.len(), 4);
    report("criterion-6", &outcomes, Duration::ZERO, None);
}

#[test]
fn criterion_7_macneish_pipeline() {
    let (outcomes, _) = run("macneish-d");
    assert_eq!(outcomes.len(), 2);
    report("criterion-7", &outcomes, Duration::ZERO, None);
}

#[test]
fn criterion_8_mate_spot_checks() {
    let (outcomes, elapsed) = run("mate-");
    assert_eq!(outcomes.len(), 2);
    report("criterion-8", &outcomes, elapsed, Some(Duration::from_secs(5)));
}

#[test]
fn criterion_9_field_layer() {
    let (outcomes, _) = run("field-gf");
    assert_eq!(outcomes.len(), 4);
    report("criterion-9", &outcomes, Duration::ZERO, None);
}

#[test]
fn criterion_10_incomplete_net() {
    let (outcomes, _) = run("incomplete-net");
    assert_eq!(outcomes.len(), 1);
    report("criterion-10", &outcomes, Duration::ZERO, None);
}

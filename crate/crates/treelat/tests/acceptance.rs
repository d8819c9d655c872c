//! One test per acceptance suite. Each runs the corresponding seeded
//! self-test suite, prints a single pass/fail line (visible under
//! `cargo test -- --nocapture`), and asserts both the exact checks and
//! the wall-clock budget.

use treelat::selftest::run_suite;

const SEED: u64 = 0x5eed_1a77;

fn run(name: &str) {
    let result = run_suite(name, SEED).expect("suite exists");
    let status = if result.passed && result.within_budget() {
        "pass"
    } else {
        "FAIL"
    };
    println!(
        "{status} {name}: {} ({} ms, budget {} ms)",
        result.details, result.millis, result.budget_millis
    );
    assert!(result.passed, "{name}: {}", result.details);
    assert!(
        result.within_budget(),
        "{name}: took {} ms, budget {} ms",
        result.millis,
        result.budget_millis
    );
}

#[test]
fn criterion_1_cantor_isometry() {
    run("cantor-isometry");
}

#[test]
fn criterion_2_cantor_round_trip() {
    run("cantor-round-trip");
}

#[test]
fn criterion_3_lattice_oracle() {
    run("lattice-oracle");
}

#[test]
fn criterion_4_partial_sum_identity() {
    run("partial-sum-identity");
}

#[test]
fn criterion_5_trunk_approximation() {
    run("trunk-approximation");
}

#[test]
fn criterion_6_ordinal_duality() {
    run("ordinal-duality");
}

#[test]
fn criterion_7_projection() {
    run("projection");
}

#[test]
fn criterion_8_isometry_extraction() {
    run("isometry-extraction");
}

#[test]
fn criterion_9_ordinal_rank_oracle() {
    run("ordinal-rank-oracle");
}

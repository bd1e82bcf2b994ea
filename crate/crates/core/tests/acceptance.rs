//! The acceptance battery: one test per criterion, each printing its
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the per-criterion report.

use mmb_core::suite::{run_one, CriterionResult};

fn check(id: usize) {
    let r: CriterionResult = run_one(id, false).expect("criterion exists");
    println!(
        "criterion {:2}: {} — {} ({} ms) {}",
        r.id,
        if r.pass { "PASS" } else { "FAIL" },
        r.name,
        r.millis,
        r.details
    );
    assert!(r.pass, "criterion {} failed: {}", r.id, r.details);
}

#[test]
fn criterion_01_dgla_axioms() {
    check(1);
}

#[test]
fn criterion_02_dimensions_and_frozen_blocks() {
    check(2);
}

#[test]
fn criterion_03_homology_dimensions() {
    check(3);
}

#[test]
fn criterion_04_homotopy_identities() {
    check(4);
}

#[test]
fn criterion_05_tree_layer() {
    check(5);
}

#[test]
fn criterion_06_gauge_independence() {
    check(6);
}

#[test]
fn criterion_07_three_point_closed_form() {
    check(7);
}

#[test]
fn criterion_08_helicity_violation() {
    check(8);
}

#[test]
fn criterion_09_five_point_factorization() {
    check(9);
}

#[test]
fn criterion_10_four_point_factorization() {
    check(10);
}

#[test]
fn criterion_11_homogeneity() {
    check(11);
}

#[test]
fn criterion_12_permutation_invariance() {
    check(12);
}

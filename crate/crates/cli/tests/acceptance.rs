//! The acceptance gate: runs every numbered criterion and prints one
//! pass/fail line per criterion. Run with `-- --nocapture` to watch the
//! lines stream; the per-criterion wall times go to stderr.

use euler_crm_cli::accept::run_acceptance;

const ACCEPTANCE_SEED: u64 = 20260824;

#[test]
fn acceptance_criteria() {
    let outcome = run_acceptance(ACCEPTANCE_SEED, true);
    for line in &outcome.lines {
        println!("{line}");
    }
    let failed: Vec<&str> = outcome
        .results
        .criteria
        .iter()
        .filter(|c| c.verdict != "pass")
        .map(|c| c.name.as_str())
        .collect();
    assert!(
        outcome.all_passed,
        "acceptance failures: {failed:?}; reproducible = {:?}",
        outcome.reproducible
    );
}

//! The eight acceptance criteria, in order, each printed as a PASS/FAIL
//! line. Sizes, tolerances and time limits live in `selftest::acceptance`.

use walshlab::selftest;
use walshlab::Calibration;

#[test]
fn acceptance_criteria() {
    let outcomes = selftest::acceptance(&Calibration::builtin());
    assert_eq!(outcomes.len(), 8);
    for (i, o) in outcomes.iter().enumerate() {
        println!("criterion {}: {}", i + 1, o.line());
    }
    let failed: Vec<String> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.passed)
        .map(|(i, o)| format!("{} ({})", i + 1, o.name))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}

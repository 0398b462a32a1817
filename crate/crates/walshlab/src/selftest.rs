//! The `selftest` suites: a quick pass over every check at reduced sizes and
//! the exhaustive pass at acceptance sizes.

use crate::calibration::Calibration;
use crate::checks::{self, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Exhaustive,
}

/// Growth of `√(q-1)·ratio` over the grid demanded at acceptance; the
/// closed form gives about 1.645.
pub const ACCEPTANCE_GROWTH: f64 = 2.0;

pub const LOWER_BOUND_NS: [u32; 5] = [4, 6, 8, 10, 16];

pub fn run(level: Level, calibration: &Calibration) -> Vec<Outcome> {
    match level {
        Level::Quick => vec![
            checks::lower_bound_values(&LOWER_BOUND_NS, None),
            checks::growth_law(&LOWER_BOUND_NS, 1.0, None),
            checks::tile_identities(6, None),
            checks::key_decompositions(10, 12, calibration, None),
            checks::certificates(10, 6, calibration, None),
            checks::transforms(12, 6, None),
            checks::weighted(8, calibration, None),
            checks::scan_values(10, &[8, 10], calibration, None),
        ],
        Level::Exhaustive => acceptance(calibration),
    }
}

/// All checks at full size with their time limits, in criterion order.
pub fn acceptance(calibration: &Calibration) -> Vec<Outcome> {
    vec![
        checks::lower_bound_values(&LOWER_BOUND_NS, Some(1.0)),
        checks::growth_law(&LOWER_BOUND_NS, ACCEPTANCE_GROWTH, Some(5.0)),
        checks::tile_identities(8, Some(30.0)),
        checks::key_decompositions(10, 200, calibration, Some(120.0)),
        checks::certificates(10, 200, calibration, Some(300.0)),
        checks::transforms(14, 8, None),
        checks::weighted(10, calibration, None),
        checks::scan_values(12, &[8, 10, 12], calibration, None),
    ]
}

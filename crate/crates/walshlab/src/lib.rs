//! File formats, seeded families, calibration and the experiment drivers
//! behind the `walshlab` command-line tool.

pub mod calibration;
pub mod checks;
pub mod families;
pub mod formats;
pub mod scans;
pub mod selftest;
pub mod trials;

pub use calibration::Calibration;
pub use formats::{InputError, InputResult};

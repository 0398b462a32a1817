//! Observed constants of the decomposition and certificate suites.
//!
//! The stored file comes from `walshlab calibrate`, run on seeds disjoint from
//! the ones the tests use, with every maximum multiplied by [`HEADROOM`].
//! Later runs are regression-checked against it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walshlab_core::Resolution;

use crate::families::FAMILY_VERSION;
use crate::formats::{InputError, InputResult};
use crate::scans::{weight_rows, ScanConfig};
use crate::trials::{key_instance, multiplier_instance, square_instance, DecompositionConstants};

/// Safety factor applied to observed maxima.
pub const HEADROOM: f64 = 1.5;

/// Exponent of `[w]_{A_p}` in the weighted ceiling.
pub const WEIGHTED_EXPONENT: f64 = 1.5;

/// Default first seed of a calibration run; test suites use seeds below it.
pub const CALIBRATION_SEED: u64 = 1_000_000;

const BUILTIN: &str = include_str!("../calibration.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub family_version: u32,
    pub command: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub seed: u64,
    pub trials: usize,
    pub headroom: f64,
    pub decomposition_psi2: DecompositionConstants,
    pub decomposition_lq: DecompositionConstants,
    pub multiplier_ratio: f64,
    pub square_ratio: f64,
    /// `C` in `ratio ≤ C [w]_{A_p}^{3/2}`.
    pub weighted_constant: f64,
}

impl Calibration {
    pub fn builtin() -> Calibration {
        serde_json::from_str(BUILTIN).expect("shipped calibration file parses")
    }

    pub fn load(path: &std::path::Path) -> InputResult<Calibration> {
        let c: Calibration = crate::formats::read_json(path)?;
        if c.family_version != FAMILY_VERSION {
            return Err(InputError::Invalid(format!(
                "calibration family version {} does not match {}",
                c.family_version, FAMILY_VERSION
            )));
        }
        Ok(c)
    }
}

/// Runs `trials` instances of every suite starting at `seed` and records the
/// maxima times [`HEADROOM`].
pub fn calibrate(res: Resolution, seed: u64, trials: usize) -> InputResult<Calibration> {
    let seeds: Vec<u64> = (0..trials as u64).map(|i| seed + i).collect();

    let keys = seeds
        .par_iter()
        .map(|&s| key_instance(s, res))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut psi2, mut lq) = (
        DecompositionConstants::default(),
        DecompositionConstants::default(),
    );
    for k in &keys {
        psi2.absorb(&k.psi2);
        lq.absorb(&k.lq);
    }

    let mult = seeds
        .par_iter()
        .map(|&s| multiplier_instance(s, res).map(|o| o.certificate.ratio))
        .collect::<Result<Vec<_>, _>>()?;
    let square = seeds
        .par_iter()
        .map(|&s| square_instance(s, res).map(|o| o.certificate.ratio))
        .collect::<Result<Vec<_>, _>>()?;

    let config = ScanConfig {
        seed,
        ..ScanConfig::default()
    };
    let weighted = weight_rows(res, &config)?
        .iter()
        .map(|r| r.ratio / r.characteristic.powf(WEIGHTED_EXPONENT))
        .fold(0.0, f64::max);

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(Calibration {
        family_version: FAMILY_VERSION,
        command: format!(
            "walshlab --N {} calibrate --seed {seed} --trials {trials}",
            res.level()
        ),
        n: res.level(),
        seed,
        trials,
        headroom: HEADROOM,
        decomposition_psi2: psi2.scaled(HEADROOM),
        decomposition_lq: lq.scaled(HEADROOM),
        multiplier_ratio: max(&mult) * HEADROOM,
        square_ratio: max(&square) * HEADROOM,
        weighted_constant: weighted * HEADROOM,
    })
}

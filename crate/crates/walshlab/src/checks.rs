//! Pass/fail checks shared by `walshlab selftest` and the acceptance tests.
//! Each check takes its sizes as arguments so the quick suite can run a
//! reduced version of the same code.

use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use walshlab_core::experiments::{lower_bound, rademacher_sum, spike};
use walshlab_core::haar::{haar_forward, haar_inverse};
use walshlab_core::square::s_lambda;
use walshlab_core::tiles::{
    local_basis, projection_tile_expansion, signed_haar_factor, tile_sum, wave_packet,
};
use walshlab_core::walsh::{project, walsh_forward, walsh_inverse, walsh_sign};
use walshlab_core::{DyadicInterval, FrequencyInterval, Resolution, Signal};

use crate::calibration::{Calibration, WEIGHTED_EXPONENT};
use crate::families::rng;
use crate::scans::{run_scan, weight_rows, ScanConfig, ScanKind};
use crate::trials::{key_instance, multiplier_instance, square_instance, DecompositionConstants};

/// Seeds of the key-decomposition suite start here.
pub const KEY_SEEDS: u64 = 0;
pub const MULTIPLIER_SEEDS: u64 = 10_000;
pub const SQUARE_SEEDS: u64 = 20_000;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

/// Runs `body`, timing it and folding errors into a failure.
fn timed(
    name: &'static str,
    limit: Option<f64>,
    body: impl FnOnce() -> Result<(bool, String), String>,
) -> Outcome {
    let start = Instant::now();
    let result = body();
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    if let Some(limit) = limit {
        if seconds > limit {
            passed = false;
            let _ = write!(detail, "; exceeded {limit}s");
        }
    }
    Outcome {
        name,
        passed,
        detail,
        seconds,
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Lower-bound pairing and norm identity for each `n` at `N = n + 2`.
pub fn lower_bound_values(ns: &[u32], limit: Option<f64>) -> Outcome {
    timed("lower-bound values", limit, || {
        let mut worst_pair = 0f64;
        let mut worst_norm = 0f64;
        for &n in ns {
            let rep = lower_bound(n, Resolution::new(n + 2).map_err(err)?).map_err(err)?;
            worst_pair = worst_pair.max((rep.pairing - rep.expected_pairing).abs());
            worst_norm = worst_norm.max(rep.norm_identity_error);
        }
        Ok((
            worst_pair <= 1e-12 && worst_norm <= 1e-10,
            format!("max pairing error {worst_pair:.2e} (≤1e-12), max norm identity error {worst_norm:.2e} (≤1e-10)"),
        ))
    })
}

/// `(q-1)·ratio` within a factor four of a constant and `√(q-1)·ratio`
/// strictly increasing, by at least `min_growth` from first to last `n`.
pub fn growth_law(ns: &[u32], min_growth: f64, limit: Option<f64>) -> Outcome {
    timed("growth law", limit, || {
        let mut lin = Vec::new();
        let mut sqrt = Vec::new();
        for &n in ns {
            let rep = lower_bound(n, Resolution::new(n + 2).map_err(err)?).map_err(err)?;
            lin.push(rep.linear_scaled);
            sqrt.push(rep.sqrt_scaled);
        }
        let lo = lin.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = lin.iter().copied().fold(0.0, f64::max);
        let spread = hi / lo;
        let monotone = sqrt.windows(2).all(|w| w[1] > w[0]);
        let growth = sqrt.last().unwrap_or(&0.0) / sqrt.first().unwrap_or(&1.0);
        Ok((
            spread <= 4.0 && monotone && growth >= min_growth,
            format!(
                "linear spread {spread:.3} (≤4), sqrt-scaled monotone {monotone}, growth {growth:.4}× (≥{min_growth}×)"
            ),
        ))
    })
}

/// `⟨w_p, w_q⟩` over the smaller of the two time intervals.
fn packet_inner(
    a: &Signal,
    ia: &DyadicInterval,
    b: &Signal,
    ib: &DyadicInterval,
    res: Resolution,
) -> f64 {
    let small = if ia.level() >= ib.level() { ia } else { ib };
    let cells = small.cells(res).expect("inside");
    let h = res.cell_width();
    cells.map(|i| a.values()[i] * b.values()[i]).sum::<f64>() * h
}

/// Tile orthogonality, expansion and signed-Haar identities, exhaustive at
/// the given level.
pub fn tile_identities(level: u32, limit: Option<f64>) -> Outcome {
    timed("tile identities", limit, || {
        let res = Resolution::new(level).map_err(err)?;
        let tiles: Vec<_> = res
            .intervals()
            .flat_map(|i| local_basis(&i, res).expect("inside"))
            .collect();
        let packets: Vec<Signal> = tiles
            .iter()
            .map(|t| wave_packet(t, res).expect("inside"))
            .collect();
        let mismatches: usize = (0..tiles.len())
            .into_par_iter()
            .map(|i| {
                let (a, pa) = (&tiles[i], &packets[i]);
                let mut bad = 0;
                for (b, pb) in tiles.iter().zip(&packets) {
                    let ip = if a.interval().intersects(&b.interval()) {
                        packet_inner(pa, &a.interval(), pb, &b.interval(), res)
                    } else {
                        0.0
                    };
                    if a.intersects(b) != (ip.abs() > 1e-9) {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();

        let mut r = rng(level as u64);
        let f = Signal::from_fn(res, |_| r.gen_range(-1.0..1.0));
        let expansion_error = (1..=res.cells())
            .into_par_iter()
            .map(|n| {
                let tiles =
                    projection_tile_expansion(n, &DyadicInterval::unit(), res).expect("n ≤ 2^N");
                let by_tiles = tile_sum(&f, &tiles).expect("same resolution");
                let spectral = project(&f, &FrequencyInterval::new(0, n).expect("nonempty"))
                    .expect("in range");
                by_tiles.max_abs_diff(&spectral).expect("same resolution")
            })
            .reduce(|| 0.0, f64::max);

        let haar_error = (1..res.cells())
            .into_par_iter()
            .map(|n| {
                let mut worst = 0f64;
                let w_n = Signal::from_fn(res, |i| walsh_sign(n, i, level));
                for tile in
                    projection_tile_expansion(n, &DyadicInterval::unit(), res).expect("n ≤ 2^N")
                {
                    let sigma = signed_haar_factor(n, &tile, res).expect("expansion tile");
                    let prod = w_n
                        .mul(&wave_packet(&tile, res).expect("inside"))
                        .expect("same resolution");
                    let h = haar_forward(&prod);
                    worst = worst.max(h.mean().abs());
                    for (interval, c) in h.iter() {
                        let expected = if interval == tile.interval() {
                            sigma
                        } else {
                            0.0
                        };
                        worst = worst.max((c - expected).abs());
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max);

        Ok((
            mismatches == 0 && expansion_error <= 1e-10 && haar_error <= 1e-10,
            format!(
                "{} tiles, {mismatches} orthogonality mismatches, expansion error {expansion_error:.2e}, signed-Haar error {haar_error:.2e}",
                tiles.len()
            ),
        ))
    })
}

/// Key decompositions on `count` random instances, checked for exactness
/// and against the calibrated constants.
pub fn key_decompositions(
    level: u32,
    count: u64,
    calibration: &Calibration,
    limit: Option<f64>,
) -> Outcome {
    timed("key decomposition", limit, || {
        let res = Resolution::new(level).map_err(err)?;
        let obs = (KEY_SEEDS..KEY_SEEDS + count)
            .into_par_iter()
            .map(|s| key_instance(s, res))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let (mut psi2, mut lq) = (
            DecompositionConstants::default(),
            DecompositionConstants::default(),
        );
        let mut exact = 0f64;
        let mut stopping_ok = true;
        let mut children = 0;
        for o in &obs {
            psi2.absorb(&o.psi2);
            lq.absorb(&o.lq);
            for r in [&o.psi2, &o.lq] {
                let scale = o.f_norm.max(1.0);
                exact = exact.max(r.reconstruction_error / scale);
                exact = exact.max(r.orthogonality / scale);
                exact = exact.max(r.transfer_error / scale);
                stopping_ok &= r.stopping.passed && r.max_block_jump_tiles <= 2 * o.jumps;
            }
            children += o.children;
        }
        let within = psi2.within(&calibration.decomposition_psi2)
            && lq.within(&calibration.decomposition_lq);
        Ok((
            exact <= 1e-10 && stopping_ok && within,
            format!(
                "{count} instances, {children} stopping intervals, relative exact-identity error {exact:.2e}, \
                 stopping/tile bounds {stopping_ok}, ψ2 constants {psi2:?}, L^q constants {lq:?}, within calibration {within}"
            ),
        ))
    })
}

/// Multiplier and square-function certificates on random instances.
pub fn certificates(
    level: u32,
    count: u64,
    calibration: &Calibration,
    limit: Option<f64>,
) -> Outcome {
    timed("sparse certificates", limit, || {
        let res = Resolution::new(level).map_err(err)?;
        let mult = (MULTIPLIER_SEEDS..MULTIPLIER_SEEDS + count)
            .into_par_iter()
            .map(|s| multiplier_instance(s, res))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let square = (SQUARE_SEEDS..SQUARE_SEEDS + count)
            .into_par_iter()
            .map(|s| square_instance(s, res))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;

        let mut min_margin = f64::INFINITY;
        let mut cross = 0f64;
        let mut constancy = 0f64;
        let mut violations = 0;
        let (mut mult_ratio, mut square_ratio) = (0f64, 0f64);
        for o in &mult {
            let c = &o.certificate;
            violations += c.violations.len();
            mult_ratio = mult_ratio.max(c.ratio);
            for e in &c.collection {
                min_margin = min_margin.min(e.margin);
            }
            for node in &c.nodes {
                cross = cross.max(node.cross_error / o.scale.max(1.0));
            }
        }
        for o in &square {
            let c = &o.certificate;
            violations += c.violations.len();
            square_ratio = square_ratio.max(c.ratio);
            for e in &c.collection {
                min_margin = min_margin.min(e.margin);
            }
            for node in &c.nodes {
                constancy = constancy.max(node.cross_error / o.scale.max(1.0));
            }
        }
        let ratios_ok =
            mult_ratio <= calibration.multiplier_ratio && square_ratio <= calibration.square_ratio;
        Ok((
            min_margin >= 0.5 && cross <= 1e-10 && constancy <= 1e-10 && violations == 0 && ratios_ok,
            format!(
                "{count}+{count} runs, min margin {min_margin:.3} (≥0.5), cross terms {cross:.2e}, \
                 constancy {constancy:.2e}, violations {violations}, ratios {mult_ratio:.3}/{square_ratio:.3} \
                 vs calibrated {:.3}/{:.3}",
                calibration.multiplier_ratio, calibration.square_ratio
            ),
        ))
    })
}

/// Direct `O(4^N)` Paley transform.
pub fn direct_walsh(f: &Signal) -> Vec<f64> {
    let res = f.resolution();
    let h = res.cell_width();
    (0..res.cells())
        .map(|n| {
            f.values()
                .iter()
                .enumerate()
                .map(|(i, v)| v * walsh_sign(n, i, res.level()))
                .sum::<f64>()
                * h
        })
        .collect()
}

/// Round trips and Parseval up to `max_level`, and the fast transform against
/// the direct one up to `direct_level`.
pub fn transforms(max_level: u32, direct_level: u32, limit: Option<f64>) -> Outcome {
    timed("transforms", limit, || {
        let mut worst = 0f64;
        let mut direct = 0f64;
        for level in 1..=max_level {
            let res = Resolution::new(level).map_err(err)?;
            let mut r = rng(100 + level as u64);
            for _ in 0..4 {
                let f = Signal::from_fn(res, |_| r.gen_range(-1.0..1.0));
                let norm = f.norm2();
                let spec = walsh_forward(&f);
                let back = walsh_inverse(&spec);
                worst = worst.max(back.sub(&f).map_err(err)?.norm2() / norm);
                worst = worst.max((spec.energy().sqrt() - norm).abs() / norm);
                let haar = haar_forward(&f);
                worst = worst.max(haar_inverse(&haar).sub(&f).map_err(err)?.norm2() / norm);
                worst = worst.max((haar.energy().sqrt() - norm).abs() / norm);
                if level <= direct_level {
                    let oracle = direct_walsh(&f);
                    for (a, b) in spec.coeffs().iter().zip(&oracle) {
                        direct = direct.max((a - b).abs() / norm);
                    }
                }
            }
        }
        Ok((
            worst <= 1e-12 && direct <= 1e-12,
            format!("relative round-trip/Parseval error {worst:.2e}, fast vs direct {direct:.2e}"),
        ))
    })
}

/// Power weights at `p`, against `C [w]^{3/2}`.
pub fn weighted(level: u32, calibration: &Calibration, limit: Option<f64>) -> Outcome {
    timed("weighted ceiling", limit, || {
        let res = Resolution::new(level).map_err(err)?;
        let config = ScanConfig::default();
        let rows = weight_rows(res, &config).map_err(err)?;
        let mut worst = 0f64;
        for r in &rows {
            worst = worst.max(
                r.ratio
                    / (calibration.weighted_constant * r.characteristic.powf(WEIGHTED_EXPONENT)),
            );
        }
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.characteristic, r.ratio)).collect();
        let fit = walshlab_core::weights::fit_exponent(&points).unwrap_or(f64::NAN);
        Ok((
            worst <= 1.0,
            format!(
                "{} weights at p={}, worst ratio/ceiling {worst:.3} (≤1), fitted exponent {fit:.3}",
                rows.len(),
                config.p
            ),
        ))
    })
}

/// Closed-form `√n` values and cross-resolution stability of the scan tables.
pub fn scan_values(
    max_n: u32,
    levels: &[u32],
    calibration: &Calibration,
    limit: Option<f64>,
) -> Outcome {
    timed("zygmund/cww scans", limit, || {
        let res = Resolution::new(max_n + 1).map_err(err)?;
        let lambdas: Vec<usize> = (0..res.level()).map(|k| 1 << k).collect();
        let mut exact = 0f64;
        for n in 1..=max_n {
            let f = spike(res, n).map_err(err)?;
            let spec = walsh_forward(&f);
            let l2 = lambdas
                .iter()
                .map(|&l| spec.coeffs()[l].powi(2))
                .sum::<f64>()
                .sqrt();
            exact = exact.max((l2 - (n as f64).sqrt()).abs());
            let g = rademacher_sum(res, n, 0b1011_0110_1101).map_err(err)?;
            let s = s_lambda(&g, 2).map_err(err)?.sup_norm();
            exact = exact.max((s - (n as f64).sqrt()).abs());
        }

        let config = ScanConfig::default();
        let mut spread = 0f64;
        let mut finite = true;
        for kind in [ScanKind::Zygmund, ScanKind::Cww] {
            let tables = levels
                .iter()
                .map(|&l| {
                    run_scan(kind, Resolution::new(l).map_err(err)?, &config, calibration)
                        .map_err(err)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let reference = tables[0].column("ratio");
            for t in &tables {
                let col = t.column("ratio");
                finite &= col.len() == reference.len() && col.iter().all(|x| x.is_finite());
                for (a, b) in col.iter().zip(&reference) {
                    if *b > 0.0 {
                        spread = spread.max((a / b - 1.0).abs());
                    }
                }
            }
        }
        Ok((
            exact <= 1e-12 && finite && spread <= 0.2,
            format!("closed-form error {exact:.2e} (≤1e-12), tables finite {finite}, max relative drift {spread:.2e} (≤0.2)"),
        ))
    })
}

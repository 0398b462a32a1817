//! Configurable scans producing a table that is written both as CSV and as
//! JSON. Rows are computed in parallel and collected in input order, so
//! reports are byte-identical for identical configurations.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walshlab_core::experiments::{
    cww_scan, lacunarity, q_scaling_certificates, q_scaling_lower_bound, zygmund_scan, QScalingRow,
};
use walshlab_core::sparse::CertifyConfig;
use walshlab_core::weights::{
    ap_characteristic, fit_exponent, weighted_norm_ratio, Weight, WeightedOperator,
};
use walshlab_core::Resolution;

use crate::calibration::{Calibration, WEIGHTED_EXPONENT};
use crate::families::{mean_zero_family, rng, standard_family, BASE_LEVEL, FAMILY_VERSION};
use crate::formats::{InputError, InputResult};
use crate::trials::random_atom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    Zygmund,
    Cww,
    Qscaling,
    Weights,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Zygmund => "zygmund",
            ScanKind::Cww => "cww",
            ScanKind::Qscaling => "qscaling",
            ScanKind::Weights => "weights",
        }
    }
}

/// Scan configuration; every field has a default so `{}` is valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub seed: u64,
    /// Random members added to the deterministic part of the family.
    pub random_members: usize,
    /// Zygmund frequencies; defaults to `2^k` below `2^BASE_LEVEL`.
    pub lambdas: Option<Vec<usize>>,
    /// Lower-bound family sizes for the q-scaling table.
    pub ns: Vec<u32>,
    /// Exponents for the certificate part of the q-scaling table.
    pub qs: Vec<f64>,
    /// Random atoms in the q-scaling table.
    pub trials: usize,
    pub jumps: usize,
    /// Weighted scans.
    pub p: f64,
    pub lambda: usize,
    pub alphas: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            seed: 7,
            random_members: 8,
            lambdas: None,
            ns: vec![4, 6, 8, 10, 16],
            qs: vec![1.05, 1.1, 1.25, 1.5, 2.0],
            trials: 2,
            jumps: 2,
            p: 2.5,
            lambda: 3,
            alphas: vec![-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9, 1.2, 1.4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub kind: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub seed: u64,
    pub family_version: u32,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, Cell>,
}

impl ScanTable {
    fn new(kind: ScanKind, res: Resolution, seed: u64, header: &[&str]) -> Self {
        ScanTable {
            kind: kind.name().to_string(),
            n: res.level(),
            seed,
            family_version: FAMILY_VERSION,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.header.iter().position(|h| h == name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match &r[i] {
                Cell::Num(x) => Some(*x),
                Cell::Text(_) => None,
            })
            .collect()
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        match self.summary.get(key) {
            Some(Cell::Num(x)) => Some(*x),
            _ => None,
        }
    }
}

pub fn run_scan(
    kind: ScanKind,
    res: Resolution,
    config: &ScanConfig,
    calibration: &Calibration,
) -> InputResult<ScanTable> {
    match kind {
        ScanKind::Zygmund => zygmund(res, config),
        ScanKind::Cww => cww(res, config),
        ScanKind::Qscaling => qscaling(res, config),
        ScanKind::Weights => weights(res, config, calibration),
    }
}

fn zygmund(res: Resolution, config: &ScanConfig) -> InputResult<ScanTable> {
    let lambdas = config.lambdas.clone().unwrap_or_else(|| {
        (0..BASE_LEVEL.min(res.level()))
            .map(|k| 1usize << k)
            .collect()
    });
    let rho = lacunarity(&lambdas)?;
    let family = standard_family(res, config.seed, config.random_members);
    let report = zygmund_scan(&lambdas, &family)?;
    let mut t = ScanTable::new(
        ScanKind::Zygmund,
        res,
        config.seed,
        &["name", "l2_coefficients", "psi2_norm", "ratio"],
    );
    for r in &report.rows {
        t.rows.push(vec![
            r.name.clone().into(),
            r.numerator.into(),
            r.denominator.into(),
            r.ratio.into(),
        ]);
    }
    t.summary.insert("lacunarity".into(), rho.into());
    t.summary
        .insert("max_ratio".into(), report.max_ratio.into());
    Ok(t)
}

fn cww(res: Resolution, config: &ScanConfig) -> InputResult<ScanTable> {
    let family = mean_zero_family(res, config.seed, config.random_members);
    let report = cww_scan(&family)?;
    let mut t = ScanTable::new(
        ScanKind::Cww,
        res,
        config.seed,
        &["name", "exp_l2_norm", "square_sup", "ratio"],
    );
    for r in &report.rows {
        t.rows.push(vec![
            r.name.clone().into(),
            r.numerator.into(),
            r.denominator.into(),
            r.ratio.into(),
        ]);
    }
    t.summary
        .insert("max_ratio".into(), report.max_ratio.into());
    Ok(t)
}

fn qscaling(res: Resolution, config: &ScanConfig) -> InputResult<ScanTable> {
    let mut rows: Vec<QScalingRow> = q_scaling_lower_bound(&config.ns)?;
    let certified: Vec<InputResult<Vec<QScalingRow>>> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let mut r = rng(seed);
            let f = crate::families::spiky_signal(res, &mut r);
            let phi = crate::families::spiky_signal(res, &mut r);
            let atom = random_atom(&mut r, res, config.jumps.max(1), 2.0);
            Ok(q_scaling_certificates(
                &format!("random-atom-{seed}"),
                &f,
                &phi,
                atom.jumps(),
                atom.blocks(),
                &config.qs,
                &CertifyConfig::default(),
            )?)
        })
        .collect();
    for batch in certified {
        rows.extend(batch?);
    }
    let mut t = ScanTable::new(
        ScanKind::Qscaling,
        res,
        config.seed,
        &["label", "q", "ratio", "linear_scaled", "sqrt_scaled"],
    );
    for r in &rows {
        t.rows.push(vec![
            r.label.clone().into(),
            r.q.into(),
            r.ratio.into(),
            r.linear_scaled.into(),
            r.sqrt_scaled.into(),
        ]);
    }
    let lower: Vec<&QScalingRow> = rows
        .iter()
        .filter(|r| r.label.starts_with("lower-bound"))
        .collect();
    if let (Some(first), Some(last)) = (lower.first(), lower.last()) {
        let lin = lower.iter().map(|r| r.linear_scaled);
        let lo = lin.clone().fold(f64::INFINITY, f64::min);
        let hi = lin.fold(0.0, f64::max);
        t.summary.insert("linear_spread".into(), (hi / lo).into());
        t.summary.insert(
            "sqrt_growth".into(),
            (last.sqrt_scaled / first.sqrt_scaled).into(),
        );
    }
    Ok(t)
}

/// One weight of the power family.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRow {
    pub alpha: f64,
    pub characteristic: f64,
    pub ratio: f64,
    pub argmax: String,
}

pub fn weight_rows(res: Resolution, config: &ScanConfig) -> InputResult<Vec<WeightRow>> {
    if config.p.is_nan() || config.p <= 1.0 {
        return Err(InputError::Invalid(format!(
            "p = {} must exceed 1",
            config.p
        )));
    }
    let family = standard_family(res, config.seed, config.random_members);
    let op = WeightedOperator::SLambda(config.lambda);
    config
        .alphas
        .par_iter()
        .map(|&alpha| {
            let w = Weight::power(res, alpha);
            let rep = weighted_norm_ratio(&op, &w, config.p, &family)?;
            Ok(WeightRow {
                alpha,
                characteristic: rep.characteristic,
                ratio: rep.max_ratio,
                argmax: rep.argmax,
            })
        })
        .collect()
}

fn weights(
    res: Resolution,
    config: &ScanConfig,
    calibration: &Calibration,
) -> InputResult<ScanTable> {
    let rows = weight_rows(res, config)?;
    let c = calibration.weighted_constant;
    let mut t = ScanTable::new(
        ScanKind::Weights,
        res,
        config.seed,
        &[
            "weight_id",
            "alpha",
            "characteristic",
            "ratio",
            "argmax",
            "ceiling",
            "within_ceiling",
        ],
    );
    let mut all_within = true;
    for r in &rows {
        let ceiling = c * r.characteristic.powf(WEIGHTED_EXPONENT);
        let within = r.ratio <= ceiling;
        all_within &= within;
        t.rows.push(vec![
            format!("power({})", r.alpha).into(),
            r.alpha.into(),
            r.characteristic.into(),
            r.ratio.into(),
            r.argmax.clone().into(),
            ceiling.into(),
            if within { "yes" } else { "no" }.into(),
        ]);
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.characteristic, r.ratio)).collect();
    let fit = fit_exponent(&points).unwrap_or(f64::NAN);
    t.summary.insert("p".into(), config.p.into());
    t.summary.insert("ceiling_constant".into(), c.into());
    t.summary
        .insert("ceiling_exponent".into(), WEIGHTED_EXPONENT.into());
    t.summary.insert("fitted_exponent".into(), fit.into());
    t.summary.insert(
        "all_within_ceiling".into(),
        if all_within { "yes" } else { "no" }.into(),
    );
    // The unweighted characteristic is exactly one.
    let unit = ap_characteristic(&Weight::power(res, 0.0), config.p)?;
    t.summary
        .insert("unweighted_characteristic".into(), unit.into());
    Ok(t)
}

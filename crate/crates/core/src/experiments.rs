//! Reproducible experiments: the Rademacher lower bound, lacunary coefficient
//! and exponential square-function scans, and the `q → 1` scaling table.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{DyadicInterval, FrequencyInterval, Resolution, Signal};
use crate::error::{Error, Result};
use crate::multiplier::{AtomBlock, AtomRq1, MultiplierSymbol};
use crate::orlicz::{luxemburg, OrliczFunction};
use crate::sparse::{certify_multiplier, CertifyConfig};
use crate::square::s_lambda;
use crate::walsh::{walsh_forward, walsh_function};

/// `2^n 1_{[0, 2^{-n})}`.
pub fn spike(res: Resolution, n: u32) -> Result<Signal> {
    Signal::indicator(res, &DyadicInterval::new(n, 0)?, (1u64 << n) as f64)
}

/// `Σ_{k<n} s_k w_{2^k}` with `s_k = ±1` from the bits of `signs`.
pub fn rademacher_sum(res: Resolution, n: u32, signs: u64) -> Result<Signal> {
    if n > res.level() {
        return Err(Error::LevelBeyondResolution {
            level: n,
            resolution: res.level(),
        });
    }
    let mut out = Signal::zeros(res);
    for k in 0..n {
        let s = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
        out.add_assign(&walsh_function(res, 1 << k)?.scale(s))?;
    }
    Ok(out)
}

/// Multiplier, test functions and exact values of the lower-bound pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub n: u32,
    pub q: f64,
    /// `⟨T_m f, g⟩`.
    pub pairing: f64,
    /// `-n 2^{-n}`.
    pub expected_pairing: f64,
    /// `‖T_m f - Σ_{k<n} w_{2^k}‖_∞`.
    pub identity_error: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    /// `|2^n ‖g‖_q - ‖f‖_q|`.
    pub norm_identity_error: f64,
    /// `|⟨T_m f, g⟩| / (‖f‖_q ‖g‖_q)`.
    pub ratio: f64,
    /// `n 2^{-2n/(n+1)}`, the same ratio in closed form.
    pub closed_form_ratio: f64,
    /// `(q-1) · ratio`.
    pub linear_scaled: f64,
    /// `√(q-1) · ratio`.
    pub sqrt_scaled: f64,
}

/// `m = Σ_{k<n} 1_{{2^k}}`, a Marcinkiewicz multiplier of norm two.
pub fn lacunary_indicator(n: u32) -> MultiplierSymbol {
    MultiplierSymbol::new(
        (0..n)
            .map(|k| {
                (
                    FrequencyInterval::new(1 << k, (1 << k) + 1).expect("nonempty"),
                    1.0,
                )
            })
            .collect(),
    )
    .expect("disjoint singletons")
}

/// The pair `f = 2^n 1_{[0,2^{-n})}`, `g = 1_{[1-2^{-n}, 1)}` tested at
/// `q = 1 + 1/n`. Needs `N ≥ n + 1`.
pub fn lower_bound(n: u32, res: Resolution) -> Result<LowerBoundReport> {
    if n == 0 || res.level() < n + 1 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} needs 1 ≤ n and resolution at least n + 1, got {}",
            res.level()
        )));
    }
    let q = 1.0 + 1.0 / n as f64;
    let m = lacunary_indicator(n);
    let f = spike(res, n)?;
    let tf = m.apply(&f)?;
    let identity_error = tf.max_abs_diff(&rademacher_sum(res, n, 0)?)?;
    // T_m f = -n exactly where every w_{2^k}, k < n, is -1.
    let last = DyadicInterval::new(n, (1usize << n) - 1)?;
    let g = Signal::indicator(res, &last, 1.0)?;
    let pairing = tf.inner(&g)?;
    let f_norm = f.lp_norm(q)?;
    let g_norm = g.lp_norm(q)?;
    let ratio = pairing.abs() / (f_norm * g_norm);
    let nf = n as f64;
    Ok(LowerBoundReport {
        n,
        q,
        pairing,
        expected_pairing: -nf * 0.5f64.powi(n as i32),
        identity_error,
        f_norm,
        g_norm,
        norm_identity_error: ((1u64 << n) as f64 * g_norm - f_norm).abs(),
        ratio,
        closed_form_ratio: nf * 2f64.powf(-2.0 * nf / (nf + 1.0)),
        linear_scaled: (q - 1.0) * ratio,
        sqrt_scaled: (q - 1.0).sqrt() * ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub name: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub max_ratio: f64,
}

impl ScanReport {
    fn from_rows(rows: Vec<ScanRow>) -> Self {
        let max_ratio = rows.iter().fold(0.0f64, |a, r| a.max(r.ratio));
        ScanReport { rows, max_ratio }
    }
}

/// `inf λ_{k+1}/λ_k`, or an error unless the sequence is positive and
/// strictly increasing.
pub fn lacunarity(lambdas: &[usize]) -> Result<f64> {
    if lambdas.first() == Some(&0) {
        return Err(Error::NotLacunary);
    }
    let mut rho = f64::INFINITY;
    for pair in lambdas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::NotLacunary);
        }
        rho = rho.min(pair[1] as f64 / pair[0] as f64);
    }
    Ok(rho)
}

/// `‖{f̂(λ_k)}‖_{ℓ²} / ‖f‖_{ψ₂}` for every member of the family.
pub fn zygmund_scan(lambdas: &[usize], family: &[(String, Signal)]) -> Result<ScanReport> {
    lacunarity(lambdas)?;
    let mut rows = Vec::with_capacity(family.len());
    for (name, f) in family {
        let res = f.resolution();
        if let Some(&top) = lambdas.last() {
            if top >= res.cells() {
                return Err(Error::FrequencyOutOfRange {
                    frequency: top,
                    limit: res.cells(),
                });
            }
        }
        let spectrum = walsh_forward(f);
        let l2 = lambdas
            .iter()
            .map(|&l| spectrum.coeffs()[l].powi(2))
            .sum::<f64>()
            .sqrt();
        let psi = luxemburg(f, &DyadicInterval::unit(), OrliczFunction::Psi2)?;
        rows.push(ScanRow {
            name: name.clone(),
            numerator: l2,
            denominator: psi,
            ratio: if l2 == 0.0 { 0.0 } else { l2 / psi },
        });
    }
    Ok(ScanReport::from_rows(rows))
}

/// `‖f‖_{exp(L²)} / ‖S_2 f‖_∞` for mean-zero members of the family.
pub fn cww_scan(family: &[(String, Signal)]) -> Result<ScanReport> {
    let mut rows = Vec::with_capacity(family.len());
    for (name, f) in family {
        let mean = f.integral();
        if mean.abs() > 1e-12 * f.lp_norm(1.0)?.max(1.0) {
            return Err(Error::NonzeroMean(mean));
        }
        let exp = luxemburg(f, &DyadicInterval::unit(), OrliczFunction::ExpL2)?;
        let s = s_lambda(f, 2)?.sup_norm();
        rows.push(ScanRow {
            name: name.clone(),
            numerator: exp,
            denominator: s,
            ratio: if exp == 0.0 { 0.0 } else { exp / s },
        });
    }
    Ok(ScanReport::from_rows(rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QScalingRow {
    pub label: String,
    pub q: f64,
    pub ratio: f64,
    /// `(q-1) · ratio`.
    pub linear_scaled: f64,
    /// `√(q-1) · ratio`.
    pub sqrt_scaled: f64,
}

/// The lower-bound pair across `n`, each at `q = 1 + 1/n` and `N = n + 2`.
pub fn q_scaling_lower_bound(ns: &[u32]) -> Result<Vec<QScalingRow>> {
    ns.iter()
        .map(|&n| {
            let rep = lower_bound(n, Resolution::new(n + 2)?)?;
            Ok(QScalingRow {
                label: format!("lower-bound n={n}"),
                q: rep.q,
                ratio: rep.ratio,
                linear_scaled: rep.linear_scaled,
                sqrt_scaled: rep.sqrt_scaled,
            })
        })
        .collect()
}

/// Sparse-certificate ratios of one `(f, φ, blocks)` triple across `q`; the
/// atom keeps its blocks and jump count while its height `J^{-1/q}` varies.
pub fn q_scaling_certificates(
    label: &str,
    f: &Signal,
    phi: &Signal,
    jumps: usize,
    blocks: &[AtomBlock],
    qs: &[f64],
    config: &CertifyConfig,
) -> Result<Vec<QScalingRow>> {
    qs.iter()
        .map(|&q| {
            let atom = AtomRq1::new(q, jumps, blocks.to_vec())?;
            let cert = certify_multiplier(f, phi, &atom, config)?;
            // Report the unnormalized ratio |pairing| / form.
            let ratio = cert.ratio * cert.normalization;
            Ok(QScalingRow {
                label: format!("{label} q={q}"),
                q,
                ratio,
                linear_scaled: (q - 1.0) * ratio,
                sqrt_scaled: (q - 1.0).sqrt() * ratio,
            })
        })
        .collect()
}

/// Deterministic members for the scans: spikes, Haar-type steps and
/// Rademacher sums with alternating signs.
pub fn deterministic_family(res: Resolution, mean_zero: bool) -> Result<Vec<(String, Signal)>> {
    let mut out = Vec::new();
    let top = res.level().min(12);
    for n in 1..=top {
        out.push((
            format!("rademacher-{n}"),
            rademacher_sum(res, n, 0xAAAA_AAAA)?,
        ));
    }
    let half = DyadicInterval::new(1, 0)?;
    out.push((
        String::from("haar-unit"),
        Signal::indicator(res, &half, 1.0)?.sub(&Signal::indicator(
            res,
            &DyadicInterval::new(1, 1)?,
            1.0,
        )?)?,
    ));
    if !mean_zero {
        for n in (0..=top).step_by(2) {
            out.push((format!("spike-{n}"), spike(res, n)?));
        }
    }
    Ok(out)
}

//! Sparse collections, sparse forms and the recursive certificates built on
//! the key multi-frequency decomposition.

mod certify;
mod decomposition;

pub use certify::{
    certify_composition, certify_good, certify_marcinkiewicz, certify_martingale,
    certify_multiplier, certify_s_lambda, CertifyConfig, LambdaCertificate,
    MarcinkiewiczCertificate, NodeReport,
};
pub use decomposition::{
    check_stopping_condition, key_decomposition, key_decomposition_unadapted, stopping_bound,
    stopping_family, DecompositionMode, DecompositionReport, KeyDecomposition, LocalPart,
    StoppingCollection, StoppingReport, STOPPING_CONSTANT, STOPPING_THRESHOLD,
};

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{DyadicInterval, IntervalTable, Signal};
use crate::error::Result;
use crate::orlicz::{luxemburg_slice, OrliczFunction};

/// Which local average a sparse form uses for one of its functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AverageKind {
    /// Luxemburg `L(log L)^{1/2}` average.
    Psi2,
    /// `⟨|f|^p⟩_I^{1/p}`.
    Lp(f64),
}

impl AverageKind {
    pub fn of(self, f: &Signal, interval: &DyadicInterval) -> Result<f64> {
        match self {
            AverageKind::Psi2 => {
                let cells = interval.cells(f.resolution())?;
                Ok(luxemburg_slice(&f.values()[cells], OrliczFunction::Psi2))
            }
            AverageKind::Lp(p) => f.average(interval, p),
        }
    }

    /// The average over every dyadic interval at once.
    pub fn table(self, f: &Signal) -> Result<IntervalTable<f64>> {
        let res = f.resolution();
        if let AverageKind::Lp(p) = self {
            // Validates p once; the per-interval calls below cannot fail.
            f.average(&DyadicInterval::unit(), p)?;
        }
        Ok(IntervalTable::from_fn(res, |i| {
            self.of(f, &i)
                .expect("interval and exponent already checked")
        }))
    }
}

/// One interval of a certificate with the two averages it contributes and
/// its sparseness margin `1 - |E_I|/|I|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseEntry {
    pub interval: DyadicInterval,
    pub f_avg: f64,
    pub g_avg: f64,
    pub margin: f64,
}

/// A failed check recorded in a certificate; the run itself continues.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub interval: DyadicInterval,
    pub check: String,
    pub observed: f64,
    pub allowed: f64,
}

/// Machine-checkable record of a sparse bound for one input pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCertificate {
    pub collection: Vec<SparseEntry>,
    /// The bilinear quantity being dominated.
    pub pairing: f64,
    /// `Σ_S |I| ⟨f⟩^r ⟨g⟩`, without the normalization.
    pub form: f64,
    /// Factor in front of the form (`(q-1)^{-1/2}` for multipliers).
    pub normalization: f64,
    /// `|pairing| / (normalization · form)`, zero when both vanish.
    pub ratio: f64,
    pub nodes: Vec<NodeReport>,
    pub violations: Vec<Violation>,
}

impl SparseCertificate {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn intervals(&self) -> Vec<DyadicInterval> {
        self.collection.iter().map(|e| e.interval).collect()
    }
}

/// Margins `1 - |E_I|/|I|` with `E_I` the union of members strictly inside `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsenessReport {
    pub margins: Vec<(DyadicInterval, f64)>,
    pub min_margin: f64,
    pub c: f64,
    pub passed: bool,
}

pub fn check_sparseness(collection: &[DyadicInterval], c: f64) -> SparsenessReport {
    let mut sorted: Vec<DyadicInterval> = collection.to_vec();
    sorted.sort_by_key(|i| (i.level(), i.index()));
    sorted.dedup();
    let mut margins = Vec::with_capacity(sorted.len());
    for interval in &sorted {
        // Members strictly inside I; keep only the maximal ones to measure the union.
        let mut inside: Vec<&DyadicInterval> = sorted
            .iter()
            .filter(|j| interval.strictly_contains(j))
            .collect();
        inside.sort_by_key(|j| j.level());
        let mut maximal: Vec<&DyadicInterval> = Vec::new();
        for j in inside {
            if !maximal.iter().any(|m| m.contains(j)) {
                maximal.push(j);
            }
        }
        let covered: f64 = maximal.iter().map(|j| j.length()).sum();
        margins.push((*interval, 1.0 - covered / interval.length()));
    }
    let min_margin = margins.iter().fold(1.0f64, |a, (_, m)| a.min(*m));
    SparsenessReport {
        passed: margins.iter().all(|(_, m)| *m >= c),
        margins,
        min_margin,
        c,
    }
}

/// `Σ_{I ∈ S} |I| ⟨f⟩_I^r ⟨g⟩_I` with the chosen averages.
pub fn sparse_form(
    collection: &[DyadicInterval],
    f: &Signal,
    g: &Signal,
    r: f64,
    f_kind: AverageKind,
    g_kind: AverageKind,
) -> Result<f64> {
    f.resolution().check_same(g.resolution())?;
    let mut total = 0.0;
    for interval in collection {
        total += interval.length() * f_kind.of(f, interval)?.powf(r) * g_kind.of(g, interval)?;
    }
    Ok(total)
}

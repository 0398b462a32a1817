//! JSON file formats for signals, spectra, multipliers, weights and
//! certificates, plus CSV flattening.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use walshlab_core::experiments::LowerBoundReport;
use walshlab_core::haar::HaarCoefficients;
use walshlab_core::multiplier::{AtomBlock, AtomRq1, MultiplierSymbol};
use walshlab_core::sparse::{
    LambdaCertificate, MarcinkiewiczCertificate, NodeReport, SparseCertificate, SparseEntry,
    Violation,
};
use walshlab_core::weights::Weight;
use walshlab_core::{DyadicInterval, FrequencyInterval, Resolution, Signal, Spectrum};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] walshlab_core::Error),
    #[error("malformed multiplier spec: {0}")]
    Multiplier(String),
    #[error("{what} has resolution {found}, but the invocation declares N = {declared}")]
    ResolutionMismatch {
        what: String,
        declared: u32,
        found: u32,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type InputResult<T> = Result<T, InputError>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> InputResult<T> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> InputResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Checks a file's resolution against the one declared for the invocation,
/// or adopts it when none was declared.
pub fn resolve(declared: &mut Option<u32>, found: u32, what: &str) -> InputResult<Resolution> {
    match *declared {
        Some(n) if n != found => Err(InputError::ResolutionMismatch {
            what: what.to_string(),
            declared: n,
            found,
        }),
        _ => {
            *declared = Some(found);
            Ok(Resolution::new(found)?)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalFile {
    #[serde(rename = "N")]
    pub n: u32,
    pub values: Vec<f64>,
    /// Set for weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive: Option<bool>,
}

impl SignalFile {
    pub fn from_signal(f: &Signal) -> Self {
        SignalFile {
            n: f.resolution().level(),
            values: f.values().to_vec(),
            positive: None,
        }
    }

    pub fn from_weight(w: &Weight) -> Self {
        SignalFile {
            positive: Some(true),
            ..SignalFile::from_signal(w.signal())
        }
    }

    pub fn to_signal(&self) -> InputResult<Signal> {
        Ok(Signal::new(Resolution::new(self.n)?, self.values.clone())?)
    }

    pub fn to_weight(&self) -> InputResult<Weight> {
        if self.positive == Some(false) {
            return Err(InputError::Invalid(
                "weight file is flagged non-positive".into(),
            ));
        }
        Ok(Weight::new(self.to_signal()?)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Walsh,
    Haar,
}

/// Walsh coefficients in Paley order, or the mean plus Haar coefficients
/// from coarse to fine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    #[serde(rename = "N")]
    pub n: u32,
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    pub coeffs: Vec<f64>,
}

impl SpectrumFile {
    pub fn from_walsh(s: &Spectrum) -> Self {
        SpectrumFile {
            n: s.resolution().level(),
            basis: Basis::Walsh,
            mean: None,
            coeffs: s.coeffs().to_vec(),
        }
    }

    pub fn from_haar(h: &HaarCoefficients) -> Self {
        SpectrumFile {
            n: h.resolution().level(),
            basis: Basis::Haar,
            mean: Some(h.mean()),
            coeffs: h.coeffs().to_vec(),
        }
    }

    pub fn to_walsh(&self) -> InputResult<Spectrum> {
        Ok(Spectrum::new(
            Resolution::new(self.n)?,
            self.coeffs.clone(),
        )?)
    }

    pub fn to_haar(&self) -> InputResult<HaarCoefficients> {
        let mean = self
            .mean
            .ok_or_else(|| InputError::Invalid("a Haar spectrum needs a mean".into()))?;
        Ok(HaarCoefficients::new(
            Resolution::new(self.n)?,
            mean,
            self.coeffs.clone(),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub start: usize,
    pub end: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub k: u32,
    pub intervals: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub q: f64,
    #[serde(rename = "J")]
    pub jumps: usize,
    pub blocks: Vec<BlockSpec>,
}

impl AtomSpec {
    pub fn from_atom(a: &AtomRq1) -> Self {
        AtomSpec {
            q: a.q(),
            jumps: a.jumps(),
            blocks: a
                .blocks()
                .iter()
                .map(|b| BlockSpec {
                    k: b.k,
                    intervals: b.intervals.iter().map(|w| [w.start(), w.end()]).collect(),
                })
                .collect(),
        }
    }

    pub fn blocks(&self) -> InputResult<Vec<AtomBlock>> {
        self.blocks
            .iter()
            .map(|b| {
                Ok(AtomBlock {
                    k: b.k,
                    intervals: b
                        .intervals
                        .iter()
                        .map(|[a, e]| FrequencyInterval::new(*a, *e))
                        .collect::<Result<_, _>>()?,
                })
            })
            .collect()
    }

    pub fn to_atom(&self) -> InputResult<AtomRq1> {
        Ok(AtomRq1::new(self.q, self.jumps, self.blocks()?)?)
    }
}

/// Exactly one of `pieces`, `values` or `atom`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierFile {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<PieceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<AtomSpec>,
}

pub enum ParsedMultiplier {
    Symbol(MultiplierSymbol),
    Atom(AtomRq1),
}

impl ParsedMultiplier {
    pub fn symbol(&self) -> MultiplierSymbol {
        match self {
            ParsedMultiplier::Symbol(m) => m.clone(),
            ParsedMultiplier::Atom(a) => a.to_symbol(),
        }
    }
}

impl MultiplierFile {
    pub fn from_symbol(res: Resolution, m: &MultiplierSymbol) -> Self {
        MultiplierFile {
            n: res.level(),
            pieces: Some(
                m.pieces()
                    .iter()
                    .map(|(w, c)| PieceSpec {
                        start: w.start(),
                        end: w.end(),
                        value: *c,
                    })
                    .collect(),
            ),
            values: None,
            atom: None,
        }
    }

    pub fn parse(&self) -> InputResult<ParsedMultiplier> {
        let res = Resolution::new(self.n)?;
        let bad = |e: walshlab_core::Error| InputError::Multiplier(e.to_string());
        let parsed = match (&self.pieces, &self.values, &self.atom) {
            (Some(pieces), None, None) => {
                let pieces = pieces
                    .iter()
                    .map(|p| Ok((FrequencyInterval::new(p.start, p.end)?, p.value)))
                    .collect::<Result<Vec<_>, walshlab_core::Error>>()
                    .map_err(bad)?;
                ParsedMultiplier::Symbol(MultiplierSymbol::new(pieces).map_err(bad)?)
            }
            (None, Some(values), None) => {
                if values.len() != res.cells() {
                    return Err(InputError::Multiplier(format!(
                        "{} values for 2^{} frequencies",
                        values.len(),
                        self.n
                    )));
                }
                ParsedMultiplier::Symbol(MultiplierSymbol::from_values(values).map_err(bad)?)
            }
            (None, None, Some(atom)) => {
                ParsedMultiplier::Atom(atom.to_atom().map_err(|e| match e {
                    InputError::Core(c) => bad(c),
                    other => other,
                })?)
            }
            _ => {
                return Err(InputError::Multiplier(
                    "give exactly one of \"pieces\", \"values\" or \"atom\"".into(),
                ))
            }
        };
        let check = match &parsed {
            ParsedMultiplier::Symbol(m) => m.check_within(res),
            ParsedMultiplier::Atom(a) => a.check_within(res),
        };
        check.map_err(bad)?;
        Ok(parsed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub level: u32,
    pub index: usize,
}

impl From<DyadicInterval> for IntervalSpec {
    fn from(i: DyadicInterval) -> Self {
        IntervalSpec {
            level: i.level(),
            index: i.index(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrySpec {
    pub interval: IntervalSpec,
    pub f_avg: f64,
    pub g_avg: f64,
    pub margin: f64,
}

impl From<&SparseEntry> for EntrySpec {
    fn from(e: &SparseEntry) -> Self {
        EntrySpec {
            interval: e.interval.into(),
            f_avg: e.f_avg,
            g_avg: e.g_avg,
            margin: e.margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationSpec {
    pub interval: IntervalSpec,
    pub check: String,
    pub observed: f64,
    pub allowed: f64,
}

impl From<&Violation> for ViolationSpec {
    fn from(v: &Violation) -> Self {
        ViolationSpec {
            interval: v.interval.into(),
            check: v.check.clone(),
            observed: v.observed,
            allowed: v.allowed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub interval: IntervalSpec,
    pub children: usize,
    pub child_measure: f64,
    pub pairing: f64,
    pub local: f64,
    pub local_constant: f64,
    pub identity_error: f64,
    pub cross_error: f64,
    pub recursion_error: f64,
    pub literal_excess: f64,
    pub stopping_f: f64,
    pub stopping_g: f64,
    pub linf_constant: f64,
    pub l2_constant: f64,
    pub square_constant: f64,
    pub max_block_jump_tiles: usize,
}

impl From<&NodeReport> for NodeSpec {
    fn from(n: &NodeReport) -> Self {
        NodeSpec {
            interval: n.interval.unwrap_or_else(DyadicInterval::unit).into(),
            children: n.children,
            child_measure: n.child_measure,
            pairing: n.pairing,
            local: n.local,
            local_constant: n.local_constant,
            identity_error: n.identity_error,
            cross_error: n.cross_error,
            recursion_error: n.recursion_error,
            literal_excess: n.literal_excess,
            stopping_f: n.stopping_f,
            stopping_g: n.stopping_g,
            linf_constant: n.linf_constant,
            l2_constant: n.l2_constant,
            square_constant: n.square_constant,
            max_block_jump_tiles: n.max_block_jump_tiles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(rename = "N")]
    pub n: u32,
    pub kind: String,
    pub passed: bool,
    pub collection: Vec<EntrySpec>,
    pub pairing: f64,
    pub form: f64,
    pub normalization: f64,
    pub ratio: f64,
    pub violations: Vec<ViolationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CertificateFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
}

impl CertificateFile {
    pub fn from_sparse(res: Resolution, kind: &str, c: &SparseCertificate) -> Self {
        CertificateFile {
            n: res.level(),
            kind: kind.to_string(),
            passed: c.passed(),
            collection: c.collection.iter().map(EntrySpec::from).collect(),
            pairing: c.pairing,
            form: c.form,
            normalization: c.normalization,
            ratio: c.ratio,
            violations: c.violations.iter().map(ViolationSpec::from).collect(),
            nodes: c.nodes.iter().map(NodeSpec::from).collect(),
            parts: Vec::new(),
            kappa: None,
        }
    }

    pub fn from_lambda(res: Resolution, lambda: usize, c: &LambdaCertificate) -> Self {
        CertificateFile {
            n: res.level(),
            kind: format!("s_lambda({lambda})"),
            passed: c.passed(),
            collection: c.collection().iter().map(EntrySpec::from).collect(),
            pairing: c.pairing,
            form: c.form,
            normalization: 1.0,
            ratio: c.ratio,
            violations: c.violations.iter().map(ViolationSpec::from).collect(),
            nodes: Vec::new(),
            parts: vec![
                CertificateFile::from_sparse(res, "martingale", &c.martingale),
                CertificateFile::from_sparse(res, "good-right", &c.right),
                CertificateFile::from_sparse(res, "good-left", &c.left),
            ],
            kappa: Some(c.reduction.kappa),
        }
    }

    /// The combined certificate of an atomized symbol; each atom's
    /// certificate is kept as a part.
    pub fn from_marcinkiewicz(res: Resolution, q: f64, c: &MarcinkiewiczCertificate) -> Self {
        CertificateFile {
            n: res.level(),
            kind: format!("marcinkiewicz(q={q})"),
            passed: c.violations.is_empty() && c.atoms.iter().all(SparseCertificate::passed),
            collection: Vec::new(),
            pairing: c.pairing,
            form: c.bound,
            normalization: c.marcinkiewicz_norm_bound,
            ratio: c.ratio,
            violations: c.violations.iter().map(ViolationSpec::from).collect(),
            nodes: Vec::new(),
            parts: c
                .atoms
                .iter()
                .enumerate()
                .map(|(i, a)| CertificateFile::from_sparse(res, &format!("atom-{i}"), a))
                .collect(),
            kappa: None,
        }
    }

    /// Every violation, including those of the parts.
    pub fn all_violations(&self) -> usize {
        self.violations.len()
            + self
                .parts
                .iter()
                .map(CertificateFile::all_violations)
                .sum::<usize>()
    }

    /// One CSV row per collection entry.
    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["kind", "level", "index", "f_avg", "g_avg", "margin"])?;
        let mut emit = |c: &CertificateFile| -> csv::Result<()> {
            for e in &c.collection {
                w.write_record([
                    c.kind.clone(),
                    e.interval.level.to_string(),
                    e.interval.index.to_string(),
                    e.f_avg.to_string(),
                    e.g_avg.to_string(),
                    e.margin.to_string(),
                ])?;
            }
            Ok(())
        };
        if self.parts.is_empty() {
            emit(self)?;
        } else {
            for p in &self.parts {
                emit(p)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// The lower-bound report as written by `walshlab lowerbound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundFile {
    #[serde(rename = "N")]
    pub n_resolution: u32,
    pub n: u32,
    pub q: f64,
    pub pairing: f64,
    pub expected_pairing: f64,
    pub identity_error: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    pub norm_identity_error: f64,
    pub ratio: f64,
    pub closed_form_ratio: f64,
    pub linear_scaled: f64,
    pub sqrt_scaled: f64,
}

impl LowerBoundFile {
    pub fn new(res: Resolution, r: &LowerBoundReport) -> Self {
        LowerBoundFile {
            n_resolution: res.level(),
            n: r.n,
            q: r.q,
            pairing: r.pairing,
            expected_pairing: r.expected_pairing,
            identity_error: r.identity_error,
            f_norm: r.f_norm,
            g_norm: r.g_norm,
            norm_identity_error: r.norm_identity_error,
            ratio: r.ratio,
            closed_form_ratio: r.closed_form_ratio,
            linear_scaled: r.linear_scaled,
            sqrt_scaled: r.sqrt_scaled,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_needs_exactly_one_form() {
        let both = MultiplierFile {
            n: 3,
            pieces: Some(vec![]),
            values: Some(vec![0.0; 8]),
            atom: None,
        };
        assert!(matches!(both.parse(), Err(InputError::Multiplier(_))));
        let none = MultiplierFile {
            n: 3,
            pieces: None,
            values: None,
            atom: None,
        };
        assert!(matches!(none.parse(), Err(InputError::Multiplier(_))));
    }

    #[test]
    fn declared_resolution_is_enforced() {
        let mut declared = Some(8);
        assert!(resolve(&mut declared, 8, "f").is_ok());
        assert!(matches!(
            resolve(&mut declared, 9, "g"),
            Err(InputError::ResolutionMismatch { .. })
        ));
        let mut open = None;
        assert!(resolve(&mut open, 5, "f").is_ok());
        assert_eq!(open, Some(5));
    }
}

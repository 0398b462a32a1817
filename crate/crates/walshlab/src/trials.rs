//! Random instances for the decomposition and certificate suites, and the
//! observations they produce. Calibration, selftest and the acceptance
//! tests all draw from here with disjoint seeds.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use walshlab_core::multiplier::{atom_block_range, AtomBlock, AtomRq1};
use walshlab_core::sparse::{
    certify_good, certify_multiplier, key_decomposition, stopping_family, AverageKind,
    CertifyConfig, DecompositionMode, DecompositionReport, SparseCertificate, STOPPING_THRESHOLD,
};
use walshlab_core::{DyadicInterval, FrequencyInterval, GoodCollection, Resolution, Signal};

use crate::families::{rng, spiky_signal};

pub const JUMP_CHOICES: [usize; 3] = [1, 2, 4];
pub const DECOMPOSITION_QS: [f64; 3] = [1.25, 1.5, 2.0];
pub const CERTIFICATE_QS: [f64; 3] = [1.1, 1.5, 2.0];
pub const SQUARE_RS: [f64; 3] = [1.0, 1.5, 2.0];

/// An atom with up to `jumps` random intervals in every block.
pub fn random_atom(rng: &mut ChaCha8Rng, res: Resolution, jumps: usize, q: f64) -> AtomRq1 {
    let mut blocks = Vec::new();
    for k in 0..=res.level() {
        let range = atom_block_range(k);
        let mut cuts: Vec<usize> = (0..2 * rng.gen_range(0..=jumps))
            .map(|_| rng.gen_range(range.start()..=range.end()))
            .collect();
        cuts.sort_unstable();
        cuts.dedup();
        let intervals = cuts
            .chunks_exact(2)
            .map(|c| FrequencyInterval::new(c[0], c[1]).expect("increasing cuts"))
            .collect();
        blocks.push(AtomBlock { k, intervals });
    }
    AtomRq1::new(q, jumps, blocks).expect("random blocks respect J")
}

/// A `[0,1)`-good collection with each block present with probability 0.6.
pub fn random_good(rng: &mut ChaCha8Rng, res: Resolution) -> GoodCollection {
    let mut intervals = Vec::new();
    for k in 0..res.level() {
        if rng.gen_bool(0.6) {
            let s = 1usize << k;
            intervals
                .push(FrequencyInterval::new(s, rng.gen_range(s + 1..=2 * s)).expect("nonempty"));
        }
    }
    GoodCollection::new(DyadicInterval::unit(), intervals).expect("good by construction")
}

/// One run of the key decomposition in both modes.
#[derive(Debug, Clone)]
pub struct KeyObservation {
    pub seed: u64,
    pub jumps: usize,
    pub q: f64,
    pub children: usize,
    pub psi2: DecompositionReport,
    pub lq: DecompositionReport,
    /// `‖f‖_2`, the scale of the exact identities.
    pub f_norm: f64,
}

pub fn key_instance(seed: u64, res: Resolution) -> walshlab_core::Result<KeyObservation> {
    let mut rng = rng(seed);
    let jumps = JUMP_CHOICES[rng.gen_range(0..JUMP_CHOICES.len())];
    let q = DECOMPOSITION_QS[rng.gen_range(0..DECOMPOSITION_QS.len())];
    let f = spiky_signal(res, &mut rng);
    let atom = random_atom(&mut rng, res, jumps, q);
    let t_psi = AverageKind::Psi2.table(&f)?;
    let t_q = AverageKind::Lp(q).table(&f)?;
    let stopping = stopping_family(&[&t_psi, &t_q], &DyadicInterval::unit(), STOPPING_THRESHOLD)?;
    let psi2 = key_decomposition(&f, &atom, &stopping, DecompositionMode::Psi2)?.report;
    let lq = key_decomposition(&f, &atom, &stopping, DecompositionMode::Lq(q))?.report;
    Ok(KeyObservation {
        seed,
        jumps,
        q,
        children: stopping.intervals().len(),
        psi2,
        lq,
        f_norm: f.norm2(),
    })
}

#[derive(Debug, Clone)]
pub struct CertificateObservation {
    pub seed: u64,
    pub label: String,
    pub certificate: SparseCertificate,
    pub scale: f64,
}

pub fn multiplier_instance(
    seed: u64,
    res: Resolution,
) -> walshlab_core::Result<CertificateObservation> {
    let mut rng = rng(seed);
    let jumps = JUMP_CHOICES[rng.gen_range(0..JUMP_CHOICES.len())];
    let q = CERTIFICATE_QS[rng.gen_range(0..CERTIFICATE_QS.len())];
    let f = spiky_signal(res, &mut rng);
    let phi = spiky_signal(res, &mut rng);
    let atom = random_atom(&mut rng, res, jumps, q);
    let certificate = certify_multiplier(&f, &phi, &atom, &CertifyConfig::default())?;
    Ok(CertificateObservation {
        seed,
        label: format!("multiplier J={jumps} q={q}"),
        certificate,
        scale: f.norm2() * phi.norm2(),
    })
}

pub fn square_instance(
    seed: u64,
    res: Resolution,
) -> walshlab_core::Result<CertificateObservation> {
    let mut rng = rng(seed);
    let r = SQUARE_RS[rng.gen_range(0..SQUARE_RS.len())];
    let f = spiky_signal(res, &mut rng);
    let g = spiky_signal(res, &mut rng);
    let omega = random_good(&mut rng, res);
    let certificate = certify_good(&f, &g, &omega, r, &CertifyConfig::default())?;
    Ok(CertificateObservation {
        seed,
        label: format!("square |Ω|={} r={r}", omega.intervals().len()),
        certificate,
        scale: f.norm2(),
    })
}

/// Largest observed constants of a batch, compared against calibration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConstants {
    pub linf: f64,
    pub l2: f64,
    pub square: f64,
}

impl DecompositionConstants {
    pub fn absorb(&mut self, r: &DecompositionReport) {
        self.linf = self.linf.max(r.linf_constant);
        self.l2 = self.l2.max(r.l2_constant);
        self.square = self.square.max(r.square_constant);
    }

    pub fn within(&self, ceiling: &DecompositionConstants) -> bool {
        self.linf <= ceiling.linf && self.l2 <= ceiling.l2 && self.square <= ceiling.square
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DecompositionConstants {
            linf: self.linf * factor,
            l2: self.l2 * factor,
            square: self.square * factor,
        }
    }
}

/// Signals of a spiky instance, reused by the CLI for demonstrations.
pub fn spiky_pair(seed: u64, res: Resolution) -> (Signal, Signal) {
    let mut rng = rng(seed);
    (spiky_signal(res, &mut rng), spiky_signal(res, &mut rng))
}

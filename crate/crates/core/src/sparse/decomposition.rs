//! Stopping families and the multi-frequency Calderón–Zygmund split.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::AverageKind;
use crate::dyadic::{DyadicInterval, FrequencyInterval, IntervalTable, Resolution, Signal};
use crate::error::{Error, Result};
use crate::multiplier::{relative_interior, tile_partition, AtomRq1, MultiplierSymbol};
use crate::orlicz::OrliczFunction;
use crate::square::s_local;
use crate::tiles::{local_coefficients, synthesize_local};

/// Ratio above which an interval is selected by [`stopping_family`].
pub const STOPPING_THRESHOLD: f64 = 4.0;

/// Constant accepted by the stopping condition for families selected at
/// [`STOPPING_THRESHOLD`]: each of the two terms is at most `8`, and the
/// sum at most `4 ψ₂^{-1}(1) + 8 < 12`.
pub const STOPPING_CONSTANT: f64 = 12.0;

/// Pairwise disjoint dyadic intervals strictly inside a root interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingCollection {
    root: DyadicInterval,
    intervals: Vec<DyadicInterval>,
}

impl StoppingCollection {
    pub fn new(root: DyadicInterval, mut intervals: Vec<DyadicInterval>) -> Result<Self> {
        intervals.sort_by(|a, b| {
            a.left_endpoint()
                .partial_cmp(&b.left_endpoint())
                .expect("finite endpoints")
        });
        for i in &intervals {
            if !root.strictly_contains(i) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "{i:?} is not strictly inside {root:?}"
                )));
            }
        }
        for pair in intervals.windows(2) {
            if pair[0].intersects(&pair[1]) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "{:?} and {:?} overlap",
                    pair[0],
                    pair[1]
                )));
            }
        }
        Ok(StoppingCollection { root, intervals })
    }

    pub fn root(&self) -> DyadicInterval {
        self.root
    }

    pub fn intervals(&self) -> &[DyadicInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `|∪ I| / |I_0|`.
    pub fn relative_measure(&self) -> f64 {
        self.intervals.iter().map(|i| i.length()).sum::<f64>() / self.root.length()
    }

    /// Indicator-like mask of the root minus the union, at cell resolution.
    fn outside_mask(&self, res: Resolution) -> Result<Vec<bool>> {
        let mut mask = alloc::vec![false; res.cells()];
        for c in self.root.cells(res)? {
            mask[c] = true;
        }
        for i in &self.intervals {
            for c in i.cells(res)? {
                mask[c] = false;
            }
        }
        Ok(mask)
    }
}

/// Maximal `I ⊊ I_0` on which some table exceeds `threshold` times its value
/// on `I_0`.
pub fn stopping_family(
    tables: &[&IntervalTable<f64>],
    root: &DyadicInterval,
    threshold: f64,
) -> Result<StoppingCollection> {
    let res = match tables.first() {
        Some(t) => t.resolution(),
        None => return StoppingCollection::new(*root, Vec::new()),
    };
    for t in tables {
        res.check_same(t.resolution())?;
    }
    root.check_within(res)?;
    let limits: Vec<f64> = tables.iter().map(|t| threshold * t[root]).collect();
    let mut selected = Vec::new();
    let mut stack = Vec::new();
    if root.level() < res.level() {
        let (a, b) = root.children(res)?;
        stack.push(b);
        stack.push(a);
    }
    while let Some(i) = stack.pop() {
        if tables.iter().zip(&limits).any(|(t, l)| t[&i] > *l) {
            selected.push(i);
        } else if i.level() < res.level() {
            let (a, b) = i.children(res)?;
            stack.push(b);
            stack.push(a);
        }
    }
    StoppingCollection::new(*root, selected)
}

/// `‖f 1_{I_0 \ E}‖_∞ + sup_{I ∈ 𝓘} ⟨f⟩_I ≤ C ⟨f⟩_{I_0}` in the given average.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingReport {
    pub reference: f64,
    /// `‖f 1_{I_0 \ E}‖_∞ / ⟨f⟩_{I_0}`.
    pub outside: f64,
    /// `sup_I ⟨f⟩_I / ⟨f⟩_{I_0}`.
    pub inside: f64,
    pub total: f64,
    pub allowed: f64,
    pub relative_measure: f64,
    pub passed: bool,
}

pub fn check_stopping_condition(
    f: &Signal,
    stopping: &StoppingCollection,
    kind: AverageKind,
    c: f64,
) -> Result<StoppingReport> {
    let res = f.resolution();
    let reference = kind.of(f, &stopping.root)?;
    let mask = stopping.outside_mask(res)?;
    let sup_out = f
        .values()
        .iter()
        .zip(&mask)
        .filter(|(_, m)| **m)
        .fold(0.0f64, |a, (v, _)| a.max(v.abs()));
    let mut sup_in = 0.0f64;
    for i in &stopping.intervals {
        sup_in = sup_in.max(kind.of(f, i)?);
    }
    let (outside, inside) = if reference == 0.0 {
        (0.0, 0.0)
    } else {
        (sup_out / reference, sup_in / reference)
    };
    let total = outside + inside;
    Ok(StoppingReport {
        reference,
        outside,
        inside,
        total,
        allowed: c,
        relative_measure: stopping.relative_measure(),
        passed: total <= c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecompositionMode {
    /// Controlled by `L(log L)^{1/2}` averages.
    Psi2,
    /// Controlled by `L^q` averages, `1 < q ≤ 2`.
    Lq(f64),
}

impl DecompositionMode {
    pub fn average(self) -> AverageKind {
        match self {
            DecompositionMode::Psi2 => AverageKind::Psi2,
            DecompositionMode::Lq(q) => AverageKind::Lp(q),
        }
    }

    /// Growth of the local `L^2` bounds in the number of jumps.
    pub fn scale(self, jumps: usize) -> f64 {
        let j = jumps as f64;
        match self {
            DecompositionMode::Psi2 => j.sqrt(),
            DecompositionMode::Lq(q) => j.powf(1.0 / q - 0.5) / (q - 1.0).sqrt(),
        }
    }
}

/// The pieces living on one stopping interval: `f_I` from the jump tiles and
/// `f'_I` from the clean ones. Both are supported on `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPart {
    pub interval: DyadicInterval,
    pub jump: Signal,
    pub clean: Signal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub stopping: StoppingReport,
    /// `‖f 1_{I_0} - f_∞ - Σ (f_I + f'_I)‖_∞`.
    pub reconstruction_error: f64,
    /// `max_I |⟨f_I, f'_I⟩|`.
    pub orthogonality: f64,
    /// `‖f_∞‖_∞ / ⟨f⟩_{I_0}`.
    pub linf_constant: f64,
    /// `max_I ⟨f_I⟩_{I,2} / (scale · ⟨f⟩_{I_0})`.
    pub l2_constant: f64,
    /// `max_I ‖S_I(f_I)‖_∞ / (scale · ⟨f⟩_{I_0})`.
    pub square_constant: f64,
    /// `max_I ‖T_m f'_I - T_{m_I} f'_I‖_∞` plus `‖T_{m_I} f_I‖_∞`.
    pub transfer_error: f64,
    /// Largest number of jump tiles in one frequency block.
    pub max_block_jump_tiles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyDecomposition {
    pub root: DyadicInterval,
    /// `f` on `I_0` off the stopping intervals.
    pub f_inf: Signal,
    pub parts: Vec<LocalPart>,
    pub report: DecompositionReport,
}

impl KeyDecomposition {
    /// `f̃ = f_∞ + Σ f_I`.
    pub fn good_part(&self) -> Signal {
        let mut out = self.f_inf.clone();
        for p in &self.parts {
            out.add_assign(&p.jump).expect("same resolution");
        }
        out
    }
}

/// Key decomposition of `f 1_{I_0}` against an `R_{q,1}` atom adapted to `I_0`.
pub fn key_decomposition(
    f: &Signal,
    atom: &AtomRq1,
    stopping: &StoppingCollection,
    mode: DecompositionMode,
) -> Result<KeyDecomposition> {
    atom.check_within(f.resolution())?;
    if !atom.is_adapted(&stopping.root) {
        return Err(Error::NotAdapted {
            level: stopping.root.level(),
        });
    }
    key_decomposition_unadapted(f, &atom.representation(), atom.jumps(), stopping, mode)
}

/// The same split for an arbitrary representation `Σ c_ω 1_ω`, such as a good
/// collection; no adaptation to `I_0` is required.
pub fn key_decomposition_unadapted(
    f: &Signal,
    representation: &[(FrequencyInterval, f64)],
    jumps: usize,
    stopping: &StoppingCollection,
    mode: DecompositionMode,
) -> Result<KeyDecomposition> {
    let res = f.resolution();
    if let DecompositionMode::Lq(q) = mode {
        if !(q > 1.0 && q <= 2.0) {
            return Err(Error::InvalidExponent(q));
        }
    }
    let root = stopping.root;
    root.check_within(res)?;
    let kind = mode.average();
    let limit = STOPPING_CONSTANT;
    let f = f.restrict(&root)?;
    let stop = check_stopping_condition(&f, stopping, kind, limit)?;
    if !stop.passed {
        return Err(Error::StoppingConditionViolated {
            observed: stop.total,
            allowed: limit,
        });
    }
    let symbol = MultiplierSymbol::new(representation.to_vec())?;
    let mask = stopping.outside_mask(res)?;
    let f_inf = Signal::new(
        res,
        f.values()
            .iter()
            .zip(&mask)
            .map(|(v, m)| if *m { *v } else { 0.0 })
            .collect(),
    )?;

    let reference = stop.reference;
    let scale = mode.scale(jumps.max(1));
    let denom = |x: f64| {
        if reference == 0.0 {
            0.0
        } else {
            x / (scale * reference)
        }
    };
    let mut parts = Vec::with_capacity(stopping.intervals.len());
    let mut rebuilt = f_inf.clone();
    let (mut orth, mut l2c, mut sqc, mut transfer, mut max_tiles) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0);
    for i in &stopping.intervals {
        let partition = tile_partition(representation, i, res)?;
        let coeffs = local_coefficients(&f, i)?;
        let (mut jc, mut cc) = (coeffs.clone(), coeffs);
        for t in &partition.jump {
            cc[t.freq()] = 0.0;
        }
        for t in &partition.clean {
            jc[t.freq()] = 0.0;
        }
        let jump = synthesize_local(res, i, &jc)?;
        let clean = synthesize_local(res, i, &cc)?;
        max_tiles = max_tiles.max(
            partition
                .block_counts()
                .values()
                .copied()
                .max()
                .unwrap_or(0),
        );

        orth = orth.max(jump.inner(&clean)?.abs());
        l2c = l2c.max(denom(jump.average(i, 2.0)?));
        sqc = sqc.max(denom(s_local(&jump, i)?.sup_norm()));

        let induced = MultiplierSymbol::new(
            representation
                .iter()
                .filter_map(|(w, c)| relative_interior(w, i).map(|r| (r, *c)))
                .collect(),
        )?;
        let full = symbol.apply(&clean)?;
        let local = induced.apply(&clean)?;
        let killed = induced.apply(&jump)?.sup_norm();
        transfer = transfer.max(full.max_abs_diff(&local)? + killed);

        rebuilt.add_assign(&jump)?;
        rebuilt.add_assign(&clean)?;
        parts.push(LocalPart {
            interval: *i,
            jump,
            clean,
        });
    }
    let report = DecompositionReport {
        reconstruction_error: rebuilt.max_abs_diff(&f)?,
        orthogonality: orth,
        linf_constant: if reference == 0.0 {
            0.0
        } else {
            f_inf.sup_norm() / reference
        },
        l2_constant: l2c,
        square_constant: sqc,
        transfer_error: transfer,
        max_block_jump_tiles: max_tiles,
        stopping: stop,
    };
    Ok(KeyDecomposition {
        root,
        f_inf,
        parts,
        report,
    })
}

/// `4 ψ₂^{-1}(1) + 8`, the sharp form of the bound behind [`STOPPING_CONSTANT`].
pub fn stopping_bound() -> f64 {
    STOPPING_THRESHOLD * OrliczFunction::Psi2.inverse_at_one() + 2.0 * STOPPING_THRESHOLD
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::{atom_block_range, AtomBlock};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::vec;

    fn res(n: u32) -> Resolution {
        Resolution::new(n).unwrap()
    }

    fn spiky(r: Resolution, rng: &mut ChaCha8Rng) -> Signal {
        Signal::from_fn(r, |_| {
            let base = rng.gen_range(-1.0..1.0);
            if rng.gen_bool(0.03) {
                base * 40.0
            } else {
                base
            }
        })
    }

    fn random_atom(rng: &mut ChaCha8Rng, n: u32, jumps: usize, q: f64) -> AtomRq1 {
        let mut blocks = Vec::new();
        for k in 0..=n {
            let range = atom_block_range(k);
            let mut cuts: Vec<usize> = (0..2 * rng.gen_range(0..=jumps))
                .map(|_| rng.gen_range(range.start()..=range.end()))
                .collect();
            cuts.sort();
            cuts.dedup();
            let intervals = cuts
                .chunks_exact(2)
                .map(|c| FrequencyInterval::new(c[0], c[1]).unwrap())
                .collect();
            blocks.push(AtomBlock { k, intervals });
        }
        AtomRq1::new(q, jumps, blocks).unwrap()
    }

    #[test]
    fn stopping_bound_below_constant() {
        let b = stopping_bound();
        assert!(b > 11.0 && b < STOPPING_CONSTANT, "{b}");
    }

    #[test]
    fn family_is_maximal_and_small() {
        let r = res(9);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let f = spiky(r, &mut rng);
            let unit = DyadicInterval::unit();
            for kind in [
                AverageKind::Psi2,
                AverageKind::Lp(1.0),
                AverageKind::Lp(1.5),
            ] {
                let t = kind.table(&f).unwrap();
                let s = stopping_family(&[&t], &unit, STOPPING_THRESHOLD).unwrap();
                assert!(s.relative_measure() < 0.25 + 1e-12);
                for i in s.intervals() {
                    assert!(t[i] > 4.0 * t[&unit]);
                    let mut p = i.parent().unwrap();
                    while p != unit {
                        assert!(t[&p] <= 4.0 * t[&unit]);
                        p = p.parent().unwrap();
                    }
                }
                let rep = check_stopping_condition(&f, &s, kind, STOPPING_CONSTANT).unwrap();
                assert!(rep.passed, "{rep:?}");
                assert!(rep.inside <= 8.0 + 1e-9 && rep.outside <= 8.0 + 1e-9);
            }
        }
    }

    #[test]
    fn rejects_overlap() {
        let unit = DyadicInterval::unit();
        let a = DyadicInterval::new(1, 0).unwrap();
        let b = DyadicInterval::new(2, 0).unwrap();
        assert!(StoppingCollection::new(unit, vec![a, b]).is_err());
        assert!(StoppingCollection::new(a, vec![a]).is_err());
    }

    #[test]
    fn decomposition_reconstructs_and_transfers() {
        let r = res(9);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..8 {
            let f = spiky(r, &mut rng);
            let jumps = 1 + trial % 3;
            let atom = random_atom(&mut rng, 9, jumps, 1.5);
            let t = AverageKind::Psi2.table(&f).unwrap();
            let s = stopping_family(&[&t], &DyadicInterval::unit(), STOPPING_THRESHOLD).unwrap();
            for mode in [DecompositionMode::Psi2, DecompositionMode::Lq(1.5)] {
                let d = key_decomposition(&f, &atom, &s, mode).unwrap();
                let rep = &d.report;
                assert!(rep.reconstruction_error < 1e-10);
                assert!(rep.orthogonality < 1e-10);
                assert!(rep.transfer_error < 1e-10, "{rep:?}");
                assert!(rep.max_block_jump_tiles <= 2 * jumps);
                assert!(rep.linf_constant <= STOPPING_CONSTANT);
                assert!(rep.l2_constant.is_finite() && rep.square_constant.is_finite());
            }
        }
    }

    #[test]
    fn unadapted_atom_is_rejected() {
        let r = res(6);
        let f = Signal::constant(r, 1.0);
        let atom = AtomRq1::new(
            2.0,
            1,
            vec![AtomBlock {
                k: 3,
                intervals: vec![FrequencyInterval::new(5, 7).unwrap()],
            }],
        )
        .unwrap();
        let root = DyadicInterval::new(2, 1).unwrap();
        let s = StoppingCollection::new(root, vec![]).unwrap();
        assert!(matches!(
            key_decomposition(&f, &atom, &s, DecompositionMode::Psi2),
            Err(Error::NotAdapted { .. })
        ));
    }

    #[test]
    fn violated_stopping_condition_is_an_error() {
        let r = res(6);
        let f = Signal::from_fn(r, |i| if i == 0 { 1000.0 } else { 0.01 });
        let atom = AtomRq1::new(2.0, 1, vec![]).unwrap();
        let s = StoppingCollection::new(DyadicInterval::unit(), vec![]).unwrap();
        assert!(matches!(
            key_decomposition(&f, &atom, &s, DecompositionMode::Psi2),
            Err(Error::StoppingConditionViolated { .. })
        ));
    }
}

//! Littlewood–Paley type square functions on the Walsh system and the
//! reduction of `S_λ` to a martingale part plus good collections.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{DyadicInterval, FrequencyInterval, Resolution, Signal};
use crate::error::{Error, Result};
use crate::haar::haar_forward;
use crate::multiplier::{relative_interior, MultiplierSymbol};
use crate::walsh::{modulate, paley_inverse_in_place, project, walsh_forward, Spectrum};

/// Pointwise `Σ_ω |T_ω f|^2` from a precomputed spectrum.
pub fn block_energy(spectrum: &Spectrum, blocks: &[FrequencyInterval]) -> Result<Vec<f64>> {
    let res = spectrum.resolution();
    let mut out = vec![0.0; res.cells()];
    let mut buf = vec![0.0; res.cells()];
    for w in blocks {
        w.check_within(res)?;
        buf.iter_mut().for_each(|x| *x = 0.0);
        buf[w.range()].copy_from_slice(&spectrum.coeffs()[w.range()]);
        paley_inverse_in_place(&mut buf);
        for (o, v) in out.iter_mut().zip(&buf) {
            *o += v * v;
        }
    }
    Ok(out)
}

fn sqrt_signal(res: Resolution, energy: Vec<f64>) -> Signal {
    Signal::new(res, energy.into_iter().map(|e| e.sqrt()).collect()).expect("one value per cell")
}

/// `[λ^{k-1}, λ^k)` for `k ≥ 1`, the last one clipped at `2^N`.
pub fn lambda_blocks(lambda: usize, res: Resolution) -> Result<Vec<FrequencyInterval>> {
    if lambda < 2 {
        return Err(Error::InvalidParameter(format!(
            "λ = {lambda} must be at least 2"
        )));
    }
    let top = res.cells();
    let mut out = Vec::new();
    let mut start = 1usize;
    while start < top {
        let end = start.saturating_mul(lambda).min(top);
        out.push(FrequencyInterval::new(start, end)?);
        start = end;
    }
    Ok(out)
}

/// `S_λ f = (|f̂(0)|^2 + Σ_k |T_{[λ^{k-1}, λ^k)} f|^2)^{1/2}`.
pub fn s_lambda(f: &Signal, lambda: usize) -> Result<Signal> {
    let res = f.resolution();
    let spectrum = walsh_forward(f);
    let mut energy = block_energy(&spectrum, &lambda_blocks(lambda, res)?)?;
    let dc = spectrum.coeffs()[0];
    energy.iter_mut().for_each(|e| *e += dc * dc);
    Ok(sqrt_signal(res, energy))
}

/// The dyadic square function with its mean term, computed from Haar
/// coefficients. Agrees with `s_lambda(f, 2)`.
pub fn s2_haar(f: &Signal) -> Signal {
    let mut energy = haar_energy(f, &DyadicInterval::unit());
    let mean = f.integral();
    energy.iter_mut().for_each(|e| *e += mean * mean);
    sqrt_signal(f.resolution(), energy)
}

fn haar_energy(f: &Signal, interval: &DyadicInterval) -> Vec<f64> {
    let res = f.resolution();
    let h = haar_forward(f);
    let mut energy = vec![0.0; res.cells()];
    for (q, c) in h.iter().filter(|(q, _)| interval.contains(q)) {
        let e = c * c / q.length();
        for i in q.cells(res).expect("within resolution") {
            energy[i] += e;
        }
    }
    energy
}

/// `S_I(f)^2 = Σ_{Q ⊆ I} |⟨f, h_Q⟩|^2 / |Q| 1_Q`.
pub fn s_local(f: &Signal, interval: &DyadicInterval) -> Result<Signal> {
    interval.check_within(f.resolution())?;
    Ok(sqrt_signal(f.resolution(), haar_energy(f, interval)))
}

/// Disjoint intervals `[2^k, v_k)` with `2^k < v_k ≤ 2^{k+1}`, at most one per
/// `k`, and `2^k |I_0| ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodCollection {
    base: DyadicInterval,
    intervals: Vec<FrequencyInterval>,
}

impl GoodCollection {
    pub fn new(base: DyadicInterval, mut intervals: Vec<FrequencyInterval>) -> Result<Self> {
        intervals.sort_by_key(|w| w.start());
        for w in &intervals {
            let s = w.start();
            if !s.is_power_of_two() || w.end() > 2 * s {
                return Err(Error::NotGood(format!(
                    "[{}, {}) is not of the form [2^k, v) with v ≤ 2^(k+1)",
                    s,
                    w.end()
                )));
            }
            if s < base.frequency_scale() {
                return Err(Error::NotGood(format!(
                    "2^k = {s} is below the scale of the base interval"
                )));
            }
        }
        for pair in intervals.windows(2) {
            if pair[0].start() == pair[1].start() {
                return Err(Error::NotGood(format!(
                    "two intervals start at {}",
                    pair[0].start()
                )));
            }
        }
        Ok(GoodCollection { base, intervals })
    }

    pub fn empty(base: DyadicInterval) -> Self {
        GoodCollection {
            base,
            intervals: Vec::new(),
        }
    }

    pub fn base(&self) -> DyadicInterval {
        self.base
    }

    pub fn intervals(&self) -> &[FrequencyInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn check_within(&self, res: Resolution) -> Result<()> {
        self.base.check_within(res)?;
        self.intervals.iter().try_for_each(|w| w.check_within(res))
    }

    /// `Ω_I = {ω°_I}`, an `I`-good collection for `I ⊆ I_0`.
    pub fn induce(&self, interval: &DyadicInterval) -> Result<GoodCollection> {
        if !self.base.contains(interval) {
            return Err(Error::InvalidParameter(format!(
                "{interval:?} is not inside the base {:?}",
                self.base
            )));
        }
        let intervals = self
            .intervals
            .iter()
            .filter_map(|w| relative_interior(w, interval))
            .collect();
        GoodCollection::new(*interval, intervals)
    }

    /// `Σ_ω 1_ω`, the multiplier whose jump tiles drive the decomposition.
    pub fn representation(&self) -> Vec<(FrequencyInterval, f64)> {
        self.intervals.iter().map(|w| (*w, 1.0)).collect()
    }
}

/// `S_Ω f = (Σ_ω |T_ω f|^2)^{1/2}`.
pub fn s_good(f: &Signal, omega: &GoodCollection) -> Result<Signal> {
    omega.check_within(f.resolution())?;
    let energy = block_energy(&walsh_forward(f), omega.intervals())?;
    Ok(sqrt_signal(f.resolution(), energy))
}

/// The same square function through `|T_{[2^k, v)} f| = |T_{[0, v-2^k)}(w_{2^k} f)|`.
pub fn s_good_modulated(f: &Signal, omega: &GoodCollection) -> Result<Signal> {
    let res = f.resolution();
    omega.check_within(res)?;
    let mut energy = vec![0.0; res.cells()];
    for w in omega.intervals() {
        let shifted = FrequencyInterval::new(0, w.len())?;
        let part = project(&modulate(f, w.start())?, &shifted)?;
        for (e, v) in energy.iter_mut().zip(part.values()) {
            *e += v * v;
        }
    }
    Ok(sqrt_signal(res, energy))
}

/// Strictly increasing powers of two `μ_0 < μ_1 < …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleGrid {
    points: Vec<usize>,
}

impl MartingaleGrid {
    pub fn new(mut points: Vec<usize>) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        if let Some(p) = points.iter().find(|p| !p.is_power_of_two()) {
            return Err(Error::InvalidParameter(format!(
                "{p} is not a power of two"
            )));
        }
        Ok(MartingaleGrid { points })
    }

    /// `1, 2, 4, …, 2^N`.
    pub fn dyadic(res: Resolution) -> Self {
        MartingaleGrid {
            points: (0..=res.level()).map(|k| 1usize << k).collect(),
        }
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn cells(&self) -> Vec<FrequencyInterval> {
        self.points
            .windows(2)
            .map(|p| FrequencyInterval::new(p[0], p[1]).expect("increasing"))
            .collect()
    }

    /// The grid seen from `I`: points below `1/|I|` collapse onto `1/|I|`.
    pub fn truncate(&self, interval: &DyadicInterval) -> MartingaleGrid {
        let floor = interval.frequency_scale();
        let mut points: Vec<usize> = self.points.iter().map(|&p| p.max(floor)).collect();
        points.dedup();
        if self.points.last().is_some_and(|&p| p < floor) {
            points.clear();
        }
        MartingaleGrid { points }
    }
}

/// `(Σ_i |T_{[μ_i, μ_{i+1})} f|^2)^{1/2}`.
pub fn s_martingale(f: &Signal, mu: &MartingaleGrid) -> Result<Signal> {
    let energy = block_energy(&walsh_forward(f), &mu.cells())?;
    Ok(sqrt_signal(f.resolution(), energy))
}

/// How one block `[λ^{k-1}, λ^k)` was split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSplit {
    pub block: FrequencyInterval,
    /// `[u, 2^a)`, dominated through `[2^{a-1}, 2^a)` and `[2^{a-1}, u)`.
    pub left: Option<FrequencyInterval>,
    /// `[2^a, 2^b)`, one martingale cell.
    pub middle: Option<FrequencyInterval>,
    /// `[2^b, v)`.
    pub right: Option<FrequencyInterval>,
    /// Pointwise constant for this block.
    pub factor: usize,
}

/// `S_λ^2 ≤ κ (|f̂(0)|^2 + S_μ^2 + S_{Ω_right}^2 + S_{Ω_left}^2)` pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaReduction {
    pub lambda: usize,
    pub grid: MartingaleGrid,
    pub right: GoodCollection,
    pub left: GoodCollection,
    pub kappa: usize,
    pub splits: Vec<BlockSplit>,
}

pub fn reduce_s_lambda(lambda: usize, res: Resolution) -> Result<LambdaReduction> {
    let unit = DyadicInterval::unit();
    let mut points = Vec::new();
    let (mut right, mut left, mut splits) = (Vec::new(), Vec::new(), Vec::new());
    for block in lambda_blocks(lambda, res)? {
        let (s, e) = (block.start(), block.end());
        let a = s.next_power_of_two();
        let b = 1usize << (usize::BITS - 1 - e.leading_zeros());
        let mut split = BlockSplit {
            block,
            left: None,
            middle: None,
            right: None,
            factor: 0,
        };
        if s < a {
            split.left = Some(FrequencyInterval::new(s, a)?);
            points.extend([a / 2, a]);
            left.push(FrequencyInterval::new(a / 2, s)?);
        }
        if a < b {
            split.middle = Some(FrequencyInterval::new(a, b)?);
            points.extend([a, b]);
        }
        if b < e && b >= a {
            split.right = Some(FrequencyInterval::new(b, e)?);
            right.push(split.right.expect("just set"));
        }
        let parts = [split.left, split.middle, split.right]
            .iter()
            .filter(|p| p.is_some())
            .count();
        split.factor = parts * if split.left.is_some() { 2 } else { 1 };
        splits.push(split);
    }
    let kappa = splits.iter().map(|s| s.factor).max().unwrap_or(1);
    Ok(LambdaReduction {
        lambda,
        grid: MartingaleGrid::new(points)?,
        right: GoodCollection::new(unit, right)?,
        left: GoodCollection::new(unit, left)?,
        kappa,
        splits,
    })
}

impl LambdaReduction {
    /// Pointwise `|f̂(0)|^2 + S_μ^2 + S_{Ω_right}^2 + S_{Ω_left}^2`.
    pub fn dominator_energy(&self, f: &Signal) -> Result<Vec<f64>> {
        let spectrum = walsh_forward(f);
        let mut blocks = self.grid.cells();
        blocks.extend_from_slice(self.right.intervals());
        let mut energy = block_energy(&spectrum, &blocks)?;
        let extra = block_energy(&spectrum, self.left.intervals())?;
        let dc = spectrum.coeffs()[0];
        for (e, x) in energy.iter_mut().zip(extra) {
            *e += x + dc * dc;
        }
        Ok(energy)
    }
}

/// Parses `m = Σ_k σ_k 1_{[2^k, ν_k)}` with `σ_k ∈ {-1, 1}` and
/// `2^k < ν_k ≤ 2^{k+1}`, returning the collection of the nonzero blocks and
/// the signs. Then `S_2(T_m f) = S_Ω f` exactly.
pub fn composition_collection(
    m: &MultiplierSymbol,
) -> Result<(GoodCollection, Vec<(FrequencyInterval, f64)>)> {
    if m.value(0) != 0.0 {
        return Err(Error::NotBlockForm(
            "the zero frequency must be unmodified".into(),
        ));
    }
    let top = m.pieces().last().map_or(0, |(w, _)| w.end());
    let (mut intervals, mut signed) = (Vec::new(), Vec::new());
    let mut s = 1usize;
    while s < top {
        // Pieces clipped to the block [s, 2s); canonical merging may join blocks.
        let clipped: Vec<(usize, usize, f64)> = m
            .pieces()
            .iter()
            .filter(|(w, _)| w.start() < 2 * s && w.end() > s)
            .map(|(w, c)| (w.start().max(s), w.end().min(2 * s), *c))
            .collect();
        match clipped.as_slice() {
            [] => {}
            [(a, b, c)] if *a == s && (*c == 1.0 || *c == -1.0) => {
                let w = FrequencyInterval::new(s, *b)?;
                intervals.push(w);
                signed.push((w, *c));
            }
            _ => {
                return Err(Error::NotBlockForm(format!(
                    "block [{}, {}) is not σ 1_[2^k, ν) with σ = ±1",
                    s,
                    2 * s
                )))
            }
        }
        s *= 2;
    }
    let omega = GoodCollection::new(DyadicInterval::unit(), intervals)?;
    Ok((omega, signed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walsh::walsh_function;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::vec;
    use std::vec::Vec;

    fn res(n: u32) -> Resolution {
        Resolution::new(n).unwrap()
    }

    fn fi(a: usize, b: usize) -> FrequencyInterval {
        FrequencyInterval::new(a, b).unwrap()
    }

    fn random(r: Resolution, rng: &mut ChaCha8Rng) -> Signal {
        Signal::from_fn(r, |_| rng.gen_range(-1.0..1.0))
    }

    fn random_good(r: Resolution, rng: &mut ChaCha8Rng, base: DyadicInterval) -> GoodCollection {
        let mut intervals = Vec::new();
        for k in base.level()..r.level() {
            if rng.gen_bool(0.6) {
                let s = 1usize << k;
                intervals.push(fi(s, rng.gen_range(s + 1..=2 * s)));
            }
        }
        GoodCollection::new(base, intervals).unwrap()
    }

    #[test]
    fn lambda_blocks_cover_the_spectrum() {
        let r = res(8);
        assert_eq!(
            lambda_blocks(3, r).unwrap(),
            vec![
                fi(1, 3),
                fi(3, 9),
                fi(9, 27),
                fi(27, 81),
                fi(81, 243),
                fi(243, 256)
            ]
        );
        assert!(lambda_blocks(1, r).is_err());
    }

    #[test]
    fn single_character_has_unit_square_function() {
        let r = res(7);
        for lambda in [2, 3, 5, 7] {
            for n in [0, 1, 5, 77, 127] {
                let s = s_lambda(&walsh_function(r, n).unwrap(), lambda).unwrap();
                assert!(s.max_abs_diff(&Signal::constant(r, 1.0)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn s_lambda_is_an_isometry() {
        let r = res(9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for lambda in 2..8 {
            let f = random(r, &mut rng);
            let s = s_lambda(&f, lambda).unwrap();
            assert!((s.norm2() / f.norm2() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_paths_to_s2() {
        let r = res(10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let f = random(r, &mut rng);
            let a = s_lambda(&f, 2).unwrap();
            let b = s2_haar(&f);
            assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
        }
    }

    #[test]
    fn local_square_function() {
        let r = res(6);
        let q = DyadicInterval::new(3, 2).unwrap();
        let i = DyadicInterval::new(1, 0).unwrap();
        let h = crate::haar::haar_function(r, &q).unwrap();
        let s = s_local(&h, &i).unwrap();
        let expected = Signal::indicator(r, &q, 1.0 / q.length().sqrt()).unwrap();
        assert!(s.max_abs_diff(&expected).unwrap() < 1e-12);
        let c = Signal::indicator(r, &i, 2.0).unwrap();
        assert!(s_local(&c, &i).unwrap().sup_norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random(r, &mut rng);
        let full = s_local(&f, &DyadicInterval::unit()).unwrap();
        let mut centered = f.clone();
        let mean = f.integral();
        centered.values_mut().iter_mut().for_each(|v| *v -= mean);
        let s2 = s2_haar(&centered);
        assert!(full.max_abs_diff(&s2).unwrap() < 1e-12);
    }

    #[test]
    fn good_collection_validation() {
        let unit = DyadicInterval::unit();
        assert!(GoodCollection::new(unit, vec![fi(4, 7), fi(8, 16)]).is_ok());
        assert!(GoodCollection::new(unit, vec![fi(3, 4)]).is_err());
        assert!(GoodCollection::new(unit, vec![fi(4, 9)]).is_err());
        assert!(GoodCollection::new(unit, vec![fi(4, 5), fi(4, 6)]).is_err());
        let i = DyadicInterval::new(3, 1).unwrap();
        assert!(GoodCollection::new(i, vec![fi(4, 6)]).is_err());
        assert!(GoodCollection::new(i, vec![fi(8, 12)]).is_ok());
    }

    #[test]
    fn good_square_function_basics() {
        let r = res(7);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random(r, &mut rng);
        let empty = GoodCollection::empty(DyadicInterval::unit());
        assert_eq!(s_good(&f, &empty).unwrap(), Signal::zeros(r));
        let full = GoodCollection::new(DyadicInterval::unit(), vec![fi(16, 32)]).unwrap();
        let direct = project(&f, &fi(16, 32)).unwrap().map(f64::abs);
        assert!(s_good(&f, &full).unwrap().max_abs_diff(&direct).unwrap() < 1e-12);
    }

    #[test]
    fn modulation_identity_exhaustive() {
        let r = res(8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random(r, &mut rng);
        let spectrum = walsh_forward(&f);
        for k in 0..8 {
            let s = 1usize << k;
            for v in s + 1..=2 * s {
                let w = fi(s, v);
                let direct = block_energy(&spectrum, &[w]).unwrap();
                let moved = project(&modulate(&f, s).unwrap(), &fi(0, v - s)).unwrap();
                for (d, m) in direct.iter().zip(moved.values()) {
                    assert!((d.sqrt() - m.abs()).abs() < 1e-10);
                }
            }
        }
        for _ in 0..10 {
            let omega = random_good(r, &mut rng, DyadicInterval::unit());
            let a = s_good(&f, &omega).unwrap();
            let b = s_good_modulated(&f, &omega).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
        }
    }

    #[test]
    fn induced_good_collection() {
        let unit = DyadicInterval::unit();
        let omega = GoodCollection::new(unit, vec![fi(2, 3), fi(8, 15), fi(32, 64)]).unwrap();
        let i = DyadicInterval::new(2, 1).unwrap();
        let induced = omega.induce(&i).unwrap();
        assert_eq!(induced.intervals(), &[fi(8, 12), fi(32, 64)]);
        assert_eq!(induced.base(), i);
    }

    #[test]
    fn martingale_square_function() {
        let r = res(8);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random(r, &mut rng);
        let whole = MartingaleGrid::new(vec![1, 256]).unwrap();
        let s = s_martingale(&f, &whole).unwrap();
        let direct = project(&f, &fi(1, 256)).unwrap().map(f64::abs);
        assert!(s.max_abs_diff(&direct).unwrap() < 1e-12);
        let fine = MartingaleGrid::dyadic(r);
        let s = s_martingale(&f, &fine).unwrap();
        let dc = f.integral();
        let centered_norm = (f.norm2().powi(2) - dc * dc).sqrt();
        assert!((s.norm2() - centered_norm).abs() < 1e-12);
        assert!(MartingaleGrid::new(vec![1, 3]).is_err());
        let i = DyadicInterval::new(3, 0).unwrap();
        assert_eq!(
            MartingaleGrid::new(vec![1, 4, 16, 64])
                .unwrap()
                .truncate(&i)
                .points(),
            &[8, 16, 64]
        );
    }

    #[test]
    fn reduction_lambda_four_is_trivial() {
        for n in [6, 8, 9] {
            let red = reduce_s_lambda(4, res(n)).unwrap();
            assert_eq!(red.kappa, 1);
            assert!(red.left.is_empty() && red.right.is_empty());
        }
        let red = reduce_s_lambda(2, res(8)).unwrap();
        assert_eq!(red.kappa, 1);
        assert_eq!(red.grid, MartingaleGrid::dyadic(res(8)));
    }

    #[test]
    fn reduction_lambda_three() {
        let red = reduce_s_lambda(3, res(8)).unwrap();
        let s = &red.splits;
        assert_eq!(s[0].middle, Some(fi(1, 2)));
        assert_eq!(s[0].right, Some(fi(2, 3)));
        assert_eq!(s[1].left, Some(fi(3, 4)));
        assert_eq!(s[1].middle, Some(fi(4, 8)));
        assert_eq!(s[1].right, Some(fi(8, 9)));
        assert_eq!(s[1].factor, 6);
        assert_eq!(s[2].left, Some(fi(9, 16)));
        assert_eq!(s[2].right, Some(fi(16, 27)));
        assert_eq!(s[5].block, fi(243, 256));
        assert_eq!(s[5].left, Some(fi(243, 256)));
        assert_eq!(s[5].factor, 2);
        assert_eq!(red.kappa, 6);
        assert_eq!(red.left.intervals()[0], fi(2, 3));
        assert!(red.grid.points().contains(&2) && red.grid.points().contains(&4));
    }

    #[test]
    fn reduction_dominates_pointwise() {
        let r = res(10);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for lambda in [3, 5, 6, 7] {
            let red = reduce_s_lambda(lambda, r).unwrap();
            assert!(red.kappa <= 6);
            for _ in 0..20 {
                let f = random(r, &mut rng);
                let lhs = s_lambda(&f, lambda).unwrap();
                let rhs = red.dominator_energy(&f).unwrap();
                for (l, d) in lhs.values().iter().zip(rhs) {
                    assert!(l * l <= red.kappa as f64 * d * (1.0 + 1e-12) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn composition_is_a_good_square_function() {
        let r = res(8);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let pieces = (0..8)
                .filter_map(|k| {
                    let s = 1usize << k;
                    let sign = [-1.0, 0.0, 1.0][rng.gen_range(0..3)];
                    (sign != 0.0).then(|| (fi(s, rng.gen_range(s + 1..=2 * s)), sign))
                })
                .collect();
            let m = MultiplierSymbol::new(pieces).unwrap();
            let (omega, _) = composition_collection(&m).unwrap();
            let f = random(r, &mut rng);
            let lhs = s_lambda(&m.apply(&f).unwrap(), 2).unwrap();
            let rhs = s_good(&f, &omega).unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
        }
        let bad = MultiplierSymbol::new(vec![(fi(3, 4), 1.0)]).unwrap();
        assert!(composition_collection(&bad).is_err());
        let scaled = MultiplierSymbol::new(vec![(fi(4, 6), 0.5)]).unwrap();
        assert!(composition_collection(&scaled).is_err());
    }
}

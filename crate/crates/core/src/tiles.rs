//! Phase-plane tiles `p = I_p × ω_p` with `|I_p|·|ω_p| = 1` and their wave
//! packets.
//!
//! Frequencies are integers: a tile whose time interval has level `j` owns the
//! `2^j` consecutive frequencies `[n 2^j, (n+1) 2^j)`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{DyadicInterval, FrequencyInterval, Resolution, Signal};
use crate::error::{Error, Result};
use crate::walsh::{paley_forward_in_place, paley_inverse_in_place, walsh_sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    interval: DyadicInterval,
    freq: usize,
}

impl Tile {
    /// Tile over `interval` with frequency block index `freq`.
    pub fn new(interval: DyadicInterval, freq: usize) -> Self {
        Tile { interval, freq }
    }

    /// The tile whose frequency interval is the dyadic `omega` and whose time
    /// interval has index `index`.
    pub fn from_frequency(omega: &FrequencyInterval, index: usize) -> Result<Self> {
        if !omega.is_dyadic() {
            return Err(Error::InvalidParameter(alloc::format!(
                "[{}, {}) is not dyadic",
                omega.start(),
                omega.end()
            )));
        }
        let level = omega.len().trailing_zeros();
        Ok(Tile {
            interval: DyadicInterval::new(level, index)?,
            freq: omega.start() >> level,
        })
    }

    pub fn interval(&self) -> DyadicInterval {
        self.interval
    }

    /// Frequency block index `n`.
    pub fn freq(&self) -> usize {
        self.freq
    }

    pub fn frequency_interval(&self) -> FrequencyInterval {
        let len = self.interval.frequency_scale();
        FrequencyInterval::new(self.freq * len, (self.freq + 1) * len)
            .expect("tile frequency intervals are nonempty")
    }

    pub fn check_within(&self, res: Resolution) -> Result<()> {
        self.interval.check_within(res)?;
        self.frequency_interval().check_within(res)
    }

    /// Rectangle intersection in `[0,1) × [0, 2^N)`.
    pub fn intersects(&self, other: &Tile) -> bool {
        self.interval.intersects(&other.interval)
            && self
                .frequency_interval()
                .intersects(&other.frequency_interval())
    }
}

/// `w_p = |I_p|^{-1/2} w_n((x - ℓ_{I_p}) / |I_p|) 1_{I_p}`.
pub fn wave_packet(tile: &Tile, res: Resolution) -> Result<Signal> {
    tile.check_within(res)?;
    let cells = tile.interval.cells(res)?;
    let local_bits = res.level() - tile.interval.level();
    let height = 1.0 / tile.interval.length().sqrt();
    Ok(Signal::from_fn(res, |i| {
        if cells.contains(&i) {
            height * walsh_sign(tile.freq, i - cells.start, local_bits)
        } else {
            0.0
        }
    }))
}

/// `⟨f, w_p⟩` for a single tile, by direct summation over `I_p`.
pub fn tile_coefficient(f: &Signal, tile: &Tile) -> Result<f64> {
    let res = f.resolution();
    tile.check_within(res)?;
    let cells = tile.interval.cells(res)?;
    let local_bits = res.level() - tile.interval.level();
    let sum: f64 = cells
        .clone()
        .map(|i| f.values()[i] * walsh_sign(tile.freq, i - cells.start, local_bits))
        .sum();
    Ok(sum * res.cell_width() / tile.interval.length().sqrt())
}

/// Coefficients `⟨f, w_p⟩` for every `p ∈ P(I)`, indexed by frequency block.
pub fn local_coefficients(f: &Signal, interval: &DyadicInterval) -> Result<Vec<f64>> {
    let cells = interval.cells(f.resolution())?;
    let mut buf = f.values()[cells].to_vec();
    paley_forward_in_place(&mut buf);
    let scale = interval.length().sqrt();
    for c in buf.iter_mut() {
        *c *= scale;
    }
    Ok(buf)
}

/// `Σ_n coeffs[n] w_{(I, n)}`, supported on `I`.
pub fn synthesize_local(
    res: Resolution,
    interval: &DyadicInterval,
    coeffs: &[f64],
) -> Result<Signal> {
    let cells = interval.cells(res)?;
    if coeffs.len() != cells.len() {
        return Err(Error::LengthMismatch {
            expected: cells.len(),
            found: coeffs.len(),
        });
    }
    let mut buf = coeffs.to_vec();
    paley_inverse_in_place(&mut buf);
    let height = 1.0 / interval.length().sqrt();
    let mut out = Signal::zeros(res);
    for (slot, v) in out.values_mut()[cells].iter_mut().zip(buf) {
        *slot = height * v;
    }
    Ok(out)
}

/// `P(I)`: the `|I|·2^N` tiles with time interval `I`.
pub fn local_basis(interval: &DyadicInterval, res: Resolution) -> Result<Vec<Tile>> {
    let count = interval.cell_count(res)?;
    Ok((0..count).map(|n| Tile::new(*interval, n)).collect())
}

/// `ω^j = [n^{j-1}, n^j)` from the binary partial sums of `n`, largest digit
/// first. Empty for `n = 0`.
pub fn binary_expansion_intervals(n: usize) -> Vec<FrequencyInterval> {
    let mut out = Vec::new();
    let mut start = 0;
    for bit in (0..usize::BITS).rev() {
        let digit = 1usize << bit;
        if n & digit != 0 {
            out.push(FrequencyInterval::new(start, start + digit).expect("nonempty"));
            start += digit;
        }
    }
    out
}

/// The tiles of `P(n)` that meet `I_0 × [0, n)`.
///
/// For `f` supported on `I_0`, `T_{[0,n)} f = Σ ⟨f, w_p⟩ w_p` over these
/// tiles. A tile finer than `I_0` in time is enumerated over all of its
/// positions inside `I_0`; a coarser one contributes the single ancestor
/// of `I_0`.
pub fn projection_tile_expansion(
    n: usize,
    base: &DyadicInterval,
    res: Resolution,
) -> Result<Vec<Tile>> {
    if n > res.cells() {
        return Err(Error::FrequencyOutOfRange {
            frequency: n,
            limit: res.cells(),
        });
    }
    base.check_within(res)?;
    let mut tiles = Vec::new();
    for omega in binary_expansion_intervals(n) {
        let level = omega.len().trailing_zeros();
        if level >= base.level() {
            for interval in base.descendants(res).filter(|d| d.level() == level) {
                tiles.push(Tile::from_frequency(&omega, interval.index())?);
            }
        } else {
            let ancestor = base.ancestor(level).expect("coarser level");
            tiles.push(Tile::from_frequency(&omega, ancestor.index())?);
        }
    }
    Ok(tiles)
}

/// `Σ_{p ∈ tiles} ⟨f, w_p⟩ w_p`.
pub fn tile_sum(f: &Signal, tiles: &[Tile]) -> Result<Signal> {
    let res = f.resolution();
    let mut out = Signal::zeros(res);
    for tile in tiles {
        let c = tile_coefficient(f, tile)?;
        if c == 0.0 {
            continue;
        }
        let cells = tile.interval.cells(res)?;
        let local_bits = res.level() - tile.interval.level();
        let height = c / tile.interval.length().sqrt();
        for i in cells.clone() {
            out.values_mut()[i] += height * walsh_sign(tile.freq, i - cells.start, local_bits);
        }
    }
    Ok(out)
}

/// The sign `σ` with `w_n · w_p = σ h_{I_p}` for a tile of the binary tile
/// expansion of `n`.
pub fn signed_haar_factor(n: usize, tile: &Tile, res: Resolution) -> Result<f64> {
    if n >= res.cells() {
        return Err(Error::FrequencyOutOfRange {
            frequency: n,
            limit: res.cells(),
        });
    }
    tile.check_within(res)?;
    let omega = tile.frequency_interval();
    if !binary_expansion_intervals(n).contains(&omega) {
        return Err(Error::NotInExpansion);
    }
    // n = n^{j-1} + 2^t + rest with rest < 2^t = 1/|I_p|, so w_rest is
    // constant on I_p and w_{n^{j-1}} w_p has the same sign pattern as w_{2^t}.
    let rest = n & (omega.len() - 1);
    let first_cell = tile.interval.cells(res)?.start;
    Ok(walsh_sign(rest, first_cell, res.level()))
}

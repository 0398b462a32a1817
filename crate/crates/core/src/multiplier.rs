//! Piecewise-constant Walsh multipliers, `R_{q,1}` atoms and the operations
//! the sparse recursion needs on them (induced symbols, tile partitions).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{DyadicInterval, FrequencyInterval, Resolution, Signal};
use crate::error::{Error, Result};
use crate::tiles::Tile;
use crate::walsh::apply_symbol;

/// `m = Σ c_ω 1_ω` over disjoint frequency intervals, zero elsewhere.
///
/// Canonical form: pieces sorted, zero coefficients dropped, adjacent pieces
/// with equal coefficients merged. The canonical pieces are the jump
/// representation used by [`MultiplierSymbol::induce`].
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSymbol {
    pieces: Vec<(FrequencyInterval, f64)>,
}

impl MultiplierSymbol {
    pub fn new(mut pieces: Vec<(FrequencyInterval, f64)>) -> Result<Self> {
        pieces.sort_by_key(|(w, _)| w.start());
        for pair in pieces.windows(2) {
            if pair[0].0.end() > pair[1].0.start() {
                return Err(Error::InvalidParameter(format!(
                    "overlapping pieces [{}, {}) and [{}, {})",
                    pair[0].0.start(),
                    pair[0].0.end(),
                    pair[1].0.start(),
                    pair[1].0.end()
                )));
            }
        }
        if let Some((_, c)) = pieces.iter().find(|(_, c)| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite coefficient {c}"
            )));
        }
        let mut out: Vec<(FrequencyInterval, f64)> = Vec::with_capacity(pieces.len());
        for (w, c) in pieces {
            if c == 0.0 {
                continue;
            }
            match out.last_mut() {
                Some((prev, pc)) if prev.end() == w.start() && *pc == c => {
                    *prev = FrequencyInterval::new(prev.start(), w.end())?;
                }
                _ => out.push((w, c)),
            }
        }
        Ok(MultiplierSymbol { pieces: out })
    }

    pub fn zero() -> Self {
        MultiplierSymbol { pieces: Vec::new() }
    }

    /// `c` on all of `[0, 2^N)`.
    pub fn constant(res: Resolution, c: f64) -> Self {
        let full = FrequencyInterval::new(0, res.cells()).expect("nonempty");
        MultiplierSymbol::new(alloc::vec![(full, c)]).expect("single piece")
    }

    /// Run-length encoding of a dense symbol `values[n] = m(n)`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let mut pieces = Vec::new();
        let mut start = 0;
        for n in 1..=values.len() {
            if n == values.len() || values[n] != values[start] {
                pieces.push((FrequencyInterval::new(start, n)?, values[start]));
                start = n;
            }
        }
        MultiplierSymbol::new(pieces)
    }

    pub fn pieces(&self) -> &[(FrequencyInterval, f64)] {
        &self.pieces
    }

    pub fn value(&self, n: usize) -> f64 {
        let idx = self.pieces.partition_point(|(w, _)| w.end() <= n);
        match self.pieces.get(idx) {
            Some((w, c)) if w.contains(n) => *c,
            _ => 0.0,
        }
    }

    pub fn values(&self, res: Resolution) -> Vec<f64> {
        let len = res.cells();
        let mut out = alloc::vec![0.0; len];
        for (w, c) in &self.pieces {
            for n in w.range().take_while(|&n| n < len) {
                out[n] = *c;
            }
        }
        out
    }

    pub fn check_within(&self, res: Resolution) -> Result<()> {
        match self.pieces.last() {
            Some((w, _)) => w.check_within(res),
            None => Ok(()),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces.iter().fold(0.0, |acc, (_, c)| acc.max(c.abs()))
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        self.check_within(f.resolution())?;
        Ok(apply_symbol(f, |n| self.value(n)))
    }

    /// `m_I = Σ c_ω 1_{ω°_I}`.
    pub fn induce(&self, interval: &DyadicInterval) -> MultiplierSymbol {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|(w, c)| relative_interior(w, interval).map(|r| (r, *c)))
            .collect();
        MultiplierSymbol::new(pieces).expect("interiors of disjoint pieces are disjoint")
    }

    /// Constant on every frequency block of length `1/|I|`.
    pub fn is_adapted(&self, interval: &DyadicInterval) -> bool {
        let len = interval.frequency_scale();
        self.pieces
            .iter()
            .all(|(w, _)| w.start() % len == 0 && w.end() % len == 0)
    }
}

/// One dyadic block of an atom: disjoint intervals inside `[2^{k-1}, 2^k)`,
/// with `k = 0` denoting the zero frequency `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomBlock {
    pub k: u32,
    pub intervals: Vec<FrequencyInterval>,
}

/// Frequency range of atom block `k`.
pub fn atom_block_range(k: u32) -> FrequencyInterval {
    if k == 0 {
        FrequencyInterval::new(0, 1).expect("nonempty")
    } else {
        FrequencyInterval::new(1 << (k - 1), 1 << k).expect("nonempty")
    }
}

/// Atom block containing frequency `n`.
pub fn atom_block_of(n: usize) -> u32 {
    usize::BITS - n.leading_zeros()
}

/// An `R_{q,1}` atom with at most `J` intervals per block, each carrying the
/// value `J^{-1/q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomRq1 {
    q: f64,
    jumps: usize,
    blocks: Vec<AtomBlock>,
}

impl AtomRq1 {
    pub fn new(q: f64, jumps: usize, mut blocks: Vec<AtomBlock>) -> Result<Self> {
        if !(1.0..=2.0).contains(&q) {
            return Err(Error::InvalidExponent(q));
        }
        if jumps == 0 {
            return Err(Error::InvalidAtom("J must be at least 1".into()));
        }
        blocks.retain(|b| !b.intervals.is_empty());
        blocks.sort_by_key(|b| b.k);
        for pair in blocks.windows(2) {
            if pair[0].k == pair[1].k {
                return Err(Error::InvalidAtom(format!(
                    "block {} listed twice",
                    pair[0].k
                )));
            }
        }
        for block in blocks.iter_mut() {
            if block.intervals.len() > jumps {
                return Err(Error::InvalidAtom(format!(
                    "block {} has {} intervals, J = {}",
                    block.k,
                    block.intervals.len(),
                    jumps
                )));
            }
            let range = atom_block_range(block.k);
            block.intervals.sort_by_key(|w| w.start());
            for w in &block.intervals {
                if !range.contains_interval(w) {
                    return Err(Error::InvalidAtom(format!(
                        "[{}, {}) leaves block {}",
                        w.start(),
                        w.end(),
                        block.k
                    )));
                }
            }
            for pair in block.intervals.windows(2) {
                if pair[0].end() > pair[1].start() {
                    return Err(Error::InvalidAtom(format!(
                        "overlapping intervals in block {}",
                        block.k
                    )));
                }
            }
        }
        Ok(AtomRq1 { q, jumps, blocks })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The jump bound `J`.
    pub fn jumps(&self) -> usize {
        self.jumps
    }

    pub fn blocks(&self) -> &[AtomBlock] {
        &self.blocks
    }

    /// `J^{-1/q}`.
    pub fn height(&self) -> f64 {
        (self.jumps as f64).powf(-1.0 / self.q)
    }

    /// All intervals of the atom, in increasing order.
    pub fn intervals(&self) -> impl Iterator<Item = &FrequencyInterval> {
        self.blocks.iter().flat_map(|b| b.intervals.iter())
    }

    /// The atom's own jump representation `(ω, J^{-1/q})`.
    pub fn representation(&self) -> Vec<(FrequencyInterval, f64)> {
        let h = self.height();
        self.intervals().map(|w| (*w, h)).collect()
    }

    pub fn value(&self, n: usize) -> f64 {
        let k = atom_block_of(n);
        match self.blocks.binary_search_by_key(&k, |b| b.k) {
            Ok(i) if self.blocks[i].intervals.iter().any(|w| w.contains(n)) => self.height(),
            _ => 0.0,
        }
    }

    pub fn to_symbol(&self) -> MultiplierSymbol {
        MultiplierSymbol::new(self.representation()).expect("atom intervals are disjoint")
    }

    pub fn check_within(&self, res: Resolution) -> Result<()> {
        self.intervals().try_for_each(|w| w.check_within(res))
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        self.to_symbol().apply(f)
    }

    /// Induced atom on `I`: every interval replaced by its interior relative
    /// to `I`. Still an atom with the same `q` and `J`.
    pub fn induce(&self, interval: &DyadicInterval) -> AtomRq1 {
        let blocks = self
            .blocks
            .iter()
            .map(|b| AtomBlock {
                k: b.k,
                intervals: b
                    .intervals
                    .iter()
                    .filter_map(|w| relative_interior(w, interval))
                    .collect(),
            })
            .collect();
        AtomRq1::new(self.q, self.jumps, blocks).expect("interiors keep the atom structure")
    }

    pub fn is_adapted(&self, interval: &DyadicInterval) -> bool {
        let len = interval.frequency_scale();
        self.intervals()
            .all(|w| w.start() % len == 0 && w.end() % len == 0)
    }
}

/// Union of the length-`1/|I|` frequency blocks contained in `ω`; always a
/// single interval or empty.
pub fn relative_interior(
    omega: &FrequencyInterval,
    interval: &DyadicInterval,
) -> Option<FrequencyInterval> {
    let len = interval.frequency_scale();
    let start = omega.start().div_ceil(len) * len;
    let end = (omega.end() / len) * len;
    (start < end).then(|| FrequencyInterval::new(start, end).expect("start < end"))
}

/// `sup |m|` plus the largest total variation strictly inside a dyadic block
/// `[2^j, 2^{j+1})`; jumps across block boundaries are not counted.
pub fn marcinkiewicz_norm(m: &MultiplierSymbol) -> f64 {
    m.sup_norm() + block_variations(m).values().fold(0.0, |a, &v| a.max(v))
}

/// Variation of `m` strictly inside each atom block that has any.
fn block_variations(m: &MultiplierSymbol) -> BTreeMap<u32, f64> {
    let mut out = BTreeMap::new();
    for p in jump_points(m) {
        if p.is_power_of_two() {
            continue;
        }
        let jump = (m.value(p) - m.value(p - 1)).abs();
        *out.entry(atom_block_of(p)).or_insert(0.0) += jump;
    }
    out
}

/// Positions `p ≥ 1` where `m(p)` may differ from `m(p - 1)`.
fn jump_points(m: &MultiplierSymbol) -> Vec<usize> {
    let mut points: Vec<usize> = m
        .pieces()
        .iter()
        .flat_map(|(w, _)| [w.start(), w.end()])
        .filter(|&p| p > 0)
        .collect();
    points.dedup();
    points
}

/// A signed, weighted `R_{1,1}` atom in a finite atomic decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAtom {
    pub weight: f64,
    pub sign: f64,
    pub atom: AtomRq1,
}

/// Exact finite decomposition `m = Σ sign_i θ_i a_i` into `R_{1,1}` atoms
/// with `J = 1`, with `Σ θ_i ≤ 2 ‖m‖_M`.
///
/// On each block `m = c_k + inc_k − dec_k` with `inc_k`, `dec_k`
/// nondecreasing from zero. A layer cake over the distinct values of each of
/// the four parts gives one tail interval (or the whole block) per block
/// and level.
pub fn atomize_marcinkiewicz(m: &MultiplierSymbol) -> Vec<WeightedAtom> {
    struct BlockParts {
        k: u32,
        range: FrequencyInterval,
        constant: f64,
        // (position, cumulative value) after each jump in the block
        inc: Vec<(usize, f64)>,
        dec: Vec<(usize, f64)>,
    }

    let points = jump_points(m);
    let mut top_block = points.last().map(|&p| atom_block_of(p - 1)).unwrap_or(0);
    if let Some((w, _)) = m.pieces().last() {
        top_block = top_block.max(atom_block_of(w.end() - 1));
    }
    let mut parts = Vec::new();
    for k in 0..=top_block {
        let range = atom_block_range(k);
        let constant = m.value(range.start());
        let (mut inc, mut dec) = (Vec::new(), Vec::new());
        let (mut up, mut down) = (0.0, 0.0);
        for &p in points
            .iter()
            .filter(|&&p| p > range.start() && p < range.end())
        {
            let d = m.value(p) - m.value(p - 1);
            if d > 0.0 {
                up += d;
                inc.push((p, up));
            } else if d < 0.0 {
                down -= d;
                dec.push((p, down));
            }
        }
        parts.push(BlockParts {
            k,
            range,
            constant,
            inc,
            dec,
        });
    }

    let mut out = Vec::new();
    // Layer cake of a family of nondecreasing step functions, one per block;
    // `tail(block, t)` returns the set where the block's part is at least t.
    let mut layer_cake =
        |levels: Vec<f64>,
         sign: f64,
         tail: &dyn Fn(&BlockParts, f64) -> Option<FrequencyInterval>| {
            let mut prev = 0.0;
            for t in levels {
                let blocks: Vec<AtomBlock> = parts
                    .iter()
                    .filter_map(|b| {
                        tail(b, t).map(|w| AtomBlock {
                            k: b.k,
                            intervals: alloc::vec![w],
                        })
                    })
                    .collect();
                if !blocks.is_empty() {
                    out.push(WeightedAtom {
                        weight: t - prev,
                        sign,
                        atom: AtomRq1::new(1.0, 1, blocks).expect("one interval per block"),
                    });
                }
                prev = t;
            }
        };

    let sorted = |mut v: Vec<f64>| {
        v.retain(|x| *x > 0.0);
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v.dedup();
        v
    };
    let whole = |b: &BlockParts, t: f64, s: f64| (s * b.constant >= t).then_some(b.range);
    let tail_of = |steps: &[(usize, f64)], end: usize, t: f64| {
        steps
            .iter()
            .find(|(_, v)| *v >= t)
            .map(|(p, _)| FrequencyInterval::new(*p, end).expect("p < end"))
    };

    let pos = sorted(parts.iter().map(|b| b.constant).collect());
    let neg = sorted(parts.iter().map(|b| -b.constant).collect());
    let inc = sorted(
        parts
            .iter()
            .flat_map(|b| b.inc.iter().map(|s| s.1))
            .collect(),
    );
    let dec = sorted(
        parts
            .iter()
            .flat_map(|b| b.dec.iter().map(|s| s.1))
            .collect(),
    );

    layer_cake(pos, 1.0, &|b, t| whole(b, t, 1.0));
    layer_cake(neg, -1.0, &|b, t| whole(b, t, -1.0));
    layer_cake(inc, 1.0, &|b, t| tail_of(&b.inc, b.range.end(), t));
    layer_cake(dec, -1.0, &|b, t| tail_of(&b.dec, b.range.end(), t));
    out
}

/// `Σ sign_i θ_i a_i(n)` for `n < 2^N`.
pub fn reconstruct(atoms: &[WeightedAtom], res: Resolution) -> Vec<f64> {
    let len = res.cells();
    let mut out = alloc::vec![0.0; len];
    for wa in atoms {
        let h = wa.sign * wa.weight * wa.atom.height();
        for w in wa.atom.intervals() {
            for n in w.range().take_while(|&n| n < len) {
                out[n] += h;
            }
        }
    }
    out
}

/// Split of `P(I)` into tiles that see a jump of the representation
/// (`P_m(I)`) and tiles that do not (`P'_m(I)`).
#[derive(Debug, Clone, PartialEq)]
pub struct TilePartition {
    pub jump: Vec<Tile>,
    pub clean: Vec<Tile>,
}

impl TilePartition {
    /// Jump-tile counts per frequency block `D(I, g)`: `g = 0` holds the
    /// zero block index, `g ≥ 1` holds `n ∈ [2^{g-1}, 2^g)`.
    pub fn block_counts(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for t in &self.jump {
            *out.entry(atom_block_of(t.freq())).or_insert(0) += 1;
        }
        out
    }
}

/// Tiles `p ∈ P(I)` are clean when every `ω` of the representation either
/// contains `ω_p` inside `ω°_I` or misses it. Only the (at most two) blocks
/// straddling an endpoint of some `ω` can be jump tiles.
pub fn tile_partition(
    representation: &[(FrequencyInterval, f64)],
    interval: &DyadicInterval,
    res: Resolution,
) -> Result<TilePartition> {
    interval.check_within(res)?;
    let len = interval.frequency_scale();
    let count = interval.cell_count(res)?;
    let mut is_jump = alloc::vec![false; count];
    for (w, _) in representation {
        w.check_within(res)?;
        for p in [w.start(), w.end()] {
            if p % len != 0 {
                is_jump[p / len] = true;
            }
        }
    }
    let (mut jump, mut clean) = (Vec::new(), Vec::new());
    for (n, j) in is_jump.into_iter().enumerate() {
        let tile = Tile::new(*interval, n);
        if j {
            jump.push(tile);
        } else {
            clean.push(tile);
        }
    }
    Ok(TilePartition { jump, clean })
}

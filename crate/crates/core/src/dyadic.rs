//! Dyadic geometry and signal arithmetic at a fixed resolution.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Finest dyadic level in use: the grid has `2^N` cells of width `2^-N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Resolution(u32);

impl Resolution {
    pub const MAX: u32 = 24;

    pub fn new(n: u32) -> Result<Self> {
        if (1..=Self::MAX).contains(&n) {
            Ok(Resolution(n))
        } else {
            Err(Error::ResolutionOutOfRange(n))
        }
    }

    #[inline]
    pub fn level(self) -> u32 {
        self.0
    }

    /// Number of cells, which is also the number of representable frequencies.
    #[inline]
    pub fn cells(self) -> usize {
        1usize << self.0
    }

    #[inline]
    pub fn cell_width(self) -> f64 {
        1.0 / self.cells() as f64
    }

    pub fn check_same(self, other: Resolution) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ResolutionMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }

    /// Every dyadic interval of `[0, 1)` down to single cells, coarse to fine.
    pub fn intervals(self) -> impl Iterator<Item = DyadicInterval> {
        (0..=self.0).flat_map(|level| {
            (0..1usize << level).map(move |index| DyadicInterval { level, index })
        })
    }
}

/// `[k 2^-j, (k+1) 2^-j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    level: u32,
    index: usize,
}

impl DyadicInterval {
    pub fn new(level: u32, index: usize) -> Result<Self> {
        if level > Resolution::MAX || index >= 1usize << level {
            return Err(Error::InvalidIndex { level, index });
        }
        Ok(DyadicInterval { level, index })
    }

    pub const fn unit() -> Self {
        DyadicInterval { level: 0, index: 0 }
    }

    /// The single cell with the given index at resolution `res`.
    pub fn cell(res: Resolution, index: usize) -> Result<Self> {
        Self::new(res.level(), index)
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index
    }

    /// `|I| = 2^-level`.
    #[inline]
    pub fn length(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    pub fn left_endpoint(&self) -> f64 {
        self.index as f64 * self.length()
    }

    /// Frequency block length `1/|I|` in integer frequency units.
    #[inline]
    pub fn frequency_scale(&self) -> usize {
        1usize << self.level
    }

    pub fn check_within(&self, res: Resolution) -> Result<()> {
        if self.level > res.level() {
            Err(Error::LevelBeyondResolution {
                level: self.level,
                resolution: res.level(),
            })
        } else {
            Ok(())
        }
    }

    /// Cell indices covered by the interval at resolution `res`.
    pub fn cells(&self, res: Resolution) -> Result<Range<usize>> {
        self.check_within(res)?;
        let shift = res.level() - self.level;
        Ok((self.index << shift)..((self.index + 1) << shift))
    }

    pub fn cell_count(&self, res: Resolution) -> Result<usize> {
        self.check_within(res)?;
        Ok(1usize << (res.level() - self.level))
    }

    pub fn children(&self, res: Resolution) -> Result<(DyadicInterval, DyadicInterval)> {
        if self.level >= res.level() {
            return Err(Error::LevelBeyondResolution {
                level: self.level + 1,
                resolution: res.level(),
            });
        }
        let level = self.level + 1;
        Ok((
            DyadicInterval {
                level,
                index: 2 * self.index,
            },
            DyadicInterval {
                level,
                index: 2 * self.index + 1,
            },
        ))
    }

    pub fn parent(&self) -> Option<DyadicInterval> {
        (self.level > 0).then(|| DyadicInterval {
            level: self.level - 1,
            index: self.index / 2,
        })
    }

    /// `self ⊇ other`.
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.level >= self.level && (other.index >> (other.level - self.level)) == self.index
    }

    pub fn strictly_contains(&self, other: &DyadicInterval) -> bool {
        other.level > self.level && self.contains(other)
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.contains(other) || other.contains(self)
    }

    /// Ancestor at a coarser level.
    pub fn ancestor(&self, level: u32) -> Option<DyadicInterval> {
        (level <= self.level).then(|| DyadicInterval {
            level,
            index: self.index >> (self.level - level),
        })
    }

    /// All dyadic subintervals of `self` (itself included) down to single cells.
    pub fn descendants(&self, res: Resolution) -> impl Iterator<Item = DyadicInterval> {
        let base = *self;
        let top = res.level().max(base.level);
        (base.level..=top).flat_map(move |level| {
            let shift = level - base.level;
            let first = base.index << shift;
            (first..first + (1usize << shift)).map(move |index| DyadicInterval { level, index })
        })
    }

    /// Position of `self` in the flat coarse-to-fine layout used by
    /// [`IntervalTable`].
    #[inline]
    fn slot(&self) -> usize {
        (1usize << self.level) - 1 + self.index
    }
}

/// Integer frequencies `{start, ..., end - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyInterval {
    start: usize,
    end: usize,
}

impl FrequencyInterval {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::EmptyFrequencyInterval { start, end });
        }
        Ok(FrequencyInterval { start, end })
    }

    #[inline]
    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn end(&self) -> usize {
        self.end
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    /// Never true; intervals are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.start..self.end).contains(&n)
    }

    pub fn contains_interval(&self, other: &FrequencyInterval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: &FrequencyInterval) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Length is a power of two dividing the left endpoint.
    pub fn is_dyadic(&self) -> bool {
        let len = self.len();
        len.is_power_of_two() && self.start.is_multiple_of(len)
    }

    pub fn check_within(&self, res: Resolution) -> Result<()> {
        if self.end > res.cells() {
            Err(Error::FrequencyOutOfRange {
                frequency: self.end - 1,
                limit: res.cells(),
            })
        } else {
            Ok(())
        }
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// Real function on the `2^N` dyadic cells, piecewise constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    res: Resolution,
    values: Vec<f64>,
}

impl Signal {
    pub fn new(res: Resolution, values: Vec<f64>) -> Result<Self> {
        if values.len() != res.cells() {
            return Err(Error::LengthMismatch {
                expected: res.cells(),
                found: values.len(),
            });
        }
        Ok(Signal { res, values })
    }

    pub fn zeros(res: Resolution) -> Self {
        Signal {
            res,
            values: vec![0.0; res.cells()],
        }
    }

    pub fn constant(res: Resolution, c: f64) -> Self {
        Signal {
            res,
            values: vec![c; res.cells()],
        }
    }

    pub fn from_fn(res: Resolution, f: impl FnMut(usize) -> f64) -> Self {
        Signal {
            res,
            values: (0..res.cells()).map(f).collect(),
        }
    }

    /// `height · 1_I`.
    pub fn indicator(res: Resolution, interval: &DyadicInterval, height: f64) -> Result<Self> {
        let cells = interval.cells(res)?;
        Ok(Signal::from_fn(res, |i| {
            if cells.contains(&i) {
                height
            } else {
                0.0
            }
        }))
    }

    #[inline]
    pub fn resolution(&self) -> Resolution {
        self.res
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.res.cell_width()
    }

    /// Lebesgue inner product `∫ f g`.
    pub fn inner(&self, other: &Signal) -> Result<f64> {
        self.res.check_same(other.res)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.res.cell_width())
    }

    pub fn norm2(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.res.cell_width()).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.average(&DyadicInterval::unit(), p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup_I |f|`.
    pub fn sup_on(&self, interval: &DyadicInterval) -> Result<f64> {
        Ok(self.values[interval.cells(self.res)?]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs())))
    }

    /// `⟨f⟩_{I,p} = (|I|^{-1} ∫_I |f|^p)^{1/p}`.
    pub fn average(&self, interval: &DyadicInterval, p: f64) -> Result<f64> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let cells = interval.cells(self.res)?;
        let count = cells.len() as f64;
        let slice = &self.values[cells];
        if p == 1.0 {
            return Ok(slice.iter().map(|v| v.abs()).sum::<f64>() / count);
        }
        // Scale by the local maximum so large p does not overflow.
        let top = slice.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if top == 0.0 {
            return Ok(0.0);
        }
        let mean = slice.iter().map(|v| (v.abs() / top).powf(p)).sum::<f64>() / count;
        Ok(top * mean.powf(1.0 / p))
    }

    /// Signed mean `|I|^{-1} ∫_I f`.
    pub fn mean_on(&self, interval: &DyadicInterval) -> Result<f64> {
        let cells = interval.cells(self.res)?;
        let count = cells.len() as f64;
        Ok(self.values[cells].iter().sum::<f64>() / count)
    }

    /// `f · 1_I`.
    pub fn restrict(&self, interval: &DyadicInterval) -> Result<Signal> {
        let cells = interval.cells(self.res)?;
        Ok(Signal::from_fn(self.res, |i| {
            if cells.contains(&i) {
                self.values[i]
            } else {
                0.0
            }
        }))
    }

    /// `f · 1_{[0,1) ∖ I}`.
    pub fn restrict_complement(&self, interval: &DyadicInterval) -> Result<Signal> {
        let cells = interval.cells(self.res)?;
        Ok(Signal::from_fn(self.res, |i| {
            if cells.contains(&i) {
                0.0
            } else {
                self.values[i]
            }
        }))
    }

    pub fn zip_with(&self, other: &Signal, f: impl Fn(f64, f64) -> f64) -> Result<Signal> {
        self.res.check_same(other.res)?;
        Ok(Signal {
            res: self.res,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Signal {
        Signal {
            res: self.res,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Signal) -> Result<Signal> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Signal {
        self.map(|v| c * v)
    }

    pub fn add_assign(&mut self, other: &Signal) -> Result<()> {
        self.res.check_same(other.res)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(())
    }

    /// `max |f - g|`.
    pub fn max_abs_diff(&self, other: &Signal) -> Result<f64> {
        self.res.check_same(other.res)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// The same function viewed at a finer resolution.
    pub fn refine(&self, res: Resolution) -> Result<Signal> {
        if res.level() < self.res.level() {
            return Err(Error::InvalidParameter(alloc::format!(
                "cannot refine resolution {} to coarser {}",
                self.res.level(),
                res.level()
            )));
        }
        let shift = res.level() - self.res.level();
        Ok(Signal::from_fn(res, |i| self.values[i >> shift]))
    }
}

/// One value per dyadic interval at a resolution, in coarse-to-fine order.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalTable<T> {
    res: Resolution,
    slots: Vec<T>,
}

impl<T: Clone> IntervalTable<T> {
    pub fn from_fn(res: Resolution, mut f: impl FnMut(DyadicInterval) -> T) -> Self {
        IntervalTable {
            res,
            slots: res.intervals().map(&mut f).collect(),
        }
    }
}

impl<T> IntervalTable<T> {
    pub fn resolution(&self) -> Resolution {
        self.res
    }

    pub fn get(&self, interval: &DyadicInterval) -> Option<&T> {
        if interval.level > self.res.level() {
            return None;
        }
        self.slots.get(interval.slot())
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicInterval, &T)> {
        self.res.intervals().zip(self.slots.iter())
    }
}

impl<T> core::ops::Index<&DyadicInterval> for IntervalTable<T> {
    type Output = T;

    fn index(&self, interval: &DyadicInterval) -> &T {
        &self.slots[interval.slot()]
    }
}

/// Sums of `values` over every dyadic interval, built bottom-up.
pub fn interval_sums(res: Resolution, values: &[f64]) -> IntervalTable<f64> {
    let total = 2 * res.cells() - 1;
    let mut slots = vec![0.0; total];
    let leaf0 = res.cells() - 1;
    slots[leaf0..].copy_from_slice(values);
    for slot in (0..leaf0).rev() {
        slots[slot] = slots[2 * slot + 1] + slots[2 * slot + 2];
    }
    IntervalTable { res, slots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(n: u32) -> Resolution {
        Resolution::new(n).unwrap()
    }

    #[test]
    fn resolution_bounds() {
        assert!(Resolution::new(0).is_err());
        assert!(Resolution::new(25).is_err());
        assert_eq!(res(3).cells(), 8);
    }

    #[test]
    fn average_of_constant() {
        let f = Signal::constant(res(4), -3.5);
        for interval in res(4).intervals() {
            assert!((f.average(&interval, 2.0).unwrap() - 3.5).abs() < 1e-14);
        }
    }

    #[test]
    fn average_of_half_indicator() {
        let r = res(5);
        let half = DyadicInterval::new(1, 0).unwrap();
        let f = Signal::indicator(r, &half, 1.0).unwrap();
        assert!((f.average(&DyadicInterval::unit(), 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn average_of_lower_bound_spike() {
        // 2^n 1_[0,2^-n) has L^q norm 2^{n - n/q}.
        let r = res(10);
        for n in [1u32, 3, 6] {
            let f = Signal::indicator(r, &DyadicInterval::new(n, 0).unwrap(), (1u64 << n) as f64)
                .unwrap();
            for q in [1.0, 1.25, 2.0, 3.5] {
                let expected = 2f64.powf(n as f64 - n as f64 / q);
                let got = f.average(&DyadicInterval::unit(), q).unwrap();
                assert!((got - expected).abs() <= 1e-12 * expected, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn average_rejects_small_exponent() {
        let f = Signal::zeros(res(2));
        assert_eq!(
            f.average(&DyadicInterval::unit(), 0.5),
            Err(Error::InvalidExponent(0.5))
        );
        assert!(f.average(&DyadicInterval::unit(), f64::INFINITY).is_err());
    }

    #[test]
    fn navigation() {
        let r = res(3);
        let unit = DyadicInterval::unit();
        let (l, rr) = unit.children(r).unwrap();
        assert_eq!(l, DyadicInterval::new(1, 0).unwrap());
        assert_eq!(rr, DyadicInterval::new(1, 1).unwrap());
        let quarter = DyadicInterval::new(2, 1).unwrap();
        assert!(l.contains(&quarter));
        assert!(!l.contains(&rr));
        assert_eq!(quarter.cells(r).unwrap(), 2..4);
        let cell = DyadicInterval::new(3, 7).unwrap();
        assert!(cell.children(r).is_err());
        assert!(DyadicInterval::new(4, 0).unwrap().cells(r).is_err());
        assert_eq!(cell.ancestor(1), Some(rr));
    }

    #[test]
    fn nested_or_disjoint_exhaustive() {
        let r = res(6);
        let all: Vec<_> = r.intervals().collect();
        for a in &all {
            let ca = a.cells(r).unwrap();
            for b in &all {
                let cb = b.cells(r).unwrap();
                let overlap = ca.start < cb.end && cb.start < ca.end;
                let nested = a.contains(b) || b.contains(a);
                assert_eq!(overlap, nested);
                if a.contains(b) {
                    assert!(ca.start <= cb.start && cb.end <= ca.end);
                }
            }
        }
    }

    #[test]
    fn frequency_intervals() {
        assert!(FrequencyInterval::new(3, 3).is_err());
        assert!(FrequencyInterval::new(8, 12).unwrap().is_dyadic());
        assert!(!FrequencyInterval::new(6, 10).unwrap().is_dyadic());
        assert!(!FrequencyInterval::new(4, 7).unwrap().is_dyadic());
    }

    #[test]
    fn interval_sums_match_direct() {
        let r = res(5);
        let values: Vec<f64> = (0..32).map(|i| (i as f64 * 0.7).sin()).collect();
        let table = interval_sums(r, &values);
        for interval in r.intervals() {
            let direct: f64 = values[interval.cells(r).unwrap()].iter().sum();
            assert!((table[&interval] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn refine_preserves_integral() {
        let f = Signal::new(res(2), vec![1.0, -2.0, 0.5, 4.0]).unwrap();
        let g = f.refine(res(6)).unwrap();
        assert!((f.integral() - g.integral()).abs() < 1e-14);
        assert!((f.norm2() - g.norm2()).abs() < 1e-14);
    }
}

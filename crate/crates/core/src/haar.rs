//! Orthonormal Haar system `h_I = (1_{I-} - 1_{I+}) / √|I|`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::dyadic::{DyadicInterval, Resolution, Signal};
use crate::error::{Error, Result};

/// Mean of `f` plus `⟨f, h_I⟩` for every dyadic `I` with `|I| > 2^-N`,
/// stored coarse to fine (`[0,1)` first).
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    res: Resolution,
    mean: f64,
    coeffs: Vec<f64>,
}

impl HaarCoefficients {
    pub fn new(res: Resolution, mean: f64, coeffs: Vec<f64>) -> Result<Self> {
        let expected = res.cells() - 1;
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(HaarCoefficients { res, mean, coeffs })
    }

    pub fn resolution(&self) -> Resolution {
        self.res
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn slot(interval: &DyadicInterval) -> usize {
        (1usize << interval.level()) - 1 + interval.index()
    }

    /// `⟨f, h_I⟩`; `None` for single cells or intervals beyond the resolution.
    pub fn get(&self, interval: &DyadicInterval) -> Option<f64> {
        (interval.level() < self.res.level()).then(|| self.coeffs[Self::slot(interval)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicInterval, f64)> + '_ {
        let top = self.res.level();
        self.res
            .intervals()
            .take_while(move |i| i.level() < top)
            .zip(self.coeffs.iter().copied())
    }

    /// `|f̂(0)|^2 + Σ ⟨f,h_I⟩^2`, equal to `‖f‖_2^2`.
    pub fn energy(&self) -> f64 {
        self.mean * self.mean + self.coeffs.iter().map(|c| c * c).sum::<f64>()
    }
}

/// The Haar function `h_I` sampled on the grid.
pub fn haar_function(res: Resolution, interval: &DyadicInterval) -> Result<Signal> {
    let (left, right) = interval.children(res)?;
    let lc = left.cells(res)?;
    let rc = right.cells(res)?;
    let height = 1.0 / interval.length().sqrt();
    Ok(Signal::from_fn(res, |i| {
        if lc.contains(&i) {
            height
        } else if rc.contains(&i) {
            -height
        } else {
            0.0
        }
    }))
}

pub fn haar_forward(f: &Signal) -> HaarCoefficients {
    let res = f.resolution();
    let n = res.level();
    let width = res.cell_width();
    // Integrals over the intervals of the current level.
    let mut level_integrals: Vec<f64> = f.values().iter().map(|v| v * width).collect();
    let mut coeffs = vec![0.0; res.cells() - 1];
    for level in (0..n).rev() {
        let count = 1usize << level;
        let norm = 1.0 / DyadicInterval::new(level, 0).unwrap().length().sqrt();
        let mut next = Vec::with_capacity(count);
        for k in 0..count {
            let left = level_integrals[2 * k];
            let right = level_integrals[2 * k + 1];
            coeffs[count - 1 + k] = (left - right) * norm;
            next.push(left + right);
        }
        level_integrals = next;
    }
    HaarCoefficients {
        res,
        mean: level_integrals[0],
        coeffs,
    }
}

pub fn haar_inverse(h: &HaarCoefficients) -> Signal {
    let res = h.res;
    let mut averages = vec![h.mean];
    for level in 0..res.level() {
        let count = 1usize << level;
        let inv_sqrt_len = (count as f64).sqrt();
        let mut next = Vec::with_capacity(2 * count);
        for (k, avg) in averages.iter().enumerate() {
            let d = h.coeffs[count - 1 + k] * inv_sqrt_len;
            next.push(avg + d);
            next.push(avg - d);
        }
        averages = next;
    }
    Signal::new(res, averages).expect("one average per cell")
}

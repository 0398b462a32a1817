//! Fast Walsh–Paley transform, modulation and frequency projections.
//!
//! Paley ordering: `w_n` is the product of the Rademacher functions
//! `w_{2^k}(x) = sign(sin(2^{k+1} π x))` selected by the binary digits of
//! `n`. On cell `i` of a resolution-`N` grid the digit `x_{k+1}` of the cell
//! midpoint is bit `N-1-k` of `i`, so
//! `w_n(cell i) = (-1)^{popcount(n & rev_N(i))}`. The fast transform is the
//! natural-order Hadamard butterfly applied to the bit-reversed signal.

use alloc::vec::Vec;

use crate::dyadic::{FrequencyInterval, Resolution, Signal};
use crate::error::{Error, Result};

/// Walsh coefficients `f̂(n) = ⟨f, w_n⟩`, `0 <= n < 2^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    res: Resolution,
    coeffs: Vec<f64>,
}

impl Spectrum {
    pub fn new(res: Resolution, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != res.cells() {
            return Err(Error::LengthMismatch {
                expected: res.cells(),
                found: coeffs.len(),
            });
        }
        Ok(Spectrum { res, coeffs })
    }

    pub fn resolution(&self) -> Resolution {
        self.res
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `Σ f̂(n)^2`, equal to `‖f‖_2^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

#[inline]
fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `w_n` evaluated on cell `cell` of a grid with `2^bits` cells.
#[inline]
pub fn walsh_sign(n: usize, cell: usize, bits: u32) -> f64 {
    if (n & bit_reverse(cell, bits)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The Walsh function `w_n` sampled on the grid.
pub fn walsh_function(res: Resolution, n: usize) -> Result<Signal> {
    if n >= res.cells() {
        return Err(Error::FrequencyOutOfRange {
            frequency: n,
            limit: res.cells(),
        });
    }
    Ok(Signal::from_fn(res, |i| walsh_sign(n, i, res.level())))
}

fn hadamard_butterfly(x: &mut [f64]) {
    let len = x.len();
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for j in block..block + half {
                let a = x[j];
                let b = x[j + half];
                x[j] = a + b;
                x[j + half] = a - b;
            }
        }
        half *= 2;
    }
}

fn bit_reverse_permute(x: &mut [f64]) {
    let bits = x.len().trailing_zeros();
    for i in 0..x.len() {
        let j = bit_reverse(i, bits);
        if i < j {
            x.swap(i, j);
        }
    }
}

/// In-place normalized Paley transform of a power-of-two buffer:
/// `out[n] = len^{-1} Σ_i x[i] w_n(cell i)`.
pub fn paley_forward_in_place(x: &mut [f64]) {
    debug_assert!(x.len().is_power_of_two());
    bit_reverse_permute(x);
    hadamard_butterfly(x);
    let scale = 1.0 / x.len() as f64;
    for v in x.iter_mut() {
        *v *= scale;
    }
}

/// Inverse of [`paley_forward_in_place`]: `out[i] = Σ_n x[n] w_n(cell i)`.
pub fn paley_inverse_in_place(x: &mut [f64]) {
    debug_assert!(x.len().is_power_of_two());
    hadamard_butterfly(x);
    bit_reverse_permute(x);
}

pub fn walsh_forward(f: &Signal) -> Spectrum {
    let mut coeffs = f.values().to_vec();
    paley_forward_in_place(&mut coeffs);
    Spectrum {
        res: f.resolution(),
        coeffs,
    }
}

pub fn walsh_inverse(s: &Spectrum) -> Signal {
    let mut values = s.coeffs.clone();
    paley_inverse_in_place(&mut values);
    Signal::new(s.res, values).expect("length preserved by the butterfly")
}

/// `T_m f = Σ m(n) f̂(n) w_n` for a symbol given pointwise.
pub fn apply_symbol(f: &Signal, symbol: impl Fn(usize) -> f64) -> Signal {
    let mut s = walsh_forward(f);
    for (n, c) in s.coeffs.iter_mut().enumerate() {
        *c *= symbol(n);
    }
    walsh_inverse(&s)
}

/// Pointwise product `w_m · f`; its spectrum is `n ↦ f̂(n XOR m)`.
pub fn modulate(f: &Signal, m: usize) -> Result<Signal> {
    let res = f.resolution();
    if m >= res.cells() {
        return Err(Error::FrequencyOutOfRange {
            frequency: m,
            limit: res.cells(),
        });
    }
    Ok(Signal::from_fn(res, |i| {
        f.values()[i] * walsh_sign(m, i, res.level())
    }))
}

/// Frequency projection `T_ω f`.
pub fn project(f: &Signal, omega: &FrequencyInterval) -> Result<Signal> {
    omega.check_within(f.resolution())?;
    Ok(apply_symbol(
        f,
        |n| if omega.contains(n) { 1.0 } else { 0.0 },
    ))
}

/// Projection onto the frequencies in `omega` computed from an existing
/// spectrum, avoiding a second forward transform.
pub fn project_spectrum(s: &Spectrum, omega: &FrequencyInterval) -> Result<Signal> {
    omega.check_within(s.res)?;
    let mut masked = s.clone();
    for (n, c) in masked.coeffs.iter_mut().enumerate() {
        if !omega.contains(n) {
            *c = 0.0;
        }
    }
    Ok(walsh_inverse(&masked))
}

//! Finite-resolution Walsh–Fourier analysis on the dyadic grid of `[0, 1)`.
//!
//! Everything here works at a fixed [`Resolution`] `N`: signals are
//! piecewise constant on the `2^N` dyadic cells, frequencies are integers
//! in `[0, 2^N)`, and every identity of the dyadic theory (conditional
//! expectations, tile expansions, induced multipliers) holds exactly up to
//! floating-point rounding.
//!
//! The crate is `no_std` with `alloc`. IO, file formats and the command
//! line driver live in the companion `walshlab` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod haar;
pub mod multiplier;
pub mod orlicz;
pub mod sparse;
pub mod square;
pub mod tiles;
pub mod walsh;
pub mod weights;

pub use dyadic::{DyadicInterval, FrequencyInterval, Resolution, Signal};
pub use error::{Error, Result};
pub use haar::HaarCoefficients;
pub use multiplier::{AtomBlock, AtomRq1, MultiplierSymbol};
pub use orlicz::OrliczFunction;
pub use square::{GoodCollection, MartingaleGrid};
pub use tiles::Tile;
pub use walsh::Spectrum;

/// Absolute tolerance used for "exact" identities, scaled by operand norms
/// at the call site.
pub const EXACT_TOL: f64 = 1e-10;

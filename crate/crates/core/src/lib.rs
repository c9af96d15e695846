//! Bandlimited steerable wavelet frames built from Riesz transforms of
//! Simoncelli-type radial profiles, with Meyer-windowed variants that decay
//! faster in space, plus the numerical diagnostics used to check tightness,
//! reconstruction, energy, vanishing moments and spatial decay.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod frame;
pub mod grid;
pub mod io;
pub mod profiles;
pub mod riesz;
pub mod spectral;
pub mod synth;
pub mod window;

pub use error::{Error, Result};
pub use grid::{GridSpec, ScalarField, SpectrumField};

//! Pseudospectral laboratory for the generalized derivative nonlinear
//! Schrödinger equation with elliptic and non-elliptic Laplacians.
//!
//! The crate provides periodic-box spectral fields, the exact free group
//! and Duhamel operator, Littlewood-Paley and frequency-uniform
//! decompositions, the function-space norms built on them, a Picard
//! contraction solver with a split-step cross-check, and an ensemble
//! harness that probes the linear and nonlinear space-time estimates the
//! solver relies on.

pub mod cli;
pub mod error;
mod fft;
pub mod decomp;
pub mod field;
pub mod nonlin;
pub mod norms;
pub mod prober;
pub mod propagator;
pub mod snapshot;
pub mod solver;

pub use error::{Error, Result};
pub use field::{
    gaussian_packet, random_band_limited, FrequencyGrid, Representation, SignSignature,
    SpectralField,
};
pub use propagator::{
    decay_probe, duhamel, duhamel_trace, log_log_slope, symbol_value, DecaySample, Propagator,
    TimeGrid,
};

//! Causal attenuated wave propagation.
//!
//! Dispersion laws, Kramers-Kronig consistency, half-plane causality
//! certification, Green function synthesis, convolution kernels and
//! point-source superposition.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod cli;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod fft;
pub mod grid;
pub mod kernels;
pub mod kk;
mod quad;
pub mod signal;
pub mod solve;
pub mod synth;

pub use dispersion::{ModelKind, ModelSpec};
pub use error::{Error, Result};
pub use grid::FrequencyGrid;
pub use signal::TimeSignal;

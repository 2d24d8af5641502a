//! Micro-Doppler time–frequency processing for FMCW radar.
//!
//! The pipeline runs raw cube → range profiles ([`preprocess`]) → STFT
//! spectrogram ([`linspec`]) → resolution-adaptive spectrogram ([`ra`]), with
//! a peak tracker ([`tracker`]) for either spectrogram and a point-scatterer
//! simulator ([`simulator`]) that supplies ground truth.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod iir;
pub mod io;
pub mod kv;
pub mod linspec;
pub mod manifest;
pub mod par;
pub mod preprocess;
pub mod ra;
pub mod simulator;
pub mod tracker;

pub use config::{PipelineConfig, RadarCube, RadarParams, WindowKind};
pub use error::{Error, Result};
pub use linspec::Spectrogram;
pub use ra::RaSpectrogram;

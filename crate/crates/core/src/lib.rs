//! Multifractal detrended fluctuation analysis (MFDFA) for audio and synthetic
//! time series.
//!
//! The crate is split along the processing chain:
//!
//! - [`signal_io`]: RIFF/WAVE ingestion, label manifests and fixed-length segmentation.
//! - [`synthgen`]: seeded generators with known scaling (white noise, fGn,
//!   binomial cascade) and shuffle surrogates.
//! - [`mfdfa`]: profile, detrended window fluctuations, q-order fluctuation
//!   function, generalized Hurst exponents, singularity spectrum and width.
//! - [`emotion`]: per-clip width aggregates, per-instrument valence thresholds,
//!   classification and artist style deviation.
//! - [`cli`]: the `mfspec` command implementations (analyze, synth, classify, report).

pub mod cli;
pub mod emotion;
pub mod mfdfa;
pub mod signal_io;
pub mod synthgen;

pub use mfdfa::{analyze, Analysis, AnalysisConfig};
pub use signal_io::{ClipMetadata, Instrument, TimeSeries, Valence};

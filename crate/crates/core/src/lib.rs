//! Benchmark harness for automated utility-meter reading.
//!
//! The pipeline mirrors how meter-reading detectors are evaluated: base
//! images are perturbed along controlled axes ([`imaging`]), turned into
//! evaluation datasets ([`dataset`]), fed to pluggable digit detectors
//! ([`detector`]), post-processed into readings ([`postprocess`]) and scored
//! for exact-match accuracy and inference time ([`evaluation`]).
//!
//! Per-image work is data-parallel. With the default `parallel` feature the
//! [`exec::Executor`] fans batches out over a rayon pool; without it every
//! batch runs sequentially with identical results.

pub mod dataset;
pub mod detector;
pub mod evaluation;
pub mod exec;
pub mod imaging;
pub mod postprocess;
pub mod rng;

pub use detector::{BoundingBox, Detection, Detector, Label};
pub use imaging::{DatasetTag, ImageBuffer};
pub use postprocess::{FilterParams, MeterConfig, Reading};

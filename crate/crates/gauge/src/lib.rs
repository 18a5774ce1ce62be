//! File formats, reports and orchestration around `sim2real-gauge-core`.
//!
//! * [`npy`]: NPY v1.0 float matrices
//! * [`manifest`]: dataset manifests and per-encoder loading
//! * [`catalog`]: encoder catalog override files
//! * [`report`], [`svg`]: JSON, CSV and scatter-plot output
//! * [`suite`]: the synthetic 23-encoder suite on disk
//! * [`run`]: parallel evaluation of a whole manifest

pub mod catalog;
pub mod manifest;
pub mod npy;
pub mod report;
pub mod run;
pub mod suite;
pub mod svg;

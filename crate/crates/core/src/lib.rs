//! Numerical core for offline Sim2Real encoder evaluation.
//!
//! Scores a frozen vision encoder from its embeddings alone:
//!
//! * the **Domain Invariance Score** ([`dis`]) measures how close the simulated
//!   and real embedding centroids sit after L2 row normalization,
//!   standardization, PCA to a shared dimension and min–max scaling
//!   ([`preprocess`]);
//! * the **Action Score** ([`probe`]) measures how well a linear probe trained
//!   by minibatch SGD recovers robot actions from the embeddings.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. File formats,
//! reports and the command-line front end live in the `sim2real-gauge` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod dataset;
pub mod dis;
pub mod eval;
pub mod linalg;
pub mod preprocess;
pub mod probe;
pub mod registry;
pub mod synth;

pub use crate::dataset::{Domain, DomainLabels, EncoderDataset};
pub use crate::dis::{centroid, domain_invariance_score, DisResult};
pub use crate::error::{Error, Result};
pub use crate::eval::{evaluate, evaluate_as, evaluate_dis, EncoderEvaluation, EvalConfig};
pub use crate::linalg::{column_stats, matmul, sym_eigen_descending, ColumnStats, EigenDecomposition, Matrix};
pub use crate::preprocess::{fit_standardize_pca, l2_normalize_rows, minmax_normalize, PcaConfig, PcaModel};
pub use crate::probe::{
    action_score, probe_gradient, probe_predict, split_dataset, standardize_actions, train_probe, AsResult,
    DomainFilter, LinearProbe, ProbeConfig, ProbeFit, Split,
};
pub use crate::registry::{Architecture, Catalog, DimCheck, EncoderMeta, Pretraining, TrainingType};

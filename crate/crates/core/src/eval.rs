//! Per-encoder scoring pipeline.
//!
//! DIS: L2 rows → standardize → PCA(d*) → min–max → centroid gap.
//! AS: split → z-score embeddings and actions on train stats → SGD probe →
//! validation MSE.
//!
//! The probe sees per-feature standardized embeddings without the L2 row
//! normalization of the DIS chain; row normalization is not affine and would
//! make exactly linear action maps unrecoverable by a linear probe.

use serde::{Deserialize, Serialize};

use crate::dataset::EncoderDataset;
use crate::dis::{domain_invariance_score, DisResult};
use crate::error::Result;
use crate::preprocess::{condition, PcaConfig};
use crate::probe::{action_score, split_dataset, standardize_actions, standardize_columns, train_probe, AsResult, ProbeConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub pca: PcaConfig,
    pub probe: ProbeConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderEvaluation {
    pub dis: DisResult,
    pub as_result: AsResult,
    /// PCA settings after clamping d* to the data.
    pub effective_pca: PcaConfig,
    /// Probe settings actually used (seed included).
    pub probe: ProbeConfig,
}

/// Domain Invariance Score of one dataset; returns the score and the
/// effective PCA config.
pub fn evaluate_dis(ds: &EncoderDataset, cfg: &PcaConfig) -> Result<(DisResult, PcaConfig)> {
    let conditioned = condition(ds.embeddings(), cfg)?;
    let dis = domain_invariance_score(&conditioned.embeddings, ds.domains(), conditioned.effective.target_dim)?;
    Ok((dis, conditioned.effective))
}

/// Action Score of one dataset using `cfg` as given (no per-encoder seed
/// mixing; see [`ProbeConfig::for_encoder`]).
pub fn evaluate_as(ds: &EncoderDataset, cfg: &ProbeConfig) -> Result<AsResult> {
    let split = split_dataset(ds.len(), cfg, ds.domains())?;
    let (z, _) = standardize_columns(ds.embeddings(), &split.train_indices)?;
    let (a, action_stats) = standardize_actions(ds.actions(), &split.train_indices)?;
    let fit = train_probe(&z, &a, &split, cfg)?;
    let mut result = action_score(&fit.probe, &z, &a, &split.val_indices)?;
    result.n_train = split.train_indices.len();
    result.train_mse_curve = fit.train_mse_curve;
    result.action_norm_stats = Some(action_stats);
    Ok(result)
}

/// Both scores. The probe seed is mixed with the encoder id.
pub fn evaluate(ds: &EncoderDataset, cfg: &EvalConfig) -> Result<EncoderEvaluation> {
    let (dis, effective_pca) = evaluate_dis(ds, &cfg.pca)?;
    let probe = cfg.probe.for_encoder(ds.encoder_id());
    let as_result = evaluate_as(ds, &probe)?;
    Ok(EncoderEvaluation {
        dis,
        as_result,
        effective_pca,
        probe,
    })
}

//! Embedding conditioning for the domain-invariance score: L2 row
//! normalization, per-feature standardization, PCA projection to a shared
//! dimension and per-feature min–max scaling.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_stats, gram, matmul, sym_eigen_descending, Matrix};

pub const DEFAULT_TARGET_DIM: usize = 50;
pub const DEFAULT_EPSILON: f64 = 1e-12;
/// Features whose standard deviation falls below this are zeroed instead of
/// divided.
pub const ZERO_VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaConfig {
    /// Shared projection dimension d*.
    pub target_dim: usize,
    /// Floor for the min–max denominator.
    pub epsilon: f64,
}

impl Default for PcaConfig {
    fn default() -> Self {
        Self {
            target_dim: DEFAULT_TARGET_DIM,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl PcaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_dim == 0 {
            return Err(Error::InvalidConfig("PCA target dimension must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "min-max epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Lowers `target_dim` to `min(rows, cols)` when the data cannot support
    /// the requested dimension.
    pub fn clamped_to(&self, rows: usize, cols: usize) -> Self {
        Self {
            target_dim: self.target_dim.min(rows.min(cols)).max(1),
            epsilon: self.epsilon,
        }
    }
}

/// Fitted standardization + projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// d × d* matrix whose columns are the leading principal axes.
    pub components: Matrix,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn target_dim(&self) -> usize {
        self.components.cols()
    }

    /// Z-scores `e` with the fitted statistics; zero-variance features map to 0.
    pub fn standardize(&self, e: &Matrix) -> Result<Matrix> {
        if e.cols() != self.input_dim() {
            return Err(Error::ShapeMismatch {
                op: "standardize",
                left_rows: e.rows(),
                left_cols: e.cols(),
                right_rows: 1,
                right_cols: self.input_dim(),
            });
        }
        let mut out = e.clone();
        for r in 0..out.rows() {
            for (j, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = if self.std[j] < ZERO_VARIANCE_FLOOR {
                    0.0
                } else {
                    (*v - self.mean[j]) / self.std[j]
                };
            }
        }
        Ok(out)
    }

    /// Standardizes and projects rows onto the principal axes.
    pub fn transform(&self, e: &Matrix) -> Result<Matrix> {
        matmul(&self.standardize(e)?, &self.components)
    }
}

/// Scales every row to unit L2 norm. All-zero rows stay zero.
pub fn l2_normalize_rows(e: &Matrix) -> Matrix {
    let mut out = e.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let norm = libm::sqrt(row.iter().map(|v| v * v).sum());
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    out
}

/// Standardizes every feature, then projects onto the top `target_dim`
/// eigenvectors of the covariance of the standardized data.
///
/// `e` is the concatenation of sim and real rows. Returns the fitted model
/// and the n × d* projection.
pub fn fit_standardize_pca(e: &Matrix, cfg: &PcaConfig) -> Result<(PcaModel, Matrix)> {
    cfg.validate()?;
    if e.rows() < 2 {
        return Err(Error::TooFewRows {
            op: "fit_standardize_pca",
            needed: 2,
            got: e.rows(),
        });
    }
    let max = e.rows().min(e.cols());
    if cfg.target_dim > max {
        return Err(Error::TargetDimTooLarge {
            target: cfg.target_dim,
            max,
        });
    }

    let stats = column_stats(e)?;
    let mut model = PcaModel {
        mean: stats.mean,
        std: stats.std,
        components: Matrix::zeros(0, 0),
        explained_variance: Vec::new(),
    };
    let standardized = model.standardize(e)?;

    let n = e.rows() as f64;
    let mut cov = gram(&standardized);
    for r in 0..cov.rows() {
        cov.row_mut(r).iter_mut().for_each(|v| *v /= n);
    }
    let eig = sym_eigen_descending(&cov)?;

    model.components = eig.vectors.leading_columns(cfg.target_dim);
    model.explained_variance = eig.values[..cfg.target_dim].iter().map(|&v| v.max(0.0)).collect();
    let projected = matmul(&standardized, &model.components)?;
    Ok((model, projected))
}

/// Rescales each column to `[0, 1]` using its min and max over all rows;
/// ranges narrower than `epsilon` use `epsilon` as the denominator.
pub fn minmax_normalize(e: &Matrix, epsilon: f64) -> Matrix {
    let mut out = e.clone();
    if e.rows() == 0 {
        return out;
    }
    for j in 0..e.cols() {
        let (lo, hi) = (0..e.rows()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            let v = e.get(r, j);
            (lo.min(v), hi.max(v))
        });
        let denom = (hi - lo).max(epsilon);
        for r in 0..e.rows() {
            out.set(r, j, (e.get(r, j) - lo) / denom);
        }
    }
    out
}

/// Output of the full conditioning chain.
#[derive(Debug, Clone)]
pub struct Conditioned {
    pub model: PcaModel,
    /// n × d* matrix with entries in [0, 1].
    pub embeddings: Matrix,
    /// Config actually used after clamping d* to the data.
    pub effective: PcaConfig,
}

/// L2 → standardize → PCA → min–max, with d* clamped to `min(n, d)`.
pub fn condition(e: &Matrix, cfg: &PcaConfig) -> Result<Conditioned> {
    cfg.validate()?;
    let effective = cfg.clamped_to(e.rows(), e.cols());
    let normalized = l2_normalize_rows(e);
    let (model, projected) = fit_standardize_pca(&normalized, &effective)?;
    Ok(Conditioned {
        model,
        embeddings: minmax_normalize(&projected, effective.epsilon),
        effective,
    })
}

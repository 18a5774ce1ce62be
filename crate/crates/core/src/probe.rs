//! Linear probing for the Action Score.
//!
//! A probe `g(z) = Wz + b` is trained by plain minibatch SGD on the
//! batch-mean squared error, starting from zero. The Action Score is
//! `max(0, 1 − MSE_val)` where `MSE_val` averages over validation rows and
//! action dimensions. Actions are z-scored with train-split statistics first,
//! so an uninformative probe lands near AS = 0 and a perfect one at AS = 1.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Domain, DomainLabels};
use crate::error::{Error, Result};
use crate::linalg::{column_stats, ColumnStats, Matrix};
use crate::preprocess::ZERO_VARIANCE_FLOOR;

pub const DEFAULT_EPOCHS: usize = 100;
pub const DEFAULT_BATCH_SIZE: usize = 256;
pub const DEFAULT_LEARNING_RATE: f64 = 1e-2;
pub const DEFAULT_SPLIT_RATIO: f64 = 0.8;
pub const DEFAULT_SEED: u64 = 42;

/// ChaCha stream used for epoch shuffles; the split uses stream 0.
const TRAIN_STREAM: u64 = 1;

/// Which rows the probe is trained and validated on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainFilter {
    #[default]
    All,
    SimOnly,
    RealOnly,
}

impl DomainFilter {
    pub fn admits(self, domain: Domain) -> bool {
        match self {
            Self::All => true,
            Self::SimOnly => domain == Domain::Sim,
            Self::RealOnly => domain == Domain::Real,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::All => "all",
            Self::SimOnly => "sim-only",
            Self::RealOnly => "real-only",
        }
    }
}

impl core::str::FromStr for DomainFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "sim-only" => Ok(Self::SimOnly),
            "real-only" => Ok(Self::RealOnly),
            other => Err(Error::InvalidConfig(format!(
                "unknown domain filter {other:?} (expected all, sim-only or real-only)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Fraction of filtered rows used for training.
    pub split_ratio: f64,
    pub seed: u64,
    pub domain_filter: DomainFilter,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            epochs: DEFAULT_EPOCHS,
            batch_size: DEFAULT_BATCH_SIZE,
            learning_rate: DEFAULT_LEARNING_RATE,
            split_ratio: DEFAULT_SPLIT_RATIO,
            seed: DEFAULT_SEED,
            domain_filter: DomainFilter::All,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        Ok(())
    }

    /// Same config with the seed mixed with a stable hash of `encoder_id`,
    /// so each encoder gets an independent but reproducible stream.
    pub fn for_encoder(&self, encoder_id: &str) -> Self {
        Self {
            seed: self.seed ^ fnv1a64(encoder_id.as_bytes()),
            ..*self
        }
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Affine map `z ↦ Wz + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProbe {
    /// d_a × d_z
    pub weights: Matrix,
    /// length d_a
    pub bias: Vec<f64>,
}

impl LinearProbe {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if weights.rows() != bias.len() {
            return Err(Error::ShapeMismatch {
                op: "LinearProbe::new",
                left_rows: weights.rows(),
                left_cols: weights.cols(),
                right_rows: bias.len(),
                right_cols: 1,
            });
        }
        if let Some(i) = bias.iter().position(|b| !b.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self { weights, bias })
    }

    pub fn zeros(input_dim: usize, output_dim: usize) -> Self {
        Self {
            weights: Matrix::zeros(output_dim, input_dim),
            bias: vec![0.0; output_dim],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    fn predict_into(&self, z: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.bias[k] + self.weights.row(k).iter().zip(z).map(|(w, x)| w * x).sum::<f64>();
        }
    }
}

/// `Wz + b` for a single embedding.
pub fn probe_predict(p: &LinearProbe, z: &[f64]) -> Result<Vec<f64>> {
    if z.len() != p.input_dim() {
        return Err(Error::ShapeMismatch {
            op: "probe_predict",
            left_rows: p.output_dim(),
            left_cols: p.input_dim(),
            right_rows: z.len(),
            right_cols: 1,
        });
    }
    let mut out = vec![0.0; p.output_dim()];
    p.predict_into(z, &mut out);
    Ok(out)
}

/// Train/validation row indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
}

/// Seeded shuffle of the rows admitted by `cfg.domain_filter`; the first
/// `⌈ratio·m⌉` go to training (capped so validation keeps at least one row).
pub fn split_dataset(n: usize, cfg: &ProbeConfig, domains: &DomainLabels) -> Result<Split> {
    cfg.validate()?;
    if domains.len() != n {
        return Err(Error::RowCountMismatch {
            embeddings: n,
            domains: domains.len(),
            actions: n,
        });
    }
    let mut rows: Vec<usize> = domains
        .as_slice()
        .iter()
        .enumerate()
        .filter_map(|(i, &d)| cfg.domain_filter.admits(d).then_some(i))
        .collect();
    if rows.len() < 2 {
        return Err(Error::TooFewRows {
            op: "split_dataset",
            needed: 2,
            got: rows.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rows.shuffle(&mut rng);

    let m = rows.len();
    // The small offset keeps products like 0.7·10 = 7.000000000000001 from rounding up.
    let wanted = libm::ceil(cfg.split_ratio * m as f64 - 1e-9) as usize;
    let n_train = wanted.clamp(1, m - 1);
    let val_indices = rows.split_off(n_train);
    Ok(Split {
        train_indices: rows,
        val_indices,
    })
}

/// Z-scores every column of `x` using the mean and population std of the
/// `train` rows. Columns with std below 1e-12 become all zeros.
pub fn standardize_columns(x: &Matrix, train: &[usize]) -> Result<(Matrix, ColumnStats)> {
    if train.is_empty() {
        return Err(Error::Empty("standardize: train rows"));
    }
    let stats = column_stats(&x.select_rows(train)?)?;
    let mut out = x.clone();
    for r in 0..out.rows() {
        for (j, v) in out.row_mut(r).iter_mut().enumerate() {
            *v = if stats.std[j] < ZERO_VARIANCE_FLOOR {
                0.0
            } else {
                (*v - stats.mean[j]) / stats.std[j]
            };
        }
    }
    Ok((out, stats))
}

/// Action standardization with train-split statistics.
pub fn standardize_actions(a: &Matrix, train: &[usize]) -> Result<(Matrix, ColumnStats)> {
    standardize_columns(a, train)
}

/// Trained probe plus the train-set MSE after every epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFit {
    pub probe: LinearProbe,
    pub train_mse_curve: Vec<f64>,
}

impl ProbeFit {
    pub fn final_train_mse(&self) -> f64 {
        self.train_mse_curve.last().copied().unwrap_or(f64::NAN)
    }
}

fn check_pair(op: &'static str, z: &Matrix, a: &Matrix) -> Result<()> {
    if z.rows() != a.rows() {
        return Err(Error::ShapeMismatch {
            op,
            left_rows: z.rows(),
            left_cols: z.cols(),
            right_rows: a.rows(),
            right_cols: a.cols(),
        });
    }
    Ok(())
}

fn check_indices(indices: &[usize], rows: usize) -> Result<()> {
    match indices.iter().find(|&&i| i >= rows) {
        Some(&index) => Err(Error::IndexOutOfRange { index, rows }),
        None => Ok(()),
    }
}

/// Adds `(2/B)·Σ (pred − a)·zᵀ` and `(2/B)·Σ (pred − a)` over `rows` into the
/// gradient buffers.
fn accumulate_gradient(
    p: &LinearProbe,
    z: &Matrix,
    a: &Matrix,
    rows: &[usize],
    grad_w: &mut [f64],
    grad_b: &mut [f64],
    residual: &mut [f64],
) {
    let scale = 2.0 / rows.len() as f64;
    let d_z = z.cols();
    grad_w.iter_mut().for_each(|g| *g = 0.0);
    grad_b.iter_mut().for_each(|g| *g = 0.0);
    for &i in rows {
        let zi = z.row(i);
        p.predict_into(zi, residual);
        for (k, r) in residual.iter_mut().enumerate() {
            *r = scale * (*r - a.get(i, k));
            grad_b[k] += *r;
            let gw = &mut grad_w[k * d_z..(k + 1) * d_z];
            for (g, x) in gw.iter_mut().zip(zi) {
                *g += *r * x;
            }
        }
    }
}

/// Analytic gradient of the batch-mean squared error
/// `(1/B)·Σ ‖a_i − W z_i − b‖²` with respect to `W` and `b`.
pub fn probe_gradient(p: &LinearProbe, z: &Matrix, a: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    check_pair("probe_gradient", z, a)?;
    if z.rows() == 0 {
        return Err(Error::Empty("probe_gradient batch"));
    }
    if z.cols() != p.input_dim() || a.cols() != p.output_dim() {
        return Err(Error::ShapeMismatch {
            op: "probe_gradient",
            left_rows: p.output_dim(),
            left_cols: p.input_dim(),
            right_rows: a.cols(),
            right_cols: z.cols(),
        });
    }
    let rows: Vec<usize> = (0..z.rows()).collect();
    let mut grad_w = vec![0.0; p.output_dim() * p.input_dim()];
    let mut grad_b = vec![0.0; p.output_dim()];
    let mut residual = vec![0.0; p.output_dim()];
    accumulate_gradient(p, z, a, &rows, &mut grad_w, &mut grad_b, &mut residual);
    Ok((Matrix::from_raw(p.output_dim(), p.input_dim(), grad_w), grad_b))
}

/// `(1/B)·Σ ‖a_i − g(z_i)‖²` over all rows: the quantity SGD descends.
pub fn batch_loss(p: &LinearProbe, z: &Matrix, a: &Matrix) -> Result<f64> {
    check_pair("batch_loss", z, a)?;
    let rows: Vec<usize> = (0..z.rows()).collect();
    Ok(squared_error(p, z, a, &rows) / z.rows().max(1) as f64)
}

fn squared_error(p: &LinearProbe, z: &Matrix, a: &Matrix, rows: &[usize]) -> f64 {
    let mut pred = vec![0.0; p.output_dim()];
    let mut total = 0.0;
    for &i in rows {
        p.predict_into(z.row(i), &mut pred);
        total += pred.iter().zip(a.row(i)).map(|(g, t)| (t - g) * (t - g)).sum::<f64>();
    }
    total
}

/// Minibatch SGD from a zero probe. Each epoch visits the train rows in a
/// fresh seeded order; the last batch of an epoch may be smaller than B.
pub fn train_probe(z: &Matrix, a: &Matrix, split: &Split, cfg: &ProbeConfig) -> Result<ProbeFit> {
    cfg.validate()?;
    check_pair("train_probe", z, a)?;
    check_indices(&split.train_indices, z.rows())?;
    if split.train_indices.is_empty() {
        return Err(Error::Empty("train_probe: train split"));
    }
    let (d_z, d_a) = (z.cols(), a.cols());
    let mut probe = LinearProbe::zeros(d_z, d_a);
    let mut grad_w = vec![0.0; d_a * d_z];
    let mut grad_b = vec![0.0; d_a];
    let mut residual = vec![0.0; d_a];

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(TRAIN_STREAM);
    let mut order = split.train_indices.clone();
    let denom = (order.len() * d_a) as f64;
    let mut curve = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            accumulate_gradient(&probe, z, a, batch, &mut grad_w, &mut grad_b, &mut residual);
            for (k, b) in probe.bias.iter_mut().enumerate() {
                *b -= cfg.learning_rate * grad_b[k];
                for j in 0..d_z {
                    let w = probe.weights.get(k, j) - cfg.learning_rate * grad_w[k * d_z + j];
                    probe.weights.set(k, j, w);
                }
            }
        }
        let mse = squared_error(&probe, z, a, &order) / denom;
        if !mse.is_finite() {
            return Err(Error::ProbeDiverged {
                epoch: epoch + 1,
                learning_rate: cfg.learning_rate,
            });
        }
        curve.push(mse);
    }
    Ok(ProbeFit {
        probe,
        train_mse_curve: curve,
    })
}

/// Action Score of a trained probe on the validation rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsResult {
    pub action_score: f64,
    /// Mean squared error over `n_val · d_a` entries.
    pub val_mse: f64,
    pub n_train: usize,
    pub n_val: usize,
    pub train_mse_curve: Vec<f64>,
    /// Train-split statistics used to z-score the actions, when known.
    pub action_norm_stats: Option<ColumnStats>,
}

/// Validation MSE and `AS = max(0, 1 − MSE_val)`.
///
/// `a` must be standardized with the same statistics used for training.
/// The returned result carries no training curve; callers that trained the
/// probe attach it.
pub fn action_score(p: &LinearProbe, z: &Matrix, a: &Matrix, val: &[usize]) -> Result<AsResult> {
    if val.is_empty() {
        return Err(Error::EmptyValidation);
    }
    check_pair("action_score", z, a)?;
    check_indices(val, z.rows())?;
    if z.cols() != p.input_dim() || a.cols() != p.output_dim() {
        return Err(Error::ShapeMismatch {
            op: "action_score",
            left_rows: p.output_dim(),
            left_cols: p.input_dim(),
            right_rows: a.cols(),
            right_cols: z.cols(),
        });
    }
    let val_mse = squared_error(p, z, a, val) / (val.len() * a.cols()) as f64;
    Ok(AsResult {
        action_score: (1.0 - val_mse).max(0.0),
        val_mse,
        n_train: 0,
        n_val: val.len(),
        train_mse_curve: Vec::new(),
        action_norm_stats: None,
    })
}

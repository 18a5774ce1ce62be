//! Seeded synthetic encoder datasets with a controlled domain gap and
//! controlled action recoverability.
//!
//! Sim embeddings are standard Gaussian; real embeddings get an extra offset
//! `δ·u` along a fixed unit direction. Actions are a fixed linear map of the
//! signal coordinates plus Gaussian noise. Under this model the centroid gap
//! grows with `δ` and the best linear probe explains a known share of the
//! action variance, which gives the metrics independent ground truth.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Domain, DomainLabels, EncoderDataset};
use crate::error::{Error, Result};
use crate::linalg::{matmul, Matrix};
use crate::probe::fnv1a64;
use crate::registry::{Architecture, EncoderMeta, Pretraining, TrainingType};

/// Seed of the action map `M`, shared by every dataset so that `M` depends
/// only on its shape.
const MIXING_SEED: u64 = 0x6d69_7869_6e67;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_per_domain: usize,
    pub dim: usize,
    pub action_dim: usize,
    /// Offset δ applied to real-domain embeddings along the unit direction.
    pub domain_shift: f64,
    /// Fraction of embedding dimensions that drive the actions.
    pub signal_fraction: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_per_domain == 0 || self.dim == 0 || self.action_dim == 0 {
            return bad("n_per_domain, dim and action_dim must be at least 1".into());
        }
        if !(self.domain_shift >= 0.0 && self.domain_shift.is_finite()) {
            return bad(format!("domain shift must be a finite value >= 0, got {}", self.domain_shift));
        }
        if !(0.0..=1.0).contains(&self.signal_fraction) {
            return bad(format!("signal fraction must lie in [0, 1], got {}", self.signal_fraction));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be a finite value >= 0, got {}", self.noise_sigma));
        }
        Ok(())
    }

    /// Number of leading embedding columns that carry signal.
    pub fn signal_dims(&self) -> usize {
        libm::round(self.signal_fraction * self.dim as f64) as usize
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// The fixed `action_dim × inputs` map with standard Gaussian entries.
pub fn action_map(action_dim: usize, inputs: usize) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(MIXING_SEED ^ ((action_dim as u64) << 32) ^ inputs as u64);
    gaussian(&mut rng, action_dim, inputs)
}

/// `n_per_domain` sim rows followed by `n_per_domain` real rows.
fn split_labels(n_per_domain: usize) -> DomainLabels {
    let mut flags = alloc::vec![Domain::Sim; n_per_domain];
    flags.resize(2 * n_per_domain, Domain::Real);
    DomainLabels(flags)
}

/// Adds `shift` to columns `cols` of every real row.
fn shift_real_rows(e: &mut Matrix, labels: &DomainLabels, cols: core::ops::Range<usize>, shift: f64) {
    if shift == 0.0 || cols.is_empty() {
        return;
    }
    let per_coord = shift / libm::sqrt(cols.len() as f64);
    for r in labels.indices_of(Domain::Real) {
        for v in &mut e.row_mut(r)[cols.clone()] {
            *v += per_coord;
        }
    }
}

/// Draws one dataset.
///
/// Rows are ordered sim first, then real. The shift direction is
/// `u = (1, …, 1)/√dim`. Actions are `M·z[..k] + σ·ε` computed from the
/// final (shifted) embeddings, where `k` = [`SynthSpec::signal_dims`]; with
/// `k = 0` and `σ = 0` the actions are identically zero.
pub fn generate(spec: &SynthSpec, encoder_id: &str) -> Result<EncoderDataset> {
    spec.validate()?;
    let n = 2 * spec.n_per_domain;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels = split_labels(spec.n_per_domain);

    let mut z = gaussian(&mut rng, n, spec.dim);
    shift_real_rows(&mut z, &labels, 0..spec.dim, spec.domain_shift);

    let k = spec.signal_dims();
    let mut actions = if k == 0 {
        Matrix::zeros(n, spec.action_dim)
    } else {
        matmul(&z.leading_columns(k), &action_map(spec.action_dim, k).transpose())?
    };
    if spec.noise_sigma > 0.0 {
        let noise = gaussian(&mut rng, n, spec.action_dim);
        for (a, e) in actions.as_mut_slice().iter_mut().zip(noise.as_slice()) {
            *a += spec.noise_sigma * e;
        }
    }
    EncoderDataset::new(encoder_id, z, labels, actions)
}

// ---------------------------------------------------------------------------
// 23-encoder suite

pub const SUITE_N_PER_DOMAIN: usize = 500;
/// Width of every suite embedding.
pub const SUITE_DIM: usize = 64;
/// Width of the shared scene latent that determines the actions. The
/// remaining `SUITE_DIM − SUITE_LATENT_DIM` columns are always nuisance.
pub const SUITE_LATENT_DIM: usize = 48;
pub const SUITE_ACTION_DIM: usize = 4;
pub const SUITE_SHIFTS: [f64; 6] = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0];
pub const SUITE_VISIBILITY: [f64; 4] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

/// One synthetic encoder of the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteMember {
    pub meta: EncoderMeta,
    pub domain_shift: f64,
    /// Fraction of the scene latent copied into the embedding.
    pub signal_fraction: f64,
}

impl SuiteMember {
    pub fn encoder_id(&self) -> &str {
        &self.meta.encoder_id
    }

    pub fn visible_latent_dims(&self) -> usize {
        libm::round(self.signal_fraction * SUITE_LATENT_DIM as f64) as usize
    }
}

/// The 23 suite encoders: every (visibility, shift) pair on the grid except
/// the fully blind, most shifted one.
pub fn suite_members() -> Vec<SuiteMember> {
    let mut out = Vec::with_capacity(23);
    for (vi, &vis) in SUITE_VISIBILITY.iter().enumerate() {
        for (si, &shift) in SUITE_SHIFTS.iter().enumerate() {
            if vi == 0 && si == SUITE_SHIFTS.len() - 1 {
                continue;
            }
            let number = out.len() as u32 + 1;
            let meta = EncoderMeta {
                encoder_id: format!("synth-{number:02}"),
                display_name: format!("Synthetic shift {shift} visibility {vis:.2}"),
                architecture: if si < 3 { Architecture::Cnn } else { Architecture::Transformer },
                embedding_dim: SUITE_DIM,
                parameters_millions: 5.0 + 25.0 * ((number * 7) % 23) as f64,
                training_type: if number.is_multiple_of(2) {
                    TrainingType::SelfSupervised
                } else {
                    TrainingType::Supervised
                },
                pretraining: if vi >= 2 { Pretraining::Manipulation } else { Pretraining::General },
                table_number: Some(number),
                pretraining_data: None,
                note: Some("synthetic".into()),
            };
            out.push(SuiteMember {
                meta,
                domain_shift: shift,
                signal_fraction: vis,
            });
        }
    }
    out
}

/// Shared labels and actions plus one embedding matrix per suite member.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSuite {
    pub domains: DomainLabels,
    pub actions: Matrix,
    pub members: Vec<(SuiteMember, Matrix)>,
}

impl SyntheticSuite {
    pub fn dataset(&self, index: usize) -> Result<EncoderDataset> {
        let (member, e) = &self.members[index];
        EncoderDataset::new(member.encoder_id(), e.clone(), self.domains.clone(), self.actions.clone())
    }
}

/// Draws the suite. All members share one scene latent `S`; actions are
/// `M·S`. Member embeddings are `[S[.., ..k] | nuisance]`, and real rows are
/// offset by `δ/√16` in each of the last 16 columns, which never carry signal.
pub fn generate_suite(seed: u64) -> Result<SyntheticSuite> {
    let n = 2 * SUITE_N_PER_DOMAIN;
    let domains = split_labels(SUITE_N_PER_DOMAIN);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let latent = gaussian(&mut rng, n, SUITE_LATENT_DIM);
    let actions = matmul(&latent, &action_map(SUITE_ACTION_DIM, SUITE_LATENT_DIM).transpose())?;

    let members = suite_members()
        .into_iter()
        .map(|member| {
            let k = member.visible_latent_dims();
            // Members with the same visibility share nuisance draws, so along
            // a shift-graded row only δ changes.
            let mut noise_rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(format!("nuisance-{k}").as_bytes()));
            let nuisance = gaussian(&mut noise_rng, n, SUITE_DIM - k);
            let mut e = Matrix::from_fn(n, SUITE_DIM, |r, c| if c < k { latent.get(r, c) } else { nuisance.get(r, c - k) });
            shift_real_rows(&mut e, &domains, SUITE_LATENT_DIM..SUITE_DIM, member.domain_shift);
            (member, e)
        })
        .collect();
    Ok(SyntheticSuite {
        domains,
        actions,
        members,
    })
}

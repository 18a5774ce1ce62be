//! In-memory form of one encoder's evaluation data.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Which environment a frame was captured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Sim,
    Real,
}

impl Domain {
    /// Encoding used in label files: 0.0 = sim, 1.0 = real.
    pub fn from_flag(value: f64) -> Option<Self> {
        if value == 0.0 {
            Some(Self::Sim)
        } else if value == 1.0 {
            Some(Self::Real)
        } else {
            None
        }
    }

    pub fn as_flag(self) -> f64 {
        match self {
            Self::Sim => 0.0,
            Self::Real => 1.0,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sim => "sim",
            Self::Real => "real",
        })
    }
}

/// Per-row domain flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainLabels(pub(crate) Vec<Domain>);

impl DomainLabels {
    pub fn new(flags: Vec<Domain>) -> Result<Self> {
        if flags.is_empty() {
            return Err(Error::Empty("domain labels"));
        }
        Ok(Self(flags))
    }

    /// Reads an n×1 (or 1×n) matrix of 0.0/1.0 flags.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if m.cols() != 1 && m.rows() != 1 {
            return Err(Error::ShapeMismatch {
                op: "domain labels",
                left_rows: m.rows(),
                left_cols: m.cols(),
                right_rows: m.rows(),
                right_cols: 1,
            });
        }
        let flags = m
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                Domain::from_flag(v).ok_or(Error::InvalidConfig(alloc::format!(
                    "domain flag at row {i} is {v}, expected 0.0 (sim) or 1.0 (real)"
                )))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(flags)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_raw(self.0.len(), 1, self.0.iter().map(|d| d.as_flag()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Domain] {
        &self.0
    }

    pub fn count(&self, domain: Domain) -> usize {
        self.0.iter().filter(|&&d| d == domain).count()
    }

    pub fn indices_of(&self, domain: Domain) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &d)| (d == domain).then_some(i))
            .collect()
    }
}

/// Embeddings, domain flags and ground-truth actions for one encoder, with
/// matching row counts.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderDataset {
    encoder_id: String,
    embeddings: Matrix,
    domains: DomainLabels,
    actions: Matrix,
}

impl EncoderDataset {
    pub fn new(encoder_id: impl Into<String>, embeddings: Matrix, domains: DomainLabels, actions: Matrix) -> Result<Self> {
        let (n, d_a) = (embeddings.rows(), actions.cols());
        if n != domains.len() || n != actions.rows() {
            return Err(Error::RowCountMismatch {
                embeddings: n,
                domains: domains.len(),
                actions: actions.rows(),
            });
        }
        if embeddings.cols() == 0 {
            return Err(Error::Empty("embeddings"));
        }
        if d_a == 0 {
            return Err(Error::Empty("actions"));
        }
        Ok(Self {
            encoder_id: encoder_id.into(),
            embeddings,
            domains,
            actions,
        })
    }

    pub fn encoder_id(&self) -> &str {
        &self.encoder_id
    }

    pub fn embeddings(&self) -> &Matrix {
        &self.embeddings
    }

    pub fn domains(&self) -> &DomainLabels {
        &self.domains
    }

    pub fn actions(&self) -> &Matrix {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.embeddings.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn embedding_dim(&self) -> usize {
        self.embeddings.cols()
    }

    pub fn action_dim(&self) -> usize {
        self.actions.cols()
    }

    pub fn into_parts(self) -> (String, Matrix, DomainLabels, Matrix) {
        (self.encoder_id, self.embeddings, self.domains, self.actions)
    }
}

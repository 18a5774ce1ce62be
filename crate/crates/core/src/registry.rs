//! Catalog of known pre-trained vision encoders and their metadata.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::EncoderDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Cnn,
    Transformer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingType {
    Supervised,
    SelfSupervised,
}

/// Pre-training data family. "Robot Manipulation" and "Manipulation" both
/// map to `Manipulation`; the original wording stays in
/// [`EncoderMeta::pretraining_data`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pretraining {
    General,
    Manipulation,
}

macro_rules! tokens {
    ($ty:ty { $($variant:ident => $token:literal),* $(,)? }) => {
        impl $ty {
            /// Stable lowercase token, identical to the serde form.
            pub fn token(self) -> &'static str {
                match self {
                    $(Self::$variant => $token),*
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

tokens!(Architecture { Cnn => "cnn", Transformer => "transformer" });
tokens!(TrainingType { Supervised => "supervised", SelfSupervised => "self-supervised" });
tokens!(Pretraining { General => "general", Manipulation => "manipulation" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderMeta {
    pub encoder_id: String,
    pub display_name: String,
    pub architecture: Architecture,
    pub embedding_dim: usize,
    pub parameters_millions: f64,
    pub training_type: TrainingType,
    pub pretraining: Pretraining,
    /// Row number in the reference encoder table, used as the plot label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_number: Option<u32>,
    /// Pre-training data as originally described (e.g. "General (ImageNet)").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pretraining_data: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EncoderMeta {
    pub fn validate(&self) -> Result<()> {
        if self.encoder_id.trim().is_empty() {
            return Err(Error::InvalidConfig("catalog entry with empty encoder_id".into()));
        }
        if self.embedding_dim == 0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "catalog entry {:?}: embedding_dim must be at least 1",
                self.encoder_id
            )));
        }
        if !(self.parameters_millions > 0.0 && self.parameters_millions.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "catalog entry {:?}: parameters_millions must be positive",
                self.encoder_id
            )));
        }
        Ok(())
    }
}

/// Lookup key: ASCII-lowercased with spaces and underscores folded to `-`,
/// so "R3M ResNet50", "r3m_resnet50" and "R3M-ResNet50" coincide.
pub fn normalize_id(id: &str) -> String {
    id.trim()
        .chars()
        .map(|c| match c {
            ' ' | '_' => '-',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

/// Ordered set of encoder metadata with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    entries: Vec<EncoderMeta>,
}

impl Catalog {
    /// The 23 encoders of the reference study.
    pub fn builtin() -> Self {
        Self {
            entries: builtin_catalog(),
        }
    }

    pub fn from_entries(entries: Vec<EncoderMeta>) -> Result<Self> {
        let mut keys: Vec<String> = Vec::with_capacity(entries.len());
        for e in &entries {
            e.validate()?;
            let key = normalize_id(&e.encoder_id);
            if keys.contains(&key) {
                return Err(Error::DuplicateEncoder(e.encoder_id.clone()));
            }
            keys.push(key);
        }
        Ok(Self { entries })
    }

    /// Replaces entries whose id matches an override and appends the rest.
    pub fn with_overrides(mut self, overrides: Vec<EncoderMeta>) -> Result<Self> {
        let overrides = Self::from_entries(overrides)?;
        for meta in overrides.entries {
            let key = normalize_id(&meta.encoder_id);
            match self.entries.iter_mut().find(|e| normalize_id(&e.encoder_id) == key) {
                Some(slot) => *slot = meta,
                None => self.entries.push(meta),
            }
        }
        Ok(self)
    }

    pub fn entries(&self) -> &[EncoderMeta] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Finds an entry by id or display name (see [`normalize_id`]).
    pub fn lookup(&self, id: &str) -> Option<&EncoderMeta> {
        let key = normalize_id(id);
        self.entries
            .iter()
            .find(|e| normalize_id(&e.encoder_id) == key)
            .or_else(|| self.entries.iter().find(|e| normalize_id(&e.display_name) == key))
    }

    /// Checks the dataset's embedding width against its catalog entry.
    /// Encoders missing from the catalog pass with [`DimCheck::NotInCatalog`].
    pub fn check_dataset(&self, ds: &EncoderDataset) -> Result<DimCheck> {
        match self.lookup(ds.encoder_id()) {
            Some(meta) => validate_dims(meta, ds).map(|()| DimCheck::Validated),
            None => Ok(DimCheck::NotInCatalog),
        }
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimCheck {
    Validated,
    NotInCatalog,
}

/// Fails unless the dataset's embedding width equals `meta.embedding_dim`.
pub fn validate_dims(meta: &EncoderMeta, ds: &EncoderDataset) -> Result<()> {
    if ds.embedding_dim() != meta.embedding_dim {
        return Err(Error::DimMismatch {
            encoder_id: ds.encoder_id().to_owned(),
            expected: meta.embedding_dim,
            actual: ds.embedding_dim(),
        });
    }
    Ok(())
}

/// Id, display name, architecture, dim, params (M), training, pre-training, data.
type Row = (&'static str, &'static str, Architecture, usize, f64, TrainingType, Pretraining, &'static str);

pub fn builtin_catalog() -> Vec<EncoderMeta> {
    use Architecture::{Cnn, Transformer};
    use Pretraining::{General, Manipulation};
    use TrainingType::{SelfSupervised as Ssl, Supervised as Sup};

    #[rustfmt::skip]
    let rows: [Row; 23] = [
        ("CLIP-Base-16", "CLIP-Base-16", Transformer, 512, 51.0, Ssl, General, "General"),
        ("CLIP-Base-32", "CLIP-Base-32", Transformer, 512, 151.0, Ssl, General, "General"),
        ("CLIP-Large-14", "CLIP-Large-14", Transformer, 768, 432.0, Ssl, General, "General"),
        ("DinoV2-B", "DinoV2-B", Transformer, 768, 86.0, Ssl, General, "General"),
        ("EfficientNet-B0", "EfficientNet B0", Cnn, 1280, 5.3, Sup, General, "General"),
        ("HRP-ResNet18", "HRP-ResNet18", Cnn, 512, 11.7, Sup, Manipulation, "Manipulation"),
        ("HRP-ViT", "HRP-ViT", Transformer, 768, 24.0, Sup, Manipulation, "Manipulation"),
        ("MCR", "MCR", Cnn, 2048, 5.9, Ssl, Manipulation, "Robot Manipulation"),
        ("MobileNetV3", "MobileNetV3", Cnn, 1280, 5.4, Sup, General, "General"),
        ("MVP", "MVP", Transformer, 768, 43.0, Ssl, Manipulation, "Manipulation"),
        ("R3M-ResNet18", "R3M ResNet18", Cnn, 512, 11.7, Ssl, Manipulation, "Manipulation"),
        ("R3M-ResNet34", "R3M ResNet34", Cnn, 512, 21.3, Ssl, Manipulation, "Manipulation"),
        ("R3M-ResNet50", "R3M ResNet50", Cnn, 2048, 25.6, Ssl, Manipulation, "Manipulation"),
        ("ResNet18", "ResNet18", Cnn, 512, 11.7, Sup, General, "General (ImageNet)"),
        ("ResNet34", "ResNet34", Cnn, 512, 21.3, Sup, General, "General (ImageNet)"),
        ("ResNet50", "ResNet50", Cnn, 2048, 25.6, Sup, General, "General (ImageNet)"),
        ("ResNet101", "ResNet101", Cnn, 2048, 44.6, Sup, General, "General (ImageNet)"),
        ("Swin-Transformer", "Swin Transformer", Transformer, 1024, 87.0, Ssl, General, "General"),
        ("VC1-B", "VC1-B", Cnn, 768, 22.6, Ssl, General, "General"),
        ("VGG-16", "VGG-16", Cnn, 4096, 138.0, Sup, General, "General"),
        ("VGG-19", "VGG-19", Cnn, 4096, 143.0, Sup, General, "General"),
        ("VIP", "VIP", Cnn, 1024, 22.6, Ssl, Manipulation, "Manipulation"),
        ("ViT", "Vision Transformer (ViT)", Transformer, 768, 86.0, Sup, General, "General (ImageNet)"),
    ];

    rows.iter()
        .enumerate()
        .map(|(i, &(id, name, architecture, dim, params, training_type, pretraining, data))| EncoderMeta {
            encoder_id: id.into(),
            display_name: name.into(),
            architecture,
            embedding_dim: dim,
            parameters_millions: params,
            training_type,
            pretraining,
            table_number: Some(i as u32 + 1),
            pretraining_data: Some(data.into()),
            note: (id == "VC1-B")
                .then(|| "listed as CNN in the reference table although the VC-1 family is ViT-based".into()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::dataset::{Domain, DomainLabels};
    use crate::linalg::Matrix;
    use alloc::vec;

    fn dataset(id: &str, dim: usize) -> EncoderDataset {
        EncoderDataset::new(
            id,
            Matrix::zeros(2, dim),
            DomainLabels::new(vec![Domain::Sim, Domain::Real]).unwrap(),
            Matrix::zeros(2, 1),
        )
        .unwrap()
    }

    #[test]
    fn builtin_lookups() {
        let c = Catalog::builtin();
        assert_eq!(c.len(), 23);
        let mcr = c.lookup("MCR").unwrap();
        assert_eq!((mcr.embedding_dim, mcr.parameters_millions), (2048, 5.9));
        assert_eq!((mcr.architecture, mcr.training_type, mcr.pretraining), (Architecture::Cnn, TrainingType::SelfSupervised, Pretraining::Manipulation));
        assert_eq!(mcr.pretraining_data.as_deref(), Some("Robot Manipulation"));
        let vgg = c.lookup("VGG-16").unwrap();
        assert_eq!((vgg.embedding_dim, vgg.parameters_millions), (4096, 138.0));
        let vit = c.lookup("ViT").unwrap();
        assert_eq!((vit.architecture, vit.embedding_dim, vit.parameters_millions), (Architecture::Transformer, 768, 86.0));
        assert_eq!(vit.table_number, Some(23));
        assert_eq!(c.lookup("R3M ResNet50").unwrap().embedding_dim, 2048);
        assert_eq!(c.lookup("vision transformer (vit)").unwrap().encoder_id, "ViT");
        assert!(c.lookup("CLIP-Huge").is_none());
    }

    #[test]
    fn ids_are_unique() {
        assert!(Catalog::from_entries(builtin_catalog()).is_ok());
        let mut dup = builtin_catalog();
        dup.push(dup[0].clone());
        assert!(matches!(Catalog::from_entries(dup), Err(Error::DuplicateEncoder(_))));
    }

    #[test]
    fn dim_validation() {
        let c = Catalog::builtin();
        let mcr = c.lookup("MCR").unwrap();
        assert!(validate_dims(mcr, &dataset("MCR", 2048)).is_ok());
        let err = validate_dims(mcr, &dataset("MCR", 512)).unwrap_err();
        assert_eq!(err.to_string(), "embedding dimension mismatch for MCR: expected 2048, found 512");
        assert_eq!(c.check_dataset(&dataset("my-encoder", 7)).unwrap(), DimCheck::NotInCatalog);
        assert_eq!(c.check_dataset(&dataset("MCR", 2048)).unwrap(), DimCheck::Validated);
    }

    #[test]
    fn overrides_replace_and_append() {
        let mut custom = Catalog::builtin().lookup("MCR").unwrap().clone();
        custom.embedding_dim = 64;
        let mut extra = custom.clone();
        extra.encoder_id = "tiny".into();
        extra.display_name = "Tiny".into();
        let c = Catalog::builtin().with_overrides(vec![custom, extra]).unwrap();
        assert_eq!(c.len(), 24);
        assert_eq!(c.lookup("mcr").unwrap().embedding_dim, 64);
        assert!(c.lookup("tiny").is_some());
    }

    #[test]
    fn tokens_are_lowercase() {
        assert_eq!(TrainingType::SelfSupervised.token(), "self-supervised");
        assert_eq!(Architecture::Cnn.token(), "cnn");
        assert_eq!(alloc::format!("{}", Pretraining::Manipulation), "manipulation");
    }

    #[test]
    fn entry_validation() {
        let mut bad = builtin_catalog().remove(0);
        bad.parameters_millions = 0.0;
        assert!(bad.validate().is_err());
        bad.parameters_millions = 1.0;
        bad.embedding_dim = 0;
        assert!(bad.validate().is_err());
    }
}

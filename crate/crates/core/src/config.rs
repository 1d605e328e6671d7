//! Pipeline configuration, read from a TOML file. Every field has a
//! default, so an empty file is a valid configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TagLabel;
use crate::labeler::{
    CodlConfig, Constraint, ConstraintId, ConstraintSet, FeatureTemplates, Hardness, LabelSet, TrainConfig,
};
use crate::operators::{DEFAULT_EXPANSION_THRESHOLD, DEFAULT_WINDOW};
use crate::qa::{DEFAULT_K, DEFAULT_NEAR_RADIUS_KM};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config: {0}")]
    Parse(String),
    #[error("config: {0}")]
    Range(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintConfig {
    pub type_exists: bool,
    pub attr_exists: bool,
    pub type_same_sentence: bool,
    /// Replaces the estimated penalty when set.
    pub attr_rho: Option<f64>,
    pub same_sentence_rho: Option<f64>,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig {
            type_exists: true,
            attr_exists: true,
            type_same_sentence: true,
            attr_rho: None,
            same_sentence_rho: None,
        }
    }
}

impl ConstraintConfig {
    /// Enabled constraints with initial penalties of 1 (or the overrides).
    pub fn constraint_set(&self) -> ConstraintSet {
        let mut cs = Vec::new();
        if self.type_exists {
            cs.push(Constraint {
                id: ConstraintId::TypeExists,
                hardness: Hardness::Hard,
                rho: 0.0,
            });
        }
        if self.attr_exists {
            cs.push(Constraint {
                id: ConstraintId::AttrExists,
                hardness: Hardness::Soft,
                rho: self.attr_rho.unwrap_or(1.0),
            });
        }
        if self.type_same_sentence {
            cs.push(Constraint {
                id: ConstraintId::TypeSameSentence,
                hardness: Hardness::Soft,
                rho: self.same_sentence_rho.unwrap_or(1.0),
            });
        }
        ConstraintSet::new(cs).expect("well-formed by construction")
    }

    pub fn apply_overrides(&self, set: &mut ConstraintSet) {
        if let Some(r) = self.attr_rho {
            set.set_rho(ConstraintId::AttrExists, r);
        }
        if let Some(r) = self.same_sentence_rho {
            set.set_rho(ConstraintId::TypeSameSentence, r);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    pub window: usize,
    pub lexicon: Option<PathBuf>,
    /// Word vectors used to expand the seed lexicon.
    pub expansion_vectors: Option<PathBuf>,
    pub expansion_threshold: f64,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        OperatorConfig {
            window: DEFAULT_WINDOW,
            lexicon: None,
            expansion_vectors: None,
            expansion_threshold: DEFAULT_EXPANSION_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexConfig {
    pub entities: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QaConfig {
    pub k: usize,
    pub backoff: bool,
    pub near_radius_km: f64,
}

impl Default for QaConfig {
    fn default() -> Self {
        QaConfig {
            k: DEFAULT_K,
            backoff: true,
            near_radius_km: DEFAULT_NEAR_RADIUS_KM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub labels: Vec<TagLabel>,
    pub features: FeatureTemplates,
    pub crf: TrainConfig,
    pub constraints: ConstraintConfig,
    pub codl: CodlConfig,
    pub operators: OperatorConfig,
    pub index: IndexConfig,
    pub qa: QaConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            labels: LabelSet::default_subset().labels().to_vec(),
            features: FeatureTemplates::default(),
            crf: TrainConfig::default(),
            constraints: ConstraintConfig::default(),
            codl: CodlConfig::default(),
            operators: OperatorConfig::default(),
            index: IndexConfig::default(),
            qa: QaConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn label_set(&self) -> LabelSet {
        LabelSet::new(self.labels.iter().copied())
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Range(m));
        if !(self.crf.sigma2 > 0.0) {
            return bad(format!("crf.sigma2 must be positive, got {}", self.crf.sigma2));
        }
        if !(self.crf.tolerance > 0.0) {
            return bad(format!("crf.tolerance must be positive, got {}", self.crf.tolerance));
        }
        if !(0.0..=1.0).contains(&self.codl.gamma) {
            return bad(format!("codl.gamma must lie in [0, 1], got {}", self.codl.gamma));
        }
        if !(self.codl.tolerance >= 0.0) {
            return bad(format!(
                "codl.tolerance must be non-negative, got {}",
                self.codl.tolerance
            ));
        }
        for (name, r) in [
            ("attr_rho", self.constraints.attr_rho),
            ("same_sentence_rho", self.constraints.same_sentence_rho),
        ] {
            if let Some(r) = r {
                if !(r >= 0.0 && r.is_finite()) {
                    return bad(format!("constraints.{name} must be finite and non-negative, got {r}"));
                }
            }
        }
        if self.operators.window == 0 {
            return bad("operators.window must be at least 1".into());
        }
        if !self.operators.expansion_threshold.is_finite() {
            return bad("operators.expansion_threshold must be finite".into());
        }
        if self.qa.k == 0 {
            return bad("qa.k must be at least 1".into());
        }
        if !(self.qa.near_radius_km > 0.0) {
            return bad(format!(
                "qa.near_radius_km must be positive, got {}",
                self.qa.near_radius_km
            ));
        }
        Ok(())
    }
}

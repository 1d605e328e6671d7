use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::constraints::ConstraintSet;
use super::crf::{log_likelihood_and_gradient, CrfParams, Instance};
use super::features::FeatureExtractor;
use super::inference::{decode, Decoded, Lattice, Penalties};
use super::labels::LabelSet;
use super::optimize::{maximize, AscentOptions};
use super::LabelerError;
use crate::corpus::{LabelSequence, PartialLabel, PartialLabeling, Question, TagLabel};

pub const MODEL_FORMAT: &str = "msrq-crf-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Gaussian prior variance on the weights.
    pub sigma2: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sigma2: 10.0,
            max_iterations: 500,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrfModel {
    pub labels: LabelSet,
    pub extractor: FeatureExtractor,
    pub params: CrfParams,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainReport {
    pub iterations: usize,
    pub log_likelihood: f64,
    pub converged: bool,
}

/// A labeled question prepared for training.
pub fn instance(extractor: &FeatureExtractor, labels: &LabelSet, q: &Question, gold: &[TagLabel]) -> Instance {
    Instance {
        features: extractor.extract(q),
        labels: gold.iter().map(|&l| labels.project(l)).collect(),
        sentences: q.sentence_ids(),
    }
}

/// Fits the dictionary (if the extractor is not frozen yet), then
/// maximizes the penalized log-likelihood from zero weights.
pub fn crf_train(
    mut extractor: FeatureExtractor,
    labels: &LabelSet,
    examples: &[(&Question, &[TagLabel])],
    config: &TrainConfig,
) -> Result<(CrfModel, TrainReport), LabelerError> {
    if examples.is_empty() {
        return Err(LabelerError::EmptyTrainingSet);
    }
    for (q, gold) in examples {
        if q.len() != gold.len() {
            return Err(LabelerError::LengthMismatch {
                question: q.id.clone(),
                tokens: q.len(),
                labels: gold.len(),
            });
        }
    }
    if !extractor.is_frozen() {
        for (q, _) in examples {
            extractor.fit(q);
        }
        extractor.freeze();
    }
    let instances: Vec<Instance> = examples
        .iter()
        .map(|(q, g)| instance(&extractor, labels, q, g))
        .collect();
    let params = CrfParams::zeros(extractor.len(), labels.len());
    let (params, report) = train_params(params, &instances, config)?;
    Ok((
        CrfModel {
            labels: labels.clone(),
            extractor,
            params,
            sigma2: config.sigma2,
        },
        report,
    ))
}

pub(crate) fn train_params(
    mut params: CrfParams,
    instances: &[Instance],
    config: &TrainConfig,
) -> Result<(CrfParams, TrainReport), LabelerError> {
    let opts = AscentOptions {
        max_iterations: config.max_iterations,
        tolerance: config.tolerance,
        ..Default::default()
    };
    let sigma2 = config.sigma2.is_finite().then_some(config.sigma2);
    let template = params.clone();
    let result = maximize(
        |w: &[f64]| {
            let p = CrfParams {
                weights: w.to_vec(),
                ..template.clone()
            };
            log_likelihood_and_gradient(&p, instances, sigma2)
        },
        std::mem::take(&mut params.weights),
        &opts,
    )?;
    if !result.converged {
        log::warn!(
            "CRF training stopped after {} iterations without reaching tolerance {}",
            result.iterations,
            config.tolerance
        );
    }
    params.weights = result.x;
    Ok((
        params,
        TrainReport {
            iterations: result.iterations,
            log_likelihood: result.value,
            converged: result.converged,
        },
    ))
}

impl CrfModel {
    pub fn lattice(&self, q: &Question) -> Lattice {
        self.params.lattice(&self.extractor.extract(q), &q.sentence_ids())
    }

    fn to_sequence(&self, q: &Question, d: &Decoded) -> LabelSequence {
        LabelSequence::new(q.id.clone(), d.labels.iter().map(|&i| self.labels.label(i)).collect())
    }

    /// Unconstrained MAP labeling.
    pub fn viterbi_decode(&self, q: &Question) -> LabelSequence {
        let d = decode(&self.lattice(q), &Penalties::none(), None);
        self.to_sequence(q, &d)
    }

    /// MAP labeling under `constraints`.
    pub fn ccm_decode(&self, constraints: &ConstraintSet, q: &Question) -> LabelSequence {
        let d = decode(&self.lattice(q), &constraints.penalties(&self.labels), None);
        self.to_sequence(q, &d)
    }

    /// Fills the unknown positions of `partial` by constrained inference with
    /// the known positions clamped.
    pub fn complete_partial(
        &self,
        constraints: &ConstraintSet,
        q: &Question,
        partial: &PartialLabeling,
    ) -> Result<LabelSequence, LabelerError> {
        if partial.labels.len() != q.len() {
            return Err(LabelerError::LengthMismatch {
                question: q.id.clone(),
                tokens: q.len(),
                labels: partial.labels.len(),
            });
        }
        let clamps: Vec<Option<usize>> = partial
            .labels
            .iter()
            .map(|l| match l {
                PartialLabel::Known(t) => Some(self.labels.project(*t)),
                PartialLabel::Unknown => None,
            })
            .collect();
        let d = decode(&self.lattice(q), &constraints.penalties(&self.labels), Some(&clamps));
        let mut out = self.to_sequence(q, &d);
        // clamped positions keep their original label, even outside the label set
        for (o, l) in out.labels.iter_mut().zip(&partial.labels) {
            if let PartialLabel::Known(t) = l {
                *o = *t;
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: CrfModel,
    constraints: ConstraintSet,
}

/// Writes the model and its constraint penalties as versioned JSON.
pub fn save_model(path: impl AsRef<Path>, model: &CrfModel, constraints: &ConstraintSet) -> Result<(), LabelerError> {
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        model: model.clone(),
        constraints: constraints.clone(),
    };
    let text = serde_json::to_string(&file).map_err(|e| LabelerError::ModelFormat(e.to_string()))?;
    fs::write(path.as_ref(), text).map_err(|e| LabelerError::Io(path.as_ref().display().to_string(), e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(CrfModel, ConstraintSet), LabelerError> {
    let text =
        fs::read_to_string(path.as_ref()).map_err(|e| LabelerError::Io(path.as_ref().display().to_string(), e))?;
    model_from_json(&text)
}

pub fn model_from_json(text: &str) -> Result<(CrfModel, ConstraintSet), LabelerError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| LabelerError::ModelFormat(e.to_string()))?;
    if v.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT) {
        return Err(LabelerError::ModelFormat("not a model file".into()));
    }
    let version = v.get("version").and_then(|x| x.as_u64());
    if version != Some(MODEL_VERSION as u64) {
        return Err(LabelerError::ModelVersion {
            found: version.map(|x| x as u32),
            expected: MODEL_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(v).map_err(|e| LabelerError::ModelFormat(e.to_string()))?;
    let m = &file.model;
    if m.params.num_features != m.extractor.len()
        || m.params.num_labels != m.labels.len()
        || m.params.weights.len() != m.params.dim_expected()
        || m.params.weights.iter().any(|w| !w.is_finite())
    {
        return Err(LabelerError::ModelFormat(
            "weight dimensions or values inconsistent".into(),
        ));
    }
    file.constraints.check()?;
    Ok((file.model, file.constraints))
}

impl CrfParams {
    fn dim_expected(&self) -> usize {
        self.num_features * self.num_labels + self.num_labels * self.num_labels
    }
}

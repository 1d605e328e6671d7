//! Constraint-driven semi-supervised training over partially labeled
//! sequences.

use serde::{Deserialize, Serialize};

use super::constraints::{estimate_rho, ConstraintSet};
use super::crf::CrfParams;
use super::features::FeatureExtractor;
use super::labels::LabelSet;
use super::model::{crf_train, instance, train_params, CrfModel, TrainConfig};
use super::LabelerError;
use crate::corpus::{PartialLabeling, Question, TagLabel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodlConfig {
    /// Weight on the supervised (iteration-0) parameters.
    pub gamma: f64,
    pub max_iterations: usize,
    /// Stop when the largest parameter change falls below this.
    pub tolerance: f64,
}

impl Default for CodlConfig {
    fn default() -> Self {
        CodlConfig {
            gamma: 0.9,
            max_iterations: 10,
            tolerance: 1e-4,
        }
    }
}

impl CodlConfig {
    pub fn check(&self) -> Result<(), LabelerError> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(LabelerError::Config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodlOutcome {
    pub model: CrfModel,
    pub constraints: ConstraintSet,
    /// Iterations run after the supervised start.
    pub iterations: usize,
}

/// γ·a + (1−γ)·b, returning either side exactly at γ ∈ {0, 1}.
fn interpolate(gamma: f64, a: &[f64], b: &[f64]) -> Vec<f64> {
    if gamma == 1.0 {
        return a.to_vec();
    }
    if gamma == 0.0 {
        return b.to_vec();
    }
    a.iter().zip(b).map(|(x, y)| gamma * x + (1.0 - gamma) * y).collect()
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Iteration 0 learns (w, ρ) from `labeled` alone. Each later iteration
/// completes `partial` with the current parameters, learns on the
/// completed set, and interpolates with the iteration-0 parameters.
///
/// The feature dictionary is fitted once over the questions of both sets
/// and frozen before iteration 0.
pub fn codl_train(
    extractor: FeatureExtractor,
    labels: &LabelSet,
    constraints: &ConstraintSet,
    labeled: &[(&Question, &[TagLabel])],
    partial: &[(&Question, &PartialLabeling)],
    train: &TrainConfig,
    config: &CodlConfig,
) -> Result<CodlOutcome, LabelerError> {
    config.check()?;
    if labeled.is_empty() {
        return Err(LabelerError::EmptyTrainingSet);
    }
    let mut extractor = extractor;
    if !extractor.is_frozen() {
        for (q, _) in labeled {
            extractor.fit(q);
        }
        for (q, _) in partial {
            extractor.fit(q);
        }
        extractor.freeze();
    }
    let (base, _) = crf_train(extractor, labels, labeled, train)?;
    let base_constraints = estimate_rho(
        constraints,
        labeled
            .iter()
            .map(|(q, l)| (sentences_of(q), *l))
            .collect::<Vec<_>>()
            .iter()
            .map(|(s, l)| (s.as_slice(), *l)),
    )?;
    if partial.is_empty() || config.max_iterations == 0 || config.gamma == 1.0 {
        return Ok(CodlOutcome {
            model: base,
            constraints: base_constraints,
            iterations: 0,
        });
    }
    let w0 = base.params.weights.clone();
    let rho0 = base_constraints.soft_rhos();
    let mut model = base;
    let mut current = base_constraints.clone();
    let mut iterations = 0;
    for _ in 0..config.max_iterations {
        iterations += 1;
        let completed = partial
            .iter()
            .map(|(q, p)| model.complete_partial(&current, q, p).map(|s| (*q, s.labels)))
            .collect::<Result<Vec<_>, _>>()?;
        let instances: Vec<_> = completed
            .iter()
            .map(|(q, l)| instance(&model.extractor, labels, q, l))
            .collect();
        let (learned, _) = train_params(CrfParams::zeros(model.extractor.len(), labels.len()), &instances, train)?;
        let sents: Vec<Vec<usize>> = completed.iter().map(|(q, _)| q.sentence_ids()).collect();
        let learned_rho = estimate_rho(
            constraints,
            sents
                .iter()
                .zip(&completed)
                .map(|(s, (_, l))| (s.as_slice(), l.as_slice())),
        )?;
        let w_next = interpolate(config.gamma, &w0, &learned.weights);
        let rho_next = interpolate(config.gamma, &rho0, &learned_rho.soft_rhos());
        let delta = max_change(&w_next, &model.params.weights).max(max_change(&rho_next, &current.soft_rhos()));
        model.params.weights = w_next;
        current = current.with_soft_rhos(&rho_next);
        if delta < config.tolerance {
            break;
        }
    }
    Ok(CodlOutcome {
        model,
        constraints: current,
        iterations,
    })
}

fn sentences_of(q: &Question) -> Vec<usize> {
    q.sentence_ids()
}

//! Global constraints over a question's labeling and their penalties.

use serde::{Deserialize, Serialize};

use super::inference::Penalties;
use super::labels::LabelSet;
use super::LabelerError;
use crate::corpus::TagLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintId {
    /// At least one x.type token.
    TypeExists,
    /// At least one x.attribute token.
    AttrExists,
    /// All x.type tokens in one sentence.
    TypeSameSentence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardness {
    Hard,
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub id: ConstraintId,
    pub hardness: Hardness,
    /// Penalty weight; ignored for hard constraints.
    pub rho: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn empty() -> Self {
        ConstraintSet::default()
    }

    /// The hard type constraint plus the two soft constraints with the given
    /// initial penalties.
    pub fn standard(attr_rho: f64, same_sentence_rho: f64) -> Self {
        ConstraintSet {
            constraints: vec![
                Constraint {
                    id: ConstraintId::TypeExists,
                    hardness: Hardness::Hard,
                    rho: 0.0,
                },
                Constraint {
                    id: ConstraintId::AttrExists,
                    hardness: Hardness::Soft,
                    rho: attr_rho,
                },
                Constraint {
                    id: ConstraintId::TypeSameSentence,
                    hardness: Hardness::Soft,
                    rho: same_sentence_rho,
                },
            ],
        }
    }

    pub fn new(constraints: Vec<Constraint>) -> Result<Self, LabelerError> {
        let set = ConstraintSet { constraints };
        set.check()?;
        Ok(set)
    }

    pub fn check(&self) -> Result<(), LabelerError> {
        for (i, c) in self.constraints.iter().enumerate() {
            if self.constraints[..i].iter().any(|d| d.id == c.id) {
                return Err(LabelerError::Constraint(format!("duplicate constraint {:?}", c.id)));
            }
            if !(c.rho >= 0.0 && c.rho.is_finite()) {
                return Err(LabelerError::Constraint(format!(
                    "{:?} has invalid rho {}",
                    c.id, c.rho
                )));
            }
            let expected = if c.id == ConstraintId::TypeExists {
                Hardness::Hard
            } else {
                Hardness::Soft
            };
            if c.hardness != expected {
                return Err(LabelerError::Constraint(format!("{:?} must be {:?}", c.id, expected)));
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn get(&self, id: ConstraintId) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.id == id)
    }

    pub fn rho(&self, id: ConstraintId) -> Option<f64> {
        self.get(id).filter(|c| c.hardness == Hardness::Soft).map(|c| c.rho)
    }

    pub fn set_rho(&mut self, id: ConstraintId, rho: f64) {
        if let Some(c) = self.constraints.iter_mut().find(|c| c.id == id) {
            if c.hardness == Hardness::Soft {
                c.rho = rho;
            }
        }
    }

    /// Soft penalties in declaration order.
    pub fn soft_rhos(&self) -> Vec<f64> {
        self.constraints
            .iter()
            .filter(|c| c.hardness == Hardness::Soft)
            .map(|c| c.rho)
            .collect()
    }

    pub fn with_soft_rhos(&self, rhos: &[f64]) -> Self {
        let mut out = self.clone();
        let mut it = rhos.iter();
        for c in out.constraints.iter_mut().filter(|c| c.hardness == Hardness::Soft) {
            c.rho = *it.next().expect("one rho per soft constraint");
        }
        out
    }

    pub fn penalties(&self, labels: &LabelSet) -> Penalties {
        Penalties {
            type_label: labels.index_of(TagLabel::Type),
            attr_label: labels.index_of(TagLabel::Attribute),
            require_type: self.get(ConstraintId::TypeExists).is_some(),
            attr_rho: self.rho(ConstraintId::AttrExists).unwrap_or(0.0),
            same_sentence_rho: self.rho(ConstraintId::TypeSameSentence).unwrap_or(0.0),
        }
    }
}

/// Violation score of one constraint.
pub fn violation(id: ConstraintId, sentences: &[usize], labels: &[TagLabel]) -> f64 {
    match id {
        ConstraintId::TypeExists => (!labels.contains(&TagLabel::Type)) as u8 as f64,
        ConstraintId::AttrExists => (!labels.contains(&TagLabel::Attribute)) as u8 as f64,
        ConstraintId::TypeSameSentence => {
            let mut seen: Vec<usize> = labels
                .iter()
                .zip(sentences)
                .filter(|(l, _)| **l == TagLabel::Type)
                .map(|(_, &s)| s)
                .collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len().saturating_sub(1) as f64
        }
    }
}

/// Per-constraint violation scores for a full labeling.
pub fn constraint_violations(
    set: &ConstraintSet,
    sentences: &[usize],
    labels: &[TagLabel],
) -> Vec<(ConstraintId, f64)> {
    set.iter().map(|c| (c.id, violation(c.id, sentences, labels))).collect()
}

/// Laplace-smoothed negative log frequency of violation: for each soft
/// constraint, rho = -ln((V + 1) / (N + 2)), V = sequences with d > 0.
pub fn estimate_rho<'a>(
    set: &ConstraintSet,
    corpus: impl IntoIterator<Item = (&'a [usize], &'a [TagLabel])>,
) -> Result<ConstraintSet, LabelerError> {
    let corpus: Vec<_> = corpus.into_iter().collect();
    if corpus.is_empty() {
        return Err(LabelerError::EmptyTrainingSet);
    }
    let n = corpus.len() as f64;
    let mut out = set.clone();
    for c in set.iter().filter(|c| c.hardness == Hardness::Soft) {
        let v = corpus.iter().filter(|(s, l)| violation(c.id, s, l) > 0.0).count() as f64;
        out.set_rho(c.id, rho_from_counts(v, n));
    }
    Ok(out)
}

pub fn rho_from_counts(violated: f64, total: f64) -> f64 {
    -((violated + 1.0) / (total + 2.0)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use TagLabel::*;

    #[test]
    fn violation_scores() {
        let set = ConstraintSet::standard(1.0, 1.0);
        let v = constraint_violations(&set, &[0, 0, 1], &[Other, Attribute, Other]);
        assert_eq!(v[0], (ConstraintId::TypeExists, 1.0));
        let sentences = [0, 1, 2, 3, 3];
        let labels = [Type, Other, Type, Type, Attribute];
        assert_eq!(violation(ConstraintId::TypeSameSentence, &sentences, &labels), 2.0);
        let ok = constraint_violations(&set, &[0, 0, 0], &[Type, Type, Attribute]);
        assert!(ok.iter().all(|(_, d)| *d == 0.0));
    }

    #[test]
    fn rho_formula() {
        assert!((rho_from_counts(1.0, 4.0) - 1.0986122886681098).abs() < 1e-12);
        assert!(rho_from_counts(10.0, 10.0) < 0.1);
        assert!((rho_from_counts(0.0, 100.0) - 4.624972813284271).abs() < 1e-12);
    }

    #[test]
    fn estimate_counts_soft_only() {
        let set = ConstraintSet::standard(0.0, 0.0);
        let s = [0usize, 0];
        let with_attr = [Type, Attribute];
        let without = [Type, Other];
        let corpus: Vec<(&[usize], &[TagLabel])> =
            vec![(&s, &with_attr), (&s, &without), (&s, &with_attr), (&s, &with_attr)];
        let est = estimate_rho(&set, corpus).unwrap();
        assert!((est.rho(ConstraintId::AttrExists).unwrap() - (3.0f64).ln()).abs() < 1e-12);
        assert!((est.rho(ConstraintId::TypeSameSentence).unwrap() - (6.0f64).ln()).abs() < 1e-12);
        assert_eq!(est.rho(ConstraintId::TypeExists), None);
        assert!(matches!(
            estimate_rho(&set, Vec::<(&[usize], &[TagLabel])>::new()),
            Err(LabelerError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn rejects_soft_type_constraint() {
        let bad = ConstraintSet::new(vec![Constraint {
            id: ConstraintId::TypeExists,
            hardness: Hardness::Soft,
            rho: 1.0,
        }]);
        assert!(bad.is_err());
    }
}

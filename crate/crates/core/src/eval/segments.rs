use std::collections::BTreeMap;

use serde::Serialize;

use super::EvalError;
use crate::corpus::{segments_from_labels, Question, Segment, TagLabel};

pub const REPORT_LABELS: [TagLabel; 3] = [TagLabel::Type, TagLabel::Attribute, TagLabel::Location];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelEvalReport {
    pub per_label: BTreeMap<TagLabel, Prf>,
    /// Unweighted mean of the per-label F1 values.
    pub aggregate_f1: f64,
}

pub fn aggregate_f1(f1s: &[f64]) -> f64 {
    if f1s.is_empty() {
        0.0
    } else {
        f1s.iter().sum::<f64>() / f1s.len() as f64
    }
}

impl LabelEvalReport {
    fn from_map(per_label: BTreeMap<TagLabel, Prf>) -> Self {
        let f1s: Vec<f64> = per_label.values().map(|p| p.f1).collect();
        LabelEvalReport {
            aggregate_f1: aggregate_f1(&f1s),
            per_label,
        }
    }

    /// Percentages in a fixed-width table.
    pub fn to_table(&self) -> String {
        let mut s = format!("{:<16}{:>8}{:>8}{:>8}\n", "label", "P", "R", "F1");
        for (l, p) in &self.per_label {
            s += &format!(
                "{:<16}{:>8.1}{:>8.1}{:>8.1}\n",
                l.as_str(),
                100.0 * p.precision,
                100.0 * p.recall,
                100.0 * p.f1
            );
        }
        s += &format!("{:<16}{:>24.1}\n", "F1 (aggr)", 100.0 * self.aggregate_f1);
        s
    }
}

/// Sums of per-segment scores for one label class.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct ClassSums {
    precision: f64,
    predicted: usize,
    recall: f64,
    gold: usize,
}

impl ClassSums {
    fn add(&mut self, gold: &[Segment], pred: &[Segment]) {
        let best = |s: &Segment, other: &[Segment]| other.iter().map(|o| s.overlap(o)).max().unwrap_or(0) as f64;
        for p in pred {
            self.precision += best(p, gold) / p.len() as f64;
        }
        for g in gold {
            self.recall += best(g, pred) / g.len() as f64;
        }
        self.predicted += pred.len();
        self.gold += gold.len();
    }

    fn prf(&self) -> Prf {
        match (self.gold, self.predicted) {
            (0, 0) => Prf::new(1.0, 1.0),
            (g, p) => {
                let precision = if p == 0 { 0.0 } else { self.precision / p as f64 };
                let recall = if g == 0 { 0.0 } else { self.recall / g as f64 };
                Prf::new(precision, recall)
            }
        }
    }
}

/// Corpus-level segment scores: averages run over all segments of a class
/// across every added question.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentAccumulator {
    labels: Vec<TagLabel>,
    sums: BTreeMap<TagLabel, ClassSums>,
}

impl SegmentAccumulator {
    pub fn new(labels: &[TagLabel]) -> Self {
        SegmentAccumulator {
            labels: labels.to_vec(),
            sums: labels.iter().map(|&l| (l, ClassSums::default())).collect(),
        }
    }

    pub fn add(&mut self, question: &Question, gold: &[TagLabel], predicted: &[TagLabel]) -> Result<(), EvalError> {
        if gold.len() != predicted.len() || gold.len() != question.len() {
            return Err(EvalError::LengthMismatch {
                question: question.id.clone(),
                gold: gold.len(),
                predicted: predicted.len(),
            });
        }
        let gs = segments_from_labels(question, gold);
        let ps = segments_from_labels(question, predicted);
        for &l in &self.labels {
            let g: Vec<Segment> = gs.iter().copied().filter(|s| s.label == l).collect();
            let p: Vec<Segment> = ps.iter().copied().filter(|s| s.label == l).collect();
            self.sums.get_mut(&l).expect("class registered").add(&g, &p);
        }
        Ok(())
    }

    pub fn report(&self) -> LabelEvalReport {
        LabelEvalReport::from_map(self.sums.iter().map(|(&l, s)| (l, s.prf())).collect())
    }
}

/// Segment-matching scores for one question: each predicted segment is
/// matched to the same-label gold segment of largest overlap and scored by
/// the overlapping fraction of its tokens; recall runs the other way.
pub fn segment_prf(
    question: &Question,
    gold: &[TagLabel],
    predicted: &[TagLabel],
    labels: &[TagLabel],
) -> Result<LabelEvalReport, EvalError> {
    let mut acc = SegmentAccumulator::new(labels);
    acc.add(question, gold, predicted)?;
    Ok(acc.report())
}

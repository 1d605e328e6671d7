use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::jsonl_lines;
use crate::qa::AnswerList;

pub const TOP: usize = 3;

/// Gold entity ids per question, compared case-insensitively. Aliases map
/// alternative ids or names onto canonical ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QaGold {
    gold: BTreeMap<String, BTreeSet<String>>,
    aliases: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct GoldLine {
    id: String,
    gold: Vec<String>,
}

impl QaGold {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, question: &str, entities: impl IntoIterator<Item = impl AsRef<str>>) {
        let set = self.gold.entry(question.to_string()).or_default();
        set.extend(entities.into_iter().map(|e| e.as_ref().to_lowercase()));
    }

    pub fn add_alias(&mut self, alias: &str, canonical: &str) {
        self.aliases.insert(alias.to_lowercase(), canonical.to_lowercase());
    }

    fn canon(&self, entity: &str) -> String {
        let e = entity.to_lowercase();
        self.aliases.get(&e).cloned().unwrap_or(e)
    }

    pub fn is_correct(&self, question: &str, entity: &str) -> bool {
        self.gold.get(question).is_some_and(|g| g.contains(&self.canon(entity)))
    }

    pub fn contains_question(&self, question: &str) -> bool {
        self.gold.contains_key(question)
    }

    pub fn len(&self) -> usize {
        self.gold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gold.is_empty()
    }

    /// JSONL lines `{"id": .., "gold": [..]}`.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut out = QaGold::new();
        for (line, l) in jsonl_lines(text) {
            let g: GoldLine = serde_json::from_str(l).map_err(|e| EvalError::Format {
                line,
                message: e.to_string(),
            })?;
            out.insert(&g.id, g.gold);
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// JSON object mapping alias → canonical id.
    pub fn load_aliases(&mut self, text: &str) -> Result<(), EvalError> {
        let map: BTreeMap<String, String> = serde_json::from_str(text).map_err(|e| EvalError::Format {
            line: 1,
            message: e.to_string(),
        })?;
        for (a, c) in map {
            self.add_alias(&a, &c);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QaEvalReport {
    pub acc_at_3: f64,
    pub mrr: f64,
    pub recall: f64,
    pub attempted: usize,
    pub total: usize,
}

impl QaEvalReport {
    pub fn table_header() -> String {
        format!(
            "{:<16}{:>8}{:>8}{:>8}{:>12}\n",
            "system", "Acc@3", "MRR", "Recall", "attempted"
        )
    }

    pub fn table_row(&self, system: &str) -> String {
        format!(
            "{:<16}{:>8.1}{:>8.2}{:>8.1}{:>12}\n",
            system,
            100.0 * self.acc_at_3,
            self.mrr,
            100.0 * self.recall,
            format!("{}/{}", self.attempted, self.total)
        )
    }
}

/// Acc@3 and MRR over attempted questions, recall over all of them.
pub fn qa_metrics(answers: &[AnswerList], gold: &QaGold) -> Result<QaEvalReport, EvalError> {
    let mut attempted = 0;
    let mut top3 = 0;
    let mut rr = 0.0;
    for a in answers {
        if !gold.contains_question(&a.id) {
            return Err(EvalError::MissingGold(a.id.clone()));
        }
        if !a.attempted {
            continue;
        }
        attempted += 1;
        if let Some(rank) = a.answers.iter().position(|e| gold.is_correct(&a.id, &e.entity)) {
            rr += 1.0 / (rank + 1) as f64;
            if rank < TOP {
                top3 += 1;
            }
        }
    }
    let total = answers.len();
    let frac = |n: f64, d: usize| if d == 0 { 0.0 } else { n / d as f64 };
    Ok(QaEvalReport {
        acc_at_3: frac(top3 as f64, attempted),
        mrr: frac(rr, attempted),
        recall: frac(top3 as f64, total),
        attempted,
        total,
    })
}

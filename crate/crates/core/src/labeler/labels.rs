use serde::{Deserialize, Serialize};

use crate::corpus::TagLabel;

/// The labels a model predicts, in canonical order, always starting with
/// `other`. Labels outside the set are projected onto `other`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TagLabel>", into = "Vec<TagLabel>")]
pub struct LabelSet {
    labels: Vec<TagLabel>,
}

impl LabelSet {
    pub fn new(labels: impl IntoIterator<Item = TagLabel>) -> Self {
        let mut v: Vec<TagLabel> = labels.into_iter().collect();
        v.push(TagLabel::Other);
        v.sort();
        v.dedup();
        LabelSet { labels: v }
    }

    /// {other, x.type, x.attribute, x.location}.
    pub fn default_subset() -> Self {
        LabelSet::new([TagLabel::Type, TagLabel::Attribute, TagLabel::Location])
    }

    pub fn full() -> Self {
        LabelSet::new(TagLabel::ALL)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[TagLabel] {
        &self.labels
    }

    pub fn index_of(&self, l: TagLabel) -> Option<usize> {
        self.labels.iter().position(|&x| x == l)
    }

    pub fn project(&self, l: TagLabel) -> usize {
        self.index_of(l).unwrap_or(0)
    }

    pub fn label(&self, i: usize) -> TagLabel {
        self.labels[i]
    }

    pub fn project_sequence(&self, labels: &[TagLabel]) -> Vec<TagLabel> {
        labels.iter().map(|&l| self.label(self.project(l))).collect()
    }
}

impl TryFrom<Vec<TagLabel>> for LabelSet {
    type Error = String;

    fn try_from(v: Vec<TagLabel>) -> Result<Self, String> {
        let set = LabelSet::new(v.iter().copied());
        if set.labels != v {
            return Err(format!("label set {v:?} is not canonical (expected {:?})", set.labels));
        }
        Ok(set)
    }
}

impl From<LabelSet> for Vec<TagLabel> {
    fn from(s: LabelSet) -> Self {
        s.labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_and_projects_to_other() {
        let s = LabelSet::new([TagLabel::Location, TagLabel::Type]);
        assert_eq!(s.labels(), &[TagLabel::Other, TagLabel::Type, TagLabel::Location]);
        assert_eq!(s.project(TagLabel::Sibling), 0);
        assert_eq!(LabelSet::default_subset().len(), 4);
        assert_eq!(LabelSet::full().len(), 7);
    }
}

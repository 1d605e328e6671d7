use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemanticLabel {
    /// The answer entity itself; used for sibling-entity clauses.
    #[serde(rename = "x")]
    X,
    #[serde(rename = "x.type")]
    Type,
    #[serde(rename = "x.attribute")]
    Attribute,
    #[serde(rename = "x.location")]
    Location,
    #[serde(rename = "user.attribute")]
    UserAttribute,
    #[serde(rename = "user.location")]
    UserLocation,
}

impl SemanticLabel {
    pub const ALL: [SemanticLabel; 6] = [
        SemanticLabel::X,
        SemanticLabel::Type,
        SemanticLabel::Attribute,
        SemanticLabel::Location,
        SemanticLabel::UserAttribute,
        SemanticLabel::UserLocation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemanticLabel::X => "x",
            SemanticLabel::Type => "x.type",
            SemanticLabel::Attribute => "x.attribute",
            SemanticLabel::Location => "x.location",
            SemanticLabel::UserAttribute => "user.attribute",
            SemanticLabel::UserLocation => "user.location",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "x" => SemanticLabel::X,
            "x.type" => SemanticLabel::Type,
            "x.attribute" | "x.attr" => SemanticLabel::Attribute,
            "x.location" | "x.loc" => SemanticLabel::Location,
            "user.attribute" | "user.attr" => SemanticLabel::UserAttribute,
            "user.location" | "user.loc" => SemanticLabel::UserLocation,
            _ => return None,
        })
    }
}

impl fmt::Display for SemanticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Clause operators. Plain equality is the empty chain; `Eq` exists for
/// completeness of the operator vocabulary and never appears in a
/// canonical chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Operator {
    Eq,
    Not,
    Pref,
    Near,
    InSet,
    InRange,
    Similar,
}

impl Operator {
    pub fn is_relation(self) -> bool {
        matches!(self, Operator::InSet | Operator::InRange)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Operator::Eq => "=",
            Operator::Not => "NOT",
            Operator::Pref => "PREF",
            Operator::Near => "NEAR",
            Operator::InSet | Operator::InRange => "in",
            Operator::Similar => "SIMILAR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhraseTerm {
    pub phrases: Vec<String>,
}

impl PhraseTerm {
    pub fn single(p: impl Into<String>) -> Self {
        PhraseTerm {
            phrases: vec![p.into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub label: SemanticLabel,
    #[serde(rename = "ops")]
    pub operators: Vec<Operator>,
    #[serde(rename = "phrases")]
    pub terminal: PhraseTerm,
}

impl Clause {
    pub fn eq(label: SemanticLabel, phrase: impl Into<String>) -> Self {
        Clause {
            label,
            operators: Vec::new(),
            terminal: PhraseTerm::single(phrase),
        }
    }

    pub fn with_ops(label: SemanticLabel, operators: Vec<Operator>, phrases: Vec<String>) -> Self {
        Clause {
            label,
            operators,
            terminal: PhraseTerm { phrases },
        }
    }

    pub fn has(&self, op: Operator) -> bool {
        self.operators.contains(&op)
    }

    pub fn phrase(&self) -> &str {
        self.terminal.phrases.first().map(String::as_str).unwrap_or("")
    }
}

/// Binary AND/OR structure whose leaves index into `RqlQuery::clauses`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connective {
    Leaf(usize),
    And(Box<Connective>, Box<Connective>),
    Or(Box<Connective>, Box<Connective>),
}

impl Connective {
    pub fn and(l: Connective, r: Connective) -> Self {
        Connective::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Connective, r: Connective) -> Self {
        Connective::Or(Box::new(l), Box::new(r))
    }

    /// Left-nested conjunction of leaves `range`.
    pub fn all_and(range: std::ops::Range<usize>) -> Option<Self> {
        Self::fold(range.map(Connective::Leaf), Connective::and)
    }

    pub fn fold(
        items: impl IntoIterator<Item = Connective>,
        join: fn(Connective, Connective) -> Connective,
    ) -> Option<Self> {
        items.into_iter().reduce(join)
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Connective::Leaf(i) => out.push(*i),
            Connective::And(l, r) | Connective::Or(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RqlQuery {
    pub clauses: Vec<Clause>,
    pub tree: Connective,
}

impl RqlQuery {
    /// Conjunction of all clauses. Panics if `clauses` is empty.
    pub fn conjunction(clauses: Vec<Clause>) -> Self {
        let tree = Connective::all_and(0..clauses.len()).expect("at least one clause");
        RqlQuery { clauses, tree }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("ast serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, serde_json::Error> {
        serde_json::from_value(v.clone())
    }

    pub fn clauses_with(&self, label: SemanticLabel) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(move |c| c.label == label)
    }
}

//! Rule-based operator handling: trigger detection, scope resolution,
//! composition and query assembly.

mod assemble;
mod compose;
mod detect;
mod lexicon;

use thiserror::Error;

pub use assemble::{assemble_rql, semantic_label, Assembly};
pub use compose::{compose_operators, ComposedUnit, Composition};
pub use detect::{detect_operators, token_distance, Detection, OperatorSpan, DEFAULT_WINDOW};
pub use lexicon::{
    expand_trigger_lexicon, Provenance, TriggerEntry, TriggerKind, TriggerLexicon, DEFAULT_EXPANSION_THRESHOLD,
    DEFAULT_LEXICON,
};

use crate::corpus::{Question, TagLabel};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("lexicon: {0}")]
    Lexicon(String),
    #[error("{labels} labels for {tokens} tokens")]
    LengthMismatch { tokens: usize, labels: usize },
    #[error("assembly: {0}")]
    Assembly(String),
    #[error("assembled query is invalid: {0}")]
    InvalidQuery(String),
}

/// Detect, compose and assemble in one step.
pub fn labels_to_rql(
    question: &Question,
    labels: &[TagLabel],
    lexicon: &TriggerLexicon,
    window: usize,
) -> Result<Assembly, OperatorError> {
    let detection = detect_operators(question, labels, lexicon, window)?;
    assemble_rql(question, &compose_operators(&detection))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::question_from_text;
    use crate::rql::{parse_rql, render_rql, Operator};
    use TagLabel::*;

    fn rql(text: &str, labels: &[TagLabel]) -> Assembly {
        let q = question_from_text("q", text, None);
        labels_to_rql(&q, labels, &TriggerLexicon::default_seeds(), DEFAULT_WINDOW).unwrap()
    }

    #[test]
    fn plain_conjunction() {
        let a = rql("a sedan , diesel version", &[Other, Type, Other, Attribute, Attribute]);
        assert_eq!(
            render_rql(&a.query),
            r#"select x where x.type="sedan" & x.attribute="diesel version""#
        );
    }

    #[test]
    fn pref_not_sibling_set() {
        let a = rql(
            "preferably not Red Hoods or Royals",
            &[Other, Other, Sibling, Sibling, Other, Sibling],
        );
        assert_eq!(a.query.clauses.len(), 1);
        let c = &a.query.clauses[0];
        assert_eq!(c.operators, vec![Operator::Pref, Operator::Not, Operator::InSet]);
        assert_eq!(c.terminal.phrases, vec!["Red Hoods", "Royals"]);
        assert_eq!(
            render_rql(&a.query),
            r#"select x where x PREF NOT in {"Red Hoods","Royals"}"#
        );
    }

    #[test]
    fn negated_disjunction_becomes_conjunction() {
        let a = rql("not noisy or smoky", &[Other, Attribute, Other, Attribute]);
        assert_eq!(
            render_rql(&a.query),
            r#"select x where x.attribute NOT = "noisy" & x.attribute NOT = "smoky""#
        );
        let b = rql("spa or pool", &[Attribute, Other, Attribute]);
        assert_eq!(
            render_rql(&b.query),
            r#"select x where x.attribute="spa" | x.attribute="pool""#
        );
    }

    #[test]
    fn near_location_and_dropped_near() {
        let a = rql("hotel near Salzburg", &[Type, Other, Location]);
        assert_eq!(
            render_rql(&a.query),
            r#"select x where x.type="hotel" & x.location NEAR "Salzburg""#
        );
        assert!(a.warnings.is_empty());
        let b = rql("hotel near the beach", &[Type, Other, Other, Attribute]);
        assert_eq!(
            render_rql(&b.query),
            r#"select x where x.type="hotel" & x.attribute="beach""#
        );
        assert_eq!(b.warnings.len(), 1);
    }

    #[test]
    fn assembled_queries_round_trip() {
        let a = rql(
            "hotel with spa or pool , not noisy near Salzburg",
            &[
                Type, Other, Attribute, Other, Attribute, Other, Other, Attribute, Other, Location,
            ],
        );
        assert_eq!(parse_rql(&render_rql(&a.query)).unwrap(), a.query);
    }

    #[test]
    fn empty_segments_fail() {
        let q = question_from_text("q", "hello there", None);
        let err = labels_to_rql(&q, &[Other, Other], &TriggerLexicon::default_seeds(), 4).unwrap_err();
        assert_eq!(err.to_string(), "assembly: no labeled content");
    }
}

use super::compose::{ComposedUnit, Composition};
use super::OperatorError;
use crate::corpus::{Question, TagLabel};
use crate::rql::{validate_query, Clause, Connective, Operator, RqlQuery, SemanticLabel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    pub query: RqlQuery,
    pub warnings: Vec<String>,
}

pub fn semantic_label(label: TagLabel) -> Option<SemanticLabel> {
    Some(match label {
        TagLabel::Other => return None,
        TagLabel::Type => SemanticLabel::Type,
        TagLabel::Attribute => SemanticLabel::Attribute,
        TagLabel::Location => SemanticLabel::Location,
        TagLabel::Sibling => SemanticLabel::X,
        TagLabel::UserAttribute => SemanticLabel::UserAttribute,
        TagLabel::UserLocation => SemanticLabel::UserLocation,
    })
}

/// Builds the query: one clause per composed unit, joined by AND, with
/// disjunctions kept as OR subtrees.
pub fn assemble_rql(question: &Question, composition: &Composition) -> Result<Assembly, OperatorError> {
    let segs = &composition.segments;
    if segs.is_empty() || composition.units.is_empty() {
        return Err(OperatorError::Assembly("no labeled content".into()));
    }
    let mut warnings = Vec::new();
    let mut clauses = Vec::new();
    let make = |seg_ids: &[usize], chain: &[Operator], warnings: &mut Vec<String>| -> Clause {
        let first = segs[seg_ids[0]];
        let label = semantic_label(first.label).expect("segments are never `other`");
        let mut chain = chain.to_vec();
        if chain.contains(&Operator::Near) && label != SemanticLabel::Location {
            let text = question.span_text(first.start, first.end);
            warnings.push(format!("NEAR dropped from {} \"{text}\"", label.as_str()));
            chain.retain(|&o| o != Operator::Near);
        }
        let phrases = seg_ids
            .iter()
            .map(|&s| question.span_text(segs[s].start, segs[s].end))
            .collect();
        Clause::with_ops(label, chain, phrases)
    };

    let mut parts = Vec::new();
    for unit in &composition.units {
        match unit {
            ComposedUnit::Clause { segments, chain } => {
                clauses.push(make(segments, chain, &mut warnings));
                parts.push(Connective::Leaf(clauses.len() - 1));
            }
            ComposedUnit::Disjunction(alts) => {
                let leaves: Vec<Connective> = alts
                    .iter()
                    .map(|(s, chain)| {
                        clauses.push(make(&[*s], chain, &mut warnings));
                        Connective::Leaf(clauses.len() - 1)
                    })
                    .collect();
                parts.push(Connective::fold(leaves, Connective::or).expect("non-empty disjunction"));
            }
        }
    }
    let tree = Connective::fold(parts, Connective::and).expect("non-empty units");
    let query = RqlQuery { clauses, tree };
    let violations = validate_query(&query);
    if let Some(v) = violations.first() {
        return Err(OperatorError::InvalidQuery(v.to_string()));
    }
    for w in &warnings {
        log::warn!("{}: {w}", question.id);
    }
    Ok(Assembly { query, warnings })
}

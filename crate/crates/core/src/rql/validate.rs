use std::fmt;

use super::ast::{Operator, RqlQuery, SemanticLabel};

pub const MAX_CHAIN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoClauses,
    TreeLeaves { expected: usize, found: Vec<usize> },
    NearWithoutLocation { clause: usize },
    ChainTooLong { clause: usize, len: usize },
    RelationNotLast { clause: usize },
    ExplicitEq { clause: usize },
    RepeatedOperator { clause: usize, op: Operator },
    RangeArity { clause: usize, found: usize },
    EmptySet { clause: usize },
    PhraseArity { clause: usize, found: usize },
    EmptyPhrase { clause: usize },
    BareXOperator { clause: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoClauses => write!(f, "query has no clauses"),
            Violation::TreeLeaves { expected, found } => {
                write!(
                    f,
                    "connective tree leaves {found:?} do not enumerate clauses 0..{expected} in order"
                )
            }
            Violation::NearWithoutLocation { clause } => write!(f, "clause {clause}: NEAR requires x.location"),
            Violation::ChainTooLong { clause, len } => {
                write!(f, "clause {clause}: operator chain of length {len} exceeds {MAX_CHAIN}")
            }
            Violation::RelationNotLast { clause } => {
                write!(f, "clause {clause}: set/range must end the operator chain")
            }
            Violation::ExplicitEq { clause } => {
                write!(f, "clause {clause}: EQ is implicit and must not appear in a chain")
            }
            Violation::RepeatedOperator { clause, op } => write!(f, "clause {clause}: operator {op:?} repeated"),
            Violation::RangeArity { clause, found } => {
                write!(f, "clause {clause}: range needs exactly two endpoints, found {found}")
            }
            Violation::EmptySet { clause } => write!(f, "clause {clause}: set needs at least one member"),
            Violation::PhraseArity { clause, found } => {
                write!(f, "clause {clause}: expected one phrase, found {found}")
            }
            Violation::EmptyPhrase { clause } => write!(f, "clause {clause}: empty phrase"),
            Violation::BareXOperator { clause } => {
                write!(
                    f,
                    "clause {clause}: bare x supports only equality, SIMILAR or set membership"
                )
            }
        }
    }
}

/// Every structural violation in `q`; an empty list means the query is valid.
pub fn validate_query(q: &RqlQuery) -> Vec<Violation> {
    let mut out = Vec::new();
    if q.clauses.is_empty() {
        out.push(Violation::NoClauses);
    }
    let leaves = q.tree.leaves();
    if leaves != (0..q.clauses.len()).collect::<Vec<_>>() {
        out.push(Violation::TreeLeaves {
            expected: q.clauses.len(),
            found: leaves,
        });
    }
    for (i, c) in q.clauses.iter().enumerate() {
        let ops = &c.operators;
        if c.has(Operator::Near) && c.label != SemanticLabel::Location {
            out.push(Violation::NearWithoutLocation { clause: i });
        }
        if ops.len() > MAX_CHAIN {
            out.push(Violation::ChainTooLong {
                clause: i,
                len: ops.len(),
            });
        }
        if ops
            .iter()
            .enumerate()
            .any(|(j, o)| o.is_relation() && j + 1 != ops.len())
        {
            out.push(Violation::RelationNotLast { clause: i });
        }
        if c.has(Operator::Eq) {
            out.push(Violation::ExplicitEq { clause: i });
        }
        for (j, o) in ops.iter().enumerate() {
            if ops[..j].contains(o) || (o.is_relation() && ops[..j].iter().any(|p| p.is_relation())) {
                out.push(Violation::RepeatedOperator { clause: i, op: *o });
            }
        }
        let n = c.terminal.phrases.len();
        match ops.last() {
            Some(Operator::InRange) => {
                if n != 2 {
                    out.push(Violation::RangeArity { clause: i, found: n });
                }
            }
            Some(Operator::InSet) => {
                if n == 0 {
                    out.push(Violation::EmptySet { clause: i });
                }
            }
            _ => {
                if n != 1 {
                    out.push(Violation::PhraseArity { clause: i, found: n });
                }
            }
        }
        if c.terminal.phrases.iter().any(|p| p.trim().is_empty()) {
            out.push(Violation::EmptyPhrase { clause: i });
        }
        if c.label == SemanticLabel::X && (c.has(Operator::InRange) || c.has(Operator::Near)) {
            out.push(Violation::BareXOperator { clause: i });
        }
    }
    out
}

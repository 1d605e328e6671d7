use std::collections::BTreeMap;

use super::detect::Detection;
use super::lexicon::TriggerKind;
use crate::corpus::{Segment, TagLabel};
use crate::rql::{Operator, MAX_CHAIN};

/// One conjunct of the composed query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComposedUnit {
    /// A single clause over one segment, or an `IN` set over several.
    Clause { segments: Vec<usize>, chain: Vec<Operator> },
    /// Alternatives joined by OR, each with its own chain.
    Disjunction(Vec<(usize, Vec<Operator>)>),
}

impl ComposedUnit {
    pub fn segments(&self) -> Vec<usize> {
        match self {
            ComposedUnit::Clause { segments, .. } => segments.clone(),
            ComposedUnit::Disjunction(alts) => alts.iter().map(|(s, _)| *s).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    pub segments: Vec<Segment>,
    pub units: Vec<ComposedUnit>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Flags {
    not: bool,
    pref: bool,
    near: bool,
}

fn chain(f: Flags, relation: Option<Operator>) -> Vec<Operator> {
    let mut c = Vec::new();
    if f.pref {
        c.push(Operator::Pref);
    }
    if f.not {
        c.push(Operator::Not);
    }
    if f.near && relation.is_none() {
        c.push(Operator::Near);
    }
    c.extend(relation);
    debug_assert!(c.len() <= MAX_CHAIN);
    c
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Turns detected operator spans into per-segment operator chains.
///
/// OR spans merge segments into groups. NOT and PREF on any member spread
/// to the whole group, and a negated group becomes a conjunction of negated
/// clauses. A group made only of sibling entities collapses into one `IN`
/// set clause. Chains are ordered PREF, NOT, NEAR, relation.
pub fn compose_operators(detection: &Detection) -> Composition {
    let segs = &detection.segments;
    let n = segs.len();
    let mut flags = vec![Flags::default(); n];
    let mut parent: Vec<usize> = (0..n).collect();
    for span in &detection.spans {
        match span.kind {
            TriggerKind::Or => {
                for w in span.scope.windows(2) {
                    let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    parent[a.max(b)] = a.min(b);
                }
            }
            kind => {
                for &s in &span.scope {
                    match kind {
                        TriggerKind::Not => flags[s].not = true,
                        TriggerKind::Pref => flags[s].pref = true,
                        TriggerKind::Near => flags[s].near = true,
                        TriggerKind::Or => unreachable!(),
                    }
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for s in 0..n {
        let root = find(&mut parent, s);
        groups.entry(root).or_default().push(s);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    groups.sort_by_key(|g| g[0]);

    let mut units = Vec::new();
    for members in groups {
        let mut f = Flags::default();
        for &m in &members {
            f.not |= flags[m].not;
            f.pref |= flags[m].pref;
        }
        let one = |m: usize, f: Flags| {
            let mut f = Flags {
                near: flags[m].near,
                ..f
            };
            if segs[m].label == TagLabel::Sibling {
                f.near = false;
            }
            chain(f, None)
        };
        if members.len() == 1 {
            let m = members[0];
            units.push(ComposedUnit::Clause {
                segments: members,
                chain: one(m, flags[m]),
            });
        } else if members.iter().all(|&m| segs[m].label == TagLabel::Sibling) {
            units.push(ComposedUnit::Clause {
                segments: members,
                chain: chain(Flags { near: false, ..f }, Some(Operator::InSet)),
            });
        } else if f.not {
            for m in members {
                units.push(ComposedUnit::Clause {
                    segments: vec![m],
                    chain: one(m, f),
                });
            }
        } else {
            units.push(ComposedUnit::Disjunction(
                members.iter().map(|&m| (m, one(m, f))).collect(),
            ));
        }
    }
    Composition {
        segments: segs.clone(),
        units,
    }
}

use serde::Serialize;

use super::{QaContext, QaError};
use crate::corpus::QuestionMetadata;
use crate::index::{geo_within, resolve_type, BooleanQuery, EntityIndex};
use crate::rql::{Connective, Operator, RqlQuery, SemanticLabel};

/// Two-stage location plan: cities around the resolved centre become the
/// city filter of the second stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearPlan {
    pub phrase: String,
    pub center: (f64, f64),
    pub radius_km: f64,
    /// Stage-1 output, nearest first.
    pub cities: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledQuery {
    pub type_filter: Option<String>,
    pub type_terms: Vec<String>,
    pub attributes: Vec<Vec<String>>,
    pub excluded: Vec<Vec<String>>,
    pub city_filter: Option<Vec<String>>,
    pub near: Option<NearPlan>,
    pub warnings: Vec<String>,
}

pub const MAX_BACKOFF: u8 = 2;

impl CompiledQuery {
    /// The boolean query issued at back-off `level` (0 strict, 1 attributes
    /// relaxed to SHOULD, 2 attributes dropped). `None` when the level adds
    /// nothing or cannot be expressed.
    pub fn at_level(&self, level: u8) -> Option<BooleanQuery> {
        let type_group = Some(self.type_terms.clone()).filter(|g| !g.is_empty());
        let base = BooleanQuery {
            type_filter: self.type_filter.clone(),
            city_filter: self.city_filter.clone(),
            ..Default::default()
        };
        let q = match level {
            0 => BooleanQuery {
                must: self.attributes.clone(),
                should: type_group.into_iter().collect(),
                must_not: self.excluded.clone(),
                ..base
            },
            1 if !self.attributes.is_empty() => BooleanQuery {
                should: self.attributes.iter().cloned().chain(type_group).collect(),
                must_not: self.excluded.clone(),
                min_should_match: Some(1),
                ..base
            },
            2 if !self.attributes.is_empty() || !self.excluded.is_empty() => BooleanQuery {
                should: type_group.into_iter().collect(),
                min_should_match: Some(0),
                ..base
            },
            _ => return None,
        };
        if q.must.is_empty() && q.should.is_empty() && q.must_not.is_empty() && !q.has_filters() {
            return None;
        }
        Some(q)
    }
}

/// Top-level conjuncts of the connective tree.
fn conjuncts(tree: &Connective) -> Vec<&Connective> {
    match tree {
        Connective::And(l, r) => {
            let mut out = conjuncts(l);
            out.extend(conjuncts(r));
            out
        }
        other => vec![other],
    }
}

/// Translates a query into retrieval terms and filters.
///
/// The first type clause picks the kb_type filter, and the terms of every
/// type phrase form one SHOULD group. Each attribute clause is a MUST group;
/// an OR of attribute clauses is a single MUST group over all their terms.
/// NOT attributes become MUST_NOT groups. PREF is ignored. Location
/// clauses give the city filter (falling back to the question's city),
/// and a NEAR location yields a two-stage plan.
pub fn compile_query(
    rql: &RqlQuery,
    metadata: &QuestionMetadata,
    index: &EntityIndex,
    ctx: &QaContext,
) -> Result<CompiledQuery, QaError> {
    let mut out = CompiledQuery {
        type_filter: None,
        type_terms: Vec::new(),
        attributes: Vec::new(),
        excluded: Vec::new(),
        city_filter: None,
        near: None,
        warnings: Vec::new(),
    };
    let terms_of = |phrases: &[String]| -> Vec<String> {
        let mut t: Vec<String> = Vec::new();
        for p in phrases {
            for w in index.analyze(p) {
                if !t.contains(&w) {
                    t.push(w);
                }
            }
        }
        t
    };

    let has_type = rql.clauses_with(SemanticLabel::Type).next().is_some();
    let has_attr = rql.clauses_with(SemanticLabel::Attribute).next().is_some();
    if !has_type && !has_attr {
        return Err(QaError::Compile("query has no x.type and no x.attribute clause".into()));
    }
    if let Some(first) = rql.clauses_with(SemanticLabel::Type).find(|c| !c.has(Operator::Not)) {
        out.type_filter = Some(resolve_type(
            first.phrase(),
            &index.kb_types(),
            &ctx.vectors,
            &ctx.aliases,
        ));
    }
    for c in rql.clauses_with(SemanticLabel::Type).filter(|c| !c.has(Operator::Not)) {
        for t in terms_of(&c.terminal.phrases) {
            if !out.type_terms.contains(&t) {
                out.type_terms.push(t);
            }
        }
    }

    for part in conjuncts(&rql.tree) {
        let leaves = part.leaves();
        let attrs: Vec<usize> = leaves
            .iter()
            .copied()
            .filter(|&i| rql.clauses[i].label == SemanticLabel::Attribute)
            .collect();
        if attrs.is_empty() {
            continue;
        }
        if leaves.len() == 1 {
            let c = &rql.clauses[attrs[0]];
            if c.has(Operator::Not) {
                // NOT IN {a, b}: each member is excluded on its own.
                for p in &c.terminal.phrases {
                    let g = terms_of(std::slice::from_ref(p));
                    if !g.is_empty() {
                        out.excluded.push(g);
                    }
                }
            } else {
                let g = terms_of(&c.terminal.phrases);
                if !g.is_empty() {
                    out.attributes.push(g);
                }
            }
        } else {
            let mut phrases = Vec::new();
            for &i in &attrs {
                let c = &rql.clauses[i];
                if c.has(Operator::Not) {
                    out.warnings
                        .push(format!("negated alternative \"{}\" ignored", c.phrase()));
                } else {
                    phrases.extend(c.terminal.phrases.iter().cloned());
                }
            }
            let g = terms_of(&phrases);
            if !g.is_empty() {
                out.attributes.push(g);
            }
        }
    }

    let locations: Vec<_> = rql
        .clauses_with(SemanticLabel::Location)
        .filter(|c| !c.has(Operator::Not))
        .collect();
    if let Some(near) = locations.iter().find(|c| c.has(Operator::Near)) {
        let phrase = near.phrase().to_string();
        let anchor = index.find_city(&phrase).or_else(|| {
            let want = phrase.to_lowercase();
            index.records().iter().find(|r| r.name.to_lowercase() == want)
        });
        match anchor {
            Some(r) => {
                let cities: Vec<(String, f64)> = geo_within(index, r.lat, r.lon, ctx.near_radius_km, Some("city"))
                    .into_iter()
                    .map(|(id, d)| (index.record(id).expect("indexed").name.clone(), d))
                    .collect();
                out.city_filter = Some(cities.iter().map(|(n, _)| n.clone()).collect());
                out.near = Some(NearPlan {
                    phrase,
                    center: (r.lat, r.lon),
                    radius_km: ctx.near_radius_km,
                    cities,
                });
            }
            None => {
                out.warnings
                    .push(format!("NEAR \"{phrase}\" unresolved; using it as a city filter"));
                out.city_filter = Some(vec![phrase]);
            }
        }
    } else if !locations.is_empty() {
        out.city_filter = Some(
            locations
                .iter()
                .flat_map(|c| c.terminal.phrases.iter().cloned())
                .collect(),
        );
    } else if let Some(city) = &metadata.city {
        out.city_filter = Some(vec![city.clone()]);
    }
    for w in &out.warnings {
        log::warn!("{w}");
    }
    Ok(out)
}

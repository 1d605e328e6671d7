use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{EntityIndex, IndexError};

/// Boolean retrieval request. Each group is a list of analyzed terms and
/// matches a document when any of its terms occurs there.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BooleanQuery {
    pub must: Vec<Vec<String>>,
    pub should: Vec<Vec<String>>,
    pub must_not: Vec<Vec<String>>,
    pub type_filter: Option<String>,
    /// Any-of, case-insensitive.
    pub city_filter: Option<Vec<String>>,
    /// Minimum number of SHOULD groups a hit must match. Defaults to 1 when
    /// the query has neither MUST groups nor filters, otherwise 0.
    pub min_should_match: Option<usize>,
}

impl BooleanQuery {
    fn groups(g: &[Vec<String>]) -> impl Iterator<Item = &Vec<String>> {
        g.iter().filter(|g| !g.is_empty())
    }

    pub fn has_filters(&self) -> bool {
        self.type_filter.is_some() || self.city_filter.is_some()
    }

    pub fn effective_min_should(&self) -> usize {
        self.min_should_match.unwrap_or_else(|| {
            if Self::groups(&self.must).next().is_none() && !self.has_filters() {
                1
            } else {
                0
            }
        })
    }

    fn is_empty(&self) -> bool {
        Self::groups(&self.must).next().is_none()
            && Self::groups(&self.should).next().is_none()
            && Self::groups(&self.must_not).next().is_none()
            && !self.has_filters()
    }

    /// Distinct scoring terms from MUST and SHOULD groups, sorted.
    pub fn scoring_terms(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self
            .must
            .iter()
            .chain(&self.should)
            .flatten()
            .map(String::as_str)
            .collect();
        set.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub id: String,
    pub score: f64,
}

/// Ranks documents passing every MUST group, no MUST_NOT group, the filters
/// and the SHOULD threshold by Σ ln(1+tf)·idf over matched query terms.
/// Ties go to the smaller id; at most `k` hits are returned.
pub fn boolean_search(index: &EntityIndex, query: &BooleanQuery, k: usize) -> Result<Vec<Hit>, IndexError> {
    if query.is_empty() {
        return Err(IndexError::EmptyQuery);
    }
    let group_hit = |g: &Vec<String>, d: usize| g.iter().any(|t| index.tf(t, d) > 0);
    let cities: Option<Vec<String>> = query
        .city_filter
        .as_ref()
        .map(|c| c.iter().map(|s| s.to_lowercase()).collect());
    let need_should = query.effective_min_should();
    let terms = query.scoring_terms();

    let base: Vec<usize> = match &query.type_filter {
        Some(t) => index.docs_of_type(t).iter().map(|&d| d as usize).collect(),
        None => (0..index.len()).collect(),
    };
    let mut hits = Vec::new();
    for d in base {
        let r = &index.records()[d];
        if let Some(c) = &cities {
            if !c.contains(&r.city.to_lowercase()) {
                continue;
            }
        }
        if !BooleanQuery::groups(&query.must).all(|g| group_hit(g, d)) {
            continue;
        }
        if BooleanQuery::groups(&query.must_not).any(|g| group_hit(g, d)) {
            continue;
        }
        if BooleanQuery::groups(&query.should).filter(|g| group_hit(g, d)).count() < need_should {
            continue;
        }
        let score: f64 = terms
            .iter()
            .map(|t| (index.tf(t, d), t))
            .filter(|(tf, _)| *tf > 0)
            .map(|(tf, t)| (1.0 + tf as f64).ln() * index.idf(t))
            .sum();
        hits.push(Hit {
            id: r.id.clone(),
            score,
        });
    }
    hits.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    hits.truncate(k);
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::super::tests::rec;
    use super::super::{build_index, StopWords};
    use super::*;

    fn g(t: &[&str]) -> Vec<String> {
        t.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn must_mustnot_type() {
        let idx = build_index(
            &[
                rec("h1", "lodging", "A", "spa pool"),
                rec("h2", "lodging", "A", "spa hostel"),
                rec("h3", "lodging", "B", "garden"),
                rec("r1", "restaurant", "A", "spa"),
            ],
            &StopWords::none(),
        )
        .unwrap();
        let q = BooleanQuery {
            must: vec![g(&["spa"])],
            must_not: vec![g(&["hostel"])],
            type_filter: Some("lodging".into()),
            ..Default::default()
        };
        let hits = boolean_search(&idx, &q, 10).unwrap();
        assert_eq!(hits.iter().map(|h| h.id.as_str()).collect::<Vec<_>>(), vec!["h1"]);

        let should = BooleanQuery {
            should: vec![g(&["sauna"])],
            ..Default::default()
        };
        assert!(boolean_search(&idx, &should, 10).unwrap().is_empty());
        assert!(matches!(
            boolean_search(&idx, &BooleanQuery::default(), 3),
            Err(IndexError::EmptyQuery)
        ));

        let city = BooleanQuery {
            city_filter: Some(vec!["b".into()]),
            ..Default::default()
        };
        assert_eq!(boolean_search(&idx, &city, 10).unwrap()[0].id, "h3");
    }
}

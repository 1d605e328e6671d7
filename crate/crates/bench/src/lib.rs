//! Deterministic fixtures shared by the benchmarks.

use msrq_core::corpus::{question_from_text, Question, TagLabel};
use msrq_core::index::{BooleanQuery, EntityRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OTHER: [&str; 12] = [
    "we", "are", "looking", "for", "a", "with", "and", "it", "should", "have", "my", "family",
];
const TYPES: [&str; 4] = ["hotel", "restaurant", "hostel", "museum"];
const ATTRS: [&str; 8] = [
    "spa",
    "pool",
    "quiet",
    "cheap",
    "view",
    "garden",
    "parking",
    "breakfast",
];
const CITIES: [&str; 4] = ["Vienna", "Salzburg", "Graz", "Linz"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Forum-style posts of a few sentences, labeled by word class.
pub fn labeled_questions(seed: u64, n: usize) -> Vec<(Question, Vec<TagLabel>)> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let mut text = String::new();
            for _ in 0..r.gen_range(1..4) {
                let len = r.gen_range(4..12);
                let words: Vec<&str> = (0..len)
                    .map(|_| match r.gen_range(0..10) {
                        0 => *TYPES.choose(&mut r).unwrap(),
                        1 | 2 => *ATTRS.choose(&mut r).unwrap(),
                        3 => *CITIES.choose(&mut r).unwrap(),
                        _ => *OTHER.choose(&mut r).unwrap(),
                    })
                    .collect();
                text += &words.join(" ");
                text += ". ";
            }
            let q = question_from_text(&format!("b{i}"), &text, None);
            let labels = q.tokens.iter().map(|t| label_of(&t.text)).collect();
            (q, labels)
        })
        .collect()
}

fn label_of(word: &str) -> TagLabel {
    if TYPES.contains(&word) {
        TagLabel::Type
    } else if ATTRS.contains(&word) {
        TagLabel::Attribute
    } else if CITIES.contains(&word) {
        TagLabel::Location
    } else {
        TagLabel::Other
    }
}

pub fn entities(seed: u64, n: usize) -> Vec<EntityRecord> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let text: Vec<&str> = (0..r.gen_range(3..15))
                .map(|_| *ATTRS.choose(&mut r).unwrap())
                .collect();
            EntityRecord {
                id: format!("e{i:06}"),
                name: format!("{} {i}", TYPES.choose(&mut r).unwrap()),
                kb_type: ["lodging", "restaurant", "point_of_interest"]
                    .choose(&mut r)
                    .unwrap()
                    .to_string(),
                city: CITIES.choose(&mut r).unwrap().to_string(),
                lat: r.gen_range(46.0..49.0),
                lon: r.gen_range(9.5..17.0),
                rating: None,
                text: text.join(" "),
            }
        })
        .collect()
}

pub fn boolean_queries(seed: u64, n: usize) -> Vec<BooleanQuery> {
    let mut r = rng(seed);
    let group = |r: &mut ChaCha8Rng| vec![ATTRS.choose(r).unwrap().to_string()];
    (0..n)
        .map(|_| BooleanQuery {
            must: (0..r.gen_range(1..3)).map(|_| group(&mut r)).collect(),
            should: vec![vec!["hotel".into(), "hostel".into()]],
            must_not: (0..r.gen_range(0..2)).map(|_| group(&mut r)).collect(),
            type_filter: Some("lodging".into()),
            city_filter: r
                .gen_bool(0.5)
                .then(|| vec![CITIES.choose(&mut r).unwrap().to_string()]),
            min_should_match: None,
        })
        .collect()
}

pub const RQL_QUERIES: [&str; 4] = [
    r#"select x where x.type="sedan" & x.attribute="diesel version" & x.attribute="nothing too fancy""#,
    r#"select x where x.type="hotel" & (x.attribute="pool" | x.attribute="garden") & x.location NEAR "Innsbruck""#,
    r#"select x where x PREF NOT in {"Red Hoods","Royals"}"#,
    r#"select x where x.type="washing machine" & x.attribute="7.5 Kg",x NOT SIMILAR "Miele""#,
];

mod common;

use common::*;
use msrq_core::corpus::TagLabel;
use msrq_core::operators::{
    detect_operators, labels_to_rql, token_distance, OperatorError, TriggerLexicon, DEFAULT_WINDOW,
};
use msrq_core::rql::{parse_rql, render_rql, validate_query};
use proptest::prelude::*;
use rand::Rng;

const TRIGGERS: [&str; 8] = ["not", "or", "prefer", "near", "without", "either", "ideally", "close"];
const CONTENT: [&str; 8] = ["hotel", "pool", "spa", "vienna", "cheap", "quiet", "pub", "view"];

/// Random post mixing trigger words and labeled content across sentences.
fn random_post(seed: u64) -> (msrq_core::Question, Vec<TagLabel>) {
    let mut r = rng(seed);
    let n = r.gen_range(1..16);
    let mut words = Vec::new();
    let mut labels = Vec::new();
    let mut sent = vec![0usize; n];
    for i in 0..n {
        if i > 0 {
            sent[i] = sent[i - 1] + r.gen_bool(0.15) as usize;
        }
        if r.gen_bool(0.3) {
            words.push(TRIGGERS[r.gen_range(0..TRIGGERS.len())].to_string());
            labels.push(TagLabel::Other);
        } else {
            words.push(CONTENT[r.gen_range(0..CONTENT.len())].to_string());
            labels.push(TagLabel::ALL[r.gen_range(0..TagLabel::ALL.len())]);
        }
    }
    (question("q", &words, &sent), labels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn assembled_queries_are_valid_and_round_trip(seed in any::<u64>()) {
        let (q, labels) = random_post(seed);
        let lex = TriggerLexicon::default_seeds();
        match labels_to_rql(&q, &labels, &lex, DEFAULT_WINDOW) {
            Ok(a) => {
                prop_assert!(validate_query(&a.query).is_empty(), "{:?}", validate_query(&a.query));
                let text = render_rql(&a.query);
                prop_assert_eq!(parse_rql(&text).unwrap(), a.query.clone());
                prop_assert_eq!(labels_to_rql(&q, &labels, &lex, DEFAULT_WINDOW).unwrap().query, a.query);
            }
            Err(OperatorError::Assembly(_)) => {
                prop_assert!(labels.iter().all(|&l| l == TagLabel::Other));
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn spans_respect_window_and_sentences(seed in any::<u64>(), window in 1usize..6) {
        let (q, labels) = random_post(seed);
        let d = detect_operators(&q, &labels, &TriggerLexicon::default_seeds(), window).unwrap();
        for s in &d.spans {
            prop_assert!(labels[s.trigger_start..s.trigger_end].iter().all(|&l| l == TagLabel::Other));
            prop_assert!(s.scope.windows(2).all(|w| w[0] < w[1]));
            let sentence = q.tokens[s.trigger_start].sentence_idx;
            for &i in &s.scope {
                let seg = &d.segments[i];
                prop_assert!(token_distance((s.trigger_start, s.trigger_end), seg) <= window);
                prop_assert_eq!(q.tokens[seg.start].sentence_idx, sentence);
            }
        }
    }
}

#[test]
fn mismatched_lengths_are_rejected() {
    let (q, labels) = random_post(1);
    let r = labels_to_rql(
        &q,
        &labels[..labels.len() - 1],
        &TriggerLexicon::default_seeds(),
        DEFAULT_WINDOW,
    );
    assert!(matches!(r, Err(OperatorError::LengthMismatch { .. })));
}

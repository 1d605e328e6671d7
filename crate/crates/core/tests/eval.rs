mod common;

use common::*;
use msrq_core::corpus::TagLabel;
use msrq_core::eval::{qa_metrics, segment_prf, EvalError, QaGold, SegmentAccumulator, REPORT_LABELS};
use msrq_core::qa::RankedEntity;
use msrq_core::AnswerList;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Answer list whose gold entity sits at `rank` among six returned ids.
fn list(i: usize, rank: Option<usize>, attempted: bool) -> AnswerList {
    let answers = if attempted {
        (0..6)
            .map(|r| RankedEntity {
                entity: if Some(r) == rank {
                    format!("gold{i}")
                } else {
                    format!("miss{i}_{r}")
                },
                name: String::new(),
                score: 6.0 - r as f64,
            })
            .collect()
    } else {
        Vec::new()
    };
    AnswerList {
        id: format!("q{i}"),
        attempted,
        backoff: 0,
        answers,
    }
}

fn gold(n: usize) -> QaGold {
    let mut g = QaGold::new();
    for i in 0..n {
        g.insert(&format!("q{i}"), [format!("GOLD{i}")]);
    }
    g
}

#[test]
fn qa_metrics_on_ten_lists() {
    let ranks = [
        Some(0),
        Some(1),
        None,
        Some(2),
        Some(4),
        None,
        Some(0),
        None,
        None,
        Some(5),
    ];
    let attempted = [true, true, true, true, true, false, true, true, false, true];
    let lists: Vec<_> = (0..10).map(|i| list(i, ranks[i], attempted[i])).collect();
    let m = qa_metrics(&lists, &gold(10)).unwrap();
    assert_eq!((m.attempted, m.total), (8, 10));
    assert!(close(m.acc_at_3, 4.0 / 8.0));
    assert!(close(m.mrr, (1.0 + 0.5 + 1.0 / 3.0 + 0.2 + 1.0 + 1.0 / 6.0) / 8.0));
    assert!(close(m.recall, 4.0 / 10.0));
}

#[test]
fn aliases_count_as_correct() {
    let mut g = gold(1);
    g.add_alias("Gold Zero Hotel", "gold0");
    let mut a = list(0, None, true);
    a.answers[1].entity = "gold zero hotel".into();
    let m = qa_metrics(&[a], &g).unwrap();
    assert!(close(m.mrr, 0.5));
}

#[test]
fn unknown_question_is_an_error() {
    assert!(matches!(
        qa_metrics(&[list(3, Some(0), true)], &gold(1)),
        Err(EvalError::MissingGold(_))
    ));
}

#[test]
fn perfect_labels_score_one() {
    let mut r = rng(21);
    let hc = HiddenChain::generate(&mut r, 3);
    let mut acc = SegmentAccumulator::new(&REPORT_LABELS);
    for i in 0..30 {
        let (q, l) = hc.sequence(&mut r, &format!("q{i}"), 3, 12);
        acc.add(&q, &l, &l).unwrap();
    }
    let rep = acc.report();
    assert_eq!(rep.aggregate_f1, 1.0);
    assert!(rep.per_label.values().all(|p| p.precision == 1.0 && p.recall == 1.0));
}

/// (start, end, label) runs of non-other labels, split at sentence breaks.
fn runs(labels: &[TagLabel], sent: &[usize]) -> Vec<(usize, usize, TagLabel)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=labels.len() {
        if i == labels.len() || labels[i] != labels[start] || sent[i] != sent[start] {
            if labels[start] != TagLabel::Other {
                out.push((start, i, labels[start]));
            }
            start = i;
        }
    }
    out
}

fn oracle(data: &[(Vec<usize>, Vec<TagLabel>, Vec<TagLabel>)], label: TagLabel) -> (f64, f64) {
    let (mut ps, mut np, mut rs, mut ng) = (0.0, 0, 0.0, 0);
    let score = |a: &[(usize, usize, TagLabel)], b: &[(usize, usize, TagLabel)]| -> (f64, usize) {
        let mut sum = 0.0;
        for &(s, e, _) in a {
            let best = b
                .iter()
                .map(|&(t, f, _)| (s..e).filter(|x| (t..f).contains(x)).count())
                .max()
                .unwrap_or(0);
            sum += best as f64 / (e - s) as f64;
        }
        (sum, a.len())
    };
    for (sent, g, p) in data {
        let gr: Vec<_> = runs(g, sent).into_iter().filter(|r| r.2 == label).collect();
        let pr: Vec<_> = runs(p, sent).into_iter().filter(|r| r.2 == label).collect();
        let (a, b) = score(&pr, &gr);
        ps += a;
        np += b;
        let (a, b) = score(&gr, &pr);
        rs += a;
        ng += b;
    }
    match (ng, np) {
        (0, 0) => (1.0, 1.0),
        _ => (
            if np == 0 { 0.0 } else { ps / np as f64 },
            if ng == 0 { 0.0 } else { rs / ng as f64 },
        ),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn segment_scores_match_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut acc = SegmentAccumulator::new(&REPORT_LABELS);
        let mut data = Vec::new();
        for i in 0..r.gen_range(1..6) {
            let n = r.gen_range(1..14);
            let mut sent = vec![0usize; n];
            for j in 1..n {
                sent[j] = sent[j - 1] + r.gen_bool(0.2) as usize;
            }
            let words: Vec<String> = (0..n).map(|j| format!("w{j}")).collect();
            let q = question(&format!("q{i}"), &words, &sent);
            let draw = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<TagLabel> { (0..n).map(|_| STATE_LABELS[r.gen_range(0..4)]).collect() };
            let (g, p) = (draw(&mut r), draw(&mut r));
            acc.add(&q, &g, &p).unwrap();
            let single = segment_prf(&q, &g, &p, &REPORT_LABELS).unwrap();
            let swapped = segment_prf(&q, &p, &g, &REPORT_LABELS).unwrap();
            for l in REPORT_LABELS {
                let (a, b) = (single.per_label[&l], swapped.per_label[&l]);
                prop_assert!(close(a.precision, b.recall) && close(a.recall, b.precision));
                prop_assert!((0.0..=1.0).contains(&a.f1));
            }
            data.push((sent, g, p));
        }
        let rep = acc.report();
        for l in REPORT_LABELS {
            let (p, rc) = oracle(&data, l);
            prop_assert!(close(rep.per_label[&l].precision, p), "{:?} precision", l);
            prop_assert!(close(rep.per_label[&l].recall, rc), "{:?} recall", l);
        }
    }

    #[test]
    fn qa_metrics_ignore_list_order(seed in any::<u64>(), n in 1usize..30) {
        let mut r = rng(seed);
        let mut lists: Vec<_> = (0..n)
            .map(|i| list(i, r.gen_bool(0.7).then(|| r.gen_range(0..6)), r.gen_bool(0.8)))
            .collect();
        let a = qa_metrics(&lists, &gold(n)).unwrap();
        lists.shuffle(&mut r);
        let b = qa_metrics(&lists, &gold(n)).unwrap();
        prop_assert!(close(a.acc_at_3, b.acc_at_3) && close(a.mrr, b.mrr) && close(a.recall, b.recall));
        prop_assert!((0.0..=1.0).contains(&a.acc_at_3) && (0.0..=1.0).contains(&a.mrr) && (0.0..=1.0).contains(&a.recall));
        prop_assert!(a.recall <= a.acc_at_3 + 1e-12);
        prop_assert!(a.mrr >= a.acc_at_3 / 3.0 - 1e-12);
    }
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use msrq_bench::{labeled_questions, RQL_QUERIES};
use msrq_core::operators::{labels_to_rql, TriggerLexicon, DEFAULT_WINDOW};
use msrq_core::rql::{parse_rql, render_rql};

fn parse(c: &mut Criterion) {
    c.bench_function("parse_rql", |b| {
        b.iter(|| RQL_QUERIES.iter().map(|q| parse_rql(black_box(q)).unwrap()).count())
    });
    let parsed: Vec<_> = RQL_QUERIES.iter().map(|q| parse_rql(q).unwrap()).collect();
    c.bench_function("render_rql", |b| {
        b.iter(|| parsed.iter().map(|q| render_rql(black_box(q)).len()).sum::<usize>())
    });
    let data = labeled_questions(4, 50);
    let lex = TriggerLexicon::default_seeds();
    c.bench_function("labels_to_rql/50", |b| {
        b.iter(|| {
            data.iter()
                .filter(|(q, l)| labels_to_rql(q, l, &lex, DEFAULT_WINDOW).is_ok())
                .count()
        })
    });
}

criterion_group!(benches, parse);
criterion_main!(benches);

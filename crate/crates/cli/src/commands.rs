use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use msrq_core::corpus::{
    load_crowd, load_labels, load_questions, merge_crowd_annotations, write_labels, AnnotatedQuestion,
};
use msrq_core::eval::{qa_metrics, QaEvalReport, QaGold, SegmentAccumulator, REPORT_LABELS};
use msrq_core::index::{build_index, load_index, load_records, save_index, AliasTable, EntityIndex, StopWords};
use msrq_core::labeler::{codl_train, crf_train, estimate_rho, load_model, save_model, FeatureExtractor};
use msrq_core::operators::{expand_trigger_lexicon, labels_to_rql, OperatorError, TriggerLexicon};
use msrq_core::qa::{answer_question, parse_answers, webqa_answer, write_answers, QaContext, QaError, QuestionIdf};
use msrq_core::rql::{parse_rql, render_rql, validate_query};
use msrq_core::vectors::EmbeddingTable;
use msrq_core::{
    AnswerList, ConstraintSet, CrfModel, LabelSequence, PartialLabeling, PipelineConfig, Question, RqlQuery, TagLabel,
};

use crate::{Cli, Command, Failure, Trainer};

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::TrainCrf(_) => "train-crf",
        Command::TrainCcm(_) => "train-ccm",
        Command::TrainCodl(_) => "train-codl",
        Command::Label(_) => "label",
        Command::ParseRql(_) => "parse-rql",
        Command::Assemble(_) => "assemble",
        Command::IndexBuild(_) => "index-build",
        Command::Answer(_) => "answer",
        Command::BaselineWebqa(_) => "baseline-webqa",
        Command::EvalLabels(_) => "eval-labels",
        Command::EvalQa(_) => "eval-qa",
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match cli.command {
        Command::TrainCrf(a) => {
            let qs = load_questions(&a.input)?;
            let (m, cs) = train(Trainer::Crf, &cfg, &gold_pairs(&qs)?, &[])?;
            save_model(&a.out, &m, &cs)?;
        }
        Command::TrainCcm(a) => {
            let qs = load_questions(&a.input)?;
            let (m, cs) = train(Trainer::Ccm, &cfg, &gold_pairs(&qs)?, &[])?;
            save_model(&a.out, &m, &cs)?;
        }
        Command::TrainCodl(a) => {
            set_gamma(&mut cfg, a.gamma)?;
            let qs = load_questions(&a.train.input)?;
            let partial = partial_set(&a.partial, a.crowd.as_deref())?;
            let (m, cs) = train(Trainer::Codl, &cfg, &gold_pairs(&qs)?, &partial)?;
            save_model(&a.train.out, &m, &cs)?;
        }
        Command::Label(a) => {
            let (model, cs) = load_model(&a.model)?;
            let qs = load_questions(&a.input)?;
            let seqs: Vec<LabelSequence> = qs.iter().map(|q| model.ccm_decode(&cs, &q.question)).collect();
            write_file(&a.out, &write_labels(&seqs))?;
        }
        Command::ParseRql(a) => parse_rql_file(&a.input, &a.out)?,
        Command::Assemble(a) => {
            let qs = load_questions(&a.input)?;
            let labels = label_source(&qs, a.labels.as_deref())?;
            let lex = lexicon(&cfg)?;
            let mut out = String::new();
            for aq in &qs {
                let q = &aq.question;
                let rec = match labels_to_rql(q, &labels[&q.id], &lex, cfg.operators.window) {
                    Ok(a) => AssembledRecord {
                        id: q.id.clone(),
                        rql: Some(render_rql(&a.query)),
                        warnings: a.warnings,
                    },
                    Err(OperatorError::Assembly(m)) => AssembledRecord {
                        id: q.id.clone(),
                        rql: None,
                        warnings: vec![m],
                    },
                    Err(e) => return Err(e.into()),
                };
                out += &serde_json::to_string(&rec)?;
                out.push('\n');
            }
            write_file(&a.out, &out)?;
        }
        Command::IndexBuild(a) => {
            let records = load_records(&a.input)?;
            let index = build_index(&records, &stopwords(&cfg)?)?;
            save_index(&index, &a.out)?;
        }
        Command::Answer(a) => {
            let index = open_index(a.index.as_deref(), &cfg)?;
            let qs = load_questions(&a.input)?;
            let ctx = qa_context(&cfg)?;
            let k = a.k.unwrap_or(cfg.qa.k);
            let queries = match (&a.rql, &a.model) {
                (Some(p), _) => rql_file(p)?,
                (None, Some(m)) => {
                    let (model, cs) = load_model(m)?;
                    let labels = qs
                        .iter()
                        .map(|q| (q.question.id.clone(), model.ccm_decode(&cs, &q.question).labels))
                        .collect();
                    assemble_all(&qs, &labels, &lexicon(&cfg)?, cfg.operators.window)?
                }
                (None, None) => {
                    let labels = label_source(&qs, a.labels.as_deref())?;
                    assemble_all(&qs, &labels, &lexicon(&cfg)?, cfg.operators.window)?
                }
            };
            let mut answers = Vec::with_capacity(qs.len());
            for aq in &qs {
                let q = &aq.question;
                let list = match queries.get(&q.id).and_then(Option::as_ref) {
                    None => unattempted(&q.id),
                    Some(rql) => match answer_question(&q.id, rql, &q.metadata, &index, &ctx, k) {
                        Ok(l) => l,
                        Err(QaError::Compile(m)) => {
                            log::warn!("{}: {m}", q.id);
                            unattempted(&q.id)
                        }
                        Err(e) => return Err(e.into()),
                    },
                };
                answers.push(list);
            }
            write_answer_file(&a.out, &answers)?;
        }
        Command::BaselineWebqa(a) => {
            let index = open_index(a.index.as_deref(), &cfg)?;
            let qs = load_questions(&a.input)?;
            let k = a.k.unwrap_or(cfg.qa.k);
            let manual = a.manual_words.as_deref().map(manual_words).transpose()?;
            let idf = QuestionIdf::fit(qs.iter().map(|q| &q.question), index.stopwords());
            let mut answers = Vec::with_capacity(qs.len());
            for aq in &qs {
                let q = &aq.question;
                let words = manual.as_ref().and_then(|m| m.get(&q.id)).map(Vec::as_slice);
                answers.push(match webqa_answer(q, &index, &idf, k, words) {
                    Ok(l) => l,
                    Err(QaError::EmptyKeywords(id)) => {
                        log::warn!("{id}: no usable keywords");
                        unattempted(&id)
                    }
                    Err(e) => return Err(e.into()),
                });
            }
            write_answer_file(&a.out, &answers)?;
        }
        Command::EvalLabels(a) => {
            set_gamma(&mut cfg, a.gamma)?;
            let qs = load_questions(&a.input)?;
            let gold = gold_pairs(&qs)?;
            let predicted: Vec<Vec<TagLabel>> = match &a.pred {
                Some(p) => {
                    let mut by_id: BTreeMap<String, Vec<TagLabel>> =
                        load_labels(p)?.into_iter().map(|s| (s.question_id, s.labels)).collect();
                    gold.iter()
                        .map(|(q, _)| {
                            by_id
                                .remove(&q.id)
                                .ok_or_else(|| Failure::input(format!("no predicted labels for `{}`", q.id)))
                        })
                        .collect::<Result<_, _>>()?
                }
                None => {
                    let partial = match &a.partial {
                        Some(p) => partial_set(p, a.crowd.as_deref())?,
                        None => Vec::new(),
                    };
                    leave_one_out(a.trainer, &cfg, &gold, &partial)?
                }
            };
            let mut acc = SegmentAccumulator::new(&REPORT_LABELS);
            for ((q, g), p) in gold.iter().zip(&predicted) {
                acc.add(q, g, p)?;
            }
            let report = acc.report();
            print!("{}", report.to_table());
            if let Some(out) = &a.out {
                write_file(out, &serde_json::to_string_pretty(&report)?)?;
            }
        }
        Command::EvalQa(a) => {
            let mut gold = QaGold::load(&a.gold)?;
            if let Some(p) = &a.aliases {
                gold.load_aliases(&read(p)?)?;
            }
            let mut rows = Vec::new();
            let mut table = QaEvalReport::table_header();
            for p in &a.input {
                let system = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let report = qa_metrics(&parse_answers(&read(p)?)?, &gold)?;
                table += &report.table_row(&system);
                rows.push(SystemReport { system, report });
            }
            print!("{table}");
            if let Some(out) = &a.out {
                write_file(out, &serde_json::to_string_pretty(&rows)?)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct AssembledRecord {
    id: String,
    rql: Option<String>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct SystemReport {
    system: String,
    #[serde(flatten)]
    report: QaEvalReport,
}

#[derive(Serialize)]
struct ParsedRecord {
    line: usize,
    canonical: String,
    ast: serde_json::Value,
    violations: Vec<String>,
}

#[derive(Deserialize)]
struct ManualWords {
    id: String,
    words: Vec<String>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new("io", format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new("io", format!("cannot write {}: {e}", path.display())))
}

fn write_answer_file(path: &Path, answers: &[AnswerList]) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_answers(&mut buf, answers)?;
    let mut f =
        fs::File::create(path).map_err(|e| Failure::new("io", format!("cannot write {}: {e}", path.display())))?;
    f.write_all(&buf)?;
    Ok(())
}

fn set_gamma(cfg: &mut PipelineConfig, gamma: Option<f64>) -> Result<(), Failure> {
    if let Some(g) = gamma {
        cfg.codl.gamma = g;
        cfg.check()?;
    }
    Ok(())
}

fn unattempted(id: &str) -> AnswerList {
    AnswerList {
        id: id.to_string(),
        attempted: false,
        backoff: 0,
        answers: Vec::new(),
    }
}

fn gold_pairs(qs: &[AnnotatedQuestion]) -> Result<Vec<(&Question, &[TagLabel])>, Failure> {
    qs.iter()
        .map(|q| match &q.gold {
            Some(g) => Ok((&q.question, g.labels.as_slice())),
            None => Err(Failure::input(format!(
                "question `{}` has no gold labels",
                q.question.id
            ))),
        })
        .collect()
}

/// Questions to complete during training. With crowd annotations, the
/// labels both annotators agree on are kept; otherwise every label is
/// unknown.
fn partial_set(questions: &Path, crowd: Option<&Path>) -> Result<Vec<(Question, PartialLabeling)>, Failure> {
    let mut merged = BTreeMap::new();
    if let Some(p) = crowd {
        for c in load_crowd(p)? {
            merged.insert(c.a.question_id.clone(), merge_crowd_annotations(&c.a, &c.b)?);
        }
    }
    load_questions(questions)?
        .into_iter()
        .map(|aq| {
            let q = aq.question;
            let p = merged.remove(&q.id).unwrap_or_else(|| PartialLabeling {
                question_id: q.id.clone(),
                labels: vec![msrq_core::PartialLabel::Unknown; q.len()],
            });
            if p.labels.len() != q.len() {
                return Err(Failure::input(format!(
                    "crowd labels for `{}` do not match its {} tokens",
                    q.id,
                    q.len()
                )));
            }
            Ok((q, p))
        })
        .collect()
}

fn train(
    trainer: Trainer,
    cfg: &PipelineConfig,
    labeled: &[(&Question, &[TagLabel])],
    partial: &[(Question, PartialLabeling)],
) -> Result<(CrfModel, ConstraintSet), Failure> {
    let extractor = FeatureExtractor::new(cfg.features);
    let labels = cfg.label_set();
    let (model, mut cs) = match trainer {
        Trainer::Crf => {
            let (m, report) = crf_train(extractor, &labels, labeled, &cfg.crf)?;
            log::info!(
                "crf: {} iterations, log-likelihood {:.4}",
                report.iterations,
                report.log_likelihood
            );
            return Ok((m, ConstraintSet::empty()));
        }
        Trainer::Ccm => {
            let (m, report) = crf_train(extractor, &labels, labeled, &cfg.crf)?;
            log::info!(
                "crf: {} iterations, log-likelihood {:.4}",
                report.iterations,
                report.log_likelihood
            );
            let sentences: Vec<Vec<usize>> = labeled.iter().map(|(q, _)| q.sentence_ids()).collect();
            let cs = estimate_rho(
                &cfg.constraints.constraint_set(),
                sentences.iter().zip(labeled).map(|(s, (_, l))| (s.as_slice(), *l)),
            )?;
            (m, cs)
        }
        Trainer::Codl => {
            let pairs: Vec<(&Question, &PartialLabeling)> = partial.iter().map(|(q, p)| (q, p)).collect();
            let out = codl_train(
                extractor,
                &labels,
                &cfg.constraints.constraint_set(),
                labeled,
                &pairs,
                &cfg.crf,
                &cfg.codl,
            )?;
            log::info!("codl: {} iterations", out.iterations);
            (out.model, out.constraints)
        }
    };
    cfg.constraints.apply_overrides(&mut cs);
    Ok((model, cs))
}

fn leave_one_out(
    trainer: Trainer,
    cfg: &PipelineConfig,
    gold: &[(&Question, &[TagLabel])],
    partial: &[(Question, PartialLabeling)],
) -> Result<Vec<Vec<TagLabel>>, Failure> {
    if gold.len() < 2 {
        return Err(Failure::input("leave-one-out needs at least two labeled questions"));
    }
    (0..gold.len())
        .map(|i| {
            let rest: Vec<_> = gold
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| *p)
                .collect();
            let (model, cs) = train(trainer, cfg, &rest, partial)?;
            Ok(model.ccm_decode(&cs, gold[i].0).labels)
        })
        .collect()
}

/// Labels per question id, from a label file or the questions' gold.
fn label_source(qs: &[AnnotatedQuestion], path: Option<&Path>) -> Result<BTreeMap<String, Vec<TagLabel>>, Failure> {
    let map: BTreeMap<String, Vec<TagLabel>> = match path {
        Some(p) => load_labels(p)?.into_iter().map(|s| (s.question_id, s.labels)).collect(),
        None => qs
            .iter()
            .filter_map(|q| q.gold.as_ref().map(|g| (q.question.id.clone(), g.labels.clone())))
            .collect(),
    };
    match qs.iter().find(|q| !map.contains_key(&q.question.id)) {
        Some(q) => Err(Failure::input(format!("no labels for question `{}`", q.question.id))),
        None => Ok(map),
    }
}

/// Queries per question id; `None` where the labels hold no content.
fn assemble_all(
    qs: &[AnnotatedQuestion],
    labels: &BTreeMap<String, Vec<TagLabel>>,
    lex: &TriggerLexicon,
    window: usize,
) -> Result<BTreeMap<String, Option<RqlQuery>>, Failure> {
    let mut out = BTreeMap::new();
    for aq in qs {
        let q = &aq.question;
        let rql = match labels_to_rql(q, &labels[&q.id], lex, window) {
            Ok(a) => Some(a.query),
            Err(OperatorError::Assembly(m)) => {
                log::warn!("{}: {m}", q.id);
                None
            }
            Err(e) => return Err(e.into()),
        };
        out.insert(q.id.clone(), rql);
    }
    Ok(out)
}

fn rql_file(path: &Path) -> Result<BTreeMap<String, Option<RqlQuery>>, Failure> {
    let mut out = BTreeMap::new();
    for (i, line) in read(path)?.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let rec: AssembledRecord = serde_json::from_str(line)
            .map_err(|e| Failure::input(format!("{} line {}: {e}", path.display(), i + 1)))?;
        let q = rec.rql.as_deref().map(parse_rql).transpose()?;
        out.insert(rec.id, q);
    }
    Ok(out)
}

fn parse_rql_file(input: &Path, out: &Path) -> Result<(), Failure> {
    let mut text = String::new();
    for (i, line) in read(input)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let q = parse_rql(line).map_err(|e| Failure::new("rql", format!("line {}: {e}", i + 1)))?;
        let rec = ParsedRecord {
            line: i + 1,
            canonical: render_rql(&q),
            ast: q.to_json(),
            violations: validate_query(&q).iter().map(ToString::to_string).collect(),
        };
        text += &serde_json::to_string(&rec)?;
        text.push('\n');
    }
    write_file(out, &text)
}

fn manual_words(path: &Path) -> Result<BTreeMap<String, Vec<String>>, Failure> {
    let mut out = BTreeMap::new();
    for (i, line) in read(path)?.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let m: ManualWords = serde_json::from_str(line)
            .map_err(|e| Failure::input(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.insert(m.id, m.words);
    }
    Ok(out)
}

fn lexicon(cfg: &PipelineConfig) -> Result<TriggerLexicon, Failure> {
    let seeds = match &cfg.operators.lexicon {
        Some(p) => TriggerLexicon::load(p)?,
        None => TriggerLexicon::default_seeds(),
    };
    Ok(match &cfg.operators.expansion_vectors {
        Some(p) => expand_trigger_lexicon(&seeds, &EmbeddingTable::load(p)?, cfg.operators.expansion_threshold),
        None => seeds,
    })
}

fn stopwords(cfg: &PipelineConfig) -> Result<StopWords, Failure> {
    Ok(match &cfg.index.stopwords {
        Some(p) => StopWords::parse(&read(p)?),
        None => StopWords::default(),
    })
}

fn qa_context(cfg: &PipelineConfig) -> Result<QaContext, Failure> {
    Ok(QaContext {
        vectors: match &cfg.index.vectors {
            Some(p) => EmbeddingTable::load(p)?,
            None => EmbeddingTable::empty(),
        },
        aliases: match &cfg.index.aliases {
            Some(p) => AliasTable::from_json(&read(p)?)?,
            None => AliasTable::default(),
        },
        near_radius_km: cfg.qa.near_radius_km,
        backoff: cfg.qa.backoff,
    })
}

/// A binary index from the flag or the config, else one built from the
/// configured entities file.
fn open_index(flag: Option<&Path>, cfg: &PipelineConfig) -> Result<EntityIndex, Failure> {
    let path: Option<PathBuf> = flag.map(Path::to_path_buf).or_else(|| cfg.index.index.clone());
    match (path, &cfg.index.entities) {
        (Some(p), _) => Ok(load_index(p)?),
        (None, Some(e)) => Ok(build_index(&load_records(e)?, &stopwords(cfg)?)?),
        (None, None) => Err(Failure::input(
            "no index: pass --index or set index.index or index.entities in the config",
        )),
    }
}

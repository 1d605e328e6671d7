use serde::Serialize;

use super::lexicon::{TriggerKind, TriggerLexicon};
use super::OperatorError;
use crate::corpus::{segments_from_labels, Question, Segment, TagLabel};

pub const DEFAULT_WINDOW: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorSpan {
    pub kind: TriggerKind,
    pub trigger_start: usize,
    pub trigger_end: usize,
    /// Indices into the detection's segment list, ascending.
    pub scope: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub segments: Vec<Segment>,
    pub spans: Vec<OperatorSpan>,
}

/// Token distance between a trigger and a segment; adjacent tokens are 1 apart.
pub fn token_distance(trigger: (usize, usize), seg: &Segment) -> usize {
    if seg.end <= trigger.0 {
        trigger.0 - seg.end + 1
    } else if seg.start >= trigger.1 {
        seg.start - trigger.1 + 1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy)]
struct Trigger {
    kind: TriggerKind,
    start: usize,
    end: usize,
    sentence: usize,
}

/// Longest-match trigger scan over tokens labeled `other`.
fn find_triggers(question: &Question, labels: &[TagLabel], lexicon: &TriggerLexicon) -> Vec<Trigger> {
    let words: Vec<String> = question.tokens.iter().map(|t| t.lower()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let mut best: Option<(usize, TriggerKind)> = None;
        for kind in TriggerKind::ALL {
            for e in lexicon.entries(kind) {
                let n = e.tokens.len();
                let fits = i + n <= words.len()
                    && words[i..i + n] == e.tokens[..]
                    && labels[i..i + n].iter().all(|&l| l == TagLabel::Other)
                    && question.tokens[i..i + n]
                        .iter()
                        .all(|t| t.sentence_idx == question.tokens[i].sentence_idx);
                if fits && best.map_or(true, |(m, _)| n > m) {
                    best = Some((n, kind));
                }
            }
        }
        match best {
            Some((n, kind)) => {
                out.push(Trigger {
                    kind,
                    start: i,
                    end: i + n,
                    sentence: question.tokens[i].sentence_idx,
                });
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

/// Finds operator triggers and resolves their scope over the labeled
/// segments of `question`.
///
/// Scope rules, all restricted to the trigger's sentence and to segments
/// within `window` tokens:
/// - NOT: the nearest following non-type segment.
/// - PREF: the nearest following non-type segment, else the nearest preceding one.
/// - NEAR: the nearest following segment of any label.
/// - OR: the nearest segments on either side, when they share a label.
///
/// A segment claimed by several triggers of one kind keeps only the nearest
/// (ties go to the earlier trigger).
pub fn detect_operators(
    question: &Question,
    labels: &[TagLabel],
    lexicon: &TriggerLexicon,
    window: usize,
) -> Result<Detection, OperatorError> {
    if labels.len() != question.len() {
        return Err(OperatorError::LengthMismatch {
            tokens: question.len(),
            labels: labels.len(),
        });
    }
    let segments = segments_from_labels(question, labels);
    let sent_of = |s: &Segment| question.tokens[s.start].sentence_idx;
    let triggers = find_triggers(question, labels, lexicon);

    let mut spans = Vec::new();
    for t in &triggers {
        let span = (t.start, t.end);
        let near = |s: &Segment| sent_of(s) == t.sentence && token_distance(span, s) <= window;
        let after =
            |pred: &dyn Fn(&Segment) -> bool| segments.iter().position(|s| s.start >= t.end && near(s) && pred(s));
        let before =
            |pred: &dyn Fn(&Segment) -> bool| segments.iter().rposition(|s| s.end <= t.start && near(s) && pred(s));
        let not_type = |s: &Segment| s.label != TagLabel::Type;
        let any = |_: &Segment| true;
        let scope: Vec<usize> = match t.kind {
            TriggerKind::Not => after(&not_type).into_iter().collect(),
            TriggerKind::Pref => after(&not_type).or_else(|| before(&not_type)).into_iter().collect(),
            TriggerKind::Near => after(&any).into_iter().collect(),
            TriggerKind::Or => {
                let l = segments.iter().rposition(|s| s.end <= t.start);
                let r = segments.iter().position(|s| s.start >= t.end);
                match (l, r) {
                    (Some(l), Some(r))
                        if near(&segments[l]) && near(&segments[r]) && segments[l].label == segments[r].label =>
                    {
                        vec![l, r]
                    }
                    _ => Vec::new(),
                }
            }
        };
        if scope.is_empty() {
            log::debug!("{:?} trigger at token {} scopes nothing", t.kind, t.start);
        }
        spans.push(OperatorSpan {
            kind: t.kind,
            trigger_start: t.start,
            trigger_end: t.end,
            scope,
        });
    }

    resolve_competition(&segments, &mut spans);
    spans.retain(|s| !s.scope.is_empty());
    Ok(Detection { segments, spans })
}

fn resolve_competition(segments: &[Segment], spans: &mut [OperatorSpan]) {
    for kind in [TriggerKind::Not, TriggerKind::Pref, TriggerKind::Near] {
        for (si, seg) in segments.iter().enumerate() {
            let claims: Vec<usize> = (0..spans.len())
                .filter(|&k| spans[k].kind == kind && spans[k].scope.contains(&si))
                .collect();
            if claims.len() < 2 {
                continue;
            }
            let winner = *claims
                .iter()
                .min_by_key(|&&k| {
                    (
                        token_distance((spans[k].trigger_start, spans[k].trigger_end), seg),
                        spans[k].trigger_start,
                    )
                })
                .expect("non-empty");
            for k in claims {
                if k != winner {
                    spans[k].scope.retain(|&x| x != si);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::question_from_text;
    use TagLabel::*;

    fn detect(text: &str, labels: &[TagLabel]) -> Detection {
        let q = question_from_text("q", text, None);
        detect_operators(&q, labels, &TriggerLexicon::default_seeds(), DEFAULT_WINDOW).unwrap()
    }

    #[test]
    fn not_scopes_following_attribute() {
        let d = detect("something not very spicy", &[Other, Other, Attribute, Attribute]);
        assert_eq!(d.spans.len(), 1);
        assert_eq!(d.spans[0].kind, TriggerKind::Not);
        assert_eq!(
            d.segments[d.spans[0].scope[0]],
            Segment {
                label: Attribute,
                start: 2,
                end: 4
            }
        );
    }

    #[test]
    fn near_scopes_location() {
        let d = detect("hotels near Salzburg", &[Type, Other, Location]);
        assert_eq!(d.spans[0].kind, TriggerKind::Near);
        assert_eq!(d.segments[d.spans[0].scope[0]].label, Location);
    }

    #[test]
    fn pref_scopes_within_window() {
        let d = detect(
            "I would prefer to eat sushi",
            &[Other, Other, Other, Other, Other, Attribute],
        );
        assert_eq!(d.spans[0].kind, TriggerKind::Pref);
        assert_eq!(d.spans[0].scope, vec![0]);
        let far = detect(
            "I prefer a b c d sushi",
            &[Other, Other, Other, Other, Other, Other, Attribute],
        );
        assert!(far.spans.is_empty());
    }

    #[test]
    fn or_links_same_label_neighbours() {
        let d = detect("Red Hoods or Royals", &[Sibling, Sibling, Other, Sibling]);
        assert_eq!(d.spans[0].kind, TriggerKind::Or);
        assert_eq!(d.spans[0].scope, vec![0, 1]);
        let mixed = detect("cheap hotel or quiet", &[Attribute, Type, Other, Attribute]);
        assert!(mixed.spans.is_empty());
    }

    #[test]
    fn triggers_ignore_labeled_tokens_and_sentences() {
        let d = detect("no smoking rooms", &[Attribute, Attribute, Attribute]);
        assert!(d.spans.is_empty());
        let d = detect("not. spicy food", &[Other, Other, Attribute, Attribute]);
        assert!(d.spans.is_empty());
    }

    #[test]
    fn nearer_trigger_wins() {
        let lex =
            TriggerLexicon::from_json(r#"{"NOT":["not"],"OR":["or"],"PREF":["prefer"],"NEAR":["near"]}"#).unwrap();
        let q = question_from_text("q", "prefer x prefer spicy", None);
        let d = detect_operators(&q, &[Other, Other, Other, Attribute], &lex, 4).unwrap();
        assert_eq!(d.spans.len(), 1);
        assert_eq!(d.spans[0].trigger_start, 2);
    }

    #[test]
    fn multiword_triggers_match_longest() {
        let d = detect(
            "within walking distance of the Louvre",
            &[Other, Other, Other, Other, Other, Location],
        );
        assert_eq!(d.spans.len(), 1);
        assert_eq!((d.spans[0].trigger_start, d.spans[0].trigger_end), (1, 3));
    }
}

//! Rule-based fallback annotations for questions shipped without tagger
//! output: a suffix-driven POS guesser, a regex-style NER for numbers and
//! capitalized spans, and a plain-text tokenizer.

use super::types::{Question, QuestionMetadata, Token};

const WH_WORDS: &[&str] = &["what", "where", "which", "who", "whom", "whose", "when", "how", "why"];
const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "every", "each", "no", "my", "our", "your",
];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "to", "for", "from", "with", "without", "of", "by", "near", "around", "about", "between", "into",
    "over", "under", "after", "before", "during", "than",
];
const PRONOUNS: &[&str] = &[
    "i", "we", "you", "he", "she", "it", "they", "me", "us", "them", "him", "her", "one",
];
const CONJUNCTIONS: &[&str] = &["and", "or", "but", "nor", "so", "yet", "either"];
const VERBS: &[&str] = &[
    "is",
    "are",
    "was",
    "were",
    "be",
    "been",
    "am",
    "do",
    "does",
    "did",
    "have",
    "has",
    "had",
    "can",
    "could",
    "would",
    "should",
    "will",
    "want",
    "need",
    "looking",
    "recommend",
    "suggest",
    "stay",
    "eat",
    "visit",
    "prefer",
    "go",
    "going",
    "like",
    "find",
    "book",
    "help",
    "see",
    "try",
    "know",
];
const ADJECTIVES: &[&str] = &[
    "good",
    "great",
    "best",
    "nice",
    "cheap",
    "quiet",
    "local",
    "small",
    "big",
    "large",
    "old",
    "new",
    "clean",
    "fancy",
    "basic",
    "spicy",
    "romantic",
    "friendly",
    "close",
    "safe",
    "traditional",
    "authentic",
    "modern",
    "quick",
    "easy",
    "luxury",
    "budget",
    "casual",
    "fresh",
    "famous",
    "popular",
    "busy",
    "free",
];

fn is_numeric(s: &str) -> bool {
    s.chars().any(|c| c.is_ascii_digit())
        && s.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, ',' | '.' | '-' | '$' | '%'))
}

/// Penn-style POS guess from the surface form alone.
pub fn guess_pos(text: &str, sentence_initial: bool) -> String {
    let lower = text.to_lowercase();
    let w = lower.as_str();
    let tag = if is_numeric(text) {
        "CD"
    } else if !text.chars().any(char::is_alphanumeric) {
        "PUNCT"
    } else if WH_WORDS.contains(&w) {
        if matches!(w, "where" | "when" | "how" | "why") {
            "WRB"
        } else {
            "WDT"
        }
    } else if DETERMINERS.contains(&w) {
        "DT"
    } else if PREPOSITIONS.contains(&w) {
        "IN"
    } else if PRONOUNS.contains(&w) {
        "PRP"
    } else if CONJUNCTIONS.contains(&w) {
        "CC"
    } else if VERBS.contains(&w) {
        "VB"
    } else if ADJECTIVES.contains(&w) {
        "JJ"
    } else if w.ends_with("ly") && w.len() > 4 {
        "RB"
    } else if w.ends_with("ing") && w.len() > 5 {
        "VBG"
    } else if w.ends_with("ed") && w.len() > 4 {
        "VBD"
    } else if ["ous", "ful", "able", "ible", "ive", "less", "ish"]
        .iter()
        .any(|s| w.ends_with(s))
        && w.len() > 5
    {
        "JJ"
    } else if !sentence_initial && text.chars().next().is_some_and(char::is_uppercase) {
        "NNP"
    } else if w.ends_with('s') && w.len() > 3 && !w.ends_with("ss") {
        "NNS"
    } else {
        "NN"
    };
    tag.to_string()
}

/// Coarse entity tag: `NUM` for numerals, `ENT` for capitalized tokens that
/// are not sentence-initial, `O` otherwise.
pub fn guess_ner(text: &str, sentence_initial: bool) -> String {
    if is_numeric(text) {
        "NUM".into()
    } else if !sentence_initial
        && text.chars().next().is_some_and(char::is_uppercase)
        && text.chars().any(char::is_alphabetic)
        && text.to_lowercase() != "i"
    {
        "ENT".into()
    } else {
        "O".into()
    }
}

/// Splits raw text into word and punctuation tokens, grouped by sentence.
pub fn tokenize(text: &str) -> Vec<Vec<String>> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() || c == '$' {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                let joiner = matches!(d, '\'' | '-' | '.' | ',')
                    && i + 1 < chars.len()
                    && chars[i + 1].is_alphanumeric()
                    && (d != '.' && d != ',' || chars[i - 1].is_ascii_digit() && chars[i + 1].is_ascii_digit());
                if d.is_alphanumeric() || joiner {
                    i += 1;
                } else {
                    break;
                }
            }
            current.push(chars[start..i].iter().collect());
            continue;
        }
        current.push(c.to_string());
        i += 1;
        if matches!(c, '.' | '?' | '!') {
            while i < chars.len() && matches!(chars[i], '.' | '?' | '!') {
                current.last_mut().unwrap().push(chars[i]);
                i += 1;
            }
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

/// Builds an annotated [`Question`] from raw text using the fallback rules.
pub fn question_from_text(id: &str, text: &str, city: Option<&str>) -> Question {
    let mut tokens = Vec::new();
    let sentences = tokenize(text);
    for (s, words) in sentences.iter().enumerate() {
        for (j, w) in words.iter().enumerate() {
            tokens.push(Token {
                text: w.clone(),
                lemma: w.to_lowercase(),
                pos: guess_pos(w, j == 0),
                ner: guess_ner(w, j == 0),
                cluster: "UNK".into(),
                dep_head: None,
                sentence_idx: s,
                doc_position: tokens.len(),
            });
        }
    }
    Question {
        id: id.to_string(),
        tokens,
        sentence_count: sentences.len().max(1),
        metadata: QuestionMetadata {
            city: city.map(str::to_string),
        },
    }
}

use serde::Serialize;

use msrq_core::config::ConfigError;
use msrq_core::corpus::CorpusError;
use msrq_core::eval::EvalError;
use msrq_core::index::IndexError;
use msrq_core::labeler::LabelerError;
use msrq_core::operators::OperatorError;
use msrq_core::qa::QaError;
use msrq_core::rql::SyntaxError;
use msrq_core::vectors::VectorError;

/// A command failure, reported on stderr as one JSON object.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    error: &'a Failure,
}

impl Failure {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure::new("input", message)
    }

    pub fn to_json(&self, command: &str) -> String {
        serde_json::to_string(&Report { command, error: self }).expect("failure serializes")
    }
}

macro_rules! kind {
    ($($t:ty => $k:literal),* $(,)?) => {
        $(impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new($k, e.to_string())
            }
        })*
    };
}

kind! {
    std::io::Error => "io",
    serde_json::Error => "json",
    ConfigError => "config",
    CorpusError => "corpus",
    EvalError => "eval",
    IndexError => "index",
    LabelerError => "labeler",
    OperatorError => "operators",
    QaError => "qa",
    SyntaxError => "rql",
    VectorError => "vectors",
}

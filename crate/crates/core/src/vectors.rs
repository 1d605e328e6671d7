//! Plain-text word-vector tables. Line 1 holds the dimension `D`; every
//! following line is `token v1 ... vD`.

use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum VectorError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("vectors line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn empty() -> Self {
        EmbeddingTable::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VectorError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|source| VectorError::Io {
            path: path.as_ref().display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, VectorError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let Some((_, header)) = lines.next() else {
            return Ok(Self::empty());
        };
        let dim: usize = header.trim().parse().map_err(|_| VectorError::Format {
            line: 1,
            message: format!("expected dimension, found `{}`", header.trim()),
        })?;
        let mut table = EmbeddingTable {
            dim,
            ..Default::default()
        };
        for (i, line) in lines {
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-blank line").to_string();
            let values = parts
                .map(|p| p.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| VectorError::Format {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            if values.len() != dim {
                return Err(VectorError::Format {
                    line: i + 1,
                    message: format!("expected {dim} values, found {}", values.len()),
                });
            }
            table.insert(word, values);
        }
        Ok(table)
    }

    /// Adds or replaces a vector. Panics if the dimension disagrees.
    pub fn insert(&mut self, word: impl Into<String>, v: Vec<f64>) {
        if self.words.is_empty() && self.dim == 0 {
            self.dim = v.len();
        }
        assert_eq!(v.len(), self.dim, "vector dimension");
        let word = word.into();
        match self.index.get(&word) {
            Some(&i) => self.vectors[i] = v,
            None => {
                self.index.insert(word.clone(), self.words.len());
                self.words.push(word);
                self.vectors.push(v);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.vectors[i].as_slice())
    }

    /// Words in file order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .map(String::as_str)
            .zip(self.vectors.iter().map(Vec::as_slice))
    }

    /// Mean of the in-vocabulary vectors of whitespace/underscore separated
    /// tokens of `phrase` (lowercased); `None` if no token is covered.
    pub fn phrase_vector(&self, phrase: &str) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0;
        for tok in phrase.split(|c: char| c.is_whitespace() || c == '_') {
            let tok = tok.to_lowercase();
            if let Some(v) = self.get(&tok) {
                sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
                n += 1;
            }
        }
        (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

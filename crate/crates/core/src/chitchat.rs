//! Retrieval-based small talk: answer with the response paired to the most
//! similar known query.

use crate::textproc::{cosine, tokenize, SparseVector, Vocabulary};
use serde::Serialize;
use std::path::Path;
use thiserror::Error;

pub const FALLBACK_RESPONSE: &str = "I'm not sure about that, but I can help with products in this store.";
pub const DEFAULT_MIN_SCORE: f64 = 0.2;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {0}: expected `query<TAB>response`")]
    Format(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChitchatReply {
    pub text: String,
    pub score: f64,
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct ChitchatCorpus {
    pairs: Vec<(String, String)>,
    index: Option<(Vocabulary, Vec<SparseVector>)>,
    min_score: f64,
}

impl ChitchatCorpus {
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        let docs: Vec<Vec<String>> = pairs.iter().map(|(q, _)| tokenize(q)).collect();
        let index = Vocabulary::build(&docs).ok().map(|vocab| {
            let vectors = docs.iter().map(|d| vocab.tfidf_vector(d)).collect();
            (vocab, vectors)
        });
        Self {
            pairs,
            index,
            min_score: DEFAULT_MIN_SCORE,
        }
    }

    pub fn with_min_score(mut self, min_score: f64) -> Self {
        self.min_score = min_score;
        self
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            match raw.split_once('\t') {
                Some((q, r)) if !q.trim().is_empty() && !r.trim().is_empty() && !r.contains('\t') => {
                    pairs.push((q.trim().to_string(), r.trim().to_string()))
                }
                _ => return Err(CorpusError::Format(i + 1)),
            }
        }
        Ok(Self::new(pairs))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    /// Always produces a reply. The first pair wins among equal scores.
    pub fn respond(&self, query: &str) -> ChitchatReply {
        let best = self.index.as_ref().and_then(|(vocab, vectors)| {
            let q = vocab.tfidf_vector(&tokenize(query));
            let mut best: Option<(usize, f64)> = None;
            for (i, v) in vectors.iter().enumerate() {
                let s = cosine(&q, v);
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((i, s));
                }
            }
            best
        });
        match best {
            Some((i, score)) if score >= self.min_score => ChitchatReply {
                text: self.pairs[i].1.clone(),
                score,
                fallback: false,
            },
            other => ChitchatReply {
                text: FALLBACK_RESPONSE.to_string(),
                score: other.map_or(0.0, |(_, s)| s),
                fallback: true,
            },
        }
    }
}

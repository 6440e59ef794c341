//! Tokenization, vocabularies and sparse bag-of-words / TF-IDF vectors.

use serde::{Deserialize, Deserializer, Serialize};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

/// Lowercases `text` and splits it on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        // lowercasing can itself produce non-alphanumerics (e.g. combining marks)
        .flat_map(|t| {
            t.split(|c: char| !c.is_alphanumeric())
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabularyError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("vocabulary terms and document frequencies differ in length")]
    Inconsistent,
}

/// Dense term index with document frequencies.
///
/// Indexes are assigned in order of first appearance in the corpus, so the
/// same corpus always yields the same vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<u32>,
    n_docs: u32,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

#[derive(Deserialize)]
struct VocabularyRepr {
    terms: Vec<String>,
    doc_freq: Vec<u32>,
    n_docs: u32,
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = VocabularyRepr::deserialize(deserializer)?;
        Vocabulary::from_parts(repr.terms, repr.doc_freq, repr.n_docs).map_err(serde::de::Error::custom)
    }
}

impl Vocabulary {
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>]) -> Result<Self, VocabularyError> {
        if corpus.is_empty() {
            return Err(VocabularyError::EmptyCorpus);
        }
        let mut terms = Vec::new();
        let mut doc_freq = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        for doc in corpus {
            let mut seen = HashSet::new();
            for tok in doc {
                let tok = tok.as_ref();
                let idx = match index.get(tok) {
                    Some(&i) => i,
                    None => {
                        let i = terms.len() as u32;
                        terms.push(tok.to_string());
                        doc_freq.push(0);
                        index.insert(tok.to_string(), i);
                        i
                    }
                };
                if seen.insert(idx) {
                    doc_freq[idx as usize] += 1;
                }
            }
        }
        Ok(Vocabulary {
            terms,
            doc_freq,
            n_docs: corpus.len() as u32,
            index,
        })
    }

    fn from_parts(terms: Vec<String>, doc_freq: Vec<u32>, n_docs: u32) -> Result<Self, VocabularyError> {
        if terms.len() != doc_freq.len() {
            return Err(VocabularyError::Inconsistent);
        }
        let index: HashMap<String, u32> = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        if index.len() != terms.len() {
            return Err(VocabularyError::Inconsistent);
        }
        Ok(Vocabulary {
            terms,
            doc_freq,
            n_docs,
            index,
        })
    }

    /// Number of distinct terms (`k`).
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: u32) -> Option<&str> {
        self.terms.get(index as usize).map(String::as_str)
    }

    pub fn doc_freq(&self, term: &str) -> u32 {
        self.index_of(term).map_or(0, |i| self.doc_freq[i as usize])
    }

    /// Smoothed inverse document frequency: `ln((N + 1) / (df + 1)) + 1`.
    pub fn idf(&self, index: u32) -> f64 {
        let df = f64::from(self.doc_freq[index as usize]);
        ((f64::from(self.n_docs) + 1.0) / (df + 1.0)).ln() + 1.0
    }

    fn counts<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<(u32, u32)> {
        let mut idx: Vec<u32> = tokens.iter().filter_map(|t| self.index_of(t.as_ref())).collect();
        idx.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::new();
        for i in idx {
            match out.last_mut() {
                Some((last, n)) if *last == i => *n += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    /// Raw term counts; out-of-vocabulary tokens are ignored.
    pub fn bow_vector<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        SparseVector {
            entries: self
                .counts(tokens)
                .into_iter()
                .map(|(i, n)| (i, f64::from(n)))
                .collect(),
        }
    }

    pub fn tfidf_vector<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        SparseVector {
            entries: self
                .counts(tokens)
                .into_iter()
                .map(|(i, n)| (i, f64::from(n) * self.idf(i)))
                .collect(),
        }
    }
}

/// Sparse vector with strictly increasing indexes and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Builds a vector from arbitrary entries, summing duplicates and dropping zeros.
    pub fn from_entries(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_by_key(|&(i, _)| i);
        let mut out: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match out.last_mut() {
                Some((last, acc)) if *last == i => *acc += w,
                _ => out.push((i, w)),
            }
        }
        out.retain(|&(_, w)| w != 0.0);
        SparseVector { entries: out }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at `index`, zero when absent.
    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut sum = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    sum += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        sum
    }

    fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }
}

/// Cosine similarity, clamped to `[0, 1]`. Zero if either vector is empty.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> f64 {
    if u.is_empty() || v.is_empty() {
        return 0.0;
    }
    let denom = (u.squared_norm() * v.squared_norm()).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (u.dot(v) / denom).clamp(0.0, 1.0)
}

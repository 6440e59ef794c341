use super::{IntentLabel, UnknownLabel};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledQuery {
    pub text: String,
    pub label: IntentLabel,
}

impl LabeledQuery {
    pub fn new(text: impl Into<String>, label: IntentLabel) -> Self {
        Self {
            text: text.into(),
            label,
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `text<TAB>label`")]
    Format { line: usize },
    #[error("line {line}: empty query text")]
    EmptyText { line: usize },
    #[error("line {line}: {source}")]
    Label {
        line: usize,
        #[source]
        source: UnknownLabel,
    },
}

/// Parses `text<TAB>label` lines. Blank lines are skipped.
pub fn parse_labeled_queries(text: &str) -> Result<Vec<LabeledQuery>, DataError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (query, label) = raw.split_once('\t').ok_or(DataError::Format { line })?;
        if label.contains('\t') {
            return Err(DataError::Format { line });
        }
        if query.trim().is_empty() {
            return Err(DataError::EmptyText { line });
        }
        let label = label
            .trim()
            .parse()
            .map_err(|source| DataError::Label { line, source })?;
        out.push(LabeledQuery::new(query.trim(), label));
    }
    Ok(out)
}

pub fn read_labeled_queries(path: impl AsRef<Path>) -> Result<Vec<LabeledQuery>, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_labeled_queries(&text)
}

pub fn write_labeled_queries(data: &[LabeledQuery]) -> String {
    data.iter().map(|q| format!("{}\t{}\n", q.text, q.label)).collect()
}

/// Seeded shuffle, then the first `ceil(2n/3)` queries train and the rest test.
pub fn train_test_split(data: &[LabeledQuery], seed: u64) -> (Vec<LabeledQuery>, Vec<LabeledQuery>) {
    let mut shuffled = data.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = (2 * shuffled.len()).div_ceil(3);
    let test = shuffled.split_off(cut);
    (shuffled, test)
}

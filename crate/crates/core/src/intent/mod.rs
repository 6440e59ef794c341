//! Intent recognition with a from-scratch random forest over bag-of-words
//! query features.

mod data;
mod eval;
mod forest;
mod split;
mod tree;

pub use data::{
    parse_labeled_queries, read_labeled_queries, train_test_split, write_labeled_queries, DataError, LabeledQuery,
};
pub use eval::{evaluate, EvalError, Evaluation};
pub use forest::{
    default_features_per_split, load_model, save_model, train_forest, ForestConfig, ModelError, Prediction,
    RandomForestModel, TrainError, TrainingMetadata, DEFAULT_TREES, MODEL_FORMAT_VERSION,
};
pub use split::{best_split, gini_impurity, EmptyCounts, Split};
pub use tree::{train_tree, DecisionTree, TreeNode};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const N_LABELS: usize = 4;

/// Per-label counts, indexed by [`IntentLabel::index`].
pub type ClassCounts = [u32; N_LABELS];

/// The four intents the assistant understands. Declaration order is the
/// tie-breaking order for votes and leaf majorities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntentLabel {
    #[serde(rename = "spec_qa")]
    ProductSpecQA,
    #[serde(rename = "recommendation")]
    Recommendation,
    #[serde(rename = "purchase")]
    Purchase,
    #[serde(rename = "chitchat")]
    ChitChat,
}

impl IntentLabel {
    pub const ALL: [IntentLabel; N_LABELS] = [
        IntentLabel::ProductSpecQA,
        IntentLabel::Recommendation,
        IntentLabel::Purchase,
        IntentLabel::ChitChat,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IntentLabel::ProductSpecQA => "spec_qa",
            IntentLabel::Recommendation => "recommendation",
            IntentLabel::Purchase => "purchase",
            IntentLabel::ChitChat => "chitchat",
        }
    }

    /// Label with the highest count; ties go to the earlier label.
    pub fn argmax(counts: &ClassCounts) -> IntentLabel {
        let mut best = 0;
        for i in 1..N_LABELS {
            if counts[i] > counts[best] {
                best = i;
            }
        }
        IntentLabel::ALL[best]
    }
}

impl fmt::Display for IntentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown intent label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for IntentLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntentLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// Anything that maps a query to an intent.
pub trait IntentClassifier {
    fn classify(&self, text: &str) -> IntentLabel;
}

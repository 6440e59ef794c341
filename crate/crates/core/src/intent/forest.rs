use super::tree::{train_tree, DecisionTree};
use super::{ClassCounts, IntentClassifier, IntentLabel, LabeledQuery, N_LABELS};
use crate::textproc::{tokenize, SparseVector, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_TREES: usize = 80;
const MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub seed: u64,
    /// Defaults to `floor(sqrt(k))` when `None`.
    pub features_per_split: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: DEFAULT_TREES,
            seed: 0,
            features_per_split: None,
        }
    }
}

impl ForestConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrainError {
    #[error("need at least {MIN_SAMPLES} training queries, got {0}")]
    InsufficientData(usize),
    #[error("training data holds a single intent; need at least two")]
    SingleClass,
    #[error("a forest needs at least one tree")]
    NoTrees,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("unsupported model format version {found} (expected {MODEL_FORMAT_VERSION})")]
    VersionMismatch { found: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub n_samples: usize,
    pub label_counts: BTreeMap<IntentLabel, usize>,
}

/// Majority-vote ensemble of bagged CART trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    pub n_trees: usize,
    pub features_per_split: usize,
    pub seed: u64,
    pub metadata: TrainingMetadata,
    pub vocabulary: Vocabulary,
    pub trees: Vec<DecisionTree>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub label: IntentLabel,
    pub votes: ClassCounts,
}

/// `max(1, floor(sqrt(k)))`.
pub fn default_features_per_split(k: usize) -> usize {
    let mut r = (k as f64).sqrt() as usize;
    while r * r > k {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= k {
        r += 1;
    }
    r.max(1)
}

/// Trains a forest on `data`. Tree `t` draws its bootstrap sample and its
/// per-node feature orders from a ChaCha stream keyed by `(seed, t)`, so the
/// result does not depend on how trees are scheduled across threads.
pub fn train_forest(data: &[LabeledQuery], config: ForestConfig) -> Result<RandomForestModel, TrainError> {
    if config.n_trees == 0 {
        return Err(TrainError::NoTrees);
    }
    if data.len() < MIN_SAMPLES {
        return Err(TrainError::InsufficientData(data.len()));
    }
    let mut label_counts: BTreeMap<IntentLabel, usize> = BTreeMap::new();
    for q in data {
        *label_counts.entry(q.label).or_default() += 1;
    }
    if label_counts.len() < 2 {
        return Err(TrainError::SingleClass);
    }

    let tokens: Vec<Vec<String>> = data.iter().map(|q| tokenize(&q.text)).collect();
    let vocabulary = Vocabulary::build(&tokens).expect("data is non-empty");
    let samples: Vec<(SparseVector, IntentLabel)> = tokens
        .iter()
        .zip(data)
        .map(|(t, q)| (vocabulary.bow_vector(t), q.label))
        .collect();
    let k = vocabulary.len();
    let features_per_split = config
        .features_per_split
        .unwrap_or_else(|| default_features_per_split(k))
        .clamp(1, k.max(1));

    let n = samples.len();
    let trees: Vec<DecisionTree> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(config.seed, t);
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            train_tree(&samples, &bootstrap, k, features_per_split, &mut rng)
        })
        .collect();

    tracing::debug!(n_trees = trees.len(), k, features_per_split, "trained intent forest");
    Ok(RandomForestModel {
        n_trees: config.n_trees,
        features_per_split,
        seed: config.seed,
        metadata: TrainingMetadata {
            n_samples: n,
            label_counts,
        },
        vocabulary,
        trees,
    })
}

fn tree_rng(seed: u64, tree_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree_index as u64);
    rng
}

impl RandomForestModel {
    pub fn featurize(&self, text: &str) -> SparseVector {
        self.vocabulary.bow_vector(&tokenize(text))
    }

    pub fn predict(&self, text: &str) -> Prediction {
        self.predict_vector(&self.featurize(text))
    }

    pub fn predict_vector(&self, x: &SparseVector) -> Prediction {
        let mut votes: ClassCounts = [0; N_LABELS];
        for tree in &self.trees {
            votes[tree.predict(x).index()] += 1;
        }
        Prediction {
            label: IntentLabel::argmax(&votes),
            votes,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.trees.is_empty() || self.trees.len() != self.n_trees {
            return Err(ModelError::Corrupt(format!(
                "n_trees is {} but {} trees are stored",
                self.n_trees,
                self.trees.len()
            )));
        }
        if self.features_per_split == 0 {
            return Err(ModelError::Corrupt("features_per_split must be at least 1".into()));
        }
        for (i, tree) in self.trees.iter().enumerate() {
            tree.validate(self.vocabulary.len())
                .map_err(|e| ModelError::Corrupt(format!("tree {i}: {e}")))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct ModelFile<'a> {
            format_version: u32,
            #[serde(flatten)]
            model: &'a RandomForestModel,
        }
        serde_json::to_string(&ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            model: self,
        })
        .expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ModelError::Corrupt(e.to_string()))?;
        let version = value
            .get("format_version")
            .ok_or_else(|| ModelError::Corrupt("missing format_version".into()))?;
        let found = version
            .as_u64()
            .ok_or_else(|| ModelError::Corrupt("format_version is not an integer".into()))?;
        if found != u64::from(MODEL_FORMAT_VERSION) {
            return Err(ModelError::VersionMismatch { found });
        }
        let model: RandomForestModel = serde_json::from_value(value).map_err(|e| ModelError::Corrupt(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }
}

impl IntentClassifier for RandomForestModel {
    fn classify(&self, text: &str) -> IntentLabel {
        self.predict(text).label
    }
}

pub fn save_model(model: &RandomForestModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let mut text = model.to_json();
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<RandomForestModel, ModelError> {
    let text = std::fs::read_to_string(path)?;
    RandomForestModel::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use IntentLabel::*;

    fn corpus() -> Vec<LabeledQuery> {
        let rows = [
            ("how heavy is this chair", ProductSpecQA),
            ("what is the weight", ProductSpecQA),
            ("how tall is it", ProductSpecQA),
            ("what color is this", ProductSpecQA),
            ("show me some other items", Recommendation),
            ("any similar products", Recommendation),
            ("show me something else", Recommendation),
            ("i want to buy this", Purchase),
            ("buy it now", Purchase),
            ("i would like to purchase this product", Purchase),
            ("how are you doing", ChitChat),
            ("hello there", ChitChat),
            ("tell me a joke", ChitChat),
        ];
        rows.iter().map(|&(t, l)| LabeledQuery::new(t, l)).collect()
    }

    #[test]
    fn isqrt_floor() {
        assert_eq!(default_features_per_split(0), 1);
        assert_eq!(default_features_per_split(1), 1);
        assert_eq!(default_features_per_split(15), 3);
        assert_eq!(default_features_per_split(16), 4);
        assert_eq!(default_features_per_split(350), 18);
    }

    #[test]
    fn structure_and_defaults() {
        let model = train_forest(&corpus(), ForestConfig::with_seed(42)).unwrap();
        assert_eq!(model.n_trees, 80);
        assert_eq!(model.trees.len(), 80);
        assert_eq!(
            model.features_per_split,
            default_features_per_split(model.vocabulary.len())
        );
        assert_eq!(model.metadata.n_samples, 13);
        assert_eq!(model.metadata.label_counts[&Purchase], 3);
    }

    #[test]
    fn votes_sum_to_tree_count() {
        let model = train_forest(&corpus(), ForestConfig::with_seed(3)).unwrap();
        for text in ["", "zzz", "how heavy", "buy buy buy"] {
            let p = model.predict(text);
            assert_eq!(p.votes.iter().sum::<u32>() as usize, model.n_trees);
            assert_eq!(p.label, IntentLabel::argmax(&p.votes));
        }
    }

    #[test]
    fn single_tree_forest_matches_its_tree() {
        let config = ForestConfig {
            n_trees: 1,
            ..ForestConfig::with_seed(5)
        };
        let model = train_forest(&corpus(), config).unwrap();
        for q in corpus() {
            let x = model.featurize(&q.text);
            assert_eq!(model.predict_vector(&x).label, model.trees[0].predict(&x));
        }
    }

    #[test]
    fn tree_order_does_not_matter() {
        let model = train_forest(&corpus(), ForestConfig::with_seed(11)).unwrap();
        let mut reversed = model.clone();
        reversed.trees.reverse();
        for q in corpus() {
            assert_eq!(model.predict(&q.text), reversed.predict(&q.text));
        }
    }

    #[test]
    fn training_errors() {
        let data = corpus();
        assert_eq!(
            train_forest(&data[..5], ForestConfig::default()),
            Err(TrainError::InsufficientData(5))
        );
        let single: Vec<_> = (0..12)
            .map(|i| LabeledQuery::new(format!("hello {i}"), ChitChat))
            .collect();
        assert_eq!(
            train_forest(&single, ForestConfig::default()),
            Err(TrainError::SingleClass)
        );
        let zero = ForestConfig {
            n_trees: 0,
            ..ForestConfig::default()
        };
        assert_eq!(train_forest(&data, zero), Err(TrainError::NoTrees));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let model = train_forest(&corpus(), ForestConfig::with_seed(1)).unwrap();
        let json = model.to_json();
        assert!(json.starts_with("{\"format_version\":1,"));
        let back = RandomForestModel::from_json(&json).unwrap();
        assert_eq!(back, model);

        assert!(matches!(
            RandomForestModel::from_json(&json[..json.len() / 2]),
            Err(ModelError::Corrupt(_))
        ));
        let bumped = json.replacen("\"format_version\":1", "\"format_version\":7", 1);
        assert!(matches!(
            RandomForestModel::from_json(&bumped),
            Err(ModelError::VersionMismatch { found: 7 })
        ));
        let unversioned = json.replacen("\"format_version\":1,", "", 1);
        assert!(matches!(
            RandomForestModel::from_json(&unversioned),
            Err(ModelError::Corrupt(_))
        ));
        let lying = json.replacen("\"n_trees\":80", "\"n_trees\":81", 1);
        assert!(matches!(
            RandomForestModel::from_json(&lying),
            Err(ModelError::Corrupt(_))
        ));
    }
}

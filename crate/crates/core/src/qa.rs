//! Product-specification question answering.
//!
//! Answering is treated as answer selection: every specification of the
//! product is a candidate answer, candidates are ranked by relevance of
//! their *name* to the question, and the top one is rendered through a
//! response template.

use crate::catalog::{normalize_name, Catalog, Product, Specification};
use crate::textproc::{cosine, tokenize, Vocabulary};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Top scores below this produce a clarification instead of an answer.
pub const DEFAULT_ANSWER_THRESHOLD: f64 = 0.05;
pub const GENERIC_TEMPLATE: &str = "The {name} of {product} is {value}.";

#[derive(Debug, Error)]
pub enum QaError {
    #[error("product {0:?} has no specifications")]
    NoSpecifications(String),
    #[error("unknown product {0:?}")]
    UnknownProduct(String),
    #[error("product {product_id:?} has no specification named {spec:?}")]
    GoldSpecMissing { product_id: String, spec: String },
}

#[derive(Debug, Error)]
pub enum QaDataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

fn read(path: &Path) -> Result<String, QaDataError> {
    std::fs::read_to_string(path).map_err(|source| QaDataError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub raw: String,
    pub tokens: Vec<String>,
}

impl Question {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Self { raw, tokens }
    }
}

/// One-hop synonym expansion from question words to specification-name words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl SynonymLexicon {
    /// Parses `term<TAB>synonym1,synonym2,...`. Synonyms may be phrases.
    pub fn parse(text: &str) -> Result<Self, QaDataError> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (line, raw) in data_lines(text) {
            let err = |message: &str| QaDataError::Format {
                line,
                message: message.to_string(),
            };
            let (term, syns) = raw
                .split_once('\t')
                .ok_or_else(|| err("expected `term<TAB>synonyms`"))?;
            let term = match tokenize(term).as_slice() {
                [one] => one.clone(),
                _ => return Err(err("lexicon term must be a single word")),
            };
            let mut expansion = Vec::new();
            for syn in syns.split(',') {
                let toks = tokenize(syn);
                if toks.is_empty() {
                    return Err(err("empty synonym"));
                }
                expansion.extend(toks);
            }
            if entries.insert(term.clone(), expansion).is_some() {
                return Err(err(&format!("duplicate lexicon term {term:?}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, QaDataError> {
        Self::parse(&read(path.as_ref())?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn synonyms(&self, term: &str) -> Option<&[String]> {
        self.entries.get(term).map(Vec::as_slice)
    }

    /// The tokens followed by the synonyms of each token. Synonyms are not
    /// themselves expanded.
    pub fn expand(&self, tokens: &[String]) -> Vec<String> {
        let mut out = tokens.to_vec();
        for tok in tokens {
            if let Some(syns) = self.entries.get(tok) {
                out.extend(syns.iter().cloned());
            }
        }
        out
    }
}

/// IDF space for ranking: one document per distinct specification name in
/// the catalog, plus one per lexicon term.
pub fn ranking_vocabulary(catalog: &Catalog, lexicon: &SynonymLexicon) -> Vocabulary {
    let mut seen = std::collections::HashSet::new();
    let mut docs: Vec<Vec<String>> = Vec::new();
    for product in catalog.products() {
        for spec in &product.specs {
            if seen.insert(spec.normalized_name()) {
                docs.push(tokenize(&spec.name));
            }
        }
    }
    docs.extend(lexicon.terms().map(|t| vec![t.to_string()]));
    if docs.is_empty() {
        docs.push(Vec::new());
    }
    Vocabulary::build(&docs).expect("non-empty corpus")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedSpec {
    pub spec: Specification,
    pub score: f64,
}

/// All of a product's specifications, most relevant first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedSpecs(pub Vec<RankedSpec>);

impl RankedSpecs {
    pub fn top(&self) -> Option<&RankedSpec> {
        self.0.first()
    }

    pub fn position_of(&self, spec_name: &str) -> Option<usize> {
        let wanted = normalize_name(spec_name);
        self.0.iter().position(|r| r.spec.normalized_name() == wanted)
    }
}

/// Orders a product's specifications by relevance to a question.
pub trait SpecRanker: Send + Sync {
    fn rank(&self, question: &Question, product: &Product) -> Result<RankedSpecs, QaError>;
}

/// TF-IDF cosine between the lexicon-expanded question and each
/// specification name. Ties keep the product's specification order.
#[derive(Debug, Clone)]
pub struct LexicalRanker {
    lexicon: SynonymLexicon,
    vocab: Vocabulary,
}

impl LexicalRanker {
    pub fn new(lexicon: SynonymLexicon, vocab: Vocabulary) -> Self {
        Self { lexicon, vocab }
    }

    pub fn for_catalog(catalog: &Catalog, lexicon: SynonymLexicon) -> Self {
        let vocab = ranking_vocabulary(catalog, &lexicon);
        Self::new(lexicon, vocab)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn score(&self, question: &Question, spec: &Specification) -> f64 {
        let q = self.vocab.tfidf_vector(&self.lexicon.expand(&question.tokens));
        let s = self.vocab.tfidf_vector(&tokenize(&spec.name));
        cosine(&q, &s)
    }
}

impl SpecRanker for LexicalRanker {
    fn rank(&self, question: &Question, product: &Product) -> Result<RankedSpecs, QaError> {
        if product.specs.is_empty() {
            return Err(QaError::NoSpecifications(product.id.clone()));
        }
        let q = self.vocab.tfidf_vector(&self.lexicon.expand(&question.tokens));
        let mut ranked: Vec<RankedSpec> = product
            .specs
            .iter()
            .map(|spec| RankedSpec {
                spec: spec.clone(),
                score: cosine(&q, &self.vocab.tfidf_vector(&tokenize(&spec.name))),
            })
            .collect();
        // stable: equal scores keep product order
        ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
        Ok(RankedSpecs(ranked))
    }
}

/// Response templates keyed by specification-name pattern. Patterns are
/// matched against the normalized name and may use `*` as a wildcard; the
/// first matching line wins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateSet {
    entries: Vec<(String, String)>,
}

impl TemplateSet {
    pub fn parse(text: &str) -> Result<Self, QaDataError> {
        let mut entries = Vec::new();
        for (line, raw) in data_lines(text) {
            let (pattern, template) = raw.split_once('\t').ok_or_else(|| QaDataError::Format {
                line,
                message: "expected `pattern<TAB>template`".into(),
            })?;
            let leftover = template
                .replace("{name}", "")
                .replace("{value}", "")
                .replace("{product}", "");
            if leftover.contains('{') || leftover.contains('}') {
                return Err(QaDataError::Format {
                    line,
                    message: "unknown placeholder; use {name}, {value} or {product}".into(),
                });
            }
            entries.push((normalize_name(pattern), template.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, QaDataError> {
        Self::parse(&read(path.as_ref())?)
    }

    pub fn template_for(&self, spec_name: &str) -> &str {
        let name = normalize_name(spec_name);
        self.entries
            .iter()
            .find(|(pattern, _)| glob_match(pattern, &name))
            .map_or(GENERIC_TEMPLATE, |(_, t)| t.as_str())
    }

    pub fn render(&self, spec: &Specification, product: &Product) -> String {
        self.template_for(&spec.name)
            .replace("{name}", &spec.name)
            .replace("{value}", &spec.value)
            .replace("{product}", &product.name)
    }
}

fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    // reachable[j]: pattern prefix consumed so far matches t[..j]
    let mut reachable = vec![false; t.len() + 1];
    reachable[0] = true;
    for &pc in &p {
        let mut next = vec![false; t.len() + 1];
        if pc == '*' {
            let mut any = false;
            for j in 0..=t.len() {
                any |= reachable[j];
                next[j] = any;
            }
        } else {
            for j in 0..t.len() {
                next[j + 1] = reachable[j] && t[j] == pc;
            }
        }
        reachable = next;
    }
    reachable[t.len()]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaAnswer {
    pub text: String,
    /// The rank-1 specification, absent when the answer is a clarification.
    pub matched: Option<RankedSpec>,
}

pub struct QaEngine {
    ranker: Box<dyn SpecRanker>,
    templates: TemplateSet,
    threshold: f64,
}

impl QaEngine {
    pub fn new(ranker: Box<dyn SpecRanker>, templates: TemplateSet) -> Self {
        Self {
            ranker,
            templates,
            threshold: DEFAULT_ANSWER_THRESHOLD,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn ranker(&self) -> &dyn SpecRanker {
        self.ranker.as_ref()
    }

    pub fn answer(&self, question: &Question, product: &Product) -> Result<QaAnswer, QaError> {
        let ranked = self.ranker.rank(question, product)?;
        let top = ranked.top().expect("ranker returns every specification");
        if top.score < self.threshold {
            return Ok(QaAnswer {
                text: format!(
                    "I'm not sure which detail of {} you're asking about. Could you rephrase the question?",
                    product.name
                ),
                matched: None,
            });
        }
        Ok(QaAnswer {
            text: self.templates.render(&top.spec, product),
            matched: Some(top.clone()),
        })
    }
}

/// One line of a QA evaluation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaCase {
    pub question: String,
    pub product_id: String,
    pub gold_spec: String,
}

/// Parses `question<TAB>product_id<TAB>gold_spec_name` lines.
pub fn parse_qa_cases(text: &str) -> Result<Vec<QaCase>, QaDataError> {
    data_lines(text)
        .map(|(line, raw)| {
            let cols: Vec<&str> = raw.split('\t').collect();
            match cols.as_slice() {
                [q, p, g] if !q.trim().is_empty() && !p.trim().is_empty() && !g.trim().is_empty() => Ok(QaCase {
                    question: q.trim().to_string(),
                    product_id: p.trim().to_string(),
                    gold_spec: g.trim().to_string(),
                }),
                _ => Err(QaDataError::Format {
                    line,
                    message: "expected `question<TAB>product_id<TAB>gold_spec_name`".into(),
                }),
            }
        })
        .collect()
}

pub fn load_qa_cases(path: impl AsRef<Path>) -> Result<Vec<QaCase>, QaDataError> {
    parse_qa_cases(&read(path.as_ref())?)
}

/// Hits at k = 1, 2, 3 over `total` questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopKAccuracy {
    pub total: usize,
    pub hits: [usize; 3],
}

impl TopKAccuracy {
    /// Accuracy at `k` in 1..=3.
    pub fn at(&self, k: usize) -> f64 {
        assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
        if self.total == 0 {
            return 0.0;
        }
        self.hits[k - 1] as f64 / self.total as f64
    }
}

impl Serialize for TopKAccuracy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TopKAccuracy", 4)?;
        st.serialize_field("questions", &self.total)?;
        st.serialize_field("top1", &self.at(1))?;
        st.serialize_field("top2", &self.at(2))?;
        st.serialize_field("top3", &self.at(3))?;
        st.end()
    }
}

/// Fraction of cases whose gold specification is within the first k ranks.
/// Every gold specification must exist in its product.
pub fn evaluate_topk(ranker: &dyn SpecRanker, catalog: &Catalog, cases: &[QaCase]) -> Result<TopKAccuracy, QaError> {
    let mut hits = [0usize; 3];
    for case in cases {
        let product = catalog
            .get(&case.product_id)
            .ok_or_else(|| QaError::UnknownProduct(case.product_id.clone()))?;
        if product.spec(&case.gold_spec).is_none() {
            return Err(QaError::GoldSpecMissing {
                product_id: case.product_id.clone(),
                spec: case.gold_spec.clone(),
            });
        }
        let ranked = ranker.rank(&Question::new(&case.question), product)?;
        let pos = ranked.position_of(&case.gold_spec).expect("ranking is a permutation");
        for (k, hit) in hits.iter_mut().enumerate() {
            if pos <= k {
                *hit += 1;
            }
        }
    }
    Ok(TopKAccuracy {
        total: cases.len(),
        hits,
    })
}

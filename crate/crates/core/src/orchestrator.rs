//! Sessions and intent routing.
//!
//! [`Assistant`] owns the shared, read-only engines (catalog, intent forest,
//! QA, chit-chat, discount rules) and a store of per-shopper sessions. Each
//! session sits behind its own mutex so messages for one shopper are handled
//! one at a time while different shoppers proceed in parallel.

use crate::catalog::{Catalog, CatalogError, LookupError, Product, Specification};
use crate::chitchat::{ChitchatCorpus, CorpusError};
use crate::intent::{load_model, IntentClassifier, IntentLabel, ModelError};
use crate::purchase::{DiscountFileError, DiscountRules, PaymentProfile, PurchaseFlow, PurchaseState, Quote, Receipt};
use crate::qa::{LexicalRanker, QaDataError, QaEngine, QaError, Question, SynonymLexicon, TemplateSet};
use crate::recommend::{similar_products, DEFAULT_RECOMMENDATIONS};
use parking_lot::{Mutex, RwLock};
use rand::rngs::OsRng;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};
use thiserror::Error;

pub const DEFAULT_MAX_IDLE: Duration = Duration::from_secs(30 * 60);
pub const SCAN_FIRST: &str = "Please scan a product first so I know which item you mean.";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssistantError {
    #[error("unknown session")]
    UnknownSession,
    #[error("product {0:?} not found")]
    ProductNotFound(String),
    #[error("invalid barcode {0:?}")]
    InvalidBarcode(String),
    #[error("nothing has been quoted")]
    NotQuoted,
}

/// Compact product summary sent to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCard {
    pub id: String,
    pub name: String,
    pub category: String,
    pub price_cents: u64,
    pub price_display: String,
    pub barcode: Option<String>,
    pub spec_count: usize,
    pub top_specs: Vec<Specification>,
}

impl From<&Product> for ProductCard {
    fn from(p: &Product) -> Self {
        ProductCard {
            id: p.id.clone(),
            name: p.name.clone(),
            category: p.category.clone(),
            price_cents: p.price.cents(),
            price_display: p.price.to_string(),
            barcode: p.barcode.clone(),
            spec_count: p.specs.len(),
            top_specs: p.specs.iter().take(3).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredProduct {
    pub product: ProductCard,
    pub score: f64,
}

/// Structured data attached to a reply for the client to render.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    ProductCard(ProductCard),
    SpecAnswer { spec: Specification, score: f64 },
    Recommendations { items: Vec<ScoredProduct> },
    PurchaseQuote(Quote),
    Receipt(Receipt),
}

impl Payload {
    /// Whether a reply of `intent` may carry this payload.
    pub fn fits(&self, intent: IntentLabel) -> bool {
        matches!(
            (intent, self),
            (IntentLabel::ProductSpecQA, Payload::SpecAnswer { .. })
                | (IntentLabel::Recommendation, Payload::Recommendations { .. })
                | (IntentLabel::Purchase, Payload::PurchaseQuote(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssistantReply {
    pub reply: String,
    pub intent: IntentLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<Payload>,
}

impl AssistantReply {
    fn text(intent: IntentLabel, reply: impl Into<String>) -> Self {
        Self {
            reply: reply.into(),
            intent,
            payload: None,
        }
    }

    /// Payload kind agrees with intent; clarifications carry none.
    pub fn is_consistent(&self) -> bool {
        self.payload.as_ref().is_none_or(|p| p.fits(self.intent))
    }
}

/// Reply to a scan or explicit product selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReply {
    pub reply: String,
    pub product: ProductCard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub current_product: Option<String>,
    pub purchase: PurchaseFlow,
    pub tags: Vec<String>,
    pub payment: PaymentProfile,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    #[serde(skip, default = "Instant::now")]
    last_active: Instant,
}

impl Session {
    fn new(id: String, tags: Vec<String>) -> Self {
        Self {
            id,
            current_product: None,
            purchase: PurchaseFlow::default(),
            tags,
            payment: PaymentProfile::default(),
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            last_active: Instant::now(),
        }
    }

    pub fn idle_for(&self) -> Duration {
        self.last_active.elapsed()
    }
}

/// 128 random bits from the OS, hex encoded.
fn new_session_id() -> String {
    let mut bytes = [0u8; 16];
    OsRng.fill_bytes(&mut bytes);
    hex::encode(bytes)
}

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid snapshot: {0}")]
    Format(#[from] serde_json::Error),
}

impl SessionStore {
    pub fn create(&self, tags: Vec<String>) -> String {
        let id = new_session_id();
        let session = Session::new(id.clone(), tags);
        self.sessions.write().insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.read().is_empty()
    }

    /// Runs `f` with exclusive access to the session and marks it active.
    pub fn with_session<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> T) -> Result<T, AssistantError> {
        let handle = self
            .sessions
            .read()
            .get(id)
            .cloned()
            .ok_or(AssistantError::UnknownSession)?;
        let mut session = handle.lock();
        session.last_active = Instant::now();
        Ok(f(&mut session))
    }

    /// Read-only copy of a session, without touching its activity time.
    pub fn peek(&self, id: &str) -> Option<Session> {
        let handle = self.sessions.read().get(id).cloned()?;
        let copy = handle.lock().clone();
        Some(copy)
    }

    /// Removes sessions idle longer than `max_idle`. A session that is busy
    /// handling a message is active and kept.
    pub fn expire(&self, max_idle: Duration) -> usize {
        let mut sessions = self.sessions.write();
        let before = sessions.len();
        sessions.retain(|_, s| s.try_lock().is_none_or(|s| s.idle_for() <= max_idle));
        before - sessions.len()
    }

    pub fn snapshot(&self, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
        let mut all: Vec<Session> = self.sessions.read().values().map(|s| s.lock().clone()).collect();
        all.sort_by(|a, b| a.id.cmp(&b.id));
        std::fs::write(path, serde_json::to_vec_pretty(&all)?)?;
        Ok(())
    }

    /// Loads sessions from a snapshot; restored sessions count as active now.
    pub fn restore(&self, path: impl AsRef<Path>) -> Result<usize, SnapshotError> {
        let all: Vec<Session> = serde_json::from_slice(&std::fs::read(path)?)?;
        let n = all.len();
        let mut sessions = self.sessions.write();
        for s in all {
            sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
        }
        Ok(n)
    }
}

/// Locations of every data file the assistant needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataPaths {
    pub catalog: PathBuf,
    pub model: PathBuf,
    pub lexicon: PathBuf,
    pub templates: PathBuf,
    pub corpus: PathBuf,
    pub discounts: PathBuf,
}

impl DataPaths {
    /// Standard file names inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let d = dir.as_ref();
        Self {
            catalog: d.join("catalog.jsonl"),
            model: d.join("intent_model.json"),
            lexicon: d.join("lexicon.tsv"),
            templates: d.join("templates.tsv"),
            corpus: d.join("chitchat.tsv"),
            discounts: d.join("discounts.json"),
        }
    }
}

impl Default for DataPaths {
    fn default() -> Self {
        Self::in_dir("data")
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("intent model {path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Qa(#[from] QaDataError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Discounts(#[from] DiscountFileError),
}

pub struct Assistant {
    catalog: Catalog,
    intent: Box<dyn IntentClassifier + Send + Sync>,
    qa: QaEngine,
    chitchat: ChitchatCorpus,
    discounts: DiscountRules,
    sessions: SessionStore,
    recommendations: usize,
}

impl Assistant {
    pub fn new(
        catalog: Catalog,
        intent: Box<dyn IntentClassifier + Send + Sync>,
        qa: QaEngine,
        chitchat: ChitchatCorpus,
        discounts: DiscountRules,
    ) -> Self {
        Self {
            catalog,
            intent,
            qa,
            chitchat,
            discounts,
            sessions: SessionStore::default(),
            recommendations: DEFAULT_RECOMMENDATIONS,
        }
    }

    pub fn load(paths: &DataPaths) -> Result<Self, LoadError> {
        let catalog = Catalog::load(&paths.catalog)?;
        let model = load_model(&paths.model).map_err(|source| LoadError::Model {
            path: paths.model.display().to_string(),
            source,
        })?;
        let lexicon = SynonymLexicon::load(&paths.lexicon)?;
        let templates = TemplateSet::load(&paths.templates)?;
        let ranker = LexicalRanker::for_catalog(&catalog, lexicon);
        let chitchat = ChitchatCorpus::load(&paths.corpus)?;
        let discounts = DiscountRules::load(&paths.discounts)?;
        Ok(Self::new(
            catalog,
            Box::new(model),
            QaEngine::new(Box::new(ranker), templates),
            chitchat,
            discounts,
        ))
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn sessions(&self) -> &SessionStore {
        &self.sessions
    }

    pub fn create_session(&self, tags: Vec<String>) -> String {
        self.sessions.create(tags)
    }

    pub fn expire_sessions(&self, max_idle: Duration) -> usize {
        self.sessions.expire(max_idle)
    }

    /// Makes `product_id` the session's current product. A pending quote
    /// for the previous product is dropped.
    pub fn set_current_product(&self, session_id: &str, product_id: &str) -> Result<ScanReply, AssistantError> {
        let product = self
            .catalog
            .get(product_id)
            .ok_or_else(|| AssistantError::ProductNotFound(product_id.to_string()))?;
        self.sessions.with_session(session_id, |s| {
            s.current_product = Some(product.id.clone());
            s.purchase.reset_quote();
        })?;
        Ok(ScanReply {
            reply: format!("Found {} ({}). Ask me anything about it.", product.name, product.price),
            product: ProductCard::from(product),
        })
    }

    pub fn scan_barcode(&self, session_id: &str, code: &str) -> Result<ScanReply, AssistantError> {
        // unknown sessions are reported before barcode problems
        self.sessions.with_session(session_id, |_| ())?;
        let product = self.catalog.resolve_by_barcode(code).map_err(|e| match e {
            LookupError::InvalidBarcode(c) => AssistantError::InvalidBarcode(c),
            LookupError::NotFound(c) => AssistantError::ProductNotFound(c),
        })?;
        self.set_current_product(session_id, &product.id)
    }

    pub fn classify(&self, text: &str) -> IntentLabel {
        self.intent.classify(text)
    }

    /// Routes one shopper utterance to the engine its intent selects.
    pub fn handle_message(&self, session_id: &str, text: &str) -> Result<AssistantReply, AssistantError> {
        let intent = self.classify(text);
        self.sessions.with_session(session_id, |session| {
            let reply = self.dispatch(session, intent, text);
            tracing::debug!(intent = %intent, session = %session.id, "handled message");
            reply
        })
    }

    fn dispatch(&self, session: &mut Session, intent: IntentLabel, text: &str) -> AssistantReply {
        if intent == IntentLabel::ChitChat {
            return AssistantReply::text(intent, self.chitchat.respond(text).text);
        }
        let Some(product) = session.current_product.as_deref().and_then(|id| self.catalog.get(id)) else {
            return AssistantReply::text(intent, SCAN_FIRST);
        };
        match intent {
            IntentLabel::ProductSpecQA => self.answer_spec(product, text),
            IntentLabel::Recommendation => self.recommend(product),
            IntentLabel::Purchase => self.purchase(session, product),
            IntentLabel::ChitChat => unreachable!(),
        }
    }

    fn answer_spec(&self, product: &Product, text: &str) -> AssistantReply {
        let intent = IntentLabel::ProductSpecQA;
        match self.qa.answer(&Question::new(text), product) {
            Ok(answer) => AssistantReply {
                reply: answer.text,
                intent,
                payload: answer.matched.map(|m| Payload::SpecAnswer {
                    spec: m.spec,
                    score: m.score,
                }),
            },
            Err(QaError::NoSpecifications(_)) => {
                AssistantReply::text(intent, format!("I don't have any specifications for {}.", product.name))
            }
            Err(e) => AssistantReply::text(intent, e.to_string()),
        }
    }

    fn recommend(&self, product: &Product) -> AssistantReply {
        let intent = IntentLabel::Recommendation;
        let items: Vec<ScoredProduct> = similar_products(&self.catalog, &product.id, self.recommendations)
            .expect("current product is in the catalog")
            .into_iter()
            .map(|r| ScoredProduct {
                product: ProductCard::from(r.product),
                score: r.score,
            })
            .collect();
        let reply = if items.is_empty() {
            format!("I couldn't find other products like {}.", product.name)
        } else {
            format!("Here are {} products similar to {}.", items.len(), product.name)
        };
        AssistantReply {
            reply,
            intent,
            payload: Some(Payload::Recommendations { items }),
        }
    }

    fn purchase(&self, session: &mut Session, product: &Product) -> AssistantReply {
        let intent = IntentLabel::Purchase;
        if let PurchaseState::Quoted(q) = session.purchase.state() {
            return AssistantReply {
                reply: format!("You already have a quote. {}", q.message()),
                intent,
                payload: Some(Payload::PurchaseQuote(q.clone())),
            };
        }
        // a finished purchase must be closed before a new one starts
        session.purchase.cancel();
        let quote = match session
            .purchase
            .begin(product, &self.discounts, &session.tags, &session.payment)
        {
            Ok(q) => q.clone(),
            Err(e) => return AssistantReply::text(intent, e.to_string()),
        };
        AssistantReply {
            reply: quote.message(),
            intent,
            payload: Some(Payload::PurchaseQuote(quote)),
        }
    }

    pub fn confirm_purchase(&self, session_id: &str) -> Result<Receipt, AssistantError> {
        self.sessions
            .with_session(session_id, |s| s.purchase.confirm())?
            .map_err(|_| AssistantError::NotQuoted)
    }

    pub fn cancel_purchase(&self, session_id: &str) -> Result<(), AssistantError> {
        self.sessions.with_session(session_id, |s| s.purchase.cancel())
    }
}

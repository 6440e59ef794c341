//! Purchase guidance: a quote, confirm, receipt state machine with
//! discount rules.
//!
//! Legal transitions:
//!
//! ```text
//! Idle      --begin-->   Quoted
//! Quoted    --confirm--> Completed
//! Quoted    --cancel-->  Idle
//! Completed --cancel-->  Idle
//! Idle      --cancel-->  Idle        (no-op)
//! ```
//!
//! Everything else is rejected and leaves the state untouched.

use crate::catalog::{normalize_name, Money, Product};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};
use thiserror::Error;

const PPM: u64 = 1_000_000;

/// A discount fraction in `[0, 1)`, stored in parts per million.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiscountRate(u32);

impl DiscountRate {
    pub const ZERO: DiscountRate = DiscountRate(0);

    pub fn from_fraction(rate: f64) -> Option<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return None;
        }
        let ppm = (rate * PPM as f64).round();
        (ppm < PPM as f64).then_some(DiscountRate(ppm as u32))
    }

    pub fn from_ppm(ppm: u32) -> Option<Self> {
        (u64::from(ppm) < PPM).then_some(DiscountRate(ppm))
    }

    pub fn ppm(self) -> u32 {
        self.0
    }

    pub fn as_fraction(self) -> f64 {
        f64::from(self.0) / PPM as f64
    }

    /// `round_half_up(list * (1 - rate))` in cents, computed exactly.
    pub fn apply(self, list: Money) -> Money {
        let scaled = u128::from(list.cents()) * u128::from(PPM - u64::from(self.0));
        let cents = (scaled + u128::from(PPM / 2)) / u128::from(PPM);
        Money::from_cents(cents as u64)
    }
}

impl fmt::Display for DiscountRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // percent with up to four decimals, trailing zeros dropped
        let whole = self.0 / 10_000;
        let frac = self.0 % 10_000;
        if frac == 0 {
            write!(f, "{whole}%")
        } else {
            let digits = format!("{frac:04}");
            write!(f, "{whole}.{}%", digits.trim_end_matches('0'))
        }
    }
}

impl Serialize for DiscountRate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_fraction())
    }
}

impl<'de> Deserialize<'de> for DiscountRate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rate = f64::deserialize(d)?;
        DiscountRate::from_fraction(rate)
            .ok_or_else(|| serde::de::Error::custom(format!("discount rate {rate} is outside [0, 1)")))
    }
}

/// What a discount rule applies to. `tag` rules apply to sessions whose
/// profile carries the tag, which is how personalized offers are modeled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DiscountMatch {
    Category(String),
    ProductId(String),
    Tag(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscountRule {
    #[serde(rename = "match")]
    pub matcher: DiscountMatch,
    pub rate: DiscountRate,
}

impl DiscountRule {
    pub fn applies(&self, product: &Product, tags: &[String]) -> bool {
        match &self.matcher {
            DiscountMatch::Category(c) => normalize_name(c) == normalize_name(&product.category),
            DiscountMatch::ProductId(id) => *id == product.id,
            DiscountMatch::Tag(t) => tags.iter().any(|have| have == t),
        }
    }
}

#[derive(Debug, Error)]
pub enum DiscountFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid discount rules: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscountRules(pub Vec<DiscountRule>);

impl DiscountRules {
    pub fn parse(text: &str) -> Result<Self, DiscountFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DiscountFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DiscountFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Highest applicable rate; zero when nothing applies.
    pub fn best_rate(&self, product: &Product, tags: &[String]) -> DiscountRate {
        self.0
            .iter()
            .filter(|r| r.applies(product, tags))
            .map(|r| r.rate)
            .max()
            .unwrap_or(DiscountRate::ZERO)
    }
}

/// Mock stored payment method shown on quotes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaymentProfile {
    pub holder: String,
    pub method: String,
    pub last4: String,
}

impl Default for PaymentProfile {
    fn default() -> Self {
        Self {
            holder: "Guest Shopper".into(),
            method: "Visa".into(),
            last4: "4242".into(),
        }
    }
}

impl fmt::Display for PaymentProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ending in {}", self.method, self.last4)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quote {
    pub product_id: String,
    pub product_name: String,
    #[serde(rename = "list_price_cents")]
    pub list_price: Money,
    pub discount_rate: DiscountRate,
    #[serde(rename = "final_price_cents")]
    pub final_price: Money,
    pub payment: PaymentProfile,
}

impl Quote {
    pub fn message(&self) -> String {
        if self.discount_rate == DiscountRate::ZERO {
            format!(
                "{} is {}. Confirm to pay with your {}.",
                self.product_name, self.list_price, self.payment
            )
        } else {
            format!(
                "{} is listed at {}. With a {} discount you pay {}. Confirm to pay with your {}.",
                self.product_name, self.list_price, self.discount_rate, self.final_price, self.payment
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receipt {
    pub product_id: String,
    pub product_name: String,
    #[serde(rename = "list_price_cents")]
    pub list_price: Money,
    pub discount_rate: DiscountRate,
    #[serde(rename = "final_price_cents")]
    pub final_price: Money,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Receipt {
    pub fn message(&self) -> String {
        format!(
            "Thanks! You bought {} for {}. Your receipt is in the app.",
            self.product_name, self.final_price
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum PurchaseState {
    Idle,
    Quoted(Quote),
    Completed(Receipt),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Idle,
    Quoted,
    Completed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PurchaseAction {
    Begin,
    Confirm,
    Cancel,
}

impl PurchaseState {
    pub fn kind(&self) -> StateKind {
        match self {
            PurchaseState::Idle => StateKind::Idle,
            PurchaseState::Quoted(_) => StateKind::Quoted,
            PurchaseState::Completed(_) => StateKind::Completed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PurchaseError {
    #[error("there is no product to buy; scan one first")]
    NoCurrentProduct,
    #[error("nothing has been quoted")]
    NotQuoted,
    #[error("cannot start a purchase while {0:?}")]
    AlreadyInProgress(StateKind),
}

/// Purchase state plus the receipts it has produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurchaseFlow {
    state: PurchaseState,
    receipts: Vec<Receipt>,
}

impl Default for PurchaseFlow {
    fn default() -> Self {
        Self {
            state: PurchaseState::Idle,
            receipts: Vec::new(),
        }
    }
}

impl PurchaseFlow {
    pub fn state(&self) -> &PurchaseState {
        &self.state
    }

    pub fn receipts(&self) -> &[Receipt] {
        &self.receipts
    }

    /// Quotes `product` at its catalog price with the best applicable discount.
    pub fn begin(
        &mut self,
        product: &Product,
        rules: &DiscountRules,
        tags: &[String],
        payment: &PaymentProfile,
    ) -> Result<&Quote, PurchaseError> {
        if self.state != PurchaseState::Idle {
            return Err(PurchaseError::AlreadyInProgress(self.state.kind()));
        }
        let rate = rules.best_rate(product, tags);
        self.state = PurchaseState::Quoted(Quote {
            product_id: product.id.clone(),
            product_name: product.name.clone(),
            list_price: product.price,
            discount_rate: rate,
            final_price: rate.apply(product.price),
            payment: payment.clone(),
        });
        match &self.state {
            PurchaseState::Quoted(q) => Ok(q),
            _ => unreachable!(),
        }
    }

    pub fn confirm(&mut self) -> Result<Receipt, PurchaseError> {
        self.confirm_at(unix_now())
    }

    pub fn confirm_at(&mut self, timestamp: u64) -> Result<Receipt, PurchaseError> {
        let PurchaseState::Quoted(q) = &self.state else {
            return Err(PurchaseError::NotQuoted);
        };
        let receipt = Receipt {
            product_id: q.product_id.clone(),
            product_name: q.product_name.clone(),
            list_price: q.list_price,
            discount_rate: q.discount_rate,
            final_price: q.final_price,
            timestamp,
        };
        self.receipts.push(receipt.clone());
        self.state = PurchaseState::Completed(receipt.clone());
        Ok(receipt)
    }

    /// Returns to Idle from any state. Receipts are kept.
    pub fn cancel(&mut self) {
        self.state = PurchaseState::Idle;
    }

    /// Drops a pending quote; other states are left alone.
    pub fn reset_quote(&mut self) {
        if matches!(self.state, PurchaseState::Quoted(_)) {
            self.state = PurchaseState::Idle;
        }
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

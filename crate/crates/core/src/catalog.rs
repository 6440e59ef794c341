//! Product data model, catalog loading and barcode resolution.
//!
//! The catalog file is JSON Lines: one product object per line. Blank lines
//! are skipped. The catalog is immutable once loaded.

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Monetary amount in minor units (cents).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(u64);

impl Money {
    pub const fn from_cents(cents: u64) -> Self {
        Money(cents)
    }

    pub const fn cents(self) -> u64 {
        self.0
    }

    /// Converts a decimal amount with at most two fractional digits.
    pub fn from_decimal(amount: f64) -> Option<Self> {
        if !amount.is_finite() || amount < 0.0 {
            return None;
        }
        let scaled = amount * 100.0;
        let cents = scaled.round();
        if (scaled - cents).abs() > 1e-6 || cents > u64::MAX as f64 {
            return None;
        }
        Some(Money(cents as u64))
    }

    pub fn as_decimal(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}.{:02}", self.0 / 100, self.0 % 100)
    }
}

/// A `(name, value)` attribute of a product, e.g. `("weight", "14 lb")`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Specification {
    pub name: String,
    pub value: String,
}

impl Specification {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: value.into(),
        }
    }

    /// Lowercased, whitespace-collapsed name used for comparisons.
    pub fn normalized_name(&self) -> String {
        normalize_name(&self.name)
    }
}

/// Lowercases and collapses internal whitespace runs to single spaces.
pub fn normalize_name(name: &str) -> String {
    name.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProductRecord", into = "ProductRecord")]
pub struct Product {
    pub id: String,
    pub name: String,
    pub category: String,
    pub price: Money,
    pub barcode: Option<String>,
    pub specs: Vec<Specification>,
}

impl Product {
    /// Finds a specification by name (case-insensitive, whitespace-normalized).
    pub fn spec(&self, name: &str) -> Option<&Specification> {
        let wanted = normalize_name(name);
        self.specs.iter().find(|s| s.normalized_name() == wanted)
    }
}

/// One line of the catalog file, exactly as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductRecord {
    pub id: String,
    pub name: String,
    pub category: String,
    pub price: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barcode: Option<String>,
    pub specs: Vec<Specification>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProductError {
    #[error("product id is empty")]
    EmptyId,
    #[error("price {0} is not a non-negative amount with at most two decimals")]
    InvalidPrice(f64),
    #[error("barcode {0:?} fails check-digit validation")]
    InvalidBarcode(String),
    #[error("specification name is empty")]
    EmptySpecName,
    #[error("specification {0:?} appears more than once")]
    DuplicateSpec(String),
}

impl TryFrom<ProductRecord> for Product {
    type Error = ProductError;

    fn try_from(record: ProductRecord) -> Result<Self, Self::Error> {
        if record.id.trim().is_empty() {
            return Err(ProductError::EmptyId);
        }
        let price = Money::from_decimal(record.price).ok_or(ProductError::InvalidPrice(record.price))?;
        if let Some(code) = &record.barcode {
            if !validate_barcode(code) {
                return Err(ProductError::InvalidBarcode(code.clone()));
            }
        }
        let mut seen = HashSet::new();
        for spec in &record.specs {
            let key = spec.normalized_name();
            if key.is_empty() {
                return Err(ProductError::EmptySpecName);
            }
            if !seen.insert(key) {
                return Err(ProductError::DuplicateSpec(spec.name.clone()));
            }
        }
        Ok(Product {
            id: record.id,
            name: record.name,
            category: record.category,
            price,
            barcode: record.barcode,
            specs: record.specs,
        })
    }
}

impl From<Product> for ProductRecord {
    fn from(p: Product) -> Self {
        ProductRecord {
            id: p.id,
            name: p.name,
            category: p.category,
            price: p.price.as_decimal(),
            barcode: p.barcode,
            specs: p.specs,
        }
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    InvalidProduct {
        line: usize,
        #[source]
        source: ProductError,
    },
    #[error("duplicate product id {0:?}")]
    DuplicateId(String),
    #[error("duplicate barcode {0:?}")]
    DuplicateBarcode(String),
}

impl CatalogError {
    /// True when the error was caused by a barcode failing its check digit.
    pub fn is_invalid_barcode(&self) -> bool {
        matches!(
            self,
            CatalogError::InvalidProduct {
                source: ProductError::InvalidBarcode(_),
                ..
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("invalid barcode {0:?}")]
    InvalidBarcode(String),
    #[error("no product with barcode {0:?}")]
    NotFound(String),
}

/// Indexed, read-only product collection.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    products: Vec<Product>,
    by_id: HashMap<String, usize>,
    by_barcode: HashMap<String, usize>,
}

impl Catalog {
    pub fn from_products(products: Vec<Product>) -> Result<Self, CatalogError> {
        let mut by_id = HashMap::with_capacity(products.len());
        let mut by_barcode = HashMap::new();
        for (idx, product) in products.iter().enumerate() {
            if by_id.insert(product.id.clone(), idx).is_some() {
                return Err(CatalogError::DuplicateId(product.id.clone()));
            }
            if let Some(code) = &product.barcode {
                if by_barcode.insert(code.clone(), idx).is_some() {
                    return Err(CatalogError::DuplicateBarcode(code.clone()));
                }
            }
        }
        Ok(Catalog {
            products,
            by_id,
            by_barcode,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut products = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let record: ProductRecord = serde_json::from_str(raw).map_err(|e| CatalogError::Parse {
                line,
                message: e.to_string(),
            })?;
            let product = Product::try_from(record).map_err(|source| CatalogError::InvalidProduct { line, source })?;
            products.push(product);
        }
        Catalog::from_products(products)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CatalogError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Catalog::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    /// Products in file order.
    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn get(&self, id: &str) -> Option<&Product> {
        self.by_id.get(id).map(|&i| &self.products[i])
    }

    pub fn resolve_by_barcode(&self, code: &str) -> Result<&Product, LookupError> {
        if !validate_barcode(code) {
            return Err(LookupError::InvalidBarcode(code.to_string()));
        }
        self.by_barcode
            .get(code)
            .map(|&i| &self.products[i])
            .ok_or_else(|| LookupError::NotFound(code.to_string()))
    }
}

/// Convenience wrapper around [`Catalog::load`].
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    Catalog::load(path)
}

/// Computes the modulo-10 check digit for a UPC-A or EAN-13 body.
///
/// Weights alternate 3, 1, 3, ... starting from the rightmost body digit.
/// Returns `None` if `body` contains anything other than ASCII digits.
pub fn check_digit(body: &str) -> Option<u8> {
    let mut sum = 0u32;
    for (pos, b) in body.bytes().rev().enumerate() {
        if !b.is_ascii_digit() {
            return None;
        }
        let weight = if pos % 2 == 0 { 3 } else { 1 };
        sum += weight * u32::from(b - b'0');
    }
    Some(((10 - sum % 10) % 10) as u8)
}

/// True iff `code` is a 12-digit UPC-A or 13-digit EAN-13 with a correct
/// check digit. Any other input (including non-ASCII digits) is rejected.
pub fn validate_barcode(code: &str) -> bool {
    let bytes = code.as_bytes();
    if !(bytes.len() == 12 || bytes.len() == 13) || !bytes.iter().all(u8::is_ascii_digit) {
        return false;
    }
    let (body, last) = code.split_at(code.len() - 1);
    check_digit(body) == Some(last.as_bytes()[0] - b'0')
}

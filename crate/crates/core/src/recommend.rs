//! Related-product suggestions based on catalog attributes.

use crate::catalog::{normalize_name, Catalog, Product};
use std::collections::BTreeSet;
use thiserror::Error;

pub const DEFAULT_RECOMMENDATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecommendError {
    #[error("product {0:?} is not in the catalog")]
    UnknownProduct(String),
    #[error("number of recommendations must be at least 1")]
    ZeroCount,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recommendation<'a> {
    pub product: &'a Product,
    pub score: f64,
}

fn spec_names(p: &Product) -> BTreeSet<String> {
    p.specs.iter().map(|s| s.normalized_name()).collect()
}

/// `0.5 * [same category] + 0.5 * Jaccard(spec-name sets)`.
///
/// Two products without any specifications have identical (empty) name
/// sets, which counts as a Jaccard index of 1.
pub fn relatedness(a: &Product, b: &Product) -> f64 {
    let same_category = normalize_name(&a.category) == normalize_name(&b.category);
    let (sa, sb) = (spec_names(a), spec_names(b));
    let union = sa.union(&sb).count();
    let jaccard = if union == 0 {
        1.0
    } else {
        sa.intersection(&sb).count() as f64 / union as f64
    };
    0.5 * f64::from(u8::from(same_category)) + 0.5 * jaccard
}

/// Up to `n` other products, most related first, ties broken by id.
pub fn similar_products<'a>(
    catalog: &'a Catalog,
    product_id: &str,
    n: usize,
) -> Result<Vec<Recommendation<'a>>, RecommendError> {
    if n == 0 {
        return Err(RecommendError::ZeroCount);
    }
    let query = catalog
        .get(product_id)
        .ok_or_else(|| RecommendError::UnknownProduct(product_id.to_string()))?;
    let mut scored: Vec<Recommendation<'a>> = catalog
        .products()
        .iter()
        .filter(|p| p.id != query.id)
        .map(|p| Recommendation {
            product: p,
            score: relatedness(query, p),
        })
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.product.id.cmp(&b.product.id))
    });
    scored.truncate(n);
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Money, Specification};

    fn p(id: &str, category: &str, specs: &[&str]) -> Product {
        Product {
            id: id.into(),
            name: id.to_uppercase(),
            category: category.into(),
            price: Money::from_cents(100),
            barcode: None,
            specs: specs.iter().map(|n| Specification::new(*n, "x")).collect(),
        }
    }

    #[test]
    fn lone_product_has_no_recommendations() {
        let cat = Catalog::from_products(vec![p("a", "chairs", &["weight"])]).unwrap();
        assert!(similar_products(&cat, "a", 5).unwrap().is_empty());
    }

    #[test]
    fn identical_profile_scores_one() {
        let cat = Catalog::from_products(vec![
            p("a", "chairs", &["weight", "color"]),
            p("b", "Chairs", &["Color", "weight"]),
            p("c", "desks", &["weight"]),
        ])
        .unwrap();
        let recs = similar_products(&cat, "a", 5).unwrap();
        assert_eq!(recs[0].product.id, "b");
        assert_eq!(recs[0].score, 1.0);
        assert_eq!(recs[1].score, 0.25);
    }

    #[test]
    fn errors() {
        let cat = Catalog::from_products(vec![p("a", "chairs", &[])]).unwrap();
        assert_eq!(
            similar_products(&cat, "zz", 5).unwrap_err(),
            RecommendError::UnknownProduct("zz".into())
        );
        assert_eq!(similar_products(&cat, "a", 0).unwrap_err(), RecommendError::ZeroCount);
    }

    #[test]
    fn truncates_and_breaks_ties_by_id() {
        let cat = Catalog::from_products(vec![
            p("q", "lamps", &["wattage"]),
            p("z", "lamps", &["wattage"]),
            p("m", "lamps", &["wattage"]),
            p("b", "lamps", &["wattage"]),
        ])
        .unwrap();
        let ids: Vec<_> = similar_products(&cat, "q", 2)
            .unwrap()
            .iter()
            .map(|r| r.product.id.clone())
            .collect();
        assert_eq!(ids, ["b", "m"]);
    }
}

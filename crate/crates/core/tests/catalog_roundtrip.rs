use proptest::prelude::*;
use shelftalk_core::catalog::{check_digit, Catalog, CatalogError, LookupError, Money, Product, Specification};

fn product() -> impl Strategy<Value = Product> {
    (
        "[a-z]{1,8}-[0-9]{1,3}",
        "[A-Za-z][A-Za-z ]{0,20}",
        "[a-z]{1,10}",
        0u64..10_000_000,
        proptest::option::of("[0-9]{11}"),
        proptest::collection::btree_map("[a-z]{1,6}( [a-z]{1,6})?", "[ -~]{0,20}", 0..6),
    )
        .prop_map(|(id, name, category, cents, body, specs)| Product {
            id,
            name,
            category,
            price: Money::from_cents(cents),
            barcode: body.map(|b| {
                let d = check_digit(&b).unwrap();
                format!("{b}{d}")
            }),
            specs: specs.into_iter().map(|(n, v)| Specification::new(n, v)).collect(),
        })
}

fn to_jsonl(products: &[Product]) -> String {
    products
        .iter()
        .map(|p| serde_json::to_string(p).unwrap() + "\n")
        .collect()
}

proptest! {
    #[test]
    fn jsonl_round_trip(products in proptest::collection::vec(product(), 0..8)) {
        let mut seen_ids = std::collections::HashSet::new();
        let mut seen_codes = std::collections::HashSet::new();
        let products: Vec<Product> = products
            .into_iter()
            .filter(|p| seen_ids.insert(p.id.clone()))
            .filter(|p| p.barcode.as_ref().is_none_or(|b| seen_codes.insert(b.clone())))
            .collect();
        let parsed = Catalog::parse(&to_jsonl(&products)).unwrap();
        prop_assert_eq!(parsed.products(), products.as_slice());
        for p in &products {
            prop_assert_eq!(parsed.get(&p.id), Some(p));
            if let Some(code) = &p.barcode {
                prop_assert_eq!(parsed.resolve_by_barcode(code).unwrap(), p);
            }
        }
    }

    #[test]
    fn money_decimal_round_trip(cents in 0u64..1_000_000_000) {
        let m = Money::from_cents(cents);
        prop_assert_eq!(Money::from_decimal(m.as_decimal()), Some(m));
    }
}

#[test]
fn duplicate_ids_and_barcodes_rejected() {
    let line = |id: &str, code: &str| {
        format!(r#"{{"id":"{id}","name":"N","category":"c","price":1.5,"barcode":"{code}","specs":[]}}"#)
    };
    let dup_id = format!("{}\n{}\n", line("a", "036000291452"), line("a", "4006381333931"));
    assert!(matches!(Catalog::parse(&dup_id), Err(CatalogError::DuplicateId(_))));
    let dup_code = format!("{}\n{}\n", line("a", "036000291452"), line("b", "036000291452"));
    assert!(matches!(
        Catalog::parse(&dup_code),
        Err(CatalogError::DuplicateBarcode(_))
    ));
    let bad_code = line("a", "036000291453");
    assert!(Catalog::parse(&bad_code).unwrap_err().is_invalid_barcode());
}

#[test]
fn lookup_distinguishes_invalid_from_unknown() {
    let c = Catalog::parse(r#"{"id":"a","name":"N","category":"c","price":1,"barcode":"036000291452","specs":[]}"#)
        .unwrap();
    assert!(matches!(
        c.resolve_by_barcode("036000291453"),
        Err(LookupError::InvalidBarcode(_))
    ));
    assert!(matches!(
        c.resolve_by_barcode("4006381333931"),
        Err(LookupError::NotFound(_))
    ));
}

use proptest::prelude::*;
use shelftalk_core::catalog::{Money, Product};
use shelftalk_core::purchase::{
    DiscountRate, DiscountRules, PaymentProfile, PurchaseAction, PurchaseError, PurchaseFlow, PurchaseState, StateKind,
};

fn chair(cents: u64) -> Product {
    Product {
        id: "chair-001".into(),
        name: "Office Chair".into(),
        category: "office chairs".into(),
        price: Money::from_cents(cents),
        barcode: None,
        specs: vec![],
    }
}

fn rules() -> DiscountRules {
    DiscountRules::parse(r#"[{"match": {"category": "office chairs"}, "rate": 0.05}]"#).unwrap()
}

fn flow_in(kind: StateKind) -> PurchaseFlow {
    let mut f = PurchaseFlow::default();
    let p = chair(10_000);
    if kind != StateKind::Idle {
        f.begin(&p, &rules(), &[], &PaymentProfile::default()).unwrap();
    }
    if kind == StateKind::Completed {
        f.confirm_at(1).unwrap();
    }
    assert_eq!(f.state().kind(), kind);
    f
}

fn apply(f: &mut PurchaseFlow, action: PurchaseAction) -> Result<StateKind, PurchaseError> {
    match action {
        PurchaseAction::Begin => f
            .begin(&chair(10_000), &rules(), &[], &PaymentProfile::default())
            .map(|_| ())?,
        PurchaseAction::Confirm => f.confirm_at(2).map(|_| ())?,
        PurchaseAction::Cancel => f.cancel(),
    }
    Ok(f.state().kind())
}

#[test]
fn transition_table() {
    use PurchaseAction::*;
    use StateKind::*;
    let table = [
        (Idle, Begin, Some(Quoted)),
        (Idle, Confirm, None),
        (Idle, Cancel, Some(Idle)),
        (Quoted, Begin, None),
        (Quoted, Confirm, Some(Completed)),
        (Quoted, Cancel, Some(Idle)),
        (Completed, Begin, None),
        (Completed, Confirm, None),
        (Completed, Cancel, Some(Idle)),
    ];
    for (from, action, to) in table {
        let mut f = flow_in(from);
        let before = f.clone();
        match (apply(&mut f, action), to) {
            (Ok(got), Some(want)) => assert_eq!(got, want, "{from:?} {action:?}"),
            (Err(_), None) => assert_eq!(f, before, "rejected {from:?} {action:?} must not change state"),
            (got, want) => panic!("{from:?} {action:?}: got {got:?}, want {want:?}"),
        }
    }
}

#[test]
fn five_percent_off_one_hundred() {
    let mut f = PurchaseFlow::default();
    let q = f
        .begin(&chair(10_000), &rules(), &[], &PaymentProfile::default())
        .unwrap();
    assert_eq!(q.discount_rate.ppm(), 50_000);
    assert_eq!(q.final_price, Money::from_cents(9_500));
    let r = f.confirm_at(7).unwrap();
    assert_eq!(r.final_price.to_string(), "$95.00");
    assert_eq!(f.confirm_at(8), Err(PurchaseError::NotQuoted));
    f.cancel();
    assert_eq!(f.state(), &PurchaseState::Idle);
    assert_eq!(f.receipts().len(), 1);
}

#[test]
fn no_rule_means_list_price() {
    let mut f = PurchaseFlow::default();
    let mut p = chair(12_345);
    p.category = "lamps".into();
    let q = f.begin(&p, &rules(), &[], &PaymentProfile::default()).unwrap();
    assert_eq!(q.discount_rate, DiscountRate::ZERO);
    assert_eq!(q.final_price, q.list_price);
}

proptest! {
    #[test]
    fn discount_arithmetic(cents in 0u64..100_000_000_000, ppm in 0u32..1_000_000) {
        let rate = DiscountRate::from_ppm(ppm).unwrap();
        let got = rate.apply(Money::from_cents(cents)).cents();
        // exact: round half up of cents * (1 - ppm / 1e6)
        let num = u128::from(cents) * u128::from(1_000_000 - ppm);
        let want = (num / 1_000_000 + u128::from(num % 1_000_000 >= 500_000)) as u64;
        prop_assert_eq!(got, want);
        prop_assert!(got <= cents);
    }

    #[test]
    fn best_rate_is_max_of_applicable(rates in proptest::collection::vec((0u32..3, 0u32..999_999), 0..6)) {
        let rules: Vec<String> = rates
            .iter()
            .map(|&(which, ppm)| {
                let m = ["{\"category\": \"office chairs\"}", "{\"product_id\": \"chair-001\"}", "{\"category\": \"lamps\"}"][which as usize];
                format!("{{\"match\": {m}, \"rate\": {}}}", f64::from(ppm) / 1e6)
            })
            .collect();
        let parsed = DiscountRules::parse(&format!("[{}]", rules.join(","))).unwrap();
        let want = rates.iter().filter(|(w, _)| *w < 2).map(|&(_, p)| p).max().unwrap_or(0);
        prop_assert_eq!(parsed.best_rate(&chair(100), &[]).ppm(), want);
    }
}

mod common;

use common::oracles::{self, Q};
use proptest::prelude::*;
use shelftalk_core::intent::{best_split, IntentLabel};
use shelftalk_core::textproc::SparseVector;

/// Feature values are multiples of 1/4 so every midpoint is exact in f64.
fn dataset() -> impl Strategy<Value = (Vec<(Vec<i64>, usize)>, usize)> {
    (1usize..=5).prop_flat_map(|k| {
        let row = (proptest::collection::vec(0i64..12, k), 0usize..4);
        (proptest::collection::vec(row, 1..=8), Just(k))
    })
}

fn to_samples(rows: &[(Vec<i64>, usize)]) -> Vec<(SparseVector, IntentLabel)> {
    rows.iter()
        .map(|(x, y)| {
            let entries = x.iter().enumerate().map(|(i, &v)| (i as u32, v as f64 / 4.0)).collect();
            (
                SparseVector::from_entries(entries),
                IntentLabel::from_index(*y).unwrap(),
            )
        })
        .collect()
}

fn to_exact(rows: &[(Vec<i64>, usize)]) -> Vec<(Vec<Q>, usize)> {
    rows.iter()
        .map(|(x, y)| (x.iter().map(|&v| Q::new(v, 4)).collect(), *y))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn matches_exhaustive_search((rows, k) in dataset()) {
        let features: Vec<u32> = (0..k as u32).collect();
        let got = best_split(&to_samples(&rows), &features);
        let want = oracles::best_split(&to_exact(&rows), &features, 4);
        match (got, want) {
            (None, None) => {}
            (Some(g), Some(w)) => {
                prop_assert_eq!(g.feature, w.feature);
                prop_assert_eq!(g.threshold, oracles::to_f64(w.threshold));
                prop_assert!((g.impurity_decrease - oracles::to_f64(w.decrease)).abs() <= 1e-12);
            }
            (g, w) => prop_assert!(false, "library {:?} vs oracle {:?}", g, w),
        }
    }

    #[test]
    fn respects_candidate_subset((rows, k) in dataset(), mask in 0u32..32) {
        let features: Vec<u32> = (0..k as u32).filter(|f| mask & (1 << f) != 0).collect();
        let got = best_split(&to_samples(&rows), &features);
        let want = oracles::best_split(&to_exact(&rows), &features, 4);
        prop_assert_eq!(got.map(|s| (s.feature, s.threshold)), want.map(|w| (w.feature, oracles::to_f64(w.threshold))));
    }
}

#[test]
fn pure_node_has_no_split() {
    let rows = vec![(vec![0, 1], 2), (vec![4, 3], 2), (vec![8, 0], 2)];
    assert!(best_split(&to_samples(&rows), &[0, 1]).is_none());
}

#[test]
fn perfect_separation() {
    // two classes, feature 1 separates them at 1.0
    let rows = vec![(vec![0, 0], 0), (vec![4, 0], 0), (vec![0, 8], 1), (vec![4, 8], 1)];
    let s = best_split(&to_samples(&rows), &[0, 1]).unwrap();
    assert_eq!((s.feature, s.threshold), (1, 1.0));
    assert!((s.impurity_decrease - 0.5).abs() < 1e-12);
}

//! Slow, obviously-correct reference implementations used to cross-check
//! the library. Shared with the acceptance suite.
#![allow(dead_code)]

use num_rational::Ratio;
use std::collections::BTreeSet;

pub type Q = Ratio<i64>;

/// A split found by exhaustive search, in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSplit {
    pub feature: u32,
    pub threshold: Q,
    pub decrease: Q,
}

fn gini(counts: &[i64]) -> Q {
    let n: i64 = counts.iter().sum();
    let mut g = Q::from_integer(1);
    for &c in counts {
        let p = Q::new(c, n);
        g -= p * p;
    }
    g
}

/// Every feature, every midpoint between consecutive distinct values, exact
/// Gini decrease. Ties keep the first candidate (lower feature, then lower
/// threshold). `None` unless some candidate strictly decreases impurity.
pub fn best_split(rows: &[(Vec<Q>, usize)], features: &[u32], n_classes: usize) -> Option<ExactSplit> {
    let n = rows.len() as i64;
    let mut parent = vec![0i64; n_classes];
    for (_, y) in rows {
        parent[*y] += 1;
    }
    let parent_gini = gini(&parent);
    let mut sorted: Vec<u32> = features.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut best: Option<ExactSplit> = None;
    for f in sorted {
        let values: BTreeSet<Q> = rows.iter().map(|(x, _)| x[f as usize]).collect();
        let values: Vec<Q> = values.into_iter().collect();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2;
            let mut left = vec![0i64; n_classes];
            let mut right = vec![0i64; n_classes];
            for (x, y) in rows {
                if x[f as usize] <= t {
                    left[*y] += 1;
                } else {
                    right[*y] += 1;
                }
            }
            let nl: i64 = left.iter().sum();
            let nr = n - nl;
            let child = Q::new(nl, n) * gini(&left) + Q::new(nr, n) * gini(&right);
            let decrease = parent_gini - child;
            if decrease > Q::from_integer(0) && best.is_none_or(|b| decrease > b.decrease) {
                best = Some(ExactSplit {
                    feature: f,
                    threshold: t,
                    decrease,
                });
            }
        }
    }
    best
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Check digit by trying all ten candidates: the completed code's digits,
/// weighted 1, 3, 1, ... from the right, must sum to a multiple of ten.
pub fn check_digit(body: &[u8]) -> u8 {
    let mut found = None;
    for d in 0..10u8 {
        let mut code = body.to_vec();
        code.push(d);
        let sum: u32 = code
            .iter()
            .rev()
            .enumerate()
            .map(|(i, &c)| u32::from(c) * if i % 2 == 0 { 1 } else { 3 })
            .sum();
        if sum.is_multiple_of(10) {
            assert!(found.is_none(), "two valid check digits");
            found = Some(d);
        }
    }
    found.expect("some check digit is valid")
}

/// Relatedness as an exact fraction.
pub fn relatedness(cat_a: &str, specs_a: &[&str], cat_b: &str, specs_b: &[&str]) -> Q {
    let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    let a: BTreeSet<String> = specs_a.iter().map(|s| norm(s)).collect();
    let b: BTreeSet<String> = specs_b.iter().map(|s| norm(s)).collect();
    let union = a.union(&b).count() as i64;
    let jaccard = if union == 0 {
        Q::from_integer(1)
    } else {
        Q::new(a.intersection(&b).count() as i64, union)
    };
    let same = if norm(cat_a) == norm(cat_b) { 1 } else { 0 };
    Q::new(same, 2) + jaccard / 2
}

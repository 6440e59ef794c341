use super::{ClassCounts, IntentLabel, N_LABELS};
use crate::textproc::SparseVector;

/// Decreases closer than this are treated as ties, so the earlier
/// (feature, threshold) candidate wins regardless of rounding noise.
const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("class counts are empty")]
pub struct EmptyCounts;

/// `1 - sum(p_i^2)` over the class distribution.
pub fn gini_impurity(counts: &ClassCounts) -> Result<f64, EmptyCounts> {
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return Err(EmptyCounts);
    }
    Ok(gini_of(counts, total))
}

fn gini_of(counts: &ClassCounts, total: u64) -> f64 {
    let n = total as f64;
    1.0 - counts.iter().map(|&c| (f64::from(c) / n).powi(2)).sum::<f64>()
}

/// A candidate split: samples with `value <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: u32,
    pub threshold: f64,
    pub impurity_decrease: f64,
}

/// Best Gini split of `samples` restricted to `candidate_features`.
///
/// Thresholds are midpoints between consecutive distinct observed values.
/// Ties go to the lower feature index, then the lower threshold. Returns
/// `None` when no candidate strictly reduces impurity.
pub fn best_split(samples: &[(SparseVector, IntentLabel)], candidate_features: &[u32]) -> Option<Split> {
    let all: Vec<usize> = (0..samples.len()).collect();
    best_split_among(samples, &all, candidate_features)
}

pub(super) fn best_split_among(
    samples: &[(SparseVector, IntentLabel)],
    members: &[usize],
    candidate_features: &[u32],
) -> Option<Split> {
    if members.is_empty() {
        return None;
    }
    let mut parent: ClassCounts = [0; N_LABELS];
    for &i in members {
        parent[samples[i].1.index()] += 1;
    }
    let n = members.len() as u64;
    let parent_gini = gini_of(&parent, n);
    if parent_gini == 0.0 {
        return None;
    }

    let mut features = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<Split> = None;
    let mut column: Vec<(f64, usize)> = Vec::with_capacity(members.len());
    for feature in features {
        column.clear();
        column.extend(
            members
                .iter()
                .map(|&i| (samples[i].0.get(feature), samples[i].1.index())),
        );
        column.sort_by(|a, b| a.0.total_cmp(&b.0));
        if column[0].0 == column[column.len() - 1].0 {
            continue;
        }

        let mut left: ClassCounts = [0; N_LABELS];
        for j in 0..column.len() - 1 {
            left[column[j].1] += 1;
            let (here, next) = (column[j].0, column[j + 1].0);
            if here == next {
                continue;
            }
            let n_left = (j + 1) as u64;
            let n_right = n - n_left;
            let mut right = parent;
            for (r, l) in right.iter_mut().zip(&left) {
                *r -= l;
            }
            let weighted = (n_left as f64 / n as f64) * gini_of(&left, n_left)
                + (n_right as f64 / n as f64) * gini_of(&right, n_right);
            let decrease = parent_gini - weighted;
            let floor = best.map_or(0.0, |b| b.impurity_decrease);
            if decrease > floor + TIE_EPSILON {
                best = Some(Split {
                    feature,
                    threshold: (here + next) / 2.0,
                    impurity_decrease: decrease,
                });
            }
        }
    }
    best
}

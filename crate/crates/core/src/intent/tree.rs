use super::split::best_split_among;
use super::{ClassCounts, IntentLabel, N_LABELS};
use crate::textproc::SparseVector;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A node in a tree's arena. Children are indexes into the same arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Internal {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        label: IntentLabel,
        counts: ClassCounts,
    },
}

/// CART classification tree stored as a flat arena rooted at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn predict(&self, x: &SparseVector) -> IntentLabel {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { label, .. } => return *label,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.get(*feature) <= *threshold { *left } else { *right } as usize;
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    /// Checks arena shape: children point forward, every node but the root
    /// has exactly one parent, features are below `n_features` and leaves
    /// have non-empty counts.
    pub(super) fn validate(&self, n_features: usize) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        let mut parents = vec![0u32; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if *feature as usize >= n_features {
                        return Err(format!("node {i}: feature {feature} out of range"));
                    }
                    if !threshold.is_finite() {
                        return Err(format!("node {i}: non-finite threshold"));
                    }
                    for &c in [left, right] {
                        let c = c as usize;
                        if c <= i || c >= self.nodes.len() {
                            return Err(format!("node {i}: bad child {c}"));
                        }
                        parents[c] += 1;
                    }
                }
                TreeNode::Leaf { counts, .. } => {
                    if counts.iter().all(|&c| c == 0) {
                        return Err(format!("node {i}: empty leaf"));
                    }
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err("arena is not a tree".into());
        }
        Ok(())
    }
}

/// Grows one tree on `members` (indexes into `samples`, repeats allowed, as
/// produced by bootstrap sampling).
///
/// At each node the features are visited in a fresh random order, in blocks
/// of `features_per_split`. The first block holding a positive-decrease split
/// decides the node; later blocks are only consulted when an earlier one
/// cannot split the node at all. A node becomes a leaf when it is pure, holds
/// fewer than two samples, or no feature can split it.
pub fn train_tree<R: Rng + ?Sized>(
    samples: &[(SparseVector, IntentLabel)],
    members: &[usize],
    n_features: usize,
    features_per_split: usize,
    rng: &mut R,
) -> DecisionTree {
    assert!(!members.is_empty(), "cannot grow a tree on zero samples");
    let mut builder = Builder {
        samples,
        n_features,
        features_per_split: features_per_split.max(1),
        nodes: Vec::new(),
    };
    builder.grow(members.to_vec(), rng);
    DecisionTree { nodes: builder.nodes }
}

struct Builder<'a> {
    samples: &'a [(SparseVector, IntentLabel)],
    n_features: usize,
    features_per_split: usize,
    nodes: Vec<TreeNode>,
}

impl Builder<'_> {
    fn grow<R: Rng + ?Sized>(&mut self, members: Vec<usize>, rng: &mut R) -> u32 {
        let mut counts: ClassCounts = [0; N_LABELS];
        for &i in &members {
            counts[self.samples[i].1.index()] += 1;
        }
        let id = self.nodes.len() as u32;
        let leaf = TreeNode::Leaf {
            label: IntentLabel::argmax(&counts),
            counts,
        };
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || members.len() < 2 || self.n_features == 0 {
            self.nodes.push(leaf);
            return id;
        }

        let mut order: Vec<u32> = (0..self.n_features as u32).collect();
        order.shuffle(rng);
        let split = order
            .chunks(self.features_per_split)
            .find_map(|block| best_split_among(self.samples, &members, block));
        let Some(split) = split else {
            self.nodes.push(leaf);
            return id;
        };

        let (left, right): (Vec<usize>, Vec<usize>) = members
            .into_iter()
            .partition(|&i| self.samples[i].0.get(split.feature) <= split.threshold);
        self.nodes.push(leaf); // placeholder, replaced below
        let left_id = self.grow(left, rng);
        let right_id = self.grow(right, rng);
        self.nodes[id as usize] = TreeNode::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left: left_id,
            right: right_id,
        };
        id
    }
}

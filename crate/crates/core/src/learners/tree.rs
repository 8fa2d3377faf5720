use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Differences in impurity decrease below this are treated as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub fn gini(counts: &[usize]) -> Result<f64> {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptyNode);
    }
    let n = n as f64;
    Ok(1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub impurity_decrease: f64,
}

/// Nodes live in a flat arena; children are indices into it and the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        class_counts: Vec<usize>,
        prediction: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        impurity_decrease: f64,
        n_samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn leaf_for(&self, x: &[f64]) -> &TreeNode {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                leaf => return leaf,
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        match self.leaf_for(x) {
            TreeNode::Leaf { prediction, .. } => *prediction,
            TreeNode::Split { .. } => unreachable!("traversal ends at a leaf"),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }
}

/// Argmax with ties going to the lowest index.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn class_counts(labels: &[usize], rows: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &r in rows {
        counts[labels[r]] += 1;
    }
    counts
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

/// Exhaustive Gini split search over `features` and midpoints between
/// consecutive distinct values of the node's rows (`rows` may repeat).
pub fn best_split(x: &FeatureMatrix, labels: &[usize], rows: &[usize], n_classes: usize, features: &[usize]) -> Option<Split> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let parent = class_counts(labels, rows, n_classes);
    let nf = n as f64;
    let parent_sq: f64 = parent.iter().map(|&c| (c * c) as f64).sum();
    let parent_gini = 1.0 - parent_sq / (nf * nf);
    if parent_gini <= 0.0 {
        return None;
    }

    let mut best: Option<Split> = None;
    let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut left = vec![0usize; n_classes];
    for &f in features {
        pairs.clear();
        pairs.extend(rows.iter().map(|&r| (x.get(r, f), labels[r])));
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if pairs[0].0 == pairs[n - 1].0 {
            continue;
        }
        left.iter_mut().for_each(|c| *c = 0);
        // running Σ c² on each side
        let mut left_sq = 0.0;
        let mut right_sq = parent_sq;
        for i in 0..n - 1 {
            let c = pairs[i].1;
            let lc = left[c] as f64;
            let rc = (parent[c] - left[c]) as f64;
            left_sq += 2.0 * lc + 1.0;
            right_sq -= 2.0 * rc - 1.0;
            left[c] += 1;
            if pairs[i].0 == pairs[i + 1].0 {
                continue;
            }
            let nl = (i + 1) as f64;
            let nr = nf - nl;
            let weighted = (nl - left_sq / nl + nr - right_sq / nr) / nf;
            let decrease = parent_gini - weighted;
            if best.is_none_or(|b| decrease > b.impurity_decrease + TIE_TOLERANCE) {
                best = Some(Split {
                    feature: f,
                    threshold: midpoint(pairs[i].0, pairs[i + 1].0),
                    impurity_decrease: decrease,
                });
            }
        }
    }
    best.filter(|b| b.impurity_decrease > TIE_TOLERANCE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    /// Nodes with at most this many rows become leaves.
    pub min_node: usize,
    pub mtry: usize,
}

fn make_leaf(counts: Vec<usize>) -> TreeNode {
    TreeNode::Leaf {
        prediction: argmax(&counts),
        class_counts: counts,
    }
}

/// Grows a CART tree on `rows` (bootstrap indices are allowed to repeat),
/// sampling `mtry` candidate features per node from `rng`.
pub fn grow_tree<R: Rng + ?Sized>(
    x: &FeatureMatrix,
    labels: &[usize],
    rows: &[usize],
    n_classes: usize,
    params: &TreeParams,
    rng: &mut R,
) -> Result<Tree> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = x.n_cols;
    let mtry = params.mtry.clamp(1, p.max(1));
    let mut nodes: Vec<TreeNode> = Vec::new();
    // (node slot, rows, depth); children are pushed right-then-left so the left subtree is grown first
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, rows.to_vec(), 0)];
    nodes.push(make_leaf(Vec::new()));
    while let Some((slot, node_rows, depth)) = stack.pop() {
        let counts = class_counts(labels, &node_rows, n_classes);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let capped = params.max_depth.is_some_and(|d| depth >= d) || node_rows.len() <= params.min_node;
        let split = if pure || capped || p == 0 {
            None
        } else {
            let mut features = sample(rng, p, mtry).into_vec();
            features.sort_unstable();
            best_split(x, labels, &node_rows, n_classes, &features)
        };
        match split {
            None => nodes[slot] = make_leaf(counts),
            Some(s) => {
                let (l, r): (Vec<usize>, Vec<usize>) = node_rows.iter().partition(|&&i| x.get(i, s.feature) <= s.threshold);
                let left = nodes.len();
                nodes.push(make_leaf(Vec::new()));
                let right = nodes.len();
                nodes.push(make_leaf(Vec::new()));
                nodes[slot] = TreeNode::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                    impurity_decrease: s.impurity_decrease,
                    n_samples: node_rows.len(),
                };
                stack.push((right, r, depth + 1));
                stack.push((left, l, depth + 1));
            }
        }
    }
    Ok(Tree { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    fn matrix(rows: &[Vec<f64>]) -> FeatureMatrix {
        FeatureMatrix::from_unnamed(rows).unwrap()
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[10, 0]).unwrap(), 0.0);
        assert_eq!(gini(&[5, 5]).unwrap(), 0.5);
        assert!((gini(&[2, 3, 5]).unwrap() - 0.62).abs() < 1e-12);
        assert!(matches!(gini(&[0, 0]), Err(Error::EmptyNode)));
    }

    #[test]
    fn one_dimensional_split() {
        let x = matrix(&[vec![1.0], vec![2.0], vec![9.0], vec![10.0]]);
        let s = best_split(&x, &[0, 0, 1, 1], &[0, 1, 2, 3], 2, &[0]).unwrap();
        assert_eq!(s.threshold, 5.5);
        assert!((s.impurity_decrease - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_rows_unsplittable() {
        let x = matrix(&[vec![3.0, 1.0], vec![3.0, 1.0], vec![3.0, 1.0]]);
        assert!(best_split(&x, &[0, 1, 0], &[0, 1, 2], 2, &[0, 1]).is_none());
    }

    #[test]
    fn ties_prefer_lower_feature() {
        // both features separate perfectly
        let x = matrix(&[vec![0.0, 0.0], vec![1.0, 1.0]]);
        let s = best_split(&x, &[0, 1], &[0, 1], 2, &[0, 1]).unwrap();
        assert_eq!(s.feature, 0);
    }

    #[test]
    fn single_row_is_a_leaf() {
        let x = matrix(&[vec![1.0, 2.0]]);
        let t = grow_tree(
            &x,
            &[3],
            &[0],
            5,
            &TreeParams {
                max_depth: None,
                min_node: 1,
                mtry: 2,
            },
            &mut stream(1, "t", 0),
        )
        .unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&[0.0, 0.0]), 3);
        assert!(matches!(
            grow_tree(
                &x,
                &[3],
                &[],
                5,
                &TreeParams {
                    max_depth: None,
                    min_node: 1,
                    mtry: 2
                },
                &mut stream(1, "t", 0)
            ),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn separable_fixture_depth_one() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let idx: Vec<usize> = (0..10).collect();
        let x = matrix(&rows);
        let t = grow_tree(
            &x,
            &labels,
            &idx,
            2,
            &TreeParams {
                max_depth: None,
                min_node: 1,
                mtry: 1,
            },
            &mut stream(2, "t", 0),
        )
        .unwrap();
        assert_eq!(t.depth(), 1);
        assert!(idx.iter().all(|&i| t.predict(x.row(i)) == labels[i]));
    }

    #[test]
    fn leaf_prediction_ties_to_lowest_class() {
        assert_eq!(argmax(&[2, 5, 5, 1]), 1);
        let x = matrix(&[vec![1.0], vec![1.0]]);
        let t = grow_tree(
            &x,
            &[1, 0],
            &[0, 1],
            2,
            &TreeParams {
                max_depth: None,
                min_node: 1,
                mtry: 1,
            },
            &mut stream(0, "t", 0),
        )
        .unwrap();
        assert_eq!(t.predict(&[1.0]), 0);
    }

    #[test]
    fn depth_cap_respected() {
        let rows: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..16).map(|i| i % 2).collect();
        let idx: Vec<usize> = (0..16).collect();
        let params = TreeParams {
            max_depth: Some(2),
            min_node: 1,
            mtry: 1,
        };
        let t = grow_tree(&matrix(&rows), &labels, &idx, 2, &params, &mut stream(0, "t", 0)).unwrap();
        assert!(t.depth() <= 2);
    }
}

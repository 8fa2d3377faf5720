use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::forest::RandomForestModel;
use crate::learners::tree::TreeNode;
use crate::learners::Classifier;
use crate::seed::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImportanceMethod {
    MeanDecreaseImpurity,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub method: ImportanceMethod,
    /// Descending by score, ties by name.
    pub scores: Vec<(String, f64)>,
}

impl ImportanceReport {
    pub fn new(method: ImportanceMethod, mut scores: Vec<(String, f64)>) -> Self {
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self { method, scores }
    }

    pub fn score(&self, name: &str) -> Option<f64> {
        self.scores.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    pub fn top(&self, k: usize) -> Vec<&str> {
        self.scores.iter().take(k).map(|(n, _)| n.as_str()).collect()
    }

    /// Sums one-hot members `field=category` into a single `field` entry.
    pub fn aggregate_one_hot(&self) -> Self {
        let mut sums: BTreeMap<String, f64> = BTreeMap::new();
        for (name, score) in &self.scores {
            let parent = name.split_once('=').map_or(name.as_str(), |(f, _)| f);
            *sums.entry(parent.to_string()).or_default() += score;
        }
        Self::new(self.method, sums.into_iter().collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,score\n");
        for (name, score) in &self.scores {
            out.push_str(&format!("{name},{score}\n"));
        }
        out
    }
}

/// Mean decrease in Gini impurity: per feature, the sum over its split nodes
/// of `n_samples * impurity_decrease`, divided by the number of trees.
pub fn rf_importance(model: &RandomForestModel) -> ImportanceReport {
    let mut totals = vec![0.0; model.feature_names.len()];
    for tree in &model.trees {
        for node in &tree.nodes {
            if let TreeNode::Split {
                feature,
                impurity_decrease,
                n_samples,
                ..
            } = node
            {
                totals[*feature] += *n_samples as f64 * impurity_decrease;
            }
        }
    }
    let n = model.trees.len().max(1) as f64;
    ImportanceReport::new(
        ImportanceMethod::MeanDecreaseImpurity,
        model
            .feature_names
            .iter()
            .cloned()
            .zip(totals.into_iter().map(|t| t / n))
            .collect(),
    )
}

pub fn accuracy_score(truth: &[usize], predicted: &[usize]) -> f64 {
    let correct = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    correct as f64 / truth.len().max(1) as f64
}

/// Drop in `metric` after shuffling each feature column, averaged over `repeats`.
pub fn permutation_importance<C, M>(
    model: &C,
    x: &FeatureMatrix,
    labels: &[usize],
    metric: M,
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport>
where
    C: Classifier,
    M: Fn(&[usize], &[usize]) -> f64 + Sync,
{
    if x.n_rows == 0 {
        return Err(Error::EmptyInput);
    }
    let baseline = metric(labels, &model.predict_matrix(x)?);
    let repeats = repeats.max(1);
    let scores = (0..x.n_cols)
        .into_par_iter()
        .map(|j| {
            let mut permuted = x.clone();
            let original = x.column(j);
            let mut drop = 0.0;
            for r in 0..repeats {
                let mut column = original.clone();
                column.shuffle(&mut stream(seed, "permutation", (j * repeats + r) as u64));
                permuted.set_column(j, &column);
                drop += baseline - metric(labels, &model.predict_matrix(&permuted)?);
            }
            Ok((x.feature_names[j].clone(), drop / repeats as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImportanceReport::new(ImportanceMethod::Permutation, scores))
}

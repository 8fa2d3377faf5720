use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::{first_unsorted, LagSpec, TemporalKey};
use crate::seed::stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitKind {
    StratifiedKFold { k: usize, seed: u64 },
    RandomKFold { k: usize, seed: u64 },
    Chronological { train_fraction: f64 },
    ChronologicalWithLags { train_fraction: f64, lag_specs: Vec<LagSpec> },
}

/// A split and its realization: fold ids per row, or the train/test boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub kind: SplitKind,
    pub folds: Option<Vec<usize>>,
    pub boundary: Option<usize>,
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::BadK { k, n });
    }
    Ok(())
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream(seed, "kfold", 0));
    order
}

/// Fold id per row. Rows are shuffled, then dealt round-robin class by class
/// with one running counter, so each class is spread as evenly as possible.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = labels.len();
    check_k(k, n)?;
    let order = shuffled(n, seed);
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for &i in &order {
        by_class[labels[i]].push(i);
    }
    let mut folds = vec![0; n];
    let mut counter = 0usize;
    for rows in &by_class {
        for &i in rows {
            folds[i] = counter % k;
            counter += 1;
        }
    }
    Ok(folds)
}

/// Fold id per row after a plain seeded shuffle.
pub fn random_kfold(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(k, n)?;
    let mut folds = vec![0; n];
    for (pos, &i) in shuffled(n, seed).iter().enumerate() {
        folds[i] = pos % k;
    }
    Ok(folds)
}

pub fn fold_indices(folds: &[usize], fold: usize) -> (Vec<usize>, Vec<usize>) {
    (0..folds.len()).partition(|&i| folds[i] != fold)
}

/// First `floor(train_fraction * n)` positions train, the rest test.
pub fn chronological_split_keys(keys: &[TemporalKey], train_fraction: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadParams(format!("train_fraction {train_fraction} outside (0, 1)")));
    }
    if let Some(i) = keys.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::NotSorted(i + 1));
    }
    let n = keys.len();
    let boundary = (train_fraction * n as f64).floor() as usize;
    if boundary == 0 {
        return Err(Error::EmptySide("train"));
    }
    if boundary >= n {
        return Err(Error::EmptySide("test"));
    }
    Ok(((0..boundary).collect(), (boundary..n).collect()))
}

pub fn chronological_split(dataset: &Dataset, train_fraction: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if let Some(i) = first_unsorted(dataset) {
        return Err(Error::NotSorted(i));
    }
    let keys: Vec<TemporalKey> = dataset.records.iter().map(TemporalKey::of).collect();
    chronological_split_keys(&keys, train_fraction)
}

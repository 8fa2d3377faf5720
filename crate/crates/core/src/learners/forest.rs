use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::tree::{argmax, grow_tree, Tree, TreeParams};
use crate::learners::Classifier;
use crate::seed::stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RfParams {
    pub n_trees: usize,
    /// Features sampled per split; `None` means `floor(sqrt(p))`.
    pub mtry: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_node: usize,
}

impl Default for RfParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            mtry: None,
            max_depth: None,
            min_node: 1,
        }
    }
}

impl RfParams {
    pub fn resolved_mtry(&self, p: usize) -> usize {
        self.mtry.unwrap_or_else(|| ((p as f64).sqrt().floor() as usize).max(1))
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::BadParams("n_trees must be at least 1".into()));
        }
        let mtry = self.resolved_mtry(p);
        if mtry < 1 || mtry > p {
            return Err(Error::BadParams(format!("mtry = {mtry} outside 1..={p}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    pub trees: Vec<Tree>,
    pub n_trees: usize,
    pub mtry: usize,
    pub max_depth: Option<usize>,
    pub min_node: usize,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub oob_error: Option<f64>,
}

/// A trained forest together with the out-of-bag rows of every tree.
#[derive(Debug, Clone)]
pub struct ForestFit {
    pub model: RandomForestModel,
    pub oob_rows: Vec<Vec<usize>>,
}

/// Bootstrap sample of `n` draws with replacement plus the rows never drawn.
pub fn bootstrap<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let mut drawn = vec![false; n];
    let rows: Vec<usize> = (0..n)
        .map(|_| {
            let i = rng.random_range(0..n);
            drawn[i] = true;
            i
        })
        .collect();
    let oob = (0..n).filter(|&i| !drawn[i]).collect();
    (rows, oob)
}

pub fn rf_train(x: &FeatureMatrix, labels: &[usize], class_names: &[String], params: &RfParams, seed: u64) -> Result<ForestFit> {
    if x.n_rows == 0 {
        return Err(Error::EmptyInput);
    }
    if labels.len() != x.n_rows {
        return Err(Error::LengthMismatch {
            left: x.n_rows,
            right: labels.len(),
        });
    }
    let n_classes = class_names.len();
    if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(Error::UnknownLabel(format!("class index {bad}")));
    }
    params.validate(x.n_cols)?;
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_node: params.min_node,
        mtry: params.resolved_mtry(x.n_cols),
    };
    let grown: Vec<(Tree, Vec<usize>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, "rf-tree", t as u64);
            let (rows, oob) = bootstrap(x.n_rows, &mut rng);
            grow_tree(x, labels, &rows, n_classes, &tree_params, &mut rng).map(|tree| (tree, oob))
        })
        .collect::<Result<_>>()?;
    let (trees, oob_rows): (Vec<Tree>, Vec<Vec<usize>>) = grown.into_iter().unzip();

    let mut oob_votes = vec![vec![0usize; n_classes]; x.n_rows];
    for (tree, oob) in trees.iter().zip(&oob_rows) {
        for &i in oob {
            oob_votes[i][tree.predict(x.row(i))] += 1;
        }
    }
    let oob_error = oob_votes.iter().all(|v| v.iter().any(|&c| c > 0)).then(|| {
        let wrong = oob_votes.iter().zip(labels).filter(|(v, &l)| argmax(v) != l).count();
        wrong as f64 / x.n_rows as f64
    });

    Ok(ForestFit {
        model: RandomForestModel {
            trees,
            n_trees: params.n_trees,
            mtry: tree_params.mtry,
            max_depth: params.max_depth,
            min_node: params.min_node,
            seed,
            feature_names: x.feature_names.clone(),
            class_names: class_names.to_vec(),
            oob_error,
        },
        oob_rows,
    })
}

/// Majority vote; ties go to the lowest class index.
pub fn rf_predict(model: &RandomForestModel, x: &[f64]) -> Result<(usize, Vec<usize>)> {
    if x.len() != model.feature_names.len() {
        return Err(Error::ArityMismatch {
            expected: model.feature_names.len(),
            got: x.len(),
        });
    }
    let mut votes = vec![0usize; model.class_names.len()];
    for tree in &model.trees {
        votes[tree.predict(x)] += 1;
    }
    Ok((argmax(&votes), votes))
}

impl Classifier for RandomForestModel {
    fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn class_names(&self) -> &[String] {
        &self.class_names
    }

    fn scores(&self, x: &[f64]) -> Result<(usize, Vec<f64>)> {
        rf_predict(self, x).map(|(c, v)| (c, v.into_iter().map(|n| n as f64).collect()))
    }
}

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{crop_index, Dataset, CROPS};
use crate::error::{Error, Result};
use crate::evaluation::metrics::{classification_metrics, confusion_matrix, ConfusionMatrix};
use crate::evaluation::report::{report_core, EvaluationReport, FoldMeans, FoldSummary};
use crate::evaluation::split::{chronological_split, fold_indices, random_kfold, stratified_kfold};
use crate::features::{
    encode_apply, encode_fit, first_unsorted, make_lags, temporal_sort, EncodingConfig, EncodingModel, LagSpec,
};
use crate::learners::{rf_train, svm_train_multiclass, Model, ModelKind, RfParams, SvmParams};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Approach {
    /// Shuffled k-fold cross validation, ignoring time.
    CrossValidation,
    /// Train on the earliest 80%, test on the rest.
    TimeSeriesSplit,
    /// The time-series split with lag features added first.
    LagVariables,
}

impl Approach {
    pub const ALL: [Approach; 3] = [Approach::CrossValidation, Approach::TimeSeriesSplit, Approach::LagVariables];

    pub fn id(self) -> u8 {
        match self {
            Approach::CrossValidation => 1,
            Approach::TimeSeriesSplit => 2,
            Approach::LagVariables => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            Approach::CrossValidation => "cross-validation",
            Approach::TimeSeriesSplit => "time-series split",
            Approach::LagVariables => "lag variables",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum LearnerSpec {
    RandomForest(RfParams),
    Svm(SvmParams),
}

impl LearnerSpec {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::RandomForest => LearnerSpec::RandomForest(RfParams::default()),
            ModelKind::Svm => LearnerSpec::Svm(SvmParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            LearnerSpec::RandomForest(_) => ModelKind::RandomForest,
            LearnerSpec::Svm(_) => ModelKind::Svm,
        }
    }

    pub fn train(
        &self,
        x: &crate::features::FeatureMatrix,
        labels: &[usize],
        class_names: &[String],
        seed: u64,
    ) -> Result<Model> {
        Ok(match self {
            LearnerSpec::RandomForest(p) => Model::RandomForest(rf_train(x, labels, class_names, p, seed)?.model),
            LearnerSpec::Svm(p) => Model::Svm(svm_train_multiclass(x, labels, class_names, p)?.model),
        })
    }

    fn effective(&self, n_features: usize) -> serde_json::Value {
        match self {
            LearnerSpec::RandomForest(p) => serde_json::json!({
                "model": "random_forest",
                "n_trees": p.n_trees,
                "mtry": p.resolved_mtry(n_features),
                "max_depth": p.max_depth,
                "min_node": p.min_node,
            }),
            LearnerSpec::Svm(p) => serde_json::json!({
                "model": "svm",
                "c": p.c,
                "kernel": p.resolved_kernel(n_features),
                "tol": p.tol,
                "max_passes": p.max_passes,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub folds: usize,
    pub stratified: bool,
    pub train_fraction: f64,
    pub lag_specs: Vec<LagSpec>,
    pub encoding: EncodingConfig,
    pub ci_level: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            stratified: true,
            train_fraction: 0.8,
            lag_specs: vec![LagSpec::year_default(), LagSpec::season_default()],
            encoding: EncodingConfig::default(),
            ci_level: 0.95,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timing {
    pub total_ms: u128,
    pub train_ms: u128,
    pub predict_ms: u128,
}

#[derive(Debug, Clone)]
pub struct ApproachOutcome {
    pub report: EvaluationReport,
    pub timing: Timing,
}

pub const LEAKAGE_WARNING: &str =
    "random folds ignore temporal order: rows from later years inform training for earlier test rows";

fn crop_labels(dataset: &Dataset) -> Result<Vec<usize>> {
    dataset
        .records
        .iter()
        .map(|r| crop_index(&r.crop).ok_or_else(|| Error::UnknownLabel(r.crop.clone())))
        .collect()
}

fn class_names() -> Vec<String> {
    CROPS.iter().map(|c| c.to_string()).collect()
}

struct Evaluated {
    cm: ConfusionMatrix,
    unseen: BTreeMap<String, usize>,
    encoding: EncodingModel,
    train_ms: u128,
    predict_ms: u128,
}

/// Fits the encoding on `train` only, trains, and tallies predictions on `test`.
fn fit_and_score(
    train: &Dataset,
    test: &Dataset,
    learner: &LearnerSpec,
    encoding: &EncodingConfig,
    seed: u64,
) -> Result<Evaluated> {
    let encoding = encode_fit(train, encoding)?;
    let (x_train, y_train, _) = encode_apply(train, &encoding)?;
    let (x_test, y_test, stats) = encode_apply(test, &encoding)?;
    let start = Instant::now();
    let model = learner.train(&x_train, &y_train, &encoding.class_names, seed)?;
    let train_ms = start.elapsed().as_millis();
    let start = Instant::now();
    let predicted = model.classifier().predict_matrix(&x_test)?;
    let predict_ms = start.elapsed().as_millis();
    Ok(Evaluated {
        cm: confusion_matrix(&y_test, &predicted, &encoding.class_names)?,
        unseen: stats.unseen,
        encoding,
        train_ms,
        predict_ms,
    })
}

/// Adds the configured lag features to temporally sorted data.
pub fn lagged_dataset(sorted: &Dataset, lag_specs: &[LagSpec]) -> Result<(Dataset, Vec<String>)> {
    if let Some(row) = first_unsorted(sorted) {
        return Err(Error::ProtocolMisuse(format!(
            "lag features need temporally sorted data (row {row} is out of order)"
        )));
    }
    let mut data = sorted.clone();
    let mut names = Vec::new();
    for spec in lag_specs {
        spec.validate()?;
        let (next, _) = make_lags(&data, spec)?;
        names.extend(spec.column_names());
        data = next;
    }
    Ok((data, names))
}

pub fn run_approach(
    dataset: &Dataset,
    approach: Approach,
    learner: &LearnerSpec,
    protocol: &ProtocolConfig,
    seed: u64,
    config_hash: &str,
) -> Result<ApproachOutcome> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let started = Instant::now();
    let names = class_names();
    match approach {
        Approach::CrossValidation => {
            let labels = crop_labels(dataset)?;
            let k = protocol.folds;
            let folds = if protocol.stratified {
                stratified_kfold(&labels, k, seed)?
            } else {
                random_kfold(labels.len(), k, seed)?
            };
            let per_fold = (0..k)
                .into_par_iter()
                .map(|f| {
                    let (train_idx, test_idx) = fold_indices(&folds, f);
                    let train = dataset.subset(&train_idx);
                    let test = dataset.subset(&test_idx);
                    let ev = fit_and_score(
                        &train,
                        &test,
                        learner,
                        &protocol.encoding,
                        derive_seed(seed, "fold-model", f as u64),
                    )?;
                    Ok((train_idx.len(), test_idx.len(), ev))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut pooled = ConfusionMatrix::zeros(&names);
            let mut unseen: BTreeMap<String, usize> = BTreeMap::new();
            let mut summaries = Vec::with_capacity(k);
            let mut timing = Timing::default();
            let mut n_features = 0;
            for (f, (n_train, n_test, ev)) in per_fold.iter().enumerate() {
                pooled.add(&ev.cm)?;
                for (field, count) in &ev.unseen {
                    *unseen.entry(field.clone()).or_default() += count;
                }
                let m = classification_metrics(&ev.cm)?;
                summaries.push(FoldSummary {
                    fold: f,
                    n_train: *n_train,
                    n_test: *n_test,
                    accuracy: m.accuracy,
                    kappa: m.kappa,
                    macro_f1: m.macro_f1,
                });
                timing.train_ms += ev.train_ms;
                timing.predict_ms += ev.predict_ms;
                n_features = n_features.max(ev.encoding.n_features());
            }
            let split = format!(
                "{}{k}-fold cross validation over {} rows",
                if protocol.stratified { "stratified " } else { "" },
                dataset.len()
            );
            let means = FoldMeans::of(&summaries);
            let report = build_report(
                approach,
                learner,
                protocol,
                seed,
                config_hash,
                split,
                pooled,
                (dataset.len() - dataset.len() / k, dataset.len()),
                n_features,
                unseen,
                Vec::new(),
                Some((summaries, means)),
            )?;
            timing.total_ms = started.elapsed().as_millis();
            Ok(ApproachOutcome { report, timing })
        }
        Approach::TimeSeriesSplit | Approach::LagVariables => {
            let sorted = temporal_sort(dataset);
            let (data, lag_columns) = if approach == Approach::LagVariables {
                lagged_dataset(&sorted, &protocol.lag_specs)?
            } else {
                (sorted, Vec::new())
            };
            let (train_idx, test_idx) = chronological_split(&data, protocol.train_fraction)?;
            let train = data.subset(&train_idx);
            let test = data.subset(&test_idx);
            let boundary_year = test.records.first().map(|r| r.year);
            let ev = fit_and_score(
                &train,
                &test,
                learner,
                &protocol.encoding,
                derive_seed(seed, "model", approach.id() as u64),
            )?;
            let split = format!(
                "chronological {:.0}/{:.0} split (train {} rows, test {} rows from {})",
                protocol.train_fraction * 100.0,
                (1.0 - protocol.train_fraction) * 100.0,
                train.len(),
                test.len(),
                boundary_year.map_or("-".to_string(), |y| y.to_string())
            );
            let report = build_report(
                approach,
                learner,
                protocol,
                seed,
                config_hash,
                split,
                ev.cm,
                (train.len(), test.len()),
                ev.encoding.n_features(),
                ev.unseen,
                lag_columns,
                None,
            )?;
            Ok(ApproachOutcome {
                report,
                timing: Timing {
                    total_ms: started.elapsed().as_millis(),
                    train_ms: ev.train_ms,
                    predict_ms: ev.predict_ms,
                },
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    approach: Approach,
    learner: &LearnerSpec,
    protocol: &ProtocolConfig,
    seed: u64,
    config_hash: &str,
    split: String,
    cm: ConfusionMatrix,
    (n_train, n_test): (usize, usize),
    n_features: usize,
    unseen: BTreeMap<String, usize>,
    lag_columns: Vec<String>,
    folds: Option<(Vec<FoldSummary>, FoldMeans)>,
) -> Result<EvaluationReport> {
    let core = report_core(&cm, protocol.ci_level)?;
    let (folds, fold_means) = match folds {
        Some((f, m)) => (Some(f), Some(m)),
        None => (None, None),
    };
    Ok(EvaluationReport {
        approach: approach.id(),
        approach_name: approach.name().to_string(),
        model: learner.kind().id().to_string(),
        seed,
        config_hash: config_hash.to_string(),
        split,
        leakage_warning: (approach == Approach::CrossValidation).then(|| LEAKAGE_WARNING.to_string()),
        n_train,
        n_test,
        n_features,
        accuracy: core.accuracy,
        kappa: core.kappa,
        expected_agreement: core.expected_agreement,
        macro_f1: core.macro_f1,
        ci_method: "clopper-pearson".to_string(),
        ci_level: protocol.ci_level,
        accuracy_ci: core.accuracy_ci,
        nir: core.nir,
        p_value_acc_gt_nir: core.p_value,
        per_class: core.per_class,
        confusion: cm,
        folds,
        fold_means,
        unseen_categories: unseen,
        lag_columns,
        learner: learner.effective(n_features),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{fixtures::record, Season};

    /// Crops separable on temperature alone.
    fn separable(n: usize) -> Dataset {
        let crops = ["Wheat", "Paddy", "Maize"];
        let recs = (0..n)
            .map(|i| {
                let c = i % 3;
                let season = if i % 2 == 0 { Season::Rabi } else { Season::Kharif };
                let mut r = record("Punjab", 2011 + (i % 4) as i32, season, crops[c]);
                r.temperature = 10.0 * c as f64 + (i as f64 * 0.7).sin();
                r.humidity = 50.0 + (i as f64 * 1.3).cos();
                r.msp = 1000.0 + (i % 4) as f64 * 10.0;
                r
            })
            .collect();
        Dataset::new(recs)
    }

    fn protocol() -> ProtocolConfig {
        let mut p = ProtocolConfig::default();
        p.encoding.numeric = vec!["temperature".into(), "humidity".into(), "msp".into()];
        p.lag_specs = vec![LagSpec {
            columns: vec!["msp".into()],
            max_order: 2,
            ..LagSpec::year_default()
        }];
        p
    }

    #[test]
    fn cross_validation_on_separable_data() {
        let learner = LearnerSpec::RandomForest(RfParams {
            n_trees: 20,
            ..Default::default()
        });
        let out = run_approach(&separable(90), Approach::CrossValidation, &learner, &protocol(), 1, "h").unwrap();
        assert!(out.report.accuracy > 0.97);
        assert_eq!(out.report.folds.as_ref().unwrap().len(), 10);
        assert!(out.report.leakage_warning.is_some());
        assert_eq!(out.report.confusion.total(), 90);
    }

    #[test]
    fn reports_are_reproducible() {
        let learner = LearnerSpec::Svm(SvmParams::default());
        for approach in Approach::ALL {
            let a = run_approach(&separable(60), approach, &learner, &protocol(), 3, "h").unwrap();
            let b = run_approach(&separable(60), approach, &learner, &protocol(), 3, "h").unwrap();
            assert_eq!(a.report.to_json().unwrap(), b.report.to_json().unwrap());
            assert_eq!(a.report.leakage_warning.is_some(), approach == Approach::CrossValidation);
        }
    }

    #[test]
    fn lag_approach_adds_columns_and_requires_order() {
        let learner = LearnerSpec::RandomForest(RfParams {
            n_trees: 5,
            ..Default::default()
        });
        let out = run_approach(&separable(60), Approach::LagVariables, &learner, &protocol(), 3, "h").unwrap();
        assert_eq!(out.report.lag_columns, ["lag1_msp", "lag2_msp"]);
        let mut shuffled = temporal_sort(&separable(20));
        shuffled.records.reverse();
        assert!(matches!(
            lagged_dataset(&shuffled, &protocol().lag_specs),
            Err(Error::ProtocolMisuse(_))
        ));
    }
}

//! The three evaluation approaches, splitting, and the metric suite.

mod approach;
mod metrics;
mod report;
mod split;

pub use approach::{
    lagged_dataset, run_approach, Approach, ApproachOutcome, LearnerSpec, ProtocolConfig, Timing, LEAKAGE_WARNING,
};
pub use metrics::{
    accuracy_ci, binomial_upper_tail, classification_metrics, confusion_matrix, confusion_matrix_from_names, nir_test,
    ClassMetrics, ConfusionMatrix, Metrics,
};
pub use report::{
    compare_reports, comparison_csv, report_core, report_text, ComparisonRow, EvaluationReport, FoldMeans, FoldSummary,
    ReportCore,
};
pub use split::{
    chronological_split, chronological_split_keys, fold_indices, random_kfold, stratified_kfold, SplitKind, SplitPlan,
};

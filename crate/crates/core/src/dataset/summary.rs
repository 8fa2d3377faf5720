use serde::Serialize;

use crate::dataset::record::{ColumnRef, Dataset, NumericField};
use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub column: String,
    pub count: usize,
    pub missing: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation.
    pub std: f64,
}

/// Summary statistics for every numeric column, quartiles by linear interpolation.
/// Columns with no present values report NaN statistics.
pub fn summarize_columns(dataset: &Dataset) -> Result<Vec<ColumnSummary>> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let columns = NumericField::MEASUREMENTS
        .into_iter()
        .map(ColumnRef::Builtin)
        .chain((0..dataset.extra_columns.len()).map(ColumnRef::Extra));
    Ok(columns
        .map(|col| {
            let values: Vec<f64> = dataset.records.iter().filter_map(|r| r.get(col)).collect();
            summarize(dataset.column_name(col), &values, dataset.len() - values.len())
        })
        .collect())
}

pub fn summarize(column: &str, values: &[f64], missing: usize) -> ColumnSummary {
    if values.is_empty() {
        return ColumnSummary {
            column: column.to_string(),
            count: 0,
            missing,
            min: f64::NAN,
            q1: f64::NAN,
            median: f64::NAN,
            q3: f64::NAN,
            max: f64::NAN,
            mean: f64::NAN,
            std: f64::NAN,
        };
    }
    let sorted = stats::sorted_copy(values);
    ColumnSummary {
        column: column.to_string(),
        count: values.len(),
        missing,
        min: sorted[0],
        q1: stats::quantile_sorted(&sorted, 0.25),
        median: stats::quantile_sorted(&sorted, 0.5),
        q3: stats::quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        mean: stats::mean(values),
        std: stats::sample_std(values),
    }
}

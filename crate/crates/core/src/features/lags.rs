use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{CategoricalField, ColumnRef, Dataset, NumericField};
use crate::error::{Error, Result};
use crate::features::temporal::ensure_sorted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagOrder {
    /// Rows of a group taken in year order.
    Year,
    /// Groups that include the season, ordered by (year, season), so the
    /// previous row is the same season in an earlier year.
    SeasonWithinGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImputePolicy {
    /// Median of the source column over the current row and its in-group
    /// predecessors. Uses no later rows.
    GroupMedian,
    /// The current row's own value of the source column.
    CarryCurrent,
    /// Rows with any missing lag are removed.
    DropRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagSpec {
    pub columns: Vec<String>,
    pub group_keys: Vec<CategoricalField>,
    pub order_key: LagOrder,
    pub max_order: usize,
    pub impute_policy: ImputePolicy,
}

impl LagSpec {
    /// Economic columns lagged over years within (state, crop).
    pub fn year_default() -> Self {
        Self {
            columns: [
                NumericField::OperationalCost,
                NumericField::FixedCost,
                NumericField::TotalCost,
                NumericField::Msp,
            ]
            .iter()
            .map(|f| f.name().to_string())
            .collect(),
            group_keys: vec![CategoricalField::State, CategoricalField::Crop],
            order_key: LagOrder::Year,
            max_order: 5,
            impute_policy: ImputePolicy::GroupMedian,
        }
    }

    /// Weather columns lagged within (state, crop, season).
    pub fn season_default() -> Self {
        Self {
            columns: [
                NumericField::Temperature,
                NumericField::Precipitation,
                NumericField::WindSpeed,
                NumericField::Humidity,
            ]
            .iter()
            .map(|f| f.name().to_string())
            .collect(),
            group_keys: vec![CategoricalField::State, CategoricalField::Crop, CategoricalField::Season],
            order_key: LagOrder::SeasonWithinGroup,
            max_order: 7,
            impute_policy: ImputePolicy::GroupMedian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_order < 1 {
            return Err(Error::BadParams("lag max_order must be at least 1".into()));
        }
        if self.group_keys.is_empty() {
            return Err(Error::BadParams("lag group_keys must not be empty".into()));
        }
        if self.columns.is_empty() {
            return Err(Error::BadParams("lag columns must not be empty".into()));
        }
        Ok(())
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| (1..=self.max_order).map(move |j| lag_name(j, c)))
            .collect()
    }
}

pub fn lag_name(order: usize, column: &str) -> String {
    format!("lag{order}_{column}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagColumnReport {
    pub name: String,
    pub missing: usize,
    pub imputed: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LagReport {
    pub columns: Vec<LagColumnReport>,
    pub rows_dropped: usize,
}

/// Row indices of each group, in dataset order; groups in first-seen order.
pub fn group_rows(dataset: &Dataset, keys: &[CategoricalField]) -> Vec<Vec<usize>> {
    let mut index: HashMap<Vec<&str>, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, r) in dataset.records.iter().enumerate() {
        let key: Vec<&str> = keys.iter().map(|k| r.category(*k)).collect();
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn resolve_columns(dataset: &Dataset, spec: &LagSpec) -> Result<Vec<ColumnRef>> {
    spec.columns.iter().map(|c| dataset.resolve(c)).collect()
}

/// Un-imputed lag values: `out[c * max_order + (j - 1)][row]` is column `c`
/// at the `j`-th preceding row of `row`'s group, or `None` without enough history.
pub fn lag_values(dataset: &Dataset, spec: &LagSpec) -> Result<Vec<Vec<Option<f64>>>> {
    spec.validate()?;
    ensure_sorted(dataset)?;
    let columns = resolve_columns(dataset, spec)?;
    let groups = group_rows(dataset, &spec.group_keys);
    let n = dataset.len();
    let mut out = Vec::with_capacity(columns.len() * spec.max_order);
    for col in &columns {
        for j in 1..=spec.max_order {
            let mut values = vec![None; n];
            for rows in &groups {
                for t in j..rows.len() {
                    values[rows[t]] = dataset.records[rows[t - j]].get(*col);
                }
            }
            out.push(values);
        }
    }
    Ok(out)
}

/// Expanding median of `col` over each group: entry for row `rows[t]` is the
/// median of the present values at `rows[0..=t]`.
fn expanding_medians(dataset: &Dataset, groups: &[Vec<usize>], col: ColumnRef) -> Vec<Option<f64>> {
    let mut out = vec![None; dataset.len()];
    for rows in groups {
        let mut sorted: Vec<f64> = Vec::with_capacity(rows.len());
        for &r in rows {
            if let Some(v) = dataset.records[r].get(col) {
                let at = sorted.partition_point(|x| *x < v);
                sorted.insert(at, v);
            }
            if !sorted.is_empty() {
                out[r] = Some(crate::stats::quantile_sorted(&sorted, 0.5));
            }
        }
    }
    out
}

/// Appends `lag{j}_{column}` for every column and order `1..=max_order`,
/// resolving missing history according to `spec.impute_policy`.
pub fn make_lags(dataset: &Dataset, spec: &LagSpec) -> Result<(Dataset, LagReport)> {
    let raw = lag_values(dataset, spec)?;
    let columns = resolve_columns(dataset, spec)?;
    for name in spec.column_names() {
        if dataset.extra_columns.contains(&name) {
            return Err(Error::BadParams(format!("lag column '{name}' already exists")));
        }
    }
    let groups = group_rows(dataset, &spec.group_keys);
    let mut out = dataset.clone();
    let mut report = LagReport::default();
    let mut any_missing = vec![false; dataset.len()];

    for (c, col) in columns.iter().enumerate() {
        let fill: Vec<Option<f64>> = match spec.impute_policy {
            ImputePolicy::GroupMedian => expanding_medians(dataset, &groups, *col),
            ImputePolicy::CarryCurrent => dataset.records.iter().map(|r| r.get(*col)).collect(),
            ImputePolicy::DropRow => vec![None; dataset.len()],
        };
        for j in 1..=spec.max_order {
            let mut values = raw[c * spec.max_order + (j - 1)].clone();
            let mut missing = 0;
            let mut imputed = 0;
            for (row, v) in values.iter_mut().enumerate() {
                if v.is_none() {
                    missing += 1;
                    *v = fill[row];
                    if v.is_some() {
                        imputed += 1;
                    } else {
                        any_missing[row] = true;
                    }
                }
            }
            let name = lag_name(j, &spec.columns[c]);
            report.columns.push(LagColumnReport {
                name: name.clone(),
                missing,
                imputed,
            });
            out.add_extra_column(&name, dataset.column_name(*col), values);
        }
    }

    if spec.impute_policy == ImputePolicy::DropRow {
        let keep: Vec<usize> = (0..out.len()).filter(|&i| !any_missing[i]).collect();
        report.rows_dropped = out.len() - keep.len();
        out = out.subset(&keep);
    }
    Ok((out, report))
}

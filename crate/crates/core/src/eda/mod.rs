//! Exploratory statistics: skewness, Pearson correlation, OLS-based VIF,
//! grouped aggregates, IQR outlier flags, and their CSV exports.

mod grouped;
mod moments;
mod ols;
mod vif;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use grouped::{grouped_aggregate, GroupBy, GroupStat, GroupValue};
pub use moments::{correlation_matrix, correlation_matrix_of, pearson_correlation, skewness, CorrelationMatrix};
pub use ols::{ols_fit, OlsFit};
pub use vif::{vif_from_r_squared, vif_of, vif_table, VifEntry, VifSeverity, PERFECT_COLLINEARITY_R2};

use crate::dataset::{Dataset, NumericField};
use crate::error::{Error, Result};
use crate::stats;

/// Flags values outside `[Q1 - 1.5 IQR, Q3 + 1.5 IQR]`.
pub fn iqr_flags(values: &[f64]) -> Result<Vec<bool>> {
    if values.len() < 4 {
        return Err(Error::TooFewValues {
            needed: 4,
            got: values.len(),
        });
    }
    let (lo, hi) = stats::iqr_fences(values, 1.5);
    Ok(values.iter().map(|v| *v < lo || *v > hi).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupPlot {
    pub value: String,
    pub group: String,
    pub stat: GroupStat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EdaConfig {
    pub skewness_columns: Vec<String>,
    pub correlation_columns: Vec<String>,
    pub vif_columns: Vec<String>,
    pub groups: Vec<GroupPlot>,
}

fn names(fields: &[NumericField]) -> Vec<String> {
    fields.iter().map(|f| f.name().to_string()).collect()
}

impl Default for EdaConfig {
    fn default() -> Self {
        let measurements = names(&NumericField::MEASUREMENTS);
        // total_cost is operational + fixed and would alias every auxiliary regression
        let vif = measurements.iter().filter(|c| *c != "total_cost").cloned().collect();
        let plot = |value: &str, group: &str, stat| GroupPlot {
            value: value.to_string(),
            group: group.to_string(),
            stat,
        };
        Self {
            skewness_columns: measurements.clone(),
            correlation_columns: measurements,
            vif_columns: vif,
            groups: vec![
                plot("temperature", "season", GroupStat::Std),
                plot("humidity", "season", GroupStat::Std),
                plot("wind_speed", "season", GroupStat::Std),
                plot("precipitation", "season", GroupStat::Std),
                plot("msp", "year", GroupStat::Mean),
                plot("operational_cost", "year", GroupStat::Mean),
                plot("fixed_cost", "year", GroupStat::Mean),
            ],
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else if v.is_infinite() {
        "Inf".to_string()
    } else {
        "NA".to_string()
    }
}

pub fn skewness_csv(dataset: &Dataset, columns: &[String]) -> Result<String> {
    let mut out = String::from("column,skew\n");
    for c in columns {
        let values = dataset.numeric_column(c)?;
        let skew = match skewness(&values) {
            Ok(s) => fmt_num(s),
            Err(Error::ZeroVariance(_)) | Err(Error::TooFewValues { .. }) => "NA".to_string(),
            Err(e) => return Err(e),
        };
        out.push_str(&format!("{c},{skew}\n"));
    }
    Ok(out)
}

pub fn correlation_csv(matrix: &CorrelationMatrix) -> String {
    let mut out = format!("column,{}\n", matrix.labels.join(","));
    for (label, row) in matrix.labels.iter().zip(&matrix.values) {
        let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
        out.push_str(&format!("{label},{}\n", cells.join(",")));
    }
    out
}

pub fn vif_csv(entries: &[VifEntry]) -> String {
    let mut out = String::from("column,r2,vif,severity\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{:?}\n",
            e.column,
            fmt_num(e.r_squared),
            fmt_num(e.vif),
            e.severity
        ));
    }
    out
}

pub fn group_csv(group: &str, stat: GroupStat, rows: &[GroupValue]) -> String {
    let mut out = format!("{group},{}\n", stat.name());
    for r in rows {
        out.push_str(&format!("{},{}\n", r.group, fmt_num(r.value)));
    }
    out
}

/// Writes `skewness.csv`, `correlation.csv`, `vif.csv` and one
/// `group_<stat>_<col>_by_<grp>.csv` per configured group plot.
pub fn write_eda_outputs(dataset: &Dataset, config: &EdaConfig, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let path = dir.join("skewness.csv");
    write_file(&path, &skewness_csv(dataset, &config.skewness_columns)?)?;
    written.push(path);

    let cols: Vec<&str> = config.correlation_columns.iter().map(String::as_str).collect();
    let path = dir.join("correlation.csv");
    write_file(&path, &correlation_csv(&correlation_matrix(dataset, &cols)?))?;
    written.push(path);

    let cols: Vec<&str> = config.vif_columns.iter().map(String::as_str).collect();
    let path = dir.join("vif.csv");
    write_file(&path, &vif_csv(&vif_table(dataset, &cols)?))?;
    written.push(path);

    for g in &config.groups {
        let group = GroupBy::parse(&g.group)?;
        let rows = grouped_aggregate(dataset, &g.value, group, g.stat)?;
        let path = dir.join(format!("group_{}_{}_by_{}.csv", g.stat.name(), g.value, group.name()));
        write_file(&path, &group_csv(group.name(), g.stat, &rows))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iqr_flag_examples() {
        // Q1 = 2, Q3 = 4, IQR = 2, fences [-1, 7]
        assert_eq!(
            iqr_flags(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap(),
            [false, false, false, false, true]
        );
        assert!(iqr_flags(&[1.0, 2.0, 3.0, 4.0]).unwrap().iter().all(|f| !f));
        assert!(iqr_flags(&[3.0; 6]).unwrap().iter().all(|f| !f));
        assert!(matches!(iqr_flags(&[1.0, 2.0, 3.0]), Err(Error::TooFewValues { .. })));
    }

    #[test]
    fn vif_csv_marks_infinite() {
        let e = VifEntry {
            column: "total_cost".into(),
            r_squared: 1.0,
            vif: f64::INFINITY,
            severity: VifSeverity::High,
            perfect_collinearity: true,
        };
        assert_eq!(vif_csv(&[e]), "column,r2,vif,severity\ntotal_cost,1,Inf,High\n");
    }
}

use serde::Serialize;

use crate::dataset::Dataset;
use crate::eda::ols::projection_r_squared;
use crate::error::{Error, Result};

/// Auxiliary R² at or above this is treated as exact collinearity.
pub const PERFECT_COLLINEARITY_R2: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VifSeverity {
    Low,
    Moderate,
    High,
}

impl VifSeverity {
    /// Low below 5, Moderate from 5 to 10, High above 10.
    pub fn of(vif: f64) -> Self {
        if vif < 5.0 {
            VifSeverity::Low
        } else if vif <= 10.0 {
            VifSeverity::Moderate
        } else {
            VifSeverity::High
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VifEntry {
    pub column: String,
    pub r_squared: f64,
    /// `f64::INFINITY` when `perfect_collinearity` is set.
    pub vif: f64,
    pub severity: VifSeverity,
    pub perfect_collinearity: bool,
}

pub fn vif_from_r_squared(r_squared: f64) -> f64 {
    1.0 / (1.0 - r_squared)
}

/// VIF of each column regressed (with intercept) on all the others.
pub fn vif_of(labels: &[String], columns: &[Vec<f64>]) -> Result<Vec<VifEntry>> {
    let p = columns.len();
    if p < 3 {
        return Err(Error::TooFewValues { needed: 3, got: p });
    }
    let n = columns[0].len();
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            left: n,
            right: bad.len(),
        });
    }
    if n <= p {
        return Err(Error::DimensionMismatch(format!(
            "need more rows than columns, got n = {n}, p = {p}"
        )));
    }
    (0..p)
        .map(|c| {
            let mut predictors = vec![vec![1.0; n]];
            predictors.extend(columns.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()));
            let r_squared = projection_r_squared(&predictors, &columns[c]).map_err(|e| match e {
                Error::ZeroVariance(_) => Error::ZeroVariance(Some(labels[c].clone())),
                other => other,
            })?;
            let perfect = r_squared >= PERFECT_COLLINEARITY_R2;
            let vif = if perfect {
                f64::INFINITY
            } else {
                vif_from_r_squared(r_squared)
            };
            Ok(VifEntry {
                column: labels[c].clone(),
                r_squared,
                vif,
                severity: VifSeverity::of(vif),
                perfect_collinearity: perfect,
            })
        })
        .collect()
}

pub fn vif_table(dataset: &Dataset, columns: &[&str]) -> Result<Vec<VifEntry>> {
    let data = columns
        .iter()
        .map(|c| dataset.numeric_column(c))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
    vif_of(&labels, &data)
}

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Moment skewness `g1 = m3 / m2^(3/2)` with central moments taken over `n`.
pub fn skewness(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewValues { needed: 3, got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let (mut m2, mut m3) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n as f64;
    m3 /= n as f64;
    if m2 == 0.0 || m2.sqrt() <= 1e-12 * mean.abs() {
        return Err(Error::ZeroVariance(None));
    }
    Ok(m3 / m2.powf(1.5))
}

/// Sample Pearson correlation, clamped to [-1, 1].
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewValues { needed: 2, got: n });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance(None));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }
}

pub fn correlation_matrix_of(labels: &[String], columns: &[Vec<f64>]) -> Result<CorrelationMatrix> {
    let p = columns.len();
    if p < 2 {
        return Err(Error::TooFewValues { needed: 2, got: p });
    }
    let mut values = vec![vec![0.0; p]; p];
    for i in 0..p {
        values[i][i] = 1.0;
        for j in (i + 1)..p {
            let r = pearson_correlation(&columns[i], &columns[j]).map_err(|e| match e {
                Error::ZeroVariance(_) => Error::ZeroVariance(Some(format!("pair ({}, {})", labels[i], labels[j]))),
                other => other,
            })?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        labels: labels.to_vec(),
        values,
    })
}

/// Pairwise Pearson correlations of the named numeric columns.
pub fn correlation_matrix(dataset: &Dataset, columns: &[&str]) -> Result<CorrelationMatrix> {
    let data = columns
        .iter()
        .map(|c| dataset.numeric_column(c))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
    correlation_matrix_of(&labels, &data)
}

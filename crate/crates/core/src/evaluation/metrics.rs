use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// `counts[i][j]` = rows of true class `i` predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn zeros(class_names: &[String]) -> Self {
        let k = class_names.len();
        Self {
            class_names: class_names.to_vec(),
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn from_counts(class_names: &[String], counts: Vec<Vec<usize>>) -> Result<Self> {
        let k = class_names.len();
        if counts.len() != k || counts.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch(format!("confusion matrix must be {k} x {k}")));
        }
        Ok(Self {
            class_names: class_names.to_vec(),
            counts,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, c: usize) -> usize {
        self.counts[c].iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> usize {
        self.counts.iter().map(|r| r[c]).sum()
    }

    pub fn tp(&self, c: usize) -> usize {
        self.counts[c][c]
    }

    pub fn fp(&self, c: usize) -> usize {
        self.col_sum(c) - self.tp(c)
    }

    pub fn fn_(&self, c: usize) -> usize {
        self.row_sum(c) - self.tp(c)
    }

    pub fn tn(&self, c: usize) -> usize {
        self.total() + self.tp(c) - self.row_sum(c) - self.col_sum(c)
    }

    pub fn add(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.class_names != self.class_names {
            return Err(Error::DimensionMismatch("confusion matrices over different classes".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }
}

pub fn confusion_matrix(truth: &[usize], predicted: &[usize], class_names: &[String]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: predicted.len(),
        });
    }
    let k = class_names.len();
    let mut cm = ConfusionMatrix::zeros(class_names);
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= k || p >= k {
            return Err(Error::UnknownLabel(format!("class index {}", t.max(p))));
        }
        cm.counts[t][p] += 1;
    }
    Ok(cm)
}

/// Same as [`confusion_matrix`] with labels given by name.
pub fn confusion_matrix_from_names(truth: &[&str], predicted: &[&str], class_names: &[String]) -> Result<ConfusionMatrix> {
    let index = |s: &str| {
        class_names
            .iter()
            .position(|c| c == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    };
    let t = truth.iter().map(|s| index(s)).collect::<Result<Vec<_>>>()?;
    let p = predicted.iter().map(|s| index(s)).collect::<Result<Vec<_>>>()?;
    confusion_matrix(&t, &p, class_names)
}

/// Per-class statistics; `None` marks a 0/0 ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub support: usize,
    pub precision: Option<f64>,
    /// Also reported as sensitivity.
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: Option<f64>,
    pub prevalence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// `None` when expected agreement is 1.
    pub kappa: Option<f64>,
    pub expected_agreement: f64,
    pub per_class: Vec<ClassMetrics>,
    /// Mean F1 over classes where it is defined.
    pub macro_f1: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn classification_metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let n = total as f64;
    let accuracy = cm.correct() as f64 / n;
    let expected_agreement: f64 = (0..cm.n_classes())
        .map(|c| cm.row_sum(c) as f64 * cm.col_sum(c) as f64)
        .sum::<f64>()
        / (n * n);
    let kappa = (expected_agreement < 1.0).then(|| (accuracy - expected_agreement) / (1.0 - expected_agreement));
    let per_class: Vec<ClassMetrics> = (0..cm.n_classes())
        .map(|c| {
            let (tp, fp, fn_, tn) = (cm.tp(c), cm.fp(c), cm.fn_(c), cm.tn(c));
            let precision = ratio(tp, tp + fp);
            let recall = ratio(tp, tp + fn_);
            let f1 = match (precision, recall) {
                (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
                (Some(_), Some(_)) => Some(0.0),
                _ => None,
            };
            ClassMetrics {
                class: cm.class_names[c].clone(),
                support: tp + fn_,
                precision,
                recall,
                specificity: ratio(tn, tn + fp),
                f1,
                prevalence: (tp + fn_) as f64 / n,
            }
        })
        .collect();
    let defined: Vec<f64> = per_class.iter().filter_map(|m| m.f1).collect();
    let macro_f1 = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(Metrics {
        accuracy,
        kappa,
        expected_agreement,
        per_class,
        macro_f1,
    })
}

/// Smallest `p` in [0, 1] with `f(p) >= target` for increasing `f`.
fn bisect_increasing<F: Fn(f64) -> f64>(f: F, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Exact Clopper-Pearson interval for `correct` successes out of `total`,
/// from Beta quantiles found by bisection on the regularized incomplete beta.
pub fn accuracy_ci(correct: usize, total: usize, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::BadLevel(level));
    }
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    if correct > total {
        return Err(Error::BadParams(format!("{correct} correct out of {total}")));
    }
    let alpha = 1.0 - level;
    let (x, n) = (correct as f64, total as f64);
    let low = if correct == 0 {
        0.0
    } else {
        bisect_increasing(|p| beta_reg(x, n - x + 1.0, p), alpha / 2.0)
    };
    let high = if correct == total {
        1.0
    } else {
        bisect_increasing(|p| beta_reg(x + 1.0, n - x, p), 1.0 - alpha / 2.0)
    };
    Ok((low, high))
}

/// `P(X >= k)` for `X ~ Binomial(n, p)`.
pub fn binomial_upper_tail(k: usize, n: usize, p: f64) -> f64 {
    if k == 0 {
        1.0
    } else if k > n {
        0.0
    } else if p <= 0.0 {
        0.0
    } else if p >= 1.0 {
        1.0
    } else {
        beta_reg(k as f64, (n - k + 1) as f64, p)
    }
}

/// No-information rate (largest true-class share) and the one-sided exact
/// binomial p-value for accuracy exceeding it.
pub fn nir_test(cm: &ConfusionMatrix) -> Result<(f64, f64)> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let largest = (0..cm.n_classes()).map(|c| cm.row_sum(c)).max().unwrap_or(0);
    let nir = largest as f64 / total as f64;
    Ok((nir, binomial_upper_tail(cm.correct(), total, nir)))
}

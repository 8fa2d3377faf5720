use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evaluation::metrics::{accuracy_ci, classification_metrics, nir_test, ClassMetrics, ConfusionMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub kappa: Option<f64>,
    pub macro_f1: Option<f64>,
}

/// Means of the per-fold metrics (undefined fold values are skipped).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMeans {
    pub accuracy: f64,
    pub kappa: Option<f64>,
    pub macro_f1: Option<f64>,
}

impl FoldMeans {
    pub fn of(folds: &[FoldSummary]) -> Self {
        let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        Self {
            accuracy: mean(folds.iter().map(|f| f.accuracy).collect()).unwrap_or(0.0),
            kappa: mean(folds.iter().filter_map(|f| f.kappa).collect()),
            macro_f1: mean(folds.iter().filter_map(|f| f.macro_f1).collect()),
        }
    }
}

/// Canonical, deterministic record of one (approach, model) run. Wall-clock
/// timings are kept out of it so identical runs serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub approach: u8,
    pub approach_name: String,
    pub model: String,
    pub seed: u64,
    pub config_hash: String,
    pub split: String,
    pub leakage_warning: Option<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    pub accuracy: f64,
    pub kappa: Option<f64>,
    pub expected_agreement: f64,
    pub macro_f1: Option<f64>,
    pub ci_method: String,
    pub ci_level: f64,
    pub accuracy_ci: (f64, f64),
    pub nir: f64,
    pub p_value_acc_gt_nir: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
    pub folds: Option<Vec<FoldSummary>>,
    pub fold_means: Option<FoldMeans>,
    pub unseen_categories: BTreeMap<String, usize>,
    pub lag_columns: Vec<String>,
    pub learner: serde_json::Value,
}

/// Metric block of a report, computed from a (pooled) confusion matrix.
pub struct ReportCore {
    pub accuracy: f64,
    pub kappa: Option<f64>,
    pub expected_agreement: f64,
    pub macro_f1: Option<f64>,
    pub accuracy_ci: (f64, f64),
    pub nir: f64,
    pub p_value: f64,
    pub per_class: Vec<ClassMetrics>,
}

pub fn report_core(cm: &ConfusionMatrix, ci_level: f64) -> Result<ReportCore> {
    let m = classification_metrics(cm)?;
    let ci = accuracy_ci(cm.correct(), cm.total(), ci_level)?;
    let (nir, p_value) = nir_test(cm)?;
    Ok(ReportCore {
        accuracy: m.accuracy,
        kappa: m.kappa,
        expected_agreement: m.expected_agreement,
        macro_f1: m.macro_f1,
        accuracy_ci: ci,
        nir,
        p_value,
        per_class: m.per_class,
    })
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// File stem used when reports are written to a directory.
    pub fn file_stem(&self) -> String {
        format!("report_a{}_{}", self.approach, self.model)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

fn fmt_p(p: f64) -> String {
    if p < 2.2e-16 {
        "< 2.2e-16".to_string()
    } else if p < 1e-4 {
        format!("{p:.3e}")
    } else {
        format!("{p:.4}")
    }
}

/// Human-readable summary: confusion matrix, overall statistics and
/// statistics by class.
pub fn report_text(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Approach {} ({}), model {}",
        report.approach, report.approach_name, report.model
    );
    let _ = writeln!(out, "Split: {}", report.split);
    if let Some(w) = &report.leakage_warning {
        let _ = writeln!(out, "Warning: {w}");
    }
    let _ = writeln!(out, "\nConfusion Matrix and Statistics\n");
    let cm = &report.confusion;
    let present: Vec<usize> = (0..cm.n_classes()).filter(|&c| cm.row_sum(c) + cm.col_sum(c) > 0).collect();
    let width = present.iter().map(|&c| cm.class_names[c].len()).max().unwrap_or(0).max(10);
    let _ = write!(out, "{:>width$}", "Prediction");
    for &c in &present {
        let _ = write!(out, " {:>7}", abbreviate(&cm.class_names[c]));
    }
    out.push('\n');
    for &p in &present {
        let _ = write!(out, "{:>width$}", cm.class_names[p]);
        for &t in &present {
            let _ = write!(out, " {:>7}", cm.counts[t][p]);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "(columns: reference)\n\nOverall Statistics\n");
    let ci_label = format!("{}% CI", report.ci_level * 100.0);
    let rows = [
        ("Accuracy", format!("{:.4}", report.accuracy)),
        (
            ci_label.as_str(),
            format!("({:.4}, {:.4})", report.accuracy_ci.0, report.accuracy_ci.1),
        ),
        ("No Information Rate", format!("{:.4}", report.nir)),
        ("P-Value [Acc > NIR]", fmt_p(report.p_value_acc_gt_nir)),
        ("Kappa", fmt_opt(report.kappa)),
        ("Macro F1", fmt_opt(report.macro_f1)),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k:>22} : {v}");
    }
    if let Some(m) = &report.fold_means {
        let _ = writeln!(
            out,
            "{:>22} : accuracy {:.4}, kappa {}, macro F1 {}",
            "Mean over folds",
            m.accuracy,
            fmt_opt(m.kappa),
            fmt_opt(m.macro_f1)
        );
    }
    let _ = writeln!(out, "\nStatistics by Class:\n");
    let _ = writeln!(
        out,
        "{:>width$} {:>11} {:>11} {:>9} {:>9} {:>10} {:>7}",
        "Class", "Sensitivity", "Specificity", "Precision", "F1", "Prevalence", "Support"
    );
    for m in &report.per_class {
        let _ = writeln!(
            out,
            "{:>width$} {:>11} {:>11} {:>9} {:>9} {:>10.4} {:>7}",
            m.class,
            fmt_opt(m.recall),
            fmt_opt(m.specificity),
            fmt_opt(m.precision),
            fmt_opt(m.f1),
            m.prevalence,
            m.support
        );
    }
    out
}

fn abbreviate(name: &str) -> String {
    name.chars().filter(|c| !c.is_whitespace()).take(7).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub rank: usize,
    pub model: String,
    pub approach: u8,
    pub accuracy: f64,
    pub kappa: Option<f64>,
    pub macro_f1: Option<f64>,
}

/// Side-by-side table ordered by accuracy (descending), ties by model id
/// then approach.
pub fn compare_reports(reports: &[EvaluationReport]) -> Vec<ComparisonRow> {
    let mut order: Vec<&EvaluationReport> = reports.iter().collect();
    order.sort_by(|a, b| {
        b.accuracy
            .total_cmp(&a.accuracy)
            .then_with(|| a.model.cmp(&b.model))
            .then_with(|| a.approach.cmp(&b.approach))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(i, r)| ComparisonRow {
            rank: i + 1,
            model: r.model.clone(),
            approach: r.approach,
            accuracy: r.accuracy,
            kappa: r.kappa,
            macro_f1: r.macro_f1,
        })
        .collect()
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let na = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    let mut out = String::from("rank,model,approach,accuracy,kappa,macro_f1\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.rank,
            r.model,
            r.approach,
            r.accuracy,
            na(r.kappa),
            na(r.macro_f1)
        );
    }
    out
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::merge::derive_yield;
use crate::dataset::record::{CleaningAction, CleaningRule, CropRecord, Dataset, NumericField};
use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CleaningConfig {
    pub keep_years: Vec<i32>,
    /// Missing-production rows are deleted only while their fraction is below this.
    pub max_missing_fraction: f64,
    /// Rows with yield above `Q3 + k IQR` are removed.
    pub yield_iqr_k: f64,
    /// Allowed |total - (operational + fixed)| before a row is reported.
    pub total_cost_tolerance: f64,
    /// Fence multiplier for detection-only outlier reporting on other columns.
    pub detection_iqr_k: f64,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        Self {
            keep_years: vec![2011, 2012, 2013, 2014],
            max_missing_fraction: 0.05,
            yield_iqr_k: 10.0,
            total_cost_tolerance: 1.0,
            detection_iqr_k: 1.5,
        }
    }
}

fn retain_logged<F>(records: &mut Vec<CropRecord>, log: &mut Vec<CleaningAction>, rule: CleaningRule, detail: String, keep: F)
where
    F: Fn(&CropRecord) -> bool,
{
    let before = records.len();
    records.retain(|r| keep(r));
    log.push(CleaningAction::new(rule, before - records.len(), detail));
}

/// Applies the cleaning rules in order and returns the cleaned dataset
/// together with the actions taken by this call.
///
/// Removal steps: years outside `keep_years`; rows with missing production
/// (only while their share is below the threshold); rows with production but
/// zero area; extreme yields, removed until no remaining yield exceeds the
/// fence recomputed on the remaining rows. Outliers in the other numeric
/// columns, cost inconsistencies and duplicate keys are logged, not removed.
pub fn clean_dataset(dataset: &Dataset, config: &CleaningConfig) -> Result<(Dataset, Vec<CleaningAction>)> {
    let mut records = dataset.records.clone();
    let mut log = Vec::new();

    retain_logged(
        &mut records,
        &mut log,
        CleaningRule::DropYear,
        format!("kept years {:?}", config.keep_years),
        |r| config.keep_years.contains(&r.year),
    );

    let missing = records.iter().filter(|r| r.production.is_none()).count();
    if missing > 0 {
        let fraction = missing as f64 / records.len() as f64;
        if fraction >= config.max_missing_fraction {
            return Err(Error::TooMuchMissing {
                fraction,
                threshold: config.max_missing_fraction,
            });
        }
    }
    retain_logged(
        &mut records,
        &mut log,
        CleaningRule::DropMissingProduction,
        format!("{missing} rows without production deleted"),
        |r| r.production.is_some(),
    );

    retain_logged(
        &mut records,
        &mut log,
        CleaningRule::DropZeroArea,
        "rows with production recorded on zero or negative area".to_string(),
        |r| r.area > 0.0,
    );

    let mut cleaned = dataset.with_records(records);
    derive_yield(&mut cleaned);
    let mut records = cleaned.records;

    let mut removed = 0usize;
    let mut rounds = 0usize;
    let mut last_fence = f64::INFINITY;
    loop {
        if records.len() < 4 {
            break;
        }
        let yields: Vec<f64> = records.iter().filter_map(|r| r.yield_).collect();
        let (_, upper) = stats::iqr_fences(&yields, config.yield_iqr_k);
        let before = records.len();
        records.retain(|r| r.yield_.is_some_and(|y| y <= upper));
        if records.len() == before {
            break;
        }
        removed += before - records.len();
        rounds += 1;
        last_fence = upper;
    }
    log.push(CleaningAction::new(
        CleaningRule::YieldOutlierRemoval,
        removed,
        if removed > 0 {
            format!(
                "yield > Q3 + {} IQR removed in {rounds} round(s); last fence {last_fence}",
                config.yield_iqr_k
            )
        } else {
            format!("no yield above Q3 + {} IQR", config.yield_iqr_k)
        },
    ));

    if records.len() >= 4 {
        for field in NumericField::MEASUREMENTS {
            if field == NumericField::Yield {
                continue;
            }
            let values: Vec<f64> = records.iter().filter_map(|r| r.numeric(field)).collect();
            let (lo, hi) = stats::iqr_fences(&values, config.detection_iqr_k);
            let flagged = values.iter().filter(|v| **v < lo || **v > hi).count();
            if flagged > 0 {
                log.push(CleaningAction::new(
                    CleaningRule::OutlierDetection,
                    flagged,
                    format!("{}: outside [{lo}, {hi}], retained", field.name()),
                ));
            }
        }
    }

    let inconsistent = records
        .iter()
        .filter(|r| (r.total_cost - (r.operational_cost + r.fixed_cost)).abs() > config.total_cost_tolerance)
        .count();
    log.push(CleaningAction::new(
        CleaningRule::CostConsistency,
        inconsistent,
        format!(
            "total cost differs from operational + fixed by more than {}",
            config.total_cost_tolerance
        ),
    ));

    let mut seen: HashMap<(String, String, i32, u8, String, u64), usize> = HashMap::new();
    for r in &records {
        *seen
            .entry((
                r.state.clone(),
                r.district.clone(),
                r.year,
                r.season.rank(),
                r.crop.clone(),
                r.area.to_bits(),
            ))
            .or_default() += 1;
    }
    let duplicates: usize = seen.values().map(|c| c - 1).sum();
    log.push(CleaningAction::new(
        CleaningRule::DuplicateCheck,
        duplicates,
        "rows repeating (state, district, year, season, crop, area); retained",
    ));

    let mut out = dataset.with_records(records);
    out.cleaning_log.extend(log.iter().cloned());
    Ok((out, log))
}

/// One line per action: `rule<TAB>count<TAB>detail`.
pub fn format_cleaning_log(log: &[CleaningAction]) -> String {
    log.iter()
        .map(|a| format!("{}\t{}\t{}\n", a.rule, a.rows_affected, a.detail.replace(['\n', '\t'], " ")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::record::{fixtures::record, Season};

    fn rows(n: usize) -> Vec<CropRecord> {
        (0..n)
            .map(|i| {
                let mut r = record("Punjab", 2011 + (i % 4) as i32, Season::Rabi, "Wheat");
                r.district = format!("D{i}");
                r.area = 1.0 + (i % 7) as f64;
                r.production = Some(r.area * (2.0 + (i % 5) as f64 * 0.1));
                r
            })
            .collect()
    }

    fn action(log: &[CleaningAction], rule: CleaningRule) -> &CleaningAction {
        log.iter().find(|a| a.rule == rule).unwrap()
    }

    #[test]
    fn missing_production_dropped() {
        let mut recs = rows(100);
        recs[3].production = None;
        recs[50].production = None;
        let (out, log) = clean_dataset(&Dataset::new(recs), &CleaningConfig::default()).unwrap();
        assert_eq!(out.len(), 98);
        assert_eq!(action(&log, CleaningRule::DropMissingProduction).rows_affected, 2);
    }

    #[test]
    fn too_much_missing_is_an_error() {
        let mut recs = rows(100);
        for r in recs.iter_mut().take(5) {
            r.production = None;
        }
        assert!(matches!(
            clean_dataset(&Dataset::new(recs), &CleaningConfig::default()),
            Err(Error::TooMuchMissing { .. })
        ));
    }

    #[test]
    fn out_of_range_years_removed() {
        let mut recs = rows(40);
        for r in recs.iter_mut().take(8) {
            r.year = 2015;
            r.state = "Odisha".into();
        }
        let (out, log) = clean_dataset(&Dataset::new(recs), &CleaningConfig::default()).unwrap();
        assert!(out.records.iter().all(|r| r.year != 2015));
        assert_eq!(action(&log, CleaningRule::DropYear).rows_affected, 8);
    }

    #[test]
    fn extreme_yield_removed() {
        // yields {1,1,1,1,1000}: Q1 = Q3 = 1, IQR = 0, fence = 1
        let recs: Vec<CropRecord> = [1.0, 1.0, 1.0, 1.0, 1000.0]
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let mut r = record("Punjab", 2012, Season::Rabi, "Wheat");
                r.district = format!("D{i}");
                r.area = 1.0;
                r.production = Some(*y);
                r
            })
            .collect();
        let (out, log) = clean_dataset(&Dataset::new(recs), &CleaningConfig::default()).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.records.iter().all(|r| r.yield_ == Some(1.0)));
        assert_eq!(action(&log, CleaningRule::YieldOutlierRemoval).rows_affected, 1);
    }

    #[test]
    fn zero_area_rows_dropped_and_yield_consistent() {
        let mut recs = rows(30);
        recs[4].area = 0.0;
        let (out, log) = clean_dataset(&Dataset::new(recs), &CleaningConfig::default()).unwrap();
        assert_eq!(action(&log, CleaningRule::DropZeroArea).rows_affected, 1);
        for r in &out.records {
            let p = r.production.unwrap();
            assert!(r.area > 0.0);
            assert!((r.yield_.unwrap() * r.area - p).abs() <= 1e-9 * p.abs().max(1.0));
        }
    }

    #[test]
    fn outliers_elsewhere_are_only_logged() {
        let mut recs = rows(40);
        recs[7].precipitation = 1.0e6;
        let (out, log) = clean_dataset(&Dataset::new(recs), &CleaningConfig::default()).unwrap();
        assert_eq!(out.len(), 40);
        assert!(log
            .iter()
            .any(|a| a.rule == CleaningRule::OutlierDetection && a.detail.starts_with("precipitation")));
    }

    #[test]
    fn log_lines() {
        let log = vec![CleaningAction::new(CleaningRule::DropYear, 3, "kept\t2011")];
        assert_eq!(format_cleaning_log(&log), "DropYear\t3\tkept 2011\n");
    }
}

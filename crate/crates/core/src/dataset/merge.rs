use std::collections::HashMap;
use std::path::Path;

use crate::dataset::aliases::{normalize_keys, AliasTable};
use crate::dataset::csv_io::{env_record, parse_csv, parse_number, parse_year, RawRow, Schema};
use crate::dataset::record::{CleaningAction, CleaningRule, Dataset};
use crate::error::{Error, Result};

type JoinKey = (String, i32, String);

#[derive(Debug, Clone, Copy)]
struct Economics {
    operational_cost: f64,
    fixed_cost: f64,
    total_cost: f64,
    msp: f64,
}

/// Inner join of environmental rows with economic rows on (state, year, crop).
///
/// Each economic row is broadcast to every matching environmental row.
/// Unmatched environmental rows and repeated economic keys are recorded in
/// the cleaning log.
pub fn merge_sources(env: &[RawRow], econ: &[RawRow]) -> Result<Dataset> {
    let mut table: HashMap<JoinKey, Economics> = HashMap::with_capacity(econ.len());
    let mut repeated = 0usize;
    for row in econ {
        let key = (
            row.get("State Names").trim().to_string(),
            parse_year(row)?,
            row.get("Crop Names").trim().to_string(),
        );
        let values = Economics {
            operational_cost: parse_number(row, "Operational Cost")?,
            fixed_cost: parse_number(row, "Fixed Cost")?,
            total_cost: parse_number(row, "Total Cost")?,
            msp: parse_number(row, "MSP")?,
        };
        if table.contains_key(&key) {
            repeated += 1;
        } else {
            table.insert(key, values);
        }
    }

    let mut records = Vec::new();
    let mut unmatched = 0usize;
    for row in env {
        let mut record = env_record(row)?;
        let key = (record.state.clone(), record.year, record.crop.clone());
        match table.get(&key) {
            Some(e) => {
                record.operational_cost = e.operational_cost;
                record.fixed_cost = e.fixed_cost;
                record.total_cost = e.total_cost;
                record.msp = e.msp;
                records.push(record);
            }
            None => unmatched += 1,
        }
    }

    let mut dataset = Dataset::new(records);
    dataset.cleaning_log.push(CleaningAction::new(
        CleaningRule::JoinUnmatched,
        unmatched,
        format!(
            "{} environmental rows joined, {unmatched} without an economic match",
            dataset.len()
        ),
    ));
    if repeated > 0 {
        dataset.cleaning_log.push(CleaningAction::new(
            CleaningRule::DuplicateCheck,
            repeated,
            "repeated economic (state, year, crop) keys; first occurrence used",
        ));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyJoin);
    }
    Ok(dataset)
}

/// Sets yield = production / area. Rows with missing production are left
/// unset; rows with production but zero area are left unset and returned.
pub fn derive_yield(dataset: &mut Dataset) -> Vec<Error> {
    let mut flagged = Vec::new();
    for (row, r) in dataset.records.iter_mut().enumerate() {
        r.yield_ = match r.production {
            Some(production) if r.area == 0.0 => {
                flagged.push(Error::ZeroArea { row, production });
                None
            }
            Some(production) => Some(production / r.area),
            None => None,
        };
    }
    flagged
}

/// Parse, normalize and merge both sources, then derive yield.
pub fn ingest(env_path: impl AsRef<Path>, econ_path: impl AsRef<Path>, aliases: &AliasTable) -> Result<Dataset> {
    let (env_path, econ_path) = (env_path.as_ref(), econ_path.as_ref());
    let (env, econ) = rayon::join(
        || parse_csv(env_path, Schema::Environmental),
        || parse_csv(econ_path, Schema::Economic),
    );
    let (env, env_report) = normalize_keys(env?, aliases);
    let (econ, econ_report) = normalize_keys(econ?, aliases);
    let mut dataset = merge_sources(&env, &econ)?;
    let unknown: Vec<String> = env_report
        .unknown_states
        .iter()
        .chain(&env_report.unknown_crops)
        .chain(&econ_report.unknown_states)
        .chain(&econ_report.unknown_crops)
        .cloned()
        .collect();
    let mut detail = format!("{} env and {} econ cells renamed", env_report.renamed, econ_report.renamed);
    if !unknown.is_empty() {
        detail.push_str(&format!("; unknown names: {}", unknown.join("|")));
    }
    dataset.cleaning_log.insert(
        0,
        CleaningAction::new(
            CleaningRule::KeyNormalization,
            env_report.renamed + econ_report.renamed,
            detail,
        ),
    );
    dataset.provenance = vec![env_path.display().to_string(), econ_path.display().to_string()];
    for e in derive_yield(&mut dataset) {
        log::warn!("{e}");
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::csv_io::parse_csv_reader;

    const ENV: &str = "State Names,District Names,Crop Year,Season Names,Crop Names,Area,Temperature,Wind Speed,Precipitation,Humidity,Soil Type,N,P,K,Production\n";
    const ECON: &str = "State Names,Crop Year,Crop Names,Operational Cost,Fixed Cost,Total Cost,MSP\n";

    fn env(lines: &[&str]) -> Vec<RawRow> {
        parse_csv_reader(
            format!("{ENV}{}\n", lines.join("\n")).as_bytes(),
            Schema::Environmental,
            "env",
        )
        .unwrap()
    }

    fn econ(lines: &[&str]) -> Vec<RawRow> {
        parse_csv_reader(format!("{ECON}{}\n", lines.join("\n")).as_bytes(), Schema::Economic, "econ").unwrap()
    }

    #[test]
    fn single_exact_match() {
        let ds = merge_sources(
            &env(&["Punjab,Ludhiana,2012,Rabi,Wheat,2,20,3,50,60,1,80,40,30,10"]),
            &econ(&["Punjab,2012,Wheat,30000,12000,42000,1350"]),
        )
        .unwrap();
        assert_eq!(ds.len(), 1);
        let r = &ds.records[0];
        assert_eq!(
            (r.operational_cost, r.fixed_cost, r.total_cost, r.msp),
            (30000.0, 12000.0, 42000.0, 1350.0)
        );
    }

    #[test]
    fn no_match_is_logged() {
        let env_rows = env(&[
            "Assam,Kamrup,2013,Kharif,Jute,3,28,2,300,80,2,60,30,20,5",
            "Punjab,Ludhiana,2012,Rabi,Wheat,2,20,3,50,60,1,80,40,30,10",
        ]);
        let ds = merge_sources(&env_rows, &econ(&["Punjab,2012,Wheat,1,2,3,4"])).unwrap();
        assert_eq!(ds.len(), 1);
        let log = &ds.cleaning_log[0];
        assert_eq!(log.rule, CleaningRule::JoinUnmatched);
        assert_eq!(log.rows_affected, 1);

        let only_assam = env(&["Assam,Kamrup,2013,Kharif,Jute,3,28,2,300,80,2,60,30,20,5"]);
        assert!(matches!(
            merge_sources(&only_assam, &econ(&["Punjab,2012,Wheat,1,2,3,4"])),
            Err(Error::EmptyJoin)
        ));
    }

    #[test]
    fn economics_broadcast_to_every_district() {
        let env_rows = env(&[
            "Punjab,Ludhiana,2012,Rabi,Wheat,2,20,3,50,60,1,80,40,30,10",
            "Punjab,Amritsar,2012,Rabi,Wheat,4,21,3,55,61,1,81,41,31,12",
        ]);
        let econ_rows = econ(&["Punjab,2012,Wheat,100,50,150,1350", "Punjab,2013,Wheat,110,55,165,1400"]);
        let ds = merge_sources(&env_rows, &econ_rows).unwrap();
        // brute-force nested-loop join
        let mut expected = 0;
        for e in &env_rows {
            for c in &econ_rows {
                if e.get("State Names") == c.get("State Names")
                    && e.get("Crop Year") == c.get("Crop Year")
                    && e.get("Crop Names") == c.get("Crop Names")
                {
                    expected += 1;
                }
            }
        }
        assert_eq!(ds.len(), expected);
        assert_eq!(ds.len(), 2);
        assert!(ds.records.iter().all(|r| r.msp == 1350.0 && r.total_cost == 150.0));
        assert_ne!(ds.records[0].district, ds.records[1].district);
    }

    #[test]
    fn coercion_failure_names_row_and_column() {
        let env_rows = env(&["Punjab,Ludhiana,2012,Rabi,Wheat,two,20,3,50,60,1,80,40,30,10"]);
        match merge_sources(&env_rows, &econ(&["Punjab,2012,Wheat,1,2,3,4"])) {
            Err(Error::TypeCoercion { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "Area");
            }
            other => panic!("expected TypeCoercion, got {other:?}"),
        }
    }

    #[test]
    fn yield_derivation() {
        use crate::dataset::record::{fixtures::record, Season};
        let mut a = record("Punjab", 2012, Season::Rabi, "Wheat");
        a.production = Some(10.0);
        a.area = 2.0;
        let mut b = a.clone();
        b.production = Some(0.0);
        b.area = 5.0;
        let mut c = a.clone();
        c.production = Some(7.0);
        c.area = 0.0;
        let mut d = a.clone();
        d.production = None;
        let mut ds = Dataset::new(vec![a, b, c, d]);
        let flags = derive_yield(&mut ds);
        assert_eq!(ds.records[0].yield_, Some(5.0));
        assert_eq!(ds.records[1].yield_, Some(0.0));
        assert_eq!(ds.records[2].yield_, None);
        assert_eq!(ds.records[3].yield_, None);
        assert_eq!(flags.len(), 1);
        assert!(matches!(flags[0], Error::ZeroArea { row: 2, .. }));
    }
}

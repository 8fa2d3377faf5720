use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::dataset::csv_io::RawRow;
use crate::dataset::record::{CROPS, STATES};
use crate::error::{Error, Result};

const BUILTIN_ALIASES: &str = include_str!("../../data/aliases.csv");

/// Case-insensitive, whitespace-insensitive lookup from raw state and crop
/// spellings to canonical names.
#[derive(Debug, Clone)]
pub struct AliasTable {
    states: BTreeMap<String, String>,
    crops: BTreeMap<String, String>,
}

fn lookup_key(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl Default for AliasTable {
    fn default() -> Self {
        Self::from_csv_str(BUILTIN_ALIASES).expect("bundled alias table is valid")
    }
}

impl AliasTable {
    /// Parses a `kind,alias,canonical` table; `kind` is `state` or `crop`.
    /// Canonical names always resolve to themselves.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut states: BTreeMap<String, String> = STATES.iter().map(|s| (lookup_key(s), s.to_string())).collect();
        let mut crops: BTreeMap<String, String> = CROPS.iter().map(|c| (lookup_key(c), c.to_string())).collect();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::RaggedRow {
                    line: rec.position().map(|p| p.line()).unwrap_or(0),
                    expected: 3,
                    found: rec.len(),
                });
            }
            let (kind, alias, canonical) = (rec[0].trim(), &rec[1], rec[2].trim().to_string());
            match kind {
                "state" => states.insert(lookup_key(alias), canonical),
                "crop" => crops.insert(lookup_key(alias), canonical),
                other => {
                    return Err(Error::ConfigInvalid {
                        key: "aliases.kind".into(),
                        message: format!("unknown alias kind '{other}'"),
                    })
                }
            };
        }
        Ok(Self { states, crops })
    }

    /// Built-in table extended (and overridden) by the entries in `path`.
    pub fn with_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let extra = Self::from_csv_str(&std::fs::read_to_string(path)?)?;
        let mut table = Self::default();
        table.states.extend(extra.states);
        table.crops.extend(extra.crops);
        Ok(table)
    }

    pub fn state(&self, raw: &str) -> Option<&str> {
        self.states.get(&lookup_key(raw)).map(String::as_str)
    }

    pub fn crop(&self, raw: &str) -> Option<&str> {
        self.crops.get(&lookup_key(raw)).map(String::as_str)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalizationReport {
    /// Cells whose value changed.
    pub renamed: usize,
    pub unknown_states: BTreeSet<String>,
    pub unknown_crops: BTreeSet<String>,
}

/// Maps the state and crop cells of every row through the alias table.
/// Unknown names are left as they are and reported.
pub fn normalize_keys(rows: Vec<RawRow>, table: &AliasTable) -> (Vec<RawRow>, NormalizationReport) {
    let mut report = NormalizationReport::default();
    let rows = rows
        .into_iter()
        .map(|mut row| {
            for (column, is_state) in [("State Names", true), ("Crop Names", false)] {
                let Some(cell) = row.cells.get_mut(column) else {
                    continue;
                };
                let resolved = if is_state { table.state(cell) } else { table.crop(cell) };
                match resolved {
                    Some(canonical) => {
                        if cell != canonical {
                            report.renamed += 1;
                            *cell = canonical.to_string();
                        }
                    }
                    None => {
                        let name = cell.trim().to_string();
                        if is_state {
                            report.unknown_states.insert(name);
                        } else {
                            report.unknown_crops.insert(name);
                        }
                    }
                }
            }
            row
        })
        .collect();
    for s in &report.unknown_states {
        log::warn!("unknown state name '{s}' left unchanged");
    }
    for c in &report.unknown_crops {
        log::warn!("unknown crop name '{c}' left unchanged");
    }
    (rows, report)
}

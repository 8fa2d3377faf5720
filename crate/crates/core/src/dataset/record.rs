use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 19 crop classes, in the fixed order used for label indices.
pub const CROPS: [&str; 19] = [
    "Arhar",
    "Bajra",
    "Barley",
    "Cotton",
    "Gram",
    "Groundnut",
    "Jowar",
    "Jute",
    "Maize",
    "Moong",
    "Paddy",
    "Ragi",
    "Rapeseed and Mustard",
    "Safflower",
    "Sesamum",
    "Soyabean",
    "Sunflower",
    "Urad",
    "Wheat",
];

/// The 15 states covered by the merged data, in one-hot order.
pub const STATES: [&str; 15] = [
    "Andhra Pradesh",
    "Assam",
    "Bihar",
    "Chhattisgarh",
    "Gujarat",
    "Haryana",
    "Karnataka",
    "Madhya Pradesh",
    "Maharashtra",
    "Odisha",
    "Punjab",
    "Tamil Nadu",
    "Uttar Pradesh",
    "Uttarakhand",
    "West Bengal",
];

pub fn crop_index(name: &str) -> Option<usize> {
    CROPS.iter().position(|c| *c == name)
}

pub fn state_index(name: &str) -> Option<usize> {
    STATES.iter().position(|s| *s == name)
}

/// Cropping season. Declaration order is the within-year temporal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Season {
    Winter,
    Summer,
    Kharif,
    Autumn,
    Rabi,
    WholeYear,
}

impl Season {
    pub const ALL: [Season; 6] = [
        Season::Winter,
        Season::Summer,
        Season::Kharif,
        Season::Autumn,
        Season::Rabi,
        Season::WholeYear,
    ];

    pub fn rank(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Season::Winter => "Winter",
            Season::Summer => "Summer",
            Season::Kharif => "Kharif",
            Season::Autumn => "Autumn",
            Season::Rabi => "Rabi",
            Season::WholeYear => "Whole Year",
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Season {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "winter" => Season::Winter,
            "summer" => Season::Summer,
            "kharif" => Season::Kharif,
            "autumn" => Season::Autumn,
            "rabi" => Season::Rabi,
            "wholeyear" => Season::WholeYear,
            _ => return Err(Error::UnknownSeason(s.to_string())),
        })
    }
}

/// Built-in numeric columns of a [`CropRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumericField {
    Year,
    Area,
    Temperature,
    WindSpeed,
    Precipitation,
    Humidity,
    N,
    P,
    K,
    Production,
    Yield,
    OperationalCost,
    FixedCost,
    TotalCost,
    Msp,
}

impl NumericField {
    pub const ALL: [NumericField; 15] = [
        NumericField::Year,
        NumericField::Area,
        NumericField::Temperature,
        NumericField::WindSpeed,
        NumericField::Precipitation,
        NumericField::Humidity,
        NumericField::N,
        NumericField::P,
        NumericField::K,
        NumericField::Production,
        NumericField::Yield,
        NumericField::OperationalCost,
        NumericField::FixedCost,
        NumericField::TotalCost,
        NumericField::Msp,
    ];

    /// Measurement columns (everything except the year key).
    pub const MEASUREMENTS: [NumericField; 14] = [
        NumericField::Area,
        NumericField::Temperature,
        NumericField::WindSpeed,
        NumericField::Precipitation,
        NumericField::Humidity,
        NumericField::N,
        NumericField::P,
        NumericField::K,
        NumericField::Production,
        NumericField::Yield,
        NumericField::OperationalCost,
        NumericField::FixedCost,
        NumericField::TotalCost,
        NumericField::Msp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NumericField::Year => "year",
            NumericField::Area => "area",
            NumericField::Temperature => "temperature",
            NumericField::WindSpeed => "wind_speed",
            NumericField::Precipitation => "precipitation",
            NumericField::Humidity => "humidity",
            NumericField::N => "n",
            NumericField::P => "p",
            NumericField::K => "k",
            NumericField::Production => "production",
            NumericField::Yield => "yield",
            NumericField::OperationalCost => "operational_cost",
            NumericField::FixedCost => "fixed_cost",
            NumericField::TotalCost => "total_cost",
            NumericField::Msp => "msp",
        }
    }

    /// Header string used in the CSV files.
    pub fn header(self) -> &'static str {
        match self {
            NumericField::Year => "Crop Year",
            NumericField::Area => "Area",
            NumericField::Temperature => "Temperature",
            NumericField::WindSpeed => "Wind Speed",
            NumericField::Precipitation => "Precipitation",
            NumericField::Humidity => "Humidity",
            NumericField::N => "N",
            NumericField::P => "P",
            NumericField::K => "K",
            NumericField::Production => "Production",
            NumericField::Yield => "Yield",
            NumericField::OperationalCost => "Operational Cost",
            NumericField::FixedCost => "Fixed Cost",
            NumericField::TotalCost => "Total Cost",
            NumericField::Msp => "MSP",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            NumericField::Year => "year",
            NumericField::Area => "hectares",
            NumericField::Temperature => "degC",
            NumericField::WindSpeed => "as given",
            NumericField::Precipitation => "as given",
            NumericField::Humidity => "percent",
            NumericField::N | NumericField::P | NumericField::K => "soil content",
            NumericField::Production => "tonnes",
            NumericField::Yield => "tonnes/hectare",
            NumericField::OperationalCost | NumericField::FixedCost | NumericField::TotalCost => "Rs/hectare",
            NumericField::Msp => "Rs",
        }
    }

    /// Resolves either the snake-case name or the CSV header.
    pub fn from_name(name: &str) -> Option<NumericField> {
        let trimmed = name.trim();
        NumericField::ALL
            .into_iter()
            .find(|f| f.name() == trimmed || f.header().eq_ignore_ascii_case(trimmed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoricalField {
    State,
    District,
    Season,
    SoilType,
    Crop,
}

impl CategoricalField {
    pub fn name(self) -> &'static str {
        match self {
            CategoricalField::State => "state",
            CategoricalField::District => "district",
            CategoricalField::Season => "season",
            CategoricalField::SoilType => "soil_type",
            CategoricalField::Crop => "crop",
        }
    }

    pub fn header(self) -> &'static str {
        match self {
            CategoricalField::State => "State Names",
            CategoricalField::District => "District Names",
            CategoricalField::Season => "Season Names",
            CategoricalField::SoilType => "Soil Type",
            CategoricalField::Crop => "Crop Names",
        }
    }

    pub fn from_name(name: &str) -> Option<CategoricalField> {
        let trimmed = name.trim();
        [
            CategoricalField::State,
            CategoricalField::District,
            CategoricalField::Season,
            CategoricalField::SoilType,
            CategoricalField::Crop,
        ]
        .into_iter()
        .find(|f| f.name() == trimmed || f.header().eq_ignore_ascii_case(trimmed))
    }
}

/// One merged observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropRecord {
    pub state: String,
    pub district: String,
    pub year: i32,
    pub season: Season,
    pub crop: String,
    pub area: f64,
    pub temperature: f64,
    pub wind_speed: f64,
    pub precipitation: f64,
    pub humidity: f64,
    pub soil_type: String,
    pub n: f64,
    pub p: f64,
    pub k: f64,
    pub production: Option<f64>,
    #[serde(rename = "yield")]
    pub yield_: Option<f64>,
    pub operational_cost: f64,
    pub fixed_cost: f64,
    pub total_cost: f64,
    pub msp: f64,
    /// Values of the dataset's extra (e.g. lag) columns, aligned with
    /// [`Dataset::extra_columns`].
    #[serde(default)]
    pub extras: Vec<Option<f64>>,
}

impl CropRecord {
    pub fn numeric(&self, field: NumericField) -> Option<f64> {
        match field {
            NumericField::Year => Some(self.year as f64),
            NumericField::Area => Some(self.area),
            NumericField::Temperature => Some(self.temperature),
            NumericField::WindSpeed => Some(self.wind_speed),
            NumericField::Precipitation => Some(self.precipitation),
            NumericField::Humidity => Some(self.humidity),
            NumericField::N => Some(self.n),
            NumericField::P => Some(self.p),
            NumericField::K => Some(self.k),
            NumericField::Production => self.production,
            NumericField::Yield => self.yield_,
            NumericField::OperationalCost => Some(self.operational_cost),
            NumericField::FixedCost => Some(self.fixed_cost),
            NumericField::TotalCost => Some(self.total_cost),
            NumericField::Msp => Some(self.msp),
        }
    }

    pub fn get(&self, column: ColumnRef) -> Option<f64> {
        match column {
            ColumnRef::Builtin(f) => self.numeric(f),
            ColumnRef::Extra(i) => self.extras.get(i).copied().flatten(),
        }
    }

    pub fn category(&self, field: CategoricalField) -> &str {
        match field {
            CategoricalField::State => &self.state,
            CategoricalField::District => &self.district,
            CategoricalField::Season => self.season.name(),
            CategoricalField::SoilType => &self.soil_type,
            CategoricalField::Crop => &self.crop,
        }
    }
}

/// A resolved numeric column: a built-in field or an appended extra column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnRef {
    Builtin(NumericField),
    Extra(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    pub kind: ColumnKind,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CleaningRule {
    KeyNormalization,
    JoinUnmatched,
    DropYear,
    DropMissingProduction,
    DropZeroArea,
    YieldOutlierRemoval,
    OutlierDetection,
    CostConsistency,
    DuplicateCheck,
}

impl CleaningRule {
    /// Whether the rule deletes the rows it counts.
    pub fn removes_rows(self) -> bool {
        matches!(
            self,
            CleaningRule::DropYear
                | CleaningRule::DropMissingProduction
                | CleaningRule::DropZeroArea
                | CleaningRule::YieldOutlierRemoval
        )
    }
}

impl fmt::Display for CleaningRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningAction {
    pub rule: CleaningRule,
    pub rows_affected: usize,
    pub detail: String,
}

impl CleaningAction {
    pub fn new(rule: CleaningRule, rows_affected: usize, detail: impl Into<String>) -> Self {
        Self {
            rule,
            rows_affected,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<CropRecord>,
    pub columns: Vec<ColumnMeta>,
    pub extra_columns: Vec<String>,
    pub provenance: Vec<String>,
    pub cleaning_log: Vec<CleaningAction>,
}

impl Default for Dataset {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl Dataset {
    pub fn new(records: Vec<CropRecord>) -> Self {
        let mut columns: Vec<ColumnMeta> = [
            CategoricalField::State,
            CategoricalField::District,
            CategoricalField::Season,
            CategoricalField::Crop,
            CategoricalField::SoilType,
        ]
        .into_iter()
        .map(|c| ColumnMeta {
            name: c.name().to_string(),
            kind: ColumnKind::Categorical,
            unit: String::new(),
        })
        .collect();
        columns.extend(NumericField::ALL.into_iter().map(|f| ColumnMeta {
            name: f.name().to_string(),
            kind: ColumnKind::Numeric,
            unit: f.unit().to_string(),
        }));
        Self {
            records,
            columns,
            extra_columns: Vec::new(),
            provenance: Vec::new(),
            cleaning_log: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn resolve(&self, name: &str) -> Result<ColumnRef> {
        if let Some(i) = self.extra_columns.iter().position(|c| c == name) {
            return Ok(ColumnRef::Extra(i));
        }
        if let Some(f) = NumericField::from_name(name) {
            return Ok(ColumnRef::Builtin(f));
        }
        if CategoricalField::from_name(name).is_some() {
            return Err(Error::NonNumericColumn(name.to_string()));
        }
        Err(Error::UnknownColumn(name.to_string()))
    }

    pub fn column_name(&self, column: ColumnRef) -> &str {
        match column {
            ColumnRef::Builtin(f) => f.name(),
            ColumnRef::Extra(i) => &self.extra_columns[i],
        }
    }

    /// Numeric column values; any missing cell is an error.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.resolve(name)?;
        self.records
            .iter()
            .enumerate()
            .map(|(row, r)| {
                r.get(col).ok_or_else(|| Error::MissingValue {
                    column: name.to_string(),
                    row,
                })
            })
            .collect()
    }

    /// Appends an extra numeric column, returning its index.
    pub fn add_extra_column(&mut self, name: &str, unit: &str, values: Vec<Option<f64>>) -> usize {
        debug_assert_eq!(values.len(), self.records.len());
        self.extra_columns.push(name.to_string());
        self.columns.push(ColumnMeta {
            name: name.to_string(),
            kind: ColumnKind::Numeric,
            unit: unit.to_string(),
        });
        for (r, v) in self.records.iter_mut().zip(values) {
            r.extras.push(v);
        }
        self.extra_columns.len() - 1
    }

    /// Same metadata and log, different records.
    pub fn with_records(&self, records: Vec<CropRecord>) -> Dataset {
        Dataset {
            records,
            columns: self.columns.clone(),
            extra_columns: self.extra_columns.clone(),
            provenance: self.provenance.clone(),
            cleaning_log: self.cleaning_log.clone(),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        self.with_records(indices.iter().map(|&i| self.records[i].clone()).collect())
    }
}

impl CropRecord {
    /// A record with the given keys and fixed, plausible measurements.
    /// Meant for fixtures and examples; callers overwrite the fields they need.
    pub fn placeholder(state: &str, year: i32, season: Season, crop: &str) -> Self {
        CropRecord {
            state: state.to_string(),
            district: "D1".to_string(),
            year,
            season,
            crop: crop.to_string(),
            area: 2.0,
            temperature: 25.0,
            wind_speed: 3.0,
            precipitation: 100.0,
            humidity: 60.0,
            soil_type: "1".to_string(),
            n: 50.0,
            p: 40.0,
            k: 30.0,
            production: Some(10.0),
            yield_: Some(5.0),
            operational_cost: 1000.0,
            fixed_cost: 500.0,
            total_cost: 1500.0,
            msp: 2000.0,
            extras: Vec::new(),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn record(state: &str, year: i32, season: Season, crop: &str) -> CropRecord {
        CropRecord::placeholder(state, year, season, crop)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn season_parsing_and_order() {
        assert_eq!("Whole Year".parse::<Season>().unwrap(), Season::WholeYear);
        assert_eq!(" kharif  ".parse::<Season>().unwrap(), Season::Kharif);
        assert!(matches!("monsoon".parse::<Season>(), Err(Error::UnknownSeason(_))));
        assert!(Season::Winter < Season::Summer);
        assert!(Season::Rabi < Season::WholeYear);
        assert_eq!(Season::Rabi.rank(), 4);
    }

    #[test]
    fn column_metadata_covers_every_field() {
        let ds = Dataset::new(Vec::new());
        for f in NumericField::ALL {
            assert!(ds.columns.iter().any(|c| c.name == f.name()));
        }
        for c in ["state", "district", "season", "crop", "soil_type"] {
            assert!(ds.columns.iter().any(|m| m.name == c));
        }
    }

    #[test]
    fn resolve_columns() {
        let ds = Dataset::new(vec![fixtures::record("Punjab", 2012, Season::Rabi, "Wheat")]);
        assert_eq!(ds.resolve("MSP").unwrap(), ColumnRef::Builtin(NumericField::Msp));
        assert!(matches!(ds.resolve("state"), Err(Error::NonNumericColumn(_))));
        assert!(matches!(ds.resolve("nope"), Err(Error::UnknownColumn(_))));
        assert_eq!(ds.numeric_column("msp").unwrap(), vec![2000.0]);
    }
}

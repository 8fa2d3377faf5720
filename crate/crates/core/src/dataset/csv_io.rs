//! CSV parsing for the two source files and the cleaned dataset.
//!
//! Dialect: comma-delimited, double-quote quoting, UTF-8, header row
//! required. Header names are matched case-insensitively after trimming.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::record::{CropRecord, Dataset, NumericField, Season};
use crate::error::{Error, Result};

pub const ENV_HEADERS: [&str; 15] = [
    "State Names",
    "District Names",
    "Crop Year",
    "Season Names",
    "Crop Names",
    "Area",
    "Temperature",
    "Wind Speed",
    "Precipitation",
    "Humidity",
    "Soil Type",
    "N",
    "P",
    "K",
    "Production",
];

pub const ECON_HEADERS: [&str; 7] = [
    "State Names",
    "Crop Year",
    "Crop Names",
    "Operational Cost",
    "Fixed Cost",
    "Total Cost",
    "MSP",
];

/// Columns of the cleaned dataset, before any extra (lag) columns.
pub const DATASET_HEADERS: [&str; 20] = [
    "State Names",
    "District Names",
    "Crop Year",
    "Season Names",
    "Crop Names",
    "Area",
    "Temperature",
    "Wind Speed",
    "Precipitation",
    "Humidity",
    "Soil Type",
    "N",
    "P",
    "K",
    "Production",
    "Yield",
    "Operational Cost",
    "Fixed Cost",
    "Total Cost",
    "MSP",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Environmental,
    Economic,
    Dataset,
}

impl Schema {
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Schema::Environmental => &ENV_HEADERS,
            Schema::Economic => &ECON_HEADERS,
            Schema::Dataset => &DATASET_HEADERS,
        }
    }
}

/// One data line, keyed by header. Required headers use their canonical spelling.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub line: u64,
    pub cells: BTreeMap<String, String>,
}

impl RawRow {
    pub fn get(&self, column: &str) -> &str {
        self.cells.get(column).map(String::as_str).unwrap_or("")
    }
}

pub fn parse_csv(path: impl AsRef<Path>, schema: Schema) -> Result<Vec<RawRow>> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let file = File::open(path)?;
    parse_csv_reader(file, schema, &path.display().to_string())
}

pub fn parse_csv_reader<R: Read>(reader: R, schema: Schema, source: &str) -> Result<Vec<RawRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let raw_headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();

    let mut names = raw_headers.clone();
    let mut missing = Vec::new();
    for required in schema.required() {
        match raw_headers.iter().position(|h| h.eq_ignore_ascii_case(required)) {
            Some(i) => names[i] = required.to_string(),
            None => missing.push(required.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::HeaderMismatch {
            file: source.to_string(),
            missing,
        });
    }

    let mut rows = Vec::new();
    for result in rdr.records() {
        let record = result?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != names.len() {
            return Err(Error::RaggedRow {
                line,
                expected: names.len(),
                found: record.len(),
            });
        }
        let cells = names.iter().cloned().zip(record.iter().map(str::to_string)).collect();
        rows.push(RawRow { line, cells });
    }
    Ok(rows)
}

pub(crate) fn is_missing_cell(s: &str) -> bool {
    let t = s.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

pub(crate) fn parse_number(row: &RawRow, column: &str) -> Result<f64> {
    let raw = row.get(column);
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::TypeCoercion {
            row: row.line as usize,
            column: column.to_string(),
            value: raw.to_string(),
        })
}

pub(crate) fn parse_optional_number(row: &RawRow, column: &str) -> Result<Option<f64>> {
    if is_missing_cell(row.get(column)) {
        Ok(None)
    } else {
        parse_number(row, column).map(Some)
    }
}

pub(crate) fn parse_year(row: &RawRow) -> Result<i32> {
    let raw = row.get("Crop Year");
    let trimmed = raw.trim();
    trimmed
        .parse::<i32>()
        .ok()
        .or_else(|| trimmed.parse::<f64>().ok().filter(|v| v.fract() == 0.0).map(|v| v as i32))
        .ok_or_else(|| Error::TypeCoercion {
            row: row.line as usize,
            column: "Crop Year".to_string(),
            value: raw.to_string(),
        })
}

pub(crate) fn parse_season(row: &RawRow) -> Result<Season> {
    row.get("Season Names").parse()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "NA".to_string())
}

/// Writes the dataset in the cleaned-dataset schema plus extra columns.
pub fn write_dataset_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = DATASET_HEADERS.to_vec();
    header.extend(dataset.extra_columns.iter().map(String::as_str));
    wtr.write_record(&header)?;
    for r in &dataset.records {
        let mut row = vec![
            r.state.clone(),
            r.district.clone(),
            r.year.to_string(),
            r.season.name().to_string(),
            r.crop.clone(),
            r.area.to_string(),
            r.temperature.to_string(),
            r.wind_speed.to_string(),
            r.precipitation.to_string(),
            r.humidity.to_string(),
            r.soil_type.clone(),
            r.n.to_string(),
            r.p.to_string(),
            r.k.to_string(),
            fmt_opt(r.production),
            fmt_opt(r.yield_),
            r.operational_cost.to_string(),
            r.fixed_cost.to_string(),
            r.total_cost.to_string(),
            r.msp.to_string(),
        ];
        row.extend(r.extras.iter().map(|v| fmt_opt(*v)));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_dataset_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_dataset_csv(dataset, std::io::BufWriter::new(file))
}

/// Reads a dataset written by [`write_dataset_csv`]. Columns beyond the
/// fixed schema become extra numeric columns.
pub fn read_dataset_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let rows = parse_csv(path, Schema::Dataset)?;
    let mut dataset = dataset_from_rows(&rows, &extra_headers(path)?)?;
    dataset.provenance.push(path.display().to_string());
    Ok(dataset)
}

fn extra_headers(path: &Path) -> Result<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .filter(|h| !DATASET_HEADERS.iter().any(|known| known.eq_ignore_ascii_case(h)))
        .collect())
}

pub(crate) fn dataset_from_rows(rows: &[RawRow], extras: &[String]) -> Result<Dataset> {
    let mut records = Vec::with_capacity(rows.len());
    for row in rows {
        let mut record = env_record(row)?;
        record.yield_ = parse_optional_number(row, "Yield")?;
        record.operational_cost = parse_number(row, NumericField::OperationalCost.header())?;
        record.fixed_cost = parse_number(row, NumericField::FixedCost.header())?;
        record.total_cost = parse_number(row, NumericField::TotalCost.header())?;
        record.msp = parse_number(row, NumericField::Msp.header())?;
        record.extras = extras.iter().map(|c| parse_optional_number(row, c)).collect::<Result<_>>()?;
        records.push(record);
    }
    let mut dataset = Dataset::new(Vec::new());
    for e in extras {
        dataset.add_extra_column(e, "", Vec::new());
    }
    dataset.records = records;
    Ok(dataset)
}

/// Typed environmental part of a row; economic fields left at zero.
pub(crate) fn env_record(row: &RawRow) -> Result<CropRecord> {
    Ok(CropRecord {
        state: row.get("State Names").trim().to_string(),
        district: row.get("District Names").trim().to_string(),
        year: parse_year(row)?,
        season: parse_season(row)?,
        crop: row.get("Crop Names").trim().to_string(),
        area: parse_number(row, "Area")?,
        temperature: parse_number(row, "Temperature")?,
        wind_speed: parse_number(row, "Wind Speed")?,
        precipitation: parse_number(row, "Precipitation")?,
        humidity: parse_number(row, "Humidity")?,
        soil_type: row.get("Soil Type").trim().to_string(),
        n: parse_number(row, "N")?,
        p: parse_number(row, "P")?,
        k: parse_number(row, "K")?,
        production: parse_optional_number(row, "Production")?,
        yield_: None,
        operational_cost: 0.0,
        fixed_cost: 0.0,
        total_cost: 0.0,
        msp: 0.0,
        extras: Vec::new(),
    })
}

/// Writes environmental and economic source files for a dataset; the
/// economic file carries one row per (state, year, crop).
pub fn write_source_csvs<W1: Write, W2: Write>(dataset: &Dataset, env: W1, econ: W2) -> Result<()> {
    let mut env_w = csv::Writer::from_writer(env);
    env_w.write_record(ENV_HEADERS)?;
    let mut econ_rows: BTreeMap<(String, i32, String), [f64; 4]> = BTreeMap::new();
    for r in &dataset.records {
        env_w.write_record([
            r.state.clone(),
            r.district.clone(),
            r.year.to_string(),
            r.season.name().to_string(),
            r.crop.clone(),
            r.area.to_string(),
            r.temperature.to_string(),
            r.wind_speed.to_string(),
            r.precipitation.to_string(),
            r.humidity.to_string(),
            r.soil_type.clone(),
            r.n.to_string(),
            r.p.to_string(),
            r.k.to_string(),
            fmt_opt(r.production),
        ])?;
        econ_rows.entry((r.state.clone(), r.year, r.crop.clone())).or_insert([
            r.operational_cost,
            r.fixed_cost,
            r.total_cost,
            r.msp,
        ]);
    }
    env_w.flush()?;
    let mut econ_w = csv::Writer::from_writer(econ);
    econ_w.write_record(ECON_HEADERS)?;
    for ((state, year, crop), v) in econ_rows {
        econ_w.write_record([
            state,
            year.to_string(),
            crop,
            v[0].to_string(),
            v[1].to_string(),
            v[2].to_string(),
            v[3].to_string(),
        ])?;
    }
    econ_w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENV_HEADER_LINE: &str = "State Names,District Names,Crop Year,Season Names,Crop Names,Area,Temperature,Wind Speed,Precipitation,Humidity,Soil Type,N,P,K,Production";

    #[test]
    fn two_data_lines_give_two_rows() {
        let text = format!(
            "{ENV_HEADER_LINE}\nPunjab,Ludhiana,2012,Rabi,Wheat,2,20,3,50,60,1,80,40,30,10\nAssam,Kamrup,2013,Kharif,Jute,3,28,2,300,80,2,60,30,20,\n"
        );
        let rows = parse_csv_reader(text.as_bytes(), Schema::Environmental, "env").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].get("District Names"), "Ludhiana");
        assert_eq!(rows[1].get("Production"), "");
        // numeric fields are not coerced yet
        assert_eq!(rows[0].get("Area"), "2");
    }

    #[test]
    fn header_without_crop_names_is_rejected() {
        let text = "State Names,District Names,Crop Year,Season Names,Area,Temperature,Wind Speed,Precipitation,Humidity,Soil Type,N,P,K,Production\n";
        match parse_csv_reader(text.as_bytes(), Schema::Environmental, "env") {
            Err(Error::HeaderMismatch { missing, .. }) => assert_eq!(missing, vec!["Crop Names"]),
            other => panic!("expected HeaderMismatch, got {other:?}"),
        }
    }

    #[test]
    fn quoted_comma_in_district_is_preserved() {
        let text = format!(
            "{ENV_HEADER_LINE}\nPunjab,\"Sahibzada Ajit Singh Nagar, Mohali\",2012,Rabi,Wheat,2,20,3,50,60,1,80,40,30,10\n"
        );
        let rows = parse_csv_reader(text.as_bytes(), Schema::Environmental, "env").unwrap();
        assert_eq!(rows[0].get("District Names"), "Sahibzada Ajit Singh Nagar, Mohali");
        assert_eq!(rows[0].get("Crop Names"), "Wheat");
    }

    #[test]
    fn ragged_row_reports_line() {
        let text = format!("{ENV_HEADER_LINE}\nPunjab,Ludhiana,2012\n");
        match parse_csv_reader(text.as_bytes(), Schema::Environmental, "env") {
            Err(Error::RaggedRow { line, expected, found }) => {
                assert_eq!((line, expected, found), (2, 15, 3));
            }
            other => panic!("expected RaggedRow, got {other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            parse_csv("/definitely/not/here.csv", Schema::Economic),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn header_matching_ignores_case_and_padding() {
        let text = " state names ,crop year,CROP NAMES,Operational Cost,Fixed Cost,Total Cost,msp\nPunjab,2012,Wheat,1,2,3,4\n";
        let rows = parse_csv_reader(text.as_bytes(), Schema::Economic, "econ").unwrap();
        assert_eq!(rows[0].get("MSP"), "4");
        assert_eq!(rows[0].get("State Names"), "Punjab");
    }

    #[test]
    fn dataset_csv_round_trip() {
        use crate::dataset::record::fixtures::record;
        let mut r = record("Punjab", 2012, Season::WholeYear, "Wheat");
        r.production = None;
        r.yield_ = None;
        let mut ds = Dataset::new(vec![r, record("Assam", 2013, Season::Kharif, "Jute")]);
        ds.add_extra_column("lag1_msp", "", vec![None, Some(1.5)]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        save_dataset_csv(&ds, &path).unwrap();
        let back = read_dataset_csv(&path).unwrap();
        assert_eq!(back.records, ds.records);
        assert_eq!(back.extra_columns, ds.extra_columns);
    }
}

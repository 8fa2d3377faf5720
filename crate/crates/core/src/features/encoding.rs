use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{crop_index, state_index, CategoricalField, CropRecord, Dataset, NumericField, Season, CROPS};
use crate::error::{Error, Result};

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
    pub feature_names: Vec<String>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: &[Vec<f64>], feature_names: Vec<String>) -> Result<Self> {
        let n_cols = feature_names.len();
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::ArityMismatch {
                    expected: n_cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            n_rows: rows.len(),
            n_cols,
            data,
            feature_names,
        })
    }

    /// Matrix with generated names `x0, x1, ...`.
    pub fn from_unnamed(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        Self::from_rows(rows, (0..p).map(|j| format!("x{j}")).collect())
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self.data[i * self.n_cols + j] = *v;
        }
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            n_rows: indices.len(),
            n_cols: self.n_cols,
            data,
            feature_names: self.feature_names.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncodingConfig {
    pub categorical: Vec<CategoricalField>,
    pub numeric: Vec<String>,
    /// Also encode every extra column (e.g. lags) present in the training data.
    pub include_extras: bool,
    pub standardize: bool,
}

impl Default for EncodingConfig {
    fn default() -> Self {
        Self {
            categorical: vec![CategoricalField::State, CategoricalField::Season, CategoricalField::SoilType],
            numeric: NumericField::MEASUREMENTS.iter().map(|f| f.name().to_string()).collect(),
            include_extras: true,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHotBlock {
    pub field: CategoricalField,
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericFeature {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

/// Train-fitted encoding: standardized numeric features followed by one-hot blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingModel {
    pub numeric: Vec<NumericFeature>,
    pub one_hot: Vec<OneHotBlock>,
    pub dropped: Vec<String>,
    pub standardize: bool,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EncodeStats {
    /// Rows per categorical field whose category was not seen in training.
    pub unseen: BTreeMap<String, usize>,
}

fn category_order(field: CategoricalField, seen: BTreeSet<String>) -> Vec<String> {
    let mut cats: Vec<String> = seen.into_iter().collect();
    match field {
        CategoricalField::Season => cats.sort_by_key(|c| c.parse::<Season>().map(|s| s.rank()).unwrap_or(u8::MAX)),
        CategoricalField::State => cats.sort_by_key(|c| (state_index(c).unwrap_or(usize::MAX), c.clone())),
        CategoricalField::Crop => cats.sort_by_key(|c| (crop_index(c).unwrap_or(usize::MAX), c.clone())),
        _ => {}
    }
    cats
}

fn numeric_names(train: &Dataset, config: &EncodingConfig) -> Vec<String> {
    let mut names = config.numeric.clone();
    if config.include_extras {
        names.extend(
            train
                .extra_columns
                .iter()
                .filter(|c| !names.contains(c))
                .cloned()
                .collect::<Vec<_>>(),
        );
    }
    names
}

pub fn encode_fit(train: &Dataset, config: &EncodingConfig) -> Result<EncodingModel> {
    if train.is_empty() {
        return Err(Error::EmptyTraining);
    }
    let mut numeric = Vec::new();
    let mut dropped = Vec::new();
    for name in numeric_names(train, config) {
        let values = train.numeric_column(&name)?;
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        if config.standardize {
            if std <= 1e-12 * mean.abs().max(1.0) {
                log::info!("dropping zero-variance feature '{name}'");
                dropped.push(name);
                continue;
            }
            numeric.push(NumericFeature { name, mean, std });
        } else {
            numeric.push(NumericFeature {
                name,
                mean: 0.0,
                std: 1.0,
            });
        }
    }
    let one_hot: Vec<OneHotBlock> = config
        .categorical
        .iter()
        .map(|&field| {
            let seen: BTreeSet<String> = train.records.iter().map(|r| r.category(field).to_string()).collect();
            OneHotBlock {
                field,
                categories: category_order(field, seen),
            }
        })
        .collect();
    let mut feature_names: Vec<String> = numeric.iter().map(|f| f.name.clone()).collect();
    for block in &one_hot {
        feature_names.extend(block.categories.iter().map(|c| format!("{}={c}", block.field.name())));
    }
    Ok(EncodingModel {
        numeric,
        one_hot,
        dropped,
        standardize: config.standardize,
        feature_names,
        class_names: CROPS.iter().map(|c| c.to_string()).collect(),
    })
}

impl EncodingModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Input fields the encoding reads: numeric names then categorical names.
    pub fn required_fields(&self) -> Vec<String> {
        self.numeric
            .iter()
            .map(|f| f.name.clone())
            .chain(self.one_hot.iter().map(|b| b.field.name().to_string()))
            .collect()
    }

    /// Encodes one row; returns `None` in the unseen slot of each block whose
    /// category was not seen in training.
    fn encode_row(
        &self,
        dataset: &Dataset,
        record: &CropRecord,
        row: usize,
        columns: &[crate::dataset::ColumnRef],
        stats: &mut EncodeStats,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        for (feature, col) in self.numeric.iter().zip(columns) {
            let v = record.get(*col).ok_or_else(|| Error::MissingValue {
                column: dataset.column_name(*col).to_string(),
                row,
            })?;
            out.push((v - feature.mean) / feature.std);
        }
        for block in &self.one_hot {
            let value = record.category(block.field);
            let start = out.len();
            out.extend(std::iter::repeat_n(0.0, block.categories.len()));
            match block.categories.iter().position(|c| c == value) {
                Some(i) => out[start + i] = 1.0,
                None => *stats.unseen.entry(block.field.name().to_string()).or_default() += 1,
            }
        }
        Ok(())
    }

    /// Features only (no labels needed).
    pub fn encode_features(&self, rows: &Dataset) -> Result<(FeatureMatrix, EncodeStats)> {
        let columns = self
            .numeric
            .iter()
            .map(|f| rows.resolve(&f.name))
            .collect::<Result<Vec<_>>>()?;
        let mut stats = EncodeStats::default();
        let mut data = Vec::with_capacity(rows.len() * self.n_features());
        for (i, r) in rows.records.iter().enumerate() {
            self.encode_row(rows, r, i, &columns, &mut stats, &mut data)?;
        }
        Ok((
            FeatureMatrix {
                n_rows: rows.len(),
                n_cols: self.n_features(),
                data,
                feature_names: self.feature_names.clone(),
            },
            stats,
        ))
    }

    pub fn label_of(&self, crop: &str) -> Result<usize> {
        self.class_names
            .iter()
            .position(|c| c == crop)
            .ok_or_else(|| Error::UnknownLabel(crop.to_string()))
    }
}

/// Encodes rows with the fitted model and maps crops to class indices.
pub fn encode_apply(rows: &Dataset, model: &EncodingModel) -> Result<(FeatureMatrix, Vec<usize>, EncodeStats)> {
    let labels = rows
        .records
        .iter()
        .map(|r| model.label_of(&r.crop))
        .collect::<Result<Vec<_>>>()?;
    let (matrix, stats) = model.encode_features(rows)?;
    Ok((matrix, labels, stats))
}

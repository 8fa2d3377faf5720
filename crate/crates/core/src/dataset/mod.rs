//! Ingestion of the environmental and economic sources: parsing, key
//! normalization, the (state, year, crop) join, yield derivation and cleaning.

mod aliases;
mod clean;
mod csv_io;
mod merge;
mod record;
mod summary;

pub use aliases::{normalize_keys, AliasTable, NormalizationReport};
pub use clean::{clean_dataset, format_cleaning_log, CleaningConfig};
pub use csv_io::{
    parse_csv, parse_csv_reader, read_dataset_csv, save_dataset_csv, write_dataset_csv, write_source_csvs, RawRow, Schema,
    DATASET_HEADERS, ECON_HEADERS, ENV_HEADERS,
};
pub use merge::{derive_yield, ingest, merge_sources};
pub use record::{
    crop_index, state_index, CategoricalField, CleaningAction, CleaningRule, ColumnKind, ColumnMeta, ColumnRef, CropRecord,
    Dataset, NumericField, Season, CROPS, STATES,
};
pub use summary::{summarize, summarize_columns, ColumnSummary};

#[cfg(test)]
pub(crate) use record::fixtures;

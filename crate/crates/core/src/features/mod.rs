//! Temporal ordering, lag features and train-fitted encoding.

mod encoding;
mod lags;
mod temporal;

pub use encoding::{
    encode_apply, encode_fit, EncodeStats, EncodingConfig, EncodingModel, FeatureMatrix, NumericFeature, OneHotBlock,
};
pub use lags::{group_rows, lag_name, lag_values, make_lags, ImputePolicy, LagColumnReport, LagOrder, LagReport, LagSpec};
pub use temporal::{ensure_sorted, first_unsorted, temporal_sort, TemporalKey};

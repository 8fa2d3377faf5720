use serde::{Deserialize, Serialize};

use crate::dataset::{CropRecord, Dataset, Season};
use crate::error::{Error, Result};

/// Total order on observations: year first, then season rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TemporalKey {
    pub year: i32,
    pub season_rank: u8,
}

impl TemporalKey {
    pub fn new(year: i32, season: Season) -> Self {
        Self {
            year,
            season_rank: season.rank(),
        }
    }

    pub fn of(record: &CropRecord) -> Self {
        Self::new(record.year, record.season)
    }
}

/// Stable sort by (year, season rank).
pub fn temporal_sort(dataset: &Dataset) -> Dataset {
    let mut records = dataset.records.clone();
    records.sort_by_key(TemporalKey::of);
    dataset.with_records(records)
}

/// First row whose key is smaller than its predecessor's.
pub fn first_unsorted(dataset: &Dataset) -> Option<usize> {
    dataset
        .records
        .windows(2)
        .position(|w| TemporalKey::of(&w[1]) < TemporalKey::of(&w[0]))
        .map(|i| i + 1)
}

pub fn ensure_sorted(dataset: &Dataset) -> Result<()> {
    match first_unsorted(dataset) {
        Some(row) => Err(Error::NotSorted(row)),
        None => Ok(()),
    }
}

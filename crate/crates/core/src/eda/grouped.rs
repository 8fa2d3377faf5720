use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{CategoricalField, Dataset};
use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupStat {
    Mean,
    Std,
}

impl GroupStat {
    pub fn name(self) -> &'static str {
        match self {
            GroupStat::Mean => "mean",
            GroupStat::Std => "std",
        }
    }
}

/// Group column for [`grouped_aggregate`]: the year, or a categorical field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Year,
    Category(CategoricalField),
}

impl GroupBy {
    pub fn parse(name: &str) -> Result<Self> {
        let t = name.trim();
        if t == "year" || t.eq_ignore_ascii_case("Crop Year") {
            return Ok(GroupBy::Year);
        }
        CategoricalField::from_name(t)
            .map(GroupBy::Category)
            .ok_or_else(|| Error::UnknownColumn(t.to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupBy::Year => "year",
            GroupBy::Category(c) => c.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupValue {
    pub group: String,
    pub value: f64,
}

/// Sort key giving seasons their within-year rank and years numeric order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum GroupKey {
    Rank(i64),
    Name(String),
}

/// Per-group mean or sample standard deviation of a numeric column.
/// Seasons come out in season order, years ascending, everything else by name.
pub fn grouped_aggregate(dataset: &Dataset, value_column: &str, group: GroupBy, stat: GroupStat) -> Result<Vec<GroupValue>> {
    let values = dataset.numeric_column(value_column)?;
    let mut groups: BTreeMap<(GroupKey, String), Vec<f64>> = BTreeMap::new();
    for (r, v) in dataset.records.iter().zip(values) {
        let (key, label) = match group {
            GroupBy::Year => (GroupKey::Rank(r.year as i64), r.year.to_string()),
            GroupBy::Category(CategoricalField::Season) => (GroupKey::Rank(r.season.rank() as i64), r.season.name().to_string()),
            GroupBy::Category(c) => (GroupKey::Name(r.category(c).to_string()), r.category(c).to_string()),
        };
        groups.entry((key, label)).or_default().push(v);
    }
    Ok(groups
        .into_iter()
        .map(|((_, group), vals)| GroupValue {
            group,
            value: match stat {
                GroupStat::Mean => stats::mean(&vals),
                GroupStat::Std => stats::sample_std(&vals),
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{fixtures::record, Season};

    #[test]
    fn yearly_increasing_msp() {
        let recs = (0..12)
            .map(|i| {
                let year = 2011 + (i % 4);
                let mut r = record("Punjab", year, Season::Rabi, "Wheat");
                r.msp = 1000.0 + 100.0 * (year - 2011) as f64 + (i / 4) as f64;
                r
            })
            .collect();
        let out = grouped_aggregate(&Dataset::new(recs), "msp", GroupBy::Year, GroupStat::Mean).unwrap();
        assert_eq!(
            out.iter().map(|g| g.group.as_str()).collect::<Vec<_>>(),
            ["2011", "2012", "2013", "2014"]
        );
        assert!(out.windows(2).all(|w| w[0].value < w[1].value));
    }

    #[test]
    fn constant_column_zero_std() {
        let recs = [Season::Rabi, Season::Kharif, Season::Rabi, Season::Kharif]
            .iter()
            .map(|s| record("Punjab", 2012, *s, "Wheat"))
            .collect();
        let out = grouped_aggregate(
            &Dataset::new(recs),
            "msp",
            GroupBy::Category(CategoricalField::Season),
            GroupStat::Std,
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|g| g.value == 0.0));
        // season rank order: Kharif before Rabi
        assert_eq!(out[0].group, "Kharif");
    }

    #[test]
    fn temperature_by_season_matches_hand_computation() {
        let seasons = [Season::Winter, Season::Kharif, Season::Rabi];
        let temps = [[12.0, 14.0, 13.0, 15.0], [30.0, 31.0, 29.0, 34.0], [18.0, 20.0, 22.0, 16.0]];
        let mut recs = Vec::new();
        for (s, ts) in seasons.iter().zip(&temps) {
            for t in ts {
                let mut r = record("Punjab", 2012, *s, "Wheat");
                r.temperature = *t;
                recs.push(r);
            }
        }
        let ds = Dataset::new(recs);
        let means = grouped_aggregate(&ds, "temperature", GroupBy::parse("season").unwrap(), GroupStat::Mean).unwrap();
        let stds = grouped_aggregate(&ds, "temperature", GroupBy::parse("season").unwrap(), GroupStat::Std).unwrap();
        let hand_means = [13.5, 31.0, 19.0];
        // sample variances by hand: winter 5/3, kharif 14/3, rabi 20/3
        let hand_stds = [(5.0f64 / 3.0).sqrt(), (14.0f64 / 3.0).sqrt(), (20.0f64 / 3.0).sqrt()];
        for i in 0..3 {
            assert_eq!(means[i].group, seasons[i].name());
            assert!((means[i].value - hand_means[i]).abs() < 1e-12);
            assert!((stds[i].value - hand_stds[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_columns() {
        let ds = Dataset::new(vec![record("Punjab", 2012, Season::Rabi, "Wheat")]);
        assert!(matches!(GroupBy::parse("colour"), Err(Error::UnknownColumn(_))));
        assert!(matches!(
            grouped_aggregate(&ds, "colour", GroupBy::Year, GroupStat::Mean),
            Err(Error::UnknownColumn(_))
        ));
    }
}

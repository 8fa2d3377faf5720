//! Ranks every crop for one unlabeled input record.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dataset::{AliasTable, CategoricalField, NumericField, Season};
use crate::error::{Error, Result};
use crate::learners::ModelBundle;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub rank: usize,
    pub crop: String,
    /// Vote share; scores over all crops sum to 1.
    pub score: f64,
    pub votes: f64,
}

/// Maps a user-facing key (`temperature`, `Wind Speed`, `State Names`, a lag
/// column name, ...) to the field name used by the encoding.
pub fn canonical_key(key: &str) -> String {
    let key = key.trim();
    if let Some(f) = NumericField::from_name(key) {
        return f.name().to_string();
    }
    if let Some(f) = CategoricalField::from_name(key) {
        return f.name().to_string();
    }
    let lowered = key.to_ascii_lowercase().replace([' ', '-'], "_");
    NumericField::from_name(&lowered)
        .map(|f| f.name().to_string())
        .or_else(|| CategoricalField::from_name(&lowered).map(|f| f.name().to_string()))
        .unwrap_or(lowered)
}

/// Parses `key=value` pairs separated by commas or newlines.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in text.split([',', '\n']).map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::BadParams(format!("expected key=value, got '{part}'")))?;
        out.insert(canonical_key(k), v.trim().to_string());
    }
    Ok(out)
}

/// Reads a CSV with a header row and exactly one data row.
pub fn parse_record_csv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let mut rows = reader.records();
    let row = rows
        .next()
        .ok_or_else(|| Error::BadParams("record CSV has no data row".into()))??;
    if rows.next().is_some() {
        return Err(Error::BadParams("record CSV must hold exactly one data row".into()));
    }
    Ok(headers
        .iter()
        .zip(row.iter())
        .map(|(h, v)| (canonical_key(h), v.to_string()))
        .collect())
}

/// Encodes the input exactly as training rows were encoded.
pub fn encode_input(bundle: &ModelBundle, input: &BTreeMap<String, String>) -> Result<Vec<f64>> {
    let enc = &bundle.encoding;
    let missing: Vec<String> = enc
        .required_fields()
        .into_iter()
        .filter(|f| input.get(f).is_none_or(|v| v.trim().is_empty()))
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteInput(missing));
    }
    let aliases = AliasTable::default();
    let mut x = Vec::with_capacity(enc.n_features());
    for f in &enc.numeric {
        let raw = &input[&f.name];
        let v: f64 = raw.trim().parse().map_err(|_| Error::TypeCoercion {
            row: 0,
            column: f.name.clone(),
            value: raw.clone(),
        })?;
        x.push((v - f.mean) / f.std);
    }
    for block in &enc.one_hot {
        let raw = input[block.field.name()].trim();
        let value = match block.field {
            CategoricalField::Season => raw.parse::<Season>()?.name().to_string(),
            CategoricalField::State => aliases.state(raw).unwrap_or(raw).to_string(),
            _ => raw.to_string(),
        };
        let pos = block.categories.iter().position(|c| *c == value);
        if pos.is_none() {
            log::warn!(
                "{} '{value}' was not seen in training; its indicators are all zero",
                block.field.name()
            );
        }
        x.extend((0..block.categories.len()).map(|i| if Some(i) == pos { 1.0 } else { 0.0 }));
    }
    Ok(x)
}

/// All crops ranked by normalized vote share. The model's own prediction
/// (with its tie-breaking) is always first.
pub fn recommend(bundle: &ModelBundle, input: &BTreeMap<String, String>) -> Result<Vec<Recommendation>> {
    let x = encode_input(bundle, input)?;
    let classifier = bundle.model.classifier();
    let (top, votes) = classifier.scores(&x)?;
    let total: f64 = votes.iter().sum();
    let mut order: Vec<usize> = (0..votes.len()).collect();
    order.sort_by(|&a, &b| {
        (b == top)
            .cmp(&(a == top))
            .then(votes[b].total_cmp(&votes[a]))
            .then(a.cmp(&b))
    });
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(rank, c)| Recommendation {
            rank: rank + 1,
            crop: classifier.class_names()[c].clone(),
            score: if total > 0.0 { votes[c] / total } else { 0.0 },
            votes: votes[c],
        })
        .collect())
}

pub fn recommendations_csv(recs: &[Recommendation]) -> String {
    let mut out = String::from("rank,crop,score,votes\n");
    for r in recs {
        out.push_str(&format!("{},{},{},{}\n", r.rank, r.crop, r.score, r.votes));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{fixtures::record, Dataset, CROPS};
    use crate::features::{encode_apply, encode_fit, EncodingConfig};
    use crate::learners::{rf_predict, rf_train, Model, RfParams};

    fn bundle() -> (ModelBundle, Dataset) {
        let recs = (0..30)
            .map(|i| {
                let crop = ["Wheat", "Paddy", "Maize"][i % 3];
                let mut r = record("Punjab", 2012, Season::Rabi, crop);
                r.temperature = 10.0 * (i % 3) as f64 + i as f64 * 0.01;
                r
            })
            .collect();
        let data = Dataset::new(recs);
        let config = EncodingConfig {
            categorical: vec![CategoricalField::State, CategoricalField::Season],
            numeric: vec!["temperature".into()],
            include_extras: false,
            standardize: true,
        };
        let encoding = encode_fit(&data, &config).unwrap();
        let (x, y, _) = encode_apply(&data, &encoding).unwrap();
        let params = RfParams {
            n_trees: 1,
            mtry: Some(3),
            ..Default::default()
        };
        let model = rf_train(&x, &y, &encoding.class_names, &params, 0).unwrap().model;
        (
            ModelBundle {
                model: Model::RandomForest(model),
                encoding,
                config_hash: "t".into(),
            },
            data,
        )
    }

    #[test]
    fn ranks_all_crops_and_normalizes() {
        let (b, _) = bundle();
        let input = parse_key_values("temperature=20.1, State Names=Punjab, season=rabi").unwrap();
        let recs = recommend(&b, &input).unwrap();
        assert_eq!(recs.len(), CROPS.len());
        assert_eq!(recs[0].crop, "Maize");
        assert!((recs.iter().map(|r| r.score).sum::<f64>() - 1.0).abs() < 1e-12);
        let x = encode_input(&b, &input).unwrap();
        let Model::RandomForest(rf) = &b.model else { unreachable!() };
        assert_eq!(CROPS[rf_predict(rf, &x).unwrap().0], recs[0].crop);
    }

    #[test]
    fn missing_fields_are_listed() {
        let (b, _) = bundle();
        let input = parse_key_values("state=Punjab").unwrap();
        match recommend(&b, &input) {
            Err(Error::IncompleteInput(missing)) => assert_eq!(missing, ["temperature", "season"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_record_input() {
        let m = parse_record_csv("Temperature,Season Names,State Names\n0.2,Rabi,Punjab\n").unwrap();
        assert_eq!(m["temperature"], "0.2");
        assert_eq!(m["season"], "Rabi");
        assert_eq!(canonical_key("Wind Speed"), "wind_speed");
        assert_eq!(canonical_key("lag1_msp"), "lag1_msp");
    }
}

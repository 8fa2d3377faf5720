use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::EncodingModel;
use crate::learners::forest::RandomForestModel;
use crate::learners::svm::SvmModel;
use crate::learners::Classifier;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "agrorec-model";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    RandomForest,
    Svm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::RandomForest => "random_forest",
            ModelKind::Svm => "svm",
        }
    }

    /// Short id used on the command line and in reports.
    pub fn id(self) -> &'static str {
        match self {
            ModelKind::RandomForest => "rf",
            ModelKind::Svm => "svm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rf" | "random_forest" => Some(ModelKind::RandomForest),
            "svm" => Some(ModelKind::Svm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Model {
    RandomForest(RandomForestModel),
    Svm(SvmModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::RandomForest(_) => ModelKind::RandomForest,
            Model::Svm(_) => ModelKind::Svm,
        }
    }

    pub fn classifier(&self) -> &dyn Classifier {
        match self {
            Model::RandomForest(m) => m,
            Model::Svm(m) => m,
        }
    }
}

/// Everything needed to go from an input record to a prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub model: Model,
    pub encoding: EncodingModel,
    pub config_hash: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn model_to_text(bundle: &ModelBundle) -> Result<String> {
    let payload = serde_json::to_string(bundle)?;
    Ok(format!(
        "{MAGIC}\nversion: {FORMAT_VERSION}\nkind: {}\nconfig-hash: {}\nchecksum: sha256:{}\npayload:\n{payload}\n",
        bundle.model.kind().name(),
        bundle.config_hash,
        sha256_hex(payload.as_bytes())
    ))
}

fn header_value<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    line.and_then(|l| l.strip_prefix(key))
        .and_then(|rest| rest.strip_prefix(':'))
        .map(str::trim)
        .ok_or_else(|| Error::CorruptFile(format!("expected '{key}:' header")))
}

pub fn model_from_text(text: &str) -> Result<ModelBundle> {
    let mut lines = text.splitn(7, '\n');
    if lines.next().map(str::trim_end) != Some(MAGIC) {
        return Err(Error::CorruptFile("not an agrorec model file".into()));
    }
    let version: u32 = header_value(lines.next(), "version")?
        .parse()
        .map_err(|_| Error::CorruptFile("unreadable version".into()))?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let kind = header_value(lines.next(), "kind")?.to_string();
    let config_hash = header_value(lines.next(), "config-hash")?.to_string();
    let checksum = header_value(lines.next(), "checksum")?;
    let expected = checksum
        .strip_prefix("sha256:")
        .ok_or_else(|| Error::CorruptFile("unsupported checksum algorithm".into()))?;
    if lines.next().map(str::trim_end) != Some("payload:") {
        return Err(Error::CorruptFile("missing payload".into()));
    }
    let payload = lines.next().unwrap_or("").trim_end_matches('\n');
    if sha256_hex(payload.as_bytes()) != expected {
        return Err(Error::CorruptFile("checksum mismatch".into()));
    }
    let bundle: ModelBundle =
        serde_json::from_str(payload).map_err(|e| Error::CorruptFile(format!("payload does not parse: {e}")))?;
    if bundle.model.kind().name() != kind || bundle.config_hash != config_hash {
        return Err(Error::CorruptFile("header disagrees with payload".into()));
    }
    Ok(bundle)
}

pub fn save_model(bundle: &ModelBundle, path: &Path) -> Result<()> {
    fs::write(path, model_to_text(bundle)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    model_from_text(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{fixtures::record, Dataset, Season};
    use crate::features::{encode_apply, encode_fit, EncodingConfig};
    use crate::learners::{rf_train, svm_train_multiclass, RfParams, SvmParams};

    fn bundle(kind: ModelKind) -> (ModelBundle, crate::features::FeatureMatrix) {
        let recs = (0..40)
            .map(|i| {
                let crop = ["Wheat", "Paddy", "Maize"][i % 3];
                let mut r = record("Punjab", 2012, if i % 2 == 0 { Season::Rabi } else { Season::Kharif }, crop);
                r.temperature = 10.0 * (i % 3) as f64 + (i as f64 * 0.37).sin();
                r.humidity = 40.0 + (i % 5) as f64;
                r
            })
            .collect();
        let data = Dataset::new(recs);
        let config = EncodingConfig {
            numeric: vec!["temperature".into(), "humidity".into()],
            ..Default::default()
        };
        let encoding = encode_fit(&data, &config).unwrap();
        let (x, y, _) = encode_apply(&data, &encoding).unwrap();
        let model = match kind {
            ModelKind::RandomForest => {
                let params = RfParams {
                    n_trees: 15,
                    ..Default::default()
                };
                Model::RandomForest(rf_train(&x, &y, &encoding.class_names, &params, 4).unwrap().model)
            }
            ModelKind::Svm => Model::Svm(
                svm_train_multiclass(&x, &y, &encoding.class_names, &SvmParams::default())
                    .unwrap()
                    .model,
            ),
        };
        (
            ModelBundle {
                model,
                encoding,
                config_hash: "abc123".into(),
            },
            x,
        )
    }

    #[test]
    fn round_trip_predicts_identically() {
        for kind in [ModelKind::RandomForest, ModelKind::Svm] {
            let (b, x) = bundle(kind);
            let loaded = model_from_text(&model_to_text(&b).unwrap()).unwrap();
            assert_eq!(loaded, b);
            for i in 0..x.n_rows {
                let a = b.model.classifier().scores(x.row(i)).unwrap();
                let c = loaded.model.classifier().scores(x.row(i)).unwrap();
                assert_eq!(a, c);
            }
        }
    }

    #[test]
    fn flipped_checksum_is_corrupt() {
        let (b, _) = bundle(ModelKind::RandomForest);
        let text = model_to_text(&b).unwrap();
        let pos = text.find("sha256:").unwrap() + 7;
        let mut bytes = text.into_bytes();
        bytes[pos] = if bytes[pos] == b'0' { b'1' } else { b'0' };
        let tampered = String::from_utf8(bytes).unwrap();
        assert!(matches!(model_from_text(&tampered), Err(Error::CorruptFile(_))));
    }

    #[test]
    fn future_version_rejected() {
        let (b, _) = bundle(ModelKind::Svm);
        let text = model_to_text(&b).unwrap().replacen("version: 1", "version: 2", 1);
        assert!(matches!(
            model_from_text(&text),
            Err(Error::VersionMismatch { found: 2, supported: 1 })
        ));
    }
}

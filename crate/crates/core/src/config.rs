//! Run configuration: one TOML file, unknown keys rejected, every value
//! defaulted, validated before any stage runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::CleaningConfig;
use crate::eda::EdaConfig;
use crate::error::{Error, Result};
use crate::evaluation::{Approach, LearnerSpec, ProtocolConfig};
use crate::learners::{KernelChoice, ModelKind, RfParams, SvmParams};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub env_csv: Option<PathBuf>,
    pub econ_csv: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Extra alias rows layered over the built-in table.
    pub aliases: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateConfig {
    pub approaches: Vec<u8>,
    pub models: Vec<String>,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self {
            approaches: vec![1, 2, 3],
            models: vec!["rf".into(), "svm".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    /// Any of `json`, `text`.
    pub formats: Vec<String>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            formats: vec!["json".into(), "text".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub paths: PathsConfig,
    pub cleaning: CleaningConfig,
    pub eda: EdaConfig,
    pub protocol: ProtocolConfig,
    pub rf: RfParams,
    pub svm: SvmParams,
    pub evaluate: EvaluateConfig,
    pub report: ReportConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            paths: PathsConfig::default(),
            cleaning: CleaningConfig::default(),
            eda: EdaConfig::default(),
            protocol: ProtocolConfig::default(),
            rf: RfParams::default(),
            svm: SvmParams::default(),
            evaluate: EvaluateConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> Error {
    Error::ConfigInvalid {
        key: key.into(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::de::Deserializer::parse(text).map_err(|e| invalid("<root>", e.message().trim().to_string()))?;
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "<root>".to_string() } else { path };
            invalid(key, e.into_inner().message().trim().to_string())
        })?;
        config.validate(None)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Checks value ranges. With `n_features` known, `rf.mtry` is checked
    /// against it as well.
    pub fn validate(&self, n_features: Option<usize>) -> Result<()> {
        if self.rf.n_trees < 1 {
            return Err(invalid("rf.n_trees", "must be at least 1"));
        }
        if let Some(m) = self.rf.mtry {
            if m < 1 {
                return Err(invalid("rf.mtry", "must be at least 1"));
            }
            if let Some(p) = n_features {
                if m > p {
                    return Err(invalid("rf.mtry", format!("{m} exceeds the {p} encoded features")));
                }
            }
        }
        if self.rf.max_depth == Some(0) {
            return Err(invalid("rf.max_depth", "must be at least 1"));
        }
        if !(self.svm.c > 0.0 && self.svm.c.is_finite()) {
            return Err(invalid("svm.c", "must be positive"));
        }
        if !(self.svm.tol > 0.0) {
            return Err(invalid("svm.tol", "must be positive"));
        }
        if self.svm.max_passes < 1 {
            return Err(invalid("svm.max_passes", "must be at least 1"));
        }
        if let KernelChoice::Rbf { gamma: Some(g) } = self.svm.kernel {
            if !(g > 0.0 && g.is_finite()) {
                return Err(invalid("svm.kernel.gamma", "must be positive"));
            }
        }
        let p = &self.protocol;
        if p.folds < 2 {
            return Err(invalid("protocol.folds", "must be at least 2"));
        }
        if !(p.train_fraction > 0.0 && p.train_fraction < 1.0) {
            return Err(invalid("protocol.train_fraction", "must lie in (0, 1)"));
        }
        if !(p.ci_level > 0.0 && p.ci_level < 1.0) {
            return Err(invalid("protocol.ci_level", "must lie in (0, 1)"));
        }
        for (i, spec) in p.lag_specs.iter().enumerate() {
            spec.validate()
                .map_err(|e| invalid(format!("protocol.lag_specs[{i}]"), e.to_string()))?;
        }
        let c = &self.cleaning;
        if !(c.max_missing_fraction > 0.0 && c.max_missing_fraction <= 1.0) {
            return Err(invalid("cleaning.max_missing_fraction", "must lie in (0, 1]"));
        }
        if !(c.yield_iqr_k > 0.0) {
            return Err(invalid("cleaning.yield_iqr_k", "must be positive"));
        }
        if c.keep_years.is_empty() {
            return Err(invalid("cleaning.keep_years", "must not be empty"));
        }
        for (i, a) in self.evaluate.approaches.iter().enumerate() {
            if Approach::from_id(*a).is_none() {
                return Err(invalid(format!("evaluate.approaches[{i}]"), format!("unknown approach {a}")));
            }
        }
        for (i, m) in self.evaluate.models.iter().enumerate() {
            if ModelKind::parse(m).is_none() {
                return Err(invalid(format!("evaluate.models[{i}]"), format!("unknown model '{m}'")));
            }
        }
        for (i, f) in self.report.formats.iter().enumerate() {
            if f != "json" && f != "text" {
                return Err(invalid(format!("report.formats[{i}]"), format!("unknown format '{f}'")));
            }
        }
        Ok(())
    }

    pub fn learner(&self, kind: ModelKind) -> LearnerSpec {
        match kind {
            ModelKind::RandomForest => LearnerSpec::RandomForest(self.rf.clone()),
            ModelKind::Svm => LearnerSpec::Svm(self.svm),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| invalid("<root>", e.to_string()))
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))[..16].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_all_defaults() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.hash(), RunConfig::default().hash());
    }

    #[test]
    fn overrides_and_hash_changes() {
        let c = RunConfig::from_toml_str("seed = 7\n[rf]\nn_trees = 50\nmtry = 3\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.rf.n_trees, 50);
        assert_ne!(c.hash(), RunConfig::default().hash());
    }

    #[test]
    fn unknown_key_names_its_path() {
        match RunConfig::from_toml_str("[rf]\ntrees = 5\n") {
            Err(Error::ConfigInvalid { key, .. }) => assert_eq!(key, "rf.trees"),
            other => panic!("unexpected {other:?}"),
        }
        match RunConfig::from_toml_str("[svm]\nc = \"big\"\n") {
            Err(Error::ConfigInvalid { key, .. }) => assert_eq!(key, "svm.c"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mtry_checked_against_feature_count() {
        let c = RunConfig::from_toml_str("[rf]\nmtry = 99\n").unwrap();
        match c.validate(Some(40)) {
            Err(Error::ConfigInvalid { key, .. }) => assert_eq!(key, "rf.mtry"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            RunConfig::from_toml_str("[protocol]\nfolds = 1\n"),
            Err(Error::ConfigInvalid { key, .. }) if key == "protocol.folds"
        ));
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig::default();
        let back = RunConfig::from_toml_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}

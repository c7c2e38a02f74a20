//! Experiment configuration, stored as JSON. Every field has a default so a
//! config file only needs to name what it changes.

use std::fmt;
use std::path::PathBuf;

use folkmotif_core::multiword::{MultiwordMode, PhraseParams};
use folkmotif_core::network::{NetConfig, TrainConfig};
use folkmotif_core::baselines::SvmConfig;
use folkmotif_core::sgns::SgnsConfig;
use folkmotif_core::Representation;
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repr {
    Intervallic,
    Rhythmic,
}

impl From<Repr> for Representation {
    fn from(r: Repr) -> Self {
        match r {
            Repr::Intervallic => Representation::Intervallic,
            Repr::Rhythmic => Representation::Rhythmic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "attention")]
    Attention,
    #[serde(rename = "doc2vec+svm")]
    Doc2VecSvm,
    #[serde(rename = "average+svm")]
    AverageSvm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Attention, ModelKind::Doc2VecSvm, ModelKind::AverageSvm];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Attention => "attention",
            ModelKind::Doc2VecSvm => "doc2vec+svm",
            ModelKind::AverageSvm => "average+svm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A corpus source: a kern file, a directory of kern files, or a JSONL file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub path: PathBuf,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSettings {
    pub dim: usize,
    pub window: usize,
    pub shrink_window: bool,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub power: f64,
    pub min_count: u64,
}

impl Default for EmbeddingSettings {
    fn default() -> Self {
        let s = SgnsConfig::default();
        EmbeddingSettings {
            dim: s.dim,
            window: s.window,
            shrink_window: s.shrink_window,
            negatives: s.negatives,
            epochs: s.epochs,
            lr_start: s.lr_start,
            lr_end: s.lr_end,
            power: s.power,
            min_count: 1,
        }
    }
}

impl EmbeddingSettings {
    pub fn sgns(&self, seed: u64) -> SgnsConfig {
        SgnsConfig {
            dim: self.dim,
            window: self.window,
            shrink_window: self.shrink_window,
            negatives: self.negatives,
            epochs: self.epochs,
            lr_start: self.lr_start,
            lr_end: self.lr_end,
            power: self.power,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSettings {
    pub hidden: usize,
    pub attention_dim: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub clip_norm: f64,
    /// Fraction of the training split held out for choosing the best epoch.
    pub validation_ratio: Option<f64>,
}

impl Default for NetworkSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        NetworkSettings {
            hidden: 200,
            attention_dim: 100,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            clip_norm: t.clip_norm,
            validation_ratio: None,
        }
    }
}

impl NetworkSettings {
    pub fn net(&self, input_dim: usize, classes: usize) -> NetConfig {
        NetConfig { input_dim, hidden: self.hidden, attention_dim: self.attention_dim, classes }
    }

    pub fn train(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            clip_norm: self.clip_norm,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmSettings {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmSettings {
    fn default() -> Self {
        let s = SvmConfig::default();
        SvmSettings { lambda: s.lambda, epochs: s.epochs }
    }
}

impl SvmSettings {
    pub fn svm(&self, seed: u64) -> SvmConfig {
        SvmConfig { lambda: self.lambda, epochs: self.epochs, seed }
    }
}

/// PV-DBOW reuses the skip-gram dimension, negatives and learning rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Doc2VecSettings {
    pub epochs: usize,
    pub infer_epochs: usize,
}

impl Default for Doc2VecSettings {
    fn default() -> Self {
        Doc2VecSettings { epochs: 20, infer_epochs: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub corpora: Vec<Source>,
    pub output_dir: PathBuf,
    pub representation: Repr,
    pub mw_size: usize,
    pub phrase_mode: bool,
    pub phrase_delta: f64,
    pub phrase_threshold: f64,
    pub models: Vec<ModelKind>,
    pub split_ratio: f64,
    pub seed: u64,
    /// Single-worker training throughout; required for reproducible runs.
    pub deterministic: bool,
    /// Worker threads for the non-deterministic mode; 0 picks the number of
    /// available cores.
    pub workers: usize,
    pub embedding: EmbeddingSettings,
    pub network: NetworkSettings,
    pub svm: SvmSettings,
    pub doc2vec: Doc2VecSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = PhraseParams::default();
        ExperimentConfig {
            name: "experiment".into(),
            corpora: Vec::new(),
            output_dir: PathBuf::from("out"),
            representation: Repr::Intervallic,
            mw_size: 2,
            phrase_mode: false,
            phrase_delta: p.delta,
            phrase_threshold: p.threshold,
            models: vec![ModelKind::Attention],
            split_ratio: 0.75,
            seed: 0,
            deterministic: true,
            workers: 0,
            embedding: EmbeddingSettings::default(),
            network: NetworkSettings::default(),
            svm: SvmSettings::default(),
            doc2vec: Doc2VecSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Usage(format!("config: {m}")));
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return bad("split_ratio must lie strictly between 0 and 1");
        }
        if !(2..=3).contains(&self.mw_size) {
            return bad("mw_size must be 2 or 3");
        }
        if self.models.is_empty() {
            return bad("at least one model is required");
        }
        if let Some(v) = self.network.validation_ratio {
            if !(v > 0.0 && v < 1.0) {
                return bad("network.validation_ratio must lie strictly between 0 and 1");
            }
        }
        if self.embedding.min_count == 0 {
            return bad("embedding.min_count must be at least 1");
        }
        self.embedding.sgns(self.seed).validate().map_err(|e| Error::Usage(format!("config: {e}")))?;
        self.network.net(self.embedding.dim, 2).validate().map_err(|e| Error::Usage(format!("config: {e}")))?;
        Ok(())
    }

    pub fn multiword_mode(&self) -> MultiwordMode {
        if self.phrase_mode {
            MultiwordMode::Phrase(PhraseParams { delta: self.phrase_delta, threshold: self.phrase_threshold })
        } else {
            MultiwordMode::Sliding
        }
    }

    /// Defaults for the two collection experiments: 1 compares all three
    /// models on two collections, 2 runs the attention network on three.
    pub fn preset(experiment: u8) -> Option<Self> {
        let base = ExperimentConfig::default();
        match experiment {
            1 => Some(ExperimentConfig {
                name: "experiment-1".into(),
                output_dir: PathBuf::from("out/experiment-1"),
                models: ModelKind::ALL.to_vec(),
                ..base
            }),
            2 => Some(ExperimentConfig { name: "experiment-2".into(), output_dir: PathBuf::from("out/experiment-2"), ..base }),
            _ => None,
        }
    }

    /// Overlays a JSON config onto `self`; nested objects merge key by key.
    pub fn overlay_json(&self, text: &str) -> Result<Self, Error> {
        let patch: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))?;
        let mut base = serde_json::to_value(self).expect("config always serializes");
        merge(&mut base, patch);
        let cfg: ExperimentConfig = serde_json::from_value(base).map_err(|e| Error::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn worker_count(&self) -> usize {
        if self.deterministic {
            1
        } else if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        }
    }
}

fn merge(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

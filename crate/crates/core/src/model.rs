//! Versioned model files.
//!
//! A model is stored as pretty-printed UTF-8 JSON. Weights are written
//! row-major per layer with shortest round-trip float formatting, so a
//! load/save cycle reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encode::{AbstractionKind, AbstractionSpec, InputMode};
use crate::error::{Error, Result};
use crate::fnn::{Network, TrainConfig};
use crate::harness::{ExperimentConfig, SampleCounts, TrainedModel, Variant};
use crate::oracle::{ComparatorSpec, NeuralOracle};

pub const FORMAT: &str = "nnoracle-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub format_version: u32,
    pub layer_sizes: Vec<usize>,
    pub abstraction: AbstractionSpec,
    pub comparator: ComparatorSpec,
    pub input_mode: InputMode,
    pub train: TrainConfig,
    pub data_seed: u64,
    /// Size of the training set drawn from `data_seed`.
    pub training_samples: usize,
    pub mse_final: Option<f64>,
    pub weights: Vec<Vec<f64>>,
}

impl ModelFile {
    pub fn from_oracle(oracle: &NeuralOracle, train: TrainConfig, data_seed: u64, training_samples: usize) -> Self {
        ModelFile {
            format: FORMAT.to_string(),
            format_version: FORMAT_VERSION,
            layer_sizes: oracle.network.layer_sizes().to_vec(),
            abstraction: oracle.abstraction,
            comparator: oracle.comparator,
            input_mode: oracle.input_mode,
            train,
            data_seed,
            training_samples,
            mse_final: None,
            weights: oracle.network.weights().to_vec(),
        }
    }

    pub fn from_trained(model: &TrainedModel, config: &ExperimentConfig) -> Self {
        ModelFile {
            mse_final: Some(model.mse),
            ..Self::from_oracle(&model.oracle, config.train, config.data_seed, config.counts.train)
        }
    }

    /// The variant whose abstraction and thresholds this model uses.
    pub fn variant(&self) -> Variant {
        match self.abstraction.kind {
            AbstractionKind::Direct => Variant::Direct,
            AbstractionKind::Uniform if self.comparator.th_low < 0.15 => Variant::Unimin,
            AbstractionKind::Uniform => Variant::Uni,
            AbstractionKind::LowStretch => Variant::Lower,
            AbstractionKind::CenterStretch => Variant::Center,
        }
    }

    /// The experiment that produced this model, evaluated at
    /// `aggressiveness` with the given evaluation counts.
    pub fn experiment(&self, aggressiveness: u8, counts: SampleCounts) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(self.variant(), self.abstraction.n, aggressiveness);
        c.train = self.train;
        c.data_seed = self.data_seed;
        c.counts = SampleCounts {
            train: self.training_samples,
            ..counts
        };
        c.hidden = self.layer_sizes.get(1).copied().unwrap_or(0);
        c.input_mode = self.input_mode;
        c
    }

    pub fn oracle(&self) -> Result<NeuralOracle> {
        let network = Network::from_weights(self.layer_sizes.clone(), self.weights.clone())
            .map_err(|e| Error::Model(e.to_string()))?;
        NeuralOracle::new(network, self.abstraction, self.comparator, self.input_mode)
            .map_err(|e| Error::Model(e.to_string()))
    }

    pub fn to_text(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if m.format != FORMAT {
            return Err(Error::Model(format!("not a model file (format `{}`)", m.format)));
        }
        if m.format_version != FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                m.format_version
            )));
        }
        m.oracle()?;
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::AbstractionKind;

    fn sample_model() -> ModelFile {
        let net = Network::init(&[8, 24, 30], 4, 0.5).unwrap();
        let oracle = NeuralOracle::new(
            net,
            AbstractionSpec::new(AbstractionKind::Uniform, 30).unwrap(),
            ComparatorSpec::categorical(0, 0.2, 0.8).unwrap(),
            InputMode::Normalized,
        )
        .unwrap();
        ModelFile::from_oracle(&oracle, TrainConfig::default(), 1, 500)
    }

    #[test]
    fn text_round_trip_is_byte_identical() {
        let m = sample_model();
        let text = m.to_text().unwrap();
        let back = ModelFile::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text().unwrap(), text);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(ModelFile::from_text("{"), Err(Error::Model(_))));
        let mut m = sample_model();
        m.format_version = 99;
        assert!(ModelFile::from_text(&m.to_text().unwrap()).is_err());
        let mut m = sample_model();
        m.weights[1].pop();
        assert!(ModelFile::from_text(&m.to_text().unwrap()).is_err());
        let mut m = sample_model();
        m.format = "other".into();
        assert!(ModelFile::from_text(&m.to_text().unwrap()).is_err());
        let text = sample_model().to_text().unwrap().replace("\"data_seed\"", "\"extra\": 1,\n  \"data_seed\"");
        assert!(ModelFile::from_text(&text).is_err());
    }

    #[test]
    fn variant_is_recovered() {
        let m = sample_model();
        assert_eq!(m.variant(), Variant::Uni);
        let c = m.experiment(3, SampleCounts::default());
        assert_eq!((c.variant, c.n, c.aggressiveness, c.hidden), (Variant::Uni, 30, 3, 24));
        assert_eq!(c.counts.train, 500);
    }
}

//! Configuration resolution: command-line flags override the optional config
//! file, which overrides the built-in defaults (quarterly n=200 h=4, monthly
//! n=948 h=12, 1% significance).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use predreg::{Error, Frequency, Result, Schema};

/// Environment variable supplying the default output directory.
pub const OUT_DIR_ENV: &str = "PREDREG_OUT";

/// Optional JSON config file mirroring the command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub frequency: Option<String>,
    pub models: Option<Vec<String>>,
    pub insample_size: Option<usize>,
    pub horizon: Option<usize>,
    pub levels: Option<Vec<f64>>,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("config file {}: {e}", p.display())))
            }
        }
    }
}

/// Schema file: JSON object mapping roles to column names. Missing keys fall
/// back to the role name itself; a missing `cay` key means "pick up a `cay`
/// column when the header has one".
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    date: Option<String>,
    price: Option<String>,
    dividends: Option<String>,
    earnings: Option<String>,
    bm: Option<String>,
    cay: Option<String>,
}

pub fn load_schema(path: Option<&Path>) -> Result<Schema> {
    let mut schema = Schema::default();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p)?;
        let file: SchemaFile = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("schema file {}: {e}", p.display())))?;
        if let Some(v) = file.date {
            schema.date = v;
        }
        if let Some(v) = file.price {
            schema.price = v;
        }
        if let Some(v) = file.dividends {
            schema.dividends = v;
        }
        if let Some(v) = file.earnings {
            schema.earnings = v;
        }
        if let Some(v) = file.bm {
            schema.bm = v;
        }
        if let Some(v) = file.cay {
            schema.cay = Some(v);
        }
    }
    Ok(schema)
}

/// Paper-style defaults per frequency.
pub fn default_insample_size(frequency: Frequency) -> usize {
    match frequency {
        Frequency::Quarterly => 200,
        Frequency::Monthly => 948,
    }
}

pub fn default_horizon(frequency: Frequency) -> usize {
    match frequency {
        Frequency::Quarterly => 4,
        Frequency::Monthly => 12,
    }
}

pub fn default_models(frequency: Frequency) -> Vec<String> {
    match frequency {
        Frequency::Quarterly => vec![
            "model-1-1".into(),
            "model-1-2".into(),
            "model-1-3".into(),
            "model-1-4".into(),
        ],
        Frequency::Monthly => vec!["model-2-1".into(), "model-2-2".into(), "model-2-3".into()],
    }
}

pub fn default_levels() -> Vec<f64> {
    vec![0.01, 0.05, 0.10]
}

/// Fully resolved settings, recorded verbatim in the run manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insample_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lag_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deterministic: Option<String>,
    pub seed: u64,
    pub out: PathBuf,
}

impl ResolvedConfig {
    pub fn new(command: &str, seed: u64, out: PathBuf) -> Self {
        ResolvedConfig {
            command: command.to_string(),
            input: None,
            schema: None,
            frequency: None,
            models: None,
            insample_size: None,
            horizon: None,
            levels: None,
            horizons: None,
            paths: None,
            kind: None,
            length: None,
            noise_std: None,
            phi: None,
            lag_order: None,
            deterministic: None,
            seed,
            out,
        }
    }
}

use std::path::Path;

use serde::Deserialize;

use crate::{
    cli::{Format, InputFormat},
    CliError,
};

/// Parameter defaults read from `--config`. Explicit flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub format: Option<String>,
    pub input_format: Option<String>,
    pub seed: Option<u64>,
    pub a: Option<f64>,
    pub v: Option<f64>,
    pub k: Option<f64>,
    pub j: Option<Vec<u64>>,
    #[serde(rename = "L")]
    pub l: Option<Vec<f64>>,
    pub vk: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub t: Option<usize>,
    pub c_hash: Option<f64>,
    pub c_mem: Option<f64>,
    pub tau: Option<Vec<f64>>,
    pub v_dollars: Option<f64>,
    pub v_grid: Option<Vec<f64>>,
    pub cutoff: Option<u64>,
    pub tol: Option<f64>,
    pub epsilon_dp: Option<f64>,
    pub trials: Option<usize>,
    pub sizes: Option<Vec<u64>>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn format(&self, flag: Option<Format>, default: Format) -> Result<Format, CliError> {
        if let Some(f) = flag {
            return Ok(f);
        }
        match self.format.as_deref() {
            None => Ok(default),
            Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some(other) => Err(CliError::Usage(format!("config: unknown format {other:?}"))),
        }
    }

    pub fn input_format(&self, flag: Option<InputFormat>) -> Result<InputFormat, CliError> {
        if let Some(f) = flag {
            return Ok(f);
        }
        match self.input_format.as_deref() {
            None | Some("raw-counts") => Ok(InputFormat::RawCounts),
            Some("runlength-pairs") => Ok(InputFormat::RunlengthPairs),
            Some(other) => Err(CliError::Usage(format!(
                "config: unknown input_format {other:?}"
            ))),
        }
    }
}

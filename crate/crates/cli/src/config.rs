//! Run configuration: the JSON file form and its merge with command flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use besselkit_core::experiments::{ExperimentParams, TheoremTag, Tolerances};
use besselkit_core::{make_grid, Error, FunctionSpec, PeriodicGrid, Result, SpaceSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub tag: String,
    #[serde(default)]
    pub params: ExperimentParams,
    #[serde(default = "default_ensemble_size")]
    pub ensemble_size: usize,
}

pub fn default_ensemble_size() -> usize {
    50
}

/// Everything a command can read from `--config`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `"n:N"`, e.g. `"1:64"`.
    pub grid: Option<String>,
    pub functions: Vec<String>,
    pub spaces: Vec<String>,
    pub experiment: Option<ExperimentSection>,
    pub output: OutputSection,
    pub tolerances: Option<Tolerances>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    /// Parses every textual field without evaluating anything.
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.grid {
            parse_grid(g)?;
        }
        for f in &self.functions {
            FunctionSpec::from_str(f)?;
        }
        for s in &self.spaces {
            SpaceSpec::from_str(s)?;
        }
        if let Some(e) = &self.experiment {
            TheoremTag::from_str(&e.tag)?;
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<PeriodicGrid> {
        parse_grid(self.grid.as_deref().unwrap_or("1:64"))
    }

    pub fn function_specs(&self) -> Result<Vec<FunctionSpec>> {
        self.functions.iter().map(|f| f.parse()).collect()
    }

    pub fn space_specs(&self) -> Result<Vec<SpaceSpec>> {
        self.spaces.iter().map(|s| s.parse()).collect()
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }
}

/// `"n:N"` to a grid.
pub fn parse_grid(text: &str) -> Result<PeriodicGrid> {
    let (d, n) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("grid '{text}' must look like n:N")))?;
    let d: usize = d.trim().parse().map_err(|_| Error::Parse(format!("grid dimension '{d}'")))?;
    let n: usize = n.trim().parse().map_err(|_| Error::Parse(format!("grid size '{n}'")))?;
    make_grid(d, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "grid": "1:64",
        "functions": ["rand:band=8,seed=7", "ind:[0.25,0.75)"],
        "spaces": ["Hsp:s=0.5,p=2", "Lp:p=2"],
        "experiment": {"tag": "FFTC", "params": {"n": 1, "N": 64, "s": 0.5, "p": 2.0, "seed": 3}, "ensemble_size": 20},
        "output": {"path": "out.json", "format": "json"},
        "tolerances": {"identity": 1e-11},
        "threads": 2
    }"#;

    #[test]
    fn round_trip_is_lossless() {
        let a = RunConfig::from_json(SAMPLE).unwrap();
        let b = RunConfig::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tolerances.unwrap().drift, 0.25);
        assert_eq!(a.experiment.as_ref().unwrap().params.seed, 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for bad in [
            r#"{"grid": "1:64", "colour": 1}"#,
            r#"{"output": {"path": "x", "fmt": "csv"}}"#,
            r#"{"experiment": {"tag": "FFTC", "params": {"z": 1}}}"#,
            r#"{"tolerances": {"drfit": 0.1}}"#,
        ] {
            assert!(RunConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn textual_fields_are_validated() {
        assert!(RunConfig::from_json(r#"{"spaces": ["Hsp:s=0.5"]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"grid": "3:64"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"experiment": {"tag": "FSET"}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"functions": ["rand:seed=8"]}"#).is_err());
    }
}

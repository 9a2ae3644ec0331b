//! Run configuration: built-in defaults, then a TOML file, then flags.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use simsmooth::evaluation::{BaseModelId, ExperimentConfig, Method};
use simsmooth::similarity::Neighborhood;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

/// Every field optional, so a file can set only what it cares about.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<String>,
    pub train_fraction: Option<f64>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub models: Option<Vec<BaseModelId>>,
    pub methods: Option<Vec<Method>>,
    pub beta_grid: Option<Vec<f64>>,
    pub neighborhood: Option<Neighborhood>,
    pub gamma: Option<f64>,
    pub gt_cutoff: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// `other` wins wherever it has a value.
    pub fn overlay(self, other: FileConfig) -> FileConfig {
        FileConfig {
            input: other.input.or(self.input),
            train_fraction: other.train_fraction.or(self.train_fraction),
            folds: other.folds.or(self.folds),
            seed: other.seed.or(self.seed),
            models: other.models.or(self.models),
            methods: other.methods.or(self.methods),
            beta_grid: other.beta_grid.or(self.beta_grid),
            neighborhood: other.neighborhood.or(self.neighborhood),
            gamma: other.gamma.or(self.gamma),
            gt_cutoff: other.gt_cutoff.or(self.gt_cutoff),
            jobs: other.jobs.or(self.jobs),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        let d = ExperimentConfig::default();
        ExperimentConfig {
            input: self.input.clone(),
            train_fraction: self.train_fraction.unwrap_or(d.train_fraction),
            folds: self.folds.unwrap_or(d.folds),
            seed: self.seed.unwrap_or(d.seed),
            models: self.models.clone().unwrap_or(d.models),
            methods: self.methods.clone().unwrap_or(d.methods),
            beta_grid: self.beta_grid.clone().unwrap_or(d.beta_grid),
            neighborhood: self.neighborhood.unwrap_or(d.neighborhood),
            gamma: self.gamma.unwrap_or(d.gamma),
            gt_cutoff: self.gt_cutoff.unwrap_or(d.gt_cutoff),
        }
    }
}

/// Comma-separated list, e.g. `1,4.5`.
fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| e.to_string()))
        .collect()
}

/// Either a comma-separated list or `start:step:end`, inclusive. An empty
/// string is an empty grid.
pub fn parse_beta_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let (start, step, end) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0 && start > 0.0 && end >= start) {
            return Err(format!("bad range {s:?}"));
        }
        let steps = ((end - start) / step + 1e-9).floor() as usize;
        // multiply rather than accumulate so grid points are exact where possible
        return Ok((0..=steps).map(|i| start + step * i as f64).collect());
    }
    parse_list(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_beta_grid("0.5:0.5:2").unwrap(), vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_beta_grid("1,4.5").unwrap(), vec![1.0, 4.5]);
        assert!(parse_beta_grid("").unwrap().is_empty());
        assert!(parse_beta_grid("1:0:3").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file = FileConfig {
            seed: Some(1),
            folds: Some(3),
            ..FileConfig::default()
        };
        let flags = FileConfig {
            seed: Some(9),
            ..FileConfig::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.folds, Some(3));
        assert_eq!(merged.experiment().train_fraction, 0.8);
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            input = "pairs.tsv"
            seed = 4
            models = ["MLE-1", "BO-o1"]
            methods = ["AVG", "CONFUSION"]
            beta_grid = [1.0, 2.0]
            neighborhood = "top:10"
            format = "json"
        "#;
        let cfg: FileConfig = toml::from_str(text).unwrap();
        let exp = cfg.experiment();
        assert_eq!(exp.models, vec![BaseModelId::Mle1, BaseModelId::BoO1]);
        assert_eq!(exp.neighborhood, Neighborhood::TopK(10));
        assert_eq!(cfg.format, Some(Format::Json));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::exec::Execution;
use crate::baselines::KnnMetric;
use crate::classifier::{ClassifierKind, ClassifierSpec};
use crate::error::{Error, Result};
use crate::ned::check_order;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Iid,
    Overlap,
    Nonoverlap,
    FromFile,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Iid => "iid",
            Family::Overlap => "overlap",
            Family::Nonoverlap => "nonoverlap",
            Family::FromFile => "from-file",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(Family::Iid),
            "overlap" => Ok(Family::Overlap),
            "nonoverlap" => Ok(Family::Nonoverlap),
            "from-file" => Ok(Family::FromFile),
            other => Err(Error::InvalidConfig(format!("unknown family {other:?}"))),
        }
    }
}

/// How often the random i.i.d. source is redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regeneration {
    /// One source for the whole sweep.
    #[default]
    Once,
    /// A fresh source for every feature length.
    PerN,
    /// A fresh source for every replication.
    PerRep,
}

impl std::str::FromStr for Regeneration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "once" => Ok(Regeneration::Once),
            "per-n" => Ok(Regeneration::PerN),
            "per-rep" => Ok(Regeneration::PerRep),
            other => Err(Error::InvalidConfig(format!("unknown regeneration mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Source model for `family = from-file`.
    pub model_path: Option<PathBuf>,
    pub n_grid: Vec<usize>,
    pub t: usize,
    pub r: f64,
    pub alphabet_size: usize,
    pub num_labels: usize,
    pub tests_per_label: usize,
    pub reps: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub knn_k: usize,
    pub knn_metric: KnnMetric,
    pub nb_smoothing: bool,
    pub iid_regeneration: Regeneration,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::Iid,
            model_path: None,
            n_grid: vec![10],
            t: 1,
            r: 2.0,
            alphabet_size: 6,
            num_labels: 2,
            tests_per_label: 1000,
            reps: 100,
            classifiers: ClassifierKind::ALL.to_vec(),
            knn_k: 1,
            knn_metric: KnnMetric::Euclidean,
            nb_smoothing: false,
            iid_regeneration: Regeneration::Once,
            seed: 0,
            out_path: None,
            execution: Execution::Parallel,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `n_min, n_min + step, ...` up to `n_max` inclusive.
    pub fn grid(n_min: usize, n_max: usize, step: usize) -> Result<Vec<usize>> {
        if n_min == 0 || step == 0 || n_max < n_min {
            return Err(Error::InvalidConfig(format!(
                "invalid n grid: min {n_min}, max {n_max}, step {step}"
            )));
        }
        Ok((n_min..=n_max).step_by(step).collect())
    }

    pub fn spec(&self, kind: ClassifierKind) -> ClassifierSpec {
        ClassifierSpec {
            kind,
            r: self.r,
            knn_k: self.knn_k,
            knn_metric: self.knn_metric,
            nb_smoothing: self.nb_smoothing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.family != Family::FromFile || !self.n_grid.is_empty() {
            if self.n_grid.is_empty() {
                return bad("n_grid must not be empty".into());
            }
            if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!(
                    "n_grid must be positive and strictly ascending: {:?}",
                    self.n_grid
                ));
            }
        }
        if self.family == Family::FromFile && self.model_path.is_none() {
            return bad("family from-file needs model_path".into());
        }
        if self.family == Family::Iid {
            if self.alphabet_size < 2 {
                return bad(format!("alphabet_size must be >= 2 (got {})", self.alphabet_size));
            }
            if self.num_labels < 2 {
                return Err(Error::TooFewLabels(self.num_labels));
            }
        }
        self.validate_protocol()
    }

    /// Checks the settings that apply whatever the source.
    pub fn validate_protocol(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.t == 0 {
            return bad("t must be at least 1".into());
        }
        check_order(self.r)?;
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.tests_per_label == 0 {
            return bad("tests_per_label must be at least 1".into());
        }
        if self.classifiers.is_empty() {
            return bad("at least one classifier is required".into());
        }
        if self
            .classifiers
            .iter()
            .enumerate()
            .any(|(i, c)| self.classifiers[..i].contains(c))
        {
            return bad(format!("duplicate classifiers in {:?}", self.classifiers));
        }
        if self.classifiers.contains(&ClassifierKind::Knn) && self.knn_k == 0 {
            return bad("knn_k must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg: ExperimentConfig =
            ExperimentConfig::from_json(r#"{"family":"overlap","n_grid":[1,2,3],"classifiers":["ned","nb"]}"#).unwrap();
        assert_eq!(cfg.family, Family::Overlap);
        assert_eq!(cfg.t, 1);
        assert_eq!(cfg.classifiers, vec![ClassifierKind::Ned, ClassifierKind::Nb]);
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"famly":"iid"}"#).is_err());
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::default();
        ok.validate().unwrap();
        let cases = [
            ExperimentConfig {
                n_grid: vec![],
                ..ok.clone()
            },
            ExperimentConfig {
                n_grid: vec![3, 2],
                ..ok.clone()
            },
            ExperimentConfig {
                n_grid: vec![0, 2],
                ..ok.clone()
            },
            ExperimentConfig { reps: 0, ..ok.clone() },
            ExperimentConfig {
                tests_per_label: 0,
                ..ok.clone()
            },
            ExperimentConfig { r: 0.5, ..ok.clone() },
            ExperimentConfig {
                family: Family::FromFile,
                ..ok.clone()
            },
            ExperimentConfig {
                classifiers: vec![],
                ..ok.clone()
            },
            ExperimentConfig {
                alphabet_size: 1,
                ..ok.clone()
            },
        ];
        for c in cases {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn grid() {
        assert_eq!(ExperimentConfig::grid(1, 10, 4).unwrap(), vec![1, 5, 9]);
        assert!(ExperimentConfig::grid(5, 4, 1).is_err());
    }
}

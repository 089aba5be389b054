use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{Knn, KnnMetric, NaiveBayes};
use crate::error::{Error, Result};
use crate::model::{FeatureVector, TrainingSet};
use crate::ned::{NedClassifier, DEFAULT_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Ned,
    Nb,
    Knn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Ned, ClassifierKind::Nb, ClassifierKind::Knn];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Ned => "ned",
            ClassifierKind::Nb => "nb",
            ClassifierKind::Knn => "knn",
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ned" => Ok(Self::Ned),
            "nb" => Ok(Self::Nb),
            "knn" => Ok(Self::Knn),
            other => Err(Error::InvalidConfig(format!("unknown classifier {other:?}"))),
        }
    }
}

/// Everything needed to fit a classifier of a given kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub r: f64,
    pub knn_k: usize,
    pub knn_metric: KnnMetric,
    pub nb_smoothing: bool,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind) -> Self {
        Self {
            kind,
            r: DEFAULT_ORDER,
            knn_k: 1,
            knn_metric: KnnMetric::Euclidean,
            nb_smoothing: false,
        }
    }

    pub fn with_order(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.knn_k = k;
        self
    }

    pub fn fit(&self, ts: &TrainingSet) -> Result<Trained> {
        Ok(match self.kind {
            ClassifierKind::Ned => Trained::Ned(NedClassifier::fit(ts, self.r)?),
            ClassifierKind::Nb => Trained::Nb(NaiveBayes::fit_with(ts, self.nb_smoothing)?),
            ClassifierKind::Knn => Trained::Knn(Knn::fit(ts, self.knn_k, self.knn_metric)?),
        })
    }
}

/// A classifier fitted to one training set.
#[derive(Debug, Clone)]
pub enum Trained {
    Ned(NedClassifier),
    Nb(NaiveBayes),
    Knn(Knn),
}

impl Trained {
    pub fn classify<R: Rng + ?Sized>(&self, v: &FeatureVector, rng: &mut R) -> Result<usize> {
        match self {
            Trained::Ned(c) => c.classify(v, rng),
            Trained::Nb(c) => c.classify(v, rng),
            Trained::Knn(c) => c.classify(v, rng),
        }
    }

    /// Exact probability of each output label, randomized tie-breaks included.
    pub fn decision_probabilities(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        match self {
            Trained::Ned(c) => c.decision_probabilities(v),
            Trained::Nb(c) => c.decision_probabilities(v),
            Trained::Knn(c) => c.decision_probabilities(v),
        }
    }
}

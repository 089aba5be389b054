//! Nearest-empirical-distribution classification for feature vectors whose
//! elements are independent but not identically distributed.
//!
//! A test vector is assigned the label whose concatenated training vectors
//! have the closest empirical symbol distribution. The crate also provides
//! the analytical error bounds for this rule, naive Bayes and k-NN
//! baselines, synthetic source families, and a reproducible Monte Carlo
//! harness with an exact enumeration oracle for small instances.

pub mod baselines;
pub mod bounds;
pub mod classifier;
pub mod datagen;
pub mod decision;
pub mod error;
pub mod harness;
pub mod model;
pub mod ned;

pub use classifier::{ClassifierKind, ClassifierSpec, Trained};
pub use error::{Error, Result};
pub use model::{concat_training, Alphabet, FeatureVector, LabelSet, ModelDoc, SourceModel, TrainingSet};
pub use ned::{classify, count_symbol, empirical, minkowski, EmpiricalDistribution, NedClassifier};

//! Exact error probability by exhaustive enumeration.
//!
//! Every training realization (`|X| t n` elements) and every test vector
//! (`n` elements) is visited and weighted by its probability under the
//! source. Randomized tie-breaks enter through each classifier's exact
//! decision distribution, so the result carries no sampling noise.

use std::sync::Arc;

use crate::classifier::ClassifierSpec;
use crate::error::{Error, Result};
use crate::model::{FeatureVector, SourceModel, TrainingSet};

/// Largest enumeration the oracle accepts, in weighted terms.
pub const ORACLE_MAX_TERMS: f64 = 1e8;

/// `|Y|^(n t |X|) * |Y|^n * |X|`.
pub fn oracle_term_count(model: &SourceModel, t: usize) -> f64 {
    let ys = model.alphabet_size() as f64;
    let (n, xs) = (model.n() as f64, model.num_labels() as f64);
    ys.powf(n * t as f64 * xs) * ys.powf(n) * xs
}

/// All vectors of positive probability under `label`, with their probabilities.
fn support(model: &SourceModel, label: usize) -> Vec<(FeatureVector, f64)> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(model.n());
    fn go(model: &SourceModel, label: usize, w: f64, cur: &mut Vec<u32>, out: &mut Vec<(FeatureVector, f64)>) {
        let i = cur.len();
        if i == model.n() {
            out.push((FeatureVector::new(cur.clone()).expect("n >= 1"), w));
            return;
        }
        for (y, &p) in model.row(i, label).iter().enumerate() {
            if p > 0.0 {
                cur.push(y as u32);
                go(model, label, w * p, cur, out);
                cur.pop();
            }
        }
    }
    go(model, label, 1.0, &mut cur, &mut out);
    out
}

pub fn exact_error_oracle(model: &SourceModel, t: usize, spec: &ClassifierSpec) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidConfig("t must be at least 1".into()));
    }
    let terms = oracle_term_count(model, t);
    if terms > ORACLE_MAX_TERMS {
        return Err(Error::InstanceTooLarge {
            terms,
            limit: ORACLE_MAX_TERMS,
        });
    }
    let xs = model.num_labels();
    let per_label: Vec<Vec<(FeatureVector, f64)>> = (0..xs).map(|x| support(model, x)).collect();

    // A training realization is one choice of t vectors per label; walk the
    // cartesian product of the per-label supports.
    let slots = xs * t;
    let mut idx = vec![0usize; slots];
    let mut error = 0.0;
    'outer: loop {
        let mut weight = 1.0;
        let vectors: Vec<Vec<FeatureVector>> = (0..xs)
            .map(|x| {
                (0..t)
                    .map(|s| {
                        let (v, p) = &per_label[x][idx[x * t + s]];
                        weight *= p;
                        v.clone()
                    })
                    .collect()
            })
            .collect();
        let ts = TrainingSet::new(Arc::clone(model.alphabet()), Arc::clone(model.labels()), vectors)?;
        let clf = spec.fit(&ts)?;
        for (x, tests) in per_label.iter().enumerate() {
            for (v, p) in tests {
                let probs = clf.decision_probabilities(v)?;
                error += weight * p * (1.0 - probs[x]);
            }
        }

        for slot in (0..slots).rev() {
            idx[slot] += 1;
            if idx[slot] < per_label[slot / t].len() {
                continue 'outer;
            }
            idx[slot] = 0;
        }
        break;
    }
    Ok(error / xs as f64)
}

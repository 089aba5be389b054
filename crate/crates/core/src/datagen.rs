//! Synthetic source families and samplers.
//!
//! * i.i.d.: one random categorical distribution per label, shared by every
//!   position;
//! * overlapping: alphabet `{-n..n}`, position `i` supported on `{-i..i}`
//!   (nested supports), triangular shape for `x1` and flat for `x2`;
//! * non-overlapping: alphabet `{1..(n+1)^2-1}`, position `i` supported on
//!   `{i^2..(i+1)^2-1}` (disjoint supports), same two shapes.
//!
//! The triangular and flat rows are normalized by their raw sums.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Alphabet, FeatureVector, LabelSet, SourceModel, TrainingSet};

/// Random i.i.d. model over the symbols `0..alphabet_size`: each label gets
/// `alphabet_size` uniform(0,1) weights normalized to sum one, used at all
/// `n` positions.
pub fn gen_iid_model<R: Rng + ?Sized>(
    alphabet_size: usize,
    num_labels: usize,
    n: usize,
    rng: &mut R,
) -> Result<SourceModel> {
    if alphabet_size < 2 {
        return Err(Error::InvalidConfig(format!(
            "alphabet size must be >= 2 (got {alphabet_size})"
        )));
    }
    if num_labels < 2 {
        return Err(Error::TooFewLabels(num_labels));
    }
    let rows: Vec<Vec<f64>> = (0..num_labels)
        .map(|_| {
            let w: Vec<f64> = (0..alphabet_size).map(|_| rng.random::<f64>()).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect();
    let mut flat = Vec::with_capacity(n * num_labels * alphabet_size);
    for _ in 0..n {
        for row in &rows {
            flat.extend_from_slice(row);
        }
    }
    SourceModel::from_flat(
        Arc::new(Alphabet::range(0, alphabet_size as i64 - 1)?),
        Arc::new(LabelSet::numbered(num_labels)?),
        n,
        flat,
    )
}

/// Triangular row of half-width `i`: weights `1, 2, ..., i+1, ..., 2, 1`,
/// normalized (sum `(i+1)^2`).
fn triangular(i: usize) -> impl Iterator<Item = f64> {
    let s = ((i + 1) * (i + 1)) as f64;
    (0..=2 * i).map(move |o| (i + 1 - o.abs_diff(i)) as f64 / s)
}

fn flat(i: usize) -> impl Iterator<Item = f64> {
    let w = 1.0 / (2 * i + 1) as f64;
    std::iter::repeat_n(w, 2 * i + 1)
}

/// Writes the two-label table for supports starting at `offset(i)`.
fn two_shape_model(alphabet: Alphabet, n: usize, offset: impl Fn(usize) -> usize) -> Result<SourceModel> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let ys = alphabet.len();
    let mut probs = vec![0.0; n * 2 * ys];
    for i in 1..=n {
        let start = offset(i);
        let base = (i - 1) * 2 * ys;
        for (k, p) in triangular(i).enumerate() {
            probs[base + start + k] = p;
        }
        for (k, p) in flat(i).enumerate() {
            probs[base + ys + start + k] = p;
        }
    }
    SourceModel::from_flat(Arc::new(alphabet), Arc::new(LabelSet::numbered(2)?), n, probs)
}

/// Overlapping family: symbol `y` in `{-n..n}` sits at index `y + n`;
/// position `i` covers `{-i..i}`.
pub fn gen_overlapping_model(n: usize) -> Result<SourceModel> {
    let m = n as i64;
    two_shape_model(Alphabet::range(-m, m)?, n, |i| n - i)
}

/// Non-overlapping family: symbol `y` in `{1..(n+1)^2-1}` sits at index
/// `y - 1`; position `i` covers `{i^2..(i+1)^2-1}`.
pub fn gen_nonoverlapping_model(n: usize) -> Result<SourceModel> {
    let top = ((n + 1) * (n + 1) - 1) as i64;
    two_shape_model(Alphabet::range(1, top)?, n, |i| i * i - 1)
}

/// Draws each element independently from its row by inverse CDF.
pub fn sample_vector<R: Rng + ?Sized>(model: &SourceModel, label: usize, rng: &mut R) -> Result<FeatureVector> {
    model.labels().check(label)?;
    let elements = (0..model.n())
        .map(|i| {
            let (cdf, last) = model.cdf_row(i, label);
            let u = rng.random::<f64>() * cdf[last];
            cdf.partition_point(|&c| c <= u).min(last) as u32
        })
        .collect();
    FeatureVector::new(elements)
}

/// `t` independent vectors per label. Each label draws from its own
/// substream, so its samples do not depend on how much randomness the
/// other labels consumed.
pub fn sample_training<R: Rng + ?Sized>(model: &SourceModel, t: usize, rng: &mut R) -> Result<TrainingSet> {
    if t == 0 {
        return Err(Error::InvalidConfig("t must be at least 1".into()));
    }
    let base: u64 = rng.random();
    let vectors = (0..model.num_labels())
        .map(|x| {
            let mut sub = ChaCha8Rng::seed_from_u64(base);
            sub.set_stream(x as u64);
            (0..t)
                .map(|_| sample_vector(model, x, &mut sub))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    TrainingSet::new(model.alphabet().clone(), model.labels().clone(), vectors)
}

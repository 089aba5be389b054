//! Empirical distributions, the Minkowski distance, and the
//! nearest-empirical-distribution (NED) decision rule.
//!
//! The classifier assigns the label whose concatenated training vector has
//! the empirical distribution closest, in Minkowski-`r` distance, to the
//! empirical distribution of the observed vector. Ties are resolved
//! uniformly at random.

use rand::Rng;

use crate::decision::{argmin_set, pick_uniform, uniform_over, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{Alphabet, FeatureVector, TrainingSet};

/// Euclidean distance, the default order.
pub const DEFAULT_ORDER: f64 = 2.0;

/// Number of elements of `v` equal to `symbol`.
pub fn count_symbol(alphabet: &Alphabet, v: &FeatureVector, symbol: i64) -> Result<usize> {
    let k = alphabet.index_of(symbol)? as u32;
    Ok(v.elements().iter().filter(|&&e| e == k).count())
}

/// Symbol frequencies of a sequence over a fixed alphabet. Stores the exact
/// counts and the normalizing length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    counts: Vec<u32>,
    denom: usize,
}

impl EmpiricalDistribution {
    pub fn from_vector(v: &FeatureVector, alphabet_size: usize) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyVector);
        }
        v.check_alphabet(alphabet_size)?;
        let mut counts = vec![0u32; alphabet_size];
        for &e in v.elements() {
            counts[e as usize] += 1;
        }
        Ok(Self { counts, denom: v.len() })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn denom(&self) -> usize {
        self.denom
    }

    pub fn freqs(&self) -> Vec<f64> {
        let d = self.denom as f64;
        self.counts.iter().map(|&c| c as f64 / d).collect()
    }

    /// Same distribution over the same alphabet (compares `c/denom` exactly).
    pub fn same_distribution(&self, other: &Self) -> bool {
        self.counts.len() == other.counts.len()
            && self
                .counts
                .iter()
                .zip(&other.counts)
                .all(|(&a, &b)| a as u64 * other.denom as u64 == b as u64 * self.denom as u64)
    }
}

/// Empirical distribution of `v` over `alphabet`.
pub fn empirical(alphabet: &Alphabet, v: &FeatureVector) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::from_vector(v, alphabet.len())
}

pub(crate) fn check_order(r: f64) -> Result<()> {
    if r.is_finite() && r >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(r))
    }
}

#[inline]
pub(crate) fn abs_pow(x: f64, r: f64) -> f64 {
    let a = x.abs();
    if r == 1.0 {
        a
    } else if r == 2.0 {
        a * a
    } else if r.fract() == 0.0 && r <= 64.0 {
        a.powi(r as i32)
    } else {
        a.powf(r)
    }
}

#[inline]
pub(crate) fn root(s: f64, r: f64) -> f64 {
    if r == 1.0 {
        s
    } else if r == 2.0 {
        s.sqrt()
    } else {
        s.powf(1.0 / r)
    }
}

/// `(sum_k |p_k - q_k|^r)^(1/r)`.
pub fn minkowski(p: &[f64], q: &[f64], r: f64) -> Result<f64> {
    check_order(r)?;
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    let s: f64 = p.iter().zip(q).map(|(a, b)| abs_pow(a - b, r)).sum();
    Ok(root(s, r))
}

/// NED classifier fitted to one training set.
///
/// Distances are evaluated on counts: with test counts `c` (length `n`) and
/// concatenated training counts `d` (length `nt`),
/// `|c/n - d/(nt)| = |c t - d| / (nt)`. Every term is an integer, so for
/// integer `r` the distances of tied labels are bit-identical. When all
/// partial sums stay below 2^53 only the symbols present in the test vector
/// are visited and the remaining mass is taken from the precomputed
/// `sum_k d_k^r`; otherwise (non-integer `r`, huge counts) the full sum is
/// taken to avoid cancellation.
#[derive(Debug, Clone)]
pub struct NedClassifier {
    r: f64,
    n: usize,
    t: usize,
    alphabet_size: usize,
    counts: Vec<Vec<u32>>,
    pow_sums: Vec<f64>,
    sparse: bool,
}

impl NedClassifier {
    pub fn fit(ts: &TrainingSet, r: f64) -> Result<Self> {
        check_order(r)?;
        let ys = ts.alphabet().len();
        let mut counts = Vec::with_capacity(ts.num_labels());
        let mut pow_sums = Vec::with_capacity(ts.num_labels());
        for x in 0..ts.num_labels() {
            let mut c = vec![0u32; ys];
            for v in ts.vectors(x) {
                for &e in v.elements() {
                    c[e as usize] += 1;
                }
            }
            pow_sums.push(c.iter().filter(|&&d| d > 0).map(|&d| abs_pow(d as f64, r)).sum());
            counts.push(c);
        }
        Ok(Self {
            r,
            n: ts.n(),
            t: ts.t(),
            alphabet_size: ys,
            counts,
            pow_sums,
            sparse: r.fract() == 0.0 && 2.0 * ((ts.n() * ts.t()) as f64).powf(r) < 2f64.powi(53),
        })
    }

    pub fn order(&self) -> f64 {
        self.r
    }

    pub fn num_labels(&self) -> usize {
        self.counts.len()
    }

    /// Empirical distribution of the concatenated training vector of `label`.
    pub fn training_distribution(&self, label: usize) -> Vec<f64> {
        let d = (self.n * self.t) as f64;
        self.counts[label].iter().map(|&c| c as f64 / d).collect()
    }

    fn check(&self, v: &FeatureVector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        v.check_alphabet(self.alphabet_size)
    }

    /// `||P_v - P_x||_r` for every label `x`.
    pub fn distances(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        self.check(v)?;
        let t = self.t as f64;
        let scale = (self.n * self.t) as f64;
        if !self.sparse {
            let mut test_counts = vec![0u32; self.alphabet_size];
            for &e in v.elements() {
                test_counts[e as usize] += 1;
            }
            return Ok(self
                .counts
                .iter()
                .map(|counts| {
                    let s: f64 = test_counts
                        .iter()
                        .zip(counts)
                        .map(|(&c, &d)| abs_pow(c as f64 * t - d as f64, self.r))
                        .sum();
                    root(s, self.r) / scale
                })
                .collect());
        }
        let mut sorted = v.elements().to_vec();
        sorted.sort_unstable();
        let runs = run_lengths(&sorted);
        Ok(self
            .counts
            .iter()
            .zip(&self.pow_sums)
            .map(|(counts, &base)| {
                let mut acc = base;
                for &(k, c) in &runs {
                    let d = counts[k as usize] as f64;
                    acc += abs_pow(c as f64 * t - d, self.r) - abs_pow(d, self.r);
                }
                root(acc, self.r) / scale
            })
            .collect())
    }

    /// Labels attaining the minimum distance (within [`TIE_TOLERANCE`]).
    pub fn candidates(&self, v: &FeatureVector) -> Result<Vec<usize>> {
        Ok(argmin_set(&self.distances(v)?, TIE_TOLERANCE))
    }

    pub fn classify<R: Rng + ?Sized>(&self, v: &FeatureVector, rng: &mut R) -> Result<usize> {
        Ok(pick_uniform(&self.candidates(v)?, rng))
    }

    /// Probability of outputting each label, tie-break included.
    pub fn decision_probabilities(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        Ok(uniform_over(&self.candidates(v)?, self.num_labels()))
    }
}

fn run_lengths(sorted: &[u32]) -> Vec<(u32, u32)> {
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for &s in sorted {
        match runs.last_mut() {
            Some((k, c)) if *k == s => *c += 1,
            _ => runs.push((s, 1)),
        }
    }
    runs
}

/// One-shot NED decision for `v` against `ts`.
pub fn classify<R: Rng + ?Sized>(ts: &TrainingSet, v: &FeatureVector, r: f64, rng: &mut R) -> Result<usize> {
    ts.check_compatible(v)?;
    NedClassifier::fit(ts, r)?.classify(v, rng)
}

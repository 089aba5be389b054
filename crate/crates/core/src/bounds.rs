//! Upper bounds on the error probability of the NED classifier.
//!
//! All bounds have the Hoeffding shape `2|Y| exp(-2 n eps^2) + ...` and
//! differ in how the margin `eps` is obtained:
//!
//! * [`epsilon_theorem1`]: from the realized training distributions and the
//!   true mean distributions, margin denominator `(2 + t^(-1/3)) |Y|^(1/r)`;
//! * [`bound_corollary1`]: the `t -> infinity` limit, using only the mean
//!   distributions;
//! * [`bound_appendix`]: a training-independent (looser) form with
//!   denominator `2 (1 + t^(-1/3)) |Y|^(1/r)` and an extra `|X|` factor.
//!
//! Bounds are returned unclamped and can exceed one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SourceModel, TrainingSet};
use crate::ned::{check_order, minkowski, NedClassifier};

/// Positionwise average of the true conditional distributions of a label.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDistribution {
    pub label: usize,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Theorem1,
    Corollary1,
    Appendix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub epsilon: f64,
    pub bound: f64,
    pub n: usize,
    /// `None` for the infinite-training limit.
    pub t: Option<usize>,
    pub r: f64,
}

impl BoundReport {
    pub fn clamped(&self) -> f64 {
        self.bound.min(1.0)
    }
}

pub fn mean_distribution(model: &SourceModel, label: usize) -> Result<MeanDistribution> {
    model.labels().check(label)?;
    let mut probs = vec![0.0; model.alphabet_size()];
    for i in 0..model.n() {
        for (acc, &p) in probs.iter_mut().zip(model.row(i, label)) {
            *acc += p;
        }
    }
    let n = model.n() as f64;
    for p in &mut probs {
        *p /= n;
    }
    Ok(MeanDistribution { label, probs })
}

pub fn mean_distributions(model: &SourceModel) -> Vec<Vec<f64>> {
    (0..model.num_labels())
        .map(|x| mean_distribution(model, x).expect("label in range").probs)
        .collect()
}

fn inv_cbrt(t: usize) -> f64 {
    (t as f64).cbrt().recip()
}

/// `min_{i != j} ||a_i - b_j||_r`.
fn min_cross_distance(a: &[Vec<f64>], b: &[Vec<f64>], r: f64) -> Result<f64> {
    if a.len() < 2 || a.len() != b.len() {
        return Err(Error::TooFewLabels(a.len().min(b.len())));
    }
    let mut best = f64::INFINITY;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if i != j {
                best = best.min(minkowski(ai, bj, r)?);
            }
        }
    }
    Ok(best)
}

/// Margin from given training distributions `P_i` and mean distributions
/// `Pbar_j`: `min_{i != j} ||P_i - Pbar_j||_r / ((2 + t^(-1/3)) |Y|^(1/r))`.
pub fn epsilon_from_distributions(training: &[Vec<f64>], means: &[Vec<f64>], t: usize, r: f64) -> Result<f64> {
    check_order(r)?;
    let ys = means.first().map_or(0, Vec::len) as f64;
    let num = min_cross_distance(training, means, r)?;
    Ok(num / ((2.0 + inv_cbrt(t)) * ys.powf(1.0 / r)))
}

pub fn epsilon_theorem1(model: &SourceModel, ts: &TrainingSet, r: f64) -> Result<f64> {
    if model.num_labels() < 2 {
        return Err(Error::TooFewLabels(model.num_labels()));
    }
    if ts.num_labels() != model.num_labels() || ts.alphabet().len() != model.alphabet_size() {
        return Err(Error::InvalidTrainingSet(
            "training set does not match the model".into(),
        ));
    }
    let ned = NedClassifier::fit(ts, r)?;
    let training: Vec<Vec<f64>> = (0..ts.num_labels()).map(|x| ned.training_distribution(x)).collect();
    epsilon_from_distributions(&training, &mean_distributions(model), ts.t(), r)
}

/// `2|Y| e^(-2 n eps^2) + 2|Y| e^(-2 n t^(1/3) eps^2)`.
pub fn bound_theorem1(epsilon: f64, n: usize, t: usize, alphabet_size: usize) -> f64 {
    let (n, ys) = (n as f64, alphabet_size as f64);
    let e2 = epsilon * epsilon;
    2.0 * ys * (-2.0 * n * e2).exp() + 2.0 * ys * (-2.0 * n * (t as f64).cbrt() * e2).exp()
}

/// Data-dependent bound report for a realized training set.
pub fn report_theorem1(model: &SourceModel, ts: &TrainingSet, r: f64, n: usize) -> Result<BoundReport> {
    let epsilon = epsilon_theorem1(model, ts, r)?;
    Ok(BoundReport {
        kind: BoundKind::Theorem1,
        epsilon,
        bound: bound_theorem1(epsilon, n, ts.t(), model.alphabet_size()),
        n,
        t: Some(ts.t()),
        r,
    })
}

pub fn bound_corollary1(model: &SourceModel, r: f64, n: usize) -> Result<BoundReport> {
    check_order(r)?;
    let means = mean_distributions(model);
    let ys = model.alphabet_size() as f64;
    let epsilon = min_cross_distance(&means, &means, r)? / (2.0 * ys.powf(1.0 / r));
    let bound = 2.0 * ys * (-2.0 * n as f64 * epsilon * epsilon).exp();
    Ok(BoundReport {
        kind: BoundKind::Corollary1,
        epsilon,
        bound,
        n,
        t: None,
        r,
    })
}

pub fn bound_appendix(model: &SourceModel, r: f64, n: usize, t: usize) -> Result<BoundReport> {
    check_order(r)?;
    let means = mean_distributions(model);
    let ys = model.alphabet_size() as f64;
    let xs = model.num_labels() as f64;
    let epsilon = min_cross_distance(&means, &means, r)? / (2.0 * (1.0 + inv_cbrt(t)) * ys.powf(1.0 / r));
    let (nf, e2) = (n as f64, epsilon * epsilon);
    let bound = 2.0 * ys * (-2.0 * nf * e2).exp() + 2.0 * xs * ys * (-2.0 * nf * (t as f64).cbrt() * e2).exp();
    Ok(BoundReport {
        kind: BoundKind::Appendix,
        epsilon,
        bound,
        n,
        t: Some(t),
        r,
    })
}

/// Decay envelope `n^m exp(-n^(1 - 2m/r))` of the training-independent bound
/// when `|Y| = O(n^m)`. It vanishes as `n -> infinity` only for `r > 2m`.
pub fn asymptotic_rate(n: usize, m: u32, r: f64) -> f64 {
    let n = n as f64;
    n.powi(m as i32) * (-n.powf(1.0 - 2.0 * m as f64 / r)).exp()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::model::{Alphabet, FeatureVector, LabelSet};

    fn model(alphabet: usize, cond: Vec<Vec<Vec<f64>>>) -> SourceModel {
        let a = Arc::new(Alphabet::range(0, alphabet as i64 - 1).unwrap());
        let l = Arc::new(LabelSet::numbered(cond[0].len()).unwrap());
        SourceModel::from_nested(a, l, &cond).unwrap()
    }

    fn point_mass() -> SourceModel {
        model(2, vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]])
    }

    #[test]
    fn mean_distribution_examples() {
        let m = model(
            2,
            vec![
                vec![vec![1.0, 0.0], vec![0.5, 0.5]],
                vec![vec![0.0, 1.0], vec![0.5, 0.5]],
            ],
        );
        assert_eq!(mean_distribution(&m, 0).unwrap().probs, vec![0.5, 0.5]);
        let third = vec![1.0 / 3.0, 2.0 / 3.0];
        let m = model(2, vec![vec![third.clone(), third.clone()]; 3]);
        let p = mean_distribution(&m, 1).unwrap().probs;
        assert!(p.iter().zip(&third).all(|(a, b)| (a - b).abs() < 1e-15));
        assert!(mean_distribution(&m, 2).is_err());
    }

    #[test]
    fn epsilon_point_mass_instance() {
        let m = point_mass();
        let a = m.alphabet().clone();
        let ts = TrainingSet::new(
            a,
            m.labels().clone(),
            vec![
                vec![FeatureVector::new(vec![0]).unwrap()],
                vec![FeatureVector::new(vec![1]).unwrap()],
            ],
        )
        .unwrap();
        let eps = epsilon_theorem1(&m, &ts, 1.0).unwrap();
        assert!((eps - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn epsilon_zero_when_training_matches_other_mean() {
        let means = vec![vec![0.3, 0.7], vec![0.6, 0.4]];
        let training = vec![vec![0.6, 0.4], vec![0.1, 0.9]];
        assert_eq!(epsilon_from_distributions(&training, &means, 4, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn epsilon_needs_two_labels() {
        let means = vec![vec![0.3, 0.7]];
        assert!(matches!(
            epsilon_from_distributions(&means, &means, 1, 2.0),
            Err(Error::TooFewLabels(1))
        ));
    }

    #[test]
    fn epsilon_limit_in_t() {
        let means = vec![vec![0.2, 0.3, 0.5], vec![0.5, 0.4, 0.1]];
        let eps = epsilon_from_distributions(&means, &means, 1_000_000_000, 2.0).unwrap();
        let limit = minkowski(&means[0], &means[1], 2.0).unwrap() / (2.0 * 3f64.sqrt());
        assert!((eps - limit).abs() / limit < 1e-3);
    }

    #[test]
    fn bound_theorem1_examples() {
        assert_eq!(bound_theorem1(0.0, 17, 3, 5), 20.0);
        let b = bound_theorem1(1.0 / 3.0, 9, 1, 2);
        assert!((b - 8.0 * (-2f64).exp()).abs() < 1e-12);
        assert!(bound_theorem1(0.1, 200, 1, 6) < bound_theorem1(0.1, 100, 1, 6));
    }

    #[test]
    fn corollary1_examples() {
        let m = model(3, vec![vec![vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]]]);
        let rep = bound_corollary1(&m, 2.0, 10).unwrap();
        assert_eq!(rep.epsilon, 0.0);
        assert_eq!(rep.bound, 6.0);

        let rep = bound_corollary1(&point_mass(), 1.0, 8).unwrap();
        assert!((rep.epsilon - 0.5).abs() < 1e-15);
        assert!((rep.bound - 4.0 * (-4f64).exp()).abs() < 1e-12);
        assert!((rep.bound - 0.0733).abs() < 1e-4);
    }

    #[test]
    fn corollary1_is_limit_of_theorem1() {
        let m = point_mass();
        let means = mean_distributions(&m);
        let cor = bound_corollary1(&m, 1.0, 8).unwrap();
        let gap = |t: usize| {
            let eps = epsilon_from_distributions(&means, &means, t, 1.0).unwrap();
            (bound_theorem1(eps, 8, t, 2) - cor.bound).abs() / cor.bound
        };
        // s = 2 n eps_cor^2, c = 2 / (2 + t^(-1/3))
        let s = 2.0 * 8.0 * cor.epsilon.powi(2);
        let c = 2.0 / (2.0 + 1e-2);
        let closed = (s * (1.0 - c * c)).exp() + (-s * (100.0 * c * c - 1.0)).exp() - 1.0;
        assert!((gap(1_000_000) - closed).abs() < 1e-12);
        assert!(gap(1_000_000_000) < gap(1_000_000));
        assert!(gap(1_000_000_000_000) < 1e-3);
    }

    #[test]
    fn appendix_examples() {
        let rep = bound_appendix(&point_mass(), 1.0, 5, 1).unwrap();
        assert!((rep.epsilon - 0.25).abs() < 1e-15);
        let m = model(3, vec![vec![vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]]]);
        let rep = bound_appendix(&m, 2.0, 7, 4).unwrap();
        assert_eq!(rep.bound, 2.0 * 3.0 + 2.0 * 2.0 * 3.0);
    }

    #[test]
    fn appendix_is_looser_than_theorem1_at_the_means() {
        for (n, t, r) in [(5, 1, 1.0), (20, 3, 2.0), (50, 10, 3.0), (1, 100, 1.5)] {
            let m = model(3, vec![vec![vec![0.6, 0.3, 0.1], vec![0.1, 0.2, 0.7]]]);
            let means = mean_distributions(&m);
            let eps = epsilon_from_distributions(&means, &means, t, r).unwrap();
            let thm = bound_theorem1(eps, n, t, 3);
            assert!(bound_appendix(&m, r, n, t).unwrap().bound >= thm);
        }
    }

    #[test]
    fn asymptotic_rate_examples() {
        assert!((asymptotic_rate(16, 1, 4.0) - 16.0 * (-4f64).exp()).abs() < 1e-12);
        assert!((asymptotic_rate(16, 1, 4.0) - 0.293).abs() < 1e-3);
        assert!((asymptotic_rate(50, 1, 2.0) - 50.0 * (-1f64).exp()).abs() < 1e-12);
        assert!(asymptotic_rate(10_000, 1, 6.0) < asymptotic_rate(100, 1, 6.0));
    }

    proptest! {
        #[test]
        fn theorem1_monotone(eps in 0.001f64..1.0, n in 1usize..500, t in 1usize..1000, ys in 1usize..50) {
            let (now, next) = (bound_theorem1(eps, n, t, ys), bound_theorem1(eps, n + 1, t, ys));
            prop_assert!(next < now || (next == 0.0 && now < 1e-300));
            prop_assert!(bound_theorem1(eps, n, t + 1, ys) <= bound_theorem1(eps, n, t, ys));
            prop_assert!(bound_theorem1(eps, n, t, ys) >= 0.0);
        }

        #[test]
        fn epsilon_relabeling_invariant(
            a in prop::collection::vec(0.0f64..1.0, 4),
            b in prop::collection::vec(0.0f64..1.0, 4),
            c in prop::collection::vec(0.0f64..1.0, 4),
            d in prop::collection::vec(0.0f64..1.0, 4),
        ) {
            let training = vec![a.clone(), b.clone()];
            let means = vec![c.clone(), d.clone()];
            let e = epsilon_from_distributions(&training, &means, 2, 2.0).unwrap();
            let swapped = epsilon_from_distributions(&[b, a], &[d, c], 2, 2.0).unwrap();
            prop_assert_eq!(e, swapped);
        }
    }
}

//! Benchmark classifiers: naive Bayes with plug-in frequency estimates, and
//! k-nearest neighbours over the raw (un-concatenated) training vectors.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{argmax_set, pick_uniform, uniform_over, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{FeatureVector, TrainingSet};

/// Per-label symbol frequencies of the concatenated training vector,
/// `count / (n t)`.
pub fn nb_estimate(ts: &TrainingSet, label: usize) -> Result<Vec<f64>> {
    let nt = (ts.n() * ts.t()) as f64;
    Ok(label_counts(ts, label)?.into_iter().map(|c| c as f64 / nt).collect())
}

fn label_counts(ts: &TrainingSet, label: usize) -> Result<Vec<u64>> {
    ts.labels().check(label)?;
    let mut counts = vec![0u64; ts.alphabet().len()];
    for v in ts.vectors(label) {
        for &e in v.elements() {
            counts[e as usize] += 1;
        }
    }
    Ok(counts)
}

/// Naive Bayes with one shared symbol table per label (the same estimate is
/// used at every position). Scores are log-likelihoods; an unseen symbol
/// drives the score to `-inf`.
#[derive(Debug, Clone)]
pub struct NaiveBayes {
    log_probs: Vec<Vec<f64>>,
}

impl NaiveBayes {
    pub fn fit(ts: &TrainingSet) -> Result<Self> {
        Self::fit_with(ts, false)
    }

    /// `smoothing` enables add-one (Laplace) estimates `(c + 1) / (nt + |Y|)`.
    pub fn fit_with(ts: &TrainingSet, smoothing: bool) -> Result<Self> {
        let (extra, pseudo) = if smoothing {
            (ts.alphabet().len(), 1.0)
        } else {
            (0, 0.0)
        };
        let log_denom = ((ts.n() * ts.t() + extra) as f64).ln();
        let log_probs = (0..ts.num_labels())
            .map(|x| {
                let counts = label_counts(ts, x)?;
                Ok(counts
                    .into_iter()
                    .map(|c| (c as f64 + pseudo).ln() - log_denom)
                    .collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(Self { log_probs })
    }

    pub fn num_labels(&self) -> usize {
        self.log_probs.len()
    }

    /// `sum_k log p(v_k | x)` for every label.
    pub fn log_likelihoods(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        let ys = self.log_probs[0].len();
        v.check_alphabet(ys)?;
        Ok(self
            .log_probs
            .iter()
            .map(|lp| v.elements().iter().map(|&e| lp[e as usize]).sum())
            .collect())
    }

    pub fn candidates(&self, v: &FeatureVector) -> Result<Vec<usize>> {
        Ok(argmax_set(&self.log_likelihoods(v)?, TIE_TOLERANCE))
    }

    pub fn classify<R: Rng + ?Sized>(&self, v: &FeatureVector, rng: &mut R) -> Result<usize> {
        Ok(pick_uniform(&self.candidates(v)?, rng))
    }

    pub fn decision_probabilities(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        Ok(uniform_over(&self.candidates(v)?, self.num_labels()))
    }
}

pub fn nb_classify<R: Rng + ?Sized>(ts: &TrainingSet, v: &FeatureVector, rng: &mut R) -> Result<usize> {
    ts.check_compatible(v)?;
    NaiveBayes::fit(ts)?.classify(v, rng)
}

/// Distance between two feature vectors used by k-NN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnnMetric {
    /// Euclidean distance on the integer symbol codes.
    #[default]
    Euclidean,
    /// Number of positions that differ.
    Hamming,
}

impl std::str::FromStr for KnnMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "hamming" => Ok(Self::Hamming),
            other => Err(Error::InvalidConfig(format!("unknown k-NN metric {other:?}"))),
        }
    }
}

// Above this many boundary subsets the exact decision distribution is refused.
const MAX_BOUNDARY_SUBSETS: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct Knn {
    k: usize,
    metric: KnnMetric,
    num_labels: usize,
    // (label, symbol codes)
    train: Vec<(usize, Vec<i64>)>,
    symbols: Vec<i64>,
}

/// Neighbourhood of a query: the labels of the training vectors strictly
/// inside the k-th distance, and the labels on that boundary of which
/// `need` more must be drawn.
struct Neighbourhood {
    inside: Vec<usize>,
    boundary: Vec<usize>,
    need: usize,
}

impl Knn {
    pub fn fit(ts: &TrainingSet, k: usize, metric: KnnMetric) -> Result<Self> {
        let max = ts.num_labels() * ts.t();
        if k == 0 || k > max {
            return Err(Error::KOutOfRange { k, max });
        }
        let alphabet = ts.alphabet();
        let train = (0..ts.num_labels())
            .flat_map(|x| ts.vectors(x).iter().map(move |v| (x, alphabet.decode(v))))
            .collect();
        Ok(Self {
            k,
            metric,
            num_labels: ts.num_labels(),
            train,
            symbols: alphabet.symbols().to_vec(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn distance(&self, a: &[i64], b: &[i64]) -> u128 {
        match self.metric {
            KnnMetric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(&p, &q)| {
                    let d = (p as i128 - q as i128).unsigned_abs();
                    d * d
                })
                .sum(),
            KnnMetric::Hamming => a.iter().zip(b).filter(|(p, q)| p != q).count() as u128,
        }
    }

    fn neighbourhood(&self, v: &FeatureVector) -> Result<Neighbourhood> {
        v.check_alphabet(self.symbols.len())?;
        let n = self.train[0].1.len();
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let codes: Vec<i64> = v.elements().iter().map(|&e| self.symbols[e as usize]).collect();
        let mut dists: Vec<(u128, usize)> = self.train.iter().map(|(x, c)| (self.distance(&codes, c), *x)).collect();
        dists.sort_by_key(|&(d, _)| d);
        // squared Euclidean distances are exact integers, so ties are exact
        let threshold = dists[self.k - 1].0;
        let inside: Vec<usize> = dists.iter().filter(|(d, _)| *d < threshold).map(|&(_, x)| x).collect();
        let boundary: Vec<usize> = dists.iter().filter(|(d, _)| *d == threshold).map(|&(_, x)| x).collect();
        let need = self.k - inside.len();
        Ok(Neighbourhood { inside, boundary, need })
    }

    fn vote_winners(&self, labels: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut votes = vec![0usize; self.num_labels];
        for x in labels {
            votes[x] += 1;
        }
        let best = *votes.iter().max().expect("at least two labels");
        (0..self.num_labels).filter(|&x| votes[x] == best).collect()
    }

    pub fn classify<R: Rng + ?Sized>(&self, v: &FeatureVector, rng: &mut R) -> Result<usize> {
        let nb = self.neighbourhood(v)?;
        let winners = if nb.need == nb.boundary.len() {
            self.vote_winners(nb.inside.iter().chain(&nb.boundary).copied())
        } else {
            let chosen = index::sample(rng, nb.boundary.len(), nb.need);
            self.vote_winners(nb.inside.iter().copied().chain(chosen.iter().map(|i| nb.boundary[i])))
        };
        Ok(pick_uniform(&winners, rng))
    }

    /// Exact output distribution: averages the vote outcome over every
    /// equally likely choice of boundary neighbours.
    pub fn decision_probabilities(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        let nb = self.neighbourhood(v)?;
        let subsets = binomial(nb.boundary.len(), nb.need);
        if subsets > MAX_BOUNDARY_SUBSETS {
            return Err(Error::InstanceTooLarge {
                terms: subsets,
                limit: MAX_BOUNDARY_SUBSETS,
            });
        }
        let mut probs = vec![0.0; self.num_labels];
        let mut total = 0usize;
        for_each_subset(nb.boundary.len(), nb.need, &mut |chosen| {
            let winners = self.vote_winners(nb.inside.iter().copied().chain(chosen.iter().map(|&i| nb.boundary[i])));
            let w = 1.0 / winners.len() as f64;
            for x in winners {
                probs[x] += w;
            }
            total += 1;
        });
        for p in &mut probs {
            *p /= total as f64;
        }
        Ok(probs)
    }
}

fn binomial(m: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

fn for_each_subset(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=m - (k - cur.len()) {
            cur.push(i);
            go(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    go(0, m, k, &mut Vec::with_capacity(k), f);
}

pub fn knn_classify<R: Rng + ?Sized>(ts: &TrainingSet, v: &FeatureVector, k: usize, rng: &mut R) -> Result<usize> {
    ts.check_compatible(v)?;
    Knn::fit(ts, k, KnnMetric::Euclidean)?.classify(v, rng)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::{concat_training, Alphabet, LabelSet};
    use crate::ned::empirical;

    fn training(alphabet: &Arc<Alphabet>, groups: Vec<Vec<Vec<i64>>>) -> TrainingSet {
        let labels = Arc::new(LabelSet::numbered(groups.len()).unwrap());
        let vectors = groups
            .into_iter()
            .map(|g| g.into_iter().map(|c| alphabet.encode(&c).unwrap()).collect())
            .collect();
        TrainingSet::new(alphabet.clone(), labels, vectors).unwrap()
    }

    fn abc() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(vec![0, 1, 2]).unwrap())
    }

    #[test]
    fn nb_estimate_examples() {
        let a = abc();
        let ts = training(&a, vec![vec![vec![0, 0, 1]], vec![vec![2, 2, 2]]]);
        assert_eq!(nb_estimate(&ts, 0).unwrap(), vec![2.0 / 3.0, 1.0 / 3.0, 0.0]);
        assert_eq!(nb_estimate(&ts, 1).unwrap(), vec![0.0, 0.0, 1.0]);
        let ts = training(&a, vec![vec![vec![0], vec![1]], vec![vec![0], vec![0]]]);
        assert_eq!(nb_estimate(&ts, 0).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(nb_estimate(&ts, 1).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(matches!(nb_estimate(&ts, 5), Err(Error::InvalidLabel { .. })));
    }

    #[test]
    fn nb_estimate_equals_empirical_of_concatenation() {
        let a = abc();
        let ts = training(
            &a,
            vec![vec![vec![0, 2, 1], vec![1, 1, 2]], vec![vec![2, 0, 0], vec![2, 2, 2]]],
        );
        for x in 0..2 {
            assert_eq!(
                nb_estimate(&ts, x).unwrap(),
                empirical(&a, &concat_training(&ts, x).unwrap()).unwrap().freqs()
            );
        }
    }

    #[test]
    fn nb_likelihood_one_vs_zero() {
        let a = abc();
        let ts = training(&a, vec![vec![vec![0, 0]], vec![vec![1, 1]]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(nb_classify(&ts, &a.encode(&[0, 0]).unwrap(), &mut rng).unwrap(), 0);
    }

    #[test]
    fn nb_unseen_symbol_is_a_coin_flip() {
        let a = abc();
        let ts = training(&a, vec![vec![vec![0, 0]], vec![vec![1, 1]]]);
        let nb = NaiveBayes::fit(&ts).unwrap();
        let v = a.encode(&[2, 2]).unwrap();
        assert_eq!(nb.decision_probabilities(&v).unwrap(), vec![0.5, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..10_000).filter(|_| nb.classify(&v, &mut rng).unwrap() == 0).count();
        assert!((hits as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn nb_hand_product() {
        let a = abc();
        let ts = training(&a, vec![vec![vec![0, 1, 1]], vec![vec![0, 0, 1]]]);
        let v = a.encode(&[0, 1, 0]).unwrap();
        // direct products: 1/3 * 2/3 * 1/3 and 2/3 * 1/3 * 2/3
        let direct: Vec<f64> = (0..2)
            .map(|x| {
                let p = nb_estimate(&ts, x).unwrap();
                v.elements().iter().map(|&e| p[e as usize]).product()
            })
            .collect();
        assert!((direct[0] - 2.0 / 27.0).abs() < 1e-15);
        assert!((direct[1] - 4.0 / 27.0).abs() < 1e-15);
        let nb = NaiveBayes::fit(&ts).unwrap();
        let ll = nb.log_likelihoods(&v).unwrap();
        assert!((ll[1] - direct[1].ln()).abs() < 1e-12);
        assert_eq!(nb.candidates(&v).unwrap(), vec![1]);
    }

    #[test]
    fn smoothing_removes_zero_likelihoods() {
        let a = abc();
        let ts = training(&a, vec![vec![vec![0, 0]], vec![vec![1, 1]]]);
        let nb = NaiveBayes::fit_with(&ts, true).unwrap();
        let ll = nb.log_likelihoods(&a.encode(&[2, 0]).unwrap()).unwrap();
        assert!(ll.iter().all(|l| l.is_finite()));
        // (0+1)/5 * (2+1)/5 vs (0+1)/5 * (0+1)/5
        assert!((ll[0] - (3.0f64 / 25.0).ln()).abs() < 1e-12);
        assert_eq!(nb.candidates(&a.encode(&[2, 0]).unwrap()).unwrap(), vec![0]);
    }

    #[test]
    fn knn_strictly_nearer() {
        let a = Arc::new(Alphabet::range(0, 9).unwrap());
        let ts = training(&a, vec![vec![vec![1, 1]], vec![vec![5, 5]]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(knn_classify(&ts, &a.encode(&[1, 2]).unwrap(), 1, &mut rng).unwrap(), 0);
        assert_eq!(knn_classify(&ts, &a.encode(&[5, 5]).unwrap(), 1, &mut rng).unwrap(), 1);
    }

    #[test]
    fn knn_three_votes() {
        let a = Arc::new(Alphabet::range(0, 9).unwrap());
        let ts = training(&a, vec![vec![vec![0, 0], vec![0, 1]], vec![vec![4, 4], vec![9, 9]]]);
        let v = a.encode(&[1, 1]).unwrap();
        // brute force: sort all training vectors by squared distance
        let a2 = &a;
        let mut table: Vec<(i64, usize)> = (0..2)
            .flat_map(|x| {
                ts.vectors(x).iter().map(move |w| {
                    let c = a2.decode(w);
                    ((c[0] - 1).pow(2) + (c[1] - 1).pow(2), x)
                })
            })
            .collect();
        table.sort();
        assert_eq!(table.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 2, 18, 128]);
        let knn = Knn::fit(&ts, 3, KnnMetric::Euclidean).unwrap();
        assert_eq!(knn.decision_probabilities(&v).unwrap(), vec![1.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(knn.classify(&v, &mut rng).unwrap(), 0);
    }

    #[test]
    fn knn_k_range() {
        let a = abc();
        let ts = training(&a, vec![vec![vec![0]], vec![vec![1]]]);
        assert!(matches!(
            Knn::fit(&ts, 0, KnnMetric::Euclidean),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(matches!(
            Knn::fit(&ts, 3, KnnMetric::Euclidean),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn knn_boundary_ties_are_enumerated() {
        let a = Arc::new(Alphabet::range(0, 9).unwrap());
        // three training vectors at the same distance from v; k = 2
        let ts = training(&a, vec![vec![vec![2], vec![0]], vec![vec![4], vec![9]]]);
        let v = a.encode(&[2]).unwrap();
        let knn = Knn::fit(&ts, 2, KnnMetric::Euclidean).unwrap();
        // inside: label 0 (dist 0); boundary: {0 (dist 4), 1 (dist 4)}, pick 1
        // -> half the time 2:0 for label 0, half the time 1:1 tie
        let p = knn.decision_probabilities(&v).unwrap();
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 40_000;
        let zeros = (0..draws).filter(|_| knn.classify(&v, &mut rng).unwrap() == 0).count();
        let sigma = (0.75 * 0.25 / draws as f64).sqrt();
        assert!((zeros as f64 / draws as f64 - 0.75).abs() < 4.0 * sigma);
    }

    #[test]
    fn knn_hamming_metric() {
        let a = Arc::new(Alphabet::range(0, 9).unwrap());
        let ts = training(&a, vec![vec![vec![1, 1, 9]], vec![vec![2, 2, 2]]]);
        let v = a.encode(&[1, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // Euclidean prefers label 1 (2 vs 49), Hamming prefers label 0 (1 vs 2)
        assert_eq!(
            Knn::fit(&ts, 1, KnnMetric::Euclidean)
                .unwrap()
                .classify(&v, &mut rng)
                .unwrap(),
            1
        );
        assert_eq!(
            Knn::fit(&ts, 1, KnnMetric::Hamming)
                .unwrap()
                .classify(&v, &mut rng)
                .unwrap(),
            0
        );
    }

    proptest! {
        #[test]
        fn nb_log_sum_matches_product_when_supported(
            seed in any::<u64>(), n in 1usize..8
        ) {
            use rand::Rng;
            let a = Arc::new(Alphabet::range(0, 2).unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // every symbol appears in every label's training data
            let mut group = || {
                let mut c: Vec<i64> = vec![0, 1, 2];
                c.extend((0..n).map(|_| rng.random_range(0..3)));
                vec![c]
            };
            let ts = training(&a, vec![group(), group()]);
            let v = a.encode(&(0..n + 3).map(|i| (i % 3) as i64).collect::<Vec<_>>()).unwrap();
            let nb = NaiveBayes::fit(&ts).unwrap();
            let products: Vec<f64> = (0..2).map(|x| {
                let p = nb_estimate(&ts, x).unwrap();
                v.elements().iter().map(|&e| p[e as usize]).product()
            }).collect();
            let by_product = if (products[0] - products[1]).abs() <= 1e-12 * products[0].max(products[1]) {
                vec![0, 1]
            } else if products[0] > products[1] { vec![0] } else { vec![1] };
            prop_assert_eq!(nb.candidates(&v).unwrap(), by_product);
        }

        #[test]
        fn knn_unique_exact_match(seed in any::<u64>()) {
            use rand::Rng;
            let a = Arc::new(Alphabet::range(0, 3).unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let groups: Vec<Vec<Vec<i64>>> = (0..2)
                .map(|_| (0..3).map(|_| (0..5).map(|_| rng.random_range(0..4)).collect()).collect())
                .collect();
            let target = groups[1][2].clone();
            let matches = groups.iter().flatten().filter(|g| **g == target).count();
            prop_assume!(matches == 1);
            let ts = training(&a, groups);
            let knn = Knn::fit(&ts, 1, KnnMetric::Euclidean).unwrap();
            prop_assert_eq!(knn.decision_probabilities(&a.encode(&target).unwrap()).unwrap(), vec![0.0, 1.0]);
        }
    }
}

//! Argmin/argmax sets and uniform tie-breaking shared by every classifier.

use rand::Rng;

/// Two distances (or scores) closer than this are treated as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Indices whose value lies within `tol` of the minimum, in index order.
pub fn argmin_set(values: &[f64], tol: f64) -> Vec<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v == min || v - min <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// Indices whose value ties with the maximum. The tolerance is relative to
/// the magnitude of the maximum (log-likelihoods can be large); all `-inf`
/// values tie with each other.
pub fn argmax_set(values: &[f64], rel_tol: f64) -> Vec<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return (0..values.len()).collect();
    }
    let tol = rel_tol * max.abs().max(1.0);
    values
        .iter()
        .enumerate()
        .filter(|&(_, &v)| max - v <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// Uniform choice among `candidates`. Consumes no randomness when there is
/// a single candidate.
pub fn pick_uniform<R: Rng + ?Sized>(candidates: &[usize], rng: &mut R) -> usize {
    debug_assert!(!candidates.is_empty());
    match candidates {
        [only] => *only,
        _ => candidates[rng.random_range(0..candidates.len())],
    }
}

/// Output distribution of a uniform tie-break over `candidates`.
pub fn uniform_over(candidates: &[usize], num_labels: usize) -> Vec<f64> {
    let mut probs = vec![0.0; num_labels];
    let w = 1.0 / candidates.len() as f64;
    for &c in candidates {
        probs[c] += w;
    }
    probs
}

//! Ranking metrics, generic over the float type.

use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("AUC needs at least one positive and one negative example")]
    SingleClass,
}

/// Rank-based ROC-AUC (Mann-Whitney U), with average ranks for ties.
/// `scores` pairs each score with whether the example is positive.
///
/// Equals the probability that a uniformly random positive example outranks a
/// uniformly random negative one, counting ties as half.
pub fn roc_auc<F: Float>(scores: &[(F, bool)]) -> Result<F, MetricsError> {
    let positives = scores.iter().filter(|(_, label)| *label).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .0
            .partial_cmp(&scores[b].0)
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // Average rank over each tied run, 1-based.
    let mut ranks = vec![F::zero(); scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]].0 == scores[order[i]].0 {
            j += 1;
        }
        let avg = F::from(i + 1 + j + 1).expect("rank fits in float")
            / F::from(2).expect("two fits in float");
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }

    let rank_sum = scores
        .iter()
        .zip(&ranks)
        .filter(|((_, label), _)| *label)
        .fold(F::zero(), |acc, (_, rank)| acc + *rank);
    let p = F::from(positives).expect("count fits in float");
    let n = F::from(negatives).expect("count fits in float");
    let two = F::from(2).expect("two fits in float");
    Ok((rank_sum - p * (p + F::one()) / two) / (p * n))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force pairwise oracle: concordant pairs count 1, ties 0.5.
    pub(crate) fn pairwise_auc(scores: &[(f64, bool)]) -> Option<f64> {
        let pos: Vec<f64> = scores.iter().filter(|(_, l)| *l).map(|(s, _)| *s).collect();
        let neg: Vec<f64> = scores.iter().filter(|(_, l)| !*l).map(|(s, _)| *s).collect();
        if pos.is_empty() || neg.is_empty() {
            return None;
        }
        let mut total = 0.0;
        for p in &pos {
            for n in &neg {
                if p > n {
                    total += 1.0;
                } else if p == n {
                    total += 0.5;
                }
            }
        }
        Some(total / (pos.len() * neg.len()) as f64)
    }

    #[test]
    fn perfect_separation() {
        let scores = [(0.9, true), (0.1, false)];
        assert_eq!(roc_auc(&scores).unwrap(), 1.0);
    }

    #[test]
    fn all_equal_scores_give_half() {
        let scores = [(0.5, true), (0.5, false), (0.5, true), (0.5, false)];
        assert_eq!(roc_auc(&scores).unwrap(), 0.5);
    }

    #[test]
    fn interleaved_example() {
        let scores = [(0.8, true), (0.6, false), (0.4, true), (0.2, false)];
        assert!((roc_auc(&scores).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(pairwise_auc(&scores), Some(0.75));
    }

    #[test]
    fn single_class_is_an_error() {
        assert_eq!(
            roc_auc(&[(0.4, true), (0.6, true)]).unwrap_err(),
            MetricsError::SingleClass
        );
    }

    #[test]
    fn matches_pairwise_oracle_on_random_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(2..=50);
            let scores: Vec<(f64, bool)> = (0..n)
                .map(|_| {
                    // Coarse grid so ties actually happen.
                    let s = (rng.gen_range(0..=10) as f64) / 10.0;
                    (s, rng.gen_bool(0.5))
                })
                .collect();
            match pairwise_auc(&scores) {
                Some(expected) => {
                    let got = roc_auc(&scores).unwrap();
                    assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
                }
                None => assert!(roc_auc(&scores).is_err()),
            }
        }
    }

    #[test]
    fn works_in_f32_too() {
        let scores = [(0.8f32, true), (0.6, false), (0.4, true), (0.2, false)];
        assert!((roc_auc(&scores).unwrap() - 0.75).abs() < 1e-6);
    }
}

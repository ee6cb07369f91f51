//! Subjectivity measures for one rating histogram.
//!
//! STD and MAD are spreads on the normalised score axis. MED and DUD are
//! order-1 EMDs to a reference histogram: the maximum-entropy histogram with
//! the same mean, and the uniform histogram. AesU is the uncertainty mass of
//! the fitted opinion.

use crate::beta_model::{FitResult, Opinion};
use crate::distributions::{emd, mad_median, mean_score, std_normalized, RatingDistribution, NUM_BINS};

/// Scores strictly above this count as aesthetically pleasing.
pub const BINARY_THRESHOLD: f64 = 5.0;

const LAMBDA_BOUND: f64 = 20.0;
const MEAN_TOLERANCE: f64 = 1e-12;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubjectivityReport {
    pub std: f64,
    pub mad: f64,
    pub med: f64,
    pub dud: f64,
    pub aesu: f64,
    pub mean: f64,
    pub binary_pleasing: bool,
}

/// AesU: the uncertainty mass of the opinion.
pub fn aesu(o: &Opinion) -> f64 {
    o.uncertainty()
}

fn gibbs(lambda: f64) -> [f64; NUM_BINS] {
    let mid = (NUM_BINS as f64 + 1.0) / 2.0;
    core::array::from_fn(|i| libm::exp(lambda * ((i + 1) as f64 - mid)))
}

/// Mean score of unnormalised weights. Normalisation is left to
/// `from_weights` so that λ = 0 reproduces the uniform histogram exactly.
fn gibbs_mean(w: &[f64; NUM_BINS]) -> f64 {
    let total: f64 = w.iter().sum();
    w.iter().enumerate().map(|(i, m)| m * (i + 1) as f64).sum::<f64>() / total
}

/// Maximum-entropy histogram over the ten scores with the same mean score
/// as `p`, i.e. `q_s ∝ exp(λ s)` with λ found by bisection on `[-20, 20]`.
pub fn max_entropy_same_mean(p: &RatingDistribution) -> RatingDistribution {
    let target = mean_score(p);
    if target <= 1.0 + MEAN_TOLERANCE {
        return RatingDistribution::delta(1).expect("score 1 is valid");
    }
    if target >= NUM_BINS as f64 - MEAN_TOLERANCE {
        return RatingDistribution::delta(NUM_BINS).expect("top score is valid");
    }
    let (mut lo, mut hi) = (-LAMBDA_BOUND, LAMBDA_BOUND);
    let mut q = gibbs(0.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        q = gibbs(mid);
        let m = gibbs_mean(&q);
        if (m - target).abs() < MEAN_TOLERANCE {
            break;
        }
        if m < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RatingDistribution::from_weights(q).expect("gibbs weights are positive")
}

/// Order-1 EMD to the same-mean maximum-entropy histogram.
pub fn med(p: &RatingDistribution) -> f64 {
    emd(p, &max_entropy_same_mean(p), 1.0).expect("order 1 is valid")
}

/// Order-1 EMD to the uniform histogram.
pub fn dud(p: &RatingDistribution) -> f64 {
    emd(p, &RatingDistribution::uniform(), 1.0).expect("order 1 is valid")
}

/// All measures for `p`; `fit` must come from fitting `p`.
pub fn full_report(p: &RatingDistribution, fit: &FitResult) -> SubjectivityReport {
    let mean = mean_score(p);
    SubjectivityReport {
        std: std_normalized(p),
        mad: mad_median(p),
        med: med(p),
        dud: dud(p),
        aesu: aesu(&fit.opinion()),
        mean,
        binary_pleasing: mean > BINARY_THRESHOLD,
    }
}

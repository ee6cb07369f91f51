//! Ten-bin rating histograms, distances between them and summary statistics.
//!
//! Score `s` in `1..=10` owns bin `s - 1`, which covers `[(s-1)/10, s/10)` on
//! the normalised `[0, 1]` axis with centre `(2s - 1)/20`. STD and MAD are
//! reported on that normalised axis; multiply by [`SCORE_SCALE`] to get
//! score units.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Number of score bins (the 1..=10 rating scale).
pub const NUM_BINS: usize = 10;

/// Width of the score axis in score units per normalised unit.
pub const SCORE_SCALE: f64 = NUM_BINS as f64;

const SUM_TOLERANCE: f64 = 1e-6;
const KLD_SMOOTHING: f64 = 1e-8;

/// Centre of the bin for `score` on the normalised axis.
#[inline]
pub fn bin_center(score: usize) -> f64 {
    (2 * score - 1) as f64 / (2 * NUM_BINS) as f64
}

#[inline]
fn centers() -> [f64; NUM_BINS] {
    core::array::from_fn(|i| bin_center(i + 1))
}

/// Normalised probability mass over the ten score bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingDistribution {
    probs: [f64; NUM_BINS],
    n_raters: Option<u64>,
}

impl RatingDistribution {
    /// Builds a distribution from bin masses.
    ///
    /// Masses must be finite and non-negative and sum to one within `1e-6`;
    /// they are renormalised so the stored masses sum to one to machine
    /// precision.
    pub fn from_probs(probs: [f64; NUM_BINS]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("masses must be finite and non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution("masses must sum to 1"));
        }
        Ok(Self::from_masses_unchecked(probs, total))
    }

    /// Builds a distribution from arbitrary non-negative masses by dividing by
    /// their total.
    pub fn from_weights(weights: [f64; NUM_BINS]) -> Result<Self> {
        if weights.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("masses must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero"));
        }
        Ok(Self::from_masses_unchecked(weights, total))
    }

    fn from_masses_unchecked(masses: [f64; NUM_BINS], total: f64) -> Self {
        let probs = if total == 1.0 { masses } else { masses.map(|p| p / total) };
        Self { probs, n_raters: None }
    }

    /// Equal mass on every bin.
    pub fn uniform() -> Self {
        Self { probs: [1.0 / NUM_BINS as f64; NUM_BINS], n_raters: None }
    }

    /// All mass on `score` (1-based).
    pub fn delta(score: usize) -> Result<Self> {
        if !(1..=NUM_BINS).contains(&score) {
            return Err(Error::DomainError("score outside 1..=10"));
        }
        let mut probs = [0.0; NUM_BINS];
        probs[score - 1] = 1.0;
        Ok(Self { probs, n_raters: None })
    }

    pub fn with_n_raters(mut self, n: u64) -> Self {
        self.n_raters = Some(n);
        self
    }

    pub fn probs(&self) -> &[f64; NUM_BINS] {
        &self.probs
    }

    pub fn n_raters(&self) -> Option<u64> {
        self.n_raters
    }

    /// Mirror image on the score axis (score `s` becomes `11 - s`).
    pub fn reversed(&self) -> Self {
        let mut probs = self.probs;
        probs.reverse();
        Self { probs, n_raters: self.n_raters }
    }

    pub fn cdf(&self) -> CdfVector {
        CdfVector::from_masses(&self.probs)
    }
}

/// Cumulative sums of a [`RatingDistribution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfVector {
    values: [f64; NUM_BINS],
}

impl CdfVector {
    fn from_masses(masses: &[f64; NUM_BINS]) -> Self {
        let mut acc = 0.0;
        let values = masses.map(|p| {
            acc += p;
            acc
        });
        Self { values }
    }

    pub fn values(&self) -> &[f64; NUM_BINS] {
        &self.values
    }
}

/// Converts raw vote counts (index 0 = score 1) into a distribution.
pub fn normalize_counts(counts: &[u64; NUM_BINS]) -> Result<RatingDistribution> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::AllZeroCounts);
    }
    let probs = counts.map(|c| c as f64 / total as f64);
    Ok(RatingDistribution { probs, n_raters: Some(total) })
}

/// Earth mover's distance of order `r` between two histograms:
/// `((1/10) * sum_k |CDF_p(k) - CDF_q(k)|^r)^(1/r)`.
pub fn emd(p: &RatingDistribution, q: &RatingDistribution, r: f64) -> Result<f64> {
    emd_masses(&p.probs, &q.probs, r)
}

/// [`emd`] on raw bin masses. The masses are not required to be normalised,
/// which makes this the entry point for finite-difference gradients.
pub fn emd_masses(p: &[f64; NUM_BINS], q: &[f64; NUM_BINS], r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidOrder(r));
    }
    let cp = CdfVector::from_masses(p);
    let cq = CdfVector::from_masses(q);
    let gaps = cp.values.iter().zip(&cq.values).map(|(a, b)| (a - b).abs());
    let n = NUM_BINS as f64;
    let dist = if r == 1.0 {
        gaps.sum::<f64>() / n
    } else if r == 2.0 {
        libm::sqrt(gaps.map(|g| g * g).sum::<f64>() / n)
    } else {
        libm::pow(gaps.map(|g| libm::pow(g, r)).sum::<f64>() / n, 1.0 / r)
    };
    Ok(dist)
}

/// `KL(p_true || p_pred)` with `1e-8` added to every predicted bin before
/// renormalising. Zero-mass ground-truth bins contribute nothing.
pub fn kld(p_true: &RatingDistribution, p_pred: &RatingDistribution) -> f64 {
    let denom = 1.0 + KLD_SMOOTHING * NUM_BINS as f64;
    p_true
        .probs
        .iter()
        .zip(&p_pred.probs)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, q)| t * libm::log(t / ((q + KLD_SMOOTHING) / denom)))
        .sum::<f64>()
        .max(0.0)
}

/// Expected score on the 1..=10 scale.
pub fn mean_score(p: &RatingDistribution) -> f64 {
    p.probs.iter().enumerate().map(|(i, m)| m * (i + 1) as f64).sum()
}

/// Standard deviation of the bin centre on the normalised axis.
pub fn std_normalized(p: &RatingDistribution) -> f64 {
    let xs = centers();
    let mu: f64 = p.probs.iter().zip(&xs).map(|(m, x)| m * x).sum();
    let var: f64 = p.probs.iter().zip(&xs).map(|(m, x)| m * (x - mu) * (x - mu)).sum();
    libm::sqrt(var.max(0.0))
}

/// Mean absolute deviation around the median bin centre, normalised axis.
///
/// The median bin is the smallest score whose CDF reaches one half.
pub fn mad_median(p: &RatingDistribution) -> f64 {
    let xs = centers();
    let cdf = p.cdf();
    let median_idx = cdf
        .values
        .iter()
        .position(|c| *c >= 0.5 - 1e-12)
        .unwrap_or(NUM_BINS - 1);
    let xm = xs[median_idx];
    p.probs.iter().zip(&xs).map(|(m, x)| m * (x - xm).abs()).sum()
}

/// Converts a normalised-axis spread (STD, MAD) to score units.
pub fn to_score_scale(value: f64) -> f64 {
    value * SCORE_SCALE
}

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateInput("need at least two observations"));
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    Ok(xs.iter().zip(ys).map(|(x, y)| (x - y).abs()).sum::<f64>() / xs.len() as f64)
}

/// Pearson linear correlation coefficient.
pub fn plcc(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateInput("zero variance"));
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties receive the average of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = alloc::vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank-order correlation (Pearson on average ranks).
pub fn srocc(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    plcc(&average_ranks(xs), &average_ranks(ys))
}

//! Seeded synthetic rating corpora drawn from beta distributions.

use aesu_core::beta_model::{SHAPE_MAX, SHAPE_MIN};
use aesu_core::distributions::NUM_BINS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{IngestError, Result};
use crate::record::ImageRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_images: usize,
    pub raters_per_image: u64,
    /// Log-uniform prior range for alpha.
    pub alpha_range: (f64, f64),
    /// Log-uniform prior range for beta.
    pub beta_range: (f64, f64),
    /// Probability that a vote is replaced by a uniformly random score.
    pub vote_noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_images: 100,
            raters_per_image: 200,
            alpha_range: (2.0, 20.0),
            beta_range: (2.0, 20.0),
            vote_noise: 0.0,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let range_ok = |(lo, hi): (f64, f64)| SHAPE_MIN <= lo && lo <= hi && hi <= SHAPE_MAX;
        if !range_ok(self.alpha_range) || !range_ok(self.beta_range) {
            return Err(IngestError::Usage("shape ranges must satisfy 1 <= lo <= hi <= 500".into()));
        }
        if self.raters_per_image < 1 {
            return Err(IngestError::Usage("need at least one rater per image".into()));
        }
        if !(0.0..=1.0).contains(&self.vote_noise) {
            return Err(IngestError::Usage("vote noise must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp().clamp(lo, hi)
}

/// Maps a point of `[0, 1]` to its score bin.
fn bin_of(x: f64) -> usize {
    ((x * NUM_BINS as f64) as usize).min(NUM_BINS - 1)
}

/// Draws `raters` votes from Beta(alpha, beta) into a histogram, replacing
/// each vote by a uniform score with probability `noise`.
pub fn draw_votes(rng: &mut impl Rng, alpha: f64, beta: f64, raters: u64, noise: f64) -> [u64; NUM_BINS] {
    let dist = Beta::new(alpha, beta).expect("validated shape");
    let mut counts = [0u64; NUM_BINS];
    for _ in 0..raters {
        let bin = if noise > 0.0 && rng.random_bool(noise) {
            rng.random_range(0..NUM_BINS)
        } else {
            bin_of(dist.sample(rng))
        };
        counts[bin] += 1;
    }
    counts
}

/// Image `i` uses ChaCha stream `i` of the seed, so the corpus depends only
/// on the spec.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<ImageRecord>> {
    spec.validate()?;
    let width = spec.n_images.saturating_sub(1).to_string().len().max(6);
    (0..spec.n_images)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let alpha = log_uniform(&mut rng, spec.alpha_range);
            let beta = log_uniform(&mut rng, spec.beta_range);
            let counts = draw_votes(&mut rng, alpha, beta, spec.raters_per_image, spec.vote_noise);
            let mut rec = ImageRecord::from_counts(format!("syn{i:0width$}"), counts)?;
            rec.meta.true_shape = Some((alpha, beta));
            Ok(rec)
        })
        .collect()
}

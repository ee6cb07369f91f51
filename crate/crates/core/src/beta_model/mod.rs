//! Beta modelling of rating histograms.
//!
//! A histogram is summarised by the beta distribution whose ten-bin
//! discretisation ([`b2r`]) is closest to it in EMD. Fitting runs Nelder–Mead
//! on `(a, c)` with `alpha = 1 + e^a`, `beta = 1 + e^c`, both capped at
//! [`SHAPE_MAX`], so every fitted shape yields a valid opinion.

mod special;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{emd, RatingDistribution, NUM_BINS};
use crate::error::{Error, Result};
use crate::optim::NelderMead;

pub use special::log_beta_fn;

/// Smallest admissible shape parameter (belief/disbelief would go negative below it).
pub const SHAPE_MIN: f64 = 1.0;
/// Largest shape parameter a fit may return; bounds uncertainty below by `2 / 1000`.
pub const SHAPE_MAX: f64 = 500.0;

const MOMENT_VARIANCE_FLOOR: f64 = 1e-9;
const RESTART_SPREAD: f64 = 1.5;
const START_OFFSET_FLOOR: f64 = 1e-3;
const TIE_RELATIVE: f64 = 1e-9;

/// Shape parameters `(alpha, beta)` of a beta distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaShape {
    alpha: f64,
    beta: f64,
}

impl BetaShape {
    /// Both parameters must lie in `[1, 500]`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = |v: f64| (SHAPE_MIN..=SHAPE_MAX).contains(&v);
        if ok(alpha) && ok(beta) {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::DomainError("shape parameters must lie in [1, 500]"))
        }
    }

    /// Clamps both parameters into `[1, 500]`. NaN maps to 1.
    pub fn clamped(alpha: f64, beta: f64) -> Self {
        let clamp = |v: f64| if v.is_nan() { SHAPE_MIN } else { v.clamp(SHAPE_MIN, SHAPE_MAX) };
        Self { alpha: clamp(alpha), beta: clamp(beta) }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(beta, alpha)`, the shape of the mirrored distribution.
    pub fn swapped(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }
}

/// Subjective-logic binomial opinion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Opinion {
    belief: f64,
    disbelief: f64,
    uncertainty: f64,
}

impl Opinion {
    /// Accepts masses in `[0, 1]` summing to one within `1e-9` and
    /// renormalises them.
    pub fn new(belief: f64, disbelief: f64, uncertainty: f64) -> Result<Self> {
        let parts = [belief, disbelief, uncertainty];
        if parts.iter().any(|v| !v.is_finite() || *v < -1e-9 || *v > 1.0 + 1e-9) {
            return Err(Error::DomainError("opinion masses must lie in [0, 1]"));
        }
        let total = belief + disbelief + uncertainty;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::DomainError("opinion masses must sum to 1"));
        }
        let [b, d, u] = parts.map(|v| v.max(0.0) / total);
        Ok(Self { belief: b, disbelief: d, uncertainty: u })
    }

    pub fn belief(&self) -> f64 {
        self.belief
    }

    pub fn disbelief(&self) -> f64 {
        self.disbelief
    }

    pub fn uncertainty(&self) -> f64 {
        self.uncertainty
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.belief, self.disbelief, self.uncertainty]
    }
}

/// Beta density at `x`.
pub fn beta_pdf(x: f64, shape: &BetaShape) -> Result<f64> {
    special::check_unit(x)?;
    Ok(special::pdf_unchecked(x, shape.alpha, shape.beta))
}

/// Beta CDF `I_x(alpha, beta)`.
pub fn reg_inc_beta(x: f64, shape: &BetaShape) -> Result<f64> {
    special::check_unit(x)?;
    Ok(special::inc_beta_unchecked(x, shape.alpha, shape.beta))
}

/// Discretises a beta distribution onto the ten score bins (bin masses are
/// CDF differences at the bin edges).
pub fn b2r(shape: &BetaShape) -> RatingDistribution {
    let edges: [f64; NUM_BINS + 1] = core::array::from_fn(|k| {
        special::inc_beta_unchecked(k as f64 / NUM_BINS as f64, shape.alpha, shape.beta)
    });
    let masses: [f64; NUM_BINS] = core::array::from_fn(|i| (edges[i + 1] - edges[i]).max(0.0));
    RatingDistribution::from_weights(masses).expect("beta bin masses are non-negative and sum to one")
}

/// `b = (α−1)/(α+β)`, `d = (β−1)/(α+β)`, `u = 2/(α+β)`.
pub fn opinion_from_shape(shape: &BetaShape) -> Result<Opinion> {
    let (a, b) = (shape.alpha, shape.beta);
    if !(a >= 1.0 && b >= 1.0) {
        return Err(Error::DomainError("opinion needs alpha >= 1 and beta >= 1"));
    }
    let s = a + b;
    Ok(Opinion { belief: (a - 1.0) / s, disbelief: (b - 1.0) / s, uncertainty: 2.0 / s })
}

/// Method-of-moments starting shape on the normalised bin centres, clamped
/// into `[1, 500]`.
pub fn moments_init(p: &RatingDistribution) -> BetaShape {
    let probs = p.probs();
    let centers: [f64; NUM_BINS] = core::array::from_fn(|i| crate::distributions::bin_center(i + 1));
    let m: f64 = probs.iter().zip(&centers).map(|(w, x)| w * x).sum();
    let v: f64 = probs.iter().zip(&centers).map(|(w, x)| w * (x - m) * (x - m)).sum();
    if v < MOMENT_VARIANCE_FLOOR {
        let alpha = (SHAPE_MAX * m).clamp(SHAPE_MIN, SHAPE_MAX);
        return BetaShape::clamped(alpha, SHAPE_MAX - alpha);
    }
    let t = m * (1.0 - m) / v - 1.0;
    BetaShape::clamped(m * t, (1.0 - m) * t)
}

/// Outcome of [`fit_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub shape: BetaShape,
    /// EMD between the target and `b2r(shape)`.
    pub fit_emd: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn opinion(&self) -> Opinion {
        opinion_from_shape(&self.shape).expect("fitted shapes satisfy alpha, beta >= 1")
    }
}

/// Knobs for [`fit_beta_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub emd_order: f64,
    pub seed: u64,
    /// Perturbed restarts in addition to the moment start.
    pub restarts: usize,
    pub optimizer: NelderMead,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { emd_order: 2.0, seed: 42, restarts: 3, optimizer: NelderMead::default() }
    }
}

fn shape_from_params(params: &[f64; 2]) -> BetaShape {
    BetaShape::clamped(1.0 + libm::exp(params[0]), 1.0 + libm::exp(params[1]))
}

fn params_from_shape(shape: &BetaShape) -> [f64; 2] {
    [
        libm::log((shape.alpha - 1.0).max(START_OFFSET_FLOOR)),
        libm::log((shape.beta - 1.0).max(START_OFFSET_FLOOR)),
    ]
}

/// `candidate` beats `incumbent` on a strictly lower objective, or on an
/// objective tie with a smaller `alpha + beta`.
fn better(candidate: &FitResult, incumbent: &FitResult) -> bool {
    let scale = candidate.fit_emd.max(incumbent.fit_emd);
    if (candidate.fit_emd - incumbent.fit_emd).abs() <= TIE_RELATIVE * scale {
        let mass = |f: &FitResult| f.shape.alpha + f.shape.beta;
        mass(candidate) < mass(incumbent)
    } else {
        candidate.fit_emd < incumbent.fit_emd
    }
}

/// Fits a beta distribution to `p` by minimising `emd(b2r(shape), p, r)`.
pub fn fit_beta(p: &RatingDistribution, r: f64, seed: u64) -> Result<FitResult> {
    fit_beta_with(p, &FitOptions { emd_order: r, seed, ..FitOptions::default() })
}

pub fn fit_beta_with(p: &RatingDistribution, opts: &FitOptions) -> Result<FitResult> {
    let r = opts.emd_order;
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidOrder(r));
    }
    let objective = |shape: &BetaShape| emd(&b2r(shape), p, r).unwrap_or(f64::INFINITY);

    let init = moments_init(p);
    let mut best = FitResult { shape: init, fit_emd: objective(&init), iterations: 0, converged: false };

    let origin = params_from_shape(&init);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for restart in 0..=opts.restarts {
        let start = if restart == 0 {
            origin
        } else {
            [
                origin[0] + rng.random_range(-RESTART_SPREAD..RESTART_SPREAD),
                origin[1] + rng.random_range(-RESTART_SPREAD..RESTART_SPREAD),
            ]
        };
        let found = opts.optimizer.minimize(|x: &[f64; 2]| objective(&shape_from_params(x)), start);
        let shape = shape_from_params(&found.point);
        let candidate = FitResult {
            shape,
            fit_emd: objective(&shape),
            iterations: found.iterations,
            converged: found.converged,
        };
        if better(&candidate, &best) {
            best = candidate;
        }
    }
    Ok(best)
}

//! Losses for learning rating distributions and beta shapes together.
//!
//! `l1` compares predicted and true histograms, `l2` compares predicted and
//! fitted-ground-truth shapes on a log scale, and `l3` ties the predicted
//! histogram to the discretisation of the predicted shape. The total is
//! `w1·l1 + w2·wb·l2 + w3·l3`; `wb` rescales `l2` to the EMD range.

use alloc::vec::Vec;

use crate::beta_model::{b2r, BetaShape};
use crate::distributions::{emd, RatingDistribution};
use crate::error::{Error, Result};

/// EMD order used by the training losses.
pub const LOSS_EMD_ORDER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub wb: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { w1: 0.4, w2: 0.5, w3: 0.1, wb: 0.2 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let sum = self.w1 + self.w2 + self.w3;
        let nonneg = [self.w1, self.w2, self.w3].iter().all(|w| *w >= 0.0);
        if !nonneg || !self.wb.is_finite() || !((sum - 1.0).abs() <= 1e-9) {
            return Err(Error::InvalidWeights(sum));
        }
        Ok(())
    }

    /// Combines component losses. Weights are not validated here.
    pub fn combine(&self, l1: f64, l2: f64, l3: f64) -> LossBreakdown {
        LossBreakdown { l1, l2, l3, total: self.w1 * l1 + self.w2 * self.wb * l2 + self.w3 * l3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub total: f64,
}

/// Order-2 EMD between predicted and true histograms.
pub fn l1_emd(r_pred: &RatingDistribution, r_true: &RatingDistribution) -> f64 {
    emd(r_pred, r_true, LOSS_EMD_ORDER).expect("order 2 is valid")
}

/// Root mean squared log error over the two shape parameters, with the
/// usual `ln(1 + x)` offset.
pub fn l2_rmsle(b_pred: &BetaShape, b_true: &BetaShape) -> f64 {
    let da = libm::log1p(b_pred.alpha()) - libm::log1p(b_true.alpha());
    let db = libm::log1p(b_pred.beta()) - libm::log1p(b_true.beta());
    libm::sqrt((da * da + db * db) / 2.0)
}

/// Order-2 EMD between the predicted histogram and the discretised
/// predicted shape.
pub fn l3_consistency(r_pred: &RatingDistribution, b_pred: &BetaShape) -> f64 {
    emd(r_pred, &b2r(b_pred), LOSS_EMD_ORDER).expect("order 2 is valid")
}

pub fn total_loss(
    r_pred: &RatingDistribution,
    b_pred: &BetaShape,
    r_true: &RatingDistribution,
    b_true: &BetaShape,
    w: &LossWeights,
) -> Result<LossBreakdown> {
    w.validate()?;
    Ok(w.combine(l1_emd(r_pred, r_true), l2_rmsle(b_pred, b_true), l3_consistency(r_pred, b_pred)))
}

/// Central-difference gradient `(f(x + h e_i) − f(x − h e_i)) / 2h`.
pub fn fd_gradient<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::DomainError("step must be positive and finite"));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        if !up.is_finite() {
            return Err(Error::NonFiniteValue(2 * i));
        }
        if !down.is_finite() {
            return Err(Error::NonFiniteValue(2 * i + 1));
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(a: f64, b: f64) -> BetaShape {
        BetaShape::new(a, b).unwrap()
    }

    #[test]
    fn l1_examples() {
        let p = RatingDistribution::from_probs([0.05, 0.05, 0.1, 0.2, 0.2, 0.15, 0.1, 0.1, 0.03, 0.02]).unwrap();
        assert_eq!(l1_emd(&p, &p), 0.0);
        let lo = RatingDistribution::delta(1).unwrap();
        let hi = RatingDistribution::delta(10).unwrap();
        assert!((l1_emd(&lo, &hi) - 0.948_683_298_050_513_8).abs() < 1e-12);
        assert_eq!(l1_emd(&p, &hi), l1_emd(&hi, &p));
    }

    #[test]
    fn l2_examples() {
        assert_eq!(l2_rmsle(&shape(4.0, 2.0), &shape(4.0, 2.0)), 0.0);
        assert!((l2_rmsle(&shape(3.0, 1.0), &shape(1.0, 3.0)) - core::f64::consts::LN_2).abs() < 1e-12);
        // log error of (100,100) vs (110,110) against the absolute-error analogue
        let rmsle = l2_rmsle(&shape(100.0, 100.0), &shape(110.0, 110.0));
        let rmse = libm::sqrt((10.0f64 * 10.0 + 10.0 * 10.0) / 2.0);
        assert!((rmsle - libm::log(111.0 / 101.0)).abs() < 1e-12);
        assert!(rmsle * 100.0 < rmse);
    }

    #[test]
    fn l3_examples() {
        let s = shape(2.5, 6.0);
        assert_eq!(l3_consistency(&b2r(&s), &s), 0.0);
        assert!(l3_consistency(&RatingDistribution::uniform(), &shape(1.0, 1.0)) < 1e-15);
        let hi = RatingDistribution::delta(10).unwrap();
        let expected = emd(&hi, &RatingDistribution::uniform(), 2.0).unwrap();
        assert!((l3_consistency(&hi, &shape(1.0, 1.0)) - expected).abs() < 1e-15);
    }

    #[test]
    fn total_examples() {
        let w = LossWeights::default();
        assert_eq!(w.combine(1.0, 1.0, 1.0).total, 0.6);

        let s = shape(3.0, 5.0);
        let r = b2r(&s);
        assert_eq!(total_loss(&r, &s, &r, &s, &w).unwrap().total, 0.0);

        let proj = LossWeights { w1: 1.0, w2: 0.0, w3: 0.0, wb: 0.2 };
        let other = shape(6.0, 2.0);
        let b = total_loss(&b2r(&other), &other, &r, &s, &proj).unwrap();
        assert_eq!(b.total, b.l1);

        let bad = LossWeights { w1: 0.5, w2: 0.5, w3: 0.5, wb: 0.2 };
        assert!(matches!(total_loss(&r, &s, &r, &s, &bad), Err(Error::InvalidWeights(_))));
        let neg = LossWeights { w1: 1.2, w2: -0.2, w3: 0.0, wb: 0.2 };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn fd_examples() {
        let g = fd_gradient(|x| x.iter().map(|v| v * v).sum(), &[1.0, 2.0], 1e-4).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-6 && (g[1] - 4.0).abs() < 1e-6);

        let truth = shape(4.0, 7.0);
        let f = |x: &[f64]| l2_rmsle(&BetaShape::clamped(x[0], x[1]), &truth);
        let g = fd_gradient(f, &[4.0, 7.0], 1e-4).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-5), "{g:?}");

        assert!(matches!(fd_gradient(|_| f64::NAN, &[0.0], 1e-3), Err(Error::NonFiniteValue(0))));
        assert!(fd_gradient(|x| x[0], &[0.0], 0.0).is_err());
    }
}

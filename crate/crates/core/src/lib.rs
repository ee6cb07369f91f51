//! Subjectivity modelling for crowd aesthetic ratings.
//!
//! A rating histogram over the ten-point scale is fitted with a beta
//! distribution by minimising the earth mover's distance between the
//! histogram and the discretised beta. The fitted shape parameters map to a
//! subjective-logic binomial opinion `(belief, disbelief, uncertainty)`; the
//! uncertainty mass is the AesU subjectivity score.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature to get
//! `std::error::Error` for [`Error`] through `thiserror`.
//!
//! Modules:
//! - [`distributions`]: rating histograms, EMD/KLD and summary statistics
//! - [`beta_model`]: special functions, beta discretisation, fitting and opinions
//! - [`subjectivity`]: STD, MAD, MED, DUD and AesU
//! - [`modality`]: Hartigan dip test and peak counting
//! - [`losses`]: the distribution/shape/consistency training losses
//! - [`decision`]: ternary classification and recommendation simulation
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod beta_model;
pub mod decision;
pub mod distributions;
mod error;
pub mod losses;
pub mod modality;
pub mod optim;
pub mod subjectivity;

pub use beta_model::{
    b2r, beta_pdf, fit_beta, fit_beta_with, log_beta_fn, moments_init, opinion_from_shape,
    reg_inc_beta, BetaShape, FitOptions, FitResult, Opinion, SHAPE_MAX, SHAPE_MIN,
};
pub use decision::{
    classify, compute_center, satisfaction_ratio, simulate_recommendation, Candidate,
    RecommendationRule, RuleOutcome, TernaryCenter, TernaryClass,
};
pub use distributions::{
    emd, kld, mad_median, mae, mean_score, normalize_counts, plcc, srocc, std_normalized, CdfVector,
    RatingDistribution, NUM_BINS,
};
pub use error::{Error, Result};
pub use losses::{fd_gradient, l1_emd, l2_rmsle, l3_consistency, total_loss, LossBreakdown, LossWeights};
pub use modality::{count_modes, dip_statistic, dip_test, ModalityResult};
pub use subjectivity::{aesu, dud, full_report, max_entropy_same_mean, med, SubjectivityReport};

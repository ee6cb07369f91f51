//! Ternary pleasing / unpleasing / uncertain decisions on the opinion
//! triangle, and the recommendation simulation built on them.
//!
//! The three class regions meet at a centre point; an opinion falls in the
//! region of the component that exceeds its centre coordinate the most.
//! With the centroid as centre this is plain argmax.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::beta_model::Opinion;
use crate::distributions::{RatingDistribution, NUM_BINS};
use crate::error::{Error, Result};

/// Default satisfaction / binary-classification threshold on the 1..=10 scale.
pub const DEFAULT_THRESHOLD: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TernaryCenter {
    pub b_c: f64,
    pub d_c: f64,
    pub u_c: f64,
}

impl TernaryCenter {
    /// Component medians of opinions fitted on the AVA training split.
    pub const AVA_MEDIAN: Self = Self { b_c: 0.419, d_c: 0.444, u_c: 0.137 };
    pub const CENTROID: Self = Self { b_c: 1.0 / 3.0, d_c: 1.0 / 3.0, u_c: 1.0 / 3.0 };

    pub fn new(b_c: f64, d_c: f64, u_c: f64) -> Result<Self> {
        if [b_c, d_c, u_c].iter().all(|v| (0.0..=1.0).contains(v)) {
            Ok(Self { b_c, d_c, u_c })
        } else {
            Err(Error::DomainError("centre coordinates must lie in [0, 1]"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TernaryClass {
    Pleasing,
    Unpleasing,
    Uncertain,
}

impl TernaryClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TernaryClass::Pleasing => "pleasing",
            TernaryClass::Unpleasing => "unpleasing",
            TernaryClass::Uncertain => "uncertain",
        }
    }
}

impl fmt::Display for TernaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TernaryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pleasing" => Ok(TernaryClass::Pleasing),
            "unpleasing" => Ok(TernaryClass::Unpleasing),
            "uncertain" => Ok(TernaryClass::Uncertain),
            _ => Err(Error::DomainError("unknown ternary class")),
        }
    }
}

fn lower_median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Component-wise lower median of a corpus of opinions.
pub fn compute_center(opinions: &[Opinion]) -> Result<TernaryCenter> {
    if opinions.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let column = |k: usize| lower_median(opinions.iter().map(|o| o.as_array()[k]).collect());
    Ok(TernaryCenter { b_c: column(0), d_c: column(1), u_c: column(2) })
}

/// Class of the largest `component − centre` difference. Exact ties go to
/// Uncertain, then Unpleasing.
pub fn classify(o: &Opinion, c: &TernaryCenter) -> TernaryClass {
    let ranked = [
        (TernaryClass::Uncertain, o.uncertainty() - c.u_c),
        (TernaryClass::Unpleasing, o.disbelief() - c.d_c),
        (TernaryClass::Pleasing, o.belief() - c.b_c),
    ];
    let mut best = ranked[0];
    for cand in &ranked[1..] {
        if cand.1 > best.1 {
            best = *cand;
        }
    }
    best.0
}

/// Share of votes strictly above `threshold`.
pub fn satisfied_share(p: &RatingDistribution, threshold: u32) -> f64 {
    let skip = (threshold as usize).min(NUM_BINS);
    p.probs()[skip..].iter().sum()
}

/// Average over the recommended images of the share of raters who voted
/// strictly above `threshold`.
pub fn satisfaction_ratio<'a, I>(recommended: I, threshold: u32) -> Result<f64>
where
    I: IntoIterator<Item = &'a RatingDistribution>,
{
    let (mut total, mut count) = (0.0, 0usize);
    for p in recommended {
        total += satisfied_share(p, threshold);
        count += 1;
    }
    if count == 0 {
        return Err(Error::NoRecommendations);
    }
    Ok(total / count as f64)
}

/// One image as seen by the recommender: its observed votes and the model's
/// predictions for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub distribution: RatingDistribution,
    pub predicted_mean: f64,
    pub predicted_opinion: Opinion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecommendationRule {
    /// Recommend when the predicted mean score exceeds the threshold.
    BinaryMean,
    /// Recommend when the predicted opinion classifies as pleasing.
    TernaryPleasing,
}

impl RecommendationRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecommendationRule::BinaryMean => "binary",
            RecommendationRule::TernaryPleasing => "ternary",
        }
    }

    pub fn recommends(&self, c: &Candidate, center: &TernaryCenter, threshold: u32) -> bool {
        match self {
            RecommendationRule::BinaryMean => c.predicted_mean > threshold as f64,
            RecommendationRule::TernaryPleasing => {
                classify(&c.predicted_opinion, center) == TernaryClass::Pleasing
            }
        }
    }
}

impl FromStr for RecommendationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(RecommendationRule::BinaryMean),
            "ternary" => Ok(RecommendationRule::TernaryPleasing),
            _ => Err(Error::DomainError("unknown recommendation rule")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleOutcome {
    pub rule: RecommendationRule,
    pub recommended: usize,
    /// `None` when the rule recommended nothing.
    pub satisfaction: Option<f64>,
}

impl RuleOutcome {
    pub fn ratio(&self) -> Result<f64> {
        self.satisfaction.ok_or(Error::NoRecommendations)
    }
}

/// Runs each rule over the corpus and reports how many images it
/// recommends and the resulting satisfaction ratio.
pub fn simulate_recommendation(
    corpus: &[Candidate],
    center: &TernaryCenter,
    rules: &[RecommendationRule],
    threshold: u32,
) -> Vec<RuleOutcome> {
    rules
        .iter()
        .map(|&rule| {
            let picked: Vec<&RatingDistribution> = corpus
                .iter()
                .filter(|c| rule.recommends(c, center, threshold))
                .map(|c| &c.distribution)
                .collect();
            RuleOutcome {
                rule,
                recommended: picked.len(),
                satisfaction: satisfaction_ratio(picked, threshold).ok(),
            }
        })
        .collect()
}

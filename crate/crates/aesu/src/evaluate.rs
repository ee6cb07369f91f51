//! Prediction-vs-ground-truth evaluation over two corpora joined by image id.

use std::collections::HashMap;

use aesu_core::distributions::{emd, kld, mad_median, mae, mean_score, plcc, srocc, std_normalized};
use aesu_core::subjectivity::{dud, med, BINARY_THRESHOLD};
use serde::Serialize;

use crate::error::{IngestError, Result};
use crate::record::ImageRecord;

/// Scalar columns compared between prediction and truth.
pub const EVAL_COLUMNS: [&str; 9] = ["mean", "std", "mad", "med", "dud", "aesu", "b", "d", "u"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnScores {
    pub column: String,
    /// `None` when a correlation is undefined (zero variance).
    pub plcc: Option<f64>,
    pub srocc: Option<f64>,
    pub mae: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n_images: usize,
    pub columns: Vec<ColumnScores>,
    /// Mean order-1 EMD between distributions.
    pub emd: f64,
    /// Mean order-2 EMD between distributions.
    pub emd_r2: f64,
    /// Mean KL(truth || prediction).
    pub kld: f64,
    pub binary_accuracy: f64,
}

fn measures(rec: &ImageRecord, use_prediction: bool) -> Result<[f64; 9]> {
    let p = &rec.distribution;
    let opinion = rec
        .opinion
        .ok_or_else(|| IngestError::Internal(format!("{}: opinion missing at evaluation", rec.image_id)))?;
    let mean = match (use_prediction, rec.predicted_mean) {
        (true, Some(m)) => m,
        _ => rec.report.map(|r| r.mean).unwrap_or_else(|| mean_score(p)),
    };
    let r = rec.report;
    Ok([
        mean,
        r.map(|r| r.std).unwrap_or_else(|| std_normalized(p)),
        r.map(|r| r.mad).unwrap_or_else(|| mad_median(p)),
        r.map(|r| r.med).unwrap_or_else(|| med(p)),
        r.map(|r| r.dud).unwrap_or_else(|| dud(p)),
        r.map(|r| r.aesu).unwrap_or(opinion.uncertainty()),
        opinion.belief(),
        opinion.disbelief(),
        opinion.uncertainty(),
    ])
}

/// Every truth record must have a prediction with the same id. Records
/// must carry opinions.
pub fn evaluate(pred: &[ImageRecord], truth: &[ImageRecord]) -> Result<EvalReport> {
    if truth.is_empty() {
        return Err(IngestError::Input("ground-truth corpus is empty".into()));
    }
    let by_id: HashMap<&str, &ImageRecord> = pred.iter().map(|r| (r.image_id.as_str(), r)).collect();
    let mut pred_cols: Vec<Vec<f64>> = vec![Vec::with_capacity(truth.len()); EVAL_COLUMNS.len()];
    let mut true_cols = pred_cols.clone();
    let (mut emd1, mut emd2, mut kl, mut agree) = (0.0, 0.0, 0.0, 0usize);
    for t in truth {
        let p = by_id
            .get(t.image_id.as_str())
            .ok_or_else(|| IngestError::Input(format!("no prediction for image {}", t.image_id)))?;
        let pm = measures(p, true)?;
        let tm = measures(t, false)?;
        for k in 0..EVAL_COLUMNS.len() {
            pred_cols[k].push(pm[k]);
            true_cols[k].push(tm[k]);
        }
        emd1 += emd(&t.distribution, &p.distribution, 1.0)?;
        emd2 += emd(&t.distribution, &p.distribution, 2.0)?;
        kl += kld(&t.distribution, &p.distribution);
        if (pm[0] > BINARY_THRESHOLD) == (tm[0] > BINARY_THRESHOLD) {
            agree += 1;
        }
    }
    let n = truth.len() as f64;
    let columns = EVAL_COLUMNS
        .iter()
        .enumerate()
        .map(|(k, name)| ColumnScores {
            column: (*name).to_owned(),
            plcc: plcc(&pred_cols[k], &true_cols[k]).ok(),
            srocc: srocc(&pred_cols[k], &true_cols[k]).ok(),
            mae: mae(&pred_cols[k], &true_cols[k]).ok(),
        })
        .collect();
    Ok(EvalReport {
        n_images: truth.len(),
        columns,
        emd: emd1 / n,
        emd_r2: emd2 / n,
        kld: kl / n,
        binary_accuracy: agree as f64 / n,
    })
}

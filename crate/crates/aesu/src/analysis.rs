//! Per-image analysis over a corpus, parallel but order-preserving.
//!
//! Every record is processed independently and written back in place, so
//! the output order is the input order for any thread count. Bootstrap
//! null distributions depend only on the vote count, the seed and the
//! number of draws; they are computed once per distinct vote count.

use std::collections::BTreeMap;

use aesu_core::beta_model::{fit_beta_with, FitOptions};
use aesu_core::modality::{bootstrap_dip, dip_test_with_null, DipTestOptions};
use aesu_core::subjectivity::full_report;
use rayon::prelude::*;

use crate::error::{IngestError, Result};
use crate::record::ImageRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub fit: FitOptions,
    /// Refit records that already carry a fit or an opinion.
    pub refit: bool,
    pub report: bool,
    /// Run the dip test when set.
    pub dip: Option<DipTestOptions>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { fit: FitOptions::default(), refit: true, report: false, dip: None }
    }
}

/// Runs `op` on a pool of `jobs` threads (`None` = one per core).
pub fn with_pool<T: Send>(jobs: Option<usize>, op: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| IngestError::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(op))
}

fn vote_total(rec: &ImageRecord) -> Option<usize> {
    rec.counts.map(|c| c.iter().sum::<u64>() as usize)
}

/// Null dip distributions keyed by sample size.
pub fn null_table(records: &[ImageRecord], opts: &DipTestOptions) -> BTreeMap<usize, Vec<f64>> {
    let mut table = BTreeMap::new();
    for n in records.iter().filter_map(vote_total).filter(|n| *n >= 2) {
        table.entry(n).or_insert_with(|| {
            (0..opts.bootstrap as u64).into_par_iter().map(|i| bootstrap_dip(n, opts.seed, i)).collect()
        });
    }
    table
}

fn analyze_one(
    rec: &mut ImageRecord,
    cfg: &AnalysisConfig,
    nulls: &BTreeMap<usize, Vec<f64>>,
) -> std::result::Result<(), aesu_core::Error> {
    let needs_fit = cfg.refit || (rec.fit.is_none() && rec.opinion.is_none()) || (cfg.report && rec.fit.is_none());
    if needs_fit {
        let fit = fit_beta_with(&rec.distribution, &cfg.fit)?;
        rec.opinion = Some(fit.opinion());
        rec.fit = Some(fit);
    } else if rec.opinion.is_none() {
        rec.opinion = rec.fit.map(|f| f.opinion());
    }
    if cfg.report {
        let fit = rec.fit.as_ref().expect("fit computed above");
        rec.report = Some(full_report(&rec.distribution, fit));
    }
    if let Some(dip) = &cfg.dip {
        rec.modality = match vote_total(rec).and_then(|n| nulls.get(&n)) {
            Some(null) => Some(dip_test_with_null(&rec.distribution, null, dip.significance)?),
            None => None,
        };
    }
    Ok(())
}

/// Analyses every record in place.
pub fn analyze_corpus(records: &mut [ImageRecord], cfg: &AnalysisConfig, jobs: Option<usize>) -> Result<()> {
    with_pool(jobs, || {
        let nulls = cfg.dip.as_ref().map(|d| null_table(records, d)).unwrap_or_default();
        records.par_iter_mut().try_for_each(|rec| {
            analyze_one(rec, cfg, &nulls).map_err(|e| IngestError::Input(format!("{}: {e}", rec.image_id)))
        })
    })?
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_synthetic, SyntheticSpec};

    #[test]
    fn thread_count_does_not_change_results() {
        let spec = SyntheticSpec { n_images: 12, raters_per_image: 60, seed: 5, ..SyntheticSpec::default() };
        let cfg = AnalysisConfig {
            report: true,
            dip: Some(DipTestOptions { bootstrap: 100, seed: 1, significance: 0.05 }),
            ..AnalysisConfig::default()
        };
        let mut one = generate_synthetic(&spec).unwrap();
        let mut four = one.clone();
        analyze_corpus(&mut one, &cfg, Some(1)).unwrap();
        analyze_corpus(&mut four, &cfg, Some(4)).unwrap();
        assert_eq!(one, four);
        assert!(one.iter().all(|r| r.report.is_some() && r.modality.is_some()));
    }

    #[test]
    fn existing_opinions_are_kept_without_refit() {
        let spec = SyntheticSpec { n_images: 2, ..SyntheticSpec::default() };
        let mut recs = generate_synthetic(&spec).unwrap();
        let marker = aesu_core::Opinion::new(0.5, 0.25, 0.25).unwrap();
        recs[0].opinion = Some(marker);
        let cfg = AnalysisConfig { refit: false, ..AnalysisConfig::default() };
        analyze_corpus(&mut recs, &cfg, Some(2)).unwrap();
        assert_eq!(recs[0].opinion, Some(marker));
        assert!(recs[0].fit.is_none());
        assert!(recs[1].fit.is_some());
    }

    #[test]
    fn single_vote_records_skip_the_dip_test() {
        let mut recs = vec![ImageRecord::from_counts("one", [0, 0, 0, 0, 1, 0, 0, 0, 0, 0]).unwrap()];
        let cfg = AnalysisConfig { dip: Some(DipTestOptions::default()), ..AnalysisConfig::default() };
        analyze_corpus(&mut recs, &cfg, None).unwrap();
        assert!(recs[0].modality.is_none());
    }
}

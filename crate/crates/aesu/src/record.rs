//! Per-image records and their flat serialised form.

use aesu_core::beta_model::{opinion_from_shape, BetaShape, FitResult, Opinion};
use aesu_core::decision::TernaryClass;
use aesu_core::distributions::{normalize_counts, RatingDistribution, NUM_BINS};
use aesu_core::modality::ModalityResult;
use aesu_core::subjectivity::{SubjectivityReport, BINARY_THRESHOLD};
use serde::{Deserialize, Serialize};

use crate::error::LineError;

/// Column order of result files.
pub const RESULT_COLUMNS: [&str; 19] = [
    "image_id",
    "counts",
    "alpha",
    "beta",
    "b",
    "d",
    "u",
    "fit_emd",
    "mean",
    "std",
    "mad",
    "med",
    "dud",
    "aesu",
    "dip",
    "dip_p",
    "unimodal",
    "mode_count",
    "ternary_class",
];

const SIGNIFICANT_DIGITS: usize = 12;

/// Opaque metadata carried through from the source file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordMeta {
    /// Semantic tag ids of an AVA line.
    pub tags: Option<[u64; 2]>,
    /// Challenge id of an AVA line.
    pub challenge: Option<u64>,
    /// Generating shape of a synthetic record.
    pub true_shape: Option<(f64, f64)>,
}

/// One image: identity, votes and whatever analysis has been run on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub image_id: String,
    /// Raw vote counts; absent for records that only carry a (predicted)
    /// distribution.
    pub counts: Option<[u64; NUM_BINS]>,
    pub distribution: RatingDistribution,
    pub fit: Option<FitResult>,
    pub opinion: Option<Opinion>,
    pub report: Option<SubjectivityReport>,
    pub modality: Option<ModalityResult>,
    pub predicted_mean: Option<f64>,
    pub ternary_class: Option<TernaryClass>,
    pub meta: RecordMeta,
}

impl ImageRecord {
    pub fn from_counts(image_id: impl Into<String>, counts: [u64; NUM_BINS]) -> Result<Self, aesu_core::Error> {
        let distribution = normalize_counts(&counts)?;
        Ok(Self::bare(image_id.into(), Some(counts), distribution))
    }

    pub fn from_distribution(image_id: impl Into<String>, distribution: RatingDistribution) -> Self {
        Self::bare(image_id.into(), None, distribution)
    }

    fn bare(image_id: String, counts: Option<[u64; NUM_BINS]>, distribution: RatingDistribution) -> Self {
        Self {
            image_id,
            counts,
            distribution,
            fit: None,
            opinion: None,
            report: None,
            modality: None,
            predicted_mean: None,
            ternary_class: None,
            meta: RecordMeta::default(),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().unwrap_or(v)
}

fn r(v: Option<f64>) -> Option<f64> {
    v.map(round_sig)
}

/// Flat row as written to JSONL (CSV uses the first 19 fields).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub image_id: String,
    #[serde(default)]
    pub counts: Option<[u64; NUM_BINS]>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub d: Option<f64>,
    #[serde(default)]
    pub u: Option<f64>,
    #[serde(default)]
    pub fit_emd: Option<f64>,
    #[serde(default)]
    pub mean: Option<f64>,
    #[serde(default)]
    pub std: Option<f64>,
    #[serde(default)]
    pub mad: Option<f64>,
    #[serde(default)]
    pub med: Option<f64>,
    #[serde(default)]
    pub dud: Option<f64>,
    #[serde(default)]
    pub aesu: Option<f64>,
    #[serde(default)]
    pub dip: Option<f64>,
    #[serde(default)]
    pub dip_p: Option<f64>,
    #[serde(default)]
    pub unimodal: Option<bool>,
    #[serde(default)]
    pub mode_count: Option<usize>,
    #[serde(default)]
    pub ternary_class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<[f64; NUM_BINS]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub challenge: Option<u64>,
}

impl From<&ImageRecord> for ResultRow {
    fn from(rec: &ImageRecord) -> Self {
        let fit = rec.fit.as_ref();
        let report = rec.report.as_ref();
        let modality = rec.modality.as_ref();
        let opinion = rec.opinion.or_else(|| fit.map(|f| f.opinion()));
        ResultRow {
            image_id: rec.image_id.clone(),
            counts: rec.counts,
            alpha: r(fit.map(|f| f.shape.alpha())),
            beta: r(fit.map(|f| f.shape.beta())),
            b: r(opinion.map(|o| o.belief())),
            d: r(opinion.map(|o| o.disbelief())),
            u: r(opinion.map(|o| o.uncertainty())),
            fit_emd: r(fit.map(|f| f.fit_emd)),
            mean: r(report.map(|x| x.mean)),
            std: r(report.map(|x| x.std)),
            mad: r(report.map(|x| x.mad)),
            med: r(report.map(|x| x.med)),
            dud: r(report.map(|x| x.dud)),
            aesu: r(report.map(|x| x.aesu)),
            dip: r(modality.map(|m| m.dip)),
            dip_p: r(modality.map(|m| m.p_value)),
            unimodal: modality.map(|m| m.unimodal),
            mode_count: modality.map(|m| m.mode_count),
            ternary_class: rec.ternary_class.map(|c| c.as_str().to_owned()),
            probs: match rec.counts {
                Some(_) => None,
                None => Some(rec.distribution.probs().map(round_sig)),
            },
            fit_iterations: fit.map(|f| f.iterations),
            fit_converged: fit.map(|f| f.converged),
            predicted_mean: r(rec.predicted_mean),
            true_alpha: r(rec.meta.true_shape.map(|s| s.0)),
            true_beta: r(rec.meta.true_shape.map(|s| s.1)),
            tags: rec.meta.tags,
            challenge: rec.meta.challenge,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> LineError {
    LineError::Invalid(e.to_string())
}

impl TryFrom<ResultRow> for ImageRecord {
    type Error = LineError;

    fn try_from(row: ResultRow) -> Result<Self, LineError> {
        let mut rec = match (row.counts, row.probs) {
            (Some(counts), _) => ImageRecord::from_counts(row.image_id, counts)?,
            (None, Some(probs)) => {
                let dist = RatingDistribution::from_probs(probs)?;
                ImageRecord::from_distribution(row.image_id, dist)
            }
            (None, None) => return Err(LineError::Invalid("record has neither counts nor probs".into())),
        };

        if let (Some(alpha), Some(beta), Some(fit_emd)) = (row.alpha, row.beta, row.fit_emd) {
            let shape = BetaShape::new(alpha, beta).map_err(invalid)?;
            rec.fit = Some(FitResult {
                shape,
                fit_emd,
                iterations: row.fit_iterations.unwrap_or(0),
                converged: row.fit_converged.unwrap_or(false),
            });
        }
        rec.opinion = match (row.b, row.d, row.u) {
            (Some(b), Some(d), Some(u)) => Some(Opinion::new(b, d, u).map_err(invalid)?),
            _ => match &rec.fit {
                Some(f) => Some(opinion_from_shape(&f.shape).map_err(invalid)?),
                None => None,
            },
        };
        if let (Some(mean), Some(std), Some(mad), Some(med), Some(dud), Some(aesu)) =
            (row.mean, row.std, row.mad, row.med, row.dud, row.aesu)
        {
            rec.report = Some(SubjectivityReport {
                std,
                mad,
                med,
                dud,
                aesu,
                mean,
                binary_pleasing: mean > BINARY_THRESHOLD,
            });
        }
        if let (Some(dip), Some(p_value), Some(unimodal), Some(mode_count)) =
            (row.dip, row.dip_p, row.unimodal, row.mode_count)
        {
            let n = rec.counts.map(|c| c.iter().sum::<u64>() as usize).unwrap_or(0);
            rec.modality = Some(ModalityResult { dip, p_value, n, mode_count, unimodal });
        }
        rec.ternary_class = row.ternary_class.as_deref().map(str::parse).transpose().map_err(invalid)?;
        rec.predicted_mean = row.predicted_mean;
        rec.meta = RecordMeta {
            tags: row.tags,
            challenge: row.challenge,
            true_shape: row.true_alpha.zip(row.true_beta),
        };
        Ok(rec)
    }
}

impl ResultRow {
    /// Cells in [`RESULT_COLUMNS`] order; missing values are empty.
    pub fn csv_cells(&self) -> Vec<String> {
        fn num(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let counts = self
            .counts
            .map(|c| c.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        vec![
            self.image_id.clone(),
            counts,
            num(self.alpha),
            num(self.beta),
            num(self.b),
            num(self.d),
            num(self.u),
            num(self.fit_emd),
            num(self.mean),
            num(self.std),
            num(self.mad),
            num(self.med),
            num(self.dud),
            num(self.aesu),
            num(self.dip),
            num(self.dip_p),
            self.unimodal.map(|b| b.to_string()).unwrap_or_default(),
            self.mode_count.map(|m| m.to_string()).unwrap_or_default(),
            self.ternary_class.clone().unwrap_or_default(),
        ]
    }

    /// Inverse of [`csv_cells`](Self::csv_cells). `cell` returns the
    /// trimmed text of a named column, empty when the column is absent.
    pub fn from_csv_cells<'a>(cell: impl Fn(&str) -> &'a str) -> Result<Self, LineError> {
        fn opt<T: std::str::FromStr>(name: &str, text: &str) -> Result<Option<T>, LineError> {
            if text.is_empty() {
                return Ok(None);
            }
            text.parse().map(Some).map_err(|_| LineError::Invalid(format!("bad {name} value {text:?}")))
        }
        let counts = match cell("counts") {
            "" => None,
            text => {
                let parts: Vec<&str> = text.split_whitespace().collect();
                if parts.len() != NUM_BINS {
                    return Err(LineError::FieldCount { expected: NUM_BINS, found: parts.len() });
                }
                let mut out = [0u64; NUM_BINS];
                for (k, v) in parts.iter().enumerate() {
                    out[k] = v.parse().map_err(|_| LineError::NotInteger { index: k, value: (*v).to_owned() })?;
                }
                Some(out)
            }
        };
        let f = |name: &str| opt::<f64>(name, cell(name));
        Ok(ResultRow {
            image_id: cell("image_id").to_owned(),
            counts,
            alpha: f("alpha")?,
            beta: f("beta")?,
            b: f("b")?,
            d: f("d")?,
            u: f("u")?,
            fit_emd: f("fit_emd")?,
            mean: f("mean")?,
            std: f("std")?,
            mad: f("mad")?,
            med: f("med")?,
            dud: f("dud")?,
            aesu: f("aesu")?,
            dip: f("dip")?,
            dip_p: f("dip_p")?,
            unimodal: opt("unimodal", cell("unimodal"))?,
            mode_count: opt("mode_count", cell("mode_count"))?,
            ternary_class: Some(cell("ternary_class").to_owned()).filter(|s| !s.is_empty()),
            ..ResultRow::default()
        })
    }
}

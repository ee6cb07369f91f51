//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use aesu_core::beta_model::FitOptions;
use aesu_core::decision::{
    classify, compute_center, simulate_recommendation, Candidate, RecommendationRule, TernaryCenter, TernaryClass,
    DEFAULT_THRESHOLD,
};
use aesu_core::distributions::mean_score;
use aesu_core::modality::{DipTestOptions, DEFAULT_BOOTSTRAP, DEFAULT_SIGNIFICANCE};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{analyze_corpus, AnalysisConfig};
use crate::error::{IngestError, Result};
use crate::evaluate::evaluate;
use crate::formats::{read_corpus, write_results, InputFormat, OutputFormat};
use crate::record::ImageRecord;
use crate::synth::{generate_synthetic, SyntheticSpec};

#[derive(Debug, Parser)]
#[command(name = "aesu", version, about = "Beta / subjective-logic analysis of aesthetic rating histograms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// ava, csv or jsonl; inferred from the extension when omitted
    #[arg(long)]
    pub format: Option<InputFormat>,
    /// Skip malformed lines with a warning instead of aborting
    #[arg(long)]
    pub skip_bad: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// jsonl or csv; inferred from the extension when omitted
    #[arg(long)]
    pub out_format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// EMD order of the fitting objective
    #[arg(long, default_value_t = 2.0)]
    pub emd_r: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (default: one per core)
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit beta shapes and opinions
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit, subjectivity measures and dip test
    Metrics {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
        boot: usize,
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE)]
        significance: f64,
    },
    /// Ternary pleasing / unpleasing / uncertain classification
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// auto (corpus medians), ava, or B,D,U
        #[arg(long, default_value = "auto")]
        center: String,
    },
    /// Recommendation simulation with satisfaction ratios
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value = "auto")]
        center: String,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u32,
        /// Comma-separated subset of binary,ternary
        #[arg(long, default_value = "binary,ternary")]
        rules: String,
        /// Summary JSON destination (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        raters: u64,
        #[arg(long, default_value = "2,20")]
        alpha_range: String,
        #[arg(long, default_value = "2,20")]
        beta_range: String,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare predictions against ground truth
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        pred_format: Option<InputFormat>,
        #[arg(long)]
        truth_format: Option<InputFormat>,
        #[command(flatten)]
        fit: FitArgs,
        /// Report JSON destination (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn infer_input_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("txt") => InputFormat::Ava,
        Some("csv") => InputFormat::Csv,
        _ => InputFormat::Jsonl,
    }
}

fn load(path: &Path, format: Option<InputFormat>, skip_bad: bool) -> Result<Vec<ImageRecord>> {
    let corpus = read_corpus(path, format.unwrap_or_else(|| infer_input_format(path)), skip_bad)?;
    for (line, err) in &corpus.skipped {
        eprintln!("warning: {}:{line}: skipped malformed line: {err}", path.display());
    }
    Ok(corpus.records)
}

fn store(records: &[ImageRecord], out: &OutputArgs) -> Result<()> {
    write_results(records, &out.out, out.out_format.unwrap_or_else(|| OutputFormat::from_path(&out.out)))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| IngestError::io(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| IngestError::io("<stdout>", e)),
    }
}

impl FitArgs {
    fn options(&self) -> Result<FitOptions> {
        if !(self.emd_r >= 1.0) {
            return Err(IngestError::Usage(format!("--emd-r must be >= 1, got {}", self.emd_r)));
        }
        Ok(FitOptions { emd_order: self.emd_r, seed: self.seed, ..FitOptions::default() })
    }
}

fn parse_pair(flag: &str, text: &str) -> Result<(f64, f64)> {
    let bad = || IngestError::Usage(format!("{flag} expects A,B, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// `auto` takes component medians over the given opinions.
pub fn parse_center(text: &str, records: &[ImageRecord]) -> Result<TernaryCenter> {
    match text {
        "auto" => {
            let opinions: Vec<_> = records.iter().filter_map(|r| r.opinion).collect();
            Ok(compute_center(&opinions)?)
        }
        "ava" => Ok(TernaryCenter::AVA_MEDIAN),
        _ => {
            let bad = || IngestError::Usage(format!("--center expects auto, ava or B,D,U, got {text:?}"));
            let parts = text.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>();
            match parts.as_deref() {
                Ok([b, d, u]) => TernaryCenter::new(*b, *d, *u).map_err(|_| bad()),
                _ => Err(bad()),
            }
        }
    }
}

fn parse_rules(text: &str) -> Result<Vec<RecommendationRule>> {
    let rules = text
        .split(',')
        .map(|r| r.trim().parse::<RecommendationRule>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| IngestError::Usage(format!("--rules expects binary and/or ternary, got {text:?}")))?;
    if rules.is_empty() {
        return Err(IngestError::Usage("--rules is empty".into()));
    }
    Ok(rules)
}

/// Makes sure every record has an opinion, fitting only where needed.
fn ensure_opinions(records: &mut [ImageRecord], fit: &FitArgs) -> Result<()> {
    let cfg = AnalysisConfig { fit: fit.options()?, refit: false, ..AnalysisConfig::default() };
    analyze_corpus(records, &cfg, fit.jobs)
}

#[derive(Debug, Serialize)]
struct CenterOut {
    b: f64,
    d: f64,
    u: f64,
}

#[derive(Debug, Serialize)]
struct RuleOut {
    rule: &'static str,
    recommended: usize,
    satisfaction_ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SimulationOut {
    n_images: usize,
    threshold: u32,
    center: CenterOut,
    rules: Vec<RuleOut>,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { input, fit, output } => {
            let mut records = load(&input.input, input.format, input.skip_bad)?;
            let cfg = AnalysisConfig { fit: fit.options()?, ..AnalysisConfig::default() };
            analyze_corpus(&mut records, &cfg, fit.jobs)?;
            store(&records, &output)
        }
        Command::Metrics { input, fit, output, boot, significance } => {
            if !(0.0..=1.0).contains(&significance) {
                return Err(IngestError::Usage("--significance must lie in [0, 1]".into()));
            }
            let mut records = load(&input.input, input.format, input.skip_bad)?;
            let cfg = AnalysisConfig {
                fit: fit.options()?,
                refit: true,
                report: true,
                dip: Some(DipTestOptions { bootstrap: boot, seed: fit.seed, significance }),
            };
            analyze_corpus(&mut records, &cfg, fit.jobs)?;
            store(&records, &output)
        }
        Command::Classify { input, fit, output, center } => {
            let mut records = load(&input.input, input.format, input.skip_bad)?;
            ensure_opinions(&mut records, &fit)?;
            let center = parse_center(&center, &records)?;
            let mut tally = [0usize; 3];
            for rec in &mut records {
                let class = classify(&rec.opinion.expect("ensured"), &center);
                tally[class as usize] += 1;
                rec.ternary_class = Some(class);
            }
            eprintln!(
                "center ({:.3}, {:.3}, {:.3}): {} {}, {} {}, {} {}",
                center.b_c,
                center.d_c,
                center.u_c,
                tally[TernaryClass::Pleasing as usize],
                TernaryClass::Pleasing,
                tally[TernaryClass::Unpleasing as usize],
                TernaryClass::Unpleasing,
                tally[TernaryClass::Uncertain as usize],
                TernaryClass::Uncertain,
            );
            store(&records, &output)
        }
        Command::Simulate { input, fit, center, threshold, rules, out } => {
            let rules = parse_rules(&rules)?;
            let mut records = load(&input.input, input.format, input.skip_bad)?;
            ensure_opinions(&mut records, &fit)?;
            let center = parse_center(&center, &records)?;
            let corpus: Vec<Candidate> = records
                .iter()
                .map(|r| Candidate {
                    distribution: r.distribution,
                    predicted_mean: r
                        .predicted_mean
                        .or(r.report.map(|x| x.mean))
                        .unwrap_or_else(|| mean_score(&r.distribution)),
                    predicted_opinion: r.opinion.expect("ensured"),
                })
                .collect();
            let outcomes = simulate_recommendation(&corpus, &center, &rules, threshold);
            if let Some(empty) = outcomes.iter().find(|o| o.satisfaction.is_none()) {
                return Err(IngestError::NoRecommendations(empty.rule.as_str()));
            }
            let summary = SimulationOut {
                n_images: records.len(),
                threshold,
                center: CenterOut { b: center.b_c, d: center.d_c, u: center.u_c },
                rules: outcomes
                    .iter()
                    .map(|o| RuleOut { rule: o.rule.as_str(), recommended: o.recommended, satisfaction_ratio: o.satisfaction })
                    .collect(),
            };
            emit_json(&summary, out.as_deref())
        }
        Command::Gen { n, raters, alpha_range, beta_range, noise, seed, output } => {
            let spec = SyntheticSpec {
                n_images: n,
                raters_per_image: raters,
                alpha_range: parse_pair("--alpha-range", &alpha_range)?,
                beta_range: parse_pair("--beta-range", &beta_range)?,
                vote_noise: noise,
                seed,
            };
            store(&generate_synthetic(&spec)?, &output)
        }
        Command::Eval { pred, truth, pred_format, truth_format, fit, out } => {
            let mut p = load(&pred, pred_format, false)?;
            let mut t = load(&truth, truth_format, false)?;
            ensure_opinions(&mut p, &fit)?;
            ensure_opinions(&mut t, &fit)?;
            emit_json(&evaluate(&p, &t)?, out.as_deref())
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 on input or usage errors, 2 on
/// internal errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("aesu: {e}");
            e.exit_code()
        }
    }
}

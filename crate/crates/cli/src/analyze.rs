//! The per-dataset analysis pipeline.
//!
//! One run splits the data into a training and a held-out portion, fits a
//! logistic model per group and a group-blind one under minimax
//! reweighting, then reports the worst-group risk gap between sharing and
//! splitting three ways: on held-out data (the headline number, which can
//! be negative), on the training data, and as a bracketing interval from
//! the finite-sample bounds. All bound inputs come from the thresholded
//! classifiers on the training portion, so the row is internally
//! consistent: `lambda`, `omega`, `tv_estimate`, and `disagreement_mean`
//! are exactly the pieces the printed bounds were assembled from.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use splitgain::{
    empirical_benefit_of_splitting, finite_sample_bounds, l1_risk, load_table, preprocess,
    sample_limited_splitting, train_group_blind, train_split, tv_exact_discrete, tv_variational,
    BoundConfig, Classifier, DivergenceEstimate, DivergenceMethod, EmpiricalDistribution, Error,
    GroupId, GroupedDataset, HypothesisClass, HypothesisFamily, LabeledSample, MinimaxConfig,
    PracticalOmega, PreprocessConfig, RawTable, TableFormat, TrainConfig, TvWitnessConfig,
};

use crate::{Result, Stage};

/// How the total-variation term is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TvChoice {
    /// Exact when every feature value in the dataset is 0 or 1, otherwise
    /// variational.
    #[default]
    Auto,
    /// Exact empirical total variation over observed feature atoms. Only
    /// meaningful on discrete features: continuous features make every
    /// atom unique and push the value to 1.
    Exact,
    /// Trained witness estimate; biased low rather than high.
    Variational,
}

/// Settings for one analysis run.
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Table format; `None` infers from the file extension (`.arff` means
    /// ARFF, anything else CSV). Only consulted by [`analyze_file`].
    pub format: Option<TableFormat>,
    pub preprocess: PreprocessConfig,
    /// Fraction of each group held back for the fresh-data gap estimate.
    pub holdout_fraction: f64,
    /// Bound confidence level.
    pub delta: f64,
    /// Replaces the linear class's dimension-based capacity in the
    /// complexity term.
    pub vc_override: Option<usize>,
    /// Drop the loosest bound terms; see the bound docs for what remains.
    pub practical_mode: bool,
    pub tv: TvChoice,
    /// Rescale features to zero mean and unit variance using statistics
    /// from the training portion only. Helps the solver on raw numeric
    /// columns; pointless on already-binary data, hence off by default.
    pub standardize: bool,
    /// Seed for the holdout split. Training, truncation, and witness
    /// seeds live in their own configs.
    pub seed: u64,
    pub train: TrainConfig,
    pub minimax: MinimaxConfig,
    pub witness: TvWitnessConfig,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            format: None,
            preprocess: PreprocessConfig::default(),
            holdout_fraction: 0.3,
            delta: 0.05,
            vc_override: None,
            practical_mode: false,
            tv: TvChoice::Auto,
            standardize: false,
            seed: 0,
            train: TrainConfig::default(),
            minimax: MinimaxConfig::default(),
            witness: TvWitnessConfig::default(),
        }
    }
}

/// One dataset's analysis: every number the summary report carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReportRow {
    pub name: String,
    /// Training samples from group 0; with `n1`, the counts behind
    /// `omega`.
    pub n0: usize,
    pub n1: usize,
    /// Worst-group risk gap between the shared and the split classifiers
    /// on held-out data. Negative means splitting looked worse there.
    pub epsilon_hat_split: f64,
    /// The held-out gap of the raw scores, before thresholding.
    pub epsilon_hat_split_soft: f64,
    /// The gap on the training data itself.
    pub epsilon_hat_empirical: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub tv_estimate: f64,
    /// "exact", "variational", or "analytic".
    pub tv_method: String,
    /// Mean over the two groups of the split classifiers' disagreement.
    pub disagreement_mean: f64,
    /// Average training risk of the split classifiers.
    pub lambda: f64,
    /// Finite-sample complexity term entering both bounds.
    pub omega: f64,
    /// "lower" when the lower bound is zero or negative, "upper" when the
    /// upper bound reaches 1; such bounds say nothing.
    pub vacuous_flags: Vec<String>,
}

/// A report row plus conditions worth printing to stderr.
#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub row: AnalysisReportRow,
    pub warnings: Vec<String>,
}

/// Loads, preprocesses, and analyzes one dataset file. The row is named
/// by the file stem.
pub fn analyze_file(path: &Path, opts: &AnalyzeOptions) -> Result<AnalysisOutcome> {
    let format = opts.format.unwrap_or_else(|| match path.extension() {
        Some(e) if e.eq_ignore_ascii_case("arff") => TableFormat::Arff,
        _ => TableFormat::Csv,
    });
    let table = load_table(path, format).stage("load")?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    analyze_table(&table, &name, opts)
}

/// Preprocesses a raw table and analyzes the result.
pub fn analyze_table(table: &RawTable, name: &str, opts: &AnalyzeOptions) -> Result<AnalysisOutcome> {
    let (data, prep) = preprocess(table, &opts.preprocess).stage("preprocess")?;
    let mut outcome = analyze_dataset(&data, name, opts)?;
    let mut warnings = prep.warnings;
    warnings.append(&mut outcome.warnings);
    outcome.warnings = warnings;
    Ok(outcome)
}

/// Analyzes an already-grouped dataset with exactly the groups 0 and 1.
pub fn analyze_dataset(
    data: &GroupedDataset,
    name: &str,
    opts: &AnalyzeOptions,
) -> Result<AnalysisOutcome> {
    let mut warnings = Vec::new();
    let all_binary = data
        .samples()
        .iter()
        .all(|s| s.features.iter().all(|&v| v == 0.0 || v == 1.0));

    let (train, holdout) = data
        .split_holdout(opts.holdout_fraction, opts.seed)
        .stage("split")?;
    let (train, holdout) = if opts.standardize {
        standardized(&train, &holdout).stage("split")?
    } else {
        (train, holdout)
    };

    let dim = train.dim();
    let mut class = HypothesisClass::new(HypothesisFamily::Linear { dim }).stage("train")?;
    if let Some(vc) = opts.vc_override {
        class = class.with_vc_dimension(vc).stage("train")?;
    }

    let mut split: BTreeMap<GroupId, Classifier> = BTreeMap::new();
    for &g in train.groups() {
        let fitted = train_split(&train, g, &class, &opts.train).stage("train")?;
        if !fitted.converged {
            warnings.push(format!("group {g} fit stopped before reaching tolerance"));
        }
        split.insert(g, fitted.classifier);
    }
    let blind = train_group_blind(&train, &class, &opts.minimax, &opts.train).stage("train")?;
    if !blind.converged {
        warnings.push("shared fit stopped before reaching tolerance".into());
    }

    let split_bin: BTreeMap<GroupId, Classifier> =
        split.iter().map(|(&g, h)| (g, h.binarized())).collect();
    let blind_bin = blind.classifier.binarized();

    let groups: Vec<GroupId> = holdout.groups().to_vec();
    let held_out = |h: &Classifier, g: GroupId| l1_risk(h, &holdout, g);
    let epsilon_hat_split =
        sample_limited_splitting(&blind_bin, &split_bin, &groups, held_out).stage("estimate")?;
    let epsilon_hat_split_soft =
        sample_limited_splitting(&blind.classifier, &split, &groups, held_out)
            .stage("estimate")?;
    let epsilon_hat_empirical =
        empirical_benefit_of_splitting(&blind_bin, &split_bin, &train).stage("estimate")?;

    let tv = estimate_tv(&train, all_binary, opts).stage("divergence")?;

    let missing = |g: GroupId| move || Error::MissingGroupClassifier(g);
    let h0 = split_bin.get(&0).ok_or_else(missing(0)).stage("bounds")?;
    let h1 = split_bin.get(&1).ok_or_else(missing(1)).stage("bounds")?;
    let cfg = BoundConfig {
        delta: opts.delta,
        vc_dimension: class.vc_dimension,
        practical_mode: opts.practical_mode,
        practical_omega: PracticalOmega::default(),
    };
    let analysis = finite_sample_bounds(h0, h1, &train, &tv, &cfg).stage("bounds")?;

    let mut vacuous_flags = Vec::new();
    if analysis.lower_is_vacuous() {
        vacuous_flags.push("lower".to_string());
    }
    if analysis.upper_bound >= 1.0 {
        vacuous_flags.push("upper".to_string());
    }
    let row = AnalysisReportRow {
        name: name.to_string(),
        n0: analysis.group_sizes[&0],
        n1: analysis.group_sizes[&1],
        epsilon_hat_split,
        epsilon_hat_split_soft,
        epsilon_hat_empirical,
        upper_bound: analysis.upper_bound,
        lower_bound: analysis.lower_bound,
        tv_estimate: analysis.components.tv_estimate.value,
        tv_method: method_name(analysis.components.tv_estimate.method).to_string(),
        disagreement_mean: 0.5 * analysis.components.disagreement_per_group.values().sum::<f64>(),
        lambda: analysis.components.lambda,
        omega: analysis.components.omega,
        vacuous_flags,
    };
    Ok(AnalysisOutcome { row, warnings })
}

fn method_name(method: DivergenceMethod) -> &'static str {
    match method {
        DivergenceMethod::ExactDiscrete => "exact",
        DivergenceMethod::Variational => "variational",
        DivergenceMethod::Analytic => "analytic",
    }
}

fn estimate_tv(
    train: &GroupedDataset,
    all_binary: bool,
    opts: &AnalyzeOptions,
) -> splitgain::Result<DivergenceEstimate> {
    let exact = match opts.tv {
        TvChoice::Exact => true,
        TvChoice::Variational => false,
        TvChoice::Auto => all_binary,
    };
    let f0 = train.group_features(0)?;
    let f1 = train.group_features(1)?;
    if exact {
        let p0 = EmpiricalDistribution::from_samples(&f0)?;
        let p1 = EmpiricalDistribution::from_samples(&f1)?;
        Ok(tv_exact_discrete(&p0, &p1))
    } else {
        tv_variational(&f0, &f1, &opts.witness)
    }
}

/// Affine-rescales both portions using the training portion's per-feature
/// mean and standard deviation; constant features are left centered.
fn standardized(
    train: &GroupedDataset,
    holdout: &GroupedDataset,
) -> splitgain::Result<(GroupedDataset, GroupedDataset)> {
    let dim = train.dim();
    let n = train.len() as f64;
    let mut mean = vec![0.0; dim];
    for s in train.samples() {
        for (m, &x) in mean.iter_mut().zip(&s.features) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut scale = vec![0.0; dim];
    for s in train.samples() {
        for ((v, &x), m) in scale.iter_mut().zip(&s.features).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    for v in &mut scale {
        let sd = (*v / n).sqrt();
        *v = if sd.is_finite() && sd > 0.0 { sd } else { 1.0 };
    }

    let apply = |portion: &GroupedDataset| -> splitgain::Result<GroupedDataset> {
        let samples = portion
            .samples()
            .iter()
            .map(|s| {
                let features = s
                    .features
                    .iter()
                    .zip(&mean)
                    .zip(&scale)
                    .map(|((&x, m), sd)| (x - m) / sd)
                    .collect();
                LabeledSample::new(features, s.label, s.group)
            })
            .collect::<splitgain::Result<Vec<_>>>()?;
        GroupedDataset::new(samples)
    };
    Ok((apply(train)?, apply(holdout)?))
}

//! Trainers for the split and group-blind models.
//!
//! Linear classes are fit by regularized logistic regression; threshold,
//! interval, and finite families are minimized exactly by enumeration.
//! [`train_split`] fits one group's own model, [`train_group_blind`] picks
//! a single shared model by searching a grid of group reweightings, and
//! [`exact_minimax`] minimizes the worst-group empirical risk directly
//! where the family permits it.

mod enumerate;
mod logistic;

pub(crate) use enumerate::{search, SearchObjective};

use std::collections::BTreeMap;

use crate::classifier::{Classifier, HypothesisClass, HypothesisFamily};
use crate::data::{GroupId, GroupedDataset};
use crate::error::{Error, Result};
use crate::risk::l1_risk;

/// Optimizer settings shared by every trainer.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Cost multiplier on the data term of logistic fits, balanced against
    /// a fixed `0.5 * ||w||^2` penalty on the weights (the bias is never
    /// penalized). Larger values fit the data harder. Exact enumeration
    /// ignores it.
    pub regularization_strength: f64,
    /// Iteration cap for gradient descent.
    pub max_iterations: usize,
    /// Gradient norm below which a logistic fit counts as converged.
    pub tolerance: f64,
    /// Seed for the fold assignment in cross-validated searches.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            regularization_strength: 1.0,
            max_iterations: 1000,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.regularization_strength.is_finite() && self.regularization_strength > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "regularization strength must be positive, got {}",
                self.regularization_strength
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "need at least one optimizer iteration".into(),
            ));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// How the group-blind search scores a candidate weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightSelection {
    /// Pick the weighting with the smallest cross-validated worst-group
    /// risk, breaking ties toward the earliest grid entry.
    #[default]
    MinMaxGroupCvLoss,
}

/// Settings for the group-blind reweighting search.
#[derive(Debug, Clone)]
pub struct MinimaxConfig {
    /// Candidate weights for the lowest-numbered group when the data has
    /// exactly two groups (the other group gets the complement). With three
    /// or more groups this grid is ignored and a fixed simplex grid of
    /// resolution 0.1 is scanned instead.
    pub weight_grid: Vec<f64>,
    /// Cross-validation folds, stratified by group.
    pub folds: usize,
    pub selection: WeightSelection,
}

impl Default for MinimaxConfig {
    fn default() -> Self {
        Self {
            weight_grid: (0..=20).map(|k| k as f64 / 20.0).collect(),
            folds: 5,
            selection: WeightSelection::MinMaxGroupCvLoss,
        }
    }
}

/// A fitted classifier plus whether the optimizer met its tolerance.
/// Exact enumeration always converges.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub classifier: Classifier,
    pub converged: bool,
}

/// Outcome of [`train_group_blind`].
#[derive(Debug, Clone)]
pub struct BlindOutcome {
    /// The shared model, retrained on all data under the selected weights.
    pub classifier: Classifier,
    pub converged: bool,
    /// Selected weight per group; the weights sum to one.
    pub weights: BTreeMap<GroupId, f64>,
    /// Cross-validated worst-group risk the selected weights achieved.
    pub cv_worst_risk: f64,
}

/// Fits the class to one group's samples alone.
pub fn train_split(
    data: &GroupedDataset,
    group: GroupId,
    class: &HypothesisClass,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let indices = data.group_indices(group)?.to_vec();
    match &class.family {
        HypothesisFamily::Linear { dim } => {
            check_dim(*dim, data.dim())?;
            let mut features = Vec::with_capacity(indices.len());
            let mut labels = Vec::with_capacity(indices.len());
            for &i in &indices {
                let s = &data.samples()[i];
                features.push(s.features.as_slice());
                labels.push(f64::from(s.label));
            }
            let multipliers = vec![1.0; features.len()];
            Ok(logistic_outcome(logistic::fit(
                &features,
                &labels,
                &multipliers,
                cfg,
            )))
        }
        family => {
            let own = data.subset(&indices)?;
            let (classifier, _) = search(&own, family, SearchObjective::SingleGroup(group))?;
            Ok(TrainOutcome {
                classifier,
                converged: true,
            })
        }
    }
}

/// Minimizes the weighted sum of per-group empirical risks. `weights` must
/// assign a finite nonnegative weight to every group in the data; entries
/// for absent groups are ignored. For logistic fits the weights become
/// per-sample loss multipliers `n * W_g / n_g`, so equal weights on equally
/// sized groups reduce to the plain pooled fit.
pub fn weighted_erm(
    data: &GroupedDataset,
    class: &HypothesisClass,
    weights: &BTreeMap<GroupId, f64>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    match &class.family {
        HypothesisFamily::Linear { dim } => {
            check_dim(*dim, data.dim())?;
            let sizes = data.group_sizes();
            for &g in data.groups() {
                match weights.get(&g) {
                    None => {
                        return Err(Error::InvalidParameter(format!(
                            "no weight supplied for group {g}"
                        )))
                    }
                    Some(w) if !w.is_finite() || *w < 0.0 => {
                        return Err(Error::InvalidParameter(format!(
                            "group weights must be finite and nonnegative, got {w}"
                        )))
                    }
                    _ => {}
                }
            }
            let n = data.len() as f64;
            let mut features = Vec::with_capacity(data.len());
            let mut labels = Vec::with_capacity(data.len());
            let mut multipliers = Vec::with_capacity(data.len());
            for s in data.samples() {
                features.push(s.features.as_slice());
                labels.push(f64::from(s.label));
                multipliers.push(n * weights[&s.group] / sizes[&s.group] as f64);
            }
            Ok(logistic_outcome(logistic::fit(
                &features,
                &labels,
                &multipliers,
                cfg,
            )))
        }
        family => {
            let (classifier, _) = search(data, family, SearchObjective::Weighted(weights))?;
            Ok(TrainOutcome {
                classifier,
                converged: true,
            })
        }
    }
}

/// Trains one shared model for all groups by scanning a grid of group
/// weightings: each candidate weighting is scored by cross-validated
/// worst-group risk, the best weighting is retrained on all data, and ties
/// go to the earliest grid entry. Deterministic given `cfg.seed`.
pub fn train_group_blind(
    data: &GroupedDataset,
    class: &HypothesisClass,
    minimax: &MinimaxConfig,
    cfg: &TrainConfig,
) -> Result<BlindOutcome> {
    cfg.validate()?;
    let mut ids: Vec<GroupId> = data.groups().to_vec();
    ids.sort_unstable();
    if ids.len() < 2 {
        return Err(Error::InvalidParameter(
            "group-blind training needs at least two groups".into(),
        ));
    }
    let grid = weight_maps(&ids, minimax)?;

    let folds = data.stratified_folds(minimax.folds, cfg.seed)?;
    let mut splits = Vec::with_capacity(folds.len());
    for held in &folds {
        let mut train_idx: Vec<usize> = Vec::with_capacity(data.len() - held.len());
        for other in &folds {
            if !std::ptr::eq(other, held) {
                train_idx.extend_from_slice(other);
            }
        }
        train_idx.sort_unstable();
        splits.push((data.subset(&train_idx)?, data.subset(held)?));
    }

    let WeightSelection::MinMaxGroupCvLoss = minimax.selection;
    let mut best: Option<(usize, f64)> = None;
    for (slot, weights) in grid.iter().enumerate() {
        let mut totals: BTreeMap<GroupId, f64> = ids.iter().map(|&g| (g, 0.0)).collect();
        for (train, eval) in &splits {
            let fitted = weighted_erm(train, class, weights, cfg)?;
            for (&g, total) in totals.iter_mut() {
                *total += l1_risk(&fitted.classifier, eval, g)?;
            }
        }
        let worst = totals
            .values()
            .fold(f64::NEG_INFINITY, |m, &t| m.max(t / splits.len() as f64));
        if best.map_or(true, |(_, b)| worst < b) {
            best = Some((slot, worst));
        }
    }
    let (slot, cv_worst_risk) = best.expect("weight grid is nonempty");
    let weights = grid[slot].clone();
    let fitted = weighted_erm(data, class, &weights, cfg)?;
    Ok(BlindOutcome {
        classifier: fitted.classifier,
        converged: fitted.converged,
        weights,
        cv_worst_risk,
    })
}

/// Minimizes the worst-group empirical risk exactly. Only enumerable
/// families support this; linear classes report
/// [`Error::EnumerationUnsupported`].
pub fn exact_minimax(data: &GroupedDataset, class: &HypothesisClass) -> Result<Classifier> {
    let (classifier, _) = search(data, &class.family, SearchObjective::WorstGroup)?;
    Ok(classifier)
}

fn logistic_outcome(fit: logistic::LogisticFit) -> TrainOutcome {
    TrainOutcome {
        classifier: Classifier::LinearLogistic {
            weights: fit.weights,
            bias: fit.bias,
        },
        converged: fit.converged,
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// The candidate weightings scanned by the group-blind search, in scan
/// order: the configured grid over two groups, or every point of the
/// 0.1-resolution simplex grid for more.
fn weight_maps(ids: &[GroupId], minimax: &MinimaxConfig) -> Result<Vec<BTreeMap<GroupId, f64>>> {
    if ids.len() == 2 {
        if minimax.weight_grid.is_empty() {
            return Err(Error::EmptyInput("weight grid has no entries".into()));
        }
        minimax
            .weight_grid
            .iter()
            .map(|&w| {
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidParameter(format!(
                        "grid weights must lie in [0, 1], got {w}"
                    )));
                }
                Ok([(ids[0], w), (ids[1], 1.0 - w)].into_iter().collect())
            })
            .collect()
    } else {
        const STEPS: usize = 10;
        let mut maps = Vec::new();
        let mut point = vec![0usize; ids.len()];
        simplex_points(STEPS, 0, &mut point, &mut |point: &[usize]| {
            maps.push(
                ids.iter()
                    .zip(point)
                    .map(|(&g, &k)| (g, k as f64 / STEPS as f64))
                    .collect(),
            );
        });
        Ok(maps)
    }
}

/// Visits every composition of `remaining` into `point[at..]` slots, in
/// lexicographic order.
fn simplex_points(remaining: usize, at: usize, point: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if at == point.len() - 1 {
        point[at] = remaining;
        visit(point);
        return;
    }
    for k in 0..=remaining {
        point[at] = k;
        simplex_points(remaining - k, at + 1, point, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LabeledSample;
    use crate::risk::l1_report;

    fn one_dim(rows: &[(f64, u8, GroupId)]) -> GroupedDataset {
        GroupedDataset::new(
            rows.iter()
                .map(|&(x, y, g)| LabeledSample::new(vec![x], y, g).unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// Two interleaved one-dimensional groups whose labels flip at
    /// different cut points.
    fn shifted_cuts() -> GroupedDataset {
        let mut rows = Vec::new();
        for i in 0..20 {
            let x = -2.0 + 0.2 * i as f64;
            rows.push((x, u8::from(x > 0.0), 0));
            rows.push((x, u8::from(x > 0.8), 1));
        }
        one_dim(&rows)
    }

    #[test]
    fn split_training_fits_each_group_exactly() {
        let data = shifted_cuts();
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let cfg = TrainConfig::default();
        for g in [0, 1] {
            let out = train_split(&data, g, &class, &cfg).unwrap();
            assert!(out.converged);
            assert_eq!(l1_risk(&out.classifier, &data, g).unwrap(), 0.0);
        }
    }

    #[test]
    fn split_training_ignores_other_groups() {
        // Group 1's samples sit inside group 0's range with flipped labels;
        // a fit on group 0 alone must not pay anything for them.
        let data = one_dim(&[
            (-2.0, 0, 0),
            (-1.0, 0, 0),
            (1.0, 1, 0),
            (2.0, 1, 0),
            (-1.5, 1, 1),
            (1.5, 0, 1),
        ]);
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let out = train_split(&data, 0, &class, &TrainConfig::default()).unwrap();
        assert_eq!(l1_risk(&out.classifier, &data, 0).unwrap(), 0.0);
    }

    #[test]
    fn logistic_split_reaches_low_training_risk_when_separable() {
        let rows: Vec<(f64, u8, GroupId)> = (0..100)
            .map(|i| {
                let x = if i % 2 == 0 { -2.0 - 0.01 * i as f64 } else { 2.0 + 0.01 * i as f64 };
                (x, u8::from(x > 0.0), 0)
            })
            .collect();
        let data = one_dim(&rows);
        let class = HypothesisClass::new(HypothesisFamily::Linear { dim: 1 }).unwrap();
        let cfg = TrainConfig {
            regularization_strength: 100.0,
            ..TrainConfig::default()
        };
        let out = train_split(&data, 0, &class, &cfg).unwrap();
        let risk = l1_risk(&out.classifier, &data, 0).unwrap();
        assert!(risk <= 0.05, "training risk {risk} too high");
    }

    #[test]
    fn equal_weights_match_pooled_training() {
        // With both groups weighted 1/2 and equal sizes, the weighted fit
        // must coincide with plain pooled training (every multiplier is 1).
        let data = shifted_cuts();
        let pooled = one_dim(
            &data
                .samples()
                .iter()
                .map(|s| (s.features[0], s.label, 0))
                .collect::<Vec<_>>(),
        );
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let cfg = TrainConfig::default();
        let weights: BTreeMap<GroupId, f64> = [(0, 0.5), (1, 0.5)].into_iter().collect();
        let weighted = weighted_erm(&data, &class, &weights, &cfg).unwrap();
        let plain = train_split(&pooled, 0, &class, &cfg).unwrap();
        assert_eq!(weighted.classifier, plain.classifier);

        let linear = HypothesisClass::new(HypothesisFamily::Linear { dim: 1 }).unwrap();
        let weighted = weighted_erm(&data, &linear, &weights, &cfg).unwrap();
        let plain = train_split(&pooled, 0, &linear, &cfg).unwrap();
        assert_eq!(weighted.classifier, plain.classifier);
    }

    #[test]
    fn weighted_training_favors_the_heavy_group() {
        // The groups want opposite thresholds, so the winning cut follows
        // the weights.
        let data = shifted_cuts();
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let cfg = TrainConfig::default();
        let lean0: BTreeMap<GroupId, f64> = [(0, 0.9), (1, 0.1)].into_iter().collect();
        let lean1: BTreeMap<GroupId, f64> = [(0, 0.1), (1, 0.9)].into_iter().collect();
        let h0 = weighted_erm(&data, &class, &lean0, &cfg).unwrap().classifier;
        let h1 = weighted_erm(&data, &class, &lean1, &cfg).unwrap().classifier;
        assert!(l1_risk(&h0, &data, 0).unwrap() < l1_risk(&h1, &data, 0).unwrap());
        assert!(l1_risk(&h1, &data, 1).unwrap() < l1_risk(&h0, &data, 1).unwrap());
    }

    #[test]
    fn group_blind_search_is_deterministic() {
        let data = shifted_cuts();
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let cfg = TrainConfig::default();
        let minimax = MinimaxConfig::default();
        let a = train_group_blind(&data, &class, &minimax, &cfg).unwrap();
        let b = train_group_blind(&data, &class, &minimax, &cfg).unwrap();
        assert_eq!(a.classifier, b.classifier);
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.cv_worst_risk, b.cv_worst_risk);
        let total: f64 = a.weights.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn group_blind_beats_the_worst_unweighted_extreme() {
        // Weighting everything onto one group leaves the other group's cut
        // badly placed; the searched weighting should do no worse than the
        // better of the two extremes on the worst group.
        let data = shifted_cuts();
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let cfg = TrainConfig::default();
        let blind = train_group_blind(&data, &class, &MinimaxConfig::default(), &cfg).unwrap();
        let report = l1_report(&blind.classifier, &data).unwrap();
        let blind_worst = report.worst_group();

        let mut extreme_worsts = Vec::new();
        for (a, b) in [(1.0, 0.0), (0.0, 1.0)] {
            let weights: BTreeMap<GroupId, f64> = [(0, a), (1, b)].into_iter().collect();
            let h = weighted_erm(&data, &class, &weights, &cfg).unwrap().classifier;
            let worst = l1_report(&h, &data).unwrap().worst_group();
            extreme_worsts.push(worst);
        }
        let best_extreme = extreme_worsts.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(blind_worst <= best_extreme + 1e-12);
    }

    #[test]
    fn single_entry_grid_pins_the_weights() {
        let data = shifted_cuts();
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let cfg = TrainConfig::default();
        let minimax = MinimaxConfig {
            weight_grid: vec![0.5],
            ..MinimaxConfig::default()
        };
        let blind = train_group_blind(&data, &class, &minimax, &cfg).unwrap();
        assert_eq!(blind.weights[&0], 0.5);
        assert_eq!(blind.weights[&1], 0.5);

        // A pinned 1/2 weighting is exactly pooled training.
        let weights: BTreeMap<GroupId, f64> = [(0, 0.5), (1, 0.5)].into_iter().collect();
        let pooled = weighted_erm(&data, &class, &weights, &cfg).unwrap();
        assert_eq!(blind.classifier, pooled.classifier);
    }

    #[test]
    fn three_groups_scan_the_simplex_grid() {
        let mut rows = Vec::new();
        for i in 0..10 {
            let x = i as f64;
            rows.push((x, u8::from(x > 2.0), 0));
            rows.push((x, u8::from(x > 5.0), 1));
            rows.push((x, u8::from(x > 7.0), 2));
        }
        let data = one_dim(&rows);
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let blind =
            train_group_blind(&data, &class, &MinimaxConfig::default(), &TrainConfig::default())
                .unwrap();
        assert_eq!(blind.weights.len(), 3);
        let total: f64 = blind.weights.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for w in blind.weights.values() {
            assert!((0.0..=1.0).contains(w));
        }
    }

    #[test]
    fn exact_minimax_finds_the_balanced_cut() {
        // Group 0 flips its labels at 0, group 1 at 0.8. Any single
        // threshold pays on one group; the exact search balances them.
        let data = shifted_cuts();
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let h = exact_minimax(&data, &class).unwrap();
        let worst = l1_report(&h, &data).unwrap().worst_group();
        // Cuts between 0 and 0.8 misclassify at most the 4 in-between
        // samples of one group; anything else pays more.
        assert!(worst <= 4.0 / 20.0 + 1e-12);

        let linear = HypothesisClass::new(HypothesisFamily::Linear { dim: 1 }).unwrap();
        assert!(matches!(
            exact_minimax(&data, &linear),
            Err(Error::EnumerationUnsupported)
        ));
    }

    #[test]
    fn too_few_samples_for_folds_is_an_error() {
        let data = one_dim(&[(0.0, 0, 0), (1.0, 1, 0), (0.0, 1, 1), (1.0, 0, 1)]);
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let err = train_group_blind(
            &data,
            &class,
            &MinimaxConfig::default(),
            &TrainConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples { .. }));
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let data = one_dim(&[(0.0, 0, 0), (1.0, 1, 0)]);
        let class = HypothesisClass::new(HypothesisFamily::ThresholdPair).unwrap();
        let bad = TrainConfig {
            regularization_strength: 0.0,
            ..TrainConfig::default()
        };
        assert!(train_split(&data, 0, &class, &bad).is_err());
        let bad = TrainConfig {
            tolerance: f64::NAN,
            ..TrainConfig::default()
        };
        assert!(train_split(&data, 0, &class, &bad).is_err());
    }

    #[test]
    fn simplex_grid_enumerates_every_composition() {
        let ids = vec![0, 1, 2];
        let maps = weight_maps(&ids, &MinimaxConfig::default()).unwrap();
        // Compositions of 10 into 3 parts: C(12, 2) = 66.
        assert_eq!(maps.len(), 66);
        assert_eq!(maps[0][&0], 0.0);
        assert_eq!(maps[0][&2], 1.0);
        for m in &maps {
            let total: f64 = m.values().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

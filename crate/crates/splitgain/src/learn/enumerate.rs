//! Exact empirical-risk search over enumerable hypothesis families.
//!
//! One-dimensional families are searched over cut points: the midpoints
//! between consecutive distinct sample values, plus both infinities, which
//! is enough to realize every achievable labeling. Per-candidate risks come
//! from per-group prefix counts, so thresholds cost O(m) and intervals
//! O(m^2) over m distinct values. Ties are broken by the first candidate in
//! a fixed scan order, making every search deterministic.

use std::collections::BTreeMap;

use crate::classifier::{Classifier, HypothesisFamily};
use crate::data::{GroupId, GroupedDataset};
use crate::error::{Error, Result};
use crate::risk::l1_risk;

/// What the search minimizes, given per-group empirical risks.
#[derive(Debug, Clone, Copy)]
pub(crate) enum SearchObjective<'a> {
    /// Risk on a single group (per-group training).
    SingleGroup(GroupId),
    /// Weighted sum of per-group risks (the reweighting dual).
    Weighted(&'a BTreeMap<GroupId, f64>),
    /// Largest per-group risk (exact minimax).
    WorstGroup,
}

/// Exhaustive minimization of `objective` over `family`.
/// Returns the first minimizer in scan order and its objective value.
pub(crate) fn search(
    data: &GroupedDataset,
    family: &HypothesisFamily,
    objective: SearchObjective<'_>,
) -> Result<(Classifier, f64)> {
    validate_objective(data, &objective)?;
    match family {
        HypothesisFamily::Linear { .. } => Err(Error::EnumerationUnsupported),
        HypothesisFamily::FiniteEnumeration(candidates) => {
            search_finite(data, candidates, objective)
        }
        HypothesisFamily::ThresholdPair => {
            let profile = Profile::build(data)?;
            Ok(search_thresholds(&profile, objective))
        }
        HypothesisFamily::Interval => {
            let profile = Profile::build(data)?;
            Ok(search_intervals(&profile, objective))
        }
    }
}

fn validate_objective(data: &GroupedDataset, objective: &SearchObjective<'_>) -> Result<()> {
    match objective {
        SearchObjective::SingleGroup(g) => {
            data.group_size(*g)?;
        }
        SearchObjective::Weighted(weights) => {
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
        }
        SearchObjective::WorstGroup => {}
    }
    Ok(())
}

fn search_finite(
    data: &GroupedDataset,
    candidates: &[Classifier],
    objective: SearchObjective<'_>,
) -> Result<(Classifier, f64)> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("enumeration has no candidates".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    let mut risks = Vec::with_capacity(data.groups().len());
    for (idx, h) in candidates.iter().enumerate() {
        risks.clear();
        for &g in data.groups() {
            risks.push((g, l1_risk(h, data, g)?));
        }
        let value = combine(&risks, &objective);
        if best.map_or(true, |(_, b)| value < b) {
            best = Some((idx, value));
        }
    }
    let (idx, value) = best.expect("nonempty candidate list");
    Ok((candidates[idx].clone(), value))
}

fn combine(risks: &[(GroupId, f64)], objective: &SearchObjective<'_>) -> f64 {
    match objective {
        SearchObjective::SingleGroup(g) => {
            risks
                .iter()
                .find(|(rg, _)| rg == g)
                .map(|(_, r)| *r)
                .expect("group validated")
        }
        SearchObjective::Weighted(weights) => risks
            .iter()
            .map(|(g, r)| weights.get(g).copied().unwrap_or(0.0) * r)
            .sum(),
        SearchObjective::WorstGroup => {
            risks.iter().fold(f64::NEG_INFINITY, |m, (_, r)| m.max(*r))
        }
    }
}

/// Prefix-count profile of a one-dimensional dataset.
///
/// `cuts[0] = -inf`, `cuts[m] = +inf`, and `cuts[t]` for `0 < t < m` sits
/// strictly between the t-th and (t+1)-th distinct value. For group slot s,
/// `ones[s][t]` counts label-1 samples at or below cut t (and `zeros`
/// likewise), so every candidate risk is two array lookups.
struct Profile {
    groups: Vec<GroupId>,
    cuts: Vec<f64>,
    ones: Vec<Vec<f64>>,
    zeros: Vec<Vec<f64>>,
    n: Vec<f64>,
}

impl Profile {
    fn build(data: &GroupedDataset) -> Result<Self> {
        if data.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: data.dim(),
            });
        }
        let mut values: Vec<f64> = data.samples().iter().map(|s| s.features[0]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let m = values.len();

        let mut cuts = Vec::with_capacity(m + 1);
        cuts.push(f64::NEG_INFINITY);
        for t in 1..m {
            cuts.push(values[t - 1] / 2.0 + values[t] / 2.0);
        }
        cuts.push(f64::INFINITY);

        let groups: Vec<GroupId> = data.groups().to_vec();
        let slot: BTreeMap<GroupId, usize> =
            groups.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut ones = vec![vec![0.0; m + 1]; groups.len()];
        let mut zeros = vec![vec![0.0; m + 1]; groups.len()];
        for s in data.samples() {
            let t = values.partition_point(|v| *v < s.features[0]); // 0-based value index
            let arr = if s.label == 1 { &mut ones } else { &mut zeros };
            arr[slot[&s.group]][t + 1] += 1.0;
        }
        for arrs in [&mut ones, &mut zeros] {
            for arr in arrs.iter_mut() {
                for t in 1..=m {
                    arr[t] += arr[t - 1];
                }
            }
        }
        let n = groups
            .iter()
            .enumerate()
            .map(|(i, _)| ones[i][m] + zeros[i][m])
            .collect();
        Ok(Self {
            groups,
            cuts,
            ones,
            zeros,
            n,
        })
    }

    fn risks_threshold_above(&self, t: usize, out: &mut Vec<(GroupId, f64)>) {
        out.clear();
        let m = self.cuts.len() - 1;
        for (s, &g) in self.groups.iter().enumerate() {
            let errors = self.ones[s][t] + (self.zeros[s][m] - self.zeros[s][t]);
            out.push((g, errors / self.n[s]));
        }
    }

    fn risks_threshold_below(&self, t: usize, out: &mut Vec<(GroupId, f64)>) {
        out.clear();
        let m = self.cuts.len() - 1;
        for (s, &g) in self.groups.iter().enumerate() {
            let errors = self.zeros[s][t] + (self.ones[s][m] - self.ones[s][t]);
            out.push((g, errors / self.n[s]));
        }
    }

    fn risks_interval(&self, lo: usize, hi: usize, out: &mut Vec<(GroupId, f64)>) {
        out.clear();
        let m = self.cuts.len() - 1;
        for (s, &g) in self.groups.iter().enumerate() {
            let inside_ones = self.ones[s][hi] - self.ones[s][lo];
            let inside_zeros = self.zeros[s][hi] - self.zeros[s][lo];
            let errors = (self.ones[s][m] - inside_ones) + inside_zeros;
            out.push((g, errors / self.n[s]));
        }
    }
}

fn search_thresholds(profile: &Profile, objective: SearchObjective<'_>) -> (Classifier, f64) {
    let m = profile.cuts.len() - 1;
    let mut risks = Vec::with_capacity(profile.groups.len());
    let mut best: Option<(Classifier, f64)> = None;
    for t in 0..=m {
        profile.risks_threshold_above(t, &mut risks);
        let value = combine(&risks, &objective);
        if best.as_ref().map_or(true, |(_, b)| value < *b) {
            best = Some((Classifier::ThresholdAbove { a: profile.cuts[t] }, value));
        }
    }
    for t in 0..=m {
        profile.risks_threshold_below(t, &mut risks);
        let value = combine(&risks, &objective);
        if best.as_ref().map_or(true, |(_, b)| value < *b) {
            best = Some((Classifier::ThresholdBelow { b: profile.cuts[t] }, value));
        }
    }
    best.expect("threshold scan is nonempty")
}

fn search_intervals(profile: &Profile, objective: SearchObjective<'_>) -> (Classifier, f64) {
    let m = profile.cuts.len() - 1;
    let mut risks = Vec::with_capacity(profile.groups.len());
    let mut best: Option<(usize, usize, f64)> = None;
    for lo in 0..=m {
        for hi in lo..=m {
            profile.risks_interval(lo, hi, &mut risks);
            let value = combine(&risks, &objective);
            if best.map_or(true, |(_, _, b)| value < b) {
                best = Some((lo, hi, value));
            }
        }
    }
    let (lo, hi, value) = best.expect("interval scan is nonempty");
    (
        Classifier::Interval {
            a: profile.cuts[lo],
            b: profile.cuts[hi],
        },
        value,
    )
}

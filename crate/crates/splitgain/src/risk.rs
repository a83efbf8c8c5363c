//! Per-group risk functionals.
//!
//! All three operations average over one group's samples: the l1 risk
//! `mean |h(x) - y|`, the l2 risk `sqrt(mean (h(x) - y)^2)`, and the
//! disagreement `mean |h1(x) - h0(x)|` between two classifiers. For binary
//! classifiers the l1 risk coincides with the misclassification rate.
//! Sums are compensated so results do not drift with group size or sample
//! order.

use std::collections::BTreeMap;

use crate::classifier::Classifier;
use crate::data::{GroupId, GroupedDataset};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    L1,
    L2,
}

/// Risks of one classifier on every group of a dataset.
#[derive(Debug, Clone)]
pub struct RiskReport {
    pub per_group: BTreeMap<GroupId, f64>,
    pub loss: LossKind,
}

impl RiskReport {
    /// Largest per-group risk, the quantity minimax training drives down.
    pub fn worst_group(&self) -> f64 {
        self.per_group.values().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

/// Mean absolute deviation between scores and labels on one group.
pub fn l1_risk(h: &Classifier, data: &GroupedDataset, group: GroupId) -> Result<f64> {
    let mut total = CompensatedSum::new();
    let mut n = 0usize;
    for s in data.iter_group(group)? {
        total.add((h.score(&s.features)? - s.label as f64).abs());
        n += 1;
    }
    Ok(total.value() / n as f64)
}

/// Root mean squared deviation between scores and labels on one group.
pub fn l2_risk(h: &Classifier, data: &GroupedDataset, group: GroupId) -> Result<f64> {
    let mut total = CompensatedSum::new();
    let mut n = 0usize;
    for s in data.iter_group(group)? {
        let d = h.score(&s.features)? - s.label as f64;
        total.add(d * d);
        n += 1;
    }
    Ok((total.value() / n as f64).sqrt())
}

/// Mean absolute score difference between two classifiers on one group.
pub fn disagreement(
    h0: &Classifier,
    h1: &Classifier,
    data: &GroupedDataset,
    group: GroupId,
) -> Result<f64> {
    let mut total = CompensatedSum::new();
    let mut n = 0usize;
    for s in data.iter_group(group)? {
        total.add((h1.score(&s.features)? - h0.score(&s.features)?).abs());
        n += 1;
    }
    Ok(total.value() / n as f64)
}

/// l1 risks of `h` on every group.
pub fn l1_report(h: &Classifier, data: &GroupedDataset) -> Result<RiskReport> {
    let mut per_group = BTreeMap::new();
    for &g in data.groups() {
        per_group.insert(g, l1_risk(h, data, g)?);
    }
    Ok(RiskReport {
        per_group,
        loss: LossKind::L1,
    })
}

/// l2 risks of `h` on every group.
pub fn l2_report(h: &Classifier, data: &GroupedDataset) -> Result<RiskReport> {
    let mut per_group = BTreeMap::new();
    for &g in data.groups() {
        per_group.insert(g, l2_risk(h, data, g)?);
    }
    Ok(RiskReport {
        per_group,
        loss: LossKind::L2,
    })
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of values.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

//! Sample containers and the atom key used for discrete distributions.
//!
//! A [`GroupedDataset`] holds labeled feature vectors partitioned by a
//! protected group id. Group ids are dense small integers assigned in
//! first-appearance order at ingestion; everything downstream (risk
//! functionals, trainers, bound computations) addresses groups through them.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense group identifier. 0 and 1 for the binary-group setting.
pub type GroupId = usize;

/// One observation: features, a binary label, and the group it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: u8,
    pub group: GroupId,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, label: u8, group: GroupId) -> Result<Self> {
        if label > 1 {
            return Err(Error::InvalidLabel(label as f64));
        }
        Ok(Self {
            features,
            label,
            group,
        })
    }
}

/// A non-empty dataset with consistent feature dimension, indexed by group.
#[derive(Debug, Clone)]
pub struct GroupedDataset {
    samples: Vec<LabeledSample>,
    /// Group ids in first-appearance order.
    groups: Vec<GroupId>,
    /// Sample indices per group, in dataset order.
    by_group: BTreeMap<GroupId, Vec<usize>>,
    dim: usize,
}

impl GroupedDataset {
    /// Validates labels and dimensions and builds the group index.
    pub fn new(samples: Vec<LabeledSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("dataset has no samples".into()));
        }
        let dim = samples[0].features.len();
        if dim == 0 {
            return Err(Error::EmptyInput("samples have no features".into()));
        }
        let mut groups = Vec::new();
        let mut by_group: BTreeMap<GroupId, Vec<usize>> = BTreeMap::new();
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.features.len(),
                });
            }
            if s.label > 1 {
                return Err(Error::InvalidLabel(s.label as f64));
            }
            if !by_group.contains_key(&s.group) {
                groups.push(s.group);
            }
            by_group.entry(s.group).or_default().push(i);
        }
        Ok(Self {
            samples,
            groups,
            by_group,
            dim,
        })
    }

    /// Builds a dataset from parallel feature/label/group slices.
    pub fn from_parts(features: Vec<Vec<f64>>, labels: &[u8], groups: &[GroupId]) -> Result<Self> {
        if features.len() != labels.len() || labels.len() != groups.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                got: labels.len().min(groups.len()),
            });
        }
        let samples = features
            .into_iter()
            .zip(labels.iter().zip(groups.iter()))
            .map(|(x, (&y, &g))| LabeledSample::new(x, y, g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Group ids in first-appearance order.
    pub fn groups(&self) -> &[GroupId] {
        &self.groups
    }

    pub fn group_size(&self, group: GroupId) -> Result<usize> {
        self.by_group
            .get(&group)
            .map(Vec::len)
            .ok_or(Error::GroupNotFound(group))
    }

    /// Indices into [`Self::samples`] belonging to `group`, in dataset order.
    pub fn group_indices(&self, group: GroupId) -> Result<&[usize]> {
        self.by_group
            .get(&group)
            .map(Vec::as_slice)
            .ok_or(Error::GroupNotFound(group))
    }

    pub fn iter_group(&self, group: GroupId) -> Result<impl Iterator<Item = &LabeledSample> + '_> {
        let idx = self.group_indices(group)?;
        Ok(idx.iter().map(move |&i| &self.samples[i]))
    }

    /// Clones the feature vectors of one group.
    pub fn group_features(&self, group: GroupId) -> Result<Vec<Vec<f64>>> {
        Ok(self
            .iter_group(group)?
            .map(|s| s.features.clone())
            .collect())
    }

    /// Sizes of all groups, keyed by group id.
    pub fn group_sizes(&self) -> BTreeMap<GroupId, usize> {
        self.by_group
            .iter()
            .map(|(&g, v)| (g, v.len()))
            .collect()
    }

    /// New dataset containing the samples at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        Self::new(samples)
    }

    /// Group-stratified split into (rest, holdout). The holdout receives
    /// `holdout_fraction` of every group (at least one sample, at most all
    /// but one), chosen uniformly by the seeded generator. Both halves keep
    /// the original sample order.
    pub fn split_holdout(&self, holdout_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "holdout fraction must be in (0, 1), got {holdout_fraction}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut in_holdout = vec![false; self.samples.len()];
        for &g in &self.groups {
            let idx = &self.by_group[&g];
            if idx.len() < 2 {
                return Err(Error::InsufficientSamples {
                    group: g,
                    available: idx.len(),
                    needed: 2,
                });
            }
            let take = ((idx.len() as f64 * holdout_fraction).round() as usize)
                .clamp(1, idx.len() - 1);
            let mut shuffled = idx.clone();
            shuffled.shuffle(&mut rng);
            for &i in shuffled.iter().take(take) {
                in_holdout[i] = true;
            }
        }
        let rest: Vec<usize> = (0..self.samples.len()).filter(|&i| !in_holdout[i]).collect();
        let hold: Vec<usize> = (0..self.samples.len()).filter(|&i| in_holdout[i]).collect();
        Ok((self.subset(&rest)?, self.subset(&hold)?))
    }

    /// Group-stratified fold assignment for k-fold cross-validation.
    /// Returns `folds` index lists; every group contributes to every fold.
    pub fn stratified_folds(&self, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
        if folds < 2 {
            return Err(Error::InvalidParameter(format!(
                "cross-validation needs at least 2 folds, got {folds}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignment = vec![vec![]; folds];
        for &g in &self.groups {
            let idx = &self.by_group[&g];
            if idx.len() < folds {
                return Err(Error::InsufficientSamples {
                    group: g,
                    available: idx.len(),
                    needed: folds,
                });
            }
            let mut shuffled = idx.clone();
            shuffled.shuffle(&mut rng);
            for (j, &i) in shuffled.iter().enumerate() {
                assignment[j % folds].push(i);
            }
        }
        for fold in &mut assignment {
            fold.sort_unstable();
        }
        Ok(assignment)
    }
}

/// A feature vector usable as a map key, for finite-support distributions
/// and tabular classifiers. Comparison and hashing treat floats bitwise
/// (after collapsing -0.0 into 0.0), so equal vectors are equal atoms and
/// ordering is total and deterministic.
#[derive(Debug, Clone)]
pub struct Atom(Vec<f64>);

impl Atom {
    pub fn new(features: &[f64]) -> Self {
        Atom(
            features
                .iter()
                .map(|&v| if v == 0.0 { 0.0 } else { v })
                .collect(),
        )
    }

    pub fn features(&self) -> &[f64] {
        &self.0
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for Atom {}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lex = self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| *o != std::cmp::Ordering::Equal);
        lex.unwrap_or_else(|| self.0.len().cmp(&other.0.len()))
    }
}

impl std::hash::Hash for Atom {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for v in &self.0 {
            state.write_u64(v.to_bits());
        }
    }
}

/// Splits `0..n` into `folds` interleaved parts after a seeded shuffle.
pub(crate) fn fold_partition(n: usize, folds: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut parts = vec![vec![]; folds];
    for (j, i) in idx.into_iter().enumerate() {
        parts[j % folds].push(i);
    }
    parts
}

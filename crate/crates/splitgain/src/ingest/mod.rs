//! Dataset loading and preprocessing.
//!
//! [`load_table`] reads CSV or ARFF into a typed [`RawTable`];
//! [`preprocess`] turns a table into a [`GroupedDataset`]: rows with
//! missing cells are dropped (and counted), every categorical column is
//! collapsed to an indicator of its most frequent value, the sensitive
//! column becomes the group id, the label column is mapped to {0, 1}, and
//! each group is truncated to a size cap by seeded subsampling.
//! [`fetch_remote`] downloads a dataset file by id into a local cache, and
//! [`manifest`] lists the 87 public dataset ids this crate was validated
//! against, with their sensitive and label column names.

mod arff;
mod table;

pub use table::{load_table, Column, ColumnSelector, ColumnType, RawTable, TableFormat, Value};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{GroupId, GroupedDataset, LabeledSample};
use crate::error::{Error, Result};

/// How categorical columns become binary features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Binarization {
    /// The most frequent value maps to 1 (ties go to the lexicographically
    /// smallest value), everything else to 0.
    #[default]
    MostFrequentToOne,
}

/// Settings for [`preprocess`].
#[derive(Debug, Clone)]
pub struct PreprocessConfig {
    /// Group column; defaults to the first binary column that is not the
    /// label.
    pub sensitive_column: Option<ColumnSelector>,
    /// Target column; defaults to the last column.
    pub label_column: Option<ColumnSelector>,
    /// Per-group size cap, enforced by seeded subsampling.
    pub max_per_group: usize,
    pub binarization: Binarization,
    /// Seed for the truncation subsample.
    pub seed: u64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            sensitive_column: None,
            label_column: None,
            max_per_group: 10_000,
            binarization: Binarization::default(),
            seed: 0,
        }
    }
}

/// What [`preprocess`] did beyond the returned dataset.
#[derive(Debug, Clone, Default)]
pub struct PreprocessReport {
    /// Rows removed because some cell was missing.
    pub dropped_missing_rows: usize,
    /// Conditions worth surfacing that do not invalidate the dataset.
    pub warnings: Vec<String>,
}

/// A cell value as a totally ordered key, so frequency counting and tie
/// breaks are deterministic: numbers order numerically, texts
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Num(u64),
    Text(String),
}

impl Key {
    fn of(value: &Value) -> Key {
        match value {
            Value::Number(v) => Key::Num(order_bits(*v)),
            Value::Text(s) => Key::Text(s.clone()),
            Value::Missing => unreachable!("rows with missing cells were dropped"),
        }
    }
}

/// Maps a float to bits whose unsigned order matches numeric order.
fn order_bits(v: f64) -> u64 {
    let v = if v == 0.0 { 0.0 } else { v };
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

/// The key with the highest count; ties go to the smallest key.
fn most_frequent(keys: impl Iterator<Item = Key>) -> Option<Key> {
    let mut counts: BTreeMap<Key, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let mut best: Option<(Key, usize)> = None;
    for (k, c) in counts {
        match &best {
            Some((_, bc)) if c <= *bc => {}
            _ => best = Some((k, c)),
        }
    }
    best.map(|(k, _)| k)
}

/// See the module docs for the full pipeline. Returns the grouped dataset
/// together with a report of dropped rows and warnings.
pub fn preprocess(
    table: &RawTable,
    cfg: &PreprocessConfig,
) -> Result<(GroupedDataset, PreprocessReport)> {
    if cfg.max_per_group == 0 {
        return Err(Error::InvalidParameter(
            "max_per_group must be at least 1".into(),
        ));
    }
    let Binarization::MostFrequentToOne = cfg.binarization;
    let mut report = PreprocessReport::default();

    let label_idx = match &cfg.label_column {
        Some(sel) => table.column_index(sel)?,
        None => table.n_cols() - 1,
    };

    // Missing-value policy: drop the whole row, count it.
    let kept: Vec<&Vec<Value>> = table
        .rows()
        .iter()
        .filter(|row| !row.iter().any(Value::is_missing))
        .collect();
    report.dropped_missing_rows = table.n_rows() - kept.len();
    if kept.is_empty() {
        return Err(Error::Preprocess(
            "no rows left after dropping missing values".into(),
        ));
    }

    let distinct = |c: usize| {
        let mut keys: Vec<Key> = kept.iter().map(|row| Key::of(&row[c])).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    };

    let sensitive_idx = match &cfg.sensitive_column {
        Some(sel) => table.column_index(sel)?,
        None => {
            let found = (0..table.n_cols())
                .find(|&c| c != label_idx && distinct(c) == 2);
            found.ok_or_else(|| {
                Error::Preprocess("no binary column available as the sensitive attribute".into())
            })?
        }
    };
    if sensitive_idx == label_idx {
        return Err(Error::Preprocess(
            "sensitive and label columns must be distinct".into(),
        ));
    }

    // Group side per row: numeric sensitive columns must already be binary;
    // categorical ones are collapsed majority-against-rest first.
    let sensitive_col = &table.columns()[sensitive_idx];
    let sides: Vec<Key> = match sensitive_col.ty {
        ColumnType::Numeric => {
            if distinct(sensitive_idx) != 2 {
                return Err(Error::Preprocess(format!(
                    "numeric sensitive column '{}' is not binary",
                    sensitive_col.name
                )));
            }
            kept.iter()
                .map(|row| Key::of(&row[sensitive_idx]))
                .collect()
        }
        ColumnType::Categorical => {
            if distinct(sensitive_idx) < 2 {
                return Err(Error::Preprocess(format!(
                    "sensitive column '{}' has a single value",
                    sensitive_col.name
                )));
            }
            let majority = most_frequent(kept.iter().map(|row| Key::of(&row[sensitive_idx])))
                .expect("kept rows are nonempty");
            kept.iter()
                .map(|row| Key::Num(u64::from(Key::of(&row[sensitive_idx]) == majority)))
                .collect()
        }
    };
    // Group ids in first-appearance order.
    let mut group_of_side: BTreeMap<Key, GroupId> = BTreeMap::new();
    let mut groups: Vec<GroupId> = Vec::with_capacity(sides.len());
    for side in &sides {
        let next = group_of_side.len();
        let gid = *group_of_side.entry(side.clone()).or_insert(next);
        groups.push(gid);
    }

    // Labels: a numeric 0/1 column is taken at face value; anything else
    // gets the most-frequent-to-one rule.
    let label_col = &table.columns()[label_idx];
    let label_cells: Vec<&Value> = kept.iter().map(|row| &row[label_idx]).collect();
    if distinct(label_idx) == 1 {
        report.warnings.push(format!(
            "label column '{}' is constant; every classifier attains zero risk and the \
             benefit of splitting is degenerate",
            label_col.name
        ));
    }
    let numeric_01 = label_col.ty == ColumnType::Numeric
        && label_cells
            .iter()
            .all(|v| matches!(v, Value::Number(x) if *x == 0.0 || *x == 1.0));
    let labels: Vec<u8> = if numeric_01 {
        label_cells
            .iter()
            .map(|v| match v {
                Value::Number(x) => *x as u8,
                _ => unreachable!("checked numeric"),
            })
            .collect()
    } else {
        let majority =
            most_frequent(label_cells.iter().map(|v| Key::of(v))).expect("rows are nonempty");
        label_cells
            .iter()
            .map(|v| u8::from(Key::of(v) == majority))
            .collect()
    };

    // Features: every remaining column, categorical ones binarized.
    let feature_cols: Vec<usize> = (0..table.n_cols())
        .filter(|&c| c != sensitive_idx && c != label_idx)
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::Preprocess(
            "no feature columns besides the sensitive and label columns".into(),
        ));
    }
    let mut majority_of: BTreeMap<usize, Key> = BTreeMap::new();
    for &c in &feature_cols {
        if table.columns()[c].ty == ColumnType::Categorical {
            let majority = most_frequent(kept.iter().map(|row| Key::of(&row[c])))
                .expect("kept rows are nonempty");
            majority_of.insert(c, majority);
        }
    }
    let features: Vec<Vec<f64>> = kept
        .iter()
        .map(|row| {
            feature_cols
                .iter()
                .map(|&c| match (&row[c], majority_of.get(&c)) {
                    (Value::Number(x), None) => *x,
                    (cell, Some(majority)) => f64::from(Key::of(cell) == *majority),
                    _ => unreachable!("categorical columns all have a majority"),
                })
                .collect()
        })
        .collect();

    // Truncate each group to the cap with one seeded shuffle, keeping the
    // survivors in their original row order.
    let mut by_group: BTreeMap<GroupId, Vec<usize>> = BTreeMap::new();
    for (i, &g) in groups.iter().enumerate() {
        by_group.entry(g).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut retained = vec![false; kept.len()];
    for idx in by_group.values() {
        if idx.len() <= cfg.max_per_group {
            for &i in idx {
                retained[i] = true;
            }
        } else {
            let mut shuffled = idx.clone();
            shuffled.shuffle(&mut rng);
            for &i in shuffled.iter().take(cfg.max_per_group) {
                retained[i] = true;
            }
        }
    }

    let samples: Vec<LabeledSample> = (0..kept.len())
        .filter(|&i| retained[i])
        .map(|i| LabeledSample::new(features[i].clone(), labels[i], groups[i]))
        .collect::<Result<_>>()?;
    let data = GroupedDataset::new(samples)?;
    Ok((data, report))
}

/// Environment variable overriding the fetch cache directory.
pub const CACHE_DIR_ENV: &str = "SPLITGAIN_CACHE_DIR";
/// Environment variable overriding the fetch URL template; `{id}` is
/// replaced by the dataset id.
pub const FETCH_URL_ENV: &str = "SPLITGAIN_FETCH_URL";

const DEFAULT_FETCH_URL: &str = "https://api.openml.org/data/v1/download/{id}";

/// Downloads a dataset file by id into the cache directory (or the
/// [`CACHE_DIR_ENV`] override) and returns the cached path. A file already
/// in the cache is returned without touching the network; downloads land
/// under a temporary name and are renamed into place so a concurrent
/// fetch never observes a partial file.
pub fn fetch_remote(dataset_id: u64, cache_dir: &Path) -> Result<PathBuf> {
    if dataset_id == 0 {
        return Err(Error::InvalidParameter(
            "dataset id must be positive".into(),
        ));
    }
    let dir = std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| cache_dir.to_path_buf());
    std::fs::create_dir_all(&dir)?;
    let dest = dir.join(format!("dataset_{dataset_id}.arff"));
    if dest.exists() {
        return Ok(dest);
    }

    let template =
        std::env::var(FETCH_URL_ENV).unwrap_or_else(|_| DEFAULT_FETCH_URL.to_string());
    let url = template.replace("{id}", &dataset_id.to_string());
    let fetch_err = |reason: String| Error::Fetch {
        url: url.clone(),
        reason,
    };
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(120))
        .build()
        .map_err(|e| fetch_err(e.to_string()))?;
    let response = client
        .get(&url)
        .send()
        .map_err(|e| fetch_err(e.to_string()))?;
    let status = response.status();
    if !status.is_success() {
        return Err(fetch_err(format!("HTTP {status}")));
    }
    let bytes = response.bytes().map_err(|e| fetch_err(e.to_string()))?;
    if bytes.is_empty() {
        return Err(fetch_err("empty download".into()));
    }

    let tmp = dir.join(format!(
        ".dataset_{dataset_id}.{}.partial",
        std::process::id()
    ));
    std::fs::write(&tmp, &bytes)?;
    std::fs::rename(&tmp, &dest)?;
    Ok(dest)
}

/// One dataset in the validation manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: u64,
    /// Column to group by.
    pub sensitive: String,
    /// Column to predict.
    pub label: String,
    /// True when the label is perfectly predictable within one group
    /// under this preprocessing, which degenerates the analysis; batch
    /// runs skip these.
    pub degenerate_label: bool,
}

const MANIFEST_CSV: &str = include_str!("../../data/dataset_manifest.csv");
const DEGENERATE_IDS: [u64; 2] = [923, 1236];

/// The built-in list of public dataset ids with their sensitive and label
/// columns.
pub fn manifest() -> Vec<ManifestEntry> {
    MANIFEST_CSV
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut parts = line.splitn(3, ',');
            let id: u64 = parts
                .next()
                .expect("manifest line has an id")
                .parse()
                .expect("manifest id is an integer");
            let sensitive = parts.next().expect("manifest line has a sensitive column");
            let label = parts.next().expect("manifest line has a label column");
            ManifestEntry {
                id,
                sensitive: sensitive.to_string(),
                label: label.to_string(),
                degenerate_label: DEGENERATE_IDS.contains(&id),
            }
        })
        .collect()
}

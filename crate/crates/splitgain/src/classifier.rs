//! Classifiers and hypothesis classes.
//!
//! A [`Classifier`] maps a feature vector to a score in `[0, 1]`; binary
//! classifiers are the special case where the score is always 0 or 1.
//! One-dimensional rules (thresholds, intervals) admit infinite endpoints,
//! so constants arise as degenerate members of those families.

use std::collections::BTreeMap;

use crate::data::Atom;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    /// Logistic model: sigmoid(w . x + bias), scores in (0, 1).
    LinearLogistic { weights: Vec<f64>, bias: f64 },
    /// Halfspace indicator: 1 when w . x + bias >= 0.
    LinearThreshold { weights: Vec<f64>, bias: f64 },
    /// 1 when x > a (one-dimensional).
    ThresholdAbove { a: f64 },
    /// 1 when x < b (one-dimensional).
    ThresholdBelow { b: f64 },
    /// 1 when a < x < b (one-dimensional). `a >= b` gives the constant 0.
    Interval { a: f64, b: f64 },
    /// The same score everywhere.
    Constant { c: f64 },
    /// Score looked up per atom; `default` is returned for unseen atoms.
    TabularScore {
        scores: BTreeMap<Atom, f64>,
        default: f64,
    },
}

impl Classifier {
    /// Constant classifier, validating the score range.
    pub fn constant(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidParameter(format!(
                "constant score must be in [0, 1], got {c}"
            )));
        }
        Ok(Classifier::Constant { c })
    }

    /// Tabular classifier, validating every score.
    pub fn tabular(scores: BTreeMap<Atom, f64>, default: f64) -> Result<Self> {
        for v in scores.values().chain(std::iter::once(&default)) {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidParameter(format!(
                    "tabular score must be in [0, 1], got {v}"
                )));
            }
        }
        Ok(Classifier::TabularScore { scores, default })
    }

    /// Score of a feature vector, in `[0, 1]`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        match self {
            Classifier::LinearLogistic { weights, bias } => {
                Ok(sigmoid(dot_checked(weights, x)? + bias))
            }
            Classifier::LinearThreshold { weights, bias } => {
                Ok(if dot_checked(weights, x)? + bias >= 0.0 {
                    1.0
                } else {
                    0.0
                })
            }
            Classifier::ThresholdAbove { a } => {
                Ok(if scalar(x)? > *a { 1.0 } else { 0.0 })
            }
            Classifier::ThresholdBelow { b } => {
                Ok(if scalar(x)? < *b { 1.0 } else { 0.0 })
            }
            Classifier::Interval { a, b } => {
                let v = scalar(x)?;
                Ok(if *a < v && v < *b { 1.0 } else { 0.0 })
            }
            Classifier::Constant { c } => Ok(*c),
            Classifier::TabularScore { scores, default } => {
                Ok(scores.get(&Atom::new(x)).copied().unwrap_or(*default))
            }
        }
    }

    /// Feature dimension this classifier requires, if it requires one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Classifier::LinearLogistic { weights, .. }
            | Classifier::LinearThreshold { weights, .. } => Some(weights.len()),
            Classifier::ThresholdAbove { .. }
            | Classifier::ThresholdBelow { .. }
            | Classifier::Interval { .. } => Some(1),
            Classifier::Constant { .. } | Classifier::TabularScore { .. } => None,
        }
    }

    /// Whether every score this classifier can emit is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        match self {
            Classifier::LinearLogistic { .. } => false,
            Classifier::LinearThreshold { .. }
            | Classifier::ThresholdAbove { .. }
            | Classifier::ThresholdBelow { .. }
            | Classifier::Interval { .. } => true,
            Classifier::Constant { c } => *c == 0.0 || *c == 1.0,
            Classifier::TabularScore { scores, default } => {
                scores
                    .values()
                    .chain(std::iter::once(default))
                    .all(|v| *v == 0.0 || *v == 1.0)
            }
        }
    }

    /// Rounds scores at 1/2 into a binary classifier. A logistic model
    /// becomes the halfspace indicator with the same weights; classifiers
    /// that are already binary are returned unchanged.
    pub fn binarized(&self) -> Classifier {
        match self {
            Classifier::LinearLogistic { weights, bias } => Classifier::LinearThreshold {
                weights: weights.clone(),
                bias: *bias,
            },
            Classifier::Constant { c } => Classifier::Constant {
                c: if *c >= 0.5 { 1.0 } else { 0.0 },
            },
            Classifier::TabularScore { scores, default } => Classifier::TabularScore {
                scores: scores
                    .iter()
                    .map(|(k, v)| (k.clone(), if *v >= 0.5 { 1.0 } else { 0.0 }))
                    .collect(),
                default: if *default >= 0.5 { 1.0 } else { 0.0 },
            },
            other => other.clone(),
        }
    }
}

fn scalar(x: &[f64]) -> Result<f64> {
    if x.len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: x.len(),
        });
    }
    Ok(x[0])
}

fn dot_checked(w: &[f64], x: &[f64]) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: x.len(),
        });
    }
    Ok(w.iter().zip(x).map(|(a, b)| a * b).sum())
}

/// Numerically stable logistic function.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Families of classifiers a trainer can search over.
#[derive(Debug, Clone)]
pub enum HypothesisFamily {
    /// Logistic models over `dim` features (halfspaces once thresholded).
    Linear { dim: usize },
    /// All `1[x > a]` and `1[x < b]` rules on one feature.
    ThresholdPair,
    /// All `1[a < x < b]` rules on one feature.
    Interval,
    /// An explicit finite list of candidates, searched in order.
    FiniteEnumeration(Vec<Classifier>),
}

/// A hypothesis family together with the VC dimension used in the
/// finite-sample bounds.
#[derive(Debug, Clone)]
pub struct HypothesisClass {
    pub family: HypothesisFamily,
    pub vc_dimension: usize,
}

impl HypothesisClass {
    /// Wraps a family with its default VC dimension: `dim + 1` for linear
    /// classes, 2 for thresholds and intervals, and `floor(log2 k)` (at
    /// least 1) for a k-element enumeration.
    pub fn new(family: HypothesisFamily) -> Result<Self> {
        let vc = match &family {
            HypothesisFamily::Linear { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidParameter(
                        "linear class needs at least one feature".into(),
                    ));
                }
                dim + 1
            }
            HypothesisFamily::ThresholdPair | HypothesisFamily::Interval => 2,
            HypothesisFamily::FiniteEnumeration(cands) => {
                if cands.is_empty() {
                    return Err(Error::EmptyInput("enumeration has no candidates".into()));
                }
                ((cands.len() as f64).log2().floor() as usize).max(1)
            }
        };
        Ok(Self {
            family,
            vc_dimension: vc,
        })
    }

    /// Overrides the VC dimension (must stay positive).
    pub fn with_vc_dimension(mut self, vc: usize) -> Result<Self> {
        if vc == 0 {
            return Err(Error::InvalidParameter("VC dimension must be >= 1".into()));
        }
        self.vc_dimension = vc;
        Ok(self)
    }
}

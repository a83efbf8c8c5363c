//! Bounds on the benefit of splitting and on worst-group risk.
//!
//! The population bounds need only classifiers and data: the upper bound is
//! the smaller group's view of how much the two per-group classifiers
//! disagree, and the lower bounds trade that disagreement off against the
//! distance between the group marginals. The finite-sample bounds add the
//! complexity term [`complexity_omega`] and the mean training loss of the
//! split classifiers, and hold with probability `1 - delta` over the
//! sampling of the training set.

use std::collections::BTreeMap;

use crate::classifier::Classifier;
use crate::data::{GroupId, GroupedDataset};
use crate::divergence::DivergenceEstimate;
use crate::error::{Error, Result};
use crate::risk::{disagreement, l1_risk};

/// The ingredients a finite-sample bound was assembled from, kept for
/// reporting.
#[derive(Debug, Clone)]
pub struct BoundComponents {
    /// Mean |h1 - h0| on each group's samples.
    pub disagreement_per_group: BTreeMap<GroupId, f64>,
    /// The total variation estimate the lower bound subtracted.
    pub tv_estimate: DivergenceEstimate,
    /// Mean training loss of the two split classifiers.
    pub lambda: f64,
    /// The complexity term actually used (reduced in practical mode).
    pub omega: f64,
    pub delta: f64,
    pub vc_dimension: usize,
    pub practical_mode: bool,
}

/// A bracketed estimate of the benefit of splitting on one dataset.
///
/// The epsilon fields stay empty until an evaluation step fills them in;
/// [`finite_sample_bounds`] populates only the bounds. A lower bound at or
/// below zero is vacuous but reported as computed, never clamped. With an
/// exact total variation measured on the same sample the lower bound
/// cannot exceed the upper one; a strict underestimate can break that
/// ordering, and the bounds are still reported as computed.
#[derive(Debug, Clone)]
pub struct SplitAnalysis {
    /// Gap between worst-group risks of the shared and split classifiers,
    /// measured on fresh data.
    pub epsilon_hat_split: Option<f64>,
    /// The same gap measured on training data.
    pub epsilon_hat_empirical: Option<f64>,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub components: BoundComponents,
    pub group_sizes: BTreeMap<GroupId, usize>,
}

impl SplitAnalysis {
    /// True when the lower bound says nothing (zero or below).
    pub fn lower_is_vacuous(&self) -> bool {
        self.lower_bound <= 0.0
    }
}

/// Which reduced complexity term practical mode substitutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PracticalOmega {
    /// Drop the VC-dependent term, keeping only the confidence part.
    #[default]
    DropVcTerm,
    /// Keep the VC term but freeze its sample-size logarithm at log 6.
    Log6Constant,
}

/// Settings for [`finite_sample_bounds`].
#[derive(Debug, Clone)]
pub struct BoundConfig {
    /// Failure probability of the bounds.
    pub delta: f64,
    /// VC dimension of the trained hypothesis class.
    pub vc_dimension: usize,
    /// Drop the training-loss term and shrink the complexity term. The
    /// full versions are so conservative on real sample sizes that the
    /// lower bound rarely says anything; this trades rigor for signal.
    pub practical_mode: bool,
    pub practical_omega: PracticalOmega,
}

impl BoundConfig {
    /// Strict bounds at 95% confidence for a class of the given VC
    /// dimension.
    pub fn new(vc_dimension: usize) -> Self {
        Self {
            delta: 0.05,
            vc_dimension,
            practical_mode: false,
            practical_omega: PracticalOmega::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        if self.vc_dimension == 0 {
            return Err(Error::InvalidParameter("VC dimension must be >= 1".into()));
        }
        Ok(())
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence parameter must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

fn check_tv(tv: &DivergenceEstimate) -> Result<()> {
    if !(tv.value >= 0.0 && tv.value <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "total variation must lie in [0, 1], got {}",
            tv.value
        )));
    }
    Ok(())
}

fn binary_groups(data: &GroupedDataset) -> Result<()> {
    data.group_size(0)?;
    data.group_size(1)?;
    Ok(())
}

/// Upper bound on the benefit of splitting: the split classifiers'
/// disagreement under whichever group sees less of it. If they barely
/// disagree anywhere, a shared model can stand in for both.
pub fn disagreement_upper_bound(
    h0: &Classifier,
    h1: &Classifier,
    data: &GroupedDataset,
) -> Result<f64> {
    binary_groups(data)?;
    let d0 = disagreement(h1, h0, data, 0)?;
    let d1 = disagreement(h1, h0, data, 1)?;
    Ok(d0.min(d1))
}

/// Half of [`disagreement_upper_bound`], valid when the hypothesis class
/// is convex (the midpoint of the split classifiers is then admissible).
pub fn disagreement_upper_bound_convex(
    h0: &Classifier,
    h1: &Classifier,
    data: &GroupedDataset,
) -> Result<f64> {
    Ok(0.5 * disagreement_upper_bound(h0, h1, data)?)
}

/// Floor under the worst-group risk of every group-blind classifier:
/// half the labeling disagreement left over after the marginals' total
/// variation is discounted. Holds for any classifier whatsoever, so a
/// positive value is an impossibility result. May be negative (vacuous).
pub fn worst_group_risk_floor(
    y0: &Classifier,
    y1: &Classifier,
    data: &GroupedDataset,
    tv: &DivergenceEstimate,
) -> Result<f64> {
    binary_groups(data)?;
    check_tv(tv)?;
    let d0 = disagreement(y1, y0, data, 0)?;
    let d1 = disagreement(y1, y0, data, 1)?;
    Ok(0.5 * (d0.max(d1) - tv.value))
}

/// Lower bound on the benefit of splitting from a pair of (near-)optimal
/// split classifiers: half their disagreement, discounted by the
/// marginals' total variation and by three halves of their combined risk.
/// `risks` is (risk of `h0` on group 0, risk of `h1` on group 1). May be
/// negative (vacuous).
pub fn splitting_lower_bound(
    h0: &Classifier,
    h1: &Classifier,
    data: &GroupedDataset,
    tv: &DivergenceEstimate,
    risks: (f64, f64),
) -> Result<f64> {
    binary_groups(data)?;
    check_tv(tv)?;
    let (r0, r1) = risks;
    for r in [r0, r1] {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "classifier risks must be finite and nonnegative, got {r}"
            )));
        }
    }
    let d0 = disagreement(h1, h0, data, 0)?;
    let d1 = disagreement(h1, h0, data, 1)?;
    Ok(0.5 * d0.max(d1) - tv.value - 1.5 * (r0 + r1))
}

/// The finite-sample complexity term: `4 max_s sqrt((2 D ln(6 n_s) +
/// 2 ln(8 / delta)) / n_s)`. Roughly `sqrt(D / min(n0, n1))` up to
/// logarithms, and far from negligible at real sample sizes.
pub fn complexity_omega(n0: usize, n1: usize, vc: usize, delta: f64) -> Result<f64> {
    omega_of(n0, n1, vc, delta, |n| (6.0 * n).ln())
}

/// The reduced complexity term used in practical mode.
pub fn practical_complexity_omega(
    n0: usize,
    n1: usize,
    vc: usize,
    delta: f64,
    variant: PracticalOmega,
) -> Result<f64> {
    match variant {
        PracticalOmega::DropVcTerm => omega_of(n0, n1, vc, delta, |_| 0.0),
        PracticalOmega::Log6Constant => omega_of(n0, n1, vc, delta, |_| 6.0_f64.ln()),
    }
}

fn omega_of(
    n0: usize,
    n1: usize,
    vc: usize,
    delta: f64,
    vc_log: impl Fn(f64) -> f64,
) -> Result<f64> {
    check_delta(delta)?;
    if n0 == 0 || n1 == 0 {
        return Err(Error::InvalidParameter(
            "complexity term needs at least one sample per group".into(),
        ));
    }
    if vc == 0 {
        return Err(Error::InvalidParameter("VC dimension must be >= 1".into()));
    }
    let term = |n: usize| {
        let n = n as f64;
        ((2.0 * vc as f64 * vc_log(n) + 2.0 * (8.0 / delta).ln()) / n).sqrt()
    };
    Ok(4.0 * term(n0).max(term(n1)))
}

/// Finite-sample bounds on the benefit of splitting, from the two fitted
/// split classifiers and their training data. Both classifiers must output
/// hard 0/1 labels (threshold soft scores first); the result holds with
/// probability `1 - delta` over the draw of the training sample.
pub fn finite_sample_bounds(
    h0_hat: &Classifier,
    h1_hat: &Classifier,
    data: &GroupedDataset,
    tv_hat: &DivergenceEstimate,
    cfg: &BoundConfig,
) -> Result<SplitAnalysis> {
    cfg.validate()?;
    check_tv(tv_hat)?;
    binary_groups(data)?;
    for h in [h0_hat, h1_hat] {
        if !h.is_binary() {
            return Err(Error::InvalidParameter(
                "finite-sample bounds need 0/1 outputs; threshold soft scores first".into(),
            ));
        }
    }

    let d0 = disagreement(h1_hat, h0_hat, data, 0)?;
    let d1 = disagreement(h1_hat, h0_hat, data, 1)?;
    let lambda = 0.5 * (l1_risk(h0_hat, data, 0)? + l1_risk(h1_hat, data, 1)?);
    let n0 = data.group_size(0)?;
    let n1 = data.group_size(1)?;
    let omega = if cfg.practical_mode {
        practical_complexity_omega(n0, n1, cfg.vc_dimension, cfg.delta, cfg.practical_omega)?
    } else {
        complexity_omega(n0, n1, cfg.vc_dimension, cfg.delta)?
    };
    let lambda_term = if cfg.practical_mode { 0.0 } else { lambda };

    let upper_bound = d0.min(d1) + omega;
    let lower_bound = 0.5 * d0.max(d1) - tv_hat.value - 3.0 * lambda_term - omega;

    Ok(SplitAnalysis {
        epsilon_hat_split: None,
        epsilon_hat_empirical: None,
        upper_bound,
        lower_bound,
        components: BoundComponents {
            disagreement_per_group: [(0, d0), (1, d1)].into_iter().collect(),
            tv_estimate: tv_hat.clone(),
            lambda,
            omega,
            delta: cfg.delta,
            vc_dimension: cfg.vc_dimension,
            practical_mode: cfg.practical_mode,
        },
        group_sizes: [(0, n0), (1, n1)].into_iter().collect(),
    })
}

/// The gap between the shared model's worst-group risk and the split
/// models' worst-group risk, under a caller-supplied risk evaluator
/// (analytic, Monte Carlo, or held-out empirical). Negative means
/// splitting hurt.
pub fn sample_limited_splitting<F>(
    h_blind: &Classifier,
    h_split: &BTreeMap<GroupId, Classifier>,
    groups: &[GroupId],
    mut eval: F,
) -> Result<f64>
where
    F: FnMut(&Classifier, GroupId) -> Result<f64>,
{
    if groups.is_empty() {
        return Err(Error::EmptyInput("no groups to evaluate".into()));
    }
    let mut blind_worst = f64::NEG_INFINITY;
    let mut split_worst = f64::NEG_INFINITY;
    for &g in groups {
        let h_g = h_split.get(&g).ok_or(Error::MissingGroupClassifier(g))?;
        blind_worst = blind_worst.max(eval(h_blind, g)?);
        split_worst = split_worst.max(eval(h_g, g)?);
    }
    Ok(blind_worst - split_worst)
}

/// [`sample_limited_splitting`] evaluated on training risks. Nonnegative
/// whenever the classifiers are exact empirical minimizers over one class,
/// since each split model then dominates the shared one on its own group.
pub fn empirical_benefit_of_splitting(
    h_blind: &Classifier,
    h_split: &BTreeMap<GroupId, Classifier>,
    data: &GroupedDataset,
) -> Result<f64> {
    sample_limited_splitting(h_blind, h_split, data.groups(), |h, g| l1_risk(h, data, g))
}

/// Upper bound on the benefit of splitting with any number of groups:
/// deploy group s's model everywhere and pay at most its worst
/// disagreement with the other groups' models; the best choice of s gives
/// the bound. Reduces to [`disagreement_upper_bound`] for two groups.
pub fn multi_group_upper_bound(
    h_split: &BTreeMap<GroupId, Classifier>,
    data: &GroupedDataset,
) -> Result<f64> {
    let groups = data.groups();
    if groups.len() < 2 {
        return Err(Error::InvalidParameter(
            "multi-group bounds need at least two groups".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for &s in groups {
        let h_s = h_split.get(&s).ok_or(Error::MissingGroupClassifier(s))?;
        let mut worst = f64::NEG_INFINITY;
        for &other in groups {
            let h_other = h_split
                .get(&other)
                .ok_or(Error::MissingGroupClassifier(other))?;
            worst = worst.max(disagreement(h_s, h_other, data, other)?);
        }
        best = best.min(worst);
    }
    Ok(best)
}

/// Pairwise total variation values between group marginals. Symmetry and
/// a zero diagonal are baked in: entries are stored per unordered pair.
#[derive(Debug, Clone)]
pub struct TvMatrix {
    values: BTreeMap<(GroupId, GroupId), f64>,
}

impl TvMatrix {
    /// Builds from one entry per unordered pair of distinct groups.
    /// Duplicate pairs (in either order) are rejected.
    pub fn new(pairs: impl IntoIterator<Item = (GroupId, GroupId, f64)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (a, b, v) in pairs {
            if a == b {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry for group {a}; the diagonal is fixed at zero"
                )));
            }
            if !(v >= 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "total variation must lie in [0, 1], got {v}"
                )));
            }
            let key = (a.min(b), a.max(b));
            if values.insert(key, v).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate entry for groups {} and {}",
                    key.0, key.1
                )));
            }
        }
        Ok(Self { values })
    }

    /// The stored value for an unordered pair; zero on the diagonal.
    pub fn get(&self, a: GroupId, b: GroupId) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        self.values
            .get(&(a.min(b), a.max(b)))
            .copied()
            .ok_or_else(|| {
                Error::InvalidParameter(format!("no total variation recorded for groups {a}, {b}"))
            })
    }
}

/// Floor under the worst-group risk of any shared classifier, for any
/// number of groups: the best single anchor group's summed labeling
/// disagreements with everyone else, discounted pair by pair by total
/// variation and scaled by `1 / (2 (k - 1))`. Reduces to
/// [`worst_group_risk_floor`] for two groups.
pub fn multi_group_risk_floor(
    labelings: &BTreeMap<GroupId, Classifier>,
    tv: &TvMatrix,
    data: &GroupedDataset,
) -> Result<f64> {
    let groups = data.groups();
    if groups.len() < 2 {
        return Err(Error::InvalidParameter(
            "multi-group bounds need at least two groups".into(),
        ));
    }
    let scale = 1.0 / (2.0 * (groups.len() as f64 - 1.0));
    let mut best = f64::NEG_INFINITY;
    for &anchor in groups {
        let y_anchor = labelings
            .get(&anchor)
            .ok_or(Error::MissingGroupClassifier(anchor))?;
        let mut total = 0.0;
        for &other in groups {
            if other == anchor {
                continue;
            }
            let y_other = labelings
                .get(&other)
                .ok_or(Error::MissingGroupClassifier(other))?;
            total += disagreement(y_anchor, y_other, data, anchor)? - tv.get(anchor, other)?;
        }
        best = best.max(scale * total);
    }
    Ok(best)
}

/// A floor under worst-group risk measured in root-mean-square terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Bound {
    pub value: f64,
    /// Set when an unbounded divergence forced the bound to zero.
    pub vacuous: bool,
}

impl L2Bound {
    /// The same floor squared, which bounds worst-group mean-squared error.
    pub fn squared(&self) -> f64 {
        self.value * self.value
    }
}

/// Floor under the worst-group root-mean-square risk of any classifier:
/// for each group, its labeling disagreement with the other group shrunk
/// by that group's chi-square distance from the other marginal.
/// `chi_0` must be the divergence of group 0's marginal from group 1's,
/// and `chi_1` the reverse. An infinite divergence makes the bound vacuous.
pub fn l2_risk_floor(
    y0: &Classifier,
    y1: &Classifier,
    data: &GroupedDataset,
    chi_0: &DivergenceEstimate,
    chi_1: &DivergenceEstimate,
) -> Result<L2Bound> {
    binary_groups(data)?;
    for chi in [chi_0, chi_1] {
        if chi.value.is_nan() || chi.value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "chi-square divergence must be nonnegative, got {}",
                chi.value
            )));
        }
    }
    if chi_0.value.is_infinite() || chi_1.value.is_infinite() {
        return Ok(L2Bound {
            value: 0.0,
            vacuous: true,
        });
    }
    let mut value = f64::NEG_INFINITY;
    for (s, chi) in [(0, chi_0), (1, chi_1)] {
        let a = disagreement(y1, y0, data, s)?;
        let b = (chi.value + 1.0).sqrt();
        value = value.max(a / (b + 1.0));
    }
    Ok(L2Bound {
        value,
        vacuous: false,
    })
}

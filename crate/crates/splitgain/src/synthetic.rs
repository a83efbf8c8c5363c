//! Synthetic instances with known answers.
//!
//! Three generators back the validation story: a pair of shifted Gaussians
//! whose benefit of splitting is known in closed form for threshold and
//! interval classes, a three-regime taxonomy that isolates which ingredient
//! (labeling disagreement or marginal distance) drives the benefit, and a
//! degenerate point-mass construction on which no shared linear classifier
//! can serve both groups. Everything is seeded and reproducible bit for
//! bit; Gaussians are drawn by inverse-CDF transform so the documented
//! fixtures do not depend on how a sampler pairs uniforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::Classifier;
use crate::data::{GroupId, GroupedDataset, LabeledSample};
use crate::error::{Error, Result};
use crate::gauss::{std_normal_cdf, std_normal_quantile};
use crate::risk::CompensatedSum;

/// Two groups with unit-variance Gaussian features shifted to `-mu` and
/// `+mu`, labeled by mirrored threshold rules: group 0 takes label 1 on
/// `x > -mu`, group 1 on `x < mu`. Each group keeps its labels balanced,
/// yet the rules point in opposite directions, so thresholds gain a fixed
/// amount from splitting while intervals gain almost nothing once `mu`
/// grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianShiftInstance {
    mu: f64,
    n_per_group: usize,
    seed: u64,
}

impl GaussianShiftInstance {
    pub fn new(mu: f64, n_per_group: usize, seed: u64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shift must be finite and nonnegative, got {mu}"
            )));
        }
        if n_per_group == 0 {
            return Err(Error::InvalidParameter(
                "need at least one sample per group".into(),
            ));
        }
        Ok(Self {
            mu,
            n_per_group,
            seed,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_per_group(&self) -> usize {
        self.n_per_group
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Mean of the given group's feature distribution.
    fn group_mean(&self, group: GroupId) -> Result<f64> {
        match group {
            0 => Ok(-self.mu),
            1 => Ok(self.mu),
            g => Err(Error::GroupNotFound(g)),
        }
    }

    /// The group's labeling rule applied to a feature value.
    fn label(&self, group: GroupId, x: f64) -> Result<u8> {
        match group {
            0 => Ok(u8::from(x > -self.mu)),
            1 => Ok(u8::from(x < self.mu)),
            g => Err(Error::GroupNotFound(g)),
        }
    }
}

/// One standard normal draw by inverse CDF. The uniform is nudged off
/// exact zero so the quantile stays finite.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    std_normal_quantile(u)
}

/// Samples the instance: group 0's rows first, then group 1's, labels
/// assigned by the deterministic per-group rules.
pub fn gen_gaussian_shift(inst: &GaussianShiftInstance) -> GroupedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
    let mut samples = Vec::with_capacity(2 * inst.n_per_group);
    for group in [0, 1] {
        let mean = inst.group_mean(group).expect("groups 0 and 1 exist");
        for _ in 0..inst.n_per_group {
            let x = mean + standard_normal(&mut rng);
            let y = inst.label(group, x).expect("groups 0 and 1 exist");
            samples.push(LabeledSample::new(vec![x], y, group).expect("label is 0 or 1"));
        }
    }
    GroupedDataset::new(samples).expect("at least one sample per group, dimension 1")
}

/// Closed-form facts about a [`GaussianShiftInstance`] at shift `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianShiftFacts {
    /// Total variation between the two feature marginals.
    pub tv: f64,
    /// Labeling disagreement under either group's marginal.
    pub disagreement_lb: f64,
    /// Benefit of splitting for the class of one-sided thresholds.
    pub eps_threshold: f64,
    /// Upper bound on the benefit of splitting for the interval class.
    pub eps_interval_ub: f64,
}

/// Analytic oracle for the shifted-Gaussian family: `tv = 1 - 2 Phi(-mu)`,
/// the mirrored rules disagree on at least half of either group, thresholds
/// gain exactly 1/2 from splitting, and intervals gain at most
/// `exp(-2 mu^2)`. The contrast is the point of the construction: whether
/// splitting helps depends on the hypothesis class, not on the data alone.
pub fn gaussian_shift_facts(mu: f64) -> Result<GaussianShiftFacts> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "shift must be finite and nonnegative, got {mu}"
        )));
    }
    Ok(GaussianShiftFacts {
        tv: 1.0 - 2.0 * std_normal_cdf(-mu),
        disagreement_lb: 0.5,
        eps_threshold: 0.5,
        eps_interval_ub: (-2.0 * mu * mu).exp(),
    })
}

/// A Monte Carlo estimate of a population risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloRisk {
    pub mean: f64,
    pub std_err: f64,
}

/// Population risk of `h` on one group of the instance, estimated from
/// `n_mc` fresh draws (independent of the instance's own seed): the mean
/// of `|h(X) - y(X)|` and its standard error.
pub fn population_risk_mc(
    h: &Classifier,
    inst: &GaussianShiftInstance,
    group: GroupId,
    n_mc: usize,
    seed: u64,
) -> Result<MonteCarloRisk> {
    if n_mc < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 Monte Carlo draws, got {n_mc}"
        )));
    }
    let mean_x = inst.group_mean(group)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut losses = Vec::with_capacity(n_mc);
    let mut total = CompensatedSum::new();
    for _ in 0..n_mc {
        let x = mean_x + standard_normal(&mut rng);
        let y = inst.label(group, x)? as f64;
        let loss = (h.score(&[x])? - y).abs();
        losses.push(loss);
        total.add(loss);
    }
    let mean = total.value() / n_mc as f64;
    let mut sq = CompensatedSum::new();
    for loss in &losses {
        let d = loss - mean;
        sq.add(d * d);
    }
    let variance = sq.value() / (n_mc - 1) as f64;
    Ok(MonteCarloRisk {
        mean,
        std_err: (variance.max(0.0) / n_mc as f64).sqrt(),
    })
}

/// The three qualitative regimes that decide how much splitting helps:
/// groups can differ in their labeling rules, in their feature marginals,
/// or in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaxonomyRegime {
    /// One shared rule `1[x > 0]` labels both groups; the marginals sit at
    /// `-separation` and `+separation`. Splitting gains nothing.
    SimilarClassifiers,
    /// Both groups share the standard normal marginal but are labeled by
    /// opposite rules. No shared classifier can serve both, and the
    /// marginals offer no escape.
    DifferentClassifiersSimilarMarginals,
    /// Rules and marginals both differ: the shifted-Gaussian instance at
    /// shift `separation`. Whether splitting helps now depends on the
    /// hypothesis class.
    BothDifferent,
}

/// Size, separation, and seed for [`gen_taxonomy_regime`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub n_per_group: usize,
    pub separation: f64,
    pub seed: u64,
}

/// Samples one regime of the taxonomy.
pub fn gen_taxonomy_regime(regime: TaxonomyRegime, params: &RegimeParams) -> Result<GroupedDataset> {
    if params.n_per_group == 0 {
        return Err(Error::InvalidParameter(
            "need at least one sample per group".into(),
        ));
    }
    if !(params.separation.is_finite() && params.separation >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "separation must be finite and nonnegative, got {}",
            params.separation
        )));
    }
    if regime == TaxonomyRegime::BothDifferent {
        let inst = GaussianShiftInstance::new(params.separation, params.n_per_group, params.seed)?;
        return Ok(gen_gaussian_shift(&inst));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut samples = Vec::with_capacity(2 * params.n_per_group);
    for group in [0, 1] {
        for _ in 0..params.n_per_group {
            let (x, y) = match regime {
                TaxonomyRegime::SimilarClassifiers => {
                    let mean = if group == 0 {
                        -params.separation
                    } else {
                        params.separation
                    };
                    let x = mean + standard_normal(&mut rng);
                    (x, u8::from(x > 0.0))
                }
                TaxonomyRegime::DifferentClassifiersSimilarMarginals => {
                    let x = standard_normal(&mut rng);
                    let y = if group == 0 {
                        u8::from(x > 0.0)
                    } else {
                        u8::from(x < 0.0)
                    };
                    (x, y)
                }
                TaxonomyRegime::BothDifferent => unreachable!("handled above"),
            };
            samples.push(LabeledSample::new(vec![x], y, group).expect("label is 0 or 1"));
        }
    }
    Ok(GroupedDataset::new(samples).expect("at least one sample per group, dimension 1"))
}

/// Both group marginals concentrated on a single point where the two
/// optimal halfspaces disagree. Any one classifier must mislabel one
/// group's entire mass there, so the benefit of splitting is at least 1/2
/// for linear predictors in every dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseInstance {
    /// The shared support point (the first standard basis vector).
    pub x_star: Vec<f64>,
    /// Group 0's optimal rule; scores 0 at `x_star`.
    pub h0_star: Classifier,
    /// Group 1's optimal rule; scores 1 at `x_star`.
    pub h1_star: Classifier,
}

impl WorstCaseInstance {
    /// The point-mass marginals as a plain dataset: `n_per_group` copies
    /// of `x_star` per group, labeled 0 for group 0 and 1 for group 1.
    /// Empirical risks on it are exact population risks by construction.
    pub fn dataset(&self, n_per_group: usize) -> Result<GroupedDataset> {
        if n_per_group == 0 {
            return Err(Error::InvalidParameter(
                "need at least one sample per group".into(),
            ));
        }
        let mut samples = Vec::with_capacity(2 * n_per_group);
        for group in [0, 1] {
            for _ in 0..n_per_group {
                samples.push(
                    LabeledSample::new(self.x_star.clone(), group as u8, group)
                        .expect("label is 0 or 1"),
                );
            }
        }
        GroupedDataset::new(samples)
    }
}

/// The worst case for halfspaces through the origin in dimension `d`:
/// both groups sit on `e1`, group 1 wants it labeled 1 and group 0 wants
/// it labeled 0, and the two mirrored halfspaces `1[±x1 >= 0]` oblige
/// their own groups perfectly.
pub fn worst_case_linear(d: usize) -> Result<WorstCaseInstance> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    let mut neg_e1 = vec![0.0; d];
    neg_e1[0] = -1.0;
    Ok(WorstCaseInstance {
        x_star: e1.clone(),
        h0_star: Classifier::LinearThreshold {
            weights: neg_e1,
            bias: 0.0,
        },
        h1_star: Classifier::LinearThreshold {
            weights: e1,
            bias: 0.0,
        },
    })
}

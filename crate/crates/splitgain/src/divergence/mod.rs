//! Divergences between group feature distributions.
//!
//! Two total-variation routes are kept deliberately separate: an exact
//! computation on finite supports ([`tv_exact_discrete`]) and a trained
//! variational lower estimate ([`tv_variational`]) for features where exact
//! computation is meaningless (continuous features make every empirical
//! atom distinct, pushing the exact value to 1). Chi-square covers the l2
//! impossibility bound, and [`tv_gaussian_shift`] is the closed form for
//! the two-Gaussian synthetic family.

pub mod witness;

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{fold_partition, Atom};
use crate::error::{Error, Result};
use crate::gauss::std_normal_cdf;
use crate::risk::compensated_sum;

use witness::train_witness;

/// How a divergence value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceMethod {
    /// Summed exactly over a finite support.
    ExactDiscrete,
    /// Cross-validated witness objective.
    Variational,
    /// Closed form.
    Analytic,
}

/// A divergence value plus provenance; variational estimates keep their
/// per-fold held-out objectives.
#[derive(Debug, Clone)]
pub struct DivergenceEstimate {
    pub value: f64,
    pub method: DivergenceMethod,
    pub fold_values: Option<Vec<f64>>,
}

/// A probability distribution with finite support, normalized on
/// construction.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    masses: BTreeMap<Atom, f64>,
}

impl EmpiricalDistribution {
    /// Empirical measure of a sample set: each distinct feature vector gets
    /// mass proportional to its count.
    pub fn from_samples(samples: &[Vec<f64>]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("no samples for distribution".into()));
        }
        let mut counts: BTreeMap<Atom, f64> = BTreeMap::new();
        for x in samples {
            *counts.entry(Atom::new(x)).or_insert(0.0) += 1.0;
        }
        Self::from_weighted(counts)
    }

    /// Normalizes nonnegative weights into a distribution; zero-weight
    /// atoms are dropped so the support is exact.
    pub fn from_weighted(weights: impl IntoIterator<Item = (Atom, f64)>) -> Result<Self> {
        let mut masses: BTreeMap<Atom, f64> = BTreeMap::new();
        for (a, w) in weights {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "distribution weights must be finite and nonnegative, got {w}"
                )));
            }
            if w > 0.0 {
                *masses.entry(a).or_insert(0.0) += w;
            }
        }
        let total: f64 = compensated_sum(masses.values().copied());
        if total <= 0.0 {
            return Err(Error::EmptyInput("distribution has zero total mass".into()));
        }
        for v in masses.values_mut() {
            *v /= total;
        }
        Ok(Self { masses })
    }

    pub fn mass(&self, atom: &Atom) -> f64 {
        self.masses.get(atom).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.masses.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, f64)> + '_ {
        self.masses.iter().map(|(a, &m)| (a, m))
    }
}

/// Exact total variation between two finite-support distributions:
/// half the l1 distance between their mass functions.
pub fn tv_exact_discrete(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
) -> DivergenceEstimate {
    let support: BTreeSet<&Atom> = p.masses.keys().chain(q.masses.keys()).collect();
    let l1 = compensated_sum(support.iter().map(|a| (p.mass(a) - q.mass(a)).abs()));
    DivergenceEstimate {
        value: 0.5 * l1,
        method: DivergenceMethod::ExactDiscrete,
        fold_values: None,
    }
}

/// Chi-square divergence `sum_a p(a)^2 / q(a) - 1` of `p` from `q`.
///
/// Undefined when `q` misses part of `p`'s support; that is an error unless
/// `allow_infinite` is set, in which case the value is `+inf` and callers
/// are expected to flag the resulting bound as vacuous.
pub fn chi_square_discrete(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
    allow_infinite: bool,
) -> Result<DivergenceEstimate> {
    let mut terms = Vec::with_capacity(p.support_size());
    for (atom, pm) in p.iter() {
        let qm = q.mass(atom);
        if qm == 0.0 {
            if allow_infinite {
                return Ok(DivergenceEstimate {
                    value: f64::INFINITY,
                    method: DivergenceMethod::ExactDiscrete,
                    fold_values: None,
                });
            }
            return Err(Error::NotAbsolutelyContinuous);
        }
        terms.push(pm * pm / qm);
    }
    // Cauchy-Schwarz puts the sum at >= 1; guard the tiny negative slack
    // floating-point subtraction can leave.
    let value = (compensated_sum(terms) - 1.0).max(0.0);
    Ok(DivergenceEstimate {
        value,
        method: DivergenceMethod::ExactDiscrete,
        fold_values: None,
    })
}

/// Exact total variation between `N(-mu, 1)` and `N(mu, 1)`:
/// `1 - 2 Phi(-|mu|)`. A negative `mu` describes the same pair of
/// distributions, so it is folded to `|mu|`.
pub fn tv_gaussian_shift(mu: f64) -> DivergenceEstimate {
    DivergenceEstimate {
        value: 1.0 - 2.0 * std_normal_cdf(-mu.abs()),
        method: DivergenceMethod::Analytic,
        fold_values: None,
    }
}

/// Witness training settings for [`tv_variational`].
#[derive(Debug, Clone)]
pub struct TvWitnessConfig {
    /// Hidden layer widths of the witness network.
    pub hidden_layers: Vec<usize>,
    /// Full-batch adaptive-gradient epochs per fold.
    pub epochs: usize,
    pub learning_rate: f64,
    /// Cross-validation folds; the reported value averages the held-out
    /// objectives.
    pub folds: usize,
    pub seed: u64,
    /// Replace the smooth `0.5 * tanh` readout with a hard clip to
    /// `[-1/2, 1/2]`.
    pub hard_clip: bool,
}

impl Default for TvWitnessConfig {
    fn default() -> Self {
        Self {
            hidden_layers: vec![30, 15, 7],
            epochs: 1000,
            learning_rate: 0.01,
            folds: 5,
            seed: 0,
            hard_clip: false,
        }
    }
}

/// Variational total-variation estimate between two sample sets.
///
/// For each fold, a fresh witness is trained on the remaining folds of both
/// groups and scored on the held-out parts; the estimate is the mean
/// held-out objective, clamped to `[0, 1]`. Deterministic given
/// `cfg.seed`. Biased low rather than high: the witness can only ever
/// realize a fraction of the true total variation.
pub fn tv_variational(
    samples0: &[Vec<f64>],
    samples1: &[Vec<f64>],
    cfg: &TvWitnessConfig,
) -> Result<DivergenceEstimate> {
    if samples0.is_empty() || samples1.is_empty() {
        return Err(Error::EmptyInput("variational estimate needs samples from both groups".into()));
    }
    let dim = samples0[0].len();
    if dim == 0 {
        return Err(Error::EmptyInput("samples have no features".into()));
    }
    for x in samples0.iter().chain(samples1.iter()) {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
    }
    if cfg.folds < 2 {
        return Err(Error::InvalidParameter(format!(
            "cross-validation needs at least 2 folds, got {}",
            cfg.folds
        )));
    }
    for (g, n) in [(0, samples0.len()), (1, samples1.len())] {
        if n < cfg.folds {
            return Err(Error::InsufficientSamples {
                group: g,
                available: n,
                needed: cfg.folds,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let parts0 = fold_partition(samples0.len(), cfg.folds, &mut rng);
    let parts1 = fold_partition(samples1.len(), cfg.folds, &mut rng);

    let gather = |samples: &[Vec<f64>], keep: &dyn Fn(usize) -> bool| -> Vec<Vec<f64>> {
        (0..samples.len())
            .filter(|&i| keep(i))
            .map(|i| samples[i].clone())
            .collect()
    };

    let mut fold_values = Vec::with_capacity(cfg.folds);
    for j in 0..cfg.folds {
        let held0: BTreeSet<usize> = parts0[j].iter().copied().collect();
        let held1: BTreeSet<usize> = parts1[j].iter().copied().collect();
        let train0 = gather(samples0, &|i| !held0.contains(&i));
        let train1 = gather(samples1, &|i| !held1.contains(&i));
        let eval0 = gather(samples0, &|i| held0.contains(&i));
        let eval1 = gather(samples1, &|i| held1.contains(&i));
        let (net, _) = train_witness(&train0, &train1, None, cfg, &mut rng);
        fold_values.push(net.objective(&eval0, &eval1));
    }
    let value =
        (compensated_sum(fold_values.iter().copied()) / cfg.folds as f64).clamp(0.0, 1.0);
    Ok(DivergenceEstimate {
        value,
        method: DivergenceMethod::Variational,
        fold_values: Some(fold_values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(f64, f64)]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_weighted(
            pairs.iter().map(|&(x, w)| (Atom::new(&[x]), w)),
        )
        .unwrap()
    }

    #[test]
    fn empirical_distribution_counts_atoms() {
        let d = EmpiricalDistribution::from_samples(&[
            vec![1.0],
            vec![1.0],
            vec![2.0],
            vec![3.0],
        ])
        .unwrap();
        assert_eq!(d.support_size(), 3);
        assert_eq!(d.mass(&Atom::new(&[1.0])), 0.5);
        assert_eq!(d.mass(&Atom::new(&[9.0])), 0.0);
        assert!(EmpiricalDistribution::from_samples(&[]).is_err());
    }

    #[test]
    fn tv_exact_reference_values() {
        let p = dist(&[(0.0, 0.5), (1.0, 0.5)]);
        let q = dist(&[(0.0, 0.25), (1.0, 0.75)]);
        assert!((tv_exact_discrete(&p, &q).value - 0.25).abs() < 1e-15);
        assert_eq!(tv_exact_discrete(&p, &p).value, 0.0);

        let disjoint = dist(&[(7.0, 1.0)]);
        assert!((tv_exact_discrete(&p, &disjoint).value - 1.0).abs() < 1e-15);

        // Symmetry.
        let a = tv_exact_discrete(&p, &q).value;
        let b = tv_exact_discrete(&q, &p).value;
        assert_eq!(a, b);
    }

    #[test]
    fn chi_square_reference_values() {
        let p = dist(&[(0.0, 0.75), (1.0, 0.25)]);
        let q = dist(&[(0.0, 0.25), (1.0, 0.75)]);
        let v = chi_square_discrete(&p, &q, false).unwrap().value;
        assert!((v - 4.0 / 3.0).abs() < 1e-12, "got {v}");
        assert_eq!(chi_square_discrete(&p, &p, false).unwrap().value, 0.0);
    }

    #[test]
    fn chi_square_support_violation() {
        let p = dist(&[(0.0, 0.5), (1.0, 0.5)]);
        let q = dist(&[(0.0, 1.0)]);
        assert!(matches!(
            chi_square_discrete(&p, &q, false),
            Err(Error::NotAbsolutelyContinuous)
        ));
        let inf = chi_square_discrete(&p, &q, true).unwrap();
        assert!(inf.value.is_infinite());
    }

    #[test]
    fn gaussian_shift_reference_values() {
        let v = tv_gaussian_shift(2.0);
        assert!((v.value - 0.9544997361036416).abs() < 1e-9);
        assert_eq!(v.method, DivergenceMethod::Analytic);
        assert_eq!(tv_gaussian_shift(0.0).value, 0.0);
        // Symmetric in the sign of the shift.
        assert_eq!(tv_gaussian_shift(-2.0).value, tv_gaussian_shift(2.0).value);
        // Dominated by the exponential tail bound.
        for &mu in &[0.5, 1.0, 2.0, 3.0] {
            assert!(tv_gaussian_shift(mu).value >= 1.0 - 2.0 * (-mu * mu / 2.0).exp());
        }
    }

    fn bernoulli_samples(n_ones: usize, n_zeros: usize) -> Vec<Vec<f64>> {
        let mut v = vec![vec![1.0]; n_ones];
        v.extend(vec![vec![0.0]; n_zeros]);
        v
    }

    #[test]
    fn variational_tracks_exact_on_binary_support() {
        // Group 0 ~ Bernoulli(0.9), group 1 ~ Bernoulli(0.1): exact TV 0.8.
        let xs0 = bernoulli_samples(90, 10);
        let xs1 = bernoulli_samples(10, 90);
        let est = tv_variational(&xs0, &xs1, &TvWitnessConfig::default()).unwrap();
        assert!(
            (est.value - 0.8).abs() < 0.1,
            "estimate {} too far from 0.8",
            est.value
        );
        let folds = est.fold_values.unwrap();
        assert_eq!(folds.len(), 5);
        for f in folds {
            assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn variational_is_deterministic_per_seed() {
        let xs0 = bernoulli_samples(30, 10);
        let xs1 = bernoulli_samples(10, 30);
        let cfg = TvWitnessConfig {
            epochs: 50,
            seed: 123,
            ..TvWitnessConfig::default()
        };
        let a = tv_variational(&xs0, &xs1, &cfg).unwrap();
        let b = tv_variational(&xs0, &xs1, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.fold_values, b.fold_values);
        let other = tv_variational(
            &xs0,
            &xs1,
            &TvWitnessConfig {
                seed: 124,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert_ne!(a.value, other.value);
    }

    #[test]
    fn variational_input_validation() {
        let ok = bernoulli_samples(5, 5);
        assert!(tv_variational(&[], &ok, &TvWitnessConfig::default()).is_err());
        assert!(matches!(
            tv_variational(&ok, &bernoulli_samples(2, 1), &TvWitnessConfig::default()),
            Err(Error::InsufficientSamples { group: 1, .. })
        ));
        let mixed = vec![vec![0.0], vec![0.0, 1.0]];
        assert!(matches!(
            tv_variational(&mixed, &ok, &TvWitnessConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}

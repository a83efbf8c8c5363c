//! Measures how much a prediction task gains from splitting: training one
//! classifier per protected group instead of a single group-blind model.
//!
//! The headline quantity is the difference between the worst-group risk of
//! the best shared classifier and the worst-group risk achieved by
//! per-group training. The crate estimates it from data and brackets it
//! with distribution-free upper and lower bounds built from three
//! ingredients: how much the per-group optimal classifiers disagree, how
//! far apart the group feature distributions are (total variation or
//! chi-square), and a VC complexity term for the finite-sample error.
//!
//! Modules:
//!
//! * [`data`], [`classifier`], [`risk`] - samples, hypothesis classes, and
//!   the l1/l2 risk functionals everything else is defined in terms of.
//! * [`divergence`] - exact discrete total variation, a trained
//!   variational witness for continuous features, and chi-square.
//! * [`learn`] - per-group training, group-blind minimax training via a
//!   reweighting grid, and exact enumeration for small classes.
//! * [`bounds`] - the population bounds and their finite-sample versions.
//! * [`synthetic`] - analytic Gaussian instances, taxonomy regimes, and
//!   worst-case constructions for validation.
//! * [`ingest`] - CSV/ARFF loading and the preprocessing pipeline.
//!
//! The `splitgain-cli` crate chains these into an end-to-end analysis of
//! tabular files and ships the `splitgain` binary.

pub mod bounds;
pub mod classifier;
pub mod data;
pub mod divergence;
pub mod error;
mod gauss;
pub mod ingest;
pub mod learn;
pub mod risk;
pub mod synthetic;

pub use bounds::{
    complexity_omega, disagreement_upper_bound, disagreement_upper_bound_convex,
    empirical_benefit_of_splitting, finite_sample_bounds, l2_risk_floor, multi_group_risk_floor,
    multi_group_upper_bound, sample_limited_splitting, splitting_lower_bound,
    worst_group_risk_floor, BoundComponents, BoundConfig, L2Bound, PracticalOmega, SplitAnalysis,
    TvMatrix,
};
pub use classifier::{Classifier, HypothesisClass, HypothesisFamily};
pub use data::{Atom, GroupId, GroupedDataset, LabeledSample};
pub use divergence::{
    chi_square_discrete, tv_exact_discrete, tv_gaussian_shift, tv_variational,
    DivergenceEstimate, DivergenceMethod, EmpiricalDistribution, TvWitnessConfig,
};
pub use error::{Error, Result};
pub use ingest::{
    fetch_remote, load_table, manifest, preprocess, Binarization, ColumnSelector, ColumnType,
    ManifestEntry, PreprocessConfig, PreprocessReport, RawTable, TableFormat, Value,
};
pub use learn::{
    exact_minimax, train_group_blind, train_split, weighted_erm, BlindOutcome, MinimaxConfig,
    TrainConfig, TrainOutcome, WeightSelection,
};
pub use risk::{disagreement, l1_report, l1_risk, l2_report, l2_risk, LossKind, RiskReport};
pub use synthetic::{
    gaussian_shift_facts, gen_gaussian_shift, gen_taxonomy_regime, population_risk_mc,
    worst_case_linear, GaussianShiftFacts, GaussianShiftInstance, MonteCarloRisk, RegimeParams,
    TaxonomyRegime, WorstCaseInstance,
};

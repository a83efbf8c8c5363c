//! Minimal end-to-end use of the library on an in-memory dataset.

use std::collections::BTreeMap;

use splitgain::{
    empirical_benefit_of_splitting, exact_minimax, finite_sample_bounds, train_split,
    tv_exact_discrete, BoundConfig, EmpiricalDistribution, GroupedDataset, HypothesisClass,
    HypothesisFamily, LabeledSample, TrainConfig,
};

fn main() -> splitgain::Result<()> {
    // Two groups labeled by opposite rules on one binary feature.
    let mut samples = Vec::new();
    for i in 0..200u8 {
        let x = i % 2;
        samples.push(LabeledSample::new(vec![f64::from(x)], x, 0)?);
        samples.push(LabeledSample::new(vec![f64::from(x)], 1 - x, 1)?);
    }
    let data = GroupedDataset::new(samples)?;

    let class = HypothesisClass::new(HypothesisFamily::ThresholdPair)?;
    let cfg = TrainConfig::default();
    let h0 = train_split(&data, 0, &class, &cfg)?.classifier;
    let h1 = train_split(&data, 1, &class, &cfg)?.classifier;
    let split = BTreeMap::from([(0, h0.clone()), (1, h1.clone())]);
    let blind = exact_minimax(&data, &class)?;
    let gap = empirical_benefit_of_splitting(&blind, &split, &data)?;

    let tv = tv_exact_discrete(
        &EmpiricalDistribution::from_samples(&data.group_features(0)?)?,
        &EmpiricalDistribution::from_samples(&data.group_features(1)?)?,
    );
    let analysis = finite_sample_bounds(&h0, &h1, &data, &tv, &BoundConfig::new(2))?;
    println!(
        "training gap {gap}, bracketed by [{}, {}]",
        analysis.lower_bound, analysis.upper_bound
    );
    Ok(())
}

//! Synthetic dataset emission.
//!
//! Writes a generated two-group dataset as CSV next to a JSON sidecar
//! recording the generator settings, and, for the shifted-Gaussian
//! regime, the closed-form quantities the sample approximates. Output is
//! byte-identical across runs with the same settings.

use std::path::{Path, PathBuf};

use splitgain::{
    gaussian_shift_facts, gen_taxonomy_regime, Error, GroupedDataset, RegimeParams,
    TaxonomyRegime,
};

use crate::{Result, Stage};

/// Settings for [`synth_files`].
#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub regime: TaxonomyRegime,
    /// Group separation; a negative value is folded to its magnitude with
    /// a warning.
    pub mu: f64,
    pub n_per_group: usize,
    pub seed: u64,
}

/// What [`synth_files`] wrote.
#[derive(Debug, Clone)]
pub struct SynthOutcome {
    pub data_path: PathBuf,
    pub sidecar_path: PathBuf,
    pub warnings: Vec<String>,
}

/// Generates the dataset and writes it to `out` as CSV, with the sidecar
/// at the same path under a `.json` extension.
pub fn synth_files(opts: &SynthOptions, out: &Path) -> Result<SynthOutcome> {
    let mut warnings = Vec::new();
    let mut mu = opts.mu;
    if mu < 0.0 {
        mu = -mu;
        warnings.push(format!(
            "separation {} is negative; using its magnitude {mu}",
            opts.mu
        ));
    }
    let params = RegimeParams {
        n_per_group: opts.n_per_group,
        separation: mu,
        seed: opts.seed,
    };
    let data = gen_taxonomy_regime(opts.regime, &params).stage("synth")?;

    std::fs::write(out, dataset_csv(&data))
        .map_err(Error::from)
        .stage("synth")?;
    let sidecar_path = out.with_extension("json");
    std::fs::write(&sidecar_path, sidecar_json(opts.regime, mu, &params)?)
        .map_err(Error::from)
        .stage("synth")?;
    Ok(SynthOutcome {
        data_path: out.to_path_buf(),
        sidecar_path,
        warnings,
    })
}

fn dataset_csv(data: &GroupedDataset) -> String {
    let dim = data.dim();
    let mut text = String::new();
    for j in 0..dim {
        text.push_str(&format!("x{j},"));
    }
    text.push_str("group,label\n");
    for s in data.samples() {
        for v in &s.features {
            text.push_str(&format!("{v},"));
        }
        text.push_str(&format!("{},{}\n", s.group, s.label));
    }
    text
}

fn sidecar_json(regime: TaxonomyRegime, mu: f64, params: &RegimeParams) -> Result<String> {
    let mut doc = serde_json::json!({
        "regime": regime_name(regime),
        "separation": mu,
        "n_per_group": params.n_per_group,
        "seed": params.seed,
    });
    if regime == TaxonomyRegime::BothDifferent {
        let facts = gaussian_shift_facts(mu).stage("synth")?;
        doc["analytic"] = serde_json::json!({
            "tv": facts.tv,
            "disagreement_lb": facts.disagreement_lb,
            "eps_threshold": facts.eps_threshold,
            "eps_interval_ub": facts.eps_interval_ub,
        });
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("plain json object serializes");
    text.push('\n');
    Ok(text)
}

pub(crate) fn regime_name(regime: TaxonomyRegime) -> &'static str {
    match regime {
        TaxonomyRegime::SimilarClassifiers => "similar-classifiers",
        TaxonomyRegime::DifferentClassifiersSimilarMarginals => "different-classifiers",
        TaxonomyRegime::BothDifferent => "both-different",
    }
}

//! Thin wrappers around the standard normal distribution.

use statrs::distribution::{ContinuousCDF, Normal};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is always valid")
}

/// P(Z <= x) for Z standard normal.
pub(crate) fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    std_normal().cdf(x)
}

/// Inverse of [`std_normal_cdf`] on (0, 1).
pub(crate) fn std_normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

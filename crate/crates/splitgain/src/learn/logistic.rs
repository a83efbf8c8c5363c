//! L2-regularized logistic regression, fitted by full-batch gradient
//! descent with a backtracking (Armijo) line search.
//!
//! The objective is the reference one from linear-classification packages:
//!
//! ```text
//! F(w, b) = 0.5 * ||w||^2 + C * sum_i m_i * (softplus(z_i) - y_i * z_i)
//! ```
//!
//! with `z_i = w . x_i + b`, per-sample multipliers `m_i` (all 1 for plain
//! training, group reweightings otherwise), and `C` the inverse
//! regularization strength. The bias is not penalized.

use crate::classifier::sigmoid;
use crate::learn::TrainConfig;

const ARMIJO_C1: f64 = 1e-4;
const MAX_HALVINGS: u32 = 60;

#[derive(Debug, Clone)]
pub(crate) struct LogisticFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

struct Problem<'a> {
    features: &'a [&'a [f64]],
    labels: &'a [f64],
    multipliers: &'a [f64],
    cost: f64,
}

impl Problem<'_> {
    fn objective(&self, w: &[f64], b: f64) -> f64 {
        let mut loss = 0.0;
        for i in 0..self.features.len() {
            let z: f64 = self.features[i].iter().zip(w).map(|(x, wj)| x * wj).sum::<f64>() + b;
            loss += self.multipliers[i] * (softplus(z) - self.labels[i] * z);
        }
        0.5 * w.iter().map(|v| v * v).sum::<f64>() + self.cost * loss
    }

    /// Gradient with respect to (w, b), written into `gw`/returned as `gb`.
    fn gradient(&self, w: &[f64], b: f64, gw: &mut [f64]) -> f64 {
        gw.copy_from_slice(w);
        let mut gb = 0.0;
        for i in 0..self.features.len() {
            let z: f64 = self.features[i].iter().zip(w).map(|(x, wj)| x * wj).sum::<f64>() + b;
            let r = self.cost * self.multipliers[i] * (sigmoid(z) - self.labels[i]);
            for (g, x) in gw.iter_mut().zip(self.features[i]) {
                *g += r * x;
            }
            gb += r;
        }
        gb
    }
}

/// Fits from a zero initialization. `multipliers` scale each sample's loss
/// term; pass all ones for the unweighted fit.
pub(crate) fn fit(
    features: &[&[f64]],
    labels: &[f64],
    multipliers: &[f64],
    cfg: &TrainConfig,
) -> LogisticFit {
    debug_assert_eq!(features.len(), labels.len());
    debug_assert_eq!(features.len(), multipliers.len());
    let dim = features.first().map_or(0, |x| x.len());
    let prob = Problem {
        features,
        labels,
        multipliers,
        cost: cfg.regularization_strength,
    };

    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut gw = vec![0.0; dim];
    let mut value = prob.objective(&w, b);
    let mut step = 1.0_f64;
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        let gb = prob.gradient(&w, b, &mut gw);
        let grad_sq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        if grad_sq.sqrt() <= cfg.tolerance {
            converged = true;
            break;
        }

        // Backtracking line search, warm-started from the last accepted
        // step so well-conditioned problems pay one probe per iteration.
        let mut t = (step * 2.0).min(1e6);
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let wt: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - t * gi).collect();
            let bt = b - t * gb;
            let vt = prob.objective(&wt, bt);
            if vt <= value - ARMIJO_C1 * t * grad_sq {
                w = wt;
                b = bt;
                value = vt;
                step = t;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No descent direction step left at floating-point resolution.
            break;
        }
    }

    LogisticFit {
        weights: w,
        bias: b,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_cfg() -> TrainConfig {
        TrainConfig::default()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let raw: Vec<Vec<f64>> = vec![
            vec![0.5, -1.0],
            vec![-0.3, 0.8],
            vec![1.2, 0.1],
            vec![-0.9, -0.4],
        ];
        let features: Vec<&[f64]> = raw.iter().map(|v| v.as_slice()).collect();
        let labels = [1.0, 0.0, 1.0, 0.0];
        let multipliers = [1.0, 2.0, 0.5, 1.0];
        let prob = Problem {
            features: &features,
            labels: &labels,
            multipliers: &multipliers,
            cost: 1.0,
        };
        let w = [0.3, -0.7];
        let b = 0.2;
        let mut gw = vec![0.0; 2];
        let gb = prob.gradient(&w, b, &mut gw);

        let h = 1e-6;
        for j in 0..2 {
            let mut wp = w;
            wp[j] += h;
            let mut wm = w;
            wm[j] -= h;
            let numeric = (prob.objective(&wp, b) - prob.objective(&wm, b)) / (2.0 * h);
            assert!((numeric - gw[j]).abs() < 1e-6, "w[{j}]");
        }
        let numeric_b = (prob.objective(&w, b + h) - prob.objective(&w, b - h)) / (2.0 * h);
        assert!((numeric_b - gb).abs() < 1e-6);
    }

    #[test]
    fn separates_a_separable_problem() {
        // 100 points per class, margins at +-1 around the boundary x0 = 0.
        let mut raw = Vec::new();
        let mut labels = Vec::new();
        for i in 0..100 {
            let t = (i as f64) / 100.0;
            raw.push(vec![1.0 + t, t - 0.5]);
            labels.push(1.0);
            raw.push(vec![-1.0 - t, 0.5 - t]);
            labels.push(0.0);
        }
        let features: Vec<&[f64]> = raw.iter().map(|v| v.as_slice()).collect();
        let multipliers = vec![1.0; features.len()];
        let fit = fit(&features, &labels, &multipliers, &default_cfg());
        // Every sample on the right side, with sigmoid scores near 0/1:
        // mean |score - y| stays small.
        let mut l1 = 0.0;
        for (x, y) in raw.iter().zip(&labels) {
            let z: f64 = x.iter().zip(&fit.weights).map(|(a, b)| a * b).sum::<f64>() + fit.bias;
            l1 += (sigmoid(z) - y).abs();
        }
        l1 /= raw.len() as f64;
        assert!(l1 <= 0.05, "training l1 risk {l1} too high");
    }

    #[test]
    fn zero_multipliers_leave_only_the_penalty() {
        let raw = vec![vec![1.0], vec![-1.0]];
        let features: Vec<&[f64]> = raw.iter().map(|v| v.as_slice()).collect();
        let fit = fit(&features, &[1.0, 0.0], &[0.0, 0.0], &default_cfg());
        assert!(fit.weights[0].abs() < 1e-9);
        assert!(fit.bias.abs() < 1e-9);
    }
}

//! The witness network behind the variational total-variation estimate.
//!
//! Total variation has a variational form: the supremum of
//! `E_P f - E_Q f` over functions with values in `[-1/2, 1/2]`. The witness
//! is a small fully connected ReLU network whose scalar readout is squashed
//! into that range, trained by full-batch adaptive-gradient ascent on the
//! absolute mean difference between the two sample sets. Because the
//! witness range is bounded, the training objective can never exceed the
//! exact total variation of the empirical measures it is evaluated on,
//! which makes the estimate a lower bound up to sampling noise.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::risk::compensated_sum;

use super::TvWitnessConfig;

const ADAGRAD_EPS: f64 = 1e-8;

/// Fully connected network with ReLU hidden layers and a scalar readout
/// mapped into `[-1/2, 1/2]`, either smoothly (`0.5 * tanh`) or by hard
/// clipping. Parameters live in one flat vector: per layer, the row-major
/// weight matrix followed by the biases.
#[derive(Debug, Clone)]
pub struct WitnessNet {
    /// Layer widths, input first, scalar output last.
    dims: Vec<usize>,
    params: Vec<f64>,
    hard_clip: bool,
}

impl WitnessNet {
    /// Initializes weights and biases uniformly in `[-1/sqrt(fan_in), +1/sqrt(fan_in)]`.
    pub fn init(input_dim: usize, hidden: &[usize], hard_clip: bool, rng: &mut ChaCha8Rng) -> Self {
        let mut dims = Vec::with_capacity(hidden.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(hidden);
        dims.push(1);
        let mut params = Vec::new();
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            for _ in 0..fan_out * fan_in + fan_out {
                params.push(rng.gen_range(-bound..=bound));
            }
        }
        Self {
            dims,
            params,
            hard_clip,
        }
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Witness value at `x`, guaranteed to lie in `[-1/2, 1/2]`.
    pub fn output(&self, x: &[f64]) -> f64 {
        let (z, _) = self.forward(x, None);
        self.squash(z)
    }

    fn squash(&self, z: f64) -> f64 {
        if self.hard_clip {
            z.clamp(-0.5, 0.5)
        } else {
            0.5 * z.tanh()
        }
    }

    fn squash_grad(&self, z: f64) -> f64 {
        if self.hard_clip {
            if (-0.5..=0.5).contains(&z) {
                1.0
            } else {
                0.0
            }
        } else {
            let t = z.tanh();
            0.5 * (1.0 - t * t)
        }
    }

    /// Pre-squash readout; optionally records post-ReLU activations of every
    /// hidden layer for the backward pass.
    fn forward(&self, x: &[f64], mut cache: Option<&mut Vec<Vec<f64>>>) -> (f64, usize) {
        debug_assert_eq!(x.len(), self.dims[0]);
        if let Some(c) = cache.as_deref_mut() {
            c.clear();
        }
        let mut cur = x.to_vec();
        let mut off = 0;
        for (li, w) in self.dims.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &self.params[off..off + fan_out * fan_in];
            let biases = &self.params[off + fan_out * fan_in..off + fan_out * fan_in + fan_out];
            let mut next = vec![0.0; fan_out];
            for (o, slot) in next.iter_mut().enumerate() {
                let row = &weights[o * fan_in..(o + 1) * fan_in];
                let mut z = biases[o];
                for (wv, xv) in row.iter().zip(cur.iter()) {
                    z += wv * xv;
                }
                let last = li + 2 == self.dims.len();
                *slot = if last { z } else { z.max(0.0) };
            }
            off += fan_out * fan_in + fan_out;
            if li + 2 < self.dims.len() {
                if let Some(c) = cache.as_deref_mut() {
                    c.push(next.clone());
                }
            }
            cur = next;
        }
        (cur[0], off)
    }

    /// Accumulates `coeff * d output(x) / d params` into `grad`.
    fn backward(&self, x: &[f64], acts: &[Vec<f64>], z: f64, coeff: f64, grad: &mut [f64]) {
        let n_layers = self.dims.len() - 1;
        // Upstream derivative per layer output, starting at the readout.
        let mut upstream = vec![coeff * self.squash_grad(z)];
        // Walk layers backwards; recompute parameter offsets.
        let mut offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for w in self.dims.windows(2) {
            offsets.push(off);
            off += w[1] * w[0] + w[1];
        }
        for li in (0..n_layers).rev() {
            let (fan_in, fan_out) = (self.dims[li], self.dims[li + 1]);
            let base = offsets[li];
            let input: &[f64] = if li == 0 { x } else { &acts[li - 1] };
            let mut down = vec![0.0; fan_in];
            for o in 0..fan_out {
                let u = upstream[o];
                if u == 0.0 {
                    continue;
                }
                let row = base + o * fan_in;
                for i in 0..fan_in {
                    grad[row + i] += u * input[i];
                    down[i] += u * self.params[row + i];
                }
                grad[base + fan_out * fan_in + o] += u;
            }
            if li > 0 {
                // ReLU gate: zero where the activation was clipped.
                for (d, a) in down.iter_mut().zip(acts[li - 1].iter()) {
                    if *a <= 0.0 {
                        *d = 0.0;
                    }
                }
                upstream = down;
            }
        }
    }

    /// `|mean f(xs0) - mean f(xs1)|`, the quantity being maximized.
    pub fn objective(&self, xs0: &[Vec<f64>], xs1: &[Vec<f64>]) -> f64 {
        let m0 = compensated_sum(xs0.iter().map(|x| self.output(x))) / xs0.len() as f64;
        let m1 = compensated_sum(xs1.iter().map(|x| self.output(x))) / xs1.len() as f64;
        (m0 - m1).abs()
    }

    fn objective_and_grad(&self, xs0: &[Vec<f64>], xs1: &[Vec<f64>], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let m0 = compensated_sum(xs0.iter().map(|x| self.output(x))) / xs0.len() as f64;
        let m1 = compensated_sum(xs1.iter().map(|x| self.output(x))) / xs1.len() as f64;
        let sign = if m0 >= m1 { 1.0 } else { -1.0 };
        let mut acts: Vec<Vec<f64>> = Vec::new();
        for (xs, group_sign) in [(xs0, 1.0), (xs1, -1.0)] {
            let coeff = sign * group_sign / xs.len() as f64;
            for x in xs {
                let (z, _) = self.forward(x, Some(&mut acts));
                self.backward(x, &acts, z, coeff, grad);
            }
        }
        (m0 - m1).abs()
    }
}

/// Trains a witness on `(train0, train1)` and reports, per epoch, the
/// objective on `(eval0, eval1)` when an evaluation pair is supplied.
/// Returns the trained network and the recorded trace.
pub fn train_witness(
    train0: &[Vec<f64>],
    train1: &[Vec<f64>],
    eval: Option<(&[Vec<f64>], &[Vec<f64>])>,
    cfg: &TvWitnessConfig,
    rng: &mut ChaCha8Rng,
) -> (WitnessNet, Vec<f64>) {
    let dim = train0[0].len();
    let mut net = WitnessNet::init(dim, &cfg.hidden_layers, cfg.hard_clip, rng);
    let mut grad = vec![0.0; net.param_count()];
    let mut accum = vec![0.0; net.param_count()];
    let mut trace = Vec::new();
    for _ in 0..cfg.epochs {
        net.objective_and_grad(train0, train1, &mut grad);
        for i in 0..grad.len() {
            accum[i] += grad[i] * grad[i];
            net.params[i] += cfg.learning_rate * grad[i] / (accum[i].sqrt() + ADAGRAD_EPS);
        }
        if let Some((e0, e1)) = eval {
            trace.push(net.objective(e0, e1));
        }
    }
    (net, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn net_for_test(dim: usize, hidden: &[usize], seed: u64) -> WitnessNet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        WitnessNet::init(dim, hidden, false, &mut rng)
    }

    #[test]
    fn output_is_always_in_range() {
        let net = net_for_test(3, &[5, 4], 9);
        for i in 0..100 {
            let x = vec![(i as f64) * 13.7 - 500.0, -(i as f64), 3.0];
            let v = net.output(&x);
            assert!((-0.5..=0.5).contains(&v), "out of range: {v}");
        }
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut net = net_for_test(2, &[4, 3], 17);
        let xs0 = vec![vec![0.3, -1.2], vec![1.0, 0.4], vec![-0.8, 0.9]];
        let xs1 = vec![vec![-0.1, 0.2], vec![0.7, -0.6]];
        let mut grad = vec![0.0; net.param_count()];
        net.objective_and_grad(&xs0, &xs1, &mut grad);

        let h = 1e-6;
        for i in 0..net.param_count() {
            let orig = net.params[i];
            net.params[i] = orig + h;
            let up = net.objective(&xs0, &xs1);
            net.params[i] = orig - h;
            let down = net.objective(&xs0, &xs1);
            net.params[i] = orig;
            let numeric = (up - down) / (2.0 * h);
            assert!(
                (numeric - grad[i]).abs() < 1e-5,
                "param {i}: numeric {numeric} vs backprop {}",
                grad[i]
            );
        }
    }

    #[test]
    fn training_separates_distant_clouds() {
        let cfg = TvWitnessConfig {
            epochs: 300,
            ..TvWitnessConfig::default()
        };
        let xs0: Vec<Vec<f64>> = (0..50).map(|i| vec![-5.0 + 0.001 * i as f64]).collect();
        let xs1: Vec<Vec<f64>> = (0..50).map(|i| vec![5.0 - 0.001 * i as f64]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (net, _) = train_witness(&xs0, &xs1, None, &cfg, &mut rng);
        assert!(net.objective(&xs0, &xs1) > 0.9);
    }

    #[test]
    fn hard_clip_mode_stays_in_range_and_trains() {
        let cfg = TvWitnessConfig {
            epochs: 300,
            hard_clip: true,
            ..TvWitnessConfig::default()
        };
        let xs0: Vec<Vec<f64>> = (0..40).map(|_| vec![-3.0]).collect();
        let xs1: Vec<Vec<f64>> = (0..40).map(|_| vec![3.0]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (net, _) = train_witness(&xs0, &xs1, None, &cfg, &mut rng);
        let v = net.output(&[-3.0]);
        assert!((-0.5..=0.5).contains(&v));
        assert!(net.objective(&xs0, &xs1) > 0.9);
    }
}

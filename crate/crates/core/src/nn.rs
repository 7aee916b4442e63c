// SPDX-License-Identifier: Apache-2.0

//! A small dense-network toolkit: fully connected layers, reverse-mode
//! gradients and Adam, all in `f64`.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("forward cache is stale: network changed since the forward pass")]
    StaleCache,
    #[error("parameters became non-finite")]
    NonFinite,
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Identity,
    Softmax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    /// Row-major `outputs x inputs`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    fn affine(&self, x: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|o| {
                let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
                self.bias[o] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }
}

/// Uniform Xavier/Glorot weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
pub fn xavier_init<R: Rng + ?Sized>(fan_in: usize, fan_out: usize, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>), NnError> {
    if fan_in == 0 || fan_out == 0 {
        return Err(NnError::Argument(format!("layer shape {fan_out}x{fan_in} has a zero dimension")));
    }
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let weights = (0..fan_in * fan_out).map(|_| rng.gen_range(-bound..=bound)).collect();
    Ok((weights, vec![0.0; fan_out]))
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

/// Activations recorded by [`Mlp::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    version: u64,
    /// Input to each layer, then the network output.
    values: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.values.last().expect("at least the input")
    }
}

/// Per-layer weight and bias gradients, shaped like the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Gradients {
        Gradients { layers: net.layers.iter().map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()])).collect() }
    }

    pub fn add_scaled(&mut self, other: &Gradients, scale: f64) {
        for ((w, b), (ow, ob)) in self.layers.iter_mut().zip(&other.layers) {
            w.iter_mut().zip(ow).for_each(|(a, o)| *a += scale * o);
            b.iter_mut().zip(ob).for_each(|(a, o)| *a += scale * o);
        }
    }

    pub fn norm(&self) -> f64 {
        self.layers.iter().flat_map(|(w, b)| w.iter().chain(b)).map(|g| g * g).sum::<f64>().sqrt()
    }

    /// Rescales to at most `max_norm`; returns the norm before clipping.
    pub fn clip(&mut self, max_norm: f64) -> f64 {
        let norm = self.norm();
        if norm > max_norm && norm > 0.0 {
            let s = max_norm / norm;
            for (w, b) in &mut self.layers {
                w.iter_mut().chain(b.iter_mut()).for_each(|g| *g *= s);
            }
        }
        norm
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<DenseLayer>,
    /// Bumped on every parameter change so stale caches can be detected.
    #[serde(skip)]
    version: u64,
}

impl Mlp {
    /// Rectifier hidden layers followed by a head with `head` activation.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], head: Activation, rng: &mut R) -> Result<Mlp, NnError> {
        if sizes.len() < 2 {
            return Err(NnError::Argument("a network needs an input and an output size".into()));
        }
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for (i, w) in sizes.windows(2).enumerate() {
            let (weights, bias) = xavier_init(w[0], w[1], rng)?;
            let activation = if i + 2 == sizes.len() { head } else { Activation::Relu };
            layers.push(DenseLayer { inputs: w[0], outputs: w[1], weights, bias, activation });
        }
        Ok(Mlp { layers, version: 0 })
    }

    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Mlp, NnError> {
        for (i, l) in layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(NnError::Argument(format!("layer {i} parameter sizes do not match its shape")));
            }
        }
        if layers.windows(2).any(|w| w[0].outputs != w[1].inputs) {
            return Err(NnError::Argument("adjacent layer sizes disagree".into()));
        }
        if layers.is_empty() {
            return Err(NnError::Argument("no layers".into()));
        }
        Ok(Mlp { layers, version: 0 })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").outputs
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardCache), NnError> {
        if x.len() != self.input_dim() {
            return Err(NnError::Argument(format!("expected {} inputs, got {}", self.input_dim(), x.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(NnError::Argument("non-finite input".into()));
        }
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        values.push(x.to_vec());
        for layer in &self.layers {
            let z = layer.affine(values.last().expect("input pushed"));
            let a = match layer.activation {
                Activation::Relu => z.into_iter().map(|v| v.max(0.0)).collect(),
                Activation::Identity => z,
                Activation::Softmax => softmax(&z),
            };
            values.push(a);
        }
        let out = values.last().expect("output pushed").clone();
        Ok((out, ForwardCache { version: self.version, values }))
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        self.forward(x).map(|(y, _)| y)
    }

    /// Gradients of a scalar loss given its gradient with respect to the
    /// network output.
    pub fn backward(&self, cache: &ForwardCache, grad_out: &[f64]) -> Result<Gradients, NnError> {
        if cache.version != self.version || cache.values.len() != self.layers.len() + 1 {
            return Err(NnError::StaleCache);
        }
        if grad_out.len() != self.output_dim() {
            return Err(NnError::Argument(format!("expected {} output gradients, got {}", self.output_dim(), grad_out.len())));
        }
        let mut grads = Gradients::zeros_like(self);
        let mut g = grad_out.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let out = &cache.values[i + 1];
            // Gradient with respect to the pre-activation.
            let dz: Vec<f64> = match layer.activation {
                Activation::Relu => g.iter().zip(out).map(|(g, a)| if *a > 0.0 { *g } else { 0.0 }).collect(),
                Activation::Identity => g,
                Activation::Softmax => {
                    let dot: f64 = g.iter().zip(out).map(|(g, p)| g * p).sum();
                    out.iter().zip(&g).map(|(p, g)| p * (g - dot)).collect()
                }
            };
            let input = &cache.values[i];
            let (gw, gb) = &mut grads.layers[i];
            for o in 0..layer.outputs {
                gb[o] = dz[o];
                for j in 0..layer.inputs {
                    gw[o * layer.inputs + j] = dz[o] * input[j];
                }
            }
            g = (0..layer.inputs)
                .map(|j| (0..layer.outputs).map(|o| layer.weights[o * layer.inputs + j] * dz[o]).sum())
                .collect();
        }
        Ok(grads)
    }

    /// Visits every parameter in a fixed order.
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.version += 1;
        self.layers.iter_mut().flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(|p| p.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(net: &Mlp) -> Adam {
        let n = net.num_params();
        Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8, step: 0, m: vec![0.0; n], v: vec![0.0; n] }
    }

    pub fn update(&mut self, net: &mut Mlp, grads: &Gradients, lr: f64) -> Result<(), NnError> {
        let shapes_match = grads.layers.len() == net.layers.len()
            && grads.layers.iter().zip(&net.layers).all(|((w, b), l)| w.len() == l.weights.len() && b.len() == l.bias.len());
        if !shapes_match || self.m.len() != net.num_params() {
            return Err(NnError::Argument("gradient or optimizer shape does not match the network".into()));
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let flat = grads.layers.iter().flat_map(|(w, b)| w.iter().chain(b));
        for ((p, g), (m, v)) in net.params_mut().zip(flat).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
        if net.is_finite() {
            Ok(())
        } else {
            Err(NnError::NonFinite)
        }
    }
}

const CHECKPOINT_FORMAT: u32 = 1;

/// A network with its optimizer state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: u32,
    pub network: Mlp,
    pub optimizer: Adam,
}

impl Checkpoint {
    pub fn new(network: Mlp, optimizer: Adam) -> Checkpoint {
        Checkpoint { format: CHECKPOINT_FORMAT, network, optimizer }
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        let text = serde_json::to_string(self).map_err(|e| NnError::Format(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, NnError> {
        let text = std::fs::read_to_string(path)?;
        let c: Checkpoint = serde_json::from_str(&text).map_err(|e| NnError::Format(e.to_string()))?;
        if c.format != CHECKPOINT_FORMAT {
            return Err(NnError::Format(format!("unsupported checkpoint format {}", c.format)));
        }
        let network = Mlp::from_layers(c.network.layers)?;
        if c.optimizer.m.len() != network.num_params() || c.optimizer.v.len() != network.num_params() {
            return Err(NnError::Format("optimizer state does not match the network".into()));
        }
        Ok(Checkpoint { format: c.format, network, optimizer: c.optimizer })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn xavier_bound_for_7_by_20() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (w, b) = xavier_init(7, 20, &mut rng).unwrap();
        let bound = (6.0f64 / 27.0).sqrt();
        assert!((bound - 0.4714).abs() < 1e-4);
        assert!(w.iter().all(|v| v.abs() <= bound));
        assert!(b.iter().all(|&v| v == 0.0));
        let (w2, _) = xavier_init(7, 20, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(w, w2);
        assert!(xavier_init(0, 3, &mut rng).is_err());
    }

    #[test]
    fn zero_network_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut actor = Mlp::new(&[7, 20, 20, 7], Activation::Softmax, &mut rng).unwrap();
        actor.params_mut().for_each(|p| *p = 0.0);
        let p = actor.predict(&[0.3; 7]).unwrap();
        assert!(p.iter().all(|v| (v - 1.0 / 7.0).abs() < 1e-15));
        let mut critic = Mlp::new(&[7, 10, 1], Activation::Identity, &mut rng).unwrap();
        critic.params_mut().for_each(|p| *p = 0.0);
        assert_eq!(critic.predict(&[1.0; 7]).unwrap(), vec![0.0]);
    }

    #[test]
    fn linear_layer_weight_gradient_is_the_input() {
        let layer = DenseLayer { inputs: 3, outputs: 1, weights: vec![0.5, -1.0, 2.0], bias: vec![0.1], activation: Activation::Identity };
        let net = Mlp::from_layers(vec![layer]).unwrap();
        let x = [1.5, -2.0, 0.25];
        let (_, cache) = net.forward(&x).unwrap();
        let g = net.backward(&cache, &[1.0]).unwrap();
        assert_eq!(g.layers[0].0, x.to_vec());
        assert_eq!(g.layers[0].1, vec![1.0]);
        let zero = net.backward(&cache, &[0.0]).unwrap();
        assert!(zero.norm() == 0.0);
    }

    #[test]
    fn stale_cache_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = Mlp::new(&[7, 4, 1], Activation::Identity, &mut rng).unwrap();
        let (_, cache) = net.forward(&[0.5; 7]).unwrap();
        let g = net.backward(&cache, &[1.0]).unwrap();
        Adam::new(&net).update(&mut net, &g, 0.01).unwrap();
        assert!(matches!(net.backward(&cache, &[1.0]), Err(NnError::StaleCache)));
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = Mlp::new(&[2, 2], Activation::Softmax, &mut rng).unwrap();
        assert!(net.forward(&[f64::NAN, 0.0]).is_err());
        assert!(net.forward(&[0.0]).is_err());
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut net = Mlp::new(&[3, 2], Activation::Identity, &mut rng).unwrap();
        let before: Vec<f64> = net.params().copied().collect();
        let mut g = Gradients::zeros_like(&net);
        let mut adam = Adam::new(&net);
        adam.update(&mut net, &g, 0.01).unwrap();
        assert_eq!(net.params().copied().collect::<Vec<_>>(), before);

        let mut net = Mlp::new(&[3, 2], Activation::Identity, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        for (k, (w, b)) in g.layers.iter_mut().enumerate() {
            w.iter_mut().chain(b.iter_mut()).enumerate().for_each(|(i, v)| *v = (i as f64 - 3.5) * 10f64.powi(k as i32 + i as i32 % 4 - 2));
        }
        let mut adam = Adam::new(&net);
        adam.update(&mut net, &g, 0.01).unwrap();
        for (p, q) in net.params().zip(&before) {
            assert!(((p - q).abs() - 0.01).abs() < 1e-6);
        }
        let after_one: Vec<f64> = net.params().copied().collect();
        adam.update(&mut net, &g, 0.01).unwrap();
        assert_ne!(net.params().copied().collect::<Vec<_>>(), after_one);
        assert_eq!(adam.step, 2);
    }

    #[test]
    fn adam_rejects_mismatched_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut net = Mlp::new(&[3, 2], Activation::Identity, &mut rng).unwrap();
        let other = Mlp::new(&[3, 4, 2], Activation::Identity, &mut rng).unwrap();
        let g = Gradients::zeros_like(&other);
        assert!(Adam::new(&net).update(&mut net, &g, 0.01).is_err());
    }
}

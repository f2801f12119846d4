//! Fully connected feed-forward networks with logistic units.
//!
//! Weights of each non-input layer are stored row-major: one row per
//! neuron, one column per neuron of the previous layer plus a trailing
//! bias column whose input is always 1. Training is plain gradient
//! descent on `½‖output − target‖²`, either after every sample
//! (incremental) or once per epoch on the averaged gradient (batch).
//!
//! During training the logistic derivative `o·(1 − o)` is evaluated with
//! `o` clamped to `[clip, 1 − clip]` (see [`TrainConfig::derivative_clip`]).
//! Without it, an output unit that starts out saturated on the wrong side
//! has a vanishing derivative and the sample is never learned; the clamp
//! keeps a floor under the step size. [`Network::gradient`] is always the
//! exact derivative.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_HIDDEN: usize = 24;
pub const DEFAULT_DERIVATIVE_CLIP: f64 = 0.01;

#[inline]
pub fn activation(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

/// Gradient of the loss with respect to every weight, shaped like
/// [`Network::weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient(pub Vec<Vec<f64>>);

impl Gradient {
    fn zeros_like(net: &Network) -> Self {
        Gradient(net.weights.iter().map(|w| vec![0.0; w.len()]).collect())
    }

    pub fn flat(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().flatten().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearningMode {
    Incremental,
    Batch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub mode: LearningMode,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Initial weights are drawn from `[-init_range, init_range]`.
    pub init_range: f64,
    pub seed: u64,
    /// Reshuffle the samples before every incremental epoch.
    #[serde(default)]
    pub shuffle: bool,
    /// Activations are clamped to `[derivative_clip, 1 − derivative_clip]`
    /// when the logistic derivative is formed during training. `0` gives
    /// textbook back-propagation.
    pub derivative_clip: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            mode: LearningMode::Incremental,
            learning_rate: 0.5,
            epochs: 1500,
            init_range: 0.5,
            seed: 0,
            shuffle: false,
            derivative_clip: DEFAULT_DERIVATIVE_CLIP,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning rate must be positive"));
        }
        if !(self.init_range >= 0.0 && self.init_range.is_finite()) {
            return Err(Error::config("init range must be a finite non-negative half-width"));
        }
        if !(0.0..0.5).contains(&self.derivative_clip) {
            return Err(Error::config("derivative clip must lie in [0, 0.5)"));
        }
        Ok(())
    }
}

impl Network {
    /// A network with every weight drawn uniformly from
    /// `[-init_range, init_range]`.
    pub fn init(layer_sizes: &[usize], seed: u64, init_range: f64) -> Result<Self> {
        Self::check_sizes(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = layer_sizes
            .windows(2)
            .map(|w| {
                (0..w[1] * (w[0] + 1))
                    .map(|_| rng.gen_range(-init_range..=init_range))
                    .collect()
            })
            .collect();
        Ok(Network {
            layer_sizes: layer_sizes.to_vec(),
            weights,
        })
    }

    pub fn from_weights(layer_sizes: Vec<usize>, weights: Vec<Vec<f64>>) -> Result<Self> {
        Self::check_sizes(&layer_sizes)?;
        if weights.len() != layer_sizes.len() - 1 {
            return Err(Error::domain(format!(
                "{} weight matrices for {} layers",
                weights.len(),
                layer_sizes.len()
            )));
        }
        for (l, (w, pair)) in weights.iter().zip(layer_sizes.windows(2)).enumerate() {
            if w.len() != pair[1] * (pair[0] + 1) {
                return Err(Error::domain(format!(
                    "layer {} has {} weights, expected {}",
                    l + 1,
                    w.len(),
                    pair[1] * (pair[0] + 1)
                )));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("layer {} has non-finite weights", l + 1)));
            }
        }
        Ok(Network {
            layer_sizes,
            weights,
        })
    }

    fn check_sizes(sizes: &[usize]) -> Result<()> {
        if sizes.len() < 2 {
            return Err(Error::config("a network needs at least an input and an output layer"));
        }
        if sizes.contains(&0) {
            return Err(Error::config("layer sizes must be positive"));
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.weights
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut acts = self.activations_buffer();
        self.forward_into(input, &mut acts);
        Ok(acts.pop().unwrap())
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::domain(format!(
                "input has {} components, network expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    fn activations_buffer(&self) -> Vec<Vec<f64>> {
        self.layer_sizes.iter().map(|&n| vec![0.0; n]).collect()
    }

    fn forward_into(&self, input: &[f64], acts: &mut [Vec<f64>]) {
        acts[0].copy_from_slice(input);
        for (l, w) in self.weights.iter().enumerate() {
            let (prev, next) = acts.split_at_mut(l + 1);
            let x = &prev[l];
            let cols = x.len() + 1;
            for (out, row) in next[0].iter_mut().zip(w.chunks_exact(cols)) {
                let sum: f64 = row[..cols - 1].iter().zip(x).map(|(w, x)| w * x).sum();
                *out = activation(sum + row[cols - 1]);
            }
        }
    }

    /// Fills `deltas[l]` with ∂loss/∂net_input for every neuron of weight
    /// layer `l`, given forward activations already in `acts`. A non-zero
    /// `clip` clamps activations inside the logistic derivative.
    fn backward(&self, target: &[f64], acts: &[Vec<f64>], clip: f64, deltas: &mut [Vec<f64>]) {
        let slope = |o: f64| {
            let o = o.clamp(clip, 1.0 - clip);
            o * (1.0 - o)
        };
        let last = self.weights.len() - 1;
        for ((d, &o), &t) in deltas[last].iter_mut().zip(&acts[last + 1]).zip(target) {
            *d = (o - t) * slope(o);
        }
        for l in (0..last).rev() {
            let (lower, upper) = deltas.split_at_mut(l + 1);
            let above = &upper[0];
            let w = &self.weights[l + 1];
            let cols = self.layer_sizes[l + 1] + 1;
            for (i, d) in lower[l].iter_mut().enumerate() {
                let back: f64 = above
                    .iter()
                    .enumerate()
                    .map(|(j, dj)| dj * w[j * cols + i])
                    .sum();
                *d = back * slope(acts[l + 1][i]);
            }
        }
    }

    /// Adds `scale · ∂loss/∂w` to `acc`.
    fn accumulate(acts: &[Vec<f64>], deltas: &[Vec<f64>], scale: f64, acc: &mut [Vec<f64>]) {
        for (l, g) in acc.iter_mut().enumerate() {
            let x = &acts[l];
            let cols = x.len() + 1;
            for (row, &d) in g.chunks_exact_mut(cols).zip(&deltas[l]) {
                let sd = scale * d;
                for (gw, xi) in row[..cols - 1].iter_mut().zip(x) {
                    *gw += sd * xi;
                }
                row[cols - 1] += sd;
            }
        }
    }

    /// ∂(½‖forward(input) − target‖²)/∂w for every weight.
    pub fn gradient(&self, sample: &Sample) -> Result<Gradient> {
        self.training_gradient(sample, 0.0)
    }

    /// The per-sample step direction used by [`Network::train`] for a
    /// given [`TrainConfig::derivative_clip`]; equal to
    /// [`Network::gradient`] when `clip` is 0 or no activation is clamped.
    pub fn training_gradient(&self, sample: &Sample, clip: f64) -> Result<Gradient> {
        self.check_sample(sample)?;
        let mut acts = self.activations_buffer();
        let mut deltas = self.activations_buffer().split_off(1);
        self.forward_into(&sample.input, &mut acts);
        self.backward(&sample.target, &acts, clip, &mut deltas);
        let mut grad = Gradient::zeros_like(self);
        Self::accumulate(&acts, &deltas, 1.0, &mut grad.0);
        Ok(grad)
    }

    fn check_sample(&self, sample: &Sample) -> Result<()> {
        self.check_input(&sample.input)?;
        if sample.target.len() != self.output_dim() {
            return Err(Error::domain(format!(
                "target has {} components, network produces {}",
                sample.target.len(),
                self.output_dim()
            )));
        }
        Ok(())
    }

    /// Subtracts `learning_rate · grad` from the weights.
    pub fn apply(&mut self, grad: &Gradient, learning_rate: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grad.0) {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= learning_rate * gi;
            }
        }
    }

    /// Mean over samples and output components of the squared error.
    pub fn mse(&self, data: &[Sample]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::domain("mse of an empty data set"));
        }
        let mut acts = self.activations_buffer();
        let mut total = 0.0;
        for s in data {
            self.check_sample(s)?;
            self.forward_into(&s.input, &mut acts);
            total += squared_error(acts.last().unwrap(), &s.target);
        }
        Ok(total / (data.len() * self.output_dim()) as f64)
    }

    pub fn train(&self, data: &[Sample], cfg: &TrainConfig) -> Result<Network> {
        self.train_with_progress(data, cfg, |_, _| {})
    }

    /// Trains a copy of `self`. `progress` receives the 1-based epoch and
    /// the mean squared error seen during that epoch (measured before each
    /// incremental update, at the epoch's starting weights in batch mode).
    pub fn train_with_progress(
        &self,
        data: &[Sample],
        cfg: &TrainConfig,
        mut progress: impl FnMut(usize, f64),
    ) -> Result<Network> {
        cfg.validate()?;
        if data.is_empty() {
            return Err(Error::domain("cannot train on an empty data set"));
        }
        for s in data {
            self.check_sample(s)?;
        }

        let mut net = self.clone();
        let mut acts = net.activations_buffer();
        let mut deltas = net.activations_buffer().split_off(1);
        let mut grad = Gradient::zeros_like(&net);
        let mut order: Vec<usize> = (0..data.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed_5eed_5eed);
        let denom = (data.len() * net.output_dim()) as f64;

        for epoch in 1..=cfg.epochs {
            let mut loss = 0.0;
            match cfg.mode {
                LearningMode::Incremental => {
                    if cfg.shuffle {
                        order.shuffle(&mut rng);
                    }
                    for &i in &order {
                        let s = &data[i];
                        net.forward_into(&s.input, &mut acts);
                        loss += squared_error(acts.last().unwrap(), &s.target);
                        net.backward(&s.target, &acts, cfg.derivative_clip, &mut deltas);
                        net.step(&acts, &deltas, cfg.learning_rate);
                    }
                }
                LearningMode::Batch => {
                    grad.0.iter_mut().for_each(|g| g.fill(0.0));
                    let scale = 1.0 / data.len() as f64;
                    for s in data {
                        net.forward_into(&s.input, &mut acts);
                        loss += squared_error(acts.last().unwrap(), &s.target);
                        net.backward(&s.target, &acts, cfg.derivative_clip, &mut deltas);
                        Self::accumulate(&acts, &deltas, scale, &mut grad.0);
                    }
                    net.apply(&grad, cfg.learning_rate);
                }
            }
            let epoch_mse = loss / denom;
            if !epoch_mse.is_finite() || net.weights.iter().flatten().any(|w| !w.is_finite()) {
                return Err(Error::Diverged { epoch });
            }
            progress(epoch, epoch_mse);
        }
        Ok(net)
    }

    /// In-place descent step from freshly computed deltas.
    fn step(&mut self, acts: &[Vec<f64>], deltas: &[Vec<f64>], learning_rate: f64) {
        Self::accumulate(acts, deltas, -learning_rate, &mut self.weights);
    }
}

fn squared_error(output: &[f64], target: &[f64]) -> f64 {
    output.iter().zip(target).map(|(o, t)| (o - t) * (o - t)).sum()
}

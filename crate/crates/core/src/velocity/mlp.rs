//! A small feedforward velocity field trained by conditional flow matching.
//!
//! The network maps `[x, t]` to a velocity in `R^d`. The architecture is
//! fixed (dense layers, smooth activation, time fed as an extra scalar
//! input) so that reverse-mode derivatives for the weights and for the input
//! vector-Jacobian product are hand-derived — no autodiff engine.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::VelocityField;
use crate::error::FieldError;
use crate::scheduler::Scheduler;

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Silu,
}

impl Activation {
    fn parse(name: &str) -> Result<Self, FieldError> {
        match name {
            "tanh" => Ok(Activation::Tanh),
            "silu" => Ok(Activation::Silu),
            other => Err(FieldError::Config(format!("unknown activation `{other}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Silu => "silu",
        }
    }

    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Silu => z / (1.0 + (-z).exp()),
        }
    }

    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Silu => {
                let s = 1.0 / (1.0 + (-z).exp());
                s * (1.0 + z * (1.0 - s))
            }
        }
    }
}

/// Dense feedforward network. `dims` are the layer widths including the
/// input (`d + 1`, for the time feature) and output (`d`). Hidden layers use
/// the activation; the output layer is linear. Weights are stored flat, per
/// layer as a row-major matrix followed by the bias.
#[derive(Clone, Debug)]
pub struct Mlp {
    dims: Vec<usize>,
    activation: Activation,
    weights: Vec<f64>,
}

impl Mlp {
    pub fn init(dims: Vec<usize>, activation: Activation, rng: &mut ChaCha8Rng) -> Self {
        assert!(dims.len() >= 2);
        let count = param_count(&dims);
        let mut weights = Vec::with_capacity(count);
        for l in 1..dims.len() {
            let (fan_in, fan_out) = (dims[l - 1], dims[l]);
            let scale = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                weights.push(rng.random_range(-scale..scale));
            }
            weights.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Mlp {
            dims,
            activation,
            weights,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_params(&self) -> usize {
        self.weights.len()
    }

    fn layer_offsets(&self) -> Vec<(usize, usize, usize, usize)> {
        // (weight offset, bias offset, fan_in, fan_out) per layer
        let mut out = Vec::with_capacity(self.dims.len() - 1);
        let mut off = 0;
        for l in 1..self.dims.len() {
            let (fi, fo) = (self.dims[l - 1], self.dims[l]);
            out.push((off, off + fi * fo, fi, fo));
            off += fi * fo + fo;
        }
        out
    }

    /// Forward pass, returning all layer activations (cache[0] is the input).
    fn forward_cached(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let layers = self.layer_offsets();
        let last = layers.len() - 1;
        let mut cache = Vec::with_capacity(layers.len() + 1);
        cache.push(input.to_vec());
        for (l, &(w_off, b_off, fi, fo)) in layers.iter().enumerate() {
            let prev = cache.last().unwrap();
            let mut z = vec![0.0; fo];
            for (k, zk) in z.iter_mut().enumerate() {
                let row = &self.weights[w_off + k * fi..w_off + (k + 1) * fi];
                *zk = crate::linalg::dot(row, prev) + self.weights[b_off + k];
            }
            if l < last {
                for zk in z.iter_mut() {
                    *zk = self.activation.apply(*zk);
                }
            }
            cache.push(z);
        }
        cache
    }

    pub fn forward(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut input = x.to_vec();
        input.push(t);
        self.forward_cached(&input).pop().unwrap()
    }

    /// Accumulates weight gradients for one sample given the cotangent of the
    /// output, and returns the cotangent of the input.
    fn backward(&self, cache: &[Vec<f64>], out_cot: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let layers = self.layer_offsets();
        let last = layers.len() - 1;
        let mut g = out_cot.to_vec();
        for (l, &(w_off, b_off, fi, fo)) in layers.iter().enumerate().rev() {
            // Activation values feeding this layer and its own outputs.
            let below = &cache[l];
            if l < last {
                // cache[l + 1] holds sigma(z); recover sigma'(z) from it for
                // tanh, otherwise recompute z. Recomputing is simplest and
                // cheap at this size: z = W a + b.
                for (k, gk) in g.iter_mut().enumerate() {
                    let row = &self.weights[w_off + k * fi..w_off + (k + 1) * fi];
                    let z = crate::linalg::dot(row, below) + self.weights[b_off + k];
                    *gk *= self.activation.derivative(z);
                }
            }
            for k in 0..fo {
                let gk = g[k];
                let row = &mut grad[w_off + k * fi..w_off + (k + 1) * fi];
                crate::linalg::axpy(gk, below, row);
                grad[b_off + k] += gk;
            }
            // Cotangent of the layer input: W^T g.
            let mut g_below = vec![0.0; fi];
            for k in 0..fo {
                let row = &self.weights[w_off + k * fi..w_off + (k + 1) * fi];
                crate::linalg::axpy(g[k], row, &mut g_below);
            }
            g = g_below;
        }
        g
    }

    /// `w^T dv/dx` at `(t, x)` (time input excluded from the cotangent).
    pub fn input_vjp(&self, t: f64, x: &[f64], w: &[f64]) -> Vec<f64> {
        let mut input = x.to_vec();
        input.push(t);
        let cache = self.forward_cached(&input);
        let mut scratch = vec![0.0; self.weights.len()];
        let mut g = self.backward(&cache, w, &mut scratch);
        g.truncate(x.len());
        g
    }
}

fn param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// Training hyperparameters. One seed controls the data draws, the weight
/// initialization, and the batch order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub activation: String,
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: vec![96, 96],
            activation: "tanh".into(),
            steps: 3000,
            batch_size: 128,
            learning_rate: 2e-3,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), FieldError> {
        if self.hidden.is_empty() || self.hidden.iter().any(|&h| h == 0) {
            return Err(FieldError::Config("hidden widths must be positive".into()));
        }
        if self.hidden.iter().any(|&h| h > 128) {
            return Err(FieldError::Config("hidden width capped at 128".into()));
        }
        if self.batch_size == 0 {
            return Err(FieldError::Config("batch size must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(FieldError::Config("learning rate must be positive".into()));
        }
        Activation::parse(&self.activation)?;
        Ok(())
    }
}

/// A source of endpoint pairs `(X_0, X_1)` under the independent coupling.
pub trait PairSource: Send + Sync {
    fn dim(&self) -> usize;
    fn draw(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>);
}

/// Pair source backed by a closure, mostly for tests.
pub struct FnPairs<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> PairSource for FnPairs<F>
where
    F: Fn(&mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn draw(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        (self.f)(rng)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainLog {
    /// Loss on a held-out batch before / after training.
    pub heldout_initial: f64,
    pub heldout_final: f64,
    /// Running-average training loss sampled every few steps.
    pub curve: Vec<(usize, f64)>,
}

/// The trained velocity field together with its training metadata.
#[derive(Clone, Debug)]
pub struct MlpField {
    mlp: Mlp,
    dim: usize,
    scheduler_name: String,
    seed: u64,
}

impl MlpField {
    pub fn mlp(&self) -> &Mlp {
        &self.mlp
    }

    pub fn scheduler_name(&self) -> &str {
        &self.scheduler_name
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl VelocityField for MlpField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        self.mlp.forward(t, x)
    }
    fn input_vjp(&self, t: f64, x: &[f64], w: &[f64]) -> Result<Vec<f64>, FieldError> {
        Ok(self.mlp.input_vjp(t, x, w))
    }
    fn has_input_vjp(&self) -> bool {
        true
    }
}

/// Squared-error conditional flow-matching loss on a prepared batch of
/// `(t, x_t, target)` triples: mean over the batch of `||v(t, x_t) - target||^2`.
pub fn cfm_batch_loss(mlp: &Mlp, batch: &[(f64, Vec<f64>, Vec<f64>)]) -> f64 {
    let mut total = 0.0;
    for (t, xt, target) in batch {
        let v = mlp.forward(*t, xt);
        total += v
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    total / batch.len() as f64
}

fn draw_batch(
    source: &dyn PairSource,
    sched: &Scheduler,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(f64, Vec<f64>, Vec<f64>)> {
    (0..n)
        .map(|_| {
            let (x0, x1) = source.draw(rng);
            let t: f64 = rng.random_range(0.0..1.0);
            let (a, b) = (sched.alpha(t), sched.beta(t));
            let (ad, bd) = (sched.alpha_dot(t), sched.beta_dot(t));
            let xt: Vec<f64> = x1.iter().zip(&x0).map(|(p, q)| a * p + b * q).collect();
            let target: Vec<f64> = x1.iter().zip(&x0).map(|(p, q)| ad * p + bd * q).collect();
            (t, xt, target)
        })
        .collect()
}

/// Trains a feedforward velocity field by conditional flow matching: draw
/// `t ~ U[0, 1]` and an endpoint pair, form `x_t = alpha_t x_1 + beta_t x_0`,
/// and regress onto the conditional velocity
/// `alpha_dot_t x_1 + beta_dot_t x_0` with Adam.
pub fn cfm_train(
    source: &dyn PairSource,
    sched: &Scheduler,
    cfg: &TrainConfig,
) -> Result<(MlpField, TrainLog), FieldError> {
    cfg.validate()?;
    let d = source.dim();
    let activation = Activation::parse(&cfg.activation)?;
    let mut dims = Vec::with_capacity(cfg.hidden.len() + 2);
    dims.push(d + 1);
    dims.extend_from_slice(&cfg.hidden);
    dims.push(d);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut mlp = Mlp::init(dims, activation, &mut rng);
    let heldout = draw_batch(source, sched, cfg.batch_size.max(64), &mut rng);
    let heldout_initial = cfm_batch_loss(&mlp, &heldout);

    let np = mlp.num_params();
    let mut grad = vec![0.0; np];
    let mut adam_m = vec![0.0; np];
    let mut adam_v = vec![0.0; np];
    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);

    let mut curve = Vec::new();
    let mut running = 0.0;
    let mut running_n = 0usize;
    let log_every = (cfg.steps / 50).max(1);

    for step in 0..cfg.steps {
        let batch = draw_batch(source, sched, cfg.batch_size, &mut rng);
        grad.fill(0.0);
        let mut loss = 0.0;
        let inv_n = 1.0 / batch.len() as f64;
        for (t, xt, target) in &batch {
            let mut input = xt.clone();
            input.push(*t);
            let cache = mlp.forward_cached(&input);
            let out = cache.last().unwrap();
            let cot: Vec<f64> = out
                .iter()
                .zip(target)
                .map(|(a, b)| 2.0 * (a - b) * inv_n)
                .collect();
            loss += out
                .iter()
                .zip(target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                * inv_n;
            mlp.backward(&cache, &cot, &mut grad);
        }
        if !loss.is_finite() {
            return Err(FieldError::NonFiniteLoss {
                step,
                loss,
                lr: cfg.learning_rate,
            });
        }
        let bc1 = 1.0 - beta1.powi(step as i32 + 1);
        let bc2 = 1.0 - beta2.powi(step as i32 + 1);
        // Linear decay to 10% of the base rate damps the stationary noise of
        // Adam on the noisy conditional targets.
        let lr = cfg.learning_rate * (1.0 - 0.9 * step as f64 / cfg.steps as f64);
        for k in 0..np {
            adam_m[k] = beta1 * adam_m[k] + (1.0 - beta1) * grad[k];
            adam_v[k] = beta2 * adam_v[k] + (1.0 - beta2) * grad[k] * grad[k];
            let mhat = adam_m[k] / bc1;
            let vhat = adam_v[k] / bc2;
            mlp.weights[k] -= lr * mhat / (vhat.sqrt() + eps);
        }
        running += loss;
        running_n += 1;
        if (step + 1) % log_every == 0 {
            curve.push((step + 1, running / running_n as f64));
            running = 0.0;
            running_n = 0;
        }
    }

    let heldout_final = cfm_batch_loss(&mlp, &heldout);
    let field = MlpField {
        mlp,
        dim: d,
        scheduler_name: sched.name().to_string(),
        seed: cfg.seed,
    };
    let log = TrainLog {
        heldout_initial,
        heldout_final,
        curve,
    };
    Ok((field, log))
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointHeader {
    format_version: u32,
    arch: Vec<usize>,
    activation: String,
    scheduler: String,
    dim: usize,
    seed: u64,
    param_count: usize,
}

impl MlpField {
    /// Serializes the field: a single-line JSON metadata header followed by
    /// the flat little-endian f32 weight block.
    pub fn save(&self, path: &Path) -> Result<(), FieldError> {
        let header = CheckpointHeader {
            format_version: CHECKPOINT_FORMAT_VERSION,
            arch: self.mlp.dims.clone(),
            activation: self.mlp.activation.name().to_string(),
            scheduler: self.scheduler_name.clone(),
            dim: self.dim,
            seed: self.seed,
            param_count: self.mlp.num_params(),
        };
        let mut bytes = serde_json::to_vec(&header)?;
        bytes.push(b'\n');
        for w in &self.mlp.weights {
            bytes.extend_from_slice(&(*w as f32).to_le_bytes());
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(&bytes)?;
        Ok(())
    }

    /// Loads a checkpoint, validating the weight-block shape against the
    /// header.
    pub fn load(path: &Path) -> Result<Self, FieldError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| FieldError::Checkpoint("missing header line".into()))?;
        let header: CheckpointHeader = serde_json::from_slice(&bytes[..nl])
            .map_err(|e| FieldError::Checkpoint(format!("bad header: {e}")))?;
        if header.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(FieldError::Checkpoint(format!(
                "unsupported format version {}",
                header.format_version
            )));
        }
        if header.arch.len() < 2
            || header.arch[0] != header.dim + 1
            || *header.arch.last().unwrap() != header.dim
        {
            return Err(FieldError::Checkpoint(format!(
                "architecture {:?} inconsistent with dim {}",
                header.arch, header.dim
            )));
        }
        if param_count(&header.arch) != header.param_count {
            return Err(FieldError::Checkpoint(format!(
                "param_count {} does not match architecture {:?}",
                header.param_count, header.arch
            )));
        }
        let block = &bytes[nl + 1..];
        if block.len() != header.param_count * 4 {
            return Err(FieldError::Checkpoint(format!(
                "weight block is {} bytes, expected {}",
                block.len(),
                header.param_count * 4
            )));
        }
        let weights: Vec<f64> = block
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        if !crate::linalg::all_finite(&weights) {
            return Err(FieldError::Checkpoint("non-finite weights".into()));
        }
        let activation = Activation::parse(&header.activation)?;
        Ok(MlpField {
            mlp: Mlp {
                dims: header.arch,
                activation,
                weights,
            },
            dim: header.dim,
            scheduler_name: header.scheduler,
            seed: header.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velocity::{GaussianField, GaussianFieldSpec};
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_pairs(d: usize) -> FnPairs<impl Fn(&mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) + Send + Sync>
    {
        FnPairs {
            dim: d,
            f: move |rng: &mut ChaCha8Rng| {
                let x0 = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                let x1 = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                (x0, x1)
            },
        }
    }

    #[test]
    fn mlp_vjp_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mlp = Mlp::init(vec![3, 16, 16, 2], Activation::Tanh, &mut rng);
        let (t, x) = (0.37, [0.5, -1.2]);
        let w = [0.8, -0.3];
        let got = mlp.input_vjp(t, &x, &w);
        let h = 1e-4;
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (vp, vm) = (mlp.forward(t, &xp), mlp.forward(t, &xm));
            let fd: f64 = (0..2).map(|j| w[j] * (vp[j] - vm[j]) / (2.0 * h)).sum();
            let denom = fd.abs().max(1e-3);
            assert!(
                ((got[k] - fd) / denom).abs() < 1e-4,
                "coord {k}: vjp {} vs fd {}",
                got[k],
                fd
            );
        }
    }

    #[test]
    fn weight_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut mlp = Mlp::init(vec![2, 8, 1], Activation::Silu, &mut rng);
        let input = vec![0.4, 0.6];
        let target = [0.9];
        let loss = |m: &Mlp| {
            let out = m.forward_cached(&input).pop().unwrap();
            (out[0] - target[0]) * (out[0] - target[0])
        };
        let cache = mlp.forward_cached(&input);
        let out = cache.last().unwrap().clone();
        let cot = vec![2.0 * (out[0] - target[0])];
        let mut grad = vec![0.0; mlp.num_params()];
        mlp.backward(&cache, &cot, &mut grad);
        let h = 1e-6;
        for k in [0usize, 3, 10, mlp.num_params() - 1] {
            let orig = mlp.weights[k];
            mlp.weights[k] = orig + h;
            let lp = loss(&mlp);
            mlp.weights[k] = orig - h;
            let lm = loss(&mlp);
            mlp.weights[k] = orig;
            let fd = (lp - lm) / (2.0 * h);
            assert!((grad[k] - fd).abs() < 1e-5, "param {k}: {} vs {}", grad[k], fd);
        }
    }

    #[test]
    fn zero_steps_is_identity_training() {
        let src = gaussian_pairs(2);
        let sched = Scheduler::linear();
        let cfg = TrainConfig {
            steps: 0,
            seed: 11,
            ..TrainConfig::default()
        };
        let (field, log) = cfm_train(&src, &sched, &cfg).unwrap();
        assert_eq!(log.heldout_initial, log.heldout_final);
        // Field equals its initialization (same seed, same init draw order).
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let init = Mlp::init(vec![3, 96, 96, 2], Activation::Tanh, &mut rng);
        assert_eq!(field.mlp().weights(), init.weights());
    }

    #[test]
    fn loss_is_permutation_invariant() {
        let src = gaussian_pairs(3);
        let sched = Scheduler::linear();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mlp = Mlp::init(vec![4, 12, 3], Activation::Tanh, &mut rng);
        let batch = draw_batch(&src, &sched, 64, &mut rng);
        let mut reversed = batch.clone();
        reversed.reverse();
        let (a, b) = (cfm_batch_loss(&mlp, &batch), cfm_batch_loss(&mlp, &reversed));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn training_matches_gaussian_oracle() {
        let src = gaussian_pairs(2);
        let sched = Scheduler::linear();
        let cfg = TrainConfig {
            seed: 7,
            ..TrainConfig::default()
        };
        let (field, log) = cfm_train(&src, &sched, &cfg).unwrap();
        // The conditional target is mostly irreducible noise on this dataset,
        // so the loss decreases but stays near the Bayes level.
        assert!(
            log.heldout_final < log.heldout_initial,
            "loss {} -> {}",
            log.heldout_initial,
            log.heldout_final
        );

        let oracle =
            GaussianField::new(GaussianFieldSpec::standard(2), sched.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut sq = 0.0;
        let probes = 50;
        for _ in 0..probes {
            let t: f64 = rng.random_range(0.05..0.95);
            let x: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
            let (v, vo) = (field.eval(t, &x), oracle.eval(t, &x));
            sq += v.iter().zip(&vo).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        }
        let rms = (sq / probes as f64).sqrt();
        assert!(rms < 0.15, "rms deviation from oracle: {rms}");
    }

    #[test]
    fn loss_halves_when_velocity_is_predictable() {
        // Shifted target: most of the conditional velocity is the
        // deterministic drift toward the offset mean.
        let d = 2;
        let src = FnPairs {
            dim: d,
            f: move |rng: &mut ChaCha8Rng| {
                let x0: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                let x1: Vec<f64> = (0..d)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        3.0 + 0.3 * z
                    })
                    .collect();
                (x0, x1)
            },
        };
        let cfg = TrainConfig {
            steps: 800,
            seed: 3,
            ..TrainConfig::default()
        };
        let (_, log) = cfm_train(&src, &Scheduler::linear(), &cfg).unwrap();
        let final_avg = log.curve.last().unwrap().1;
        assert!(
            final_avg < 0.5 * log.heldout_initial,
            "running average {} vs initial {}",
            final_avg,
            log.heldout_initial
        );
        assert!(log.heldout_final < 0.5 * log.heldout_initial);
    }

    #[test]
    fn checkpoint_roundtrip_and_validation() {
        let src = gaussian_pairs(2);
        let sched = Scheduler::linear();
        let cfg = TrainConfig {
            steps: 5,
            seed: 9,
            hidden: vec![8, 8],
            ..TrainConfig::default()
        };
        let (field, _) = cfm_train(&src, &sched, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.ckpt");
        field.save(&path).unwrap();
        let loaded = MlpField::load(&path).unwrap();
        assert_eq!(loaded.scheduler_name(), "linear");
        assert_eq!(loaded.seed(), 9);
        // f32 storage: agreement to single precision.
        let x = [0.3, -0.4];
        let (a, b) = (field.eval(0.5, &x), loaded.eval(0.5, &x));
        for k in 0..2 {
            assert!((a[k] - b[k]).abs() < 1e-5);
        }

        // Same seed twice produces byte-identical checkpoints.
        let (field2, _) = cfm_train(&src, &sched, &cfg).unwrap();
        let path2 = dir.path().join("field2.ckpt");
        field2.save(&path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());

        // Truncated weight block is rejected.
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 4);
        let bad = dir.path().join("bad.ckpt");
        std::fs::write(&bad, &bytes).unwrap();
        assert!(matches!(MlpField::load(&bad), Err(FieldError::Checkpoint(_))));

        // Header that disagrees with the block is rejected.
        let text = std::fs::read(&path).unwrap();
        let nl = text.iter().position(|&b| b == b'\n').unwrap();
        let mut header: serde_json::Value = serde_json::from_slice(&text[..nl]).unwrap();
        header["param_count"] = serde_json::json!(1);
        let mut forged = serde_json::to_vec(&header).unwrap();
        forged.push(b'\n');
        forged.extend_from_slice(&text[nl + 1..]);
        let bad2 = dir.path().join("bad2.ckpt");
        std::fs::write(&bad2, &forged).unwrap();
        assert!(matches!(MlpField::load(&bad2), Err(FieldError::Checkpoint(_))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig::default();
        cfg.hidden = vec![256];
        assert!(cfg.validate().is_err());
        cfg.hidden = vec![32];
        cfg.activation = "relu".into();
        assert!(cfg.validate().is_err());
        cfg.activation = "silu".into();
        assert!(cfg.validate().is_ok());
    }
}

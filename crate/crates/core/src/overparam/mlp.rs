use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::OverparamError;
use crate::arrays::Dataset;
use crate::boundary::Classifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative in terms of the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            other => Err(format!("unknown activation '{other}' (expected tanh or relu)")),
        }
    }
}

/// Layer widths from input to output plus the hidden activation.
///
/// An output width of 1 is a binary logistic model (label 1 when the logit is
/// positive); wider outputs use softmax over that many classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
}

impl Architecture {
    pub fn new(layer_sizes: Vec<usize>, activation: Activation) -> Result<Self, OverparamError> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(OverparamError::InvalidArchitecture(format!(
                "need at least input and output widths, all positive; got {layer_sizes:?}"
            )));
        }
        Ok(Self {
            layer_sizes,
            activation,
        })
    }

    /// Input, hidden widths and a single logistic output.
    pub fn binary(input: usize, hidden: &[usize], activation: Activation) -> Result<Self, OverparamError> {
        let mut sizes = vec![input];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        Self::new(sizes, activation)
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn n_classes(&self) -> usize {
        self.output_dim().max(2)
    }

    /// Offsets of layer `l`: weights start, biases start, end.
    pub fn layer_range(&self, l: usize) -> (usize, usize, usize) {
        let mut start = 0;
        for k in 0..l {
            start += (self.layer_sizes[k] + 1) * self.layer_sizes[k + 1];
        }
        let (inp, out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
        (start, start + inp * out, start + (inp + 1) * out)
    }

    pub fn n_params(&self) -> usize {
        self.layer_range(self.n_layers() - 1).2
    }
}

/// Feed-forward network with flat parameters and an elimination mask.
///
/// Layer `l` stores its `out x in` weights row-major, followed by `out` biases.
/// Masked (inactive) parameters are held at exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub architecture: Architecture,
    params: Vec<f64>,
    active: Vec<bool>,
}

impl Mlp {
    pub fn zeros(architecture: Architecture) -> Self {
        let n = architecture.n_params();
        Self {
            architecture,
            params: vec![0.0; n],
            active: vec![true; n],
        }
    }

    /// Xavier-uniform weights, zero biases.
    pub fn init(architecture: Architecture, seed: u64) -> Self {
        let mut m = Self::zeros(architecture);
        m.reinit(seed);
        m
    }

    pub fn reinit(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in 0..self.architecture.n_layers() {
            let (w, b, e) = self.architecture.layer_range(l);
            let (inp, out) = (self.architecture.layer_sizes[l], self.architecture.layer_sizes[l + 1]);
            let limit = (6.0 / (inp + out) as f64).sqrt();
            for p in &mut self.params[w..b] {
                *p = rng.random_range(-limit..limit);
            }
            self.params[b..e].iter_mut().for_each(|p| *p = 0.0);
        }
        self.enforce_mask();
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn mask(&self) -> &[bool] {
        &self.active
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    pub fn set_params(&mut self, params: Vec<f64>) -> Result<(), OverparamError> {
        if params.len() != self.params.len() {
            return Err(OverparamError::ParamCount {
                expected: self.params.len(),
                found: params.len(),
            });
        }
        self.params = params;
        self.enforce_mask();
        Ok(())
    }

    /// Replaces the mask (`true` = active) and zeroes inactive parameters.
    pub fn set_mask(&mut self, active: Vec<bool>) -> Result<(), OverparamError> {
        if active.len() != self.params.len() {
            return Err(OverparamError::ParamCount {
                expected: self.params.len(),
                found: active.len(),
            });
        }
        for l in 0..self.architecture.n_layers() {
            let (w, _, e) = self.architecture.layer_range(l);
            if active[w..e].iter().all(|a| !a) {
                return Err(OverparamError::DegenerateArchitecture { layer: l });
            }
        }
        self.active = active;
        self.enforce_mask();
        Ok(())
    }

    pub(crate) fn enforce_mask(&mut self) {
        for (p, a) in self.params.iter_mut().zip(&self.active) {
            if !a {
                *p = 0.0;
            }
        }
    }

    pub(crate) fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Pre-activations and activations of every layer; the last entry holds the
    /// raw output logits in both slots.
    fn forward_trace(&self, x: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
        let arch = &self.architecture;
        let mut trace: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(arch.n_layers());
        let mut input: Vec<f64> = x.to_vec();
        for l in 0..arch.n_layers() {
            let (w, b, _) = arch.layer_range(l);
            let (inp, out) = (arch.layer_sizes[l], arch.layer_sizes[l + 1]);
            let z: Vec<f64> = (0..out)
                .map(|j| {
                    let row = &self.params[w + j * inp..w + (j + 1) * inp];
                    row.iter().zip(&input).map(|(a, v)| a * v).sum::<f64>() + self.params[b + j]
                })
                .collect();
            let a: Vec<f64> = if l + 1 == arch.n_layers() {
                z.clone()
            } else {
                z.iter().map(|&v| arch.activation.apply(v)).collect()
            };
            input = a.clone();
            trace.push((z, a));
        }
        trace
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.forward_trace(x).pop().unwrap().1
    }

    /// Activations of the last hidden layer (the input itself without hidden layers).
    pub fn features(&self, x: &[f64]) -> Vec<f64> {
        let mut trace = self.forward_trace(x);
        trace.pop();
        trace.pop().map(|(_, a)| a).unwrap_or_else(|| x.to_vec())
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let z = self.logits(x);
        if z.len() == 1 {
            usize::from(z[0] > 0.0)
        } else {
            z.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                .0
        }
    }

    fn point_loss(&self, logits: &[f64], label: usize) -> f64 {
        if logits.len() == 1 {
            let z = logits[0];
            let y = label as f64;
            z.max(0.0) - y * z + (-z.abs()).exp().ln_1p()
        } else {
            let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + logits.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            lse - logits[label]
        }
    }

    fn check_data(&self, data: &Dataset) -> Result<(), OverparamError> {
        if data.n() == 0 {
            return Err(OverparamError::EmptyData);
        }
        if data.d() != self.architecture.input_dim() {
            return Err(OverparamError::DimensionMismatch {
                expected: self.architecture.input_dim(),
                found: data.d(),
            });
        }
        if data.labels().iter().any(|&y| y >= self.architecture.n_classes()) {
            return Err(OverparamError::LabelOutOfRange {
                classes: self.architecture.n_classes(),
            });
        }
        Ok(())
    }

    /// Mean cross-entropy over the dataset.
    pub fn loss(&self, data: &Dataset) -> Result<f64, OverparamError> {
        self.check_data(data)?;
        let total: f64 = (0..data.n())
            .map(|i| self.point_loss(&self.logits(data.point(i)), data.labels()[i]))
            .sum();
        Ok(total / data.n() as f64)
    }

    /// Mean cross-entropy and its gradient; masked entries of the gradient are zero.
    pub fn loss_and_grad(&self, data: &Dataset) -> Result<(f64, Vec<f64>), OverparamError> {
        self.check_data(data)?;
        let arch = &self.architecture;
        let mut grad = vec![0.0; self.params.len()];
        let mut total = 0.0;
        for i in 0..data.n() {
            let x = data.point(i);
            let y = data.labels()[i];
            let trace = self.forward_trace(x);
            let logits = &trace.last().unwrap().1;
            total += self.point_loss(logits, y);
            // dLoss/dlogits
            let mut delta: Vec<f64> = if logits.len() == 1 {
                let p = 1.0 / (1.0 + (-logits[0]).exp());
                vec![p - y as f64]
            } else {
                let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = logits.iter().map(|v| (v - m).exp()).collect();
                let s: f64 = exps.iter().sum();
                exps.iter()
                    .enumerate()
                    .map(|(k, e)| e / s - if k == y { 1.0 } else { 0.0 })
                    .collect()
            };
            for l in (0..arch.n_layers()).rev() {
                let (w, b, _) = arch.layer_range(l);
                let (inp, out) = (arch.layer_sizes[l], arch.layer_sizes[l + 1]);
                let input: &[f64] = if l == 0 { x } else { &trace[l - 1].1 };
                for j in 0..out {
                    for k in 0..inp {
                        grad[w + j * inp + k] += delta[j] * input[k];
                    }
                    grad[b + j] += delta[j];
                }
                if l > 0 {
                    let (z_prev, a_prev) = &trace[l - 1];
                    delta = (0..inp)
                        .map(|k| {
                            let back: f64 = (0..out).map(|j| self.params[w + j * inp + k] * delta[j]).sum();
                            back * arch.activation.derivative(z_prev[k], a_prev[k])
                        })
                        .collect();
                }
            }
        }
        let n = data.n() as f64;
        for (g, a) in grad.iter_mut().zip(&self.active) {
            *g = if *a { *g / n } else { 0.0 };
        }
        Ok((total / n, grad))
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64, OverparamError> {
        self.check_data(data)?;
        let correct = (0..data.n())
            .filter(|&i| self.predict(data.point(i)) == data.labels()[i])
            .count();
        Ok(correct as f64 / data.n() as f64)
    }
}

impl Classifier for Mlp {
    fn input_dim(&self) -> usize {
        self.architecture.input_dim()
    }

    fn classify(&self, x: &[f64]) -> usize {
        self.predict(x)
    }
}

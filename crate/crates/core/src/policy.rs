//! Multilayer-perceptron policies over flat parameter vectors.
//!
//! Flat layout, frozen for persisted policy files: for each consecutive
//! layer pair `(n_in, n_out)` the weight matrix `W` (`n_out` rows by `n_in`
//! columns, row-major) followed by the bias vector `b` (length `n_out`). A
//! layer computes `W x + b`. Hidden layers use `tanh`; the output activation
//! is configurable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{ContextKey, KernelError, StreamSpec, Writes};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("invalid layer sizes {0:?}: need at least two positive entries")]
    InvalidSpec(Vec<usize>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    #[default]
    Sigmoid,
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub layer_sizes: Vec<usize>,
    #[serde(default)]
    pub output: OutputActivation,
}

impl MlpSpec {
    pub fn new(layer_sizes: Vec<usize>, output: OutputActivation) -> Result<Self, PolicyError> {
        let spec = Self { layer_sizes, output };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<(), PolicyError> {
        if self.layer_sizes.len() < 2 || self.layer_sizes.contains(&0) {
            return Err(PolicyError::InvalidSpec(self.layer_sizes.clone()));
        }
        Ok(())
    }

    pub fn inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn outputs(&self) -> usize {
        self.layer_sizes[self.layer_sizes.len() - 1]
    }

    pub fn param_count(&self) -> usize {
        self.layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }
}

/// Number of parameters of an MLP with the given layer sizes.
pub fn param_count(spec: &MlpSpec) -> usize {
    spec.param_count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    pub n_in: usize,
    pub n_out: usize,
    /// Row-major, `n_out x n_in`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.n_in + col]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpWeights {
    pub layers: Vec<DenseLayer>,
}

pub fn unflatten(spec: &MlpSpec, flat: &[f64]) -> Result<MlpWeights, PolicyError> {
    spec.check()?;
    let expected = spec.param_count();
    if flat.len() != expected {
        return Err(PolicyError::LengthMismatch {
            expected,
            found: flat.len(),
        });
    }
    let mut offset = 0;
    let layers = spec
        .layer_sizes
        .windows(2)
        .map(|w| {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = flat[offset..offset + n_in * n_out].to_vec();
            offset += n_in * n_out;
            let bias = flat[offset..offset + n_out].to_vec();
            offset += n_out;
            DenseLayer {
                n_in,
                n_out,
                weights,
                bias,
            }
        })
        .collect();
    Ok(MlpWeights { layers })
}

pub fn flatten(weights: &MlpWeights) -> Vec<f64> {
    let mut out = Vec::new();
    for layer in &weights.layers {
        out.extend_from_slice(&layer.weights);
        out.extend_from_slice(&layer.bias);
    }
    out
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Forward pass straight off the flat vector (no intermediate structs).
pub fn forward(spec: &MlpSpec, flat: &[f64], input: &[f64]) -> Result<Vec<f64>, PolicyError> {
    spec.check()?;
    let expected = spec.param_count();
    if flat.len() != expected {
        return Err(PolicyError::LengthMismatch {
            expected,
            found: flat.len(),
        });
    }
    if input.len() != spec.inputs() {
        return Err(PolicyError::LengthMismatch {
            expected: spec.inputs(),
            found: input.len(),
        });
    }
    if input.iter().any(|x| !x.is_finite()) {
        return Err(PolicyError::NonFiniteInput);
    }

    let n_layers = spec.layer_sizes.len() - 1;
    let mut act = input.to_vec();
    let mut offset = 0;
    for (l, w) in spec.layer_sizes.windows(2).enumerate() {
        let (n_in, n_out) = (w[0], w[1]);
        let weights = &flat[offset..offset + n_in * n_out];
        let bias = &flat[offset + n_in * n_out..offset + n_in * n_out + n_out];
        offset += n_in * n_out + n_out;
        let last = l + 1 == n_layers;
        act = (0..n_out)
            .map(|row| {
                let z = weights[row * n_in..(row + 1) * n_in]
                    .iter()
                    .zip(&act)
                    .map(|(w, x)| w * x)
                    .sum::<f64>()
                    + bias[row];
                match (last, spec.output) {
                    (false, _) => z.tanh(),
                    (true, OutputActivation::Sigmoid) => sigmoid(z),
                    (true, OutputActivation::Identity) => z,
                }
            })
            .collect();
    }
    Ok(act)
}

/// Where a policy stream puts its outputs.
#[derive(Clone, Debug, PartialEq)]
pub enum PolicyOutputs {
    /// One scalar key per output unit.
    Scalars(Vec<ContextKey>),
    /// The whole output vector under one key.
    Vector(ContextKey),
}

/// Wrap a policy as a stream: read `inputs` (reals) in order, run the
/// network, write the outputs. No input normalization is applied.
pub fn policy_stream(
    id: &str,
    spec: MlpSpec,
    params: Vec<f64>,
    inputs: Vec<ContextKey>,
    outputs: PolicyOutputs,
) -> Result<StreamSpec, PolicyError> {
    spec.check()?;
    if params.len() != spec.param_count() {
        return Err(PolicyError::LengthMismatch {
            expected: spec.param_count(),
            found: params.len(),
        });
    }
    if inputs.len() != spec.inputs() {
        return Err(PolicyError::LengthMismatch {
            expected: spec.inputs(),
            found: inputs.len(),
        });
    }
    let written: Vec<ContextKey> = match &outputs {
        PolicyOutputs::Scalars(keys) => {
            if keys.len() != spec.outputs() {
                return Err(PolicyError::LengthMismatch {
                    expected: spec.outputs(),
                    found: keys.len(),
                });
            }
            keys.clone()
        }
        PolicyOutputs::Vector(key) => vec![key.clone()],
    };
    let stream_id = id.to_string();
    let read_keys = inputs.clone();
    let stream = StreamSpec::new(id, move |view, _| {
        let x = inputs.iter().map(|k| view.real(k)).collect::<Result<Vec<f64>, KernelError>>()?;
        let y = forward(&spec, &params, &x).map_err(|e| KernelError::step(&stream_id, e))?;
        let mut writes = Writes::new();
        match &outputs {
            PolicyOutputs::Scalars(keys) => {
                for (key, value) in keys.iter().zip(y) {
                    writes.set(key, value);
                }
            }
            PolicyOutputs::Vector(key) => {
                writes.set(key, y);
            }
        }
        Ok(writes)
    })
    .reads(&read_keys)
    .writes(&written);
    Ok(stream)
}

/// On-disk policy: `{"layer_sizes":[...], "output":"sigmoid", "params":[...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyFile {
    pub layer_sizes: Vec<usize>,
    #[serde(default)]
    pub output: OutputActivation,
    pub params: Vec<f64>,
}

impl PolicyFile {
    pub fn new(spec: &MlpSpec, params: Vec<f64>) -> Result<Self, PolicyError> {
        if params.len() != spec.param_count() {
            return Err(PolicyError::LengthMismatch {
                expected: spec.param_count(),
                found: params.len(),
            });
        }
        Ok(Self {
            layer_sizes: spec.layer_sizes.clone(),
            output: spec.output,
            params,
        })
    }

    pub fn spec(&self) -> Result<MlpSpec, PolicyError> {
        let spec = MlpSpec::new(self.layer_sizes.clone(), self.output)?;
        if self.params.len() != spec.param_count() {
            return Err(PolicyError::LengthMismatch {
                expected: spec.param_count(),
                found: self.params.len(),
            });
        }
        Ok(spec)
    }
}

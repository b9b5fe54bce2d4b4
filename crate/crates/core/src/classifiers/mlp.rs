//! Three-layer feed-forward network, logistic units on both layers,
//! trained by online backpropagation of the sum-of-squares error.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{argmax, ClassId, ClassifierResponse};
use crate::math::logistic;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct MlpConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub seed: u64,
    pub rate: f64,
    pub momentum: f64,
    /// Initial weights are drawn uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: 50,
            epochs: 35,
            seed: 1,
            rate: 0.25,
            momentum: 0.9,
            init_range: 0.1,
        }
    }
}

/// Network weights stored in one flat vector:
/// input→hidden (one row per input), hidden biases,
/// hidden→output (one row per hidden unit), output biases.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    inputs: usize,
    hidden: usize,
    outputs: usize,
    params: Vec<f64>,
}

impl MlpModel {
    pub fn param_count(inputs: usize, hidden: usize, outputs: usize) -> usize {
        inputs * hidden + hidden + hidden * outputs + outputs
    }

    pub fn from_params(inputs: usize, hidden: usize, outputs: usize, params: Vec<f64>) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::NoHiddenUnits);
        }
        let expected = Self::param_count(inputs, hidden, outputs);
        if params.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: params.len(),
            });
        }
        Ok(Self {
            inputs,
            hidden,
            outputs,
            params,
        })
    }

    pub fn zeros(inputs: usize, hidden: usize, outputs: usize) -> Result<Self> {
        Self::from_params(inputs, hidden, outputs, vec![0.0; Self::param_count(inputs, hidden, outputs)])
    }

    pub fn random<R: Rng>(inputs: usize, hidden: usize, outputs: usize, range: f64, rng: &mut R) -> Result<Self> {
        let n = Self::param_count(inputs, hidden, outputs);
        let params = (0..n)
            .map(|_| if range > 0.0 { rng.gen_range(-range..=range) } else { 0.0 })
            .collect();
        Self::from_params(inputs, hidden, outputs, params)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let b_h = self.inputs * self.hidden;
        let w_ho = b_h + self.hidden;
        let b_o = w_ho + self.hidden * self.outputs;
        (b_h, w_ho, b_o)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.inputs {
            return Err(Error::LengthMismatch {
                expected: self.inputs,
                found: x.len(),
            });
        }
        Ok(())
    }

    fn forward_into(&self, x: &[f64], hidden: &mut [f64], output: &mut [f64]) {
        let (b_h, w_ho, b_o) = self.offsets();
        let p = &self.params;
        hidden.copy_from_slice(&p[b_h..b_h + self.hidden]);
        for (j, &xj) in x.iter().enumerate() {
            // Encoded words are mostly left padding.
            if xj == 0.0 {
                continue;
            }
            let row = &p[j * self.hidden..(j + 1) * self.hidden];
            hidden.iter_mut().zip(row).for_each(|(a, w)| *a += w * xj);
        }
        hidden.iter_mut().for_each(|a| *a = logistic(*a));

        output.copy_from_slice(&p[b_o..b_o + self.outputs]);
        for (h, &ah) in hidden.iter().enumerate() {
            let row = &p[w_ho + h * self.outputs..w_ho + (h + 1) * self.outputs];
            output.iter_mut().zip(row).for_each(|(a, w)| *a += w * ah);
        }
        output.iter_mut().for_each(|a| *a = logistic(*a));
    }

    /// Hidden and output activations.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_input(x)?;
        let mut hidden = vec![0.0; self.hidden];
        let mut output = vec![0.0; self.outputs];
        self.forward_into(x, &mut hidden, &mut output);
        Ok((hidden, output))
    }

    /// `½ Σ (o_k − t_k)²`
    pub fn loss(&self, x: &[f64], target: &[f64]) -> Result<f64> {
        let (_, o) = self.forward(x)?;
        Ok(0.5 * o.iter().zip(target).map(|(o, t)| (o - t) * (o - t)).sum::<f64>())
    }

    /// Gradient of [`loss`](Self::loss) with respect to every parameter,
    /// in parameter order.
    pub fn gradient(&self, x: &[f64], target: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        if target.len() != self.outputs {
            return Err(Error::LengthMismatch {
                expected: self.outputs,
                found: target.len(),
            });
        }
        let mut scratch = Scratch::new(self);
        let mut grad = vec![0.0; self.params.len()];
        self.backprop(x, target, &mut scratch, &mut grad);
        Ok(grad)
    }

    fn backprop(&self, x: &[f64], target: &[f64], s: &mut Scratch, grad: &mut [f64]) {
        let (b_h, w_ho, b_o) = self.offsets();
        self.forward_into(x, &mut s.hidden, &mut s.output);
        for ((d, &o), &t) in s.delta_out.iter_mut().zip(&s.output).zip(target) {
            *d = (o - t) * o * (1.0 - o);
        }
        for (h, (dh, &ah)) in s.delta_hidden.iter_mut().zip(&s.hidden).enumerate() {
            let row = &self.params[w_ho + h * self.outputs..w_ho + (h + 1) * self.outputs];
            let back: f64 = row.iter().zip(&s.delta_out).map(|(w, d)| w * d).sum();
            *dh = back * ah * (1.0 - ah);
        }

        for (j, &xj) in x.iter().enumerate() {
            let row = &mut grad[j * self.hidden..(j + 1) * self.hidden];
            if xj == 0.0 {
                row.fill(0.0);
            } else {
                row.iter_mut().zip(&s.delta_hidden).for_each(|(g, d)| *g = d * xj);
            }
        }
        grad[b_h..b_h + self.hidden].copy_from_slice(&s.delta_hidden);
        for (h, &ah) in s.hidden.iter().enumerate() {
            let row = &mut grad[w_ho + h * self.outputs..w_ho + (h + 1) * self.outputs];
            row.iter_mut().zip(&s.delta_out).for_each(|(g, d)| *g = d * ah);
        }
        grad[b_o..b_o + self.outputs].copy_from_slice(&s.delta_out);
    }
}

struct Scratch {
    hidden: Vec<f64>,
    output: Vec<f64>,
    delta_hidden: Vec<f64>,
    delta_out: Vec<f64>,
}

impl Scratch {
    fn new(m: &MlpModel) -> Self {
        Self {
            hidden: vec![0.0; m.hidden],
            output: vec![0.0; m.outputs],
            delta_hidden: vec![0.0; m.hidden],
            delta_out: vec![0.0; m.outputs],
        }
    }
}

/// Epoch-by-epoch trainer. Running `n` epochs here gives the same weights
/// as [`mlp_train`] with `epochs = n`, so a sweep over durations can
/// snapshot one run.
pub struct MlpTrainer<'a> {
    model: MlpModel,
    velocity: Vec<f64>,
    grad: Vec<f64>,
    scratch: Scratch,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    vectors: &'a [Vec<f64>],
    targets: Vec<Vec<f64>>,
    config: MlpConfig,
    epochs_done: usize,
}

impl<'a> MlpTrainer<'a> {
    /// One-hot targets over `class_count` output units.
    pub fn new(vectors: &'a [Vec<f64>], labels: &[ClassId], class_count: usize, config: MlpConfig) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if vectors.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: vectors.len(),
                found: labels.len(),
            });
        }
        if config.hidden == 0 {
            return Err(Error::NoHiddenUnits);
        }
        if !(config.rate > 0.0) || !(config.momentum >= 0.0) {
            return Err(Error::InvalidRate);
        }
        let inputs = vectors[0].len();
        if let Some(v) = vectors.iter().find(|v| v.len() != inputs) {
            return Err(Error::LengthMismatch {
                expected: inputs,
                found: v.len(),
            });
        }
        if let Some(l) = labels.iter().find(|l| l.0 >= class_count) {
            return Err(Error::UnknownClass(l.0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let model = MlpModel::random(inputs, config.hidden, class_count, config.init_range, &mut rng)?;
        let targets = labels
            .iter()
            .map(|l| {
                let mut t = vec![0.0; class_count];
                t[l.0] = 1.0;
                t
            })
            .collect();
        Ok(Self {
            velocity: vec![0.0; model.params.len()],
            grad: vec![0.0; model.params.len()],
            scratch: Scratch::new(&model),
            model,
            rng,
            order: (0..vectors.len()).collect(),
            vectors,
            targets,
            config,
            epochs_done: 0,
        })
    }

    /// One pass over the training set in a freshly shuffled order.
    pub fn run_epoch(&mut self) {
        self.order.shuffle(&mut self.rng);
        let (rate, momentum) = (self.config.rate, self.config.momentum);
        for &i in &self.order {
            self.model
                .backprop(&self.vectors[i], &self.targets[i], &mut self.scratch, &mut self.grad);
            for ((p, v), g) in self.model.params.iter_mut().zip(&mut self.velocity).zip(&self.grad) {
                *v = momentum * *v - rate * g;
                *p += *v;
            }
        }
        self.epochs_done += 1;
    }

    pub fn epochs_done(&self) -> usize {
        self.epochs_done
    }

    pub fn model(&self) -> &MlpModel {
        &self.model
    }

    pub fn into_model(self) -> MlpModel {
        self.model
    }
}

/// Trains a network for `config.epochs` epochs; deterministic per seed.
pub fn mlp_train(vectors: &[Vec<f64>], labels: &[ClassId], class_count: usize, config: &MlpConfig) -> Result<MlpModel> {
    if config.epochs == 0 {
        return Err(Error::ZeroEpochs);
    }
    let mut trainer = MlpTrainer::new(vectors, labels, class_count, *config)?;
    for _ in 0..config.epochs {
        trainer.run_epoch();
    }
    Ok(trainer.into_model())
}

/// Output activations and the most active unit.
pub fn mlp_classify(model: &MlpModel, query: &[f64]) -> Result<ClassifierResponse> {
    let (_, scores) = model.forward(query)?;
    Ok(ClassifierResponse {
        decision: argmax(&scores),
        scores,
    })
}

//! Nosofsky's Generalized Context Model.
//!
//! The probability of responding with class `J` to stimulus `i` is
//!
//! ```text
//! P(J | i) = b_J Σ_{j∈J} L_j η_ij / Σ_K b_K Σ_{k∈K} L_k η_ik,   η_ij = exp(-(d_ij / s)^p)
//! ```
//!
//! Strengths are computed relative to the most similar exemplar, so
//! queries far from every exemplar still normalise instead of
//! underflowing to 0/0.

use alloc::vec;
use alloc::vec::Vec;

use super::nn::{distance_matrix, ExemplarMemory};
use super::{argmax, ClassId, ClassifierResponse};
use crate::math::euclidean;
use crate::{Error, Result};

/// Similarity kernel `exp(-(d/s)^p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Kernel {
    /// p = 1
    Exponential,
    /// p = 2
    #[default]
    Gaussian,
}

impl Kernel {
    pub fn exponent(self) -> u32 {
        match self {
            Kernel::Exponential => 1,
            Kernel::Gaussian => 2,
        }
    }

    /// `(d/s)^p`, the negated log-similarity.
    fn decay(self, distance: f64, scale: f64) -> f64 {
        let x = distance / scale;
        match self {
            Kernel::Exponential => x,
            Kernel::Gaussian => x * x,
        }
    }

    pub fn similarity(self, distance: f64, scale: f64) -> f64 {
        libm::exp(-self.decay(distance, scale))
    }
}

/// Weight `L(j, J)` given to each exemplar's similarity.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Likelihood {
    /// Every stored exemplar counts once.
    #[default]
    Uniform,
    /// `1 / |C_J|`: each class contributes its mean similarity.
    ClassNormalized,
    /// One non-negative weight per exemplar, in memory order.
    PerExemplar(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GcmParams {
    pub scale: f64,
    pub kernel: Kernel,
    /// Response bias per class id; `None` means no bias terms.
    pub biases: Option<Vec<f64>>,
    pub likelihood: Likelihood,
}

impl GcmParams {
    pub fn new(scale: f64, kernel: Kernel) -> Self {
        Self {
            scale,
            kernel,
            biases: None,
            likelihood: Likelihood::Uniform,
        }
    }

    pub fn with_scale(&self, scale: f64) -> Self {
        Self { scale, ..self.clone() }
    }

    fn validate(&self, class_count: usize, memory_len: usize) -> Result<()> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::NonPositiveScale(self.scale));
        }
        if let Some(b) = &self.biases {
            let sum: f64 = b.iter().sum();
            if b.len() != class_count
                || b.iter().any(|x| !(0.0..=1.0).contains(x))
                || libm::fabs(sum - 1.0) > 1e-9
            {
                return Err(Error::InvalidBiases);
            }
        }
        if let Likelihood::PerExemplar(w) = &self.likelihood {
            if w.len() != memory_len || w.iter().any(|x| !(*x >= 0.0)) {
                return Err(Error::InvalidLikelihoods);
            }
        }
        Ok(())
    }
}

/// Class probabilities for one query given its distance to every exemplar
/// of `memory`.
pub fn gcm_scores_from_distances(
    memory: &ExemplarMemory,
    params: &GcmParams,
    distances: &[f64],
) -> Result<Vec<f64>> {
    let labels = memory.labels();
    if distances.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            found: distances.len(),
        });
    }
    let class_count = memory.classes().len();
    params.validate(class_count, labels.len())?;

    let class_sizes = match params.likelihood {
        Likelihood::ClassNormalized => {
            let mut sizes = vec![0usize; class_count];
            labels.iter().for_each(|l| sizes[l.0] += 1);
            sizes
        }
        _ => Vec::new(),
    };
    let weight = |j: usize| -> f64 {
        match &params.likelihood {
            Likelihood::Uniform => 1.0,
            Likelihood::ClassNormalized => 1.0 / class_sizes[labels[j].0] as f64,
            Likelihood::PerExemplar(w) => w[j],
        }
    };

    let decay: Vec<f64> = distances
        .iter()
        .map(|&d| params.kernel.decay(d, params.scale))
        .collect();
    let offset = decay.iter().copied().fold(f64::INFINITY, f64::min);

    let mut strength = vec![0.0; class_count];
    for (j, (&e, label)) in decay.iter().zip(labels).enumerate() {
        strength[label.0] += weight(j) * libm::exp(offset - e);
    }
    if let Some(b) = &params.biases {
        strength.iter_mut().zip(b).for_each(|(s, b)| *s *= b);
    }
    let total: f64 = strength.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateResponse);
    }
    strength.iter_mut().for_each(|s| *s /= total);
    Ok(strength)
}

pub fn gcm_classify(memory: &ExemplarMemory, params: &GcmParams, query: &[f64]) -> Result<ClassifierResponse> {
    memory.check_query(query)?;
    let distances: Vec<f64> = memory.vectors().iter().map(|v| euclidean(v, query)).collect();
    let scores = gcm_scores_from_distances(memory, params, &distances)?;
    Ok(ClassifierResponse {
        decision: argmax(&scores),
        scores,
    })
}

/// Picks the scale from `grid` with the best accuracy on `(queries, labels)`.
/// Ties go to the smallest scale. Returns `(scale, accuracy)`.
pub fn gcm_optimize_scale(
    memory: &ExemplarMemory,
    params: &GcmParams,
    queries: &[Vec<f64>],
    labels: &[ClassId],
    grid: &[f64],
) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if queries.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: queries.len(),
            found: labels.len(),
        });
    }
    let distances = distance_matrix(memory, queries)?;
    let n = memory.len();
    let mut best: Option<(f64, usize)> = None;
    for &s in grid {
        let p = params.with_scale(s);
        let mut correct = 0usize;
        for (row, &label) in distances.chunks_exact(n.max(1)).zip(labels) {
            let scores = gcm_scores_from_distances(memory, &p, row)?;
            correct += usize::from(argmax(&scores) == label);
        }
        best = match best {
            Some((bs, bc)) if bc > correct || (bc == correct && bs <= s) => Some((bs, bc)),
            _ => Some((s, correct)),
        };
    }
    let (s, correct) = best.expect("grid is non-empty");
    let accuracy = if labels.is_empty() { 0.0 } else { correct as f64 / labels.len() as f64 };
    Ok((s, accuracy))
}

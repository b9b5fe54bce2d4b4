//! The associative classifiers and their shared label space.

mod gcm;
mod mlp;
mod nn;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub use gcm::{gcm_classify, gcm_optimize_scale, gcm_scores_from_distances, GcmParams, Kernel, Likelihood};
pub use mlp::{mlp_classify, mlp_train, MlpConfig, MlpModel, MlpTrainer};
pub use nn::{distance_matrix, nn_classify, nn_leave_one_out, ExemplarMemory};

/// Index of a class in a [`ClassSet`].
///
/// Lower ids win ties: a class set orders its classes by descending
/// training frequency, then by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ClassId(pub usize);

/// Ordered label space shared by every model of one experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassSet {
    names: Vec<String>,
    counts: Vec<usize>,
}

impl ClassSet {
    /// Builds the class set from training labels.
    pub fn from_labels<'a, I>(labels: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for l in labels {
            *counts.entry(l).or_default() += 1;
        }
        let mut pairs: Vec<(&str, usize)> = counts.into_iter().collect();
        // BTreeMap already gives name order; a stable sort keeps it within equal counts.
        pairs.sort_by_key(|p| core::cmp::Reverse(p.1));
        Self {
            names: pairs.iter().map(|(n, _)| String::from(*n)).collect(),
            counts: pairs.iter().map(|(_, c)| *c).collect(),
        }
    }

    /// Adds `name` with a zero count if it is missing.
    pub fn with_class(mut self, name: &str) -> Self {
        if self.id(name).is_none() {
            self.names.push(String::from(name));
            self.counts.push(0);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<ClassId> {
        self.names.iter().position(|n| n == name).map(ClassId)
    }

    pub fn require(&self, name: &str) -> Result<ClassId> {
        self.id(name).ok_or_else(|| Error::UnknownClassName(String::from(name)))
    }

    pub fn name(&self, id: ClassId) -> &str {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Training-set type frequency of each class.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn ids(&self) -> impl Iterator<Item = ClassId> {
        (0..self.names.len()).map(ClassId)
    }

    /// Maps names to ids, failing on the first unknown name.
    pub fn encode<'a, I>(&self, labels: I) -> Result<Vec<ClassId>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        labels.into_iter().map(|l| self.require(l)).collect()
    }
}

/// Graded per-class output plus the decision drawn from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierResponse {
    /// Probabilities (GCM) or activations (network), indexed by class id.
    /// For nearest neighbour this holds the single winning distance.
    pub scores: Vec<f64>,
    pub decision: ClassId,
}

impl ClassifierResponse {
    /// Decides for the highest score, ties going to the lowest id.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        Self {
            decision: argmax(&scores),
            scores,
        }
    }

    /// Largest score; the GCM probability or activation of the decision.
    pub fn max_score(&self) -> f64 {
        self.scores[self.decision.0]
    }
}

/// Index of the largest score; ties go to the lowest id.
pub(crate) fn argmax(scores: &[f64]) -> ClassId {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    ClassId(best)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Evaluation {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

/// Exact-match accuracy and confusion matrix over `class_count` classes.
/// An empty list scores 0.
pub fn evaluate(decisions: &[ClassId], labels: &[ClassId], class_count: usize) -> Result<Evaluation> {
    if decisions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            found: decisions.len(),
        });
    }
    let mut confusion = vec![vec![0usize; class_count]; class_count];
    let mut correct = 0;
    for (&d, &l) in decisions.iter().zip(labels) {
        if d.0 >= class_count {
            return Err(Error::UnknownClass(d.0));
        }
        if l.0 >= class_count {
            return Err(Error::UnknownClass(l.0));
        }
        confusion[l.0][d.0] += 1;
        correct += usize::from(d == l);
    }
    let total = labels.len();
    let accuracy = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
    Ok(Evaluation {
        accuracy,
        correct,
        total,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_order_is_frequency_then_name() {
        let set = ClassSet::from_labels(["b", "c", "a", "c", "b", "d"]);
        assert_eq!(set.names(), ["b", "c", "a", "d"]);
        assert_eq!(set.counts(), [2, 2, 1, 1]);
        let set = set.with_class("+s");
        assert_eq!(set.id("+s"), Some(ClassId(4)));
    }

    #[test]
    fn argmax_prefers_lower_id_on_ties() {
        assert_eq!(argmax(&[0.5, 0.5, 0.5]), ClassId(0));
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), ClassId(1));
    }

    #[test]
    fn evaluate_all_correct() {
        let ids = [ClassId(0), ClassId(1), ClassId(2)];
        let e = evaluate(&ids, &ids, 3).unwrap();
        assert_eq!(e.accuracy, 1.0);
        assert_eq!(e.confusion, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn evaluate_none_correct() {
        let e = evaluate(&[ClassId(1), ClassId(0)], &[ClassId(0), ClassId(1)], 2).unwrap();
        assert_eq!(e.accuracy, 0.0);
    }

    #[test]
    fn evaluate_mixed_counts() {
        // truth: A, A, B; predicted: A, B, B
        let truth = [ClassId(0), ClassId(0), ClassId(1)];
        let pred = [ClassId(0), ClassId(1), ClassId(1)];
        let e = evaluate(&pred, &truth, 2).unwrap();
        assert_eq!(e.correct, 2);
        assert_eq!(e.confusion, vec![vec![1, 1], vec![0, 1]]);
        assert!((e.accuracy - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_length_mismatch() {
        assert!(matches!(
            evaluate(&[ClassId(0)], &[], 1).unwrap_err(),
            Error::LengthMismatch { .. }
        ));
    }
}

use alloc::vec::Vec;

use super::{ClassId, ClassSet};
use crate::math::{euclidean, squared_distance};
use crate::{Error, Result};

/// Stored training exemplars.
#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarMemory {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    labels: Vec<ClassId>,
    classes: ClassSet,
}

impl ExemplarMemory {
    /// `classes` is the experiment's full label space; it may contain
    /// classes that have no exemplar here.
    pub fn new(vectors: Vec<Vec<f64>>, labels: Vec<ClassId>, classes: ClassSet) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyMemory);
        }
        if vectors.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: vectors.len(),
                found: labels.len(),
            });
        }
        let dim = vectors[0].len();
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if let Some(l) = labels.iter().find(|l| l.0 >= classes.len()) {
            return Err(Error::UnknownClass(l.0));
        }
        Ok(Self {
            dim,
            vectors,
            labels,
            classes,
        })
    }

    /// Keeps only exemplars whose label passes `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(ClassId) -> bool) -> Result<Self> {
        let (vectors, labels) = self
            .vectors
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| keep(l))
            .map(|(v, &l)| (v.clone(), l))
            .unzip();
        Self::new(vectors, labels, self.classes.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn classes(&self) -> &ClassSet {
        &self.classes
    }

    pub(crate) fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                found: query.len(),
            });
        }
        Ok(())
    }

    /// Nearest exemplar to `query`, optionally ignoring exemplar `skip`.
    /// Equal distances resolve to the lowest class id.
    pub fn nearest(&self, query: &[f64], skip: Option<usize>) -> Result<(ClassId, f64)> {
        self.check_query(query)?;
        let mut best: Option<(f64, ClassId)> = None;
        for (i, (v, &label)) in self.vectors.iter().zip(&self.labels).enumerate() {
            if Some(i) == skip {
                continue;
            }
            let d2 = squared_distance(v, query);
            best = match best {
                Some((bd, bl)) if bd < d2 || (bd == d2 && bl <= label) => Some((bd, bl)),
                _ => Some((d2, label)),
            };
        }
        let (d2, label) = best.ok_or(Error::EmptyMemory)?;
        Ok((label, libm::sqrt(d2)))
    }

    /// Nearest-neighbour decision for exemplar `index` with itself removed.
    pub fn leave_one_out_decision(&self, index: usize) -> Result<ClassId> {
        if self.len() < 2 {
            return Err(Error::TooFewEntries(self.len()));
        }
        Ok(self.nearest(&self.vectors[index], Some(index))?.0)
    }
}

/// Class of the nearest exemplar (Euclidean) and its distance.
pub fn nn_classify(memory: &ExemplarMemory, query: &[f64]) -> Result<(ClassId, f64)> {
    memory.nearest(query, None)
}

/// Share of exemplars whose nearest *other* exemplar has the same class.
pub fn nn_leave_one_out(memory: &ExemplarMemory) -> Result<f64> {
    if memory.len() < 2 {
        return Err(Error::TooFewEntries(memory.len()));
    }
    let mut correct = 0usize;
    for i in 0..memory.len() {
        correct += usize::from(memory.leave_one_out_decision(i)? == memory.labels[i]);
    }
    Ok(correct as f64 / memory.len() as f64)
}

/// Row-major `queries.len() × memory.len()` Euclidean distances.
pub fn distance_matrix(memory: &ExemplarMemory, queries: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(queries.len() * memory.len());
    for q in queries {
        memory.check_query(q)?;
        out.extend(memory.vectors.iter().map(|v| euclidean(v, q)));
    }
    Ok(out)
}

//! Default-rule hybrids: an associative classifier trained without the
//! default class answers when its best response passes a threshold `t`;
//! otherwise the default ("add -s") class is emitted.
//!
//! Nearest neighbour accepts when `distance < t`; the GCM and the network
//! accept when their largest probability or activation is `> t`. Equality
//! always falls to the default.

use alloc::vec::Vec;

use crate::classifiers::{
    distance_matrix, gcm_classify, gcm_scores_from_distances, mlp_classify, nn_classify, ClassId, ExemplarMemory,
    GcmParams, MlpModel,
};
use crate::{Error, Result};

/// The associative component of a hybrid.
#[derive(Debug, Clone, Copy)]
pub enum HybridBase<'a> {
    Nn(&'a ExemplarMemory),
    Gcm(&'a ExemplarMemory, &'a GcmParams),
    Mlp(&'a MlpModel),
}

/// The base classifier's decision and the score the threshold is applied to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseResponse {
    pub decision: ClassId,
    /// Nearest distance, top probability, or top activation.
    pub score: f64,
}

impl HybridBase<'_> {
    pub fn respond(&self, query: &[f64]) -> Result<BaseResponse> {
        Ok(match self {
            HybridBase::Nn(m) => {
                let (decision, score) = nn_classify(m, query)?;
                BaseResponse { decision, score }
            }
            HybridBase::Gcm(m, p) => {
                let r = gcm_classify(m, p, query)?;
                BaseResponse {
                    decision: r.decision,
                    score: r.max_score(),
                }
            }
            HybridBase::Mlp(model) => {
                let r = mlp_classify(model, query)?;
                BaseResponse {
                    decision: r.decision,
                    score: r.max_score(),
                }
            }
        })
    }

    pub fn check_threshold(&self, t: f64) -> Result<()> {
        let ok = match self {
            HybridBase::Nn(_) => t >= 0.0,
            _ => (0.0..=1.0).contains(&t),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidThreshold(t))
        }
    }

    /// Whether the associative route is used at threshold `t`.
    pub fn accepts(&self, score: f64, t: f64) -> bool {
        match self {
            HybridBase::Nn(_) => score < t,
            _ => score > t,
        }
    }

    pub fn gate(&self, response: BaseResponse, t: f64, default_class: ClassId) -> ClassId {
        if self.accepts(response.score, t) {
            response.decision
        } else {
            default_class
        }
    }

    pub fn classify(&self, query: &[f64], t: f64, default_class: ClassId) -> Result<ClassId> {
        self.check_threshold(t)?;
        Ok(self.gate(self.respond(query)?, t, default_class))
    }
}

/// Nearest neighbour's class if it lies closer than `t`, else the default.
pub fn hybrid_nn_classify(memory_no_default: &ExemplarMemory, query: &[f64], t: f64, default_class: ClassId) -> Result<ClassId> {
    HybridBase::Nn(memory_no_default).classify(query, t, default_class)
}

/// Most probable class if its probability exceeds `t`, else the default.
pub fn hybrid_gcm_classify(
    memory_no_default: &ExemplarMemory,
    params: &GcmParams,
    query: &[f64],
    t: f64,
    default_class: ClassId,
) -> Result<ClassId> {
    HybridBase::Gcm(memory_no_default, params).classify(query, t, default_class)
}

/// Most active unit's class if its activation exceeds `t`, else the default.
pub fn hybrid_mlp_classify(model_no_default: &MlpModel, query: &[f64], t: f64, default_class: ClassId) -> Result<ClassId> {
    HybridBase::Mlp(model_no_default).classify(query, t, default_class)
}

/// Hybrid accuracy as a function of the threshold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepCurve {
    /// `(t, accuracy)` sorted by `t`.
    pub points: Vec<(f64, f64)>,
    /// Accuracy of the simple classifier trained with the default class.
    pub baseline: f64,
}

impl SweepCurve {
    /// Best point; ties go to the smallest threshold.
    pub fn best(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .copied()
            .fold(None, |best: Option<(f64, f64)>, p| match best {
                Some(b) if b.1 >= p.1 => Some(b),
                _ => Some(p),
            })
    }
}

/// Evaluates the hybrid at every threshold in `t_grid`.
pub fn threshold_sweep(
    base: &HybridBase<'_>,
    queries: &[Vec<f64>],
    labels: &[ClassId],
    t_grid: &[f64],
    default_class: ClassId,
    baseline: f64,
) -> Result<SweepCurve> {
    if queries.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: queries.len(),
            found: labels.len(),
        });
    }
    let responses = queries
        .iter()
        .map(|q| base.respond(q))
        .collect::<Result<Vec<_>>>()?;
    sweep_responses(base, &responses, labels, t_grid, default_class, baseline)
}

/// [`threshold_sweep`] over precomputed base responses.
pub fn sweep_responses(
    base: &HybridBase<'_>,
    responses: &[BaseResponse],
    labels: &[ClassId],
    t_grid: &[f64],
    default_class: ClassId,
    baseline: f64,
) -> Result<SweepCurve> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut grid = t_grid.to_vec();
    for &t in &grid {
        base.check_threshold(t)?;
    }
    grid.sort_by(f64::total_cmp);
    let n = labels.len().max(1) as f64;
    let points = grid
        .into_iter()
        .map(|t| {
            let correct = responses
                .iter()
                .zip(labels)
                .filter(|(r, l)| base.gate(**r, t, default_class) == **l)
                .count();
            (t, correct as f64 / n)
        })
        .collect();
    Ok(SweepCurve { points, baseline })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridOptimum {
    pub scale: f64,
    pub threshold: f64,
    pub accuracy: f64,
}

/// Exhaustive search over GCM scale × probability threshold for the hybrid.
/// Ties go to the smaller threshold, then the smaller scale.
pub fn grid_search_s_t(
    memory_no_default: &ExemplarMemory,
    params: &GcmParams,
    queries: &[Vec<f64>],
    labels: &[ClassId],
    s_grid: &[f64],
    t_grid: &[f64],
    default_class: ClassId,
) -> Result<GridOptimum> {
    if s_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if queries.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: queries.len(),
            found: labels.len(),
        });
    }
    let distances = distance_matrix(memory_no_default, queries)?;
    let n = memory_no_default.len();
    let mut best: Option<(usize, f64, f64)> = None;
    for &s in s_grid {
        let p = params.with_scale(s);
        let base = HybridBase::Gcm(memory_no_default, &p);
        let responses = distances
            .chunks_exact(n)
            .map(|row| {
                let scores = gcm_scores_from_distances(memory_no_default, &p, row)?;
                let decision = crate::classifiers::argmax(&scores);
                Ok(BaseResponse {
                    decision,
                    score: scores[decision.0],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for &t in t_grid {
            base.check_threshold(t)?;
            let correct = responses
                .iter()
                .zip(labels)
                .filter(|(r, l)| base.gate(**r, t, default_class) == **l)
                .count();
            let better = match best {
                None => true,
                Some((bc, bs, bt)) => correct > bc || (correct == bc && (t < bt || (t == bt && s < bs))),
            };
            if better {
                best = Some((correct, s, t));
            }
        }
    }
    let (correct, scale, threshold) = best.expect("grids are non-empty");
    Ok(GridOptimum {
        scale,
        threshold,
        accuracy: correct as f64 / labels.len().max(1) as f64,
    })
}

/// `start, start + step, …` up to and including `end` (within rounding).
/// Points are rounded to 12 decimals so that e.g. `0.05 * 73` reads `3.65`.
pub fn linear_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || end < start {
        return alloc::vec![start];
    }
    let n = libm::floor((end - start) / step + 1e-9) as usize;
    (0..=n)
        .map(|i| libm::round((start + i as f64 * step) * 1e12) / 1e12)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ClassSet, Kernel};
    use alloc::vec;

    fn memory(points: &[([f64; 2], &str)], classes: &ClassSet) -> ExemplarMemory {
        ExemplarMemory::new(
            points.iter().map(|(p, _)| p.to_vec()).collect(),
            points.iter().map(|(_, l)| classes.id(l).unwrap()).collect(),
            classes.clone(),
        )
        .unwrap()
    }

    fn classes() -> ClassSet {
        ClassSet::from_labels(["A", "A", "B", "+s"])
    }

    #[test]
    fn nn_boundary_is_strict() {
        let c = classes();
        let m = memory(&[([0.0, 0.0], "A")], &c);
        let s = c.require("+s").unwrap();
        assert_eq!(hybrid_nn_classify(&m, &[3.0, 4.0], 5.0, s).unwrap(), s);
        assert_eq!(hybrid_nn_classify(&m, &[3.0, 4.0], 5.000001, s).unwrap(), c.require("A").unwrap());
        assert_eq!(hybrid_nn_classify(&m, &[0.0, 0.0], 0.0, s).unwrap(), s);
    }

    #[test]
    fn gcm_and_mlp_limits() {
        let c = classes();
        let m = memory(&[([0.0, 0.0], "A"), ([1.0, 0.0], "B")], &c);
        let s = c.require("+s").unwrap();
        let p = GcmParams::new(1.0, Kernel::Gaussian);
        assert_eq!(hybrid_gcm_classify(&m, &p, &[0.0, 0.0], 1.0, s).unwrap(), s);
        assert_eq!(
            hybrid_gcm_classify(&m, &p, &[0.0, 0.0], 0.0, s).unwrap(),
            gcm_classify(&m, &p, &[0.0, 0.0]).unwrap().decision
        );
        let net = MlpModel::zeros(2, 2, 3).unwrap();
        assert_eq!(hybrid_mlp_classify(&net, &[0.0, 0.0], 1.0, s).unwrap(), s);
        // Every activation is exactly 0.5, which does not exceed 0.5.
        assert_eq!(hybrid_mlp_classify(&net, &[0.0, 0.0], 0.5, s).unwrap(), s);
        assert_eq!(hybrid_mlp_classify(&net, &[0.0, 0.0], 0.49, s).unwrap(), ClassId(0));
    }

    #[test]
    fn threshold_range_checked() {
        let c = classes();
        let m = memory(&[([0.0, 0.0], "A")], &c);
        let p = GcmParams::new(1.0, Kernel::Gaussian);
        assert_eq!(
            hybrid_gcm_classify(&m, &p, &[0.0, 0.0], 1.5, ClassId(0)).unwrap_err(),
            Error::InvalidThreshold(1.5)
        );
        assert_eq!(
            hybrid_nn_classify(&m, &[0.0, 0.0], -1.0, ClassId(0)).unwrap_err(),
            Error::InvalidThreshold(-1.0)
        );
    }

    #[test]
    fn singleton_sweep_and_sorting() {
        let c = classes();
        let m = memory(&[([0.0, 0.0], "A")], &c);
        let q = vec![vec![0.0, 1.0]];
        let l = vec![c.require("A").unwrap()];
        let s = c.require("+s").unwrap();
        let curve = threshold_sweep(&HybridBase::Nn(&m), &q, &l, &[2.0], s, 1.0).unwrap();
        assert_eq!(curve.points, vec![(2.0, 1.0)]);
        let curve = threshold_sweep(&HybridBase::Nn(&m), &q, &l, &[2.0, 0.5], s, 1.0).unwrap();
        assert_eq!(curve.points, vec![(0.5, 0.0), (2.0, 1.0)]);
        assert_eq!(curve.best(), Some((2.0, 1.0)));
    }

    #[test]
    fn one_by_one_grid() {
        let c = classes();
        let m = memory(&[([0.0, 0.0], "A"), ([2.0, 0.0], "B")], &c);
        let q = vec![vec![0.1, 0.0], vec![9.0, 9.0]];
        let l = vec![c.require("A").unwrap(), c.require("+s").unwrap()];
        let opt = grid_search_s_t(
            &m,
            &GcmParams::new(1.0, Kernel::Gaussian),
            &q,
            &l,
            &[1.2],
            &[0.3],
            c.require("+s").unwrap(),
        )
        .unwrap();
        assert_eq!((opt.scale, opt.threshold), (1.2, 0.3));
    }

    #[test]
    fn linear_grid_includes_end() {
        let g = linear_grid(0.0, 1.0, 0.01);
        assert_eq!(g.len(), 101);
        assert!((g[100] - 1.0).abs() < 1e-12);
        assert_eq!(linear_grid(1.4, 1.5, 0.01).len(), 11);
        assert_eq!(linear_grid(0.0, 10.0, 0.05).len(), 201);
    }
}

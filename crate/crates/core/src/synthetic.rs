//! Two-dimensional pseudolanguages: gaussian clusters of "irregular"
//! plural classes plus one default class that is either another cluster
//! or spread uniformly over the whole space.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::classifiers::{nn_classify, ClassId, ClassSet, ExemplarMemory};
use crate::dataset::{split_indices, SplitOptions};
use crate::hybrid::{threshold_sweep, HybridBase, SweepCurve};
use crate::math::euclidean;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DefaultMode {
    Gaussian,
    /// Uniform over the space bounds.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Bounds {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LanguageSpec {
    pub class_count: usize,
    pub points_per_class: usize,
    pub centroids: Vec<[f64; 2]>,
    pub sigmas: Vec<f64>,
    pub default_class_index: usize,
    pub default_mode: DefaultMode,
    pub space_bounds: Bounds,
    pub seed: u64,
}

impl LanguageSpec {
    /// Five equal-variance clusters on the corners and centre of a 10×10
    /// square; the centre cluster is the default class. The space extends
    /// three standard deviations past the outer clusters.
    pub fn language_one(seed: u64) -> Self {
        Self {
            class_count: 5,
            points_per_class: 200,
            centroids: alloc::vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0], [5.0, 5.0]],
            sigmas: alloc::vec![0.5; 5],
            default_class_index: 4,
            default_mode: DefaultMode::Gaussian,
            space_bounds: Bounds {
                min: [-1.5, -1.5],
                max: [11.5, 11.5],
            },
            seed,
        }
    }

    /// As [`language_one`](Self::language_one), but the default class fills
    /// the whole space uniformly.
    pub fn language_two(seed: u64) -> Self {
        Self {
            default_mode: DefaultMode::Uniform,
            ..Self::language_one(seed)
        }
    }

    /// Preset by number (1 or 2).
    pub fn preset(language: u8, seed: u64) -> Result<Self> {
        match language {
            1 => Ok(Self::language_one(seed)),
            2 => Ok(Self::language_two(seed)),
            _ => Err(Error::InvalidSpec("language preset must be 1 or 2")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_count == 0 {
            return Err(Error::InvalidSpec("class_count must be positive"));
        }
        if self.centroids.len() != self.class_count || self.sigmas.len() != self.class_count {
            return Err(Error::InvalidSpec("need one centroid and one sigma per class"));
        }
        if self.default_class_index >= self.class_count {
            return Err(Error::InvalidSpec("default_class_index out of range"));
        }
        if self.points_per_class == 0 {
            return Err(Error::InvalidSpec("points_per_class must be positive"));
        }
        if self.sigmas.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidSpec("sigmas must be finite and non-negative"));
        }
        let b = &self.space_bounds;
        if (0..2).any(|i| !(b.min[i] < b.max[i])) {
            return Err(Error::InvalidSpec("space bounds must have min < max"));
        }
        Ok(())
    }

    pub fn class_name(index: usize) -> String {
        format!("class{index}")
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticSample {
    /// `(point, class index)`, grouped by class.
    pub points: Vec<([f64; 2], usize)>,
    pub spec: LanguageSpec,
}

impl SyntheticSample {
    pub fn is_default(&self, class: usize) -> bool {
        class == self.spec.default_class_index
    }
}

pub fn generate_language(spec: &LanguageSpec) -> Result<SyntheticSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let b = spec.space_bounds;
    let mut points = Vec::with_capacity(spec.class_count * spec.points_per_class);
    for class in 0..spec.class_count {
        let uniform = class == spec.default_class_index && spec.default_mode == DefaultMode::Uniform;
        let c = spec.centroids[class];
        let noise = Normal::new(0.0, spec.sigmas[class]).map_err(|_| Error::InvalidSpec("bad sigma"))?;
        for _ in 0..spec.points_per_class {
            let p = if uniform {
                [rng.gen_range(b.min[0]..=b.max[0]), rng.gen_range(b.min[1]..=b.max[1])]
            } else {
                [c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]
            };
            points.push((p, class));
        }
    }
    Ok(SyntheticSample {
        points,
        spec: spec.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    SimpleWins,
    HybridWins,
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comparison {
    pub simple_accuracy: f64,
    pub hybrid_curve: SweepCurve,
    /// `(t, accuracy)` of the best hybrid point.
    pub best_hybrid: (f64, f64),
    pub verdict: Verdict,
}

/// Splits the sample in half, then compares nearest neighbour trained on
/// every class with the nearest-neighbour hybrid trained without the
/// default class, at its best threshold.
pub fn compare_simple_vs_hybrid(sample: &SyntheticSample, split_seed: u64, t_grid: &[f64]) -> Result<Comparison> {
    let mut present: Vec<usize> = sample.points.iter().map(|(_, c)| *c).collect();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::DegenerateSample);
    }
    let names: Vec<String> = sample.points.iter().map(|(_, c)| LanguageSpec::class_name(*c)).collect();
    let labels: Vec<&str> = names.iter().map(String::as_str).collect();
    let default_name = LanguageSpec::class_name(sample.spec.default_class_index);
    let (train, test) = split_indices(
        &labels,
        &SplitOptions {
            fraction: 0.5,
            seed: split_seed,
            stratify: false,
        },
    )?;
    let mut classes = ClassSet::from_labels(train.iter().map(|&i| labels[i])).with_class(&default_name);
    for &i in &test {
        classes = classes.with_class(labels[i]);
    }
    let default_class = classes.require(&default_name)?;
    let vector = |i: usize| sample.points[i].0.to_vec();
    let id = |i: usize| classes.id(labels[i]).expect("checked");

    let simple = ExemplarMemory::new(
        train.iter().map(|&i| vector(i)).collect(),
        train.iter().map(|&i| id(i)).collect(),
        classes.clone(),
    )?;
    let no_default = simple.filtered(|c| c != default_class)?;

    let queries: Vec<Vec<f64>> = test.iter().map(|&i| vector(i)).collect();
    let truth: Vec<ClassId> = test.iter().map(|&i| id(i)).collect();
    let mut simple_correct = 0usize;
    for (q, &l) in queries.iter().zip(&truth) {
        simple_correct += usize::from(nn_classify(&simple, q)?.0 == l);
    }
    let n = truth.len().max(1) as f64;
    let simple_accuracy = simple_correct as f64 / n;
    let curve = threshold_sweep(&HybridBase::Nn(&no_default), &queries, &truth, t_grid, default_class, simple_accuracy)?;
    let best = curve.best().expect("sweep grid is non-empty");
    let verdict = if best.1 > simple_accuracy {
        Verdict::HybridWins
    } else if best.1 < simple_accuracy {
        Verdict::SimpleWins
    } else {
        Verdict::Tie
    };
    Ok(Comparison {
        simple_accuracy,
        hybrid_curve: curve,
        best_hybrid: best,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Taxonomy {
    pub interfacial: usize,
    pub isolated: usize,
    /// Distance under which a default point counts as interfacial.
    pub radius: f64,
}

/// Splits default-class points into those hugging an irregular cluster and
/// those in open space.
///
/// The radius is twice the median distance from an irregular point to the
/// nearest other point of its own class.
pub fn regular_taxonomy(sample: &SyntheticSample) -> Result<Taxonomy> {
    let (defaults, irregular): (Vec<_>, Vec<_>) =
        sample.points.iter().partition(|(_, c)| sample.is_default(*c));
    if defaults.is_empty() {
        return Err(Error::NoDefaultPoints);
    }
    let mut spacing: Vec<f64> = irregular
        .iter()
        .enumerate()
        .filter_map(|(i, (p, c))| {
            irregular
                .iter()
                .enumerate()
                .filter(|(j, (_, cj))| *j != i && cj == c)
                .map(|(_, (q, _))| euclidean(p, q))
                .min_by(f64::total_cmp)
        })
        .collect();
    spacing.sort_by(f64::total_cmp);
    let radius = if spacing.is_empty() { 0.0 } else { 2.0 * median(&spacing) };

    let interfacial = defaults
        .iter()
        .filter(|(p, _)| irregular.iter().any(|(q, _)| euclidean(p, q) < radius))
        .count();
    Ok(Taxonomy {
        interfacial,
        isolated: defaults.len() - interfacial,
        radius,
    })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::linear_grid;
    use alloc::vec;

    #[test]
    fn presets_have_expected_shape() {
        let one = generate_language(&LanguageSpec::language_one(3)).unwrap();
        assert_eq!(one.points.len(), 1000);
        let two = generate_language(&LanguageSpec::language_two(3)).unwrap();
        let b = two.spec.space_bounds;
        assert!(two.points.iter().filter(|(_, c)| *c == 4).all(|(p, _)| b.contains(*p)));
        // The irregular clusters are identical across the presets.
        assert_eq!(one.points[..800], two.points[..800]);
    }

    #[test]
    fn zero_sigma_collapses_to_centroid() {
        let mut spec = LanguageSpec::language_one(0);
        spec.sigmas = vec![0.0; 5];
        let s = generate_language(&spec).unwrap();
        assert!(s.points.iter().all(|(p, c)| *p == spec.centroids[*c]));
    }

    #[test]
    fn invalid_specs() {
        let mut spec = LanguageSpec::language_one(0);
        spec.sigmas.pop();
        assert!(matches!(generate_language(&spec), Err(Error::InvalidSpec(_))));
        let mut spec = LanguageSpec::language_one(0);
        spec.default_class_index = 5;
        assert!(matches!(generate_language(&spec), Err(Error::InvalidSpec(_))));
        assert!(LanguageSpec::preset(3, 0).is_err());
    }

    #[test]
    fn reproducible() {
        let spec = LanguageSpec::language_two(42);
        assert_eq!(generate_language(&spec).unwrap(), generate_language(&spec).unwrap());
    }

    #[test]
    fn single_class_sample_rejected() {
        let mut spec = LanguageSpec::language_one(0);
        spec.class_count = 1;
        spec.centroids.truncate(1);
        spec.sigmas.truncate(1);
        spec.default_class_index = 0;
        let s = generate_language(&spec).unwrap();
        assert_eq!(compare_simple_vs_hybrid(&s, 0, &[1.0]).unwrap_err(), Error::DegenerateSample);
    }

    #[test]
    fn far_separated_classes_tie_at_large_t() {
        let mut spec = LanguageSpec::language_one(5);
        spec.class_count = 2;
        spec.centroids = vec![[0.0, 0.0], [100.0, 100.0]];
        spec.sigmas = vec![0.5, 0.5];
        spec.default_class_index = 1;
        spec.space_bounds = Bounds { min: [-1.0, -1.0], max: [101.0, 101.0] };
        let s = generate_language(&spec).unwrap();
        let cmp = compare_simple_vs_hybrid(&s, 1, &linear_grid(0.0, 50.0, 1.0)).unwrap();
        assert_eq!(cmp.simple_accuracy, 1.0);
        assert_eq!(cmp.best_hybrid.1, 1.0);
        assert_eq!(cmp.verdict, Verdict::Tie);
    }

    #[test]
    fn taxonomy_extremes() {
        let spec = LanguageSpec {
            class_count: 2,
            points_per_class: 1,
            centroids: vec![[0.0, 0.0], [0.0, 0.0]],
            sigmas: vec![0.0, 0.0],
            default_class_index: 1,
            default_mode: DefaultMode::Gaussian,
            space_bounds: Bounds { min: [0.0, 0.0], max: [1.0, 1.0] },
            seed: 0,
        };
        let near = SyntheticSample {
            points: vec![([0.0, 0.0], 0), ([1.0, 0.0], 0), ([0.0, 0.0], 1)],
            spec: spec.clone(),
        };
        let t = regular_taxonomy(&near).unwrap();
        assert_eq!((t.interfacial, t.isolated, t.radius), (1, 0, 2.0));
        let far = SyntheticSample {
            points: vec![([0.0, 0.0], 0), ([1.0, 0.0], 0), ([50.0, 50.0], 1)],
            spec: spec.clone(),
        };
        let t = regular_taxonomy(&far).unwrap();
        assert_eq!((t.interfacial, t.isolated), (0, 1));
        let none = SyntheticSample { points: vec![([0.0, 0.0], 0)], spec };
        assert_eq!(regular_taxonomy(&none).unwrap_err(), Error::NoDefaultPoints);
    }

    #[test]
    fn language_two_has_both_kinds_of_regulars() {
        let s = generate_language(&LanguageSpec::language_two(9)).unwrap();
        let t = regular_taxonomy(&s).unwrap();
        assert!(t.interfacial > 0 && t.isolated > 0);
        assert_eq!(t.interfacial + t.isolated, 200);
    }
}

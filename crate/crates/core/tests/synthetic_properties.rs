use plural_core::hybrid::linear_grid;
use plural_core::synthetic::{Bounds, LanguageSpec};
use plural_core::{compare_simple_vs_hybrid, generate_language, regular_taxonomy};

/// Mean over seeds of (best hybrid − simple) and of interfacial/isolated.
fn mean_gap_and_ratio(lo: f64, hi: f64, seeds: u64) -> (f64, f64) {
    let grid = linear_grid(0.0, 5.0, 0.05);
    let (mut gap, mut ratio) = (0.0, 0.0);
    for seed in 0..seeds {
        let mut spec = LanguageSpec::language_two(seed);
        spec.space_bounds = Bounds { min: [lo, lo], max: [hi, hi] };
        let sample = generate_language(&spec).unwrap();
        let c = compare_simple_vs_hybrid(&sample, seed, &grid).unwrap();
        gap += c.best_hybrid.1 - c.simple_accuracy;
        let t = regular_taxonomy(&sample).unwrap();
        ratio += t.interfacial as f64 / t.isolated.max(1) as f64;
    }
    (gap / seeds as f64, ratio / seeds as f64)
}

// The boxes all enclose every irregular cluster; only the empty margin shrinks.
#[test]
fn shrinking_the_default_space_does_not_shrink_the_hybrid_benefit() {
    let wide = mean_gap_and_ratio(-10.0, 20.0, 20);
    let middle = mean_gap_and_ratio(-6.0, 16.0, 20);
    let tight = mean_gap_and_ratio(-1.5, 11.5, 20);
    assert!(wide.1 < middle.1 && middle.1 < tight.1, "ratios {wide:?} {middle:?} {tight:?}");
    assert!(tight.0 >= wide.0, "gaps {wide:?} {tight:?}");
    assert!(tight.0 >= middle.0, "gaps {middle:?} {tight:?}");
}

#[test]
fn generation_is_reproducible() {
    for lang in [1, 2] {
        let spec = LanguageSpec::preset(lang, 42).unwrap();
        assert_eq!(generate_language(&spec).unwrap(), generate_language(&spec).unwrap());
    }
}

#[test]
fn taxonomy_partitions_default_points() {
    for seed in 0..5 {
        let sample = generate_language(&LanguageSpec::language_two(seed)).unwrap();
        let t = regular_taxonomy(&sample).unwrap();
        let defaults = sample.points.iter().filter(|(_, c)| sample.is_default(*c)).count();
        assert_eq!(t.interfacial + t.isolated, defaults);
        assert!(t.interfacial > 0 && t.isolated > 0);
    }
}

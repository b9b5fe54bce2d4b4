//! Pseudolanguage runs and their output files.

use std::path::{Path, PathBuf};

use plural_core::synthetic::{regular_taxonomy, Comparison, Taxonomy};
use plural_core::{compare_simple_vs_hybrid, generate_language, LanguageSpec, SyntheticSample};
use serde::Serialize;

use crate::config::Grid;
use crate::report::{emit_curve, write_file};
use crate::{Error, Result};

/// Default nearest-neighbour threshold grid for the 2-D languages.
pub const SYNTH_THRESHOLD_GRID: Grid = Grid::new(0.0, 5.0, 0.05);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthRun {
    pub language: u8,
    pub split_seed: u64,
    pub spec: LanguageSpec,
    pub comparison: Comparison,
    pub taxonomy: Taxonomy,
    #[serde(skip)]
    pub sample: SyntheticSample,
}

pub fn run_synthetic(language: u8, seed: u64, split_seed: u64, t_grid: &Grid) -> Result<SynthRun> {
    let spec = LanguageSpec::preset(language, seed).map_err(|e| Error::Config(e.to_string()))?;
    let sample = generate_language(&spec)?;
    let comparison = compare_simple_vs_hybrid(&sample, split_seed, &t_grid.values())?;
    let taxonomy = regular_taxonomy(&sample)?;
    Ok(SynthRun {
        language,
        split_seed,
        spec,
        comparison,
        taxonomy,
        sample,
    })
}

/// CSV `x,y,class`.
pub fn emit_sample(sample: &SyntheticSample) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "class"])?;
    for ([x, y], c) in &sample.points {
        w.write_record([x.to_string(), y.to_string(), LanguageSpec::class_name(*c)])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("UTF-8"))
}

/// Writes `language<N>_sample.csv`, `language<N>_curve.csv` and
/// `language<N>_verdict.json` into `dir`.
pub fn write_synthetic(run: &SynthRun, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = format!("language{}", run.language);
    let files = [
        (format!("{stem}_sample.csv"), emit_sample(&run.sample)?),
        (format!("{stem}_curve.csv"), emit_curve(&run.comparison.hybrid_curve)?),
        (format!("{stem}_verdict.json"), serde_json::to_string_pretty(run)? + "\n"),
    ];
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}

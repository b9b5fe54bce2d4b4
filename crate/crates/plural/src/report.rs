//! The experiment report and the files written next to it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use plural_core::{LexiconEntry, SweepCurve};
use serde::Serialize;

use crate::config::{ExperimentConfig, Selection};
use crate::experiment::{Artifacts, GcmResult, MlpResult, MlpSweepRow, NnResult, MLP_SWEEP};
use crate::{Error, Result};

pub const REPORT_VERSION: u32 = 1;

/// Marks a summary cell with no value.
pub const GAP: &str = "n/a";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// Hash of the configuration, output directory left out.
    pub config_sha256: String,
    pub inputs_sha256: BTreeMap<String, String>,
    pub seeds: BTreeMap<String, Vec<u64>>,
    pub version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counts {
    pub ingested: usize,
    pub excluded: usize,
    pub filtered: usize,
    pub discarded: usize,
    pub non_compound: usize,
    pub fit: usize,
    pub fit_no_default: usize,
    pub selection: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub class: String,
    pub count: usize,
    pub percent: f64,
}

impl FrequencyRow {
    pub fn new(class: &str, count: usize, total: usize) -> Self {
        Self {
            class: class.to_string(),
            count,
            percent: if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub classifier: String,
    pub simple: Option<f64>,
    pub hybrid: Option<f64>,
}

impl SummaryRow {
    pub fn new(classifier: &str, simple: Option<f64>, hybrid: Option<f64>) -> Self {
        Self {
            classifier: classifier.to_string(),
            simple,
            hybrid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub provenance: Provenance,
    /// The resolved configuration, output directory left out.
    pub config: ExperimentConfig,
    pub counts: Counts,
    pub selection: Selection,
    /// Class set in id order with training counts.
    pub classes: Vec<FrequencyRow>,
    pub default_class: String,
    pub frequency_all: Vec<FrequencyRow>,
    pub frequency_non_compound: Vec<FrequencyRow>,
    pub nn: Option<NnResult>,
    pub gcm: Option<GcmResult>,
    pub mlp: Option<MlpResult>,
    pub summary: Vec<SummaryRow>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Class counts sorted by descending count, then name.
pub fn frequency_rows(entries: &[LexiconEntry]) -> Vec<FrequencyRow> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for e in entries {
        *counts.entry(e.class_name()).or_default() += 1;
    }
    let mut rows: Vec<FrequencyRow> = counts
        .iter()
        .map(|(c, &n)| FrequencyRow::new(c, n, entries.len()))
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.class.cmp(&b.class)));
    rows
}

/// CSV `class,count,percent`.
pub fn emit_frequency_table(rows: &[FrequencyRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["class", "count", "percent"])?;
    for r in rows {
        w.write_record([r.class.clone(), r.count.to_string(), format!("{:.2}", r.percent)])?;
    }
    Ok(into_string(w))
}

/// CSV `classifier,simple,hybrid` in percent; missing cells read [`GAP`].
pub fn emit_summary(rows: &[SummaryRow]) -> Result<String> {
    let cell = |v: Option<f64>| v.map_or_else(|| GAP.to_string(), |a| format!("{:.1}", 100.0 * a));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["classifier", "simple", "hybrid"])?;
    for r in rows {
        w.write_record([r.classifier.clone(), cell(r.simple), cell(r.hybrid)])?;
    }
    Ok(into_string(w))
}

/// CSV `t,accuracy`.
pub fn emit_curve(curve: &SweepCurve) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "accuracy"])?;
    for (t, a) in &curve.points {
        w.write_record([t.to_string(), a.to_string()])?;
    }
    Ok(into_string(w))
}

/// CSV `hidden,epochs,seed,test_accuracy`; a `selection_accuracy` column
/// is added when selection used a validation split.
pub fn emit_mlp_sweep(rows: &[MlpSweepRow], with_selection: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["hidden", "epochs", "seed", "test_accuracy"];
    if with_selection {
        header.push("selection_accuracy");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.hidden.to_string(), r.epochs.to_string(), r.seed.to_string(), r.test_accuracy.to_string()];
        if with_selection {
            rec.push(r.selection_accuracy.to_string());
        }
        w.write_record(&rec)?;
    }
    Ok(into_string(w))
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV of UTF-8 fields")
}

#[derive(Serialize)]
struct CurveSidecar<'a> {
    classifier: &'a str,
    baseline: f64,
    best: Option<(f64, f64)>,
    settings: &'a BTreeMap<String, f64>,
    config_sha256: &'a str,
    config: &'a ExperimentConfig,
}

/// Sidecar file name for a curve CSV: same stem, `.json`.
pub fn sidecar_name(csv_name: &str) -> String {
    match csv_name.strip_suffix(".csv") {
        Some(stem) => format!("{stem}.json"),
        None => format!("{csv_name}.json"),
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the report and its artifacts into `dir`; returns the paths written.
pub fn write_outputs(report: &Report, artifacts: &Artifacts, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, contents: String| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    put("report.json", report.to_json()?)?;
    put("summary.csv", emit_summary(&report.summary)?)?;
    put("frequency_table.csv", emit_frequency_table(&report.frequency_non_compound)?)?;
    put("frequency_table_all.csv", emit_frequency_table(&report.frequency_all)?)?;
    for (name, c) in &artifacts.curves {
        put(name, emit_curve(&c.curve)?)?;
        let sidecar = CurveSidecar {
            classifier: &c.classifier,
            baseline: c.curve.baseline,
            best: c.curve.best(),
            settings: &c.settings,
            config_sha256: &report.provenance.config_sha256,
            config: &report.config,
        };
        put(&sidecar_name(name), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    }
    if !artifacts.mlp_sweep.is_empty() {
        let with_selection = matches!(report.selection, Selection::Validation { .. });
        put(MLP_SWEEP, emit_mlp_sweep(&artifacts.mlp_sweep, with_selection)?)?;
    }
    for (name, model) in &artifacts.models {
        put(name, model.to_json()?)?;
    }
    Ok(written)
}

/// Plain-text table of the summary for terminals.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| GAP.to_string(), |a| format!("{:.1}%", 100.0 * a));
    let mut out = format!("{:<18} {:>8} {:>8}\n", "classifier", "simple", "hybrid");
    for r in rows {
        let _ = writeln!(out, "{:<18} {:>8} {:>8}", r.classifier, cell(r.simple), cell(r.hybrid));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_marks_gaps() {
        let rows = vec![
            SummaryRow::new("NN", Some(0.71), Some(0.735)),
            SummaryRow::new("MLP", None, Some(0.5)),
        ];
        assert_eq!(emit_summary(&rows).unwrap(), "classifier,simple,hybrid\nNN,71.0,73.5\nMLP,n/a,50.0\n");
    }

    #[test]
    fn frequency_table_keeps_row_order() {
        let rows = vec![
            FrequencyRow::new("b", 2, 5),
            FrequencyRow::new("a", 2, 5),
            FrequencyRow::new("c", 1, 5),
        ];
        let text = emit_frequency_table(&rows).unwrap();
        assert_eq!(text, "class,count,percent\nb,2,40.00\na,2,40.00\nc,1,20.00\n");
    }

    #[test]
    fn curve_csv() {
        let curve = SweepCurve {
            points: vec![(0.0, 0.5), (0.05, 0.75)],
            baseline: 0.6,
        };
        assert_eq!(emit_curve(&curve).unwrap(), "t,accuracy\n0,0.5\n0.05,0.75\n");
        assert_eq!(sidecar_name("nn_curve.csv"), "nn_curve.json");
    }
}

//! The end-to-end run: ingest, filter, split, encode, fit the three
//! classifiers and their hybrids, and collect everything into a [`Report`].

use std::collections::BTreeMap;
use std::path::Path;

use plural_core::classifiers::{distance_matrix, gcm_scores_from_distances, MlpTrainer};
use plural_core::dataset::split_indices;
use plural_core::hybrid::{grid_search_s_t, sweep_responses, BaseResponse};
use plural_core::{
    evaluate, filter_by_type_frequency, mlp_classify, mlp_train, nn_classify, remove_compounds,
    ClassId, ClassSet, ClassifierResponse, Evaluation, ExemplarMemory, FeatureTable, GcmParams,
    HybridBase, LexiconEntry, MlpConfig, MlpModel, SweepCurve,
};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Selection};
use crate::error::StageExt;
use crate::features::{default_feature_table, load_feature_table, DEFAULT_FEATURE_TABLE};
use crate::lexicon::{ingest, load_exclusions};
use crate::model_io::{ModelFile, TrainingInfo};
use crate::report::{frequency_rows, FrequencyRow, Report, SummaryRow};
use crate::{Error, Result};

/// Lexicon after each filtering step.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub table: FeatureTable,
    pub ingested: usize,
    pub excluded: usize,
    /// Entries in classes above the type-frequency cutoff.
    pub filtered: Vec<LexiconEntry>,
    pub discarded: Vec<LexiconEntry>,
    /// `filtered` without compounds; the experiment's data set.
    pub nouns: Vec<LexiconEntry>,
}

pub fn load_table(config: &ExperimentConfig) -> Result<FeatureTable> {
    match &config.features {
        Some(path) => load_feature_table(path),
        None => Ok(default_feature_table()),
    }
}

pub fn prepare(config: &ExperimentConfig) -> Result<PreparedData> {
    let table = load_table(config)?;
    let mut entries = ingest(&config.lexicon, &table)?;
    let ingested = entries.len();
    if let Some(path) = &config.exclusions {
        let excluded = load_exclusions(path)?;
        entries.retain(|e| !excluded.contains(&e.orthography));
    }
    let excluded = ingested - entries.len();
    let (filtered, discarded) = filter_by_type_frequency(entries, config.min_fraction);
    let nouns = match config.compounds.matcher() {
        Some(by) => remove_compounds(filtered.clone(), by),
        None => filtered.clone(),
    };
    Ok(PreparedData {
        table,
        ingested,
        excluded,
        filtered,
        discarded,
        nouns,
    })
}

/// Encoded vectors with labels in the experiment's class set.
#[derive(Debug, Clone, Default)]
pub struct LabeledSet {
    pub ids: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<ClassId>,
}

impl LabeledSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn without(&self, class: ClassId) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] != class).collect();
        self.subset(&keep)
    }

    fn subset(&self, idx: &[usize]) -> Self {
        Self {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            vectors: idx.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Training, selection and test sets for one experiment.
///
/// With test-set selection `select` is a copy of `test`; with a
/// validation split it is carved out of the training half and `fit` holds
/// the remainder.
#[derive(Debug, Clone)]
pub struct Sets {
    pub classes: ClassSet,
    pub default_class: ClassId,
    pub fit: LabeledSet,
    pub fit_no_default: LabeledSet,
    pub select: LabeledSet,
    pub test: LabeledSet,
}

pub fn build_sets(config: &ExperimentConfig, table: &FeatureTable, nouns: &[LexiconEntry]) -> Result<Sets> {
    let names: Vec<String> = nouns.iter().map(LexiconEntry::class_name).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let (train_idx, test_idx) = split_indices(&refs, &config.split.options())?;
    let (fit_idx, select_idx) = match config.selection {
        Selection::Test => (train_idx, None),
        Selection::Validation { fraction, seed } => {
            let train_refs: Vec<&str> = train_idx.iter().map(|&i| refs[i]).collect();
            let opts = plural_core::SplitOptions {
                fraction: 1.0 - fraction,
                seed,
                stratify: config.split.stratify,
            };
            let (fit, val) = split_indices(&train_refs, &opts)?;
            (
                fit.iter().map(|&k| train_idx[k]).collect(),
                Some(val.iter().map(|&k| train_idx[k]).collect::<Vec<_>>()),
            )
        }
    };

    let mut classes = ClassSet::from_labels(fit_idx.iter().map(|&i| refs[i]));
    classes = classes.with_class(&config.default_class);
    for name in &refs {
        classes = classes.with_class(name);
    }
    let default_class = classes.require(&config.default_class)?;

    let encode = |idx: &[usize]| -> Result<LabeledSet> {
        let mut set = LabeledSet::default();
        for &i in idx {
            let e = &nouns[i];
            set.ids.push(e.orthography.clone());
            set.vectors.push(plural_core::encode_word(&e.singular, table, config.slots)?);
            set.labels.push(classes.require(refs[i])?);
        }
        Ok(set)
    };
    let fit = encode(&fit_idx)?;
    let test = encode(&test_idx)?;
    let select = match select_idx {
        Some(idx) => encode(&idx)?,
        None => test.clone(),
    };
    let fit_no_default = fit.without(default_class);
    Ok(Sets {
        classes,
        default_class,
        fit,
        fit_no_default,
        select,
        test,
    })
}

/// One hybrid model's chosen threshold and its results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridResult {
    pub threshold: f64,
    /// Accuracy at `threshold` on the selection set.
    pub selection_accuracy: f64,
    pub test: Evaluation,
    /// Test accuracy with the gate always open (probability threshold 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ungated_accuracy: Option<f64>,
    /// CSV with the test-set accuracy at every threshold.
    pub curve_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NnResult {
    pub simple: Evaluation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leave_one_out: Option<f64>,
    pub hybrid: HybridResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcmResult {
    pub kernel: plural_core::Kernel,
    pub scale: f64,
    pub selection_accuracy: f64,
    pub simple: Evaluation,
    pub hybrid_scale: f64,
    pub hybrid: HybridResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlpSweepRow {
    pub hidden: usize,
    pub epochs: usize,
    pub seed: u64,
    pub selection_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlpResult {
    pub hidden: usize,
    pub epochs: usize,
    pub seed: u64,
    pub selection_accuracy: f64,
    pub simple: Evaluation,
    pub hybrid: HybridResult,
    pub sweep_file: String,
    pub model_file: String,
    pub hybrid_model_file: String,
}

/// Threshold curve plus what produced it, written as CSV and JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveArtifact {
    pub classifier: String,
    pub curve: SweepCurve,
    pub settings: BTreeMap<String, f64>,
}

/// Files derived from a run besides the report itself.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub curves: BTreeMap<String, CurveArtifact>,
    pub mlp_sweep: Vec<MlpSweepRow>,
    pub models: BTreeMap<String, ModelFile>,
}

pub const NN_CURVE: &str = "nn_hybrid_curve.csv";
pub const GCM_CURVE: &str = "gcm_hybrid_curve.csv";
pub const MLP_CURVE: &str = "mlp_hybrid_curve.csv";
pub const MLP_SWEEP: &str = "mlp_sweep.csv";
pub const MLP_MODEL: &str = "mlp_model.json";
pub const MLP_HYBRID_MODEL: &str = "mlp_hybrid_model.json";

/// Runs every enabled classifier. Identical configs and inputs give
/// identical reports.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Report, Artifacts)> {
    config.validate()?;
    let data = prepare(config).stage("ingest")?;
    let sets = build_sets(config, &data.table, &data.nouns).stage("encode")?;
    let mut artifacts = Artifacts::default();

    let nn = config
        .nn
        .enabled
        .then(|| run_nn(config, &data, &sets, &mut artifacts))
        .transpose()
        .stage("nearest neighbour")?;
    let gcm = config
        .gcm
        .enabled
        .then(|| run_gcm(config, &sets, &mut artifacts))
        .transpose()
        .stage("gcm")?;
    let mlp = config
        .mlp
        .enabled
        .then(|| run_mlp(config, &sets, &mut artifacts))
        .transpose()
        .stage("network")?;

    let summary = vec![
        SummaryRow::new("NN", nn.as_ref().map(|r| r.simple.accuracy), nn.as_ref().map(|r| r.hybrid.test.accuracy)),
        SummaryRow::new("NN leave-one-out", nn.as_ref().and_then(|r| r.leave_one_out), None),
        SummaryRow::new("GCM", gcm.as_ref().map(|r| r.simple.accuracy), gcm.as_ref().map(|r| r.hybrid.test.accuracy)),
        SummaryRow::new("MLP", mlp.as_ref().map(|r| r.simple.accuracy), mlp.as_ref().map(|r| r.hybrid.test.accuracy)),
    ];

    let report = Report {
        format_version: crate::report::REPORT_VERSION,
        provenance: provenance(config).stage("provenance")?,
        config: hashable(config),
        counts: crate::report::Counts {
            ingested: data.ingested,
            excluded: data.excluded,
            filtered: data.filtered.len(),
            discarded: data.discarded.len(),
            non_compound: data.nouns.len(),
            fit: sets.fit.len(),
            fit_no_default: sets.fit_no_default.len(),
            selection: sets.select.len(),
            test: sets.test.len(),
        },
        selection: config.selection,
        classes: class_rows(&sets.classes),
        default_class: config.default_class.clone(),
        frequency_all: frequency_rows(&data.filtered),
        frequency_non_compound: frequency_rows(&data.nouns),
        nn,
        gcm,
        mlp,
        summary,
    };
    Ok((report, artifacts))
}

fn class_rows(classes: &ClassSet) -> Vec<FrequencyRow> {
    let total: usize = classes.counts().iter().sum();
    classes
        .names()
        .iter()
        .zip(classes.counts())
        .map(|(name, &count)| FrequencyRow::new(name, count, total))
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn provenance(config: &ExperimentConfig) -> Result<crate::report::Provenance> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| Error::io(p, e));
    let mut inputs = BTreeMap::new();
    inputs.insert("lexicon".to_string(), sha256_hex(&read(&config.lexicon)?));
    let features = match &config.features {
        Some(p) => read(p)?,
        None => DEFAULT_FEATURE_TABLE.as_bytes().to_vec(),
    };
    inputs.insert("features".to_string(), sha256_hex(&features));
    if let Some(p) = &config.exclusions {
        inputs.insert("exclusions".to_string(), sha256_hex(&read(p)?));
    }
    let mut seeds = BTreeMap::new();
    seeds.insert("split".to_string(), vec![config.split.seed]);
    if let Selection::Validation { seed, .. } = config.selection {
        seeds.insert("validation".to_string(), vec![seed]);
    }
    seeds.insert("mlp".to_string(), config.mlp.seeds.clone());
    let canonical = serde_json::to_vec(&hashable(config))?;
    Ok(crate::report::Provenance {
        config_sha256: sha256_hex(&canonical),
        inputs_sha256: inputs,
        seeds,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// The config without where outputs go.
fn hashable(config: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        output_dir: Default::default(),
        ..config.clone()
    }
}

fn decisions_par(
    queries: &[Vec<f64>],
    f: impl Fn(&[f64]) -> plural_core::Result<ClassId> + Sync,
) -> Result<Vec<ClassId>> {
    Ok(queries.par_iter().map(|q| f(q)).collect::<plural_core::Result<Vec<_>>>()?)
}

fn responses_par(base: &HybridBase<'_>, queries: &[Vec<f64>]) -> Result<Vec<BaseResponse>> {
    Ok(queries
        .par_iter()
        .map(|q| base.respond(q))
        .collect::<plural_core::Result<Vec<_>>>()?)
}

/// Picks the threshold on the selection set and scores it on the test set.
#[allow(clippy::too_many_arguments)]
fn finish_hybrid(
    sets: &Sets,
    base: &HybridBase<'_>,
    t_grid: &[f64],
    baseline_test: f64,
    // `(threshold, selection accuracy)` when already chosen elsewhere.
    fixed_threshold: Option<(f64, f64)>,
    name: &str,
    file: &str,
    settings: BTreeMap<String, f64>,
    artifacts: &mut Artifacts,
) -> Result<HybridResult> {
    let test_responses = responses_par(base, &sets.test.vectors)?;
    let test_curve = sweep_responses(base, &test_responses, &sets.test.labels, t_grid, sets.default_class, baseline_test)?;
    let (threshold, selection_accuracy) = match fixed_threshold {
        Some(chosen) => chosen,
        None => {
            let select_curve = if same_set(&sets.select, &sets.test) {
                test_curve.clone()
            } else {
                let r = responses_par(base, &sets.select.vectors)?;
                sweep_responses(base, &r, &sets.select.labels, t_grid, sets.default_class, 0.0)?
            };
            select_curve.best().expect("threshold grid is non-empty")
        }
    };
    let decisions: Vec<ClassId> = test_responses
        .iter()
        .map(|r| base.gate(*r, threshold, sets.default_class))
        .collect();
    let test = evaluate(&decisions, &sets.test.labels, sets.classes.len())?;
    let ungated_accuracy = match base {
        HybridBase::Nn(_) => None,
        _ => Some(test_accuracy_at(base, &test_responses, &sets.test.labels, 0.0, sets.default_class)),
    };
    artifacts.curves.insert(
        file.to_string(),
        CurveArtifact {
            classifier: name.to_string(),
            curve: test_curve,
            settings,
        },
    );
    Ok(HybridResult {
        threshold,
        selection_accuracy,
        test,
        ungated_accuracy,
        curve_file: file.to_string(),
    })
}

fn same_set(a: &LabeledSet, b: &LabeledSet) -> bool {
    a.ids == b.ids && a.labels == b.labels
}

fn test_accuracy_at(base: &HybridBase<'_>, responses: &[BaseResponse], labels: &[ClassId], t: f64, default: ClassId) -> f64 {
    let correct = responses
        .iter()
        .zip(labels)
        .filter(|(r, l)| base.gate(**r, t, default) == **l)
        .count();
    correct as f64 / labels.len().max(1) as f64
}

fn run_nn(config: &ExperimentConfig, data: &PreparedData, sets: &Sets, artifacts: &mut Artifacts) -> Result<NnResult> {
    let memory = ExemplarMemory::new(sets.fit.vectors.clone(), sets.fit.labels.clone(), sets.classes.clone())?;
    let decisions = decisions_par(&sets.test.vectors, |q| Ok(nn_classify(&memory, q)?.0))?;
    let simple = evaluate(&decisions, &sets.test.labels, sets.classes.len())?;

    let leave_one_out = if config.nn.leave_one_out {
        Some(leave_one_out_accuracy(config, data)?)
    } else {
        None
    };

    let no_default = ExemplarMemory::new(
        sets.fit_no_default.vectors.clone(),
        sets.fit_no_default.labels.clone(),
        sets.classes.clone(),
    )?;
    let base = HybridBase::Nn(&no_default);
    let hybrid = finish_hybrid(
        sets,
        &base,
        &config.nn.threshold_grid.values(),
        simple.accuracy,
        None,
        "nn",
        NN_CURVE,
        BTreeMap::new(),
        artifacts,
    )?;
    Ok(NnResult {
        simple,
        leave_one_out,
        hybrid,
    })
}

/// Nearest-neighbour leave-one-out over every frequency-filtered noun,
/// compounds included.
pub fn leave_one_out_accuracy(config: &ExperimentConfig, data: &PreparedData) -> Result<f64> {
    let names: Vec<String> = data.filtered.iter().map(LexiconEntry::class_name).collect();
    let classes = ClassSet::from_labels(names.iter().map(String::as_str));
    let vectors = data
        .filtered
        .iter()
        .map(|e| plural_core::encode_word(&e.singular, &data.table, config.slots))
        .collect::<plural_core::Result<Vec<_>>>()?;
    let labels = classes.encode(names.iter().map(String::as_str))?;
    let memory = ExemplarMemory::new(vectors, labels, classes)?;
    if memory.len() < 2 {
        return Err(plural_core::Error::TooFewEntries(memory.len()).into());
    }
    let correct: usize = (0..memory.len())
        .into_par_iter()
        .map(|i| memory.leave_one_out_decision(i).map(|d| usize::from(d == memory.labels()[i])))
        .collect::<plural_core::Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(correct as f64 / memory.len() as f64)
}

/// Scale with the best accuracy on `(queries, labels)`, smallest on ties.
/// Parallel over the grid; agrees with `gcm_optimize_scale`.
pub fn select_gcm_scale(
    memory: &ExemplarMemory,
    params: &GcmParams,
    queries: &[Vec<f64>],
    labels: &[ClassId],
    grid: &[f64],
) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(plural_core::Error::EmptyGrid.into());
    }
    let distances: Vec<Vec<f64>> = queries
        .par_iter()
        .map(|q| distance_matrix(memory, std::slice::from_ref(q)))
        .collect::<plural_core::Result<_>>()?;
    let correct: Vec<usize> = grid
        .par_iter()
        .map(|&s| {
            let p = params.with_scale(s);
            let mut correct = 0;
            for (row, &label) in distances.iter().zip(labels) {
                let r = ClassifierResponse::from_scores(gcm_scores_from_distances(memory, &p, row)?);
                correct += usize::from(r.decision == label);
            }
            Ok(correct)
        })
        .collect::<plural_core::Result<_>>()?;
    let mut best = 0;
    for i in 1..grid.len() {
        if correct[i] > correct[best] || (correct[i] == correct[best] && grid[i] < grid[best]) {
            best = i;
        }
    }
    Ok((grid[best], correct[best] as f64 / labels.len().max(1) as f64))
}

fn run_gcm(config: &ExperimentConfig, sets: &Sets, artifacts: &mut Artifacts) -> Result<GcmResult> {
    let kernel = config.gcm.kernel;
    let memory = ExemplarMemory::new(sets.fit.vectors.clone(), sets.fit.labels.clone(), sets.classes.clone())?;
    let template = GcmParams::new(1.0, kernel);
    let (scale, selection_accuracy) = select_gcm_scale(
        &memory,
        &template,
        &sets.select.vectors,
        &sets.select.labels,
        &config.gcm.scale_grid.values(),
    )?;
    let params = template.with_scale(scale);
    let decisions = decisions_par(&sets.test.vectors, |q| Ok(plural_core::gcm_classify(&memory, &params, q)?.decision))?;
    let simple = evaluate(&decisions, &sets.test.labels, sets.classes.len())?;

    let no_default = ExemplarMemory::new(
        sets.fit_no_default.vectors.clone(),
        sets.fit_no_default.labels.clone(),
        sets.classes.clone(),
    )?;
    let optimum = grid_search_s_t(
        &no_default,
        &template,
        &sets.select.vectors,
        &sets.select.labels,
        &config.gcm.hybrid_scale_grid.values(),
        &config.gcm.threshold_grid.values(),
        sets.default_class,
    )?;
    let hybrid_params = template.with_scale(optimum.scale);
    let base = HybridBase::Gcm(&no_default, &hybrid_params);
    let settings = BTreeMap::from([("scale".to_string(), optimum.scale)]);
    let hybrid = finish_hybrid(
        sets,
        &base,
        &config.gcm.threshold_grid.values(),
        simple.accuracy,
        Some((optimum.threshold, optimum.accuracy)),
        "gcm",
        GCM_CURVE,
        settings,
        artifacts,
    )?;
    Ok(GcmResult {
        kernel,
        scale,
        selection_accuracy,
        simple,
        hybrid_scale: optimum.scale,
        hybrid,
    })
}

fn mlp_config(config: &ExperimentConfig, hidden: usize, epochs: usize, seed: u64) -> MlpConfig {
    MlpConfig {
        hidden,
        epochs,
        seed,
        rate: config.mlp.rate,
        momentum: config.mlp.momentum,
        init_range: config.mlp.init_range,
    }
}

fn accuracy_of(model: &MlpModel, set: &LabeledSet) -> Result<f64> {
    let decisions = decisions_par(&set.vectors, |q| Ok(mlp_classify(model, q)?.decision))?;
    Ok(evaluate(&decisions, &set.labels, model.outputs())?.accuracy)
}

/// Trains one network per (hidden size, seed) and scores it after every
/// checkpoint epoch. Rows come back sorted by hidden, epochs, seed.
pub fn mlp_sweep(config: &ExperimentConfig, sets: &Sets) -> Result<Vec<MlpSweepRow>> {
    let checkpoints = config.mlp_checkpoints();
    let jobs: Vec<(usize, u64)> = config
        .mlp
        .hidden
        .iter()
        .flat_map(|&h| config.mlp.seeds.iter().map(move |&s| (h, s)))
        .collect();
    let separate = !same_set(&sets.select, &sets.test);
    let mut rows: Vec<MlpSweepRow> = jobs
        .par_iter()
        .map(|&(hidden, seed)| -> Result<Vec<MlpSweepRow>> {
            let cfg = mlp_config(config, hidden, config.mlp.max_epochs, seed);
            let mut trainer = MlpTrainer::new(&sets.fit.vectors, &sets.fit.labels, sets.classes.len(), cfg)?;
            let mut out = Vec::with_capacity(checkpoints.len());
            for &epochs in &checkpoints {
                while trainer.epochs_done() < epochs {
                    trainer.run_epoch();
                }
                let test_accuracy = accuracy_of(trainer.model(), &sets.test)?;
                let selection_accuracy = if separate {
                    accuracy_of(trainer.model(), &sets.select)?
                } else {
                    test_accuracy
                };
                out.push(MlpSweepRow {
                    hidden,
                    epochs,
                    seed,
                    selection_accuracy,
                    test_accuracy,
                });
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|r| (r.hidden, r.epochs, r.seed));
    Ok(rows)
}

/// Best sweep row by selection accuracy; ties go to fewer hidden units,
/// then fewer epochs, then the smaller seed.
pub fn best_sweep_row(rows: &[MlpSweepRow]) -> Option<MlpSweepRow> {
    rows.iter().copied().fold(None, |best: Option<MlpSweepRow>, r| match best {
        Some(b) if b.selection_accuracy > r.selection_accuracy
            || (b.selection_accuracy == r.selection_accuracy
                && (b.hidden, b.epochs, b.seed) <= (r.hidden, r.epochs, r.seed)) =>
        {
            Some(b)
        }
        _ => Some(r),
    })
}

fn run_mlp(config: &ExperimentConfig, sets: &Sets, artifacts: &mut Artifacts) -> Result<MlpResult> {
    let rows = mlp_sweep(config, sets)?;
    let best = best_sweep_row(&rows).expect("sweep has at least one row");
    let cfg = mlp_config(config, best.hidden, best.epochs, best.seed);
    let model = mlp_train(&sets.fit.vectors, &sets.fit.labels, sets.classes.len(), &cfg)?;
    let decisions = decisions_par(&sets.test.vectors, |q| Ok(mlp_classify(&model, q)?.decision))?;
    let simple = evaluate(&decisions, &sets.test.labels, sets.classes.len())?;

    let hybrid_model = mlp_train(
        &sets.fit_no_default.vectors,
        &sets.fit_no_default.labels,
        sets.classes.len(),
        &cfg,
    )?;
    let base = HybridBase::Mlp(&hybrid_model);
    let settings = BTreeMap::from([
        ("hidden".to_string(), best.hidden as f64),
        ("epochs".to_string(), best.epochs as f64),
        ("seed".to_string(), best.seed as f64),
    ]);
    let hybrid = finish_hybrid(
        sets,
        &base,
        &config.mlp.threshold_grid.values(),
        simple.accuracy,
        None,
        "mlp",
        MLP_CURVE,
        settings,
        artifacts,
    )?;

    let info = |trained_without_default: bool, n: usize| TrainingInfo {
        config: cfg,
        training_items: n,
        trained_without_default,
        default_class: config.default_class.clone(),
    };
    artifacts.mlp_sweep = rows;
    artifacts
        .models
        .insert(MLP_MODEL.to_string(), ModelFile::new(&model, &sets.classes, info(false, sets.fit.len())));
    artifacts.models.insert(
        MLP_HYBRID_MODEL.to_string(),
        ModelFile::new(&hybrid_model, &sets.classes, info(true, sets.fit_no_default.len())),
    );
    Ok(MlpResult {
        hidden: best.hidden,
        epochs: best.epochs,
        seed: best.seed,
        selection_accuracy: best.selection_accuracy,
        simple,
        hybrid,
        sweep_file: MLP_SWEEP.to_string(),
        model_file: MLP_MODEL.to_string(),
        hybrid_model_file: MLP_HYBRID_MODEL.to_string(),
    })
}

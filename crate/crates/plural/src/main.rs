use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plural::config::{Compounds, ExperimentConfig, Grid, OUTPUT_DIR_ENV};
use plural::experiment::{build_sets, leave_one_out_accuracy, prepare, select_gcm_scale, Sets};
use plural::lexicon::write_lexicon;
use plural::model_io::{ModelFile, TrainingInfo};
use plural::report::{emit_curve, emit_frequency_table, format_summary, frequency_rows, sidecar_name, write_file};
use plural::synth::{run_synthetic, write_synthetic, SYNTH_THRESHOLD_GRID};
use plural::{run_experiment, write_outputs, Error, Result};
use plural_core::hybrid::sweep_responses;
use plural_core::{
    evaluate, gcm_classify, mlp_classify, mlp_train, nn_classify, ClassId, ExemplarMemory, GcmParams, HybridBase,
    Kernel, MlpConfig,
};

/// Plural-class prediction with associative classifiers and default-rule
/// hybrids.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a lexicon, derive plural classes and apply the frequency and compound filters.
    Ingest(DataArgs),
    /// Write the encoded vectors of the filtered lexicon as CSV.
    Encode(DataArgs),
    /// Train one network on the training split and save it.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 50)]
        hidden: usize,
        #[arg(long, default_value_t = 35)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Train without the default class, for use as a hybrid.
        #[arg(long)]
        no_default: bool,
    },
    /// Score a classifier on the test split.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        classifier: Classifier,
        /// Saved network (required for `mlp`).
        #[arg(long)]
        model: Option<PathBuf>,
        /// GCM scale; chosen from the configured grid when omitted.
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Hybrid accuracy over a threshold grid, written as CSV plus a JSON sidecar.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        classifier: Classifier,
        /// Network trained without the default class (required for `mlp`).
        #[arg(long)]
        model: Option<PathBuf>,
        /// GCM scale; chosen from the configured grid when omitted.
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Generate a pseudolanguage and compare nearest neighbour with its hybrid.
    Synth {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        language: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seed of the train/test split; defaults to `--seed`.
        #[arg(long)]
        split_seed: Option<u64>,
        #[arg(short, long, env = OUTPUT_DIR_ENV, default_value = "out")]
        output_dir: PathBuf,
    },
    /// Run the full experiment and write the report.
    Report(DataArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Classifier {
    Nn,
    Gcm,
    Mlp,
}

#[derive(Args)]
struct DataArgs {
    /// TOML experiment config; flags below override it.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    exclusions: Option<PathBuf>,
    #[arg(long)]
    min_fraction: Option<f64>,
    #[arg(long, value_enum)]
    compounds: Option<CompoundsArg>,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    split_fraction: Option<f64>,
    #[arg(long)]
    kernel: Option<KernelArg>,
    /// Output directory (also settable through PLURAL_OUTPUT_DIR).
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompoundsArg {
    Phonemes,
    Orthography,
    Keep,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Gaussian,
    Exponential,
}

impl DataArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        c.apply_env();
        if let Some(p) = &self.lexicon {
            c.lexicon = p.clone();
        }
        if let Some(p) = &self.features {
            c.features = Some(p.clone());
        }
        if let Some(p) = &self.exclusions {
            c.exclusions = Some(p.clone());
        }
        if let Some(v) = self.min_fraction {
            c.min_fraction = v;
        }
        if let Some(v) = self.compounds {
            c.compounds = match v {
                CompoundsArg::Phonemes => Compounds::Phonemes,
                CompoundsArg::Orthography => Compounds::Orthography,
                CompoundsArg::Keep => Compounds::Keep,
            };
        }
        if let Some(v) = self.split_seed {
            c.split.seed = v;
        }
        if let Some(v) = self.split_fraction {
            c.split.fraction = v;
        }
        if let Some(k) = self.kernel {
            c.gcm.kernel = match k {
                KernelArg::Gaussian => Kernel::Gaussian,
                KernelArg::Exponential => Kernel::Exponential,
            };
        }
        if let Some(p) = &self.output_dir {
            c.output_dir = p.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn mkdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(_) | Error::MissingFile(_) | Error::Toml { .. } | Error::Stage { .. } => e,
        other => Error::Stage {
            stage: name,
            source: Box::new(other),
        },
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => ingest(&args.config()?),
        Command::Encode(args) => encode(&args.config()?),
        Command::Train {
            data,
            hidden,
            epochs,
            seed,
            no_default,
        } => {
            let c = data.config()?;
            let mlp = MlpConfig {
                hidden,
                epochs,
                seed,
                rate: c.mlp.rate,
                momentum: c.mlp.momentum,
                init_range: c.mlp.init_range,
            };
            stage("train", train(&c, mlp, no_default))
        }
        Command::Evaluate {
            data,
            classifier,
            model,
            scale,
        } => {
            let c = data.config()?;
            stage("evaluate", evaluate_cmd(&c, classifier, model.as_deref(), scale))
        }
        Command::Sweep {
            data,
            classifier,
            model,
            scale,
        } => {
            let c = data.config()?;
            stage("sweep", sweep(&c, classifier, model.as_deref(), scale))
        }
        Command::Synth {
            language,
            seed,
            split_seed,
            output_dir,
        } => {
            let run = stage(
                "synth",
                run_synthetic(language, seed, split_seed.unwrap_or(seed), &SYNTH_THRESHOLD_GRID),
            )?;
            for p in write_synthetic(&run, &output_dir)? {
                println!("wrote {}", p.display());
            }
            let c = &run.comparison;
            let (t, best) = c.best_hybrid;
            println!("simple NN accuracy   {:.1}%", 100.0 * c.simple_accuracy);
            println!("best hybrid accuracy {:.1}% at t = {t}", 100.0 * best);
            println!("verdict              {:?}", c.verdict);
            Ok(())
        }
        Command::Report(args) => {
            let c = args.config()?;
            let (report, artifacts) = run_experiment(&c)?;
            for p in write_outputs(&report, &artifacts, &c.output_dir)? {
                println!("wrote {}", p.display());
            }
            print!("{}", format_summary(&report.summary));
            Ok(())
        }
    }
}

fn ingest(c: &ExperimentConfig) -> Result<()> {
    let data = stage("ingest", prepare(c))?;
    mkdir(&c.output_dir)?;
    let out = &c.output_dir;
    write_lexicon(&out.join("filtered.tsv"), &data.filtered)?;
    write_lexicon(&out.join("discarded.tsv"), &data.discarded)?;
    write_lexicon(&out.join("non_compound.tsv"), &data.nouns)?;
    write_file(&out.join("frequency_table.csv"), &emit_frequency_table(&frequency_rows(&data.nouns))?)?;
    write_file(&out.join("frequency_table_all.csv"), &emit_frequency_table(&frequency_rows(&data.filtered))?)?;
    println!("ingested      {}", data.ingested);
    println!("excluded      {}", data.excluded);
    println!("filtered      {}", data.filtered.len());
    println!("discarded     {}", data.discarded.len());
    println!("non-compound  {}", data.nouns.len());
    println!("wrote files to {}", out.display());
    Ok(())
}

fn encode(c: &ExperimentConfig) -> Result<()> {
    let data = stage("ingest", prepare(c))?;
    mkdir(&c.output_dir)?;
    let path = c.output_dir.join("encoded.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Stage {
        stage: "encode",
        source: Box::new(e.into()),
    })?;
    let dims = c.slots * data.table.feature_count();
    let mut header = vec!["source_id".to_string(), "label".to_string()];
    header.extend((0..dims).map(|i| format!("v{i}")));
    w.write_record(&header)?;
    for e in &data.nouns {
        let v = stage("encode", plural_core::encode_word(&e.singular, &data.table, c.slots).map_err(Error::from))?;
        let mut rec = vec![e.orthography.clone(), e.class_name()];
        rec.extend(v.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    println!("wrote {} vectors of {dims} dimensions to {}", data.nouns.len(), path.display());
    Ok(())
}

fn sets(c: &ExperimentConfig) -> Result<Sets> {
    let data = stage("ingest", prepare(c))?;
    stage("encode", build_sets(c, &data.table, &data.nouns))
}

fn train(c: &ExperimentConfig, mlp: MlpConfig, no_default: bool) -> Result<()> {
    let s = sets(c)?;
    let set = if no_default { &s.fit_no_default } else { &s.fit };
    let model = mlp_train(&set.vectors, &set.labels, s.classes.len(), &mlp)?;
    let info = TrainingInfo {
        config: mlp,
        training_items: set.len(),
        trained_without_default: no_default,
        default_class: c.default_class.clone(),
    };
    mkdir(&c.output_dir)?;
    let name = if no_default { "mlp_hybrid_model.json" } else { "mlp_model.json" };
    let path = c.output_dir.join(name);
    ModelFile::new(&model, &s.classes, info).save(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_model(path: Option<&Path>, s: &Sets) -> Result<plural_core::MlpModel> {
    let path = path.ok_or_else(|| Error::Config("--model is required for the network".into()))?;
    let file = ModelFile::load(path)?;
    if file.classes.names() != s.classes.names() {
        return Err(Error::Config(format!(
            "{} was trained on a different class set",
            path.display()
        )));
    }
    file.model()
}

fn gcm_params(c: &ExperimentConfig, memory: &ExemplarMemory, s: &Sets, scale: Option<f64>, grid: &Grid) -> Result<GcmParams> {
    let template = GcmParams::new(1.0, c.gcm.kernel);
    let scale = match scale {
        Some(v) => v,
        None => select_gcm_scale(memory, &template, &s.select.vectors, &s.select.labels, &grid.values())?.0,
    };
    Ok(template.with_scale(scale))
}

fn memory(s: &Sets, no_default: bool) -> Result<ExemplarMemory> {
    let set = if no_default { &s.fit_no_default } else { &s.fit };
    Ok(ExemplarMemory::new(set.vectors.clone(), set.labels.clone(), s.classes.clone())?)
}

fn evaluate_cmd(c: &ExperimentConfig, classifier: Classifier, model: Option<&Path>, scale: Option<f64>) -> Result<()> {
    let s = sets(c)?;
    let decisions: Vec<ClassId> = match classifier {
        Classifier::Nn => {
            let m = memory(&s, false)?;
            s.test.vectors.iter().map(|q| Ok(nn_classify(&m, q)?.0)).collect::<Result<_>>()?
        }
        Classifier::Gcm => {
            let m = memory(&s, false)?;
            let p = gcm_params(c, &m, &s, scale, &c.gcm.scale_grid)?;
            println!("scale {}", p.scale);
            s.test.vectors.iter().map(|q| Ok(gcm_classify(&m, &p, q)?.decision)).collect::<Result<_>>()?
        }
        Classifier::Mlp => {
            let m = load_model(model, &s)?;
            s.test.vectors.iter().map(|q| Ok(mlp_classify(&m, q)?.decision)).collect::<Result<_>>()?
        }
    };
    let e = evaluate(&decisions, &s.test.labels, s.classes.len())?;
    println!("accuracy {:.2}% ({}/{})", 100.0 * e.accuracy, e.correct, e.total);
    if c.selection != plural::config::Selection::Test {
        println!("(hyperparameters chosen on the validation split)");
    }
    if matches!(classifier, Classifier::Nn) && c.nn.leave_one_out {
        let data = stage("ingest", prepare(c))?;
        println!("leave-one-out {:.2}%", 100.0 * leave_one_out_accuracy(c, &data)?);
    }
    Ok(())
}

fn sweep(c: &ExperimentConfig, classifier: Classifier, model: Option<&Path>, scale: Option<f64>) -> Result<()> {
    let s = sets(c)?;
    let full = memory(&s, false)?;
    let no_default = memory(&s, true)?;
    let (name, grid, baseline_decisions, params, mlp) = match classifier {
        Classifier::Nn => {
            let d: Vec<ClassId> = s.test.vectors.iter().map(|q| Ok(nn_classify(&full, q)?.0)).collect::<Result<_>>()?;
            ("nn", c.nn.threshold_grid, d, None, None)
        }
        Classifier::Gcm => {
            let simple = gcm_params(c, &full, &s, None, &c.gcm.scale_grid)?;
            let d: Vec<ClassId> =
                s.test.vectors.iter().map(|q| Ok(gcm_classify(&full, &simple, q)?.decision)).collect::<Result<_>>()?;
            let hybrid = gcm_params(c, &no_default, &s, scale, &c.gcm.hybrid_scale_grid)?;
            ("gcm", c.gcm.threshold_grid, d, Some(hybrid), None)
        }
        Classifier::Mlp => {
            let m = load_model(model, &s)?;
            let d: Vec<ClassId> = s.test.vectors.iter().map(|q| Ok(mlp_classify(&m, q)?.decision)).collect::<Result<_>>()?;
            ("mlp", c.mlp.threshold_grid, d, None, Some(m))
        }
    };
    let baseline = evaluate(&baseline_decisions, &s.test.labels, s.classes.len())?.accuracy;
    let base = match (&params, &mlp) {
        (Some(p), _) => HybridBase::Gcm(&no_default, p),
        (_, Some(m)) => HybridBase::Mlp(m),
        _ => HybridBase::Nn(&no_default),
    };
    let responses = s.test.vectors.iter().map(|q| base.respond(q)).collect::<plural_core::Result<Vec<_>>>()?;
    let curve = sweep_responses(&base, &responses, &s.test.labels, &grid.values(), s.default_class, baseline)?;

    mkdir(&c.output_dir)?;
    let csv_name = format!("{name}_sweep.csv");
    let csv_path = c.output_dir.join(&csv_name);
    write_file(&csv_path, &emit_curve(&curve)?)?;
    let sidecar = serde_json::json!({
        "classifier": name,
        "baseline": curve.baseline,
        "best": curve.best(),
        "scale": params.as_ref().map(|p| p.scale),
        "config": c,
    });
    let json_path = c.output_dir.join(sidecar_name(&csv_name));
    write_file(&json_path, &(serde_json::to_string_pretty(&sidecar)? + "\n"))?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    if let Some((t, a)) = curve.best() {
        println!("baseline {:.2}%, best hybrid {:.2}% at t = {t}", 100.0 * baseline, 100.0 * a);
    }
    Ok(())
}

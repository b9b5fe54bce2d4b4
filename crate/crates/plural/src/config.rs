//! Experiment configuration, read from TOML. Relative paths are resolved
//! against the directory holding the config file.

use std::path::{Path, PathBuf};

use plural_core::hybrid::linear_grid;
use plural_core::{CompoundMatch, Kernel, SplitOptions, DEFAULT_CLASS_NAME};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "PLURAL_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub lexicon: PathBuf,
    /// `None` selects the bundled table.
    pub features: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub min_fraction: f64,
    pub compounds: Compounds,
    pub slots: usize,
    pub default_class: String,
    pub selection: Selection,
    pub split: SplitConfig,
    pub nn: NnConfig,
    pub gcm: GcmConfig,
    pub mlp: MlpSweepConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compounds {
    #[default]
    Phonemes,
    Orthography,
    /// No compound removal.
    Keep,
}

impl Compounds {
    pub fn matcher(self) -> Option<CompoundMatch> {
        match self {
            Compounds::Phonemes => Some(CompoundMatch::Phonemes),
            Compounds::Orthography => Some(CompoundMatch::Orthography),
            Compounds::Keep => None,
        }
    }
}

/// Which held-out set hyperparameters and thresholds are chosen on.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "on")]
pub enum Selection {
    /// Choose on the test set itself; reported accuracies are then optimistic.
    #[default]
    Test,
    /// Hold out `fraction` of the training set, drawn with `seed`, and
    /// choose on that.
    Validation {
        fraction: f64,
        #[serde(default = "default_validation_seed")]
        seed: u64,
    },
}

fn default_validation_seed() -> u64 {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub fraction: f64,
    pub seed: u64,
    pub stratify: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            fraction: 0.5,
            seed: 1,
            stratify: false,
        }
    }
}

impl SplitConfig {
    pub fn options(&self) -> SplitOptions {
        SplitOptions {
            fraction: self.fraction,
            seed: self.seed,
            stratify: self.stratify,
        }
    }
}

/// Inclusive arithmetic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Grid {
    pub const fn new(start: f64, end: f64, step: f64) -> Self {
        Self { start, end, step }
    }

    pub fn values(&self) -> Vec<f64> {
        linear_grid(self.start, self.end, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NnConfig {
    pub enabled: bool,
    /// Leave-one-out over the whole frequency-filtered lexicon, compounds
    /// included.
    pub leave_one_out: bool,
    pub threshold_grid: Grid,
}

impl Default for NnConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            leave_one_out: true,
            threshold_grid: Grid::new(0.0, 10.0, 0.05),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcmConfig {
    pub enabled: bool,
    pub kernel: Kernel,
    pub scale_grid: Grid,
    pub hybrid_scale_grid: Grid,
    pub threshold_grid: Grid,
}

impl Default for GcmConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            kernel: Kernel::Gaussian,
            scale_grid: Grid::new(0.2, 3.0, 0.02),
            hybrid_scale_grid: Grid::new(0.2, 3.0, 0.02),
            threshold_grid: Grid::new(0.0, 1.0, 0.01),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpSweepConfig {
    pub enabled: bool,
    pub hidden: Vec<usize>,
    /// Evaluated after every `epoch_step` epochs up to `max_epochs`.
    pub max_epochs: usize,
    pub epoch_step: usize,
    pub seeds: Vec<u64>,
    pub rate: f64,
    pub momentum: f64,
    pub init_range: f64,
    pub threshold_grid: Grid,
}

impl Default for MlpSweepConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            hidden: vec![10, 20, 30, 40, 50],
            max_epochs: 50,
            epoch_step: 5,
            seeds: vec![1, 2, 3],
            rate: 0.25,
            momentum: 0.9,
            init_range: 0.1,
            threshold_grid: Grid::new(0.0, 1.0, 0.01),
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lexicon: PathBuf::new(),
            features: None,
            exclusions: None,
            output_dir: PathBuf::from("out"),
            min_fraction: plural_core::dataset::DEFAULT_MIN_FRACTION,
            compounds: Compounds::default(),
            slots: plural_core::phonology::DEFAULT_SLOTS,
            default_class: DEFAULT_CLASS_NAME.to_string(),
            selection: Selection::default(),
            split: SplitConfig::default(),
            nn: NnConfig::default(),
            gcm: GcmConfig::default(),
            mlp: MlpSweepConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads a TOML file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Self = toml::from_str(&text).map_err(|source| Error::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut self.lexicon);
        resolve(&mut self.output_dir);
        self.features.as_mut().map(resolve);
        self.exclusions.as_mut().map(resolve);
    }

    /// Applies [`OUTPUT_DIR_ENV`] when set.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.output_dir = PathBuf::from(dir);
        }
    }

    /// Checks value ranges and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.lexicon.as_os_str().is_empty() {
            return bad("no lexicon given".into());
        }
        for path in [Some(&self.lexicon), self.features.as_ref(), self.exclusions.as_ref()]
            .into_iter()
            .flatten()
        {
            if !path.is_file() {
                return Err(Error::MissingFile(path.clone()));
            }
        }
        if !(0.0..=1.0).contains(&self.min_fraction) {
            return bad(format!("min_fraction must lie in [0, 1], got {}", self.min_fraction));
        }
        if self.slots == 0 {
            return bad("slots must be positive".into());
        }
        if !(self.split.fraction > 0.0 && self.split.fraction < 1.0) {
            return bad(format!("split.fraction must lie in (0, 1), got {}", self.split.fraction));
        }
        if let Selection::Validation { fraction, .. } = self.selection {
            if !(fraction > 0.0 && fraction < 1.0) {
                return bad(format!("validation fraction must lie in (0, 1), got {fraction}"));
            }
        }
        let grids = [
            ("nn.threshold_grid", &self.nn.threshold_grid),
            ("gcm.scale_grid", &self.gcm.scale_grid),
            ("gcm.hybrid_scale_grid", &self.gcm.hybrid_scale_grid),
            ("gcm.threshold_grid", &self.gcm.threshold_grid),
            ("mlp.threshold_grid", &self.mlp.threshold_grid),
        ];
        for (name, g) in grids {
            if !(g.step > 0.0) || g.end < g.start {
                return bad(format!("{name} needs a positive step and end >= start"));
            }
        }
        if self.gcm.scale_grid.start <= 0.0 || self.gcm.hybrid_scale_grid.start <= 0.0 {
            return bad("GCM scales must be positive".into());
        }
        if self.nn.threshold_grid.start < 0.0 {
            return bad("nn.threshold_grid must be non-negative".into());
        }
        for g in [&self.gcm.threshold_grid, &self.mlp.threshold_grid] {
            if g.start < 0.0 || g.end > 1.0 + 1e-9 {
                return bad("probability thresholds must lie in [0, 1]".into());
            }
        }
        let m = &self.mlp;
        if m.hidden.is_empty() || m.hidden.contains(&0) {
            return bad("mlp.hidden must list positive sizes".into());
        }
        if m.seeds.is_empty() {
            return bad("mlp.seeds is empty".into());
        }
        if m.epoch_step == 0 || m.max_epochs < m.epoch_step {
            return bad("mlp.epoch_step must be positive and at most mlp.max_epochs".into());
        }
        if !(m.rate > 0.0) || !(0.0..1.0).contains(&m.momentum) || !(m.init_range >= 0.0) {
            return bad("mlp.rate must be positive and mlp.momentum in [0, 1)".into());
        }
        Ok(())
    }

    /// Epoch counts at which sweep networks are evaluated.
    pub fn mlp_checkpoints(&self) -> Vec<usize> {
        (1..=self.mlp.max_epochs / self.mlp.epoch_step)
            .map(|k| k * self.mlp.epoch_step)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: ExperimentConfig = toml::from_str("lexicon = \"x.tsv\"\n[mlp]\nseeds = [7]\n").unwrap();
        assert_eq!(c.mlp.seeds, vec![7]);
        assert_eq!(c.mlp.hidden, vec![10, 20, 30, 40, 50]);
        assert_eq!(c.gcm.kernel, Kernel::Gaussian);
    }

    #[test]
    fn validation_selection_parses() {
        let c: ExperimentConfig =
            toml::from_str("lexicon = \"x\"\nselection = { on = \"validation\", fraction = 0.25 }\n").unwrap();
        assert_eq!(c.selection, Selection::Validation { fraction: 0.25, seed: 2 });
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("lexcon = \"x\"\n").is_err());
    }

    #[test]
    fn missing_lexicon_names_the_path() {
        let c = ExperimentConfig {
            lexicon: PathBuf::from("/nonexistent/lexicon.tsv"),
            ..Default::default()
        };
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("/nonexistent/lexicon.tsv"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn checkpoints() {
        let c = ExperimentConfig::default();
        assert_eq!(c.mlp_checkpoints(), vec![5, 10, 15, 20, 25, 30, 35, 40, 45, 50]);
    }
}

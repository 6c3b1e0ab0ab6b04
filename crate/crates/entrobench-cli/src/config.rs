//! Sweep configuration: a sectioned key = value file (TOML) whose every key
//! can also be set or overridden from the command line.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use entrobench::calibration::{aggregate, noise_from_fidelities, parse_calibration, AggregatePolicy};
use entrobench::sim::NoiseModel;

use crate::errors::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Exact,
    Shadows,
    Swap,
}

impl Estimator {
    pub fn label(&self) -> &'static str {
        match self {
            Estimator::Exact => "exact",
            Estimator::Shadows => "shadows",
            Estimator::Swap => "swap",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Estimator::Exact),
            "shadows" => Ok(Estimator::Shadows),
            "swap" => Ok(Estimator::Swap),
            other => Err(format!("unknown estimator `{other}` (expected exact|shadows|swap)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleMode {
    None,
    Replicate,
    Cycle,
}

impl std::str::FromStr for ResampleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(ResampleMode::None),
            "replicate" => Ok(ResampleMode::Replicate),
            "cycle" => Ok(ResampleMode::Cycle),
            other => Err(format!("unknown resample mode `{other}` (expected none|replicate|cycle)")),
        }
    }
}

/// Integer list given either as an array or as a `start..end` (inclusive)
/// range string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum IntList {
    Range(String),
    List(Vec<usize>),
}

impl IntList {
    pub fn values(&self) -> CliResult<Vec<usize>> {
        match self {
            IntList::List(v) => Ok(v.clone()),
            IntList::Range(s) => parse_int_list(s),
        }
    }
}

/// Parse "2,3,5" or "1..20" (inclusive) into a list.
pub fn parse_int_list(s: &str) -> CliResult<Vec<usize>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let start: usize = a.trim().parse().map_err(|_| bad_int(s))?;
        let end: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad_int(s))?;
        if end < start {
            return Err(CliError::validation(format!("empty range `{s}`")));
        }
        return Ok((start..=end).collect());
    }
    s.split(',')
        .map(|part| part.trim().parse::<usize>().map_err(|_| bad_int(s)))
        .collect()
}

fn bad_int(s: &str) -> CliError {
    CliError::validation(format!("cannot parse integer list `{s}` (use `2,3,5` or `1..20`)"))
}

fn default_seed() -> u64 {
    1
}
fn default_repetitions() -> usize {
    1
}
fn default_output() -> PathBuf {
    PathBuf::from("sweep.csv")
}
fn default_settings() -> usize {
    50
}
fn default_shots() -> usize {
    1000
}
fn default_resample_runs() -> usize {
    3
}
fn default_swap_shots() -> usize {
    1000
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub widths: IntList,
    pub depths: IntList,
    pub estimator: Estimator,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub p01: f64,
    #[serde(default)]
    pub p10: f64,
    /// Calibration table; when set, p1/p2 come from it instead.
    #[serde(default)]
    pub calibration: Option<PathBuf>,
    #[serde(default)]
    pub aggregation: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowsSection {
    #[serde(default = "default_settings")]
    pub settings: usize,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default)]
    pub derandomize: bool,
    #[serde(default = "default_resample_mode")]
    pub resample: ResampleMode,
    #[serde(default = "default_resample_runs")]
    pub resample_runs: usize,
}

fn default_resample_mode() -> ResampleMode {
    ResampleMode::None
}

impl Default for ShadowsSection {
    fn default() -> Self {
        Self {
            settings: default_settings(),
            shots: default_shots(),
            derandomize: false,
            resample: ResampleMode::None,
            resample_runs: default_resample_runs(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapSection {
    #[serde(default = "default_swap_shots")]
    pub shots: usize,
    #[serde(default)]
    pub measurement_noise: bool,
}

impl Default for SwapSection {
    fn default() -> Self {
        Self {
            shots: default_swap_shots(),
            measurement_noise: false,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub shadows: ShadowsSection,
    #[serde(default)]
    pub swap: SwapSection,
}

/// Fully resolved sweep configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub widths: Vec<usize>,
    pub depths: Vec<usize>,
    pub estimator: Estimator,
    pub seed: u64,
    pub repetitions: usize,
    pub output: PathBuf,
    pub noise: NoiseModel,
    pub shadows: ShadowsSection,
    pub swap: SwapSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }

    pub fn resolve(self) -> CliResult<ExperimentConfig> {
        let noise = resolve_noise(&self.noise)?;
        let cfg = ExperimentConfig {
            widths: self.experiment.widths.values()?,
            depths: {
                let mut d = self.experiment.depths.values()?;
                d.sort_unstable();
                d.dedup();
                d
            },
            estimator: self.experiment.estimator,
            seed: self.experiment.seed,
            repetitions: self.experiment.repetitions,
            output: self.experiment.output,
            noise,
            shadows: self.shadows,
            swap: self.swap,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_aggregation(s: &str) -> CliResult<AggregatePolicy> {
    match s {
        "median" => Ok(AggregatePolicy::Median),
        "mean" => Ok(AggregatePolicy::Mean),
        _ => {
            let ids = s.strip_prefix("qubits:").ok_or_else(|| {
                CliError::validation(format!(
                    "unknown aggregation `{s}` (expected median|mean|qubits:ID,ID,...)"
                ))
            })?;
            let ids = ids
                .split(',')
                .map(|id| {
                    id.trim()
                        .parse::<u32>()
                        .map_err(|_| CliError::validation(format!("bad qubit id `{id}`")))
                })
                .collect::<CliResult<Vec<u32>>>()?;
            Ok(AggregatePolicy::QubitSubset(ids))
        }
    }
}

pub fn resolve_noise(section: &NoiseSection) -> CliResult<NoiseModel> {
    let (p1, p2) = match &section.calibration {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::validation(format!("cannot read {}: {e}", path.display()))
            })?;
            let table = parse_calibration(&text)?;
            let policy = match &section.aggregation {
                Some(s) => parse_aggregation(s)?,
                None => AggregatePolicy::Median,
            };
            let (f1, f2) = aggregate(&table, &policy)?;
            noise_from_fidelities(f1, f2)
        }
        None => (section.p1, section.p2),
    };
    Ok(NoiseModel::new(p1, p2, section.p01, section.p10)?)
}

impl ExperimentConfig {
    fn validate(&self) -> CliResult<()> {
        if self.widths.is_empty() {
            return Err(CliError::validation("widths must not be empty"));
        }
        if self.depths.is_empty() {
            return Err(CliError::validation("depths must not be empty"));
        }
        if self.depths[0] < 1 {
            return Err(CliError::validation("depths must be at least 1"));
        }
        if self.repetitions < 1 {
            return Err(CliError::validation("repetitions must be at least 1"));
        }
        let width_cap = match self.estimator {
            Estimator::Swap => 5,
            _ => 10,
        };
        for &n in &self.widths {
            if n < 1 || n > width_cap {
                return Err(CliError::validation(format!(
                    "width {n} unsupported for the {} estimator (allowed 1..={width_cap})",
                    self.estimator.label()
                )));
            }
            let scanning = self.shadows.derandomize || self.shadows.resample != ResampleMode::None;
            if self.estimator == Estimator::Shadows && scanning && n > 8 {
                return Err(CliError::validation(format!(
                    "width {n} exceeds the exhaustive-settings cap of 8"
                )));
            }
        }
        if self.estimator == Estimator::Shadows {
            if self.shadows.settings < 2 {
                return Err(CliError::validation("shadows.settings must be at least 2"));
            }
            if self.shadows.shots < 1 {
                return Err(CliError::validation("shadows.shots must be at least 1"));
            }
            if self.shadows.resample != ResampleMode::None && self.shadows.resample_runs < 1 {
                return Err(CliError::validation("shadows.resample_runs must be at least 1"));
            }
        }
        if self.estimator == Estimator::Swap && self.swap.shots < 1 {
            return Err(CliError::validation("swap.shots must be at least 1"));
        }
        Ok(())
    }
}

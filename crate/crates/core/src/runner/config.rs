//! Run configuration: JSON document plus dotted-path overrides.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::probes::ProbeSweep;
use crate::spectral::FrequencyGrid;
use crate::symbols::DispersionParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Conserve,
    Strichartz,
    Bilinear,
    Trilinear,
    Scaling,
    Illposedness,
    ResonanceScan,
    Transversality,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Simulate,
        Command::Conserve,
        Command::Strichartz,
        Command::Bilinear,
        Command::Trilinear,
        Command::Scaling,
        Command::Illposedness,
        Command::ResonanceScan,
        Command::Transversality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Conserve => "conserve",
            Command::Strichartz => "strichartz",
            Command::Bilinear => "bilinear",
            Command::Trilinear => "trilinear",
            Command::Scaling => "scaling",
            Command::Illposedness => "illposedness",
            Command::ResonanceScan => "resonance-scan",
            Command::Transversality => "transversality",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    /// `û₀ = iξ e^{−w²(ξ²+η²)/2}`, rescaled to the requested L² norm.
    #[default]
    Dipole,
    Zero,
    /// A field file written by `spectral::io::write_field`.
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    pub kind: InitialKind,
    pub l2_norm: f64,
    pub width: f64,
    pub path: Option<PathBuf>,
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData { kind: InitialKind::Dipole, l2_norm: 0.1, width: 2.0, path: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConserveSection {
    pub mass_tol: f64,
    pub energy_tol: f64,
}

impl Default for ConserveSection {
    fn default() -> Self {
        ConserveSection { mass_tol: 1e-6, energy_tol: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrichartzKind {
    #[default]
    Linear,
    Lowfreq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzSection {
    pub kind: StrichartzKind,
    pub q: f64,
    pub r: f64,
    pub snapshots: usize,
}

impl Default for StrichartzSection {
    fn default() -> Self {
        StrichartzSection { kind: StrichartzKind::Linear, q: 4.0, r: 4.0, snapshots: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BilinearSection {
    pub n2: f64,
}

impl Default for BilinearSection {
    fn default() -> Self {
        BilinearSection { n2: 2.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrilinearRegime {
    #[default]
    Lw,
    Nonresonant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrilinearSection {
    pub regime: TrilinearRegime,
    /// Fixed low frequency of the `lw` sweep.
    pub n2: f64,
    pub modulations: [f64; 3],
    /// Fixed low frequency of the `nonresonant` sweep.
    pub n1: f64,
    /// `L = κ N₁ N₂^α` in the `nonresonant` regime.
    pub kappa: f64,
}

impl Default for TrilinearSection {
    fn default() -> Self {
        TrilinearSection { regime: TrilinearRegime::Lw, n2: 2.0, modulations: [1.0; 3], n1: 1.0, kappa: 16.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSection {
    pub indices: Vec<(f64, f64)>,
    pub lambdas: Vec<f64>,
}

impl Default for ScalingSection {
    fn default() -> Self {
        ScalingSection {
            indices: vec![(0.0, 0.0), (1.0, 0.0)],
            lambdas: (0..5).map(|k| 2f64.powf(k as f64 / 4.0)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IllposedSection {
    pub theta: f64,
    pub n_list: Vec<f64>,
    pub sbar: (f64, f64),
    pub t: f64,
    pub quad_res: usize,
}

impl Default for IllposedSection {
    fn default() -> Self {
        IllposedSection {
            theta: 0.05,
            n_list: (8..=13).map(|k| 2f64.powi(k)).collect(),
            sbar: (0.0, 0.0),
            t: 1.0,
            quad_res: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonanceSection {
    pub n_list: Vec<f64>,
    pub theta: f64,
    pub samples: usize,
    pub band: (f64, f64),
}

impl Default for ResonanceSection {
    fn default() -> Self {
        ResonanceSection {
            n_list: (4..=10).map(|k| 2f64.powi(k)).collect(),
            theta: 0.05,
            samples: 10_000,
            band: (0.125, 8.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransversalitySection {
    pub n_max: f64,
    pub n_min: Vec<f64>,
    pub samples: usize,
    pub threshold: f64,
    pub band: (f64, f64),
}

impl Default for TransversalitySection {
    fn default() -> Self {
        TransversalitySection {
            n_max: 64.0,
            n_min: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            samples: 2000,
            threshold: 0.1,
            band: (0.0625, 16.0),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("fkpi-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    #[serde(default)]
    pub grid: FrequencyGrid,
    /// Required by `simulate` and `conserve`.
    #[serde(default)]
    pub evolution: Option<EvolutionConfig>,
    /// Required by `strichartz`, `bilinear` and `trilinear`.
    #[serde(default)]
    pub probe: Option<ProbeSweep>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    /// Worker threads; 0 uses every logical core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub conserve: ConserveSection,
    #[serde(default)]
    pub strichartz: StrichartzSection,
    #[serde(default)]
    pub bilinear: BilinearSection,
    #[serde(default)]
    pub trilinear: TrilinearSection,
    #[serde(default)]
    pub scaling: ScalingSection,
    #[serde(default)]
    pub illposedness: IllposedSection,
    #[serde(default)]
    pub resonance: ResonanceSection,
    #[serde(default)]
    pub transversality: TransversalitySection,
}

impl RunConfig {
    pub fn params(&self) -> Result<DispersionParams> {
        DispersionParams::new(self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        DispersionParams::new(self.alpha).map_err(|e| Error::Config(format!("alpha: {e}")))?;
        self.grid.validate().map_err(|e| Error::Config(format!("grid: {e}")))?;
        let need = |ok: bool, section: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("command `{}` requires the `{section}` section", self.command)))
            }
        };
        match self.command {
            Command::Simulate | Command::Conserve => need(self.evolution.is_some(), "evolution")?,
            Command::Strichartz | Command::Bilinear | Command::Trilinear => need(self.probe.is_some(), "probe")?,
            _ => {}
        }
        if let Some(e) = &self.evolution {
            e.validate().map_err(|e| Error::Config(format!("evolution: {e}")))?;
        }
        if let Some(p) = &self.probe {
            p.validate().map_err(|e| Error::Config(format!("probe: {e}")))?;
            if let Some(a) = p.alpha {
                if a != self.alpha {
                    return Err(Error::Config(format!("probe.alpha = {a} differs from alpha = {}", self.alpha)));
                }
            }
        }
        if self.initial.kind == InitialKind::File && self.initial.path.is_none() {
            return Err(Error::Config("initial.path is required when initial.kind = \"file\"".into()));
        }
        Ok(())
    }

    /// Every key filled in, for `--help`.
    pub fn template() -> Self {
        RunConfig {
            command: Command::Simulate,
            alpha: 3.0,
            grid: FrequencyGrid::default(),
            evolution: Some(EvolutionConfig::default()),
            probe: Some(ProbeSweep::default()),
            output_dir: default_output_dir(),
            seed: 0,
            format: OutputFormat::Csv,
            workers: 0,
            initial: InitialData::default(),
            conserve: ConserveSection::default(),
            strichartz: StrichartzSection::default(),
            bilinear: BilinearSection::default(),
            trilinear: TrilinearSection::default(),
            scaling: ScalingSection::default(),
            illposedness: IllposedSection::default(),
            resonance: ResonanceSection::default(),
            transversality: TransversalitySection::default(),
        }
    }
}

fn deserialize(value: Value) -> Result<RunConfig> {
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Config(format!("at `{path}`: {}", e.into_inner()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("not valid JSON: {e}")))?;
    deserialize(value)
}

/// Sets `path` (dot-separated) in `root`. The value is read as JSON when it
/// parses, otherwise as a string.
pub fn apply_override(root: &mut Value, path: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("malformed override key `{path}`")));
    }
    let mut node = root;
    for (i, key) in keys.iter().enumerate() {
        if !node.is_object() {
            if node.is_null() {
                *node = Value::Object(Map::new());
            } else {
                return Err(Error::Config(format!("`{}` is not an object", keys[..i].join("."))));
            }
        }
        let map = node.as_object_mut().expect("object");
        if i + 1 == keys.len() {
            map.insert(key.to_string(), value);
            return Ok(());
        }
        node = map.entry(key.to_string()).or_insert(Value::Null);
    }
    unreachable!("loop returns on the last key")
}

/// Config text (or `{}`), then `key=value` overrides, then validation.
pub fn load_config(text: Option<&str>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut value: Value = match text {
        Some(t) => serde_json::from_str(t).map_err(|e| Error::Config(format!("not valid JSON: {e}")))?,
        None => Value::Object(Map::new()),
    };
    if !value.is_object() {
        return Err(Error::Config("top level must be a JSON object".into()));
    }
    for (k, v) in overrides {
        apply_override(&mut value, k, v)?;
    }
    deserialize(value)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, child) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// One `key = default` line per configuration key.
pub fn config_reference() -> String {
    let v = serde_json::to_value(RunConfig::template()).expect("template serializes");
    let mut keys = Vec::new();
    flatten("", &v, &mut keys);
    let width = keys.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::from("Configuration keys and defaults (set with --set key=value):\n");
    for (k, d) in keys {
        let d = match k.as_str() {
            "command" => "required; one of the commands above".to_string(),
            "alpha" => "required; 2 ≤ alpha < 4".to_string(),
            _ if k.starts_with("evolution.") => format!("{d}  (section required by simulate, conserve)"),
            _ if k.starts_with("probe.") => format!("{d}  (section required by strichartz, bilinear, trilinear)"),
            _ => d,
        };
        s.push_str(&format!("  {k:width$}  {d}\n"));
    }
    s
}

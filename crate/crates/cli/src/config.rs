//! JSON configuration for every subcommand. Every field has a default, so an
//! empty object `{}` is a valid config.

use gsqg::experiments::{ConvergenceConfig, KpvExponents, OdeComparisonSpec};
use gsqg::kernel::{KernelVariant, DEFAULT_Y_GRID};
use gsqg::littlewood_paley::BesovIndex;
use gsqg::solver::SolverConfig;
use gsqg::spectral::samples::InitialData;
use schemars::JsonSchema;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub initial: InitialData,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            initial: InitialData::TwoMode { amplitude: 1.0 },
        }
    }
}

pub type SweepConfig = ConvergenceConfig;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Kpv,
    Hls,
    Kernel,
    VelocityProduct,
    TransportCommutator,
    Ode,
    Embedding,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Kpv,
        Suite::Hls,
        Suite::Kernel,
        Suite::VelocityProduct,
        Suite::TransportCommutator,
        Suite::Ode,
        Suite::Embedding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kpv => "kpv",
            Suite::Hls => "hls",
            Suite::Kernel => "kernel",
            Suite::VelocityProduct => "velocity_product",
            Suite::TransportCommutator => "transport_commutator",
            Suite::Ode => "ode",
            Suite::Embedding => "embedding",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct KpvSuite {
    pub s: f64,
    pub exponents: KpvExponents,
}

impl Default for KpvSuite {
    fn default() -> Self {
        Self {
            s: 1.5,
            exponents: KpvExponents {
                p: 2.0,
                p1: 4.0,
                p2: 4.0,
                p3: 4.0,
                p4: 4.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct HlsSuite {
    pub sigma: f64,
    pub p: f64,
    pub sweep_sigmas: Vec<f64>,
    pub sweep_p: f64,
}

impl Default for HlsSuite {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            p: 4.0 / 3.0,
            sweep_sigmas: vec![0.05, 0.1, 0.25, 0.5, 1.0],
            sweep_p: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSuite {
    pub variant: KernelVariant,
    pub s: f64,
    pub betas: Vec<f64>,
    pub l2_betas: Vec<f64>,
    pub ys: Vec<f64>,
    pub consistency_betas: Vec<f64>,
}

fn beta_grid(hi: usize) -> Vec<f64> {
    (1..=hi).map(|i| i as f64 / 20.0).collect()
}

impl Default for KernelSuite {
    fn default() -> Self {
        Self {
            variant: KernelVariant::Perpendicular,
            s: 2.0,
            betas: beta_grid(19),
            l2_betas: beta_grid(9),
            ys: DEFAULT_Y_GRID.to_vec(),
            consistency_betas: vec![0.1, 0.5, 0.9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct OdeSuite {
    pub count: usize,
    /// Extra hand-written specs checked next to the random battery.
    pub cases: Vec<OdeComparisonSpec>,
}

impl Default for OdeSuite {
    fn default() -> Self {
        Self {
            count: 100,
            cases: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub n: usize,
    pub family_size: usize,
    pub kmax: f64,
    pub s: f64,
    pub alphas: Vec<f64>,
    pub embedding_alpha: f64,
    pub kpv: KpvSuite,
    pub hls: HlsSuite,
    pub kernel: KernelSuite,
    pub ode: OdeSuite,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            seed: 0,
            n: 256,
            family_size: 50,
            kmax: 24.0,
            s: 3.0,
            alphas: vec![0.3, 0.4, 0.45, 0.49],
            embedding_alpha: 0.45,
            kpv: KpvSuite::default(),
            hls: HlsSuite::default(),
            kernel: KernelSuite::default(),
            ode: OdeSuite::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.suites.is_empty() {
            return Err(CliError::Config("`suites` is empty".into()));
        }
        if self.family_size == 0 {
            return Err(CliError::Config("`family_size` must be positive".into()));
        }
        if self.alphas.len() < 2 {
            return Err(CliError::Config(
                "`alphas` needs at least two values".into(),
            ));
        }
        if !(self.kmax > 0.0) {
            return Err(CliError::Config("`kmax` must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct LpConfig {
    /// GSF1 file; a relative path missing from the working directory is
    /// looked up under `--out`.
    pub snapshot: PathBuf,
    pub besov: Vec<BesovIndex>,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            snapshot: PathBuf::from("final.gsf1"),
            besov: vec![
                BesovIndex {
                    s: 0.0,
                    p: 2.0,
                    q: 2.0,
                },
                BesovIndex {
                    s: 1.0,
                    p: 2.0,
                    q: 1.0,
                },
                BesovIndex {
                    s: 2.0,
                    p: 4.0,
                    q: 2.0,
                },
            ],
        }
    }
}

/// JSON pointer for a deserialization path, e.g. `/solver/alpha`.
pub fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        CliError::Schema {
            pointer: if pointer.is_empty() {
                "/".into()
            } else {
                pointer
            },
            message: e.into_inner().to_string(),
        }
    })
}

/// Reads `path`, or returns the defaults when no file is given.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

/// One JSON Schema covering the config of every subcommand, defaults included.
pub fn config_schema() -> Value {
    let mut gen = schemars::generate::SchemaSettings::draft2020_12().into_generator();
    let commands = [
        ("run", gen.subschema_for::<RunConfig>()),
        ("sweep", gen.subschema_for::<SweepConfig>()),
        ("verify", gen.subschema_for::<VerifyConfig>()),
        ("lp", gen.subschema_for::<LpConfig>()),
    ];
    let defs = gen.take_definitions(true);
    let any_of: Vec<Value> = commands
        .iter()
        .map(|(name, s)| {
            let mut v = s.clone().to_value();
            v["title"] = json!(format!("config for `gsqg {name}`"));
            v
        })
        .collect();
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "gsqg configuration",
        "description": "Every field is optional; omitted fields take the listed defaults.",
        "anyOf": any_of,
        "$defs": defs,
    })
}

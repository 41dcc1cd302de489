//! JSON run configuration and its binding to the registered examples.
//!
//! A configuration names an example and overlays parameters on it:
//!
//! ```json
//! {
//!   "example": "eco",
//!   "seed": 7,
//!   "model": {"amp": 0.4, "fragmentation": 0.2},
//!   "participant": {"name": "baseline", "risk": 0.55, "dispersal": 0.35},
//!   "tune": {"algo": "nsga2", "pop": 24, "ngen": 8},
//!   "tournament": {"episodes": 4, "participants": [...]}
//! }
//! ```
//!
//! Relative file paths inside a configuration resolve against the directory
//! of the configuration file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use strata_core::evolution::{FitnessWeights, HallOfFame, HofEntry};
use strata_core::game::{ScenarioGrid, ScoreSpec, VoteRules};
use strata_core::policy::PolicyFile;
use strata_core::schemas::{GeneValue, Genotype, Schema};
use strata_models::eco::{self, EcoConfig, EcoStrategy};
use strata_models::enterprise::{self, EnterpriseConfig};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    Eco,
    Enterprise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Nsga2,
    Ga,
    Es,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub example: ExampleKind,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Episode length; overrides the model's own `steps`.
    #[serde(default)]
    pub steps: Option<u64>,
    /// Field overrides for the example's model configuration.
    #[serde(default)]
    pub model: Map<String, Value>,
    /// Strategy simulated by `run` (firm A for the enterprise example).
    #[serde(default)]
    pub participant: Option<ParticipantSpec>,
    #[serde(default)]
    pub tune: TuneSection,
    #[serde(default)]
    pub tournament: TournamentSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneSection {
    pub algo: Option<Algo>,
    pub pop: Option<usize>,
    pub ngen: Option<usize>,
    pub cx_prob: Option<f64>,
    pub mut_prob: Option<f64>,
    pub sbx_eta: Option<f64>,
    pub pm_eta: Option<f64>,
    pub hof_cap: Option<usize>,
    /// Initial ES step size in genotype units.
    pub sigma0: Option<f64>,
    /// ES offspring count; defaults to the population size.
    pub lambda: Option<usize>,
    /// Trait schema for the eco example; genes `risk` and `dispersal`.
    pub schema: Option<Schema>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentSection {
    pub episodes: Option<usize>,
    pub steps: Option<u64>,
    pub grid: Option<ScenarioGrid>,
    /// Parameters of the single `arena` scenario.
    pub scenario: Option<Map<String, Value>>,
    #[serde(default)]
    pub participants: Vec<ParticipantSpec>,
    pub score: Option<ScoreSpec>,
    #[serde(default)]
    pub rules: VoteRules,
    /// Enterprise only: emit the reference versus champion panel.
    pub report: Option<ReportSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSpec {
    pub reference: String,
    pub champion: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ParticipantSpec {
    #[serde(default = "default_participant_name")]
    pub name: String,
    #[serde(flatten)]
    pub source: ParticipantSource,
}

fn default_participant_name() -> String {
    "main".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ParticipantSource {
    /// Best archive entry on objective `objective` of a saved HoF.
    Hof {
        hof: PathBuf,
        #[serde(default)]
        objective: usize,
    },
    Policy { policy: PolicyRef },
    /// The example's reference strategy.
    Reference { reference: bool },
    Traits { risk: f64, dispersal: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PolicyRef {
    Inline(PolicyFile),
    Path(PathBuf),
}

/// A parsed configuration plus what is needed to hash and resolve it.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub config: RunConfig,
    /// SHA-256 of the canonical (sorted-key, compact) JSON document.
    pub digest: String,
    base_dir: PathBuf,
}

/// Hex SHA-256 of `value` serialized with sorted keys and no whitespace.
pub fn canonical_digest(value: &Value) -> String {
    // serde_json's default map is ordered, so this serialization is canonical
    let text = serde_json::to_string(value).expect("values serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let raw = fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value =
        serde_json::from_str(&raw).map_err(|e| CliError::config(format!("{} is not valid JSON: {e}", path.display())))?;
    let digest = canonical_digest(&doc);
    let config: RunConfig =
        serde_json::from_value(doc).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedConfig {
        path: path.to_path_buf(),
        config,
        digest,
        base_dir,
    })
}

impl LoadedConfig {
    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn bind(&self) -> Result<Bound, CliError> {
        let c = &self.config;
        let bound = match c.example {
            ExampleKind::Eco => {
                let mut cfg = EcoConfig::default().with_params(&c.model).map_err(CliError::config)?;
                if let Some(steps) = c.steps {
                    cfg.steps = steps;
                }
                Bound::Eco(cfg)
            }
            ExampleKind::Enterprise => {
                let mut cfg = EnterpriseConfig::default().with_params(&c.model).map_err(CliError::config)?;
                if let Some(steps) = c.steps {
                    cfg.steps = steps;
                }
                Bound::Enterprise(cfg)
            }
        };
        bound.validate().map_err(CliError::config)?;
        Ok(bound)
    }

    /// Trait schema used to decode eco genotypes.
    pub fn eco_schema(&self) -> Result<Schema, CliError> {
        let schema = self.config.tune.schema.clone().unwrap_or_else(eco::trait_schema);
        for name in ["risk", "dispersal"] {
            if !schema.genes().iter().any(|g| g.name == name) || schema.len() != 2 {
                return Err(CliError::config("eco schema must have exactly the genes risk and dispersal"));
            }
        }
        Ok(schema)
    }

    pub fn eco_strategy(&self, spec: &ParticipantSpec) -> Result<EcoStrategy, CliError> {
        match &spec.source {
            ParticipantSource::Traits { risk, dispersal } => Ok(EcoStrategy::traits(*risk, *dispersal)),
            ParticipantSource::Policy { policy } => Ok(EcoStrategy::Policy(self.policy(policy)?)),
            ParticipantSource::Reference { reference } => {
                reference_flag(*reference, &spec.name)?;
                Ok(eco::baseline())
            }
            ParticipantSource::Hof { hof, objective } => {
                let entry = self.hof_pick(hof, *objective, &eco::objective_weights())?;
                decode_eco(&self.eco_schema()?, &entry.genotype)
            }
        }
    }

    pub fn enterprise_policy(&self, spec: &ParticipantSpec) -> Result<PolicyFile, CliError> {
        match &spec.source {
            ParticipantSource::Traits { .. } => Err(CliError::config(format!(
                "participant {}: enterprise firms are policies, not trait pairs",
                spec.name
            ))),
            ParticipantSource::Policy { policy } => self.policy(policy),
            ParticipantSource::Reference { reference } => {
                reference_flag(*reference, &spec.name)?;
                Ok(enterprise::reference_policy())
            }
            ParticipantSource::Hof { hof, objective } => {
                let entry = self.hof_pick(hof, *objective, &enterprise::objective_weights())?;
                enterprise::policy_from_genotype(&entry.genotype).map_err(CliError::config)
            }
        }
    }

    fn policy(&self, r: &PolicyRef) -> Result<PolicyFile, CliError> {
        let policy = match r {
            PolicyRef::Inline(p) => p.clone(),
            PolicyRef::Path(p) => {
                let path = self.resolve_path(p);
                let raw = fs::read_to_string(&path)
                    .map_err(|e| CliError::config(format!("cannot read policy {}: {e}", path.display())))?;
                serde_json::from_str(&raw).map_err(|e| CliError::config(format!("policy {}: {e}", path.display())))?
            }
        };
        policy.spec().map_err(CliError::config)?;
        Ok(policy)
    }

    fn hof_pick(&self, hof: &Path, objective: usize, weights: &FitnessWeights) -> Result<HofEntry, CliError> {
        let path = self.resolve_path(hof);
        let raw =
            fs::read_to_string(&path).map_err(|e| CliError::config(format!("cannot read HoF {}: {e}", path.display())))?;
        let entries =
            HallOfFame::entries_from_json(&raw).map_err(|e| CliError::config(format!("HoF {}: {e}", path.display())))?;
        pick_best(&entries, objective, weights)
            .cloned()
            .ok_or_else(|| CliError::config(format!("HoF {} has no entry with objective {objective}", path.display())))
    }
}

fn reference_flag(flag: bool, name: &str) -> Result<(), CliError> {
    if flag {
        Ok(())
    } else {
        Err(CliError::config(format!("participant {name}: \"reference\" must be true")))
    }
}

/// Best entry on one objective. The example's first weight gives the
/// direction, which also covers single-objective archives.
pub fn pick_best<'a>(entries: &'a [HofEntry], objective: usize, weights: &FitnessWeights) -> Option<&'a HofEntry> {
    let sign = weights.as_slice().get(objective).or(weights.as_slice().first()).copied()?.signum();
    entries
        .iter()
        .filter(|e| objective < e.fitness.len())
        .fold(None, |best: Option<&HofEntry>, e| match best {
            Some(b) if sign * b.fitness[objective] >= sign * e.fitness[objective] => Some(b),
            _ => Some(e),
        })
}

pub fn decode_eco(schema: &Schema, g: &Genotype) -> Result<EcoStrategy, CliError> {
    let values = schema.decode(g).map_err(CliError::config)?;
    let get = |k: &str| match values.get(k) {
        Some(GeneValue::Float(v)) => Ok(*v),
        _ => Err(CliError::config(format!("gene {k} must be a float range"))),
    };
    Ok(EcoStrategy::traits(get("risk")?, get("dispersal")?))
}

/// The example model configuration after overrides.
#[derive(Clone, Debug)]
pub enum Bound {
    Eco(EcoConfig),
    Enterprise(EnterpriseConfig),
}

impl Bound {
    pub fn kind(&self) -> ExampleKind {
        match self {
            Bound::Eco(_) => ExampleKind::Eco,
            Bound::Enterprise(_) => ExampleKind::Enterprise,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            Bound::Eco(c) => c.steps,
            Bound::Enterprise(c) => c.steps,
        }
    }

    fn validate(&self) -> Result<(), strata_models::ModelError> {
        match self {
            Bound::Eco(c) => c.validate(),
            Bound::Enterprise(c) => c.validate(),
        }
    }

    pub fn weights(&self) -> FitnessWeights {
        match self {
            Bound::Eco(_) => eco::objective_weights(),
            Bound::Enterprise(_) => enterprise::objective_weights(),
        }
    }
}

//! Stylized prey-predator metacommunity on a patch network.
//!
//! Six streams in three layers. L1 produces the climate signal and the patch
//! qualities it induces; L2 runs prey growth and predation, the predator
//! response, and trait-driven dispersal, in that order and within the same
//! tick; L3 aggregates per-step metrics.

mod dynamics;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use strata_core::evolution::FitnessWeights;
use strata_core::game::{ModelInstance, Participant, Scenario, ScenarioGrid, ScoreSpec};
use strata_core::kernel::{
    run_episode, Context, ContextKey, EpisodeAggregator, EpisodeTrace, KernelError, LayeredModel, MetricHook, StepReduce,
    StreamSpec, Writes,
};
use strata_core::policy::{forward, MlpSpec, PolicyFile};
use strata_core::rng_substream;
use strata_core::schemas::{Gene, Genotype, Schema};

pub use dynamics::{
    climate_signal, coefficient_of_variation, downward_crossings, landscape_init, movement_step, patch_quality,
    predator_step, prey_step, Edge, Landscape, MovementOutcome, PreyOutcome, PreyParams, Response,
};

use crate::{apply_overrides, scenario_params, ModelError};

pub mod keys {
    use strata_core::kernel::ContextKey;

    pub fn signal() -> ContextKey {
        ContextKey::lit("CLIMATE.signal")
    }
    pub fn quality() -> ContextKey {
        ContextKey::lit("LAND.quality")
    }
    pub fn mean_quality() -> ContextKey {
        ContextKey::lit("LAND.mean_quality")
    }
    pub fn traits() -> ContextKey {
        ContextKey::lit("PREY.traits")
    }
    pub fn x_pre() -> ContextKey {
        ContextKey::lit("PREY.x_pre")
    }
    pub fn consumption() -> ContextKey {
        ContextKey::lit("PREY.consumption")
    }
    pub fn x() -> ContextKey {
        ContextKey::lit("PREY.x")
    }
    pub fn y() -> ContextKey {
        ContextKey::lit("PRED.y")
    }
    pub fn mean_x() -> ContextKey {
        ContextKey::lit("PREY.PREY.mean_x")
    }
    pub fn mean_y() -> ContextKey {
        ContextKey::lit("PRED.mean_y")
    }
    pub fn total_x() -> ContextKey {
        ContextKey::lit("ECO.total_x")
    }
    pub fn patch_cv() -> ContextKey {
        ContextKey::lit("ECO.patch_cv")
    }
    pub fn extinctions() -> ContextKey {
        ContextKey::lit("ECO.extinctions")
    }
    pub fn prev_x() -> ContextKey {
        ContextKey::lit("ECO.prev_x")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EcoConfig {
    pub amp: f64,
    pub period: f64,
    pub shock_prob: f64,
    pub n_patches: usize,
    pub fragmentation: f64,
    pub move_cost: f64,
    pub r: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub risk: f64,
    pub beta_f: f64,
    pub gamma_v: f64,
    pub conv: f64,
    pub mort: f64,
    pub dispersal: f64,
    pub ext_thresh: f64,
    pub attack: f64,
    pub handling: f64,
    pub q_min: f64,
    pub chord_prob: f64,
    pub extinction_penalty: f64,
    /// Initial prey per patch as a fraction of `K`.
    pub x0_frac: f64,
    /// Initial predators per patch as a fraction of `K`.
    pub y0_frac: f64,
    pub steps: u64,
}

impl Default for EcoConfig {
    fn default() -> Self {
        Self {
            amp: 0.4,
            period: 20.0,
            shock_prob: 0.05,
            n_patches: 12,
            fragmentation: 0.2,
            move_cost: 0.05,
            r: 0.3,
            k: 100.0,
            risk: 0.55,
            beta_f: 0.6,
            gamma_v: 0.8,
            conv: 0.02,
            mort: 0.25,
            dispersal: 0.35,
            ext_thresh: 5.0,
            attack: 0.9,
            handling: 0.1,
            q_min: 0.05,
            chord_prob: 0.3,
            extinction_penalty: 0.01,
            x0_frac: 0.5,
            y0_frac: 0.005,
            steps: 140,
        }
    }
}

const SCENARIO_ALIASES: &[(&str, &str)] = &[("frag", "fragmentation")];

impl EcoConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let unit = [
            ("shock_prob", self.shock_prob),
            ("fragmentation", self.fragmentation),
            ("move_cost", self.move_cost),
            ("risk", self.risk),
            ("mort", self.mort),
            ("dispersal", self.dispersal),
            ("chord_prob", self.chord_prob),
        ];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        let non_negative = [
            ("amp", self.amp),
            ("r", self.r),
            ("beta_f", self.beta_f),
            ("gamma_v", self.gamma_v),
            ("conv", self.conv),
            ("ext_thresh", self.ext_thresh),
            ("attack", self.attack),
            ("handling", self.handling),
            ("extinction_penalty", self.extinction_penalty),
            ("x0_frac", self.x0_frac),
            ("y0_frac", self.y0_frac),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ModelError::InvalidConfig(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("K must be positive, got {}", self.k)));
        }
        if !(self.period >= 2.0) {
            return Err(ModelError::InvalidConfig(format!("period must be at least 2, got {}", self.period)));
        }
        if !(self.q_min > 0.0) {
            return Err(ModelError::InvalidConfig("q_min must be positive".into()));
        }
        if self.n_patches == 0 {
            return Err(ModelError::InvalidConfig("n_patches must be positive".into()));
        }
        Ok(())
    }

    /// Apply scenario parameters (`amp`, `frag` or any field name).
    pub fn with_scenario(&self, scenario: &Scenario) -> Result<Self, ModelError> {
        self.with_params(&scenario_params(scenario))
    }

    /// Overlay named parameters and validate the result.
    pub fn with_params(&self, params: &Map<String, Value>) -> Result<Self, ModelError> {
        let cfg = apply_overrides(self, params, SCENARIO_ALIASES)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn prey_params(&self, risk: f64) -> PreyParams {
        PreyParams {
            risk,
            r: self.r,
            k: self.k,
            beta_f: self.beta_f,
            gamma_v: self.gamma_v,
            response: Response {
                attack: self.attack,
                handling: self.handling,
            },
        }
    }
}

/// Where the prey traits come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EcoStrategy {
    /// Fixed `(risk, dispersal)` pair.
    Traits { risk: f64, dispersal: f64 },
    /// A network mapping `(signal, mean quality)` to `(risk, dispersal)` each tick.
    Policy(PolicyFile),
}

impl EcoStrategy {
    pub fn traits(risk: f64, dispersal: f64) -> Self {
        EcoStrategy::Traits { risk, dispersal }
    }
}

/// Policy input and output sizes for [`EcoStrategy::Policy`].
pub const POLICY_INPUTS: usize = 2;
pub const POLICY_OUTPUTS: usize = 2;

/// Assemble the model and its initial context for one episode seed.
pub fn build_model(config: &EcoConfig, strategy: &EcoStrategy, seed: u64) -> Result<ModelInstance, ModelError> {
    config.validate()?;
    let n = config.n_patches;
    let landscape = landscape_init(
        n,
        config.fragmentation,
        config.move_cost,
        config.chord_prob,
        &mut rng_substream(seed, "eco/landscape"),
    );
    let neighbours = Arc::new(landscape.neighbours());
    let sensitivity = Arc::new(landscape.sensitivity.clone());

    let climate = {
        let (cfg, out) = (config.clone(), keys::signal());
        StreamSpec::new("climate", move |view, rng| {
            let s = climate_signal(view.tick(), cfg.amp, cfg.period, cfg.shock_prob, rng);
            Ok(Writes::new().with(&out, s))
        })
        .writes([&keys::signal()])
    };
    let landscape_stream = {
        let q_min = config.q_min;
        let sens = Arc::clone(&sensitivity);
        StreamSpec::new("landscape", move |view, _| {
            let q = patch_quality(view.real(&keys::signal())?, &sens, q_min);
            let mean = q.iter().sum::<f64>() / q.len() as f64;
            Ok(Writes::new().with(&keys::quality(), q).with(&keys::mean_quality(), mean))
        })
        .reads([&keys::signal()])
        .writes([&keys::quality(), &keys::mean_quality()])
    };

    let mut layer1 = vec![climate, landscape_stream];
    let trait_source: TraitSource = match strategy {
        EcoStrategy::Traits { risk, dispersal } => {
            for (name, v) in [("risk", risk), ("dispersal", dispersal)] {
                if !(0.0..=1.0).contains(v) {
                    return Err(ModelError::InvalidConfig(format!("{name} trait must lie in [0, 1], got {v}")));
                }
            }
            TraitSource::Fixed(*risk, *dispersal)
        }
        EcoStrategy::Policy(file) => {
            let spec = file.spec()?;
            if spec.inputs() != POLICY_INPUTS || spec.outputs() != POLICY_OUTPUTS {
                return Err(ModelError::InvalidConfig(format!(
                    "eco policies map {POLICY_INPUTS} inputs to {POLICY_OUTPUTS} traits, got {:?}",
                    spec.layer_sizes
                )));
            }
            layer1.push(trait_policy_stream(spec, file.params.clone())?);
            TraitSource::Context
        }
    };
    let trait_reads: Vec<ContextKey> = match trait_source {
        TraitSource::Fixed(..) => vec![],
        TraitSource::Context => vec![keys::traits()],
    };

    let prey = {
        let cfg = config.clone();
        let ts = trait_source;
        StreamSpec::new("prey", move |view, _| {
            let (risk, _) = ts.get(view)?;
            let out = prey_step(
                view.vector(&keys::x())?,
                view.vector(&keys::y())?,
                view.vector(&keys::quality())?,
                &cfg.prey_params(risk),
            )
            .map_err(|e| KernelError::step("prey", e))?;
            Ok(Writes::new().with(&keys::x_pre(), out.x_pre).with(&keys::consumption(), out.consumption))
        })
        .reads([&keys::quality()])
        .reads(&trait_reads)
        .stateful_reads([&keys::x(), &keys::y()])
        .writes([&keys::x_pre(), &keys::consumption()])
    };
    let predator = {
        let (conv, mort) = (config.conv, config.mort);
        StreamSpec::new("predator", move |view, _| {
            let y = predator_step(view.vector(&keys::y())?, view.vector(&keys::consumption())?, conv, mort);
            Ok(Writes::new().with(&keys::y(), y))
        })
        .reads([&keys::consumption()])
        .stateful_reads([&keys::y()])
        .writes([&keys::y()])
    };
    let movement = {
        let k = config.k;
        let nb = Arc::clone(&neighbours);
        let ts = trait_source;
        StreamSpec::new("movement", move |view, _| {
            let (_, dispersal) = ts.get(view)?;
            let out = movement_step(view.vector(&keys::x_pre())?, view.vector(&keys::quality())?, k, &nb, dispersal);
            Ok(Writes::new().with(&keys::x(), out.x))
        })
        .reads([&keys::x_pre(), &keys::quality()])
        .reads(&trait_reads)
        .writes([&keys::x()])
    };

    let aggregate = {
        let thresh = config.ext_thresh;
        StreamSpec::new("aggregate", move |view, _| {
            let x = view.vector(&keys::x())?;
            let y = view.vector(&keys::y())?;
            let prev = view.vector(&keys::prev_x())?;
            let n = x.len() as f64;
            let total: f64 = x.iter().sum();
            let ext = view.real(&keys::extinctions())? + downward_crossings(prev, x, thresh) as f64;
            Ok(Writes::new()
                .with(&keys::mean_x(), total / n)
                .with(&keys::mean_y(), y.iter().sum::<f64>() / n)
                .with(&keys::total_x(), total)
                .with(&keys::patch_cv(), coefficient_of_variation(x))
                .with(&keys::extinctions(), ext)
                .with(&keys::prev_x(), x.to_vec()))
        })
        .reads([&keys::x(), &keys::y()])
        .stateful_reads([&keys::prev_x(), &keys::extinctions()])
        .writes([
            &keys::mean_x(),
            &keys::mean_y(),
            &keys::total_x(),
            &keys::patch_cv(),
            &keys::extinctions(),
            &keys::prev_x(),
        ])
        .metric(MetricHook::written(keys::mean_x()))
        .metric(MetricHook::written(keys::mean_y()))
        .metric(MetricHook::written(keys::total_x()))
        .metric(MetricHook::written(keys::patch_cv()))
        .metric(MetricHook::written(keys::extinctions()))
    };

    let model = LayeredModel::new()
        .sequential_layer(layer1)
        .sequential_layer(vec![prey, predator, movement])
        .layer(vec![aggregate])
        .provides([&keys::x(), &keys::y(), &keys::prev_x(), &keys::extinctions()])
        .aggregator(EpisodeAggregator::new("mean_biomass", keys::mean_x(), StepReduce::Mean))
        .aggregator(EpisodeAggregator::custom("cv", keys::total_x(), coefficient_of_variation))
        .aggregator(EpisodeAggregator::new("pred_density", keys::mean_y(), StepReduce::Mean))
        .aggregator(EpisodeAggregator::new("extinctions", keys::extinctions(), StepReduce::Last));

    let x0 = vec![config.x0_frac * config.k; n];
    let mut init = Context::new();
    init.insert(keys::x(), x0.clone())
        .insert(keys::y(), vec![config.y0_frac * config.k; n])
        .insert(keys::prev_x(), x0)
        .insert(keys::extinctions(), 0.0);
    Ok(ModelInstance { model, init })
}

#[derive(Clone, Copy, Debug)]
enum TraitSource {
    Fixed(f64, f64),
    Context,
}

impl TraitSource {
    fn get(&self, view: &strata_core::kernel::ContextView<'_>) -> Result<(f64, f64), KernelError> {
        match *self {
            TraitSource::Fixed(r, d) => Ok((r, d)),
            TraitSource::Context => {
                let t = view.vector(&keys::traits())?;
                Ok((t[0], t[1]))
            }
        }
    }
}

fn trait_policy_stream(spec: MlpSpec, params: Vec<f64>) -> Result<StreamSpec, ModelError> {
    if params.len() != spec.param_count() {
        return Err(ModelError::InvalidConfig(format!(
            "policy expects {} parameters, got {}",
            spec.param_count(),
            params.len()
        )));
    }
    Ok(StreamSpec::new("trait_policy", move |view, _| {
        let input = [view.real(&keys::signal())?, view.real(&keys::mean_quality())?];
        let out = forward(&spec, &params, &input).map_err(|e| KernelError::step("trait_policy", e))?;
        let traits = out.iter().map(|v| v.clamp(0.0, 1.0)).collect::<Vec<f64>>();
        Ok(Writes::new().with(&keys::traits(), traits))
    })
    .reads([&keys::signal(), &keys::mean_quality()])
    .writes([&keys::traits()]))
}

/// Summary of one eco episode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcoEpisodeMetrics {
    pub mean_biomass: f64,
    pub cv: f64,
    pub pred_density: f64,
    pub extinctions: f64,
}

impl EcoEpisodeMetrics {
    pub fn from_trace(trace: &EpisodeTrace) -> Self {
        let m = |k: &str| trace.episode_metrics.get(k).copied().unwrap_or(0.0);
        Self {
            mean_biomass: m("mean_biomass"),
            cv: m("cv"),
            pred_density: m("pred_density"),
            extinctions: m("extinctions"),
        }
    }
}

pub fn run(config: &EcoConfig, strategy: &EcoStrategy, seed: u64, steps: u64) -> Result<EpisodeTrace, ModelError> {
    let inst = build_model(config, strategy, seed)?;
    Ok(run_episode(&inst.model, &inst.init, seed, steps)?)
}

/// Search space of the trait pair.
pub fn trait_schema() -> Schema {
    Schema::new(vec![Gene::float("risk", 0.0, 1.0), Gene::float("dispersal", 0.0, 1.0)]).expect("static schema")
}

pub fn objective_weights() -> FitnessWeights {
    FitnessWeights::minimize(2)
}

pub fn decode_traits(g: &Genotype) -> Result<EcoStrategy, ModelError> {
    let v = trait_schema().decode(g).map_err(|e| ModelError::InvalidConfig(e.to_string()))?;
    let get = |k: &str| v[k].as_f64().expect("float genes");
    Ok(EcoStrategy::traits(get("risk"), get("dispersal")))
}

/// `(-mean biomass, cv + penalty * extinctions)`, both minimized.
pub fn objective(config: &EcoConfig, g: &Genotype, seed: u64) -> Result<Vec<f64>, ModelError> {
    evaluate_strategy(config, &decode_traits(g)?, seed)
}

/// The objective vector of an already decoded strategy.
pub fn evaluate_strategy(config: &EcoConfig, strategy: &EcoStrategy, seed: u64) -> Result<Vec<f64>, ModelError> {
    let trace = run(config, strategy, seed, config.steps)?;
    let m = EcoEpisodeMetrics::from_trace(&trace);
    Ok(vec![-m.mean_biomass, m.cv + config.extinction_penalty * m.extinctions])
}

/// The 2x2 amplitude by fragmentation grid.
pub fn default_grid() -> ScenarioGrid {
    ScenarioGrid::new()
        .axis("amp", vec![json!(0.4), json!(0.8)])
        .axis("frag", vec![json!(0.2), json!(0.5)])
}

pub fn default_score() -> ScoreSpec {
    ScoreSpec::new(keys::mean_x(), StepReduce::Mean)
}

/// The reference trait pair.
pub fn baseline() -> EcoStrategy {
    EcoStrategy::traits(0.55, 0.35)
}

pub fn participant(name: &str, config: &EcoConfig, strategy: EcoStrategy) -> Participant {
    let config = config.clone();
    Participant::new(name, move |scenario: &Scenario, seed| {
        let cfg = config.with_scenario(scenario).map_err(|e| e.to_string())?;
        build_model(&cfg, &strategy, seed).map_err(|e| e.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use strata_core::policy::{MlpSpec, OutputActivation};

    #[test]
    fn six_streams_in_three_layers() {
        let inst = build_model(&EcoConfig::default(), &baseline(), 1).unwrap();
        assert_eq!(inst.model.layers.len(), 3);
        assert_eq!(inst.model.stream_count(), 6);
        assert!(inst.model.validate().is_empty());
        let sizes: Vec<usize> = inst.model.layers.iter().map(|l| l.streams.len()).collect();
        assert_eq!(sizes, [2, 3, 1]);
    }

    #[test]
    fn default_dynamics_are_not_degenerate() {
        let trace = run(&EcoConfig::default(), &baseline(), 7, 140).unwrap();
        let m = EcoEpisodeMetrics::from_trace(&trace);
        assert!(m.mean_biomass > 10.0 && m.mean_biomass < 100.0, "{m:?}");
        assert!(m.pred_density > 0.0);
        assert!(m.cv > 0.0);
        assert_eq!(trace.per_step.len(), 140);
    }

    #[test]
    fn scenario_overrides_by_alias() {
        let s = Scenario::new("x").with("amp", 0.8).with("frag", 0.5);
        let cfg = EcoConfig::default().with_scenario(&s).unwrap();
        assert_eq!((cfg.amp, cfg.fragmentation), (0.8, 0.5));
        assert!(EcoConfig::default().with_scenario(&Scenario::new("y").with("nope", 1.0)).is_err());
        assert!(EcoConfig::default().with_scenario(&Scenario::new("z").with("risk", 2.0)).is_err());
    }

    #[test]
    fn zero_dynamics_give_penalty_only_objective() {
        let cfg = EcoConfig {
            r: 0.0,
            y0_frac: 0.0,
            x0_frac: 0.0,
            ..EcoConfig::default()
        };
        let f = objective(&cfg, &Genotype(vec![0.5, 0.5]), 3).unwrap();
        assert_eq!(f, vec![0.0, 0.0]);
    }

    #[test]
    fn policy_strategy_adds_a_stream() {
        let spec = MlpSpec::new(vec![2, 3, 2], OutputActivation::Sigmoid).unwrap();
        let file = PolicyFile::new(&spec, vec![0.0; spec.param_count()]).unwrap();
        let inst = build_model(&EcoConfig::default(), &EcoStrategy::Policy(file.clone()), 1).unwrap();
        assert_eq!(inst.model.stream_count(), 7);
        assert!(inst.model.validate().is_empty());
        // zero weights give traits (0.5, 0.5)
        let a = run(&EcoConfig::default(), &EcoStrategy::Policy(file), 4, 30).unwrap();
        let b = run(&EcoConfig::default(), &EcoStrategy::traits(0.5, 0.5), 4, 30).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn strategy_json_forms() {
        let t: EcoStrategy = serde_json::from_str(r#"{"risk":0.55,"dispersal":0.35}"#).unwrap();
        assert_eq!(t, baseline());
        let p: EcoStrategy = serde_json::from_str(r#"{"layer_sizes":[2,2],"output":"sigmoid","params":[0,0,0,0,0,0]}"#).unwrap();
        assert!(matches!(p, EcoStrategy::Policy(_)));
    }
}

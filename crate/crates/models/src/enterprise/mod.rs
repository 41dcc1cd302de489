//! Two-firm enterprise competition under a policy regime.
//!
//! L1 holds the exogenous drivers (government, industry, market). L2 runs the
//! two firm policies, the alliance mediator and payoff accounting in order,
//! so payoffs see this tick's actions. L3 aggregates.

mod dynamics;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use strata_core::evolution::{FitnessWeights, SearchSpace};
use strata_core::game::{expand_grid, ModelInstance, Participant, Scenario, ScenarioGrid, ScoreSpec, TournamentResult};
use strata_core::kernel::{
    run_episode, Context, ContextKey, ContextView, EpisodeAggregator, EpisodeTrace, KernelError, LayeredModel, MetricHook,
    StepReduce, StreamSpec, Writes,
};
use strata_core::policy::{policy_stream, MlpSpec, OutputActivation, PolicyFile, PolicyOutputs};
use strata_core::rng_substream;
use strata_core::schemas::Genotype;

pub use dynamics::{
    alliance_step, firm_profit, government_step, industry_step, market_step, payoff_step, AllianceState, BargainRule,
    PayoffEnv, Payoffs, Regime, Regulation, Sector, SectorConstants, WelfareWeights, ALLIANCE_THRESHOLD,
    DEMAND_PERSISTENCE,
};

use crate::{apply_overrides, scenario_params, ModelError};

pub mod keys {
    use strata_core::kernel::ContextKey;

    macro_rules! key_fns {
        ($($name:ident => $raw:literal),* $(,)?) => {
            $(pub fn $name() -> ContextKey { ContextKey::lit($raw) })*
        };
    }

    key_fns! {
        subsidy => "GOV.subsidy",
        subsidy_norm => "GOV.subsidy_norm",
        penalty_rate => "GOV.penalty_rate",
        tax => "GOV.tax",
        compliance_thr => "IND.compliance_thr",
        audit_prob => "IND.audit_prob",
        std_compat => "IND.std_compat",
        demand => "MKT.demand",
        demand_norm => "MKT.demand_norm",
        price => "MKT.price_signal",
        atr => "MKT.atr",
        time => "MKT.time",
        action_a => "FIRM_A.action",
        action_b => "FIRM_B.action",
        profit_a => "FIRM_A.profit",
        profit_b => "FIRM_B.profit",
        capital_a => "FIRM_A.capital",
        capital_b => "FIRM_B.capital",
        compliant_a => "FIRM_A.compliant",
        compliant_b => "FIRM_B.compliant",
        allied => "ALLY.allied",
        transfers => "ALLY.transfers",
        stability => "ALLY.stability",
        welfare => "WEL.welfare",
        total_profit => "ENT.total_profit",
        compliance_rate => "ENT.compliance_rate",
        alliance => "ENT.alliance",
        invest_a => "ENT.invest_a",
        collab_a => "ENT.collab_a",
        invest_b => "ENT.invest_b",
        collab_b => "ENT.collab_b",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnterpriseConfig {
    pub regime: Regime,
    pub tax: f64,
    pub audit_intensity: f64,
    pub regulation: Regulation,
    pub std_compat: f64,
    pub base_demand: f64,
    pub shock_amp: f64,
    pub atr: f64,
    pub subsidy: f64,
    pub bargain_rule: BargainRule,
    pub side_payment: f64,
    pub welfare_weights: WelfareWeights,
    pub risk_penalty: f64,
    pub sector: Sector,
    pub initial_capital: f64,
    /// Divisor applied to demand before it reaches the firm policies.
    pub demand_scale: f64,
    /// Divisor applied to the subsidy before it reaches the firm policies.
    pub subsidy_scale: f64,
    pub steps: u64,
}

impl Default for EnterpriseConfig {
    fn default() -> Self {
        Self {
            regime: Regime::Cooperative,
            tax: 0.1,
            audit_intensity: 0.5,
            regulation: Regulation::Strict,
            std_compat: 0.5,
            base_demand: 100.0,
            shock_amp: 10.0,
            atr: 0.0,
            subsidy: 0.0,
            bargain_rule: BargainRule::EqualSplit,
            side_payment: 1.0,
            welfare_weights: WelfareWeights {
                w_profit: 1.0,
                w_consumer: 0.1,
            },
            risk_penalty: 0.1,
            sector: Sector::Energy,
            initial_capital: 50.0,
            demand_scale: 100.0,
            subsidy_scale: 10.0,
            steps: 100,
        }
    }
}

impl EnterpriseConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("tax", self.tax),
            ("audit_intensity", self.audit_intensity),
            ("std_compat", self.std_compat),
            ("atr", self.atr),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        for (name, v) in [
            ("shock_amp", self.shock_amp),
            ("subsidy", self.subsidy),
            ("side_payment", self.side_payment),
            ("risk_penalty", self.risk_penalty),
            ("initial_capital", self.initial_capital),
            ("w_profit", self.welfare_weights.w_profit),
            ("w_consumer", self.welfare_weights.w_consumer),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ModelError::InvalidConfig(format!("{name} must be non-negative, got {v}")));
            }
        }
        for (name, v) in [
            ("base_demand", self.base_demand),
            ("demand_scale", self.demand_scale),
            ("subsidy_scale", self.subsidy_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.steps == 0 {
            return Err(ModelError::InvalidConfig("steps must be positive".into()));
        }
        Ok(())
    }

    pub fn with_scenario(&self, scenario: &Scenario) -> Result<Self, ModelError> {
        self.with_params(&scenario_params(scenario))
    }

    pub fn with_params(&self, params: &Map<String, Value>) -> Result<Self, ModelError> {
        let cfg = apply_overrides(self, params, &[])?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Architecture shared by both firms: six signals in, `(invest, coop)` out.
pub fn default_policy_spec() -> MlpSpec {
    MlpSpec::new(vec![6, 8, 2], OutputActivation::Sigmoid).expect("static spec")
}

/// Half-width of the box that flat policy genotypes map onto.
pub const WEIGHT_BOUND: f64 = 3.0;
pub const REFERENCE_SEED: u64 = 20_240_601;

pub fn search_space() -> SearchSpace {
    SearchSpace::Flat {
        len: default_policy_spec().param_count(),
        bound: WEIGHT_BOUND,
    }
}

/// The seeded reference policy: weights drawn `N(0, 0.5^2)` from a fixed
/// substream and clamped to the search box.
pub fn reference_policy() -> PolicyFile {
    let spec = default_policy_spec();
    let mut rng = rng_substream(REFERENCE_SEED, "enterprise/reference");
    let params = (0..spec.param_count())
        .map(|_| (0.5 * rng.normal()).clamp(-WEIGHT_BOUND, WEIGHT_BOUND))
        .collect();
    PolicyFile::new(&spec, params).expect("length matches")
}

pub fn policy_from_genotype(g: &Genotype) -> Result<PolicyFile, ModelError> {
    Ok(PolicyFile::new(&default_policy_spec(), SearchSpace::flat_params(WEIGHT_BOUND, g))?)
}

fn policy_inputs() -> Vec<ContextKey> {
    vec![
        keys::price(),
        keys::demand_norm(),
        keys::tax(),
        keys::atr(),
        keys::subsidy_norm(),
        keys::time(),
    ]
}

fn firm(id: &str, policy: &PolicyFile, action: ContextKey) -> Result<StreamSpec, ModelError> {
    let spec = policy.spec()?;
    if spec.inputs() != 6 || spec.outputs() != 2 {
        return Err(ModelError::InvalidConfig(format!(
            "firm policies map 6 signals to 2 actions, got {:?}",
            spec.layer_sizes
        )));
    }
    Ok(policy_stream(id, spec, policy.params.clone(), policy_inputs(), PolicyOutputs::Vector(action))?)
}

fn action(view: &ContextView<'_>, key: &ContextKey) -> Result<(f64, f64), KernelError> {
    let a = view.vector(key)?;
    Ok((a[0], a[1]))
}

fn population_variance(series: &[f64]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

pub fn build_model(config: &EnterpriseConfig, firm_a: &PolicyFile, firm_b: &PolicyFile) -> Result<ModelInstance, ModelError> {
    config.validate()?;

    let government = {
        let c = config.clone();
        StreamSpec::new("government", move |_, _| {
            let (subsidy, penalty) = government_step(c.regime, c.subsidy, c.audit_intensity);
            Ok(Writes::new()
                .with(&keys::subsidy(), subsidy)
                .with(&keys::subsidy_norm(), subsidy / c.subsidy_scale)
                .with(&keys::penalty_rate(), penalty)
                .with(&keys::tax(), c.tax))
        })
        .writes([&keys::subsidy(), &keys::subsidy_norm(), &keys::penalty_rate(), &keys::tax()])
    };
    let industry = {
        let (reg, compat) = (config.regulation, config.std_compat);
        StreamSpec::new("industry", move |_, _| {
            let (thr, audit) = industry_step(reg);
            Ok(Writes::new()
                .with(&keys::compliance_thr(), thr)
                .with(&keys::audit_prob(), audit)
                .with(&keys::std_compat(), compat))
        })
        .writes([&keys::compliance_thr(), &keys::audit_prob(), &keys::std_compat()])
    };
    let market = {
        let c = config.clone();
        StreamSpec::new("market", move |view, rng| {
            let (demand, price) = market_step(c.base_demand, c.shock_amp, view.real(&keys::demand())?, rng);
            Ok(Writes::new()
                .with(&keys::demand(), demand)
                .with(&keys::demand_norm(), demand / c.demand_scale)
                .with(&keys::price(), price)
                .with(&keys::atr(), c.atr)
                .with(&keys::time(), view.tick() as f64 / c.steps as f64))
        })
        .stateful_reads([&keys::demand()])
        .writes([&keys::demand(), &keys::demand_norm(), &keys::price(), &keys::atr(), &keys::time()])
    };

    let alliance = {
        let (rule, side) = (config.bargain_rule, config.side_payment);
        StreamSpec::new("alliance", move |view, _| {
            let (_, coop_a) = action(view, &keys::action_a())?;
            let (_, coop_b) = action(view, &keys::action_b())?;
            let prev = AllianceState {
                allied: false,
                transfers: 0.0,
                stability_counter: view.real(&keys::stability())? as u64,
            };
            let s = alliance_step(coop_a, coop_b, rule, side, prev);
            Ok(Writes::new()
                .with(&keys::allied(), s.allied)
                .with(&keys::transfers(), s.transfers)
                .with(&keys::stability(), s.stability_counter as f64))
        })
        .reads([&keys::action_a(), &keys::action_b()])
        .stateful_reads([&keys::stability()])
        .writes([&keys::allied(), &keys::transfers(), &keys::stability()])
        .metric(MetricHook::written(keys::transfers()))
    };

    let payoff = {
        let c = config.clone();
        let sector = config.sector.constants();
        StreamSpec::new("payoff", move |view, _| {
            let (invest_a, _) = action(view, &keys::action_a())?;
            let (invest_b, _) = action(view, &keys::action_b())?;
            let env = PayoffEnv {
                price_signal: view.real(&keys::price())?,
                demand: view.real(&keys::demand())?,
                tax: view.real(&keys::tax())?,
                subsidy: view.real(&keys::subsidy())?,
                penalty_rate: view.real(&keys::penalty_rate())?,
                compliance_thr: view.real(&keys::compliance_thr())?,
                audit_prob: view.real(&keys::audit_prob())?,
                std_compat: view.real(&keys::std_compat())?,
                atr: view.real(&keys::atr())?,
                allied: view.flag(&keys::allied())?,
                sector,
            };
            let p = payoff_step(
                invest_a,
                invest_b,
                view.real(&keys::transfers())?,
                &env,
                c.welfare_weights,
                c.risk_penalty,
            );
            let cap_a = (view.real(&keys::capital_a())? + p.profit_a).max(0.0);
            let cap_b = (view.real(&keys::capital_b())? + p.profit_b).max(0.0);
            Ok(Writes::new()
                .with(&keys::profit_a(), p.profit_a)
                .with(&keys::profit_b(), p.profit_b)
                .with(&keys::capital_a(), cap_a)
                .with(&keys::capital_b(), cap_b)
                .with(&keys::compliant_a(), p.compliant_a)
                .with(&keys::compliant_b(), p.compliant_b)
                .with(&keys::welfare(), p.welfare))
        })
        .reads([
            &keys::action_a(),
            &keys::action_b(),
            &keys::price(),
            &keys::demand(),
            &keys::tax(),
            &keys::subsidy(),
            &keys::penalty_rate(),
            &keys::compliance_thr(),
            &keys::audit_prob(),
            &keys::std_compat(),
            &keys::atr(),
            &keys::allied(),
            &keys::transfers(),
        ])
        .stateful_reads([&keys::capital_a(), &keys::capital_b()])
        .writes([
            &keys::profit_a(),
            &keys::profit_b(),
            &keys::capital_a(),
            &keys::capital_b(),
            &keys::compliant_a(),
            &keys::compliant_b(),
            &keys::welfare(),
        ])
        .metric(MetricHook::written(keys::profit_a()))
        .metric(MetricHook::written(keys::profit_b()))
        .metric(MetricHook::written(keys::welfare()))
    };

    let aggregate = StreamSpec::new("aggregate", move |view, _| {
        let (inv_a, coop_a) = action(view, &keys::action_a())?;
        let (inv_b, coop_b) = action(view, &keys::action_b())?;
        let label = |v: f64| if v >= 0.5 { 1.0 } else { 0.0 };
        let compliant = [view.flag(&keys::compliant_a())?, view.flag(&keys::compliant_b())?];
        let rate = compliant.iter().filter(|c| **c).count() as f64 / 2.0;
        Ok(Writes::new()
            .with(&keys::total_profit(), view.real(&keys::profit_a())? + view.real(&keys::profit_b())?)
            .with(&keys::compliance_rate(), rate)
            .with(&keys::alliance(), if view.flag(&keys::allied())? { 1.0 } else { 0.0 })
            .with(&keys::invest_a(), label(inv_a))
            .with(&keys::collab_a(), label(coop_a))
            .with(&keys::invest_b(), label(inv_b))
            .with(&keys::collab_b(), label(coop_b)))
    })
    .reads([
        &keys::action_a(),
        &keys::action_b(),
        &keys::profit_a(),
        &keys::profit_b(),
        &keys::compliant_a(),
        &keys::compliant_b(),
        &keys::allied(),
    ])
    .writes([
        &keys::total_profit(),
        &keys::compliance_rate(),
        &keys::alliance(),
        &keys::invest_a(),
        &keys::collab_a(),
        &keys::invest_b(),
        &keys::collab_b(),
    ])
    .metric(MetricHook::written(keys::total_profit()))
    .metric(MetricHook::written(keys::compliance_rate()))
    .metric(MetricHook::written(keys::alliance()))
    .metric(MetricHook::written(keys::invest_a()))
    .metric(MetricHook::written(keys::collab_a()))
    .metric(MetricHook::written(keys::invest_b()))
    .metric(MetricHook::written(keys::collab_b()));

    let model = LayeredModel::new()
        .layer(vec![government, industry, market])
        .sequential_layer(vec![
            firm("firm_a", firm_a, keys::action_a())?,
            firm("firm_b", firm_b, keys::action_b())?,
            alliance,
            payoff,
        ])
        .layer(vec![aggregate])
        .provides([&keys::demand(), &keys::stability(), &keys::capital_a(), &keys::capital_b()])
        .aggregator(EpisodeAggregator::new("mean_profit_a", keys::profit_a(), StepReduce::Mean))
        .aggregator(EpisodeAggregator::custom("var_profit_a", keys::profit_a(), population_variance))
        .aggregator(EpisodeAggregator::new("mean_profit_b", keys::profit_b(), StepReduce::Mean))
        .aggregator(EpisodeAggregator::custom("var_profit_b", keys::profit_b(), population_variance))
        .aggregator(EpisodeAggregator::new("compliance", keys::compliance_rate(), StepReduce::Mean))
        .aggregator(EpisodeAggregator::new("stability", keys::alliance(), StepReduce::Mean))
        .aggregator(EpisodeAggregator::new("mean_welfare", keys::welfare(), StepReduce::Mean));

    let mut init = Context::new();
    init.insert(keys::demand(), config.base_demand)
        .insert(keys::stability(), 0.0)
        .insert(keys::capital_a(), config.initial_capital)
        .insert(keys::capital_b(), config.initial_capital);
    Ok(ModelInstance { model, init })
}

/// Summary of one enterprise episode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnterpriseMetrics {
    pub mean_profit_a: f64,
    pub var_profit_a: f64,
    pub mean_profit_b: f64,
    pub var_profit_b: f64,
    pub compliance: f64,
    pub stability: f64,
    pub mean_welfare: f64,
}

impl EnterpriseMetrics {
    pub fn from_trace(trace: &EpisodeTrace) -> Self {
        let m = |k: &str| trace.episode_metrics.get(k).copied().unwrap_or(0.0);
        Self {
            mean_profit_a: m("mean_profit_a"),
            var_profit_a: m("var_profit_a"),
            mean_profit_b: m("mean_profit_b"),
            var_profit_b: m("var_profit_b"),
            compliance: m("compliance"),
            stability: m("stability"),
            mean_welfare: m("mean_welfare"),
        }
    }
}

pub fn run(
    config: &EnterpriseConfig,
    firm_a: &PolicyFile,
    firm_b: &PolicyFile,
    seed: u64,
    steps: u64,
) -> Result<EpisodeTrace, ModelError> {
    let inst = build_model(config, firm_a, firm_b)?;
    Ok(run_episode(&inst.model, &inst.init, seed, steps)?)
}

pub fn objective_weights() -> FitnessWeights {
    FitnessWeights::maximize(2)
}

/// `(mean profit of firm A, -variance of its profit)` against the reference
/// policy, both maximized.
pub fn objective(config: &EnterpriseConfig, g: &Genotype, seed: u64) -> Result<Vec<f64>, ModelError> {
    let trace = run(config, &policy_from_genotype(g)?, &reference_policy(), seed, config.steps)?;
    let m = EnterpriseMetrics::from_trace(&trace);
    Ok(vec![m.mean_profit_a, -m.var_profit_a])
}

/// regime x sector x tax x atr x subsidy, two values each.
pub fn default_grid() -> ScenarioGrid {
    ScenarioGrid::new()
        .axis("regime", vec![json!("cooperative"), json!("directive")])
        .axis("sector", vec![json!("energy"), json!("tech")])
        .axis("tax", vec![json!(0.1), json!(0.3)])
        .axis("atr", vec![json!(0.0), json!(0.5)])
        .axis("subsidy", vec![json!(0.0), json!(5.0)])
}

pub fn default_score() -> ScoreSpec {
    ScoreSpec::new(keys::profit_a(), StepReduce::Mean)
}

/// A participant plays firm A against the reference policy as firm B.
pub fn participant(name: &str, config: &EnterpriseConfig, policy: PolicyFile) -> Participant {
    let config = config.clone();
    let reference = reference_policy();
    Participant::new(name, move |scenario: &Scenario, _seed| {
        let cfg = config.with_scenario(scenario).map_err(|e| e.to_string())?;
        build_model(&cfg, &policy, &reference).map_err(|e| e.to_string())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub group: String,
    pub ref_mean: f64,
    pub champ_mean: f64,
    pub delta: f64,
}

/// Reference versus champion means overall, by regime and by sector.
pub fn panel_report(
    result: &TournamentResult,
    grid: &ScenarioGrid,
    reference: &str,
    champion: &str,
) -> Result<Vec<PanelRow>, ModelError> {
    let scenarios = expand_grid(grid).map_err(|e| ModelError::InvalidConfig(e.to_string()))?;
    let table = result.mean_table();
    let groups: [(&str, Option<(&str, &str)>); 5] = [
        ("Overall", None),
        ("Cooperative", Some(("regime", "cooperative"))),
        ("Directive", Some(("regime", "directive"))),
        ("Energy", Some(("sector", "energy"))),
        ("Tech", Some(("sector", "tech"))),
    ];
    let mut rows = Vec::new();
    for (label, filter) in groups {
        let members: Vec<&Scenario> = scenarios
            .iter()
            .filter(|s| filter.is_none_or(|(k, v)| s.str(k) == Some(v)))
            .collect();
        let mean_of = |who: &str| -> Result<f64, ModelError> {
            let mut total = 0.0;
            for s in &members {
                total += table
                    .get(&s.name)
                    .and_then(|row| row.get(who))
                    .ok_or_else(|| ModelError::InvalidConfig(format!("no score for {who} in {}", s.name)))?;
            }
            Ok(total / members.len() as f64)
        };
        if members.is_empty() {
            continue;
        }
        let (r, c) = (mean_of(reference)?, mean_of(champion)?);
        rows.push(PanelRow {
            group: label.to_string(),
            ref_mean: r,
            champ_mean: c,
            delta: c - r,
        });
    }
    Ok(rows)
}

pub fn panel_csv(rows: &[PanelRow]) -> String {
    let mut out = String::from("group,ref_mean,champ_mean,delta\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.group, r.ref_mean, r.champ_mean, r.delta));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use strata_core::game::expand_grid;

    fn zero_policy() -> PolicyFile {
        PolicyFile::new(&default_policy_spec(), vec![0.0; 74]).unwrap()
    }

    #[test]
    fn eight_streams_in_three_layers() {
        let inst = build_model(&EnterpriseConfig::default(), &zero_policy(), &reference_policy()).unwrap();
        assert_eq!(inst.model.stream_count(), 8);
        let sizes: Vec<usize> = inst.model.layers.iter().map(|l| l.streams.len()).collect();
        assert_eq!(sizes, [3, 4, 1]);
        assert!(inst.model.validate().is_empty());
    }

    #[test]
    fn zero_policy_acts_at_one_half() {
        let trace = run(&EnterpriseConfig::default(), &zero_policy(), &zero_policy(), 1, 10).unwrap();
        // (0.5, 0.5): invest label on, allied since 0.25 >= 0.25
        assert!(trace.series(&keys::invest_a()).unwrap().iter().all(|v| *v == 1.0));
        assert!(trace.series(&keys::alliance()).unwrap().iter().all(|v| *v == 1.0));
        assert!(trace.series(&keys::transfers()).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn shock_free_fitness_is_reproducible() {
        let cfg = EnterpriseConfig {
            shock_amp: 0.0,
            ..EnterpriseConfig::default()
        };
        let g = Genotype(vec![0.5; 74]);
        let a = objective(&cfg, &g, 3).unwrap();
        let b = objective(&cfg, &g, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_grid_has_32_scenarios() {
        assert_eq!(expand_grid(&default_grid()).unwrap().len(), 32);
        let s = &expand_grid(&default_grid()).unwrap()[31];
        let cfg = EnterpriseConfig::default().with_scenario(s).unwrap();
        assert_eq!((cfg.regime, cfg.sector, cfg.tax, cfg.atr, cfg.subsidy), (Regime::Directive, Sector::Tech, 0.3, 0.5, 5.0));
    }

    #[test]
    fn reference_policy_is_fixed() {
        assert_eq!(reference_policy(), reference_policy());
        assert_eq!(reference_policy().params.len(), 74);
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = EnterpriseConfig::default();
        let raw = serde_json::to_string(&cfg).unwrap();
        assert!(raw.contains("\"regime\":\"cooperative\""));
        assert_eq!(serde_json::from_str::<EnterpriseConfig>(&raw).unwrap(), cfg);
        assert!(serde_json::from_str::<EnterpriseConfig>(r#"{"bogus":1}"#).is_err());
    }
}

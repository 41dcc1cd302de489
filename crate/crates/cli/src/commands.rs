//! The six subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use strata_core::evolution::{
    run_mu_plus_lambda_es, run_nsga2, run_simple_ga, EsConfig, EvolutionConfig, EvolutionError, Outcome, SearchSpace,
};
use strata_core::game::{expand_grid, run_tournament, ModelInstance, Participant, ScenarioGrid, TournamentError};
use strata_core::kernel::run_episode;
use strata_core::schemas::Genotype;
use strata_models::eco::{self, EcoStrategy};
use strata_models::enterprise;
use strata_models::ModelError;

use crate::config::{self, decode_eco, pick_best, Algo, Bound, LoadedConfig};
use crate::graph::{graph_svg, model_graph};
use crate::manifest::{ManifestInfo, Outputs};
use crate::viz::{self, VizKind};
use crate::CliError;

/// Flags shared by every command.
#[derive(Clone, Debug)]
pub struct Global {
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub quiet: bool,
    /// Raw argument list, recorded in manifests.
    pub args: Vec<String>,
}

impl Global {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn seed(&self, cfg: &LoadedConfig) -> u64 {
        self.seed.or(cfg.config.seed).unwrap_or(0)
    }

    fn info(&self, command: &str, cfg: &LoadedConfig, seed: u64, settings: Value) -> ManifestInfo {
        ManifestInfo {
            command: command.to_string(),
            args: self.args.clone(),
            config: cfg.path.display().to_string(),
            config_digest: cfg.digest.clone(),
            seed,
            settings,
        }
    }
}

fn model_error(e: ModelError) -> CliError {
    match e {
        ModelError::InvalidConfig(_) | ModelError::Policy(_) => CliError::config(e),
        ModelError::Kernel(_) => CliError::runtime(e),
    }
}

/// The model simulated by `run` and drawn by `run-graph`.
fn single_model(cfg: &LoadedConfig, bound: &Bound, seed: u64) -> Result<ModelInstance, CliError> {
    let participant = cfg.config.participant.as_ref();
    match bound {
        Bound::Eco(c) => {
            let strategy = participant.map(|p| cfg.eco_strategy(p)).transpose()?.unwrap_or_else(eco::baseline);
            eco::build_model(c, &strategy, seed).map_err(model_error)
        }
        Bound::Enterprise(c) => {
            let reference = enterprise::reference_policy();
            let firm_a = participant
                .map(|p| cfg.enterprise_policy(p))
                .transpose()?
                .unwrap_or_else(|| reference.clone());
            enterprise::build_model(c, &firm_a, &reference).map_err(model_error)
        }
    }
}

pub fn run(g: &Global, path: &Path, steps: Option<u64>) -> Result<(), CliError> {
    let cfg = config::load(path)?;
    let bound = cfg.bind()?;
    let seed = g.seed(&cfg);
    let steps = steps.unwrap_or(bound.steps());
    if steps == 0 {
        return Err(CliError::config("--steps must be positive"));
    }
    let inst = single_model(&cfg, &bound, seed)?;
    let trace = run_episode(&inst.model, &inst.init, seed, steps).map_err(CliError::runtime)?;

    let mut out = Outputs::create(&g.out)?;
    out.write("trace.csv", trace.to_csv())?;
    out.write("summary.json", trace.summary_json())?;
    let info = g.info("run", &cfg, seed, json!({ "steps": steps }));
    out.finish("run", info, true)?;
    g.say(format!("run: {steps} steps, seed {seed} -> {}", g.out.display()));
    Ok(())
}

pub fn run_graph(g: &Global, path: &Path) -> Result<(), CliError> {
    let cfg = config::load(path)?;
    let bound = cfg.bind()?;
    let seed = g.seed(&cfg);
    let inst = single_model(&cfg, &bound, seed)?;
    let diagnostics = inst.model.validate();
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("diagnostic: {d}");
        }
        return Err(CliError::runtime(format!("model failed validation with {} finding(s)", diagnostics.len())));
    }
    let graph = model_graph(&inst.model);
    let mut out = Outputs::create(&g.out)?;
    out.write("graph.json", serde_json::to_string_pretty(&graph).expect("graph serializes"))?;
    out.write("graph.svg", graph_svg(&graph))?;
    let info = g.info("run-graph", &cfg, seed, json!({}));
    out.finish("run-graph", info, true)?;
    g.say(format!(
        "run-graph: {} streams in {} layers -> {}",
        graph.streams.len(),
        graph.layers.len(),
        g.out.display()
    ));
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TuneArgs {
    pub algo: Option<Algo>,
    pub pop: Option<usize>,
    pub ngen: Option<usize>,
}

type ObjectiveFn = Box<dyn Fn(&Genotype, u64) -> Result<Vec<f64>, String> + Sync>;

fn objective(cfg: &LoadedConfig, bound: &Bound) -> Result<(SearchSpace, ObjectiveFn), CliError> {
    match bound {
        Bound::Eco(c) => {
            let schema = cfg.eco_schema()?;
            let c = c.clone();
            let decode_with = schema.clone();
            let f: ObjectiveFn = Box::new(move |g: &Genotype, seed| {
                let strategy = decode_eco(&decode_with, g).map_err(|e| e.to_string())?;
                eco::evaluate_strategy(&c, &strategy, seed).map_err(|e| e.to_string())
            });
            Ok((SearchSpace::Schema(schema), f))
        }
        Bound::Enterprise(c) => {
            let c = c.clone();
            let f: ObjectiveFn =
                Box::new(move |g: &Genotype, seed| enterprise::objective(&c, g, seed).map_err(|e| e.to_string()));
            Ok((enterprise::search_space(), f))
        }
    }
}

/// Champion on the first objective in the form participants accept.
fn champion_json(cfg: &LoadedConfig, bound: &Bound, outcome: &Outcome) -> Result<Option<String>, CliError> {
    let Some(best) = pick_best(outcome.hall_of_fame.entries(), 0, &bound.weights()) else {
        return Ok(None);
    };
    let text = match bound {
        Bound::Eco(_) => {
            let strategy: EcoStrategy = decode_eco(&cfg.eco_schema()?, &best.genotype)?;
            serde_json::to_string_pretty(&strategy)
        }
        Bound::Enterprise(_) => {
            serde_json::to_string_pretty(&enterprise::policy_from_genotype(&best.genotype).map_err(model_error)?)
        }
    };
    Ok(Some(text.expect("champion serializes")))
}

pub fn tune(g: &Global, path: &Path, args: TuneArgs) -> Result<(), CliError> {
    let cfg = config::load(path)?;
    let bound = cfg.bind()?;
    let seed = g.seed(&cfg);
    let t = &cfg.config.tune;
    let algo = args.algo.or(t.algo).unwrap_or(Algo::Nsga2);
    let pop = args.pop.or(t.pop).unwrap_or(20);
    let ngen = args.ngen.or(t.ngen).unwrap_or(5);

    let mut evo = EvolutionConfig::new(pop, ngen, seed);
    evo.cx_prob = t.cx_prob.unwrap_or(evo.cx_prob);
    evo.mut_prob = t.mut_prob.unwrap_or(evo.mut_prob);
    evo.sbx_eta = t.sbx_eta.unwrap_or(evo.sbx_eta);
    evo.pm_eta = t.pm_eta.unwrap_or(evo.pm_eta);
    evo.hof_cap = t.hof_cap.unwrap_or(evo.hof_cap);
    let es = EsConfig {
        mu: pop,
        lambda: t.lambda.unwrap_or(pop),
        generations: ngen,
        sigma0: t.sigma0.unwrap_or(0.1),
        seed,
        maximize: true,
    };
    match algo {
        Algo::Es if es.mu == 0 || es.lambda == 0 || es.generations == 0 || !(es.sigma0 > 0.0) => {
            return Err(CliError::config("ES needs positive pop, lambda, ngen and sigma0"));
        }
        Algo::Es => {}
        _ => evo.validate().map_err(CliError::config)?,
    }

    let (space, f) = objective(&cfg, &bound)?;
    let weights = bound.weights();
    // single-objective searches use the weighted sum, oriented like the first weight
    let sign = weights.as_slice()[0].signum();
    let w = weights.as_slice();
    let scalar = |g: &Genotype, s: u64| -> Result<f64, String> {
        let v = f(g, s)?;
        Ok(sign * v.iter().zip(w).map(|(a, b)| a * b).sum::<f64>())
    };

    let mut out = Outputs::create(&g.out)?;
    let result = match algo {
        Algo::Nsga2 => run_nsga2(&evo, &space, &f, &weights),
        Algo::Ga => run_simple_ga(&evo, &space, &scalar, sign > 0.0),
        Algo::Es => run_mu_plus_lambda_es(&EsConfig { maximize: sign > 0.0, ..es }, &space, &scalar).map(|o| o.outcome),
    };
    let settings = json!({
        "algo": format!("{algo:?}").to_lowercase(),
        "pop": pop,
        "ngen": ngen,
        "steps": bound.steps(),
    });
    let info = g.info("tune", &cfg, seed, settings);
    match result {
        Ok(outcome) => {
            out.write("logbook.jsonl", outcome.logbook.to_jsonl())?;
            out.write("hof.json", outcome.hall_of_fame.to_json())?;
            if let Some(champion) = champion_json(&cfg, &bound, &outcome)? {
                out.write("champion.json", champion)?;
            }
            out.finish("tune", info, true)?;
            g.say(format!(
                "tune: {} generations, {} archive entries -> {}",
                outcome.logbook.len(),
                outcome.hall_of_fame.len(),
                g.out.display()
            ));
            Ok(())
        }
        Err(e) => persist_failure(out, info, e),
    }
}

/// Keep the logbook recorded before an evaluation failure.
pub fn persist_failure(mut out: Outputs, info: ManifestInfo, err: EvolutionError) -> Result<(), CliError> {
    match err {
        EvolutionError::Evaluation { ref partial, .. } => {
            out.write("logbook.jsonl", partial.to_jsonl())?;
            out.finish("tune", info, false)?;
            Err(CliError::runtime(err))
        }
        EvolutionError::InvalidConfig(_) | EvolutionError::LengthMismatch { .. } => Err(CliError::config(err)),
        EvolutionError::MissingFitness(_) => Err(CliError::runtime(err)),
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MatchArgs {
    pub episodes: Option<usize>,
    pub steps: Option<u64>,
}

fn participants(cfg: &LoadedConfig, bound: &Bound) -> Result<Vec<Participant>, CliError> {
    let specs = &cfg.config.tournament.participants;
    if specs.is_empty() {
        return Err(CliError::config("tournament.participants is empty"));
    }
    let mut names: Vec<&str> = specs.iter().map(|p| p.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::config(format!("duplicate participant name {:?}", w[0])));
    }
    specs
        .iter()
        .map(|p| match bound {
            Bound::Eco(c) => Ok(eco::participant(&p.name, c, cfg.eco_strategy(p)?)),
            Bound::Enterprise(c) => Ok(enterprise::participant(&p.name, c, cfg.enterprise_policy(p)?)),
        })
        .collect()
}

/// `arena` plays one scenario, `tournament` the whole grid.
pub fn tournament(g: &Global, path: &Path, args: MatchArgs, arena: bool) -> Result<(), CliError> {
    let command = if arena { "arena" } else { "tournament" };
    let cfg = config::load(path)?;
    let bound = cfg.bind()?;
    let seed = g.seed(&cfg);
    let t = &cfg.config.tournament;
    let players = participants(&cfg, &bound)?;

    let grid = if arena {
        t.scenario
            .iter()
            .flatten()
            .fold(ScenarioGrid::new(), |grid, (k, v)| grid.axis(k, vec![v.clone()]))
    } else {
        t.grid.clone().unwrap_or_else(|| match bound {
            Bound::Eco(_) => eco::default_grid(),
            Bound::Enterprise(_) => enterprise::default_grid(),
        })
    };
    let scenarios = expand_grid(&grid).map_err(CliError::config)?;
    for s in &scenarios {
        match &bound {
            Bound::Eco(c) => c.with_scenario(s).map(drop),
            Bound::Enterprise(c) => c.with_scenario(s).map(drop),
        }
        .map_err(|e| CliError::config(format!("scenario {}: {e}", s.name)))?;
    }
    let score = t.score.clone().unwrap_or_else(|| match bound {
        Bound::Eco(_) => eco::default_score(),
        Bound::Enterprise(_) => enterprise::default_score(),
    });
    let episodes = args.episodes.or(t.episodes).unwrap_or(4);
    let steps = args.steps.or(t.steps).unwrap_or(bound.steps());
    if episodes == 0 || steps == 0 {
        return Err(CliError::config("episodes and steps must be positive"));
    }

    let result = run_tournament(&grid, &players, &score, t.rules, episodes, steps, seed).map_err(|e| match e {
        TournamentError::Matches(_) => CliError::runtime(e),
        _ => CliError::config(e),
    })?;

    let mut out = Outputs::create(&g.out)?;
    out.write("scores.csv", result.scores_csv())?;
    out.write("tournament.json", result.to_json())?;
    if let (Bound::Enterprise(_), Some(report)) = (&bound, &t.report) {
        let rows = enterprise::panel_report(&result, &grid, &report.reference, &report.champion).map_err(model_error)?;
        out.write("report.csv", enterprise::panel_csv(&rows))?;
    }
    let settings = json!({
        "episodes": episodes,
        "steps": steps,
        "scenarios": result.scenarios.len(),
        "participants": result.participants,
    });
    let info = g.info(command, &cfg, seed, settings);
    out.finish(command, info, true)?;
    g.say(format!(
        "{command}: {} scenarios x {} participants x {episodes} episodes, winner {} -> {}",
        result.scenarios.len(),
        result.participants.len(),
        result.overall_winner,
        g.out.display()
    ));
    Ok(())
}

pub fn viz(g: &Global, artifact: &Path, kind: VizKind) -> Result<(), CliError> {
    let raw = fs::read(artifact).map_err(|e| CliError::config(format!("cannot read {}: {e}", artifact.display())))?;
    let text = String::from_utf8(raw)
        .map_err(|_| CliError::config(format!("{} is not UTF-8 text", artifact.display())))?;
    let svg = viz::render(kind, &text)
        .map_err(|e| CliError::config(format!("{} is not a {} artifact: {e}", artifact.display(), kind.name())))?;
    let mut out = Outputs::create(&g.out)?;
    out.write(&format!("{}.svg", kind.name()), svg)?;
    let info = ManifestInfo {
        command: "viz".into(),
        args: g.args.clone(),
        config: artifact.display().to_string(),
        config_digest: hex::encode(Sha256::digest(text.as_bytes())),
        seed: g.seed.unwrap_or(0),
        settings: json!({ "kind": kind.name() }),
    };
    out.finish(&format!("viz-{}", kind.name()), info, true)?;
    g.say(format!("viz: {} -> {}", kind.name(), g.out.display()));
    Ok(())
}

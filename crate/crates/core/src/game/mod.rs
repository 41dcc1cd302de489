//! Scenario grids, paired matches and voting.

mod grid;
mod voting;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grid::{expand_grid, GridAxis, Scenario, ScenarioGrid};
pub use voting::{vote_argmax, vote_condorcet, vote_majority, CondorcetOutcome};

use crate::kernel::{run_episode, Context, ContextKey, KernelError, LayeredModel, StepReduce};
use crate::rng::rng_substream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TournamentError {
    #[error("scenario axis {0:?} has no values")]
    EmptyAxis(String),
    #[error("invalid tournament setup: {0}")]
    InvalidSetup(String),
    #[error("{} match(es) failed; first: {}", .0.len(), .0[0])]
    Matches(Vec<MatchFailure>),
}

#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
#[error("scenario {scenario:?}, participant {participant:?}, episode {episode}: {message}")]
pub struct MatchFailure {
    pub scenario: String,
    pub participant: String,
    pub episode: usize,
    pub message: String,
}

/// A model and its initial context, built for one scenario and episode seed.
pub struct ModelInstance {
    pub model: LayeredModel,
    pub init: Context,
}

pub type ModelFactory = dyn Fn(&Scenario, u64) -> Result<ModelInstance, String> + Send + Sync;

/// A named model constructor. The factory must be pure in its arguments.
#[derive(Clone)]
pub struct Participant {
    pub name: String,
    factory: Arc<ModelFactory>,
}

impl Participant {
    pub fn new<F>(name: impl Into<String>, factory: F) -> Self
    where
        F: Fn(&Scenario, u64) -> Result<ModelInstance, String> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            factory: Arc::new(factory),
        }
    }

    pub fn build(&self, scenario: &Scenario, seed: u64) -> Result<ModelInstance, String> {
        (self.factory)(scenario, seed)
    }
}

impl std::fmt::Debug for Participant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Participant").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreSpec {
    pub metric: ContextKey,
    #[serde(default = "default_reduce")]
    pub reduce: StepReduce,
}

fn default_reduce() -> StepReduce {
    StepReduce::Mean
}

impl ScoreSpec {
    pub fn new(metric: ContextKey, reduce: StepReduce) -> Self {
        Self { metric, reduce }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverallRule {
    /// Most scenario wins, ties by total score then name.
    #[default]
    Majority,
    /// Pairwise majority over scenario means with Copeland fallback.
    Condorcet,
}

/// Episodes are always decided by argmax and scenarios by majority; the
/// overall rule is configurable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRules {
    #[serde(default)]
    pub overall: OverallRule,
}

/// Seed shared by every participant in episode `episode` of `scenario`.
pub fn episode_seed(base_seed: u64, scenario: &str, episode: usize) -> u64 {
    rng_substream(base_seed, &format!("{scenario}#{episode}")).next_seed()
}

fn score_episode(
    participant: &Participant,
    scenario: &Scenario,
    score: &ScoreSpec,
    seed: u64,
    steps: u64,
) -> Result<f64, String> {
    let inst = participant.build(scenario, seed)?;
    if !inst.model.metric_keys().contains(&score.metric) {
        return Err(format!("model emits no metric {}", score.metric));
    }
    let trace = run_episode(&inst.model, &inst.init, seed, steps).map_err(|e: KernelError| e.to_string())?;
    let series = trace
        .series(&score.metric)
        .ok_or_else(|| format!("metric {} missing from trace", score.metric))?;
    Ok(score.reduce.apply(&series))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub scenario: String,
    pub participant: String,
    pub episode: usize,
    pub score: f64,
}

/// Scores of every participant in every episode of one scenario, ordered by
/// participant then episode.
pub fn play_match(
    scenario: &Scenario,
    participants: &[Participant],
    score: &ScoreSpec,
    episodes: usize,
    steps: u64,
    base_seed: u64,
) -> Result<Vec<ScoreRow>, TournamentError> {
    if episodes == 0 {
        return Err(TournamentError::InvalidSetup("episodes must be at least 1".into()));
    }
    let cells: Vec<(&Participant, usize)> = participants
        .iter()
        .flat_map(|p| (0..episodes).map(move |e| (p, e)))
        .collect();
    collect_cells(cells.into_par_iter().map(|(p, e)| {
        let seed = episode_seed(base_seed, &scenario.name, e);
        (scenario, p, e, score_episode(p, scenario, score, seed, steps))
    }))
}

fn collect_cells<'a, I>(cells: I) -> Result<Vec<ScoreRow>, TournamentError>
where
    I: IndexedParallelIterator<Item = (&'a Scenario, &'a Participant, usize, Result<f64, String>)>,
{
    let results: Vec<_> = cells.collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (scenario, p, episode, r) in results {
        match r {
            Ok(score) => rows.push(ScoreRow {
                scenario: scenario.name.clone(),
                participant: p.name.clone(),
                episode,
                score,
            }),
            Err(message) => failures.push(MatchFailure {
                scenario: scenario.name.clone(),
                participant: p.name.clone(),
                episode,
                message,
            }),
        }
    }
    if failures.is_empty() {
        Ok(rows)
    } else {
        Err(TournamentError::Matches(failures))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeWinner {
    pub scenario: String,
    pub episode: usize,
    pub winner: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioWinner {
    pub scenario: String,
    pub winner: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub scenario: String,
    pub episode: usize,
    pub seed: u64,
}

/// Everything a tournament produced. Scenarios keep grid order; participants
/// are sorted by name so results do not depend on registration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentResult {
    pub scenarios: Vec<String>,
    pub participants: Vec<String>,
    pub episodes: usize,
    pub steps: u64,
    pub base_seed: u64,
    pub score: ScoreSpec,
    pub rules: VoteRules,
    pub scores: Vec<ScoreRow>,
    pub episode_winners: Vec<EpisodeWinner>,
    pub scenario_winners: Vec<ScenarioWinner>,
    pub overall_winner: String,
    /// Set when the Condorcet rule found a cycle and Copeland decided.
    #[serde(default)]
    pub condorcet_fallback: bool,
    pub seeds: Vec<SeedRow>,
}

impl TournamentResult {
    pub fn score(&self, scenario: &str, participant: &str, episode: usize) -> Option<f64> {
        self.scores
            .iter()
            .find(|r| r.scenario == scenario && r.participant == participant && r.episode == episode)
            .map(|r| r.score)
    }

    /// Mean episode score per scenario and participant.
    pub fn mean_table(&self) -> BTreeMap<String, BTreeMap<String, f64>> {
        let mut sums: BTreeMap<String, BTreeMap<String, (f64, usize)>> = BTreeMap::new();
        for r in &self.scores {
            let cell = sums
                .entry(r.scenario.clone())
                .or_default()
                .entry(r.participant.clone())
                .or_insert((0.0, 0));
            cell.0 += r.score;
            cell.1 += 1;
        }
        sums.into_iter()
            .map(|(s, row)| (s, row.into_iter().map(|(p, (t, n))| (p, t / n as f64)).collect()))
            .collect()
    }

    pub fn scores_csv(&self) -> String {
        let mut out = String::from("scenario,participant,episode,score\n");
        for r in &self.scores {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&r.scenario),
                csv_field(&r.participant),
                r.episode,
                r.score
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn from_json(raw: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(raw)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Expand the grid, play every (scenario, participant, episode) cell in
/// parallel, then vote per episode, per scenario and overall.
pub fn run_tournament(
    grid: &ScenarioGrid,
    participants: &[Participant],
    score: &ScoreSpec,
    rules: VoteRules,
    episodes: usize,
    steps: u64,
    seed: u64,
) -> Result<TournamentResult, TournamentError> {
    if participants.is_empty() {
        return Err(TournamentError::InvalidSetup("no participants".into()));
    }
    if episodes == 0 || steps == 0 {
        return Err(TournamentError::InvalidSetup("episodes and steps must be at least 1".into()));
    }
    let mut sorted: Vec<&Participant> = participants.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let names: Vec<String> = sorted.iter().map(|p| p.name.clone()).collect();
    if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
        return Err(TournamentError::InvalidSetup("participant names must be unique".into()));
    }
    let scenarios = expand_grid(grid)?;

    let cells: Vec<(&Scenario, &Participant, usize)> = scenarios
        .iter()
        .flat_map(|s| sorted.iter().flat_map(move |&p| (0..episodes).map(move |e| (s, p, e))))
        .collect();
    let scores = collect_cells(cells.into_par_iter().map(|(s, p, e)| {
        let seed = episode_seed(seed, &s.name, e);
        (s, p, e, score_episode(p, s, score, seed, steps))
    }))?;

    let mut seeds = Vec::new();
    let mut episode_winners = Vec::new();
    let mut scenario_winners = Vec::new();
    let mut overall_totals: BTreeMap<String, f64> = BTreeMap::new();
    for s in &scenarios {
        let rows: Vec<&ScoreRow> = scores.iter().filter(|r| r.scenario == s.name).collect();
        let mut totals: BTreeMap<String, f64> = BTreeMap::new();
        for r in &rows {
            *totals.entry(r.participant.clone()).or_default() += r.score;
            *overall_totals.entry(r.participant.clone()).or_default() += r.score;
        }
        let mut winners = Vec::with_capacity(episodes);
        for e in 0..episodes {
            seeds.push(SeedRow {
                scenario: s.name.clone(),
                episode: e,
                seed: episode_seed(seed, &s.name, e),
            });
            let w = vote_argmax(
                rows.iter()
                    .filter(|r| r.episode == e)
                    .map(|r| (r.participant.as_str(), r.score)),
            )
            .expect("at least one participant");
            episode_winners.push(EpisodeWinner {
                scenario: s.name.clone(),
                episode: e,
                winner: w.clone(),
            });
            winners.push(w);
        }
        scenario_winners.push(ScenarioWinner {
            scenario: s.name.clone(),
            winner: vote_majority(&winners, &totals).expect("at least one episode"),
        });
    }

    let mut result = TournamentResult {
        scenarios: scenarios.iter().map(|s| s.name.clone()).collect(),
        participants: names,
        episodes,
        steps,
        base_seed: seed,
        score: score.clone(),
        rules,
        scores,
        episode_winners,
        scenario_winners,
        overall_winner: String::new(),
        condorcet_fallback: false,
        seeds,
    };
    match rules.overall {
        OverallRule::Majority => {
            let winners: Vec<String> = result.scenario_winners.iter().map(|w| w.winner.clone()).collect();
            result.overall_winner = vote_majority(&winners, &overall_totals).expect("at least one scenario");
        }
        OverallRule::Condorcet => {
            let out = vote_condorcet(&result.mean_table()).expect("at least one participant");
            result.overall_winner = out.winner;
            result.condorcet_fallback = out.fallback;
        }
    }
    Ok(result)
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::context::ContextKey;

/// Reduction of a per-step series to one number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepReduce {
    Mean,
    Sum,
    Last,
    Min,
    Max,
}

impl StepReduce {
    /// Empty series reduce to 0.
    pub fn apply(self, series: &[f64]) -> f64 {
        if series.is_empty() {
            return 0.0;
        }
        match self {
            StepReduce::Mean => series.iter().sum::<f64>() / series.len() as f64,
            StepReduce::Sum => series.iter().sum(),
            StepReduce::Last => series[series.len() - 1],
            StepReduce::Min => series.iter().copied().fold(f64::INFINITY, f64::min),
            StepReduce::Max => series.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Everything recorded during one episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub seed: u64,
    pub steps: u64,
    /// Tick of the first recorded step.
    pub start_tick: u64,
    pub per_step: Vec<BTreeMap<ContextKey, f64>>,
    pub episode_metrics: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    steps: u64,
    metrics: &'a BTreeMap<String, f64>,
}

impl EpisodeTrace {
    /// Per-step series of one metric.
    pub fn series(&self, key: &ContextKey) -> Option<Vec<f64>> {
        self.per_step.iter().map(|row| row.get(key).copied()).collect()
    }

    /// Long-format CSV `tick,key,value`, rows ordered by tick then key.
    /// Values use Rust's shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tick,key,value\n");
        for (i, row) in self.per_step.iter().enumerate() {
            let tick = self.start_tick + i as u64;
            for (key, value) in row {
                writeln!(out, "{tick},{key},{value}").expect("writing to a String");
            }
        }
        out
    }

    /// `{seed, steps, metrics}` episode summary.
    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&Summary {
            seed: self.seed,
            steps: self.steps,
            metrics: &self.episode_metrics,
        })
        .expect("summary is always serializable")
    }
}

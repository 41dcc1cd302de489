use serde::{Deserialize, Serialize};

use super::sorting::{crowding_distance, dominates_unchecked};
use super::{FitnessWeights, Individual};
use crate::schemas::Genotype;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HofEntry {
    pub genotype: Genotype,
    pub fitness: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HofMode {
    /// Keep the `k` best scalar fitnesses.
    Best { k: usize, maximize: bool },
    /// Keep a mutually non-dominated archive of at most `cap` entries.
    Pareto { cap: usize, weights: FitnessWeights },
}

/// All-time archive of the best individuals seen during a run.
#[derive(Clone, Debug, PartialEq)]
pub struct HallOfFame {
    mode: HofMode,
    entries: Vec<HofEntry>,
}

pub const DEFAULT_HOF_CAP: usize = 64;
pub const DEFAULT_HOF_BEST: usize = 10;

impl HallOfFame {
    pub fn pareto(weights: FitnessWeights, cap: usize) -> Self {
        Self {
            mode: HofMode::Pareto { cap: cap.max(1), weights },
            entries: Vec::new(),
        }
    }

    pub fn best(k: usize, maximize: bool) -> Self {
        Self {
            mode: HofMode::Best { k: k.max(1), maximize },
            entries: Vec::new(),
        }
    }

    pub fn mode(&self) -> &HofMode {
        &self.mode
    }

    pub fn entries(&self) -> &[HofEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Offer evaluated individuals to the archive. Unevaluated ones are ignored.
    pub fn update(&mut self, candidates: &[Individual]) {
        let evaluated = candidates.iter().filter_map(|c| {
            c.fitness.as_ref().map(|f| HofEntry {
                genotype: c.genotype.clone(),
                fitness: f.clone(),
            })
        });
        match self.mode.clone() {
            HofMode::Best { k, maximize } => {
                self.entries.extend(evaluated);
                let better = |a: &HofEntry, b: &HofEntry| {
                    let ord = a.fitness[0].total_cmp(&b.fitness[0]);
                    if maximize {
                        ord.reverse()
                    } else {
                        ord
                    }
                };
                self.entries.sort_by(better);
                self.entries.truncate(k);
            }
            HofMode::Pareto { cap, weights } => {
                for cand in evaluated {
                    let rejected = self.entries.iter().any(|e| {
                        e.fitness == cand.fitness || dominates_unchecked(&e.fitness, &cand.fitness, &weights)
                    });
                    if rejected {
                        continue;
                    }
                    self.entries
                        .retain(|e| !dominates_unchecked(&cand.fitness, &e.fitness, &weights));
                    self.entries.push(cand);
                }
                self.truncate_by_crowding(cap, &weights);
                self.entries.sort_by(|a, b| {
                    a.fitness
                        .iter()
                        .zip(&b.fitness)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            }
        }
    }

    fn truncate_by_crowding(&mut self, cap: usize, weights: &FitnessWeights) {
        while self.entries.len() > cap {
            let pop: Vec<Individual> = self
                .entries
                .iter()
                .map(|e| Individual::evaluated(e.genotype.clone(), e.fitness.clone()))
                .collect();
            let front: Vec<usize> = (0..pop.len()).collect();
            let dist = crowding_distance(&pop, &front, weights).expect("archive fitnesses are complete");
            // most crowded member goes; ties drop the later entry
            let (victim, _) = dist
                .iter()
                .enumerate()
                .min_by(|(i, a), (j, b)| a.total_cmp(b).then(j.cmp(i)))
                .expect("archive is non-empty");
            self.entries.remove(victim);
        }
    }

    /// Best raw value per objective over the archive (signed by the weights).
    pub fn best_per_objective(&self) -> Vec<f64> {
        let Some(first) = self.entries.first() else {
            return Vec::new();
        };
        let signs: Vec<f64> = match &self.mode {
            HofMode::Pareto { weights, .. } => weights.as_slice().iter().map(|w| w.signum()).collect(),
            HofMode::Best { maximize, .. } => vec![if *maximize { 1.0 } else { -1.0 }],
        };
        (0..first.fitness.len())
            .map(|obj| {
                let s = signs[obj];
                self.entries
                    .iter()
                    .map(|e| e.fitness[obj])
                    .fold(None, |best: Option<f64>, v| match best {
                        Some(b) if s * b >= s * v => Some(b),
                        _ => Some(v),
                    })
                    .expect("non-empty archive")
            })
            .collect()
    }

    /// HallOfFame JSON: list of `{"genotype": [...], "fitness": [...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("entries serialize")
    }

    pub fn entries_from_json(raw: &str) -> Result<Vec<HofEntry>, serde_json::Error> {
        serde_json::from_str(raw)
    }
}

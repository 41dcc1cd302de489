//! Evolutionary search over unit-box genotypes.
//!
//! Models are evaluated as pure functionals: an [`Objective`] receives a
//! genotype and a per-evaluation seed derived from `(run seed, generation,
//! index)`, so evaluations can run in parallel and still reproduce exactly.

mod algorithms;
mod hof;
mod logbook;
mod operators;
mod sorting;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use algorithms::{run_mu_plus_lambda_es, run_nsga2, run_simple_ga, EsConfig, EsOutcome, Outcome};
pub use hof::{HallOfFame, HofEntry, HofMode, DEFAULT_HOF_BEST, DEFAULT_HOF_CAP};
pub use logbook::{LogRow, Logbook, ObjStats};
pub use operators::{polynomial_mutation, sbx_crossover};
pub use sorting::{crowding_distance, dominates, fast_nondominated_sort, nsga2_select, nsga2_select_indices};

use crate::rng::rng_substream;
use crate::schemas::{Genotype, Schema};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("individual {0} has no fitness")]
    MissingFitness(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("evaluation of individual {index} in generation {generation} failed: {cause}")]
    Evaluation {
        generation: usize,
        index: usize,
        cause: String,
        /// Rows recorded before the failure.
        partial: Box<Logbook>,
    },
}

/// Objective signs: positive maximizes, negative minimizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FitnessWeights(Vec<f64>);

impl FitnessWeights {
    pub fn new(w: Vec<f64>) -> Result<Self, EvolutionError> {
        if w.is_empty() || w.iter().any(|x| *x == 0.0 || !x.is_finite()) {
            return Err(EvolutionError::InvalidConfig(format!(
                "fitness weights must be non-empty, finite and non-zero: {w:?}"
            )));
        }
        Ok(Self(w))
    }

    pub fn minimize(n: usize) -> Self {
        Self(vec![-1.0; n])
    }

    pub fn maximize(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FitnessWeights {
    type Error = EvolutionError;

    fn try_from(w: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(w)
    }
}

impl From<FitnessWeights> for Vec<f64> {
    fn from(w: FitnessWeights) -> Self {
        w.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub fitness: Option<Vec<f64>>,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
}

impl Individual {
    pub fn new(genotype: Genotype) -> Self {
        Self {
            genotype,
            fitness: None,
            rank: None,
            crowding: None,
        }
    }

    pub fn evaluated(genotype: Genotype, fitness: Vec<f64>) -> Self {
        Self {
            genotype,
            fitness: Some(fitness),
            rank: None,
            crowding: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub pop_size: usize,
    pub generations: usize,
    #[serde(default = "defaults::cx_prob")]
    pub cx_prob: f64,
    #[serde(default = "defaults::mut_prob")]
    pub mut_prob: f64,
    #[serde(default = "defaults::sbx_eta")]
    pub sbx_eta: f64,
    #[serde(default = "defaults::pm_eta")]
    pub pm_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / n_genes`.
    #[serde(default)]
    pub per_gene_prob: Option<f64>,
    #[serde(default = "defaults::hof_cap")]
    pub hof_cap: usize,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn cx_prob() -> f64 {
        0.9
    }
    pub fn mut_prob() -> f64 {
        1.0
    }
    pub fn sbx_eta() -> f64 {
        15.0
    }
    pub fn pm_eta() -> f64 {
        20.0
    }
    pub fn hof_cap() -> usize {
        super::DEFAULT_HOF_CAP
    }
}

impl EvolutionConfig {
    pub fn new(pop_size: usize, generations: usize, seed: u64) -> Self {
        Self {
            pop_size,
            generations,
            cx_prob: defaults::cx_prob(),
            mut_prob: defaults::mut_prob(),
            sbx_eta: defaults::sbx_eta(),
            pm_eta: defaults::pm_eta(),
            per_gene_prob: None,
            hof_cap: DEFAULT_HOF_CAP,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |msg: String| Err(EvolutionError::InvalidConfig(msg));
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return bad(format!("pop_size must be even and at least 2, got {}", self.pop_size));
        }
        if self.generations == 0 {
            return bad("generations must be positive".into());
        }
        for (name, p) in [("cx_prob", self.cx_prob), ("mut_prob", self.mut_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if let Some(p) = self.per_gene_prob {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("per_gene_prob must lie in [0, 1], got {p}"));
            }
        }
        if !(self.sbx_eta > 0.0 && self.pm_eta > 0.0) {
            return bad("distribution indices must be positive".into());
        }
        Ok(())
    }
}

/// What is being searched. Flat parameter vectors are stored in the unit box
/// like every other genotype and mapped linearly onto `[-bound, bound]`.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchSpace {
    Schema(Schema),
    Flat { len: usize, bound: f64 },
}

impl SearchSpace {
    pub fn dim(&self) -> usize {
        match self {
            SearchSpace::Schema(s) => s.len(),
            SearchSpace::Flat { len, .. } => *len,
        }
    }

    /// Real-valued parameters for a flat space.
    pub fn flat_params(bound: f64, g: &Genotype) -> Vec<f64> {
        g.0.iter().map(|&u| -bound + 2.0 * bound * u.clamp(0.0, 1.0)).collect()
    }

    /// Inverse of [`SearchSpace::flat_params`].
    pub fn flat_genotype(bound: f64, params: &[f64]) -> Genotype {
        Genotype(params.iter().map(|&p| ((p + bound) / (2.0 * bound)).clamp(0.0, 1.0)).collect())
    }
}

/// A model run seen as a function of the genotype.
pub trait Objective: Sync {
    fn evaluate(&self, genotype: &Genotype, seed: u64) -> Result<Vec<f64>, String>;
}

impl<F> Objective for F
where
    F: Fn(&Genotype, u64) -> Result<Vec<f64>, String> + Sync,
{
    fn evaluate(&self, genotype: &Genotype, seed: u64) -> Result<Vec<f64>, String> {
        self(genotype, seed)
    }
}

/// Seed handed to the evaluation of individual `index` in `generation`.
pub fn evaluation_seed(run_seed: u64, generation: usize, index: usize) -> u64 {
    rng_substream(run_seed, &format!("eval/{generation}/{index}")).next_seed()
}

/// Evaluate a batch in parallel; results are merged by index.
pub(crate) fn evaluate_batch<O: Objective + ?Sized>(
    objective: &O,
    genotypes: &[Genotype],
    n_obj: usize,
    run_seed: u64,
    generation: usize,
) -> Result<Vec<Vec<f64>>, (usize, String)> {
    let results: Vec<Result<Vec<f64>, String>> = genotypes
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let fit = objective.evaluate(g, evaluation_seed(run_seed, generation, i))?;
            if fit.len() != n_obj {
                return Err(format!("expected {n_obj} objectives, got {}", fit.len()));
            }
            if fit.iter().any(|x| !x.is_finite()) {
                return Err(format!("non-finite fitness {fit:?}"));
            }
            Ok(fit)
        })
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| (i, e)))
        .collect()
}

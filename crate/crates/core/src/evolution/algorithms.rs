use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::hof::{HallOfFame, DEFAULT_HOF_BEST};
use super::logbook::Logbook;
use super::operators::{polynomial_mutation, sbx_crossover};
use super::sorting::{assign_crowding, crowded_cmp, fast_nondominated_sort, nsga2_select};
use super::{evaluate_batch, EvolutionConfig, EvolutionError, FitnessWeights, Individual, Objective, SearchSpace};
use crate::rng::{rng_substream, RngHandle};
use crate::schemas::{repair, Genotype};

/// Final state of a run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub hall_of_fame: HallOfFame,
    pub logbook: Logbook,
    pub population: Vec<Individual>,
}

fn initial_genotypes(seed: u64, count: usize, dim: usize) -> Vec<Genotype> {
    let mut rng = rng_substream(seed, "init");
    (0..count)
        .map(|_| Genotype((0..dim).map(|_| rng.uniform()).collect()))
        .collect()
}

fn evaluate<O: Objective + ?Sized>(
    objective: &O,
    genotypes: Vec<Genotype>,
    n_obj: usize,
    seed: u64,
    generation: usize,
    logbook: &Logbook,
) -> Result<Vec<Individual>, EvolutionError> {
    let fits = evaluate_batch(objective, &genotypes, n_obj, seed, generation).map_err(|(index, cause)| {
        EvolutionError::Evaluation {
            generation,
            index,
            cause,
            partial: Box::new(logbook.clone()),
        }
    })?;
    Ok(genotypes
        .into_iter()
        .zip(fits)
        .map(|(g, f)| Individual::evaluated(g, f))
        .collect())
}

/// Pairwise SBX with probability `cx_prob`, then polynomial mutation of each
/// child with probability `mut_prob`.
fn vary(parents: &[&Genotype], config: &EvolutionConfig, per_gene: f64, rng: &mut RngHandle) -> Vec<Genotype> {
    let mut children = Vec::with_capacity(parents.len());
    for pair in parents.chunks(2) {
        let (a, b) = match pair {
            [a, b] => {
                if rng.chance(config.cx_prob) {
                    sbx_crossover(a, b, config.sbx_eta, rng).expect("parents share the space dimension")
                } else {
                    ((*a).clone(), (*b).clone())
                }
            }
            [a] => ((*a).clone(), (*a).clone()),
            _ => unreachable!(),
        };
        children.push(a);
        if children.len() < parents.len() {
            children.push(b);
        }
    }
    children
        .into_iter()
        .map(|c| {
            if rng.chance(config.mut_prob) {
                polynomial_mutation(&c, config.pm_eta, per_gene, rng)
            } else {
                c
            }
        })
        .collect()
}

fn per_gene_prob(config: &EvolutionConfig, dim: usize) -> f64 {
    config
        .per_gene_prob
        .unwrap_or(if dim == 0 { 0.0 } else { 1.0 / dim as f64 })
}

/// Generational NSGA-II with binary crowded tournaments, SBX and polynomial
/// mutation. The hall of fame archives every non-dominated point seen.
pub fn run_nsga2<O: Objective + ?Sized>(
    config: &EvolutionConfig,
    space: &SearchSpace,
    objective: &O,
    weights: &FitnessWeights,
) -> Result<Outcome, EvolutionError> {
    config.validate()?;
    let dim = space.dim();
    let n_obj = weights.len();
    let mu = config.pop_size;
    let per_gene = per_gene_prob(config, dim);
    let mut logbook = Logbook::default();
    let mut hof = HallOfFame::pareto(weights.clone(), config.hof_cap);

    let mut pop = evaluate(objective, initial_genotypes(config.seed, mu, dim), n_obj, config.seed, 0, &logbook)?;
    let fronts = fast_nondominated_sort(&mut pop, weights)?;
    assign_crowding(&mut pop, &fronts, weights)?;
    hof.update(&pop);
    logbook.record(0, mu, &pop, hof.best_per_objective());

    for gen in 1..=config.generations {
        let mut rng = rng_substream(config.seed, &format!("variation/{gen}"));
        let parents: Vec<&Genotype> = (0..mu)
            .map(|_| {
                let (a, b) = (rng.index(mu), rng.index(mu));
                let winner = if crowded_cmp(&pop, a, b) == Ordering::Greater { b } else { a };
                &pop[winner].genotype
            })
            .collect();
        let children = vary(&parents, config, per_gene, &mut rng);
        let offspring = evaluate(objective, children, n_obj, config.seed, gen, &logbook)?;
        hof.update(&offspring);

        let mut combined = pop;
        combined.extend(offspring);
        pop = nsga2_select(&combined, mu, weights)?;
        logbook.record(gen, mu, &pop, hof.best_per_objective());
    }

    Ok(Outcome {
        hall_of_fame: hof,
        logbook,
        population: pop,
    })
}

fn scalar_cmp(a: f64, b: f64, maximize: bool) -> Ordering {
    // Less means "better"
    if maximize {
        b.total_cmp(&a)
    } else {
        a.total_cmp(&b)
    }
}

fn scalar(ind: &Individual) -> f64 {
    ind.fitness.as_ref().expect("evaluated")[0]
}

/// Generational GA on a scalar objective with binary tournaments, SBX,
/// polynomial mutation and an elite of one.
pub fn run_simple_ga<F>(config: &EvolutionConfig, space: &SearchSpace, f: &F, maximize: bool) -> Result<Outcome, EvolutionError>
where
    F: Fn(&Genotype, u64) -> Result<f64, String> + Sync,
{
    config.validate()?;
    let objective = |g: &Genotype, seed: u64| f(g, seed).map(|x| vec![x]);
    let dim = space.dim();
    let mu = config.pop_size;
    let per_gene = per_gene_prob(config, dim);
    let mut logbook = Logbook::default();
    let mut hof = HallOfFame::best(DEFAULT_HOF_BEST, maximize);

    let mut pop = evaluate(&objective, initial_genotypes(config.seed, mu, dim), 1, config.seed, 0, &logbook)?;
    hof.update(&pop);
    logbook.record(0, mu, &pop, hof.best_per_objective());

    let best_index = |pop: &[Individual]| {
        (0..pop.len())
            .min_by(|&a, &b| scalar_cmp(scalar(&pop[a]), scalar(&pop[b]), maximize).then(a.cmp(&b)))
            .expect("non-empty population")
    };

    for gen in 1..=config.generations {
        let mut rng = rng_substream(config.seed, &format!("variation/{gen}"));
        let parents: Vec<&Genotype> = (0..mu)
            .map(|_| {
                let (a, b) = (rng.index(mu), rng.index(mu));
                let a_wins = scalar_cmp(scalar(&pop[a]), scalar(&pop[b]), maximize).then(a.cmp(&b)) != Ordering::Greater;
                &pop[if a_wins { a } else { b }].genotype
            })
            .collect();
        let children = vary(&parents, config, per_gene, &mut rng);
        let mut offspring = evaluate(&objective, children, 1, config.seed, gen, &logbook)?;
        hof.update(&offspring);

        let elite = pop[best_index(&pop)].clone();
        let worst = (0..offspring.len())
            .max_by(|&a, &b| scalar_cmp(scalar(&offspring[a]), scalar(&offspring[b]), maximize).then(b.cmp(&a)))
            .expect("non-empty offspring");
        offspring[worst] = elite;
        pop = offspring;
        logbook.record(gen, mu, &pop, hof.best_per_objective());
    }

    Ok(Outcome {
        hall_of_fame: hof,
        logbook,
        population: pop,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsConfig {
    pub mu: usize,
    pub lambda: usize,
    pub generations: usize,
    pub sigma0: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub maximize: bool,
}

fn default_true() -> bool {
    true
}

pub const SIGMA_FLOOR: f64 = 1e-12;
const ONE_FIFTH_FACTOR: f64 = 0.817;

#[derive(Clone, Debug)]
pub struct EsOutcome {
    pub outcome: Outcome,
    /// Step size after each generation, starting with `sigma0`.
    pub sigmas: Vec<f64>,
}

/// (mu + lambda) evolution strategy with isotropic Gaussian steps and the
/// one-fifth success rule.
pub fn run_mu_plus_lambda_es<F>(config: &EsConfig, space: &SearchSpace, f: &F) -> Result<EsOutcome, EvolutionError>
where
    F: Fn(&Genotype, u64) -> Result<f64, String> + Sync,
{
    if config.mu == 0 || config.lambda == 0 || config.generations == 0 {
        return Err(EvolutionError::InvalidConfig("mu, lambda and generations must be positive".into()));
    }
    if !(config.sigma0 > 0.0 && config.sigma0.is_finite()) {
        return Err(EvolutionError::InvalidConfig(format!("sigma0 must be positive, got {}", config.sigma0)));
    }
    let maximize = config.maximize;
    let objective = |g: &Genotype, seed: u64| f(g, seed).map(|x| vec![x]);
    let dim = space.dim();
    let mut logbook = Logbook::default();
    let mut hof = HallOfFame::best(DEFAULT_HOF_BEST, maximize);

    let mut pop = evaluate(&objective, initial_genotypes(config.seed, config.mu, dim), 1, config.seed, 0, &logbook)?;
    hof.update(&pop);
    logbook.record(0, config.mu, &pop, hof.best_per_objective());
    let mut sigma = config.sigma0;
    let mut sigmas = vec![sigma];

    for gen in 1..=config.generations {
        let mut rng = rng_substream(config.seed, &format!("es/{gen}"));
        let mut parent_of = Vec::with_capacity(config.lambda);
        let children: Vec<Genotype> = (0..config.lambda)
            .map(|_| {
                let p = rng.index(config.mu);
                parent_of.push(p);
                let stepped = pop[p].genotype.0.iter().map(|x| x + sigma * rng.normal()).collect();
                repair(&Genotype(stepped))
            })
            .collect();
        let offspring = evaluate(&objective, children, 1, config.seed, gen, &logbook)?;
        hof.update(&offspring);

        let successes = offspring
            .iter()
            .zip(&parent_of)
            .filter(|(child, &p)| scalar_cmp(scalar(child), scalar(&pop[p]), maximize) == Ordering::Less)
            .count();
        let rate = successes as f64 / config.lambda as f64;
        if rate > 0.2 {
            sigma /= ONE_FIFTH_FACTOR;
        } else if rate < 0.2 {
            sigma *= ONE_FIFTH_FACTOR;
        }
        sigma = sigma.max(SIGMA_FLOOR);
        sigmas.push(sigma);

        let mut combined = pop;
        combined.extend(offspring);
        // stable: parents precede offspring on ties
        combined.sort_by(|a, b| scalar_cmp(scalar(a), scalar(b), maximize));
        combined.truncate(config.mu);
        pop = combined;
        logbook.record(gen, config.lambda, &pop, hof.best_per_objective());
    }

    Ok(EsOutcome {
        outcome: Outcome {
            hall_of_fame: hof,
            logbook,
            population: pop,
        },
        sigmas,
    })
}

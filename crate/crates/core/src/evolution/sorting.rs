use std::cmp::Ordering;

use super::{EvolutionError, FitnessWeights, Individual};

/// Pareto dominance of `a` over `b` under signed weights (larger signed
/// value is better).
pub fn dominates(a: &[f64], b: &[f64], w: &FitnessWeights) -> Result<bool, EvolutionError> {
    if a.len() != b.len() || a.len() != w.len() {
        return Err(EvolutionError::LengthMismatch {
            expected: w.len(),
            found: if a.len() != w.len() { a.len() } else { b.len() },
        });
    }
    Ok(dominates_unchecked(a, b, w))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64], w: &FitnessWeights) -> bool {
    let mut strict = false;
    for ((x, y), wi) in a.iter().zip(b).zip(w.as_slice()) {
        let (sx, sy) = (wi * x, wi * y);
        if sx < sy {
            return false;
        }
        if sx > sy {
            strict = true;
        }
    }
    strict
}

fn fitnesses<'a>(pop: &'a [Individual], w: &FitnessWeights) -> Result<Vec<&'a [f64]>, EvolutionError> {
    pop.iter()
        .enumerate()
        .map(|(i, ind)| match &ind.fitness {
            None => Err(EvolutionError::MissingFitness(i)),
            Some(f) if f.len() != w.len() => Err(EvolutionError::LengthMismatch {
                expected: w.len(),
                found: f.len(),
            }),
            Some(f) => Ok(f.as_slice()),
        })
        .collect()
}

/// Deb's fast non-dominated sort. Sets `rank` on every individual and
/// returns the fronts as ascending index lists.
pub fn fast_nondominated_sort(pop: &mut [Individual], w: &FitnessWeights) -> Result<Vec<Vec<usize>>, EvolutionError> {
    let fits = fitnesses(pop, w)?;
    let n = fits.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for p in 0..n {
        for q in p + 1..n {
            if dominates_unchecked(fits[p], fits[q], w) {
                dominated_by_me[p].push(q);
                domination_count[q] += 1;
            } else if dominates_unchecked(fits[q], fits[p], w) {
                dominated_by_me[q].push(p);
                domination_count[p] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by_me[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    for (rank, front) in fronts.iter().enumerate() {
        for &i in front {
            pop[i].rank = Some(rank);
        }
    }
    Ok(fronts)
}

/// Crowding distance of each member of `front` (indices into `pop`), in
/// front order. Boundary members of every objective get `+inf`; objectives
/// with zero spread add nothing to interior members.
pub fn crowding_distance(pop: &[Individual], front: &[usize], w: &FitnessWeights) -> Result<Vec<f64>, EvolutionError> {
    let fits = fitnesses(pop, w)?;
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return Ok(vec![f64::INFINITY; m]);
    }
    let mut order: Vec<usize> = (0..m).collect();
    for obj in 0..w.len() {
        let value = |pos: usize| fits[front[pos]][obj];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(front[a].cmp(&front[b])));
        let lo = value(order[0]);
        let hi = value(order[m - 1]);
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span == 0.0 {
            continue;
        }
        for k in 1..m - 1 {
            let pos = order[k];
            if dist[pos].is_finite() {
                dist[pos] += (value(order[k + 1]) - value(order[k - 1])) / span;
            }
        }
    }
    Ok(dist)
}

/// Assign crowding to every individual of each front.
pub(crate) fn assign_crowding(
    pop: &mut [Individual],
    fronts: &[Vec<usize>],
    w: &FitnessWeights,
) -> Result<(), EvolutionError> {
    for front in fronts {
        let d = crowding_distance(pop, front, w)?;
        for (&i, di) in front.iter().zip(d) {
            pop[i].crowding = Some(di);
        }
    }
    Ok(())
}

/// Crowded-comparison order: lower rank, then larger crowding, then lower index.
pub(crate) fn crowded_cmp(pop: &[Individual], a: usize, b: usize) -> Ordering {
    let rank = |i: usize| pop[i].rank.unwrap_or(usize::MAX);
    let crowd = |i: usize| pop[i].crowding.unwrap_or(0.0);
    rank(a)
        .cmp(&rank(b))
        .then_with(|| crowd(b).total_cmp(&crowd(a)))
        .then(a.cmp(&b))
}

/// Indices chosen by NSGA-II environmental selection, in admission order:
/// whole fronts by ascending rank, then the split front by descending
/// crowding (ties to the lower index). Sets rank and crowding on `pop`.
pub fn nsga2_select_indices(pop: &mut [Individual], mu: usize, w: &FitnessWeights) -> Result<Vec<usize>, EvolutionError> {
    let fronts = fast_nondominated_sort(pop, w)?;
    assign_crowding(pop, &fronts, w)?;
    let mut chosen = Vec::with_capacity(mu);
    for front in &fronts {
        if chosen.len() == mu {
            break;
        }
        if chosen.len() + front.len() <= mu {
            chosen.extend_from_slice(front);
        } else {
            let mut rest = front.clone();
            rest.sort_by(|&a, &b| crowded_cmp(pop, a, b));
            chosen.extend(rest.into_iter().take(mu - chosen.len()));
        }
    }
    Ok(chosen)
}

/// Reduce `combined` to `mu` survivors.
pub fn nsga2_select(combined: &[Individual], mu: usize, w: &FitnessWeights) -> Result<Vec<Individual>, EvolutionError> {
    let mut pop = combined.to_vec();
    let chosen = nsga2_select_indices(&mut pop, mu, w)?;
    Ok(chosen.into_iter().map(|i| pop[i].clone()).collect())
}

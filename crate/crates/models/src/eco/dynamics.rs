use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use strata_core::RngHandle;

use crate::ModelError;

/// Holling type-II constants and other fixed functional-form choices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub attack: f64,
    pub handling: f64,
}

impl Default for Response {
    fn default() -> Self {
        Self {
            attack: 0.9,
            handling: 0.1,
        }
    }
}

impl Response {
    pub fn per_predator(&self, x: f64) -> f64 {
        self.attack * x / (1.0 + self.attack * self.handling * x)
    }
}

/// Seasonal signal with rare negative shocks.
pub fn climate_signal(t: u64, amp: f64, period: f64, shock_prob: f64, rng: &mut RngHandle) -> f64 {
    let seasonal = amp * (2.0 * PI * t as f64 / period).sin();
    let shock = if rng.chance(shock_prob) {
        -amp * rng.uniform_range(0.5, 1.5)
    } else {
        0.0
    };
    seasonal + shock
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub cost: f64,
}

/// Patch network and per-patch climate sensitivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub sensitivity: Vec<f64>,
    pub edges: Vec<Edge>,
}

impl Landscape {
    pub fn n_patches(&self) -> usize {
        self.sensitivity.len()
    }

    pub fn neighbours(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.n_patches()];
        for e in &self.edges {
            out[e.a].push((e.b, e.cost));
            out[e.b].push((e.a, e.cost));
        }
        for list in &mut out {
            list.sort_by_key(|(j, _)| *j);
        }
        out
    }

    /// True when every patch can reach every other.
    pub fn is_connected(&self) -> bool {
        let n = self.n_patches();
        if n == 0 {
            return true;
        }
        let nb = self.neighbours();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &(j, _) in &nb[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Ring backbone plus random chords, each present with probability
/// `chord_prob * (1 - fragmentation)`. Sensitivities are `U(0.5, 1.5)`.
pub fn landscape_init(
    n_patches: usize,
    fragmentation: f64,
    move_cost: f64,
    chord_prob: f64,
    rng: &mut RngHandle,
) -> Landscape {
    let sensitivity = (0..n_patches).map(|_| rng.uniform_range(0.5, 1.5)).collect();
    let mut edges = Vec::new();
    let ring = |i: usize, j: usize| j == i + 1 || (n_patches >= 3 && i == 0 && j == n_patches - 1);
    let p = chord_prob * (1.0 - fragmentation);
    for i in 0..n_patches {
        for j in i + 1..n_patches {
            // every pair draws so the stream position does not depend on ring membership
            let chord = rng.chance(p);
            if ring(i, j) || chord {
                edges.push(Edge { a: i, b: j, cost: move_cost });
            }
        }
    }
    Landscape { sensitivity, edges }
}

pub fn patch_quality(signal: f64, sensitivity: &[f64], q_min: f64) -> Vec<f64> {
    sensitivity.iter().map(|h| (1.0 + signal * h).max(q_min)).collect()
}

/// Parameters of the prey update for one patch set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreyParams {
    pub risk: f64,
    pub r: f64,
    pub k: f64,
    pub beta_f: f64,
    pub gamma_v: f64,
    pub response: Response,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreyOutcome {
    /// Prey biomass after growth and predation, before movement.
    pub x_pre: Vec<f64>,
    /// Type-II consumption per patch, shared with the predator update.
    pub consumption: Vec<f64>,
}

fn check(name: &str, v: &[f64]) -> Result<(), ModelError> {
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(ModelError::InvalidConfig(format!("{name} must be finite and non-negative")));
    }
    Ok(())
}

/// Risk-sensitive logistic growth minus type-II predation.
pub fn prey_step(x: &[f64], y: &[f64], q: &[f64], p: &PreyParams) -> Result<PreyOutcome, ModelError> {
    check("prey biomass", x)?;
    check("predator density", y)?;
    check("patch quality", q)?;
    if x.len() != y.len() || x.len() != q.len() {
        return Err(ModelError::InvalidConfig("patch vectors differ in length".into()));
    }
    let effort = p.risk;
    let growth_rate = p.r * (1.0 + p.beta_f * (effort - 0.5));
    let exposure = 1.0 + p.gamma_v * effort;
    let mut x_pre = Vec::with_capacity(x.len());
    let mut consumption = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let growth = growth_rate * q[i] * x[i] * (1.0 - x[i] / (p.k * q[i]));
        let eaten = exposure * p.response.per_predator(x[i]) * y[i];
        x_pre.push((x[i] + growth - eaten).max(0.0));
        consumption.push(eaten);
    }
    Ok(PreyOutcome { x_pre, consumption })
}

pub fn predator_step(y: &[f64], consumption: &[f64], conv: f64, mort: f64) -> Vec<f64> {
    y.iter()
        .zip(consumption)
        .map(|(y, p)| (y + conv * p - mort * y).max(0.0))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MovementOutcome {
    pub x: Vec<f64>,
    /// Total biomass that left its patch this tick.
    pub moved: f64,
    /// Biomass lost in transit.
    pub lost: f64,
}

/// Each patch sends `dispersal * x_i` to strictly more attractive neighbours
/// in proportion to the attractiveness gap; arrivals pay the edge cost.
pub fn movement_step(
    x_pre: &[f64],
    q: &[f64],
    k: f64,
    neighbours: &[Vec<(usize, f64)>],
    dispersal: f64,
) -> MovementOutcome {
    let n = x_pre.len();
    let attract: Vec<f64> = (0..n).map(|i| (q[i] * (1.0 - x_pre[i] / (k * q[i]))).max(0.0)).collect();
    let mut x = x_pre.to_vec();
    let mut moved = 0.0;
    let mut lost = 0.0;
    for i in 0..n {
        let better: Vec<(usize, f64, f64)> = neighbours[i]
            .iter()
            .filter(|(j, _)| attract[*j] > attract[i])
            .map(|&(j, cost)| (j, attract[j] - attract[i], cost))
            .collect();
        if better.is_empty() {
            continue;
        }
        let send = dispersal * x_pre[i];
        if send == 0.0 {
            continue;
        }
        let total_gap: f64 = better.iter().map(|b| b.1).sum();
        x[i] -= send;
        moved += send;
        for (j, gap, cost) in better {
            let share = send * gap / total_gap;
            x[j] += share * (1.0 - cost);
            lost += share * cost;
        }
    }
    for v in &mut x {
        *v = v.max(0.0);
    }
    MovementOutcome { x, moved, lost }
}

/// Patches that fell from at or above `thresh` to below it.
pub fn downward_crossings(prev: &[f64], now: &[f64], thresh: f64) -> usize {
    prev.iter().zip(now).filter(|(p, n)| **p >= thresh && **n < thresh).count()
}

/// Population coefficient of variation; 0 for an empty or all-zero series.
pub fn coefficient_of_variation(series: &[f64]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean.abs()
}

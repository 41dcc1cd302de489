//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Minimization-normalized dominance: values are multiplied by the weights so
/// that larger is better.
pub fn dom(a: &[f64], b: &[f64], w: &[f64]) -> bool {
    let mut strict = false;
    for i in 0..w.len() {
        let (x, y) = (w[i] * a[i], w[i] * b[i]);
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Fronts by repeated peeling of the non-dominated set.
pub fn brute_fronts(fits: &[Vec<f64>], w: &[f64]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..fits.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dom(&fits[j], &fits[i], w)))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Crowding distance written straight from its definition: for every
/// objective sort the front (ties by index), mark both ends infinite and add
/// the normalized neighbour gap to interior points.
pub fn brute_crowding(fits: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let n_obj = fits[front[0]].len();
    let mut out = vec![0.0; m];
    let mut boundary = vec![false; m];
    for o in 0..n_obj {
        let mut sorted: Vec<usize> = (0..m).collect();
        sorted.sort_by(|&a, &b| {
            fits[front[a]][o]
                .partial_cmp(&fits[front[b]][o])
                .unwrap()
                .then(front[a].cmp(&front[b]))
        });
        boundary[sorted[0]] = true;
        boundary[sorted[m - 1]] = true;
        let span = fits[front[sorted[m - 1]]][o] - fits[front[sorted[0]]][o];
        if span == 0.0 {
            continue;
        }
        for k in 1..m - 1 {
            let gap = fits[front[sorted[k + 1]]][o] - fits[front[sorted[k - 1]]][o];
            out[sorted[k]] += gap / span;
        }
    }
    // a point that is a boundary anywhere is infinite
    for (d, b) in out.iter_mut().zip(&boundary) {
        if *b {
            *d = f64::INFINITY;
        }
    }
    out
}

/// Environmental selection: whole fronts while they fit, then the split front
/// by descending crowding with ties to the lower index.
pub fn brute_select(fits: &[Vec<f64>], w: &[f64], mu: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    for front in brute_fronts(fits, w) {
        if chosen.len() + front.len() <= mu {
            chosen.extend(front);
            continue;
        }
        let d = brute_crowding(fits, &front);
        let mut pos: Vec<usize> = (0..front.len()).collect();
        pos.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap().then(front[a].cmp(&front[b])));
        let need = mu - chosen.len();
        chosen.extend(pos.into_iter().take(need).map(|p| front[p]));
        break;
    }
    chosen
}

/// Dominated area of a set of 2-D minimization points inside the box spanned
/// with `reference`.
pub fn hypervolume_2d(points: &[(f64, f64)], reference: (f64, f64)) -> f64 {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| p.0 < reference.0 && p.1 < reference.1)
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    let mut area = 0.0;
    let mut best_y = reference.1;
    for &(x, y) in &pts {
        if y >= best_y {
            continue;
        }
        // strip between this point's y and the best y so far
        area += (reference.0 - x) * (best_y - y);
        best_y = y;
    }
    area
}

/// Hypervolume of `n` evenly spaced points on the front of
/// `(t^2, (t-1)^2), t in [0, 1]`.
pub fn analytic_front_hv(n: usize, reference: (f64, f64)) -> f64 {
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (t * t, (t - 1.0) * (t - 1.0))
        })
        .collect();
    hypervolume_2d(&pts, reference)
}

/// Condorcet winner by explicit pairwise counting, if one exists.
pub fn brute_condorcet(table: &BTreeMap<String, BTreeMap<String, f64>>) -> Option<String> {
    let names: Vec<String> = table.values().next()?.keys().cloned().collect();
    let n = table.len();
    'outer: for x in &names {
        for y in &names {
            if x == y {
                continue;
            }
            let mut wins = 0;
            for row in table.values() {
                if row[x] > row[y] {
                    wins += 1;
                }
            }
            if wins * 2 <= n {
                continue 'outer;
            }
        }
        return Some(x.clone());
    }
    None
}

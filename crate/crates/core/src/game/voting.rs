use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// Highest score wins; ties go to the lexicographically smallest name.
/// Returns `None` only for an empty input.
pub fn vote_argmax<'a, I>(scores: I) -> Option<String>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut best: Option<(&str, f64)> = None;
    for (name, score) in scores {
        best = match best {
            None => Some((name, score)),
            Some((bn, bs)) if score > bs || (score == bs && name < bn) => Some((name, score)),
            keep => keep,
        };
    }
    best.map(|(n, _)| n.to_string())
}

/// Most wins; ties go to the larger total score, then to the smallest name.
pub fn vote_majority(winners: &[String], totals: &BTreeMap<String, f64>) -> Option<String> {
    let mut wins: BTreeMap<&str, usize> = BTreeMap::new();
    for w in winners {
        *wins.entry(w).or_default() += 1;
    }
    wins.into_iter()
        .map(|(name, n)| (name, n, totals.get(name).copied().unwrap_or(0.0)))
        .reduce(|best, cand| {
            let better = cand.1 > best.1 || (cand.1 == best.1 && cand.2 > best.2);
            if better {
                cand
            } else {
                best
            }
        })
        .map(|(name, _, _)| name.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondorcetOutcome {
    pub winner: String,
    /// True when no participant beat every other and Copeland decided.
    pub fallback: bool,
    pub copeland: BTreeMap<String, i64>,
}

/// Pairwise majority over scenarios. `table` maps scenario to participant
/// to mean score. X beats Y when X scores higher in a strict majority of
/// scenarios. Without a Condorcet winner, the Copeland score (wins minus
/// losses) decides, ties to the smallest name.
pub fn vote_condorcet(table: &BTreeMap<String, BTreeMap<String, f64>>) -> Option<CondorcetOutcome> {
    let participants: BTreeSet<&str> = table.values().flat_map(|row| row.keys().map(String::as_str)).collect();
    let names: Vec<&str> = participants.into_iter().collect();
    if names.is_empty() {
        return None;
    }
    let n_scen = table.len();
    let beats = |x: &str, y: &str| {
        let wins = table
            .values()
            .filter(|row| match (row.get(x), row.get(y)) {
                (Some(a), Some(b)) => a > b,
                _ => false,
            })
            .count();
        2 * wins > n_scen
    };

    let mut copeland = BTreeMap::new();
    let mut condorcet = None;
    for &x in &names {
        let mut score = 0i64;
        let mut beats_all = true;
        for &y in &names {
            if x == y {
                continue;
            }
            if beats(x, y) {
                score += 1;
            } else {
                beats_all = false;
                if beats(y, x) {
                    score -= 1;
                }
            }
        }
        copeland.insert(x.to_string(), score);
        if beats_all && condorcet.is_none() {
            condorcet = Some(x);
        }
    }

    let (winner, fallback) = match condorcet {
        Some(w) => (w.to_string(), false),
        None => {
            let best = copeland.values().copied().max().expect("non-empty");
            let w = copeland.iter().find(|(_, &s)| s == best).map(|(n, _)| n.clone()).expect("max exists");
            (w, true)
        }
    };
    Some(CondorcetOutcome {
        winner,
        fallback,
        copeland,
    })
}

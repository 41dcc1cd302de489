use serde::{Deserialize, Serialize};

use super::Individual;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub gen: usize,
    pub nevals: usize,
    pub obj: Vec<ObjStats>,
}

/// Per-generation statistics. Row 0 describes the initial population.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Logbook {
    pub rows: Vec<LogRow>,
    /// Best value per objective over the all-time archive, one entry per row.
    #[serde(skip)]
    pub archive_best: Vec<Vec<f64>>,
}

impl Logbook {
    pub fn record(&mut self, gen: usize, nevals: usize, pop: &[Individual], archive_best: Vec<f64>) {
        let fits: Vec<&Vec<f64>> = pop.iter().filter_map(|i| i.fitness.as_ref()).collect();
        let n_obj = fits.first().map_or(0, |f| f.len());
        let obj = (0..n_obj)
            .map(|o| {
                let values = fits.iter().map(|f| f[o]);
                ObjStats {
                    min: values.clone().fold(f64::INFINITY, f64::min),
                    mean: values.clone().sum::<f64>() / fits.len() as f64,
                    max: values.fold(f64::NEG_INFINITY, f64::max),
                }
            })
            .collect();
        self.rows.push(LogRow { gen, nevals, obj });
        self.archive_best.push(archive_best);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// JSON Lines, one row per line.
    pub fn to_jsonl(&self) -> String {
        self.rows
            .iter()
            .map(|r| serde_json::to_string(r).expect("rows serialize") + "\n")
            .collect()
    }

    pub fn from_jsonl(raw: &str) -> Result<Self, serde_json::Error> {
        let rows = raw
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<LogRow>, _>>()?;
        Ok(Self {
            rows,
            archive_best: Vec::new(),
        })
    }
}

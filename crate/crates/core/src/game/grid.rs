use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::TournamentError;

/// A named assignment of scenario parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub params: BTreeMap<String, Value>,
}

impl Scenario {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.params.get(key).and_then(Value::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<Value>,
}

/// Ordered axes; the expansion is their cartesian product.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScenarioGrid {
    pub axes: Vec<GridAxis>,
}

impl ScenarioGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn axis(mut self, name: &str, values: Vec<Value>) -> Self {
        self.axes.push(GridAxis {
            name: name.to_string(),
            values,
        });
        self
    }

    pub fn size(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }
}

fn render(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Cartesian product with the first axis varying slowest. Names are
/// `axis1=v1|axis2=v2|...`; a grid without axes yields one scenario named
/// `default`.
pub fn expand_grid(grid: &ScenarioGrid) -> Result<Vec<Scenario>, TournamentError> {
    let mut names = BTreeSet::new();
    for axis in &grid.axes {
        if axis.values.is_empty() {
            return Err(TournamentError::EmptyAxis(axis.name.clone()));
        }
        if !names.insert(axis.name.as_str()) {
            return Err(TournamentError::InvalidSetup(format!("axis {:?} declared twice", axis.name)));
        }
    }
    if grid.axes.is_empty() {
        return Ok(vec![Scenario::new("default")]);
    }

    let mut out = Vec::with_capacity(grid.size());
    let mut idx = vec![0usize; grid.axes.len()];
    loop {
        let mut scenario = Scenario::new(
            grid.axes
                .iter()
                .zip(&idx)
                .map(|(axis, &i)| format!("{}={}", axis.name, render(&axis.values[i])))
                .collect::<Vec<_>>()
                .join("|"),
        );
        for (axis, &i) in grid.axes.iter().zip(&idx) {
            scenario.params.insert(axis.name.clone(), axis.values[i].clone());
        }
        out.push(scenario);

        // odometer increment, last axis fastest
        let mut pos = grid.axes.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < grid.axes[pos].values.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn eco_grid_has_four_scenarios() {
        let grid = ScenarioGrid::new()
            .axis("amp", vec![json!(0.4), json!(0.8)])
            .axis("frag", vec![json!(0.2), json!(0.5)]);
        let s = expand_grid(&grid).unwrap();
        let names: Vec<&str> = s.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(
            names,
            ["amp=0.4|frag=0.2", "amp=0.4|frag=0.5", "amp=0.8|frag=0.2", "amp=0.8|frag=0.5"]
        );
        assert_eq!(s[2].f64("amp"), Some(0.8));
    }

    #[test]
    fn five_binary_axes_give_32() {
        let grid = (0..5).fold(ScenarioGrid::new(), |g, i| g.axis(&format!("a{i}"), vec![json!(0), json!(1)]));
        let s = expand_grid(&grid).unwrap();
        assert_eq!(s.len(), 32);
        let unique: BTreeSet<_> = s.iter().map(|s| s.name.clone()).collect();
        assert_eq!(unique.len(), 32);
    }

    #[test]
    fn single_value_and_empty_cases() {
        let one = ScenarioGrid::new().axis("x", vec![json!("lenient")]);
        let s = expand_grid(&one).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].name, "x=lenient");
        let empty = ScenarioGrid::new().axis("x", vec![]);
        assert_eq!(expand_grid(&empty), Err(TournamentError::EmptyAxis("x".into())));
        assert_eq!(expand_grid(&ScenarioGrid::new()).unwrap()[0].name, "default");
    }

    #[test]
    fn grid_json_keeps_axis_order() {
        let raw = r#"[{"name":"frag","values":[0.2]},{"name":"amp","values":[0.4,0.8]}]"#;
        let grid: ScenarioGrid = serde_json::from_str(raw).unwrap();
        assert_eq!(expand_grid(&grid).unwrap()[1].name, "frag=0.2|amp=0.8");
    }
}

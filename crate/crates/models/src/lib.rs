//! Two worked examples built on the kernel: an ecological metacommunity and
//! an enterprise competition with neural firm policies.

pub mod eco;
pub mod enterprise;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use strata_core::game::Scenario;
use strata_core::kernel::KernelError;
use strata_core::policy::PolicyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Overlay `params` onto a serializable config by field name. `aliases` maps
/// short scenario axis names onto field names.
pub fn apply_overrides<C>(config: &C, params: &Map<String, Value>, aliases: &[(&str, &str)]) -> Result<C, ModelError>
where
    C: Serialize + DeserializeOwned,
{
    let mut raw = serde_json::to_value(config).map_err(|e| ModelError::InvalidConfig(e.to_string()))?;
    let fields = raw.as_object_mut().expect("configs serialize to objects");
    for (key, value) in params {
        let field = aliases
            .iter()
            .find(|(alias, _)| alias == key)
            .map_or(key.as_str(), |(_, f)| f);
        if !fields.contains_key(field) {
            return Err(ModelError::InvalidConfig(format!("unknown parameter {key:?}")));
        }
        fields.insert(field.to_string(), value.clone());
    }
    serde_json::from_value(raw).map_err(|e| ModelError::InvalidConfig(e.to_string()))
}

/// Scenario parameters as a JSON object.
pub fn scenario_params(scenario: &Scenario) -> Map<String, Value> {
    scenario.params.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

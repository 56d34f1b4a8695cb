//! Run configuration: JSON file merged with command-line flags, and its hash.

use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Resolves a subcommand's arguments: clap defaults, then the config file,
/// then flags given explicitly on the command line.
///
/// `parsed` holds the clap result (defaults plus flags); `matches` tells
/// which of its fields came from the command line. Config keys are the
/// argument names; unknown keys and ill-typed values are usage errors.
pub fn resolve<T: Serialize + DeserializeOwned>(
    command: &str,
    parsed: &T,
    matches: &ArgMatches,
    file: Option<&Path>,
) -> Result<T, CliError> {
    let Value::Object(base) = serde_json::to_value(parsed).map_err(|e| CliError::Usage(e.to_string()))? else {
        return Err(CliError::Usage("arguments do not serialize to an object".into()));
    };
    let Some(path) = file else {
        return Ok(serde_json::from_value(Value::Object(base)).expect("round trip of parsed arguments"));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let file_value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(file_map) = file_value else {
        return Err(CliError::Usage(format!("config {}: top level must be an object", path.display())));
    };

    let mut merged = base.clone();
    for (key, value) in file_map {
        if key == "command" {
            if value.as_str() != Some(command) {
                return Err(CliError::Usage(format!("config field 'command': {value} does not match subcommand '{command}'")));
            }
            continue;
        }
        if !base.contains_key(&key) {
            let known: Vec<&str> = base.keys().map(String::as_str).collect();
            return Err(CliError::Usage(format!("config field '{key}': unknown for {command} (known: {})", known.join(", "))));
        }
        // Check each field on its own so the diagnostic names it.
        let mut probe = base.clone();
        probe.insert(key.clone(), value.clone());
        if let Err(e) = serde_json::from_value::<T>(Value::Object(probe)) {
            return Err(CliError::Usage(format!("config field '{key}': {e}")));
        }
        merged.insert(key, value);
    }
    for key in base.keys() {
        if matches!(matches.value_source(key), Some(ValueSource::CommandLine)) {
            merged.insert(key.clone(), base[key].clone());
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

/// The resolved configuration as a JSON object with the command name.
pub fn echo<T: Serialize>(command: &str, cfg: &T) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    if let Ok(Value::Object(fields)) = serde_json::to_value(cfg) {
        map.extend(fields);
    }
    Value::Object(map)
}

/// SHA-256 of the compact JSON echo (keys sorted), hex encoded.
pub fn config_hash(echo: &Value) -> String {
    let text = serde_json::to_string(echo).expect("JSON values serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// The fixed parameters ε, r, κ of a run, where the command uses them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RegimeParams {
    pub d: Option<usize>,
    pub epsilon: Option<f64>,
    pub r: Option<usize>,
    pub kappa: Option<f64>,
}

impl RegimeParams {
    /// Whether the values lie in the asymptotic regime the decay theorems need:
    /// κr² = 1 and rε/2 − 2 ≥ (10d)^10, taking the unspecified constant as 1.
    /// A missing ε is taken at its most favourable value 1/2.
    pub fn in_regime(&self) -> bool {
        let d = self.d.unwrap_or(1).max(1) as f64;
        let kappa_ok = match (self.kappa, self.r) {
            (Some(k), Some(r)) => (k * (r as f64).powi(2) - 1.0).abs() < 1e-12,
            (Some(_), None) => false,
            _ => true,
        };
        let decay_ok = match self.r {
            Some(r) => r as f64 * self.epsilon.unwrap_or(0.5) / 2.0 - 2.0 >= (10.0 * d).powi(10),
            None => true,
        };
        kappa_ok && decay_ok
    }

    pub fn is_empty(&self) -> bool {
        self.epsilon.is_none() && self.r.is_none() && self.kappa.is_none()
    }

    /// `epsilon=…,r=…,kappa=…` with `-` for unused values.
    pub fn describe(&self) -> String {
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v}"));
        format!("epsilon={},r={},kappa={}", f(self.epsilon), self.r.map_or("-".into(), |v| v.to_string()), f(self.kappa))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_key_order_free() {
        let a: Value = serde_json::from_str(r#"{"command":"x","b":1,"a":[1,2]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"a":[1,2],"command":"x","b":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn desk_scale_parameters_are_outside_the_regime() {
        let p = RegimeParams { d: Some(2), epsilon: Some(0.25), r: Some(4), kappa: Some(0.25) };
        assert!(!p.in_regime());
        let huge = RegimeParams { d: Some(1), epsilon: Some(0.5), r: Some(1_000_000_000_000), kappa: None };
        assert!(huge.in_regime());
        assert!(RegimeParams::default().in_regime());
        assert_eq!(p.describe(), "epsilon=0.25,r=4,kappa=0.25");
    }
}

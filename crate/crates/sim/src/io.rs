//! Config ingestion: JSON file or preset, then dotted-key overrides.

use std::fs;
use std::path::Path;

use cfslice_core::Setup;
use serde_json::Value;

use crate::presets;

/// Bad input from the user (exit code 2).
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown preset `{0}` (expected one of: full, desk, overloaded)")]
    UnknownPreset(String),
    #[error("override `{0}` is not of the form key.path=value")]
    MalformedOverride(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error(transparent)]
    Invalid(#[from] cfslice_core::Error),
}

pub fn read_setup(path: &Path) -> Result<Setup, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Applies `a.b.c=value` to `doc`. The value is read as JSON when it parses,
/// as a bare string otherwise. Every segment must already exist.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::MalformedOverride(assignment.to_string()))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::MalformedOverride(assignment.to_string()));
    }
    let mut node = doc;
    for part in key.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
    }
    *node = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok(())
}

/// Resolves the effective setup: file (or preset, default `desk`), then
/// overrides in order, then validation.
pub fn load_setup(
    config: Option<&Path>,
    preset: Option<&str>,
    overrides: &[String],
) -> Result<Setup, ConfigError> {
    let base = match (config, preset) {
        (Some(path), _) => read_setup(path)?,
        (None, name) => {
            let name = name.unwrap_or("desk");
            presets::preset(name).ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))?
        }
    };
    let mut doc = serde_json::to_value(&base)?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let setup: Setup = serde_json::from_value(doc)?;
    setup.validate()?;
    Ok(setup)
}

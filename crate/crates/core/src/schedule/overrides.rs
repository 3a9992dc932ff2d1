//! `key=value` overrides addressed by dotted paths into the scenario's JSON
//! form, e.g. `horizon=1000`, `algorithm.params.t0=500` or `arms.means.2=0.4`.
//! The value is read as JSON when it parses as JSON and as a plain string
//! otherwise.

use serde_json::Value;
use thiserror::Error;

use super::{ConfigError, Scenario};

#[derive(Debug, Error)]
pub enum OverrideError {
    #[error("override `{0}` is not of the form key=value")]
    Syntax(String),
    #[error("override path `{0}` does not exist")]
    Path(String),
    #[error("override produced an invalid scenario: {0}")]
    Config(#[from] ConfigError),
}

/// Applies one `key=value` assignment to a JSON document in place.
/// Object keys may be new; array indices must already exist.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), OverrideError> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| OverrideError::Syntax(assignment.to_string()))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(OverrideError::Syntax(assignment.to_string()));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));

    let mut keys = path.split('.').peekable();
    let mut node = doc;
    while let Some(key) = keys.next() {
        let last = keys.peek().is_none();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.get_mut(key).ok_or_else(|| OverrideError::Path(path.to_string()))?
            }
            Value::Array(items) => {
                let slot = key
                    .parse::<usize>()
                    .ok()
                    .and_then(|i| items.get_mut(i))
                    .ok_or_else(|| OverrideError::Path(path.to_string()))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(OverrideError::Path(path.to_string())),
        };
    }
    unreachable!("non-empty path always returns inside the loop")
}

/// Applies overrides in order and re-reads the scenario.
pub fn apply_overrides<S: AsRef<str>>(scenario: &Scenario, assignments: &[S]) -> Result<Scenario, OverrideError> {
    let mut doc = scenario.to_value();
    for a in assignments {
        apply_override(&mut doc, a.as_ref())?;
    }
    Ok(Scenario::from_value(doc)?)
}

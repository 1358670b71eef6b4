use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{bad_arg, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to reproduce a run: the invocation, the resolved configuration,
/// the seeds and the versions that produced the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub command: String,
    pub args: Vec<String>,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, args: Vec<String>, config: Value, seeds: Vec<u64>, outputs: Vec<String>) -> Self {
        Self {
            tool: "heavyls".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            core_version: heavyls::VERSION.into(),
            command: command.into(),
            args,
            config,
            seeds,
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}

/// Loads a JSON config; a manifest is accepted in place of the config it records.
pub fn load_config(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| bad_arg(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bad_arg(format!("{}: {e}", path.display())))?;
    if v.get("tool").and_then(Value::as_str) == Some("heavyls") {
        if let Some(c) = v.get("config") {
            return Ok(c.clone());
        }
    }
    Ok(v)
}

/// Applies `key=value` overrides; dotted keys address nested objects. Values are parsed as
/// JSON when possible and taken as strings otherwise.
pub fn apply_overrides(config: &mut Value, sets: &[String]) -> CliResult<()> {
    for set in sets {
        let (key, raw) = set.split_once('=').ok_or_else(|| bad_arg(format!("override `{set}` is not key=value")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| bad_arg(format!("empty override key in `{set}`")))?;
        let mut node = &mut *config;
        for (i, p) in parts.iter().enumerate() {
            node = node
                .get_mut(*p)
                .filter(|n| n.is_object())
                .ok_or_else(|| bad_arg(format!("unknown config key `{}`", parts[..=i].join("."))))?;
        }
        node.as_object_mut()
            .ok_or_else(|| bad_arg(format!("cannot set `{key}`")))?
            .insert(last.to_string(), value);
    }
    Ok(())
}

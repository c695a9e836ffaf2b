//! TOML config overlay: keys in the config file replace the matching flags.

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::UsageError;

/// Subcommand sections a config file may contain.
pub const SECTIONS: &[&str] =
    &["diagnose", "quasi", "type-profile", "maergoiz", "propagate", "wasow", "pl-check", "extend"];

pub fn load(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    text.parse::<toml::Table>()
        .map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
}

/// Keys that apply to `command`: top-level scalars, then the `[command]` table.
fn keys_for(table: &toml::Table, command: &str) -> Result<Map<String, Value>> {
    let mut out = Map::new();
    for (k, v) in table {
        if SECTIONS.contains(&k.as_str()) {
            continue;
        }
        out.insert(k.clone(), serde_json::to_value(v)?);
    }
    if let Some(section) = table.get(command) {
        let section = section
            .as_table()
            .ok_or_else(|| UsageError(format!("config: [{command}] must be a table")))?;
        for (k, v) in section {
            out.insert(k.clone(), serde_json::to_value(v)?);
        }
    }
    Ok(out)
}

/// Returns `flags` with every key present in the config section overwritten.
pub fn overlay<A>(flags: A, table: Option<&toml::Table>, command: &str) -> Result<A>
where
    A: Serialize + DeserializeOwned,
{
    let Some(table) = table else {
        return Ok(flags);
    };
    let mut merged = match serde_json::to_value(&flags)? {
        Value::Object(m) => m,
        _ => unreachable!("argument structs serialize to maps"),
    };
    for (k, v) in keys_for(table, command)? {
        if !merged.contains_key(&k) {
            return Err(UsageError(format!("config: unknown key `{k}` for `{command}`")).into());
        }
        merged.insert(k, v);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| UsageError(format!("config: {e}")).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Debug, PartialEq)]
    #[serde(rename_all = "kebab-case")]
    struct Flags {
        alpha: Option<f64>,
        horizon: Option<usize>,
        custom_file: Option<String>,
    }

    fn flags() -> Flags {
        Flags { alpha: Some(1.0), horizon: None, custom_file: None }
    }

    #[test]
    fn section_beats_top_level_and_flags() {
        let t: toml::Table = "alpha = 3\nhorizon = 10\n[diagnose]\nalpha = 2\n[quasi]\nalpha = 9".parse().unwrap();
        let f = overlay(flags(), Some(&t), "diagnose").unwrap();
        assert_eq!(f, Flags { alpha: Some(2.0), horizon: Some(10), custom_file: None });
        let f = overlay(flags(), Some(&t), "quasi").unwrap();
        assert_eq!(f.alpha, Some(9.0));
    }

    #[test]
    fn kebab_keys_and_unknown_keys() {
        let t: toml::Table = "custom-file = \"m.txt\"".parse().unwrap();
        assert_eq!(overlay(flags(), Some(&t), "diagnose").unwrap().custom_file.as_deref(), Some("m.txt"));
        let t: toml::Table = "custom_file = \"m.txt\"".parse().unwrap();
        let e = overlay(flags(), Some(&t), "diagnose").unwrap_err();
        assert!(e.is::<UsageError>());
    }

    #[test]
    fn type_mismatch_is_a_usage_error() {
        let t: toml::Table = "horizon = \"many\"".parse().unwrap();
        assert!(overlay(flags(), Some(&t), "diagnose").unwrap_err().is::<UsageError>());
    }

    #[test]
    fn no_config_keeps_flags() {
        assert_eq!(overlay(flags(), None, "diagnose").unwrap(), flags());
    }
}

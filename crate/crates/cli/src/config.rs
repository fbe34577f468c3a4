use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Loads a flat JSON or TOML table of option overrides. Keys may use
/// dashes or underscores.
fn load(path: &Path) -> Result<serde_json::Map<String, Value>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    let v: Value = if is_toml {
        let t: toml::Value = toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
        serde_json::to_value(t)?
    } else {
        serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?
    };
    let Value::Object(map) = v else {
        bail!("config {} must be a table of options", path.display());
    };
    Ok(map.into_iter().map(|(k, v)| (k.replace('-', "_"), v)).collect())
}

/// Applies config-file overrides on top of the parsed flags and returns
/// the merged options together with their JSON echo.
pub fn resolve<T: Serialize + DeserializeOwned>(args: T, path: Option<&Path>) -> Result<(T, Value)> {
    let mut merged = serde_json::to_value(&args)?;
    if let Some(path) = path {
        let Value::Object(obj) = &mut merged else {
            bail!("options are not a table");
        };
        for (k, v) in load(path)? {
            if !obj.contains_key(&k) {
                bail!("unknown option {k:?} in config {}", path.display());
            }
            obj.insert(k, v);
        }
    }
    let args = serde_json::from_value(merged.clone()).context("invalid option value in config")?;
    Ok((args, merged))
}

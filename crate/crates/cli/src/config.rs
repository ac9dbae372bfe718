//! Flat key=value configuration files. Flags override config values,
//! config values override built-in defaults.

use std::collections::HashMap;
use std::path::Path;

const KNOWN_KEYS: [&str; 17] = [
    "n",
    "j",
    "ec",
    "delta",
    "beta",
    "axis",
    "min",
    "max",
    "count",
    "scale",
    "values",
    "quantities",
    "detect",
    "grid",
    "temps",
    "out_dir",
    "precision",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut entries = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                ));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!(
                    "{}:{}: unknown key `{key}`",
                    path.display(),
                    lineno + 1
                ));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    /// Parsed value from the config, if present.
    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| format!("config key `{key}`: {e}")),
        }
    }
}

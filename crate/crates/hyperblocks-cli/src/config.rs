//! Key/value config files: one `key = value` pair per line, `#` comments.
//! Flags always win over file values.

use std::collections::BTreeMap;
use std::path::Path;

use hyperblocks::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected `key = value`, got {line:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value, else file value parsed with `parse`, else default.
    pub fn resolve<T, F>(&self, flag: Option<T>, key: &str, parse: F, default: T) -> Result<T>
    where
        F: Fn(&str) -> Result<T>,
    {
        match flag {
            Some(v) => Ok(v),
            None => match self.get(key) {
                Some(s) => parse(s),
                None => Ok(default),
            },
        }
    }
}

pub fn parse_usize(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Config(format!("expected a non-negative integer, got {s:?}")))
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Config(format!("expected a number, got {s:?}")))
}

pub fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("expected true/false, got {other:?}"))),
    }
}

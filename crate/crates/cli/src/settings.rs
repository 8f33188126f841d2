//! `key=value` configuration files and flag/file/default precedence.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};

use crate::UsageError;

/// Settings read from a file of `key = value` lines. Blank lines and lines
/// starting with `#` are skipped; keys may use `-` or `_`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError::new(format!("line {}: expected key=value, got '{line}'", no + 1)))?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(UsageError::new(format!("line {}: empty key", no + 1)).into());
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Rejects keys outside `allowed`, which catches typos early.
    pub fn restrict_to(&self, allowed: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(UsageError::new(format!(
                    "unknown config key '{key}'; this command accepts: {}",
                    allowed.join(", ")
                ))
                .into());
            }
        }
        Ok(())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.values.get(&normalize(key)) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow!(UsageError::new(format!("config key '{key}' = '{raw}': {e}")))),
        }
    }

    /// Flag value if given, else the file's value, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Flag value if given, else the file's value, else `default`.
    pub fn pick_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}

/// Comma-separated list, as used by sweep grids.
#[derive(Clone, Debug, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<T>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<Vec<T>, String>>()?;
        if items.is_empty() {
            return Err("empty list".into());
        }
        Ok(List(items))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let file = ConfigFile::parse("# sweep\nn = 5\nfk_copies=10\n\nepsilon=0.2").unwrap();
        assert_eq!(file.pick_or(Some(3usize), "n", 1).unwrap(), 3);
        assert_eq!(file.pick_or(None::<usize>, "n", 1).unwrap(), 5);
        assert_eq!(file.pick_or(None::<usize>, "fk-copies", 0).unwrap(), 10);
        assert_eq!(file.pick_or(None::<usize>, "k", 2).unwrap(), 2);
        assert!(file.restrict_to(&["n", "fk-copies"]).is_err());
        assert!(file.restrict_to(&["n", "fk-copies", "epsilon"]).is_ok());
    }

    #[test]
    fn malformed_lines_are_usage_errors() {
        let err = ConfigFile::parse("n 5").unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        let file = ConfigFile::parse("n = five").unwrap();
        assert!(file.get::<usize>("n").is_err());
    }

    #[test]
    fn lists_parse() {
        assert_eq!("0, 2,4".parse::<List<usize>>().unwrap(), List(vec![0, 2, 4]));
        assert!("".parse::<List<usize>>().is_err());
        assert!("1,x".parse::<List<usize>>().is_err());
    }
}

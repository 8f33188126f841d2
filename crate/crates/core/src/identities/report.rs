use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Outcome of one identity or inequality check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub params: String,
    pub residual: f64,
    pub threshold: f64,
    /// `residual <= threshold`; a NaN residual never passes.
    pub passed: bool,
    /// Monte Carlo sample count, 0 for exact checks.
    pub samples: u64,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        params: impl fmt::Display,
        residual: f64,
        threshold: f64,
        samples: u64,
    ) -> Self {
        Self {
            name: name.into(),
            params: params.to_string(),
            residual,
            threshold,
            passed: residual <= threshold,
            samples,
        }
    }

    pub const CSV_HEADER: [&'static str; 6] = ["name", "params", "residual", "threshold", "passed", "samples"];

    pub fn csv_fields(&self) -> [String; 6] {
        [
            self.name.clone(),
            self.params.clone(),
            format!("{:e}", self.residual),
            format!("{:e}", self.threshold),
            self.passed.to_string(),
            self.samples.to_string(),
        ]
    }
}

/// Named parameters of a check, rendered as `key=value;key=value` in key order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckParams(BTreeMap<String, String>);

impl CheckParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key).ok_or_else(|| Error::InvalidParameter(format!("missing parameter '{key}'")))?;
        raw.parse().map_err(|_| Error::InvalidParameter(format!("cannot parse {key}={raw}")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.contains(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    /// Fills in any key absent from `self`.
    pub fn merged_over(mut self, defaults: &CheckParams) -> Self {
        for (k, v) in &defaults.0 {
            self.0.entry(k.clone()).or_insert_with(|| v.clone());
        }
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl fmt::Display for CheckParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.0 {
            if !first {
                f.write_str(";")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for CheckParams {
    type Err = Error;

    /// Parses `key=value` pairs separated by `;` or `,`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Self::new();
        for part in s.split([';', ',']).map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{part}'")))?;
            p.set(k.trim(), v.trim());
        }
        Ok(p)
    }
}

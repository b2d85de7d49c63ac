//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys before the first header live in the unnamed top-level section.
//! Comments start with `#`. Serialization writes the top-level section first,
//! then sections in name order, keys sorted, so `parse(serialize(c)) == c`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("[{section}] {key}: cannot parse {value:?}")]
    Value { section: String, key: String, value: String },
    #[error("[{section}] missing required key {key}")]
    Missing { section: String, key: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: i + 1,
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                cfg.sections.entry(section.clone()).or_default();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            let key = k.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, message: "empty key".into() });
            }
            cfg.set(&section, key, v.trim());
        }
        Ok(cfg)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    /// Looks in `section`, then the top level.
    pub fn lookup(&self, section: &str, key: &str) -> Option<&str> {
        self.get(section, key).or_else(|| self.get("", key))
    }

    pub fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        match self.lookup(section, key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError::Value {
                section: section.into(),
                key: key.into(),
                value: v.into(),
            }),
        }
    }

    pub fn parsed_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.parsed(section, key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list(&self, section: &str, key: &str) -> Vec<String> {
        self.lookup(section, key)
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default()
    }

    /// Keys of `section` starting with `prefix`, with the prefix stripped.
    pub fn with_prefix<'a>(&'a self, section: &str, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        self.sections
            .get(section)
            .into_iter()
            .flat_map(|m| m.iter())
            .filter_map(move |(k, v)| k.strip_prefix(prefix).map(|rest| (rest, v.as_str())))
    }

    pub fn sections(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.sections.values().all(|m| m.is_empty())
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, keys) in &self.sections {
            if !name.is_empty() {
                if !first {
                    writeln!(f)?;
                }
                writeln!(f, "[{name}]")?;
            }
            for (k, v) in keys {
                writeln!(f, "{k} = {v}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let c = Config::parse("seed = 7 # master\n[verify]\nspecs = Z*Z, Z5*Z5\nrho_ub.Z5*Z5 = 0.8965\n").unwrap();
        assert_eq!(c.get("", "seed"), Some("7"));
        assert_eq!(c.lookup("verify", "seed"), Some("7"));
        assert_eq!(c.list("verify", "specs"), vec!["Z*Z", "Z5*Z5"]);
        let rho: Vec<_> = c.with_prefix("verify", "rho_ub.").collect();
        assert_eq!(rho, vec![("Z5*Z5", "0.8965")]);
    }

    #[test]
    fn round_trip() {
        let text = "seed = 1\n\n[perc]\nR = 10\np = 0.4\n\n[saw]\nnmax = 10\n";
        let c = Config::parse(text).unwrap();
        assert_eq!(c.to_string(), text);
        assert_eq!(Config::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn errors() {
        assert!(matches!(Config::parse("[oops\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(Config::parse("novalue\n"), Err(ConfigError::Syntax { .. })));
        let c = Config::parse("R = ten\n").unwrap();
        assert!(c.parsed::<usize>("", "R").is_err());
    }
}

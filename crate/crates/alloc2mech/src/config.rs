//! Flat `key = value` experiment configuration.
//!
//! A config file holds one assignment per line; `#` starts a comment. Command
//! line overrides are applied on top and win. Before a run the config is
//! checked against the scenario's parameter schema and missing keys get their
//! defaults, so the rendered effective config fully determines the run.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Float,
    Int,
    FloatList,
    Text,
}

/// One entry of a scenario's parameter schema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

impl Param {
    pub const fn new(
        key: &'static str,
        kind: Kind,
        default: Option<&'static str>,
        help: &'static str,
    ) -> Self {
        Param {
            key,
            kind,
            default,
            help,
        }
    }
}

/// Keys every scenario accepts.
pub const COMMON: &[Param] = &[
    Param::new("scenario", Kind::Text, None, "scenario name"),
    Param::new("seed", Kind::Int, Some("1"), "base seed of all randomness"),
    Param::new("out", Kind::Text, Some("out"), "output directory"),
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value", k + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::config(format!("line {}: empty key", k + 1)));
            }
            if c.entries
                .insert(key.to_owned(), value.trim().to_owned())
                .is_some()
            {
                return Err(Error::config(format!(
                    "line {}: duplicate key {key:?}",
                    k + 1
                )));
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Input {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Sets or overrides a key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_owned(), value.into());
    }

    /// Parses a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override {pair:?} is not key=value")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::config(format!("missing key {key:?}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.str(key)?)
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let v = self.str(key)?;
        parse_count(v)
            .ok_or_else(|| Error::config(format!("{key}: {v:?} is not a nonnegative integer")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        Ok(self.u64(key)? as usize)
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        self.str(key)?
            .split(',')
            .map(|v| parse_f64(key, v.trim()))
            .collect()
    }

    /// Checks keys and types against `COMMON` plus `schema` and fills in
    /// defaults.
    pub fn validate(&mut self, schema: &[Param]) -> Result<()> {
        let all: Vec<&Param> = COMMON.iter().chain(schema).collect();
        for key in self.entries.keys() {
            if !all.iter().any(|p| p.key == key) {
                return Err(Error::config(format!(
                    "unknown key {key:?} for this scenario"
                )));
            }
        }
        for p in all {
            if !self.contains(p.key) {
                match p.default {
                    Some(d) => self.set(p.key, d),
                    None => return Err(Error::config(format!("missing required key {:?}", p.key))),
                }
            }
            match p.kind {
                Kind::Float => {
                    self.f64(p.key)?;
                }
                Kind::Int => {
                    self.u64(p.key)?;
                }
                Kind::FloatList => {
                    self.f64_list(p.key)?;
                }
                Kind::Text => {}
            }
        }
        Ok(())
    }

    /// Sorted `key = value` lines.
    pub fn render(&self) -> String {
        let mut s = String::from("# alloc2mech effective config v1\n");
        for (k, v) in &self.entries {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    /// Effective config without the output directory, which does not affect
    /// results.
    pub fn render_for_provenance(&self) -> String {
        let mut c = self.clone();
        c.entries.remove("out");
        c.render()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::config(format!("{key}: {v:?} is not a finite number")))
}

/// Integers, allowing `1e6`-style literals and `_` separators.
fn parse_count(v: &str) -> Option<u64> {
    let v = v.replace('_', "");
    if let Ok(n) = v.parse::<u64>() {
        return Some(n);
    }
    let f: f64 = v.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < 1.8e19).then_some(f as u64)
}

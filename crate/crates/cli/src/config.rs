// Copyright 2026 The phasecov Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Run configuration: CLI flags override the config file, which overrides
//! built-in defaults. The config file (pointed at by `PHASECOV_CONFIG`) is a
//! flat `key = value` text format with `#` comments.

use anyhow::{bail, Context, Result};
use std::collections::HashMap;
use std::path::Path;

pub const CONFIG_ENV: &str = "PHASECOV_CONFIG";

/// Flat key-value pairs loaded from the config file.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    /// Load from `PHASECOV_CONFIG` if set; empty config otherwise.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CONFIG_ENV) {
            Ok(path) if !path.is_empty() => Self::from_path(Path::new(&path)),
            _ => Ok(Self::default()),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not 'key = value': {raw:?}", lineno + 1);
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// CLI flag (if present) wins; else the config value; else the default.
    pub fn resolve<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| anyhow::anyhow!("config key '{key}' = {raw:?}: {e}")),
            None => Ok(default),
        }
    }

    /// Like [`FileConfig::resolve`] but without a default.
    pub fn resolve_opt<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key '{key}' = {raw:?}: {e}")),
            None => Ok(None),
        }
    }
}

/// Inclusive `a..b` range as used by `--k-range 0..3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub min: u32,
    pub max: u32,
}

impl std::str::FromStr for KRange {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let body = s.trim();
        let (lo, hi) = if let Some((lo, hi)) = body.split_once("..=") {
            (lo, hi)
        } else if let Some((lo, hi)) = body.split_once("..") {
            (lo, hi)
        } else {
            // a single value is the degenerate range
            let v: u32 = body.parse().map_err(|e| format!("bad k value {body:?}: {e}"))?;
            return Ok(KRange { min: v, max: v });
        };
        let min: u32 = lo.trim().parse().map_err(|e| format!("bad k range start {lo:?}: {e}"))?;
        let max: u32 = hi.trim().parse().map_err(|e| format!("bad k range end {hi:?}: {e}"))?;
        if min > max {
            return Err(format!("empty k range {body:?}"));
        }
        Ok(KRange { min, max })
    }
}

impl std::fmt::Display for KRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

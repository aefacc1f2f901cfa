use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use conekernel::section::read_spectral_file;
use conekernel::{CircleSection, CrossSection, SphereSection};

/// Keys accepted both as `--key` flags and in a config file.
pub const KEYS: &[&str] = &[
    "section", "L", "n", "a", "file", "t", "r", "s", "dh", "tol", "k-max", "c-list", "out", "csv", "suite", "seed",
    "samples", "z", "delta", "epsilon0", "n-max", "t0", "t1", "pole", "nr", "ntheta", "steps",
];

/// A configuration problem; always exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Usage<T> = std::result::Result<T, UsageError>;

fn usage<T>(message: impl Into<String>) -> Usage<T> {
    Err(UsageError(message.into()))
}

/// Merged settings; flags override the config file.
#[derive(Debug, Default, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str) -> Usage<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return usage(format!("config line {}: expected `key = value`", i + 1));
            };
            let key = key.trim().trim_start_matches("--");
            if !KEYS.contains(&key) {
                return usage(format!("config line {}: unknown key '{key}'", i + 1));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn from_file(path: &Path) -> Usage<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_text(&text),
            Err(e) => usage(format!("cannot read config {}: {e}", path.display())),
        }
    }

    pub fn set(&mut self, key: &str, value: Option<&String>) {
        debug_assert!(KEYS.contains(&key));
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Usage<f64> {
        self.get(key).map_or(Ok(default), |v| parse_number(key, v))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Usage<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().or_else(|_| usage(format!("--{key}: '{v}' is not a nonnegative integer"))),
        }
    }

    pub fn grid(&self, key: &str) -> Usage<Option<Vec<f64>>> {
        self.get(key).map(|v| parse_grid(key, v)).transpose()
    }

    /// Builds the cross-section named by `section`.
    pub fn section(&self) -> Usage<Arc<dyn CrossSection>> {
        let Some(kind) = self.get("section") else {
            return usage("--section is required (circle, sphere or matrix)");
        };
        let built: conekernel::Result<Arc<dyn CrossSection>> = match kind {
            "circle" => {
                let l = self.f64_or("L", 2.0 * PI)?;
                let a = self.f64_or("a", 0.0)?;
                CircleSection::new(l, a).map(|s| Arc::new(s) as _)
            }
            "sphere" => {
                let n = self.usize_or("n", 3)?;
                let a = self.f64_or("a", 0.0)?;
                SphereSection::new(n, a).map(|s| Arc::new(s) as _)
            }
            "matrix" => {
                let Some(file) = self.get("file") else {
                    return usage("--section matrix needs --file");
                };
                read_spectral_file(file).map(|s| Arc::new(s) as _)
            }
            other => return usage(format!("unknown section '{other}' (circle, sphere or matrix)")),
        };
        built.or_else(|e| usage(e.to_string()))
    }
}

/// Parses a number; `pi` and `k*pi` / `pi/k` forms are accepted.
pub fn parse_number(key: &str, text: &str) -> Usage<f64> {
    let t = text.trim();
    let value = if let Some(rest) = t.strip_suffix("*pi") {
        rest.parse::<f64>().map(|k| k * PI)
    } else if let Some(rest) = t.strip_prefix("pi/") {
        rest.parse::<f64>().map(|k| PI / k)
    } else if t == "pi" {
        Ok(PI)
    } else {
        t.parse::<f64>()
    };
    match value {
        Ok(v) if v.is_finite() => Ok(v),
        _ => usage(format!("--{key}: '{text}' is not a finite number")),
    }
}

/// A comma list of numbers or ranges `a:b:step`, ranges inclusive of `b`.
pub fn parse_grid(key: &str, text: &str) -> Usage<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => out.push(parse_number(key, single)?),
            [a, b, step] => {
                let (a, b, step) = (parse_number(key, a)?, parse_number(key, b)?, parse_number(key, step)?);
                if !(step > 0.0) {
                    return usage(format!("--{key}: range step must be positive in '{item}'"));
                }
                let count = ((b - a) / step + 1e-9).floor();
                if count >= 0.0 {
                    if count > 1e6 {
                        return usage(format!("--{key}: range '{item}' is too long"));
                    }
                    out.extend((0..=count as usize).map(|i| a + step * i as f64));
                }
            }
            _ => return usage(format!("--{key}: cannot parse '{item}' (use a list or a:b:step)")),
        }
    }
    Ok(out)
}

//! Flat `key=value` experiment configuration.
//!
//! No nested document language: lines are `section.key = value`, `#` starts a
//! comment, blank lines are ignored. Complex values use `a+bi` form
//! (e.g. `spectral.lambda = 0+1i`).

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got '{raw}'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!("line {}: empty key or value", lineno + 1)));
            }
            entries.insert(key.to_string(), value.to_string());
        }
        if entries.is_empty() {
            return Err(Error::Config("config contains no key=value entries".into()));
        }
        Ok(ExperimentConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// All entries, for echoing into reports.
    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: '{v}' is not a number"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{key}: '{v}' is not a nonnegative integer"))),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    /// Complex scalar in `a+bi` / `a-bi` / `bi` / `a` form.
    pub fn complex_or(&self, key: &str, default: Complex64) -> Result<Complex64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_complex(v)
                .ok_or_else(|| Error::Config(format!("{key}: '{v}' is not a complex number"))),
        }
    }

    /// Dyadic h sweep `2^-j_min .. 2^-j_max` from `grid.h_pow_min/max`.
    pub fn h_grid(&self) -> Result<Vec<f64>> {
        let lo = self.usize_or("grid.h_pow_min", 1)?;
        let hi = self.usize_or("grid.h_pow_max", 8)?;
        if lo > hi {
            return Err(Error::Config("grid.h_pow_min must be <= grid.h_pow_max".into()));
        }
        Ok((lo..=hi).map(|j| 2f64.powi(-(j as i32))).collect())
    }
}

pub fn parse_complex(v: &str) -> Option<Complex64> {
    let s: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(re) = s.parse::<f64>() {
        return Some(Complex64::new(re, 0.0));
    }
    let body = s.strip_suffix('i')?;
    // split into real and imaginary at the last +/- that is not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx] as char;
        if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
            split = Some(idx);
            break;
        }
    }
    match split {
        Some(idx) => {
            let re: f64 = body[..idx].parse().ok()?;
            let im_str = &body[idx..];
            let im: f64 = if im_str == "+" {
                1.0
            } else if im_str == "-" {
                -1.0
            } else {
                im_str.parse().ok()?
            };
            Some(Complex64::new(re, im))
        }
        None => {
            let im: f64 = if body.is_empty() || body == "+" {
                1.0
            } else if body == "-" {
                -1.0
            } else {
                body.parse().ok()?
            };
            Some(Complex64::new(0.0, im))
        }
    }
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dynsys::MapForm;
use crate::error::{Error, Result};
use crate::mpfloat::{parse_rational, Prec, Rational};
use crate::orbit::{ErrorMode, SearchMode, DEFAULT_M_CAP};

/// Keys accepted in a config file; they mirror the long flag names.
pub const KNOWN_KEYS: &[&str] = &[
    "mu",
    "mu-start",
    "mu-end",
    "mu-step",
    "x0",
    "N",
    "p",
    "form",
    "mode",
    "search",
    "m-cap",
    "jobs",
    "out",
    "paper-scale",
    "iterations",
    "transient",
    "seed",
    "spot-checks",
];

/// Flat `key = value` settings. Blank lines and `#` comments are skipped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Parse(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        ConfigFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Parse(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    pub fn pick_rational(&self, flag: Option<&str>, key: &str) -> Result<Option<Rational>> {
        flag.or(self.get(key)).map(parse_rational).transpose()
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.get(key) {
            None | Some("false") | Some("0") => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some(v) => Err(Error::Parse(format!(
                "config key {key}: expected true|false, got {v:?}"
            ))),
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Settings of a parameter sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub mu_start: Rational,
    pub mu_end: Rational,
    pub mu_step: Rational,
    pub x0: Rational,
    pub n: usize,
    pub p: i32,
    pub form: MapForm,
    pub mode: ErrorMode,
    pub search: SearchMode,
    pub m_cap: Prec,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    /// Orbit length and discarded prefix of Lyapunov estimates.
    pub iterations: usize,
    pub transient: usize,
    /// Seed and count of the post-sweep minimality re-checks.
    pub seed: u64,
    pub spot_checks: usize,
}

impl SweepConfig {
    /// `N = 500`, `mu = 0.1, 0.2, ..., 4.0`.
    pub fn desk() -> SweepConfig {
        SweepConfig {
            mu_start: q(1, 10),
            mu_end: q(4, 1),
            mu_step: q(1, 10),
            x0: q(22, 100),
            n: 500,
            p: 6,
            form: MapForm::Form1,
            mode: ErrorMode::Relative,
            search: SearchMode::BracketBisect,
            m_cap: DEFAULT_M_CAP,
            jobs: None,
            out: None,
            iterations: 10_000,
            transient: 200,
            seed: 0,
            spot_checks: 5,
        }
    }

    /// `N = 2000`, `mu = 0.005, 0.010, ..., 4.0`.
    pub fn paper_scale() -> SweepConfig {
        SweepConfig {
            mu_start: q(1, 200),
            mu_step: q(1, 200),
            n: 2000,
            ..SweepConfig::desk()
        }
    }

    /// Grid points `mu_start + k * mu_step <= mu_end` that lie in `(0, 4]`.
    pub fn grid(&self) -> Result<Vec<Rational>> {
        if !self.mu_step.is_positive() {
            return Err(Error::InvalidParameter("mu-step must be positive".into()));
        }
        if self.mu_start > self.mu_end {
            return Err(Error::InvalidParameter("mu-start exceeds mu-end".into()));
        }
        let four = q(4, 1);
        let mut out = Vec::new();
        let mut k = BigInt::zero();
        loop {
            let mu = &self.mu_start + &self.mu_step * Rational::from_integer(k.clone());
            if mu > self.mu_end {
                break;
            }
            if mu.is_positive() && mu <= four {
                out.push(mu);
            }
            k += BigInt::one();
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let c = ConfigFile::parse("# comment\nN = 40\n\nform=form3\nmu-start=0.25\n").unwrap();
        assert_eq!(c.pick::<usize>(None, "N").unwrap(), Some(40));
        assert_eq!(c.pick::<usize>(Some(7), "N").unwrap(), Some(7));
        assert_eq!(c.pick::<MapForm>(None, "form").unwrap(), Some(MapForm::Form3));
        assert_eq!(c.pick_rational(None, "mu-start").unwrap(), Some(q(1, 4)));
        assert_eq!(c.pick_rational(None, "mu-end").unwrap(), None);
        assert!(ConfigFile::parse("bogus=1").is_err());
        assert!(ConfigFile::parse("N 40").is_err());
        assert!(ConfigFile::parse("N=x").unwrap().pick::<usize>(None, "N").is_err());
    }

    #[test]
    fn desk_grid() {
        let g = SweepConfig::desk().grid().unwrap();
        assert_eq!(g.len(), 40);
        assert_eq!(g[0], q(1, 10));
        assert_eq!(g[39], q(4, 1));
        assert_eq!(SweepConfig::paper_scale().grid().unwrap().len(), 800);
    }

    #[test]
    fn off_grid_range_is_empty() {
        let cfg = SweepConfig {
            mu_start: q(5, 1),
            mu_end: q(5, 1),
            ..SweepConfig::desk()
        };
        assert!(cfg.grid().unwrap().is_empty());
        let bad = SweepConfig {
            mu_step: q(0, 1),
            ..SweepConfig::desk()
        };
        assert!(bad.grid().is_err());
    }
}

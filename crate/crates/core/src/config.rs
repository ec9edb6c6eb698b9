//! Job configuration: a flat `key = value` file with monomial inputs `c·π0^k`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{BaseField, K0Element};

/// `coeff · π0^exp` with an integer coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialSpec {
    pub coeff: i64,
    pub exp: i64,
}

impl MonomialSpec {
    pub fn new(coeff: i64, exp: i64) -> Self {
        MonomialSpec { coeff, exp }
    }

    pub fn to_k0(&self, base: &Arc<BaseField>) -> K0Element {
        K0Element::monomial(base, self.coeff, self.exp)
    }
}

impl fmt::Display for MonomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*pi^{}", self.coeff, self.exp)
    }
}

impl FromStr for MonomialSpec {
    type Err = Error;

    /// Accepts `c*pi^k`, `c·π0^k`, `pi^k`, `-pi`, `c`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse monomial '{s}' (expected c*pi^k)"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t
            .replace('·', "*")
            .replace("π0", "pi")
            .replace('π', "pi")
            .replace("pi0", "pi");
        let Some(pos) = t.find("pi") else {
            return Ok(MonomialSpec::new(t.parse().map_err(|_| bad())?, 0));
        };
        let head = t[..pos].trim_end_matches('*');
        let coeff = match head {
            "" | "+" => 1,
            "-" => -1,
            h => h.parse().map_err(|_| bad())?,
        };
        let tail = &t[pos + 2..];
        let exp = match tail {
            "" => 1,
            _ => tail.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        if coeff == 0 {
            return Err(Error::Config(format!("monomial '{s}' has zero coefficient")));
        }
        Ok(MonomialSpec::new(coeff, exp))
    }
}

/// Parameters of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobConfig {
    pub p: u32,
    pub e0: u32,
    pub a1: MonomialSpec,
    pub mu: MonomialSpec,
    /// unit `u` in `π0^{e0} = p·u`
    pub unit: i64,
    /// target `v2`-precision of reported results
    pub precision: Option<i64>,
    pub sample: Option<usize>,
    pub seed: Option<u64>,
}

impl JobConfig {
    /// The worked example: `p = 3`, `e0 = 6`, `a1 = μ = π0^{-1}`.
    pub fn reference_example() -> Self {
        JobConfig {
            p: 3,
            e0: 6,
            a1: MonomialSpec::new(1, -1),
            mu: MonomialSpec::new(1, -1),
            unit: 1,
            precision: None,
            sample: None,
            seed: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = None;
        let mut e0 = None;
        let mut a1 = None;
        let mut mu = None;
        let mut cfg_unit = 1;
        let mut precision = None;
        let mut sample = None;
        let mut seed = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| -> Result<i64> {
                v.parse()
                    .map_err(|_| Error::Config(format!("line {}: '{key}' needs an integer, got '{v}'", n + 1)))
            };
            match key {
                "p" => p = Some(int(value)?),
                "e0" => e0 = Some(int(value)?),
                "a1" => a1 = Some(value.parse()?),
                "mu" => mu = Some(value.parse()?),
                "unit" => cfg_unit = int(value)?,
                "precision" => precision = Some(int(value)?),
                "sample" => sample = Some(int(value)?),
                "seed" => seed = Some(int(value)?),
                other => return Err(Error::Config(format!("line {}: unknown key '{other}'", n + 1))),
            }
        }
        let need = |v: Option<i64>, k: &str| v.ok_or_else(|| Error::Config(format!("missing key '{k}'")));
        let p = need(p, "p")?;
        let e0 = need(e0, "e0")?;
        if !(2..=1000).contains(&p) || !(1..=10_000).contains(&e0) {
            return Err(Error::Config(format!("p = {p}, e0 = {e0} out of range")));
        }
        if sample.is_some_and(|s| s < 0) || seed.is_some_and(|s| s < 0) {
            return Err(Error::Config("sample and seed must be non-negative".into()));
        }
        Ok(JobConfig {
            p: p as u32,
            e0: e0 as u32,
            a1: a1.ok_or_else(|| Error::Config("missing key 'a1'".into()))?,
            mu: mu.ok_or_else(|| Error::Config("missing key 'mu'".into()))?,
            unit: cfg_unit,
            precision,
            sample: sample.map(|s| s as usize),
            seed: seed.map(|s| s as u64),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Default target precision `2·p²·e0`.
    pub fn target_precision(&self) -> i64 {
        self.precision.unwrap_or(2 * (self.p as i64).pow(2) * self.e0 as i64)
    }
}

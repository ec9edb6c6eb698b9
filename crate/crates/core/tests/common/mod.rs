#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use wittscaffold::config::{JobConfig, MonomialSpec};
use wittscaffold::witt::WittCoefficient;

/// `F_p[t]/(t^N)`, a ring of characteristic `p` with a nontrivial Frobenius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

pub const TRUNC_LEN: usize = 8;

impl TruncPoly {
    pub fn new(p: u64, c: Vec<u64>) -> Self {
        assert_eq!(c.len(), TRUNC_LEN);
        TruncPoly {
            p,
            c: c.into_iter().map(|x| x % p).collect(),
        }
    }
}

impl WittCoefficient for TruncPoly {
    fn add(&self, rhs: &Self) -> Self {
        TruncPoly::new(self.p, self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect())
    }
    fn sub(&self, rhs: &Self) -> Self {
        TruncPoly::new(self.p, self.c.iter().zip(&rhs.c).map(|(a, b)| a + self.p - b).collect())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = vec![0u64; TRUNC_LEN];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate().take(TRUNC_LEN - i) {
                out[i + j] = (out[i + j] + a * b) % self.p;
            }
        }
        TruncPoly::new(self.p, out)
    }
    fn neg(&self) -> Self {
        TruncPoly::new(self.p, self.c.iter().map(|a| self.p - a).collect())
    }
    fn mul_int(&self, n: i64) -> Self {
        let k = n.rem_euclid(self.p as i64) as u64;
        TruncPoly::new(self.p, self.c.iter().map(|a| a * k).collect())
    }
    fn zero_like(&self) -> Self {
        TruncPoly::new(self.p, vec![0; TRUNC_LEN])
    }
    fn one_like(&self) -> Self {
        let mut c = vec![0; TRUNC_LEN];
        c[0] = 1;
        TruncPoly::new(self.p, c)
    }
}

pub fn reference() -> JobConfig {
    JobConfig::reference_example()
}

pub fn second_scenario() -> JobConfig {
    JobConfig {
        p: 2,
        e0: 4,
        ..JobConfig::reference_example()
    }
}

pub fn negative_control() -> JobConfig {
    JobConfig {
        a1: MonomialSpec::new(1, -2),
        ..JobConfig::reference_example()
    }
}

pub fn config_text(cfg: &JobConfig) -> String {
    let mut s = format!(
        "p = {}\ne0 = {}\na1 = {}\nmu = {}\nunit = {}\n",
        cfg.p, cfg.e0, cfg.a1, cfg.mu, cfg.unit
    );
    if let Some(n) = cfg.precision {
        s.push_str(&format!("precision = {n}\n"));
    }
    s
}

/// Writes `cfg` to a fresh file and returns the directory guard with the path.
pub fn write_config(cfg: &JobConfig) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("job.conf");
    std::fs::write(&path, config_text(cfg)).expect("write config");
    (dir, path)
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittscaffold"))
        .args(args)
        .output()
        .expect("binary runs")
}

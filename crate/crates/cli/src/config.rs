//! Run configuration: a flat `key=value` file overlaid by command-line flags.

use crate::error::CliError;
use lowlying::rmt::SymmetryGroup;
use lowlying::satake::FamilyTag;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub command: String,
    pub family: Option<FamilyTag>,
    pub weights: Vec<u32>,
    pub sigma: Option<f64>,
    pub sigma2: Option<f64>,
    pub two_level: bool,
    pub maass: Option<PathBuf>,
    pub synthetic_seed: Option<u64>,
    pub euler: Option<u64>,
    pub seed: Option<u64>,
    pub groups: Vec<SymmetryGroup>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub per_sample: bool,
    pub r_values: Vec<f64>,
    pub hecke_cache: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `12,16,20` or `12..24` (even weights, inclusive).
pub fn parse_weights(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || usage(format!("bad weight list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).filter(|k| k % 2 == 0).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| usage(format!("bad {what} `{t}`"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(s: &str, key: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| usage(format!("bad value for {key}: `{s}`")))
}

fn parse_bool(s: &str, key: &str) -> Result<bool, CliError> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("bad value for {key}: `{s}`"))),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", no + 1)))?;
            c.set(k.trim(), v.trim())?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "command" => self.command = v.to_string(),
            "family" => self.family = Some(v.parse().map_err(|_| usage(format!("unknown family `{v}`")))?),
            "weights" => self.weights = parse_weights(v)?,
            "sigma" => self.sigma = Some(parse_one(v, key)?),
            "sigma2" => self.sigma2 = Some(parse_one(v, key)?),
            "two_level" => self.two_level = parse_bool(v, key)?,
            "maass" => self.maass = Some(PathBuf::from(v)),
            "synthetic_seed" => self.synthetic_seed = Some(parse_one(v, key)?),
            "euler" => self.euler = Some(parse_one(v, key)?),
            "seed" => self.seed = Some(parse_one(v, key)?),
            "groups" => self.groups = parse_list(v, "group")?,
            "n" => self.n = Some(parse_one(v, key)?),
            "samples" => self.samples = Some(parse_one(v, key)?),
            "per_sample" => self.per_sample = parse_bool(v, key)?,
            "r" => self.r_values = parse_list(v, "R value")?,
            "hecke_cache" => self.hecke_cache = Some(PathBuf::from(v)),
            "output" => self.output = Some(PathBuf::from(v)),
            _ => return Err(usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Every set field as key → value, in a fixed order.
    pub fn entries(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        if !self.command.is_empty() {
            m.insert("command", self.command.clone());
        }
        if let Some(f) = self.family {
            m.insert("family", f.name().to_string());
        }
        if !self.weights.is_empty() {
            m.insert("weights", join(&self.weights));
        }
        let mut opt = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k, v);
            }
        };
        opt("sigma", self.sigma.map(|x| x.to_string()));
        opt("sigma2", self.sigma2.map(|x| x.to_string()));
        opt("maass", self.maass.as_ref().map(|p| p.display().to_string()));
        opt("synthetic_seed", self.synthetic_seed.map(|x| x.to_string()));
        opt("euler", self.euler.map(|x| x.to_string()));
        opt("seed", self.seed.map(|x| x.to_string()));
        opt("n", self.n.map(|x| x.to_string()));
        opt("samples", self.samples.map(|x| x.to_string()));
        opt("hecke_cache", self.hecke_cache.as_ref().map(|p| p.display().to_string()));
        opt("output", self.output.as_ref().map(|p| p.display().to_string()));
        if self.two_level {
            m.insert("two_level", "true".into());
        }
        if self.per_sample {
            m.insert("per_sample", "true".into());
        }
        if !self.groups.is_empty() {
            m.insert("groups", join(&self.groups));
        }
        if !self.r_values.is_empty() {
            m.insert("r", join(&self.r_values));
        }
        m
    }

    pub fn render(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Fields of `other` that are set replace those of `self`.
    pub fn overlay(&mut self, other: &RunConfig) {
        for (k, v) in other.entries() {
            self.set(k, &v).expect("rendered values parse");
        }
    }

    /// Canonical text hashed into the output metadata; the output path is
    /// left out so that the same run written elsewhere hashes the same.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        c.render()
    }
}

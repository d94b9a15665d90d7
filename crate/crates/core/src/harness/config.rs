//! Experiment configuration in a flat `key = value` text format.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::channel::{db_to_linear, RadioParams};
use crate::clustering::{KMeansParams, SpectralConfig};
use crate::error::{Error, Result};
use crate::topology::MobilityParams;

/// Which earlier partition a step's handovers are counted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandoverReference {
    /// The per-instant sum-rate-maximizing partition of the previous instant.
    Benchmark,
    /// The same alpha branch's own previous partition.
    Own,
}

impl HandoverReference {
    fn as_str(&self) -> &'static str {
        match self {
            HandoverReference::Benchmark => "benchmark",
            HandoverReference::Own => "own",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Users (`K`).
    pub num_users: usize,
    /// Base stations (`L`).
    pub num_bs: usize,
    /// Subnetworks (`M`).
    pub num_subnetworks: usize,
    pub beta: f64,
    pub pt_over_sigma2_db: f64,
    pub d_min: f64,
    pub alpha_grid: Vec<f64>,
    /// Time instants per trial, including the initial one.
    pub time_steps: usize,
    pub realizations: usize,
    pub master_seed: u64,
    pub mobility: MobilityParams,
    pub kmeans: KMeansParams,
    pub outputs: PathBuf,
    pub evaluate_zfbf: bool,
    pub handover_reference: HandoverReference,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            num_users: 30,
            num_bs: 50,
            num_subnetworks: 20,
            beta: 4.0,
            pt_over_sigma2_db: 0.0,
            d_min: 0.01,
            alpha_grid: vec![0.0, 0.25, 0.5, 0.75, 0.9, 1.0],
            time_steps: 5,
            realizations: 100,
            master_seed: 1,
            mobility: MobilityParams::default(),
            kmeans: KMeansParams::default(),
            outputs: PathBuf::from("out"),
            evaluate_zfbf: true,
            handover_reference: HandoverReference::Benchmark,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for key `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("cannot parse `{value}` as a flag for key `{key}`"))),
    }
}

impl ExperimentConfig {
    pub fn radio(&self) -> RadioParams {
        RadioParams {
            beta: self.beta,
            pt_over_sigma2: db_to_linear(self.pt_over_sigma2_db),
            d_min: self.d_min,
        }
    }

    /// Clustering settings for one alpha; the seed is set per step.
    pub fn spectral(&self, alpha: f64, seed: u64) -> SpectralConfig {
        SpectralConfig {
            alpha,
            num_subnetworks: self.num_subnetworks,
            kmeans: self.kmeans,
            seed,
        }
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "K" => self.num_users = parse(key, value)?,
            "L" => self.num_bs = parse(key, value)?,
            "M" => self.num_subnetworks = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "pt_over_sigma2_db" => self.pt_over_sigma2_db = parse(key, value)?,
            "d_min" => self.d_min = parse(key, value)?,
            "alpha_grid" => {
                self.alpha_grid = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse(key, s))
                    .collect::<Result<_>>()?
            }
            "time_steps" => self.time_steps = parse(key, value)?,
            "realizations" => self.realizations = parse(key, value)?,
            "master_seed" => self.master_seed = parse(key, value)?,
            "max_transition" => self.mobility.max_transition = parse(key, value)?,
            "min_transition" => self.mobility.min_transition = parse(key, value)?,
            "pause_probability" => self.mobility.pause_probability = parse(key, value)?,
            "kmeans_restarts" => self.kmeans.restarts = parse(key, value)?,
            "kmeans_max_iters" => self.kmeans.max_iters = parse(key, value)?,
            "kmeans_tol" => self.kmeans.tol = parse(key, value)?,
            "outputs" => self.outputs = PathBuf::from(value),
            "evaluate_zfbf" => self.evaluate_zfbf = parse_bool(key, value)?,
            "handover_reference" => {
                self.handover_reference = match value {
                    "benchmark" => HandoverReference::Benchmark,
                    "own" => HandoverReference::Own,
                    _ => return Err(Error::Config(format!("unknown handover_reference `{value}`"))),
                }
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(key, value)
    }

    /// Parses the text format on top of the defaults.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::parse_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 || self.num_bs == 0 || self.num_subnetworks == 0 {
            return Err(Error::Config("K, L and M must be at least 1".into()));
        }
        if self.num_subnetworks > self.num_bs {
            return Err(Error::Config(format!(
                "M = {} exceeds L = {}",
                self.num_subnetworks, self.num_bs
            )));
        }
        if self.time_steps == 0 || self.realizations == 0 {
            return Err(Error::Config("time_steps and realizations must be at least 1".into()));
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::Config("alpha_grid is empty".into()));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::Config(format!("alpha {a} outside [0, 1]")));
        }
        if self.kmeans.restarts == 0 || self.kmeans.max_iters == 0 || !(self.kmeans.tol >= 0.0) {
            return Err(Error::Config("invalid k-means settings".into()));
        }
        if !self.pt_over_sigma2_db.is_finite() {
            return Err(Error::Config("pt_over_sigma2_db must be finite".into()));
        }
        self.radio().validate()?;
        self.mobility.validate()
    }

    /// Fully resolved configuration in the same text format.
    pub fn echo(&self) -> String {
        let alphas: Vec<String> = self.alpha_grid.iter().map(|a| a.to_string()).collect();
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("K", self.num_users.to_string());
        put("L", self.num_bs.to_string());
        put("M", self.num_subnetworks.to_string());
        put("beta", self.beta.to_string());
        put("pt_over_sigma2_db", self.pt_over_sigma2_db.to_string());
        put("d_min", self.d_min.to_string());
        put("alpha_grid", alphas.join(","));
        put("time_steps", self.time_steps.to_string());
        put("realizations", self.realizations.to_string());
        put("master_seed", self.master_seed.to_string());
        put("max_transition", self.mobility.max_transition.to_string());
        put("min_transition", self.mobility.min_transition.to_string());
        put("pause_probability", self.mobility.pause_probability.to_string());
        put("kmeans_restarts", self.kmeans.restarts.to_string());
        put("kmeans_max_iters", self.kmeans.max_iters.to_string());
        put("kmeans_tol", self.kmeans.tol.to_string());
        put("outputs", self.outputs.display().to_string());
        put("evaluate_zfbf", self.evaluate_zfbf.to_string());
        put("handover_reference", self.handover_reference.as_str().to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_echoes() {
        let text = "# demo\nK = 10\nL=30\nM = 9\nalpha_grid = 0.5, 1\npt_over_sigma2_db = 10\nevaluate_zfbf = false\n";
        let cfg = ExperimentConfig::parse_str(text).unwrap();
        assert_eq!((cfg.num_users, cfg.num_bs, cfg.num_subnetworks), (10, 30, 9));
        assert_eq!(cfg.alpha_grid, vec![0.5, 1.0]);
        assert!((cfg.radio().pt_over_sigma2 - 10.0).abs() < 1e-12);
        assert!(!cfg.evaluate_zfbf);
        assert_eq!(ExperimentConfig::parse_str(&cfg.echo()).unwrap(), cfg);
    }

    #[test]
    fn zero_db_is_unit_ratio() {
        assert_eq!(ExperimentConfig::default().radio().pt_over_sigma2, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse_str("nonsense").is_err());
        assert!(ExperimentConfig::parse_str("colour = red").is_err());
        assert!(ExperimentConfig::parse_str("K = many").is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.alpha_grid.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.alpha_grid = vec![1.5];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.num_subnetworks = 60;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn overrides() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_override("realizations=7").unwrap();
        assert_eq!(cfg.realizations, 7);
        assert!(cfg.apply_override("realizations").is_err());
    }
}

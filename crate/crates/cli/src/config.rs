//! Flat `key = value` experiment configuration.
//!
//! One dotted key per line, `#` starts a comment, lists are comma separated:
//!
//! ```text
//! experiment.id = xy-sweep
//! model.L = 5
//! model.d = 3, 4, 5, 6
//! train.beta_list = 1.5, 2, 4
//! ```
//!
//! Values from later sources (command-line flags) replace earlier ones.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thermovar_core::estimator::ShotConfig;
use thermovar_core::optim::{GradientMode, LossMode, TrainConfig};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    IsingSweep,
    IsingScaling,
    XySweep,
    KOrderStudy,
    Prop1Check,
    Prop2Curve,
    BoundsTable,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::IsingSweep,
        ExperimentId::IsingScaling,
        ExperimentId::XySweep,
        ExperimentId::KOrderStudy,
        ExperimentId::Prop1Check,
        ExperimentId::Prop2Curve,
        ExperimentId::BoundsTable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::IsingSweep => "ising-sweep",
            ExperimentId::IsingScaling => "ising-scaling",
            ExperimentId::XySweep => "xy-sweep",
            ExperimentId::KOrderStudy => "k-order-study",
            ExperimentId::Prop1Check => "prop1-check",
            ExperimentId::Prop2Curve => "prop2-curve",
            ExperimentId::BoundsTable => "bounds-table",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown experiment id '{s}'")))
    }
}

/// Parses the flat text format into an ordered key map.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", number + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", number + 1)));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Fully resolved settings of one experiment invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub model: String,
    pub ansatz: Vec<String>,
    pub chain_lengths: Vec<usize>,
    pub n_ancilla: usize,
    pub depths: Vec<usize>,
    pub betas: Vec<f64>,
    pub orders: Vec<usize>,
    pub learning_rate: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    pub seed_base: u64,
    pub restarts: usize,
    /// `None` picks parameter shifts at order 2 and finite differences otherwise.
    pub gradient: Option<GradientMode>,
    pub fd_step: f64,
    /// Shots per measured quantity; `None` evaluates the loss exactly.
    pub shots: Option<u64>,
    /// Base seed of the shot sampler, offset by the run seed.
    pub shot_seed: u64,
    pub theta_resolution: f64,
    pub bound_orders: Vec<usize>,
    pub bound_ranks: Vec<usize>,
    pub bound_betas: Vec<f64>,
    pub bound_eps: Vec<f64>,
    /// Record measured wall time instead of 0. Breaks byte-identical reruns.
    pub wall_time: bool,
}

/// Largest chain the runners accept; the dense Gibbs oracle grows as `4^L`.
pub const MAX_CHAIN_LENGTH: usize = 10;

impl ExperimentConfig {
    pub fn defaults(id: ExperimentId) -> Self {
        let mut cfg = Self {
            id,
            model: "ising".into(),
            ansatz: vec!["ising6".into()],
            chain_lengths: vec![5],
            n_ancilla: 1,
            depths: vec![1],
            betas: vec![1.2, 1.5, 2.0, 3.0, 4.0],
            orders: vec![2],
            learning_rate: 0.1,
            max_iters: 200,
            tolerance: 1e-6,
            seed_base: 0,
            restarts: 5,
            gradient: None,
            fd_step: 1e-5,
            shots: None,
            shot_seed: 0,
            theta_resolution: 1e-3,
            bound_orders: (1..=8).collect(),
            bound_ranks: vec![1, 2, 4],
            bound_betas: vec![2.0],
            bound_eps: vec![0.0],
            wall_time: false,
        };
        match id {
            ExperimentId::IsingSweep => cfg.ansatz = vec!["ising6".into(), "ising1".into()],
            ExperimentId::IsingScaling => cfg.chain_lengths = (5..=9).collect(),
            ExperimentId::XySweep => {
                cfg.model = "xy".into();
                cfg.ansatz = vec!["xy".into()];
                cfg.depths = vec![3, 4, 5, 6];
                cfg.betas = vec![1.5, 2.0, 3.0, 4.0];
            }
            ExperimentId::KOrderStudy => {
                cfg.model = "xy".into();
                cfg.ansatz = vec!["xy".into()];
                cfg.chain_lengths = vec![3];
                cfg.n_ancilla = 3;
                cfg.depths = vec![8];
                cfg.betas = vec![0.1, 0.2, 0.3];
                cfg.orders = vec![1, 2, 3, 4];
                cfg.restarts = 30;
            }
            ExperimentId::Prop1Check => {
                cfg.ansatz = vec!["ising1".into()];
                cfg.betas = vec![1.2, 2.0];
            }
            ExperimentId::Prop2Curve => {
                cfg.ansatz = vec!["ising1".into()];
                cfg.betas = vec![0.5, 1.0, 1.2, 1.25, 2.0, 4.0];
                cfg.restarts = 1;
            }
            ExperimentId::BoundsTable => cfg.restarts = 1,
        }
        cfg
    }

    /// Defaults for the id found in `map` (or `fallback`), overridden by `map`.
    pub fn resolve(fallback: Option<ExperimentId>, map: &BTreeMap<String, String>) -> Result<Self> {
        let id = match map.get("experiment.id") {
            Some(v) => v.parse()?,
            None => fallback.ok_or_else(|| CliError::Config("experiment.id is not set".into()))?,
        };
        let mut cfg = Self::defaults(id);
        for (key, value) in map {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| CliError::Config(format!("{key}: cannot parse '{value}' as {what}"));
        match key {
            "experiment.id" => self.id = value.parse()?,
            "model.name" => self.model = value.to_string(),
            "model.ansatz" => self.ansatz = list::<String>(value).map_err(|_| bad("names"))?,
            "model.L" => self.chain_lengths = list(value).map_err(|_| bad("integers"))?,
            "model.n_A" => self.n_ancilla = value.parse().map_err(|_| bad("an integer"))?,
            "model.n_B" => self.chain_lengths = vec![value.parse().map_err(|_| bad("an integer"))?],
            "model.d" => self.depths = list(value).map_err(|_| bad("integers"))?,
            "train.beta_list" | "train.beta" => self.betas = list(value).map_err(|_| bad("numbers"))?,
            "train.K" => self.orders = list(value).map_err(|_| bad("integers"))?,
            "train.learning_rate" => self.learning_rate = value.parse().map_err(|_| bad("a number"))?,
            "train.max_iters" => self.max_iters = value.parse().map_err(|_| bad("an integer"))?,
            "train.tolerance" => self.tolerance = value.parse().map_err(|_| bad("a number"))?,
            "train.seed" => self.seed_base = value.parse().map_err(|_| bad("an integer"))?,
            "train.restarts" => self.restarts = value.parse().map_err(|_| bad("an integer"))?,
            "train.fd_step" => self.fd_step = value.parse().map_err(|_| bad("a number"))?,
            "train.gradient" => {
                self.gradient = match value {
                    "auto" => None,
                    "parameter_shift" => Some(GradientMode::ParameterShift),
                    "finite_difference" => Some(GradientMode::FiniteDifference),
                    _ => return Err(bad("auto|parameter_shift|finite_difference")),
                }
            }
            "loss.mode" => match value {
                "exact" => self.shots = None,
                "sampled" => self.shots = Some(self.shots.unwrap_or(1000)),
                _ => return Err(bad("exact|sampled")),
            },
            "loss.shots" => self.shots = Some(value.parse().map_err(|_| bad("an integer"))?),
            "loss.seed" => self.shot_seed = value.parse().map_err(|_| bad("an integer"))?,
            "prop.theta_resolution" => self.theta_resolution = value.parse().map_err(|_| bad("a number"))?,
            "bounds.K" => self.bound_orders = list(value).map_err(|_| bad("integers"))?,
            "bounds.r" => self.bound_ranks = list(value).map_err(|_| bad("integers"))?,
            "bounds.beta" => self.bound_betas = list(value).map_err(|_| bad("numbers"))?,
            "bounds.eps" => self.bound_eps = list(value).map_err(|_| bad("numbers"))?,
            "output.wall_time" => self.wall_time = value.parse().map_err(|_| bad("true|false"))?,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if !["ising", "xy"].contains(&self.model.as_str()) {
            return fail(format!("model.name must be ising or xy, got '{}'", self.model));
        }
        for a in &self.ansatz {
            if !["ising6", "ising1", "xy"].contains(&a.as_str()) {
                return fail(format!("unknown ansatz '{a}'"));
            }
        }
        if let Some(&l) = self
            .chain_lengths
            .iter()
            .find(|&&l| !(2..=MAX_CHAIN_LENGTH).contains(&l))
        {
            return fail(format!("chain length {l} outside 2..={MAX_CHAIN_LENGTH}"));
        }
        if self.id == ExperimentId::IsingScaling && self.chain_lengths.iter().any(|&l| !(5..=9).contains(&l)) {
            return fail("ising-scaling takes chain lengths in 5..=9".into());
        }
        if self.id == ExperimentId::XySweep && self.depths.iter().any(|&d| !(3..=6).contains(&d)) {
            return fail("xy-sweep takes depths in 3..=6".into());
        }
        if self.betas.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return fail("every beta must be finite and > 0".into());
        }
        if self.orders.iter().any(|&k| k < 1) || self.bound_orders.iter().any(|&k| k < 1) {
            return fail("truncation orders must be >= 1".into());
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return fail("train.restarts and train.max_iters must be >= 1".into());
        }
        if self.shots == Some(0) {
            return fail("loss.shots must be >= 1".into());
        }
        if !(self.theta_resolution > 0.0) {
            return fail("prop.theta_resolution must be > 0".into());
        }
        Ok(())
    }

    /// Training settings for one run. Sampled runs offset the shot seed by the run seed.
    pub fn train_config(&self, beta: f64, order: usize, seed: u64) -> Result<TrainConfig> {
        let mut t = TrainConfig::new(beta, order).with_seed(seed);
        t.learning_rate = self.learning_rate;
        t.max_iters = self.max_iters;
        t.tolerance = self.tolerance;
        t.fd_step = self.fd_step;
        if let Some(mode) = self.gradient {
            t.gradient_mode = mode;
        }
        t.loss_mode = match self.shots {
            None => LossMode::Exact,
            Some(shots) => LossMode::Sampled(ShotConfig::new(shots, self.shot_seed.wrapping_add(seed))?),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.restarts as u64).map(|i| self.seed_base + i)
    }

    /// Every setting as flat key/value pairs, in key order.
    pub fn to_flat(&self) -> BTreeMap<String, String> {
        let join = |v: &[String]| v.join(",");
        let nums = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let ints = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("experiment.id", self.id.to_string());
        put("model.name", self.model.clone());
        put("model.ansatz", join(&self.ansatz));
        put("model.L", ints(&self.chain_lengths));
        put("model.n_A", self.n_ancilla.to_string());
        put("model.d", ints(&self.depths));
        put("train.beta_list", nums(&self.betas));
        put("train.K", ints(&self.orders));
        put("train.learning_rate", self.learning_rate.to_string());
        put("train.max_iters", self.max_iters.to_string());
        put("train.tolerance", self.tolerance.to_string());
        put("train.seed", self.seed_base.to_string());
        put("train.restarts", self.restarts.to_string());
        put("train.fd_step", self.fd_step.to_string());
        put(
            "train.gradient",
            match self.gradient {
                None => "auto",
                Some(GradientMode::ParameterShift) => "parameter_shift",
                Some(GradientMode::FiniteDifference) => "finite_difference",
            }
            .to_string(),
        );
        match self.shots {
            None => put("loss.mode", "exact".into()),
            Some(shots) => {
                put("loss.mode", "sampled".into());
                put("loss.shots", shots.to_string());
            }
        }
        put("loss.seed", self.shot_seed.to_string());
        put("prop.theta_resolution", self.theta_resolution.to_string());
        put("bounds.K", ints(&self.bound_orders));
        put("bounds.r", ints(&self.bound_ranks));
        put("bounds.beta", nums(&self.bound_betas));
        put("bounds.eps", nums(&self.bound_eps));
        put("output.wall_time", self.wall_time.to_string());
        m
    }
}

fn list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, T::Err> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_text() {
        let text = "# comment\nexperiment.id = xy-sweep\nmodel.d = 3, 4 # trailing\n\ntrain.beta_list=2\n";
        let map = parse_flat(text).unwrap();
        let cfg = ExperimentConfig::resolve(None, &map).unwrap();
        assert_eq!(cfg.id, ExperimentId::XySweep);
        assert_eq!(cfg.depths, vec![3, 4]);
        assert_eq!(cfg.betas, vec![2.0]);
        assert!(parse_flat("no equals sign").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let mut map = BTreeMap::new();
        map.insert("model.L".to_string(), "11".to_string());
        assert!(ExperimentConfig::resolve(Some(ExperimentId::IsingSweep), &map).is_err());
        map.insert("model.L".to_string(), "5".to_string());
        map.insert("train.K".to_string(), "x".to_string());
        assert!(ExperimentConfig::resolve(Some(ExperimentId::IsingSweep), &map).is_err());
        let mut map = BTreeMap::new();
        map.insert("mystery".to_string(), "1".to_string());
        assert!(ExperimentConfig::resolve(Some(ExperimentId::IsingSweep), &map).is_err());
    }

    #[test]
    fn flat_round_trip() {
        for id in ExperimentId::ALL {
            let mut cfg = ExperimentConfig::defaults(id);
            cfg.shots = Some(500);
            cfg.shot_seed = 9;
            let again = ExperimentConfig::resolve(None, &cfg.to_flat()).unwrap();
            assert_eq!(again, cfg);
        }
    }

    #[test]
    fn sampled_seeds_follow_run_seed() {
        let mut cfg = ExperimentConfig::defaults(ExperimentId::IsingSweep);
        cfg.shots = Some(10);
        cfg.shot_seed = 100;
        let t = cfg.train_config(2.0, 2, 3).unwrap();
        assert_eq!(t.loss_mode, LossMode::Sampled(ShotConfig::new(10, 103).unwrap()));
    }
}

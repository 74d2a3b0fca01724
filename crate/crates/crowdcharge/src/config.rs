//! Simulation configuration: defaults, file parsing, validation.
//!
//! Config files are flat `key = value` text. Keys are exactly the
//! [`SimConfig`] field names, one per line; `#` starts a comment line and
//! blank lines are ignored. Ranges are written `lo,hi`. Unknown keys are
//! rejected so typos fail loudly instead of silently running the defaults.

use std::fs;
use std::path::Path;

use crate::battery::AgingParams;
use crate::error::{Error, Result};
use crate::mobility::MobilityParams;
use crate::protocol::{PeerRule, Protocol};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Number of nodes.
    pub m: usize,
    /// Number of distinct places a node can be.
    pub num_locations: usize,
    /// Shortest stay at one location, minutes.
    pub stay_min: u64,
    /// Longest stay at one location, minutes.
    pub stay_max: u64,
    /// Fraction of each transfer lost in flight.
    pub beta: f64,
    /// Charging rate cap, SOC percent per contact minute.
    pub alpha: f64,
    /// Lower healthy-band threshold, SOC percent.
    pub e_min: f64,
    /// Upper healthy-band threshold, SOC percent.
    pub e_max: f64,
    /// Maximum capacity a battery can lose, SOC percent equivalent.
    pub p_r: f64,
    /// Cycle count at which a battery is considered worn out.
    pub c_max: u32,
    /// Shortest contact worth exploiting, minutes.
    pub t_min: u64,
    /// Simulated minutes per iteration.
    pub iteration_minutes: u64,
    /// Number of iterations per run.
    pub iterations: u64,
    /// Base RNG seed; run k uses seed + k.
    pub seed: u64,
    /// Number of replicate runs in a batch.
    pub runs: u32,
    pub protocol: Protocol,
    /// SOC percent consumed per iteration by a node that did not exchange.
    pub usage_drain: f64,
    /// Initial SOC draw bounds, `lo,hi`.
    pub initial_soc_range: (f64, f64),
    /// Initial completed-cycle draw bounds, `lo,hi` inclusive.
    pub initial_cycles_range: (u32, u32),
    /// Peer choice rule for the threshold-oriented protocol.
    pub alg2_peer_rule: PeerRule,
    /// Force relocations to change location.
    pub exclude_current_location: bool,
    /// How close to the balance target counts as balanced, SOC percent.
    pub balance_tolerance: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            m: 100,
            num_locations: 5,
            stay_min: 10,
            stay_max: 30,
            beta: 0.2,
            alpha: 0.5,
            e_min: 20.0,
            e_max: 80.0,
            p_r: 20.0,
            c_max: 500,
            t_min: 1,
            iteration_minutes: 60,
            iterations: 30,
            seed: 1,
            runs: 10,
            protocol: Protocol::PbaWna,
            usage_drain: 2.0,
            initial_soc_range: (0.0, 100.0),
            initial_cycles_range: (0, 250),
            alg2_peer_rule: PeerRule::Closest,
            exclude_current_location: false,
            balance_tolerance: 1.0,
        }
    }
}

impl SimConfig {
    /// Parses a config file and validates the result.
    pub fn from_file(path: &Path) -> Result<SimConfig> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config = SimConfig::parse_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    /// Applies `key = value` lines on top of the defaults. Does not
    /// validate; callers layer CLI overrides first and validate once.
    pub fn parse_str(text: &str) -> Result<SimConfig> {
        let mut config = SimConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            config.set(key.trim(), value.trim(), lineno + 1)?;
        }
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str, lineno: usize) -> Result<()> {
        let bad = |what: &str| {
            Error::Config(format!("line {lineno}: {key}: {what} (got '{value}')"))
        };
        match key {
            "m" => self.m = value.parse().map_err(|_| bad("expected a node count"))?,
            "num_locations" => {
                self.num_locations = value.parse().map_err(|_| bad("expected a count"))?
            }
            "stay_min" => self.stay_min = value.parse().map_err(|_| bad("expected minutes"))?,
            "stay_max" => self.stay_max = value.parse().map_err(|_| bad("expected minutes"))?,
            "beta" => self.beta = value.parse().map_err(|_| bad("expected a number"))?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad("expected a number"))?,
            "e_min" => self.e_min = value.parse().map_err(|_| bad("expected a number"))?,
            "e_max" => self.e_max = value.parse().map_err(|_| bad("expected a number"))?,
            "p_r" => self.p_r = value.parse().map_err(|_| bad("expected a number"))?,
            "c_max" => self.c_max = value.parse().map_err(|_| bad("expected a cycle count"))?,
            "t_min" => self.t_min = value.parse().map_err(|_| bad("expected minutes"))?,
            "iteration_minutes" => {
                self.iteration_minutes = value.parse().map_err(|_| bad("expected minutes"))?
            }
            "iterations" => {
                self.iterations = value.parse().map_err(|_| bad("expected a count"))?
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("expected an integer"))?,
            "runs" => self.runs = value.parse().map_err(|_| bad("expected a count"))?,
            "protocol" => self.protocol = value.parse()?,
            "usage_drain" => {
                self.usage_drain = value.parse().map_err(|_| bad("expected a number"))?
            }
            "initial_soc_range" => {
                let (lo, hi) = split_range(value).ok_or_else(|| bad("expected lo,hi"))?;
                self.initial_soc_range = (
                    lo.parse().map_err(|_| bad("expected numeric bounds"))?,
                    hi.parse().map_err(|_| bad("expected numeric bounds"))?,
                );
            }
            "initial_cycles_range" => {
                let (lo, hi) = split_range(value).ok_or_else(|| bad("expected lo,hi"))?;
                self.initial_cycles_range = (
                    lo.parse().map_err(|_| bad("expected integer bounds"))?,
                    hi.parse().map_err(|_| bad("expected integer bounds"))?,
                );
            }
            "alg2_peer_rule" => self.alg2_peer_rule = value.parse()?,
            "exclude_current_location" => {
                self.exclude_current_location =
                    value.parse().map_err(|_| bad("expected true or false"))?
            }
            "balance_tolerance" => {
                self.balance_tolerance = value.parse().map_err(|_| bad("expected a number"))?
            }
            unknown => {
                return Err(Error::Config(format!(
                    "line {lineno}: unknown key '{unknown}'"
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.m == 0 {
            return fail("m must be at least 1".into());
        }
        if self.num_locations == 0 {
            return fail("num_locations must be at least 1".into());
        }
        if self.stay_min == 0 || self.stay_min > self.stay_max {
            return fail(format!(
                "stay range must satisfy 1 <= stay_min <= stay_max (got {}..{})",
                self.stay_min, self.stay_max
            ));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return fail(format!("beta must lie in [0, 1) (got {})", self.beta));
        }
        if !(self.alpha > 0.0) {
            return fail(format!("alpha must be positive (got {})", self.alpha));
        }
        if !(0.0 < self.e_min && self.e_min < self.e_max && self.e_max < 100.0) {
            return fail(format!(
                "thresholds must satisfy 0 < e_min < e_max < 100 (got {} and {})",
                self.e_min, self.e_max
            ));
        }
        if !(self.p_r > 0.0) {
            return fail(format!("p_r must be positive (got {})", self.p_r));
        }
        if self.c_max == 0 {
            return fail("c_max must be at least 1".into());
        }
        if self.t_min == 0 {
            return fail("t_min must be at least 1".into());
        }
        if self.iteration_minutes == 0 {
            return fail("iteration_minutes must be at least 1".into());
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        if !(self.usage_drain >= 0.0) {
            return fail(format!(
                "usage_drain must be non-negative (got {})",
                self.usage_drain
            ));
        }
        let (lo, hi) = self.initial_soc_range;
        if !(0.0 <= lo && lo <= hi && hi <= 100.0) {
            return fail(format!(
                "initial_soc_range must satisfy 0 <= lo <= hi <= 100 (got {lo},{hi})"
            ));
        }
        let (clo, chi) = self.initial_cycles_range;
        if clo > chi {
            return fail(format!(
                "initial_cycles_range must satisfy lo <= hi (got {clo},{chi})"
            ));
        }
        if !(self.balance_tolerance >= 0.0) {
            return fail(format!(
                "balance_tolerance must be non-negative (got {})",
                self.balance_tolerance
            ));
        }
        Ok(())
    }

    pub fn aging_params(&self) -> AgingParams {
        AgingParams {
            p_r: self.p_r,
            c_max: self.c_max,
        }
    }

    pub fn mobility_params(&self) -> MobilityParams {
        MobilityParams {
            num_locations: self.num_locations,
            stay_min: self.stay_min,
            stay_max: self.stay_max,
            exclude_current_location: self.exclude_current_location,
        }
    }
}

fn split_range(value: &str) -> Option<(&str, &str)> {
    let (lo, hi) = value.split_once(',')?;
    Some((lo.trim(), hi.trim()))
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimError;

/// Forwarding policy run by the target node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Backlog-proportional asymmetric time split with a minimum share per class.
    Ctc,
    /// Own traffic first, neighbor traffic behind an energy-credit gate.
    Dsr,
}

impl Policy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::Ctc => "ctc",
            Policy::Dsr => "dsr",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ctc" => Ok(Policy::Ctc),
            "dsr" => Ok(Policy::Dsr),
            other => Err(SimError::InvalidConfig(format!("unknown policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateKind {
    Constant,
    LinearIncreasing,
    LinearDecreasing,
}

/// Packet generation rate, in packets per epoch, as a function of the epoch
/// index. Never negative.
///
/// In config files a rate is written as `constant:<base>`,
/// `increasing:<base>:<slope>` or `decreasing:<base>:<slope>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RateFunction {
    pub kind: RateKind,
    pub base: f64,
    pub slope: f64,
}

impl RateFunction {
    pub fn constant(base: f64) -> Self {
        Self {
            kind: RateKind::Constant,
            base,
            slope: 0.0,
        }
    }

    pub fn increasing(base: f64, slope: f64) -> Self {
        Self {
            kind: RateKind::LinearIncreasing,
            base,
            slope,
        }
    }

    pub fn decreasing(base: f64, slope: f64) -> Self {
        Self {
            kind: RateKind::LinearDecreasing,
            base,
            slope,
        }
    }

    pub fn eval(&self, epoch: u64) -> f64 {
        let e = epoch as f64;
        let raw = match self.kind {
            RateKind::Constant => self.base,
            RateKind::LinearIncreasing => self.base + self.slope * e,
            RateKind::LinearDecreasing => self.base - self.slope * e,
        };
        raw.max(0.0)
    }

    /// Same shape with base and slope multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            kind: self.kind,
            base: self.base * factor,
            slope: self.slope * factor,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.base.is_finite() && self.slope.is_finite()) || self.base < 0.0 || self.slope < 0.0
        {
            return Err(SimError::InvalidConfig(format!(
                "rate function needs finite non-negative base and slope: {self}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RateKind::Constant => write!(f, "constant:{}", self.base),
            RateKind::LinearIncreasing => write!(f, "increasing:{}:{}", self.base, self.slope),
            RateKind::LinearDecreasing => write!(f, "decreasing:{}:{}", self.base, self.slope),
        }
    }
}

impl FromStr for RateFunction {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimError::InvalidConfig(format!("malformed rate function `{s}`"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64, SimError> {
            parts
                .get(i)
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())
        };
        let rate = match (parts[0].trim(), parts.len()) {
            ("constant", 2) => Self::constant(num(1)?),
            ("increasing", 3) => Self::increasing(num(1)?, num(2)?),
            ("decreasing", 3) => Self::decreasing(num(1)?, num(2)?),
            _ => return Err(bad()),
        };
        rate.validate()?;
        Ok(rate)
    }
}

impl TryFrom<String> for RateFunction {
    type Error = SimError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<RateFunction> for String {
    fn from(value: RateFunction) -> Self {
        value.to_string()
    }
}

/// Parameters of one simulation run.
///
/// Field names double as the keys of the JSON config file; unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Seconds per epoch.
    pub epoch_length: f64,
    pub epochs: u64,
    pub neighbor_count: usize,
    /// Service capacity of the target node in packets per second.
    pub data_rate: f64,
    /// Per-packet ambient loss probability applied to every serviced packet.
    pub base_drop_prob: f64,
    /// Neighbor-forwarding credits available to a DSR node for the whole run.
    pub energy_budget: u64,
    /// Epochs a packet may wait in a queue before it is discarded.
    pub deadline_epochs: u64,
    pub min_share_fraction: f64,
    pub misbehavior_threshold: f64,
    pub window_epochs: u64,
    pub policy: Policy,
    pub seed: u64,
    pub self_rate_fn: RateFunction,
    pub neighbor_rate_fn: RateFunction,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            epoch_length: 1.0,
            epochs: 100,
            neighbor_count: 8,
            data_rate: 1000.0,
            base_drop_prob: 0.05,
            energy_budget: 1000,
            deadline_epochs: 2,
            min_share_fraction: 0.05,
            misbehavior_threshold: 0.5,
            window_epochs: 10,
            policy: Policy::Ctc,
            seed: 0,
            self_rate_fn: RateFunction::constant(0.0),
            neighbor_rate_fn: RateFunction::constant(0.0),
        }
    }
}

impl SimConfig {
    /// Packets the target node can service per epoch.
    pub fn capacity(&self) -> usize {
        (self.data_rate * self.epoch_length + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::InvalidConfig(msg));
        if !(self.epoch_length > 0.0 && self.epoch_length.is_finite()) {
            return fail(format!(
                "epoch_length must be positive, got {}",
                self.epoch_length
            ));
        }
        if !(self.data_rate > 0.0 && self.data_rate.is_finite()) {
            return fail(format!(
                "data_rate must be positive, got {}",
                self.data_rate
            ));
        }
        if self.capacity() == 0 {
            return fail(
                "data_rate * epoch_length must allow at least one packet per epoch".into(),
            );
        }
        if !(0.0..1.0).contains(&self.base_drop_prob) {
            return fail(format!(
                "base_drop_prob must lie in [0, 1), got {}",
                self.base_drop_prob
            ));
        }
        if !(self.min_share_fraction > 0.0 && self.min_share_fraction < 0.5) {
            return fail(format!(
                "min_share_fraction must lie in (0, 0.5), got {}",
                self.min_share_fraction
            ));
        }
        if !(self.misbehavior_threshold > 0.0 && self.misbehavior_threshold < 1.0) {
            return fail(format!(
                "misbehavior_threshold must lie in (0, 1), got {}",
                self.misbehavior_threshold
            ));
        }
        if self.deadline_epochs < 1 {
            return fail("deadline_epochs must be at least 1".into());
        }
        if self.window_epochs < 1 {
            return fail("window_epochs must be at least 1".into());
        }
        if self.neighbor_count < 1 {
            return fail("neighbor_count must be at least 1".into());
        }
        self.self_rate_fn.validate()?;
        self.neighbor_rate_fn.validate()?;
        Ok(())
    }
}

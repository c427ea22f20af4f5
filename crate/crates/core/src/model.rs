//! Closed-form forwarding model for a single node.
//!
//! A node forwards its own packets with probability `(1 - p)^k` and its
//! neighbors' packets with probability `p (1 - p)^k`. Available time is split
//! asymmetrically between the two classes, and throughput is the ratio of
//! expected packets forwarded to the time spent forwarding them.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("throughput undefined: total forwarding time is zero (p = {p})")]
    DegenerateDenominator { p: f64 },
    #[error("total time must be positive, got {0}")]
    NonPositiveTime(f64),
}

/// Free variables of the forwarding model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardingParams {
    p: f64,
    k: u32,
    data_rate: f64,
}

impl ForwardingParams {
    /// `p` in `[0, 1]`, batch size `k >= 1`, `data_rate > 0` packets per second.
    pub fn new(p: f64, k: u32, data_rate: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ModelError::InvalidParameter(format!(
                "p must lie in [0, 1], got {p}"
            )));
        }
        if k < 1 {
            return Err(ModelError::InvalidParameter("k must be at least 1".into()));
        }
        if !(data_rate > 0.0 && data_rate.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "data rate must be positive and finite, got {data_rate}"
            )));
        }
        Ok(Self { p, k, data_rate })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn data_rate(&self) -> f64 {
        self.data_rate
    }

    /// Probability weight of the `j`-th own packet, `(1 - p)^j`.
    fn own_term(&self, j: u32) -> f64 {
        (1.0 - self.p).powi(j as i32)
    }

    /// Probability weight of the `j`-th neighbor packet, `p (1 - p)^j`.
    fn neighbor_term(&self, j: u32) -> f64 {
        self.p * self.own_term(j)
    }
}

/// Forwarding probabilities for a batch of `k` packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbPair {
    pub p_self: f64,
    pub p_neighbor: f64,
}

/// Split of a node's available time between own and neighbor packets.
///
/// The total is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBudget {
    t_pp: f64,
    t_np: f64,
}

impl TimeBudget {
    pub fn new(t_pp: f64, t_np: f64) -> Result<Self, ModelError> {
        if !(t_pp >= 0.0 && t_np >= 0.0 && t_pp.is_finite() && t_np.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "time components must be finite and non-negative, got ({t_pp}, {t_np})"
            )));
        }
        Ok(Self { t_pp, t_np })
    }

    /// Seconds spent on self-generated packets.
    pub fn t_pp(&self) -> f64 {
        self.t_pp
    }

    /// Seconds spent on neighbor packets.
    pub fn t_np(&self) -> f64 {
        self.t_np
    }

    pub fn total(&self) -> f64 {
        self.t_pp + self.t_np
    }
}

pub fn prob_batch(params: &ForwardingParams) -> ProbPair {
    let p_self = params.own_term(params.k);
    ProbPair {
        p_self,
        p_neighbor: params.p * p_self,
    }
}

/// Time components summed term by term over `j = 1..=k`, each term divided by
/// the data rate.
pub fn time_components(params: &ForwardingParams) -> TimeBudget {
    let (mut t_pp, mut t_np) = (0.0, 0.0);
    for j in 1..=params.k {
        t_pp += params.own_term(j) / params.data_rate;
        t_np += params.neighbor_term(j) / params.data_rate;
    }
    TimeBudget { t_pp, t_np }
}

/// Same quantities as [`time_components`] through the geometric-series closed
/// form `sum_{j=1..k} r^j = r (1 - r^k) / (1 - r)` with `r = 1 - p`.
///
/// At `p = 0` the series is `k` ones.
pub fn time_components_closed_form(params: &ForwardingParams) -> TimeBudget {
    let p = params.p;
    let k = params.k as f64;
    let own_sum = if p == 0.0 {
        k
    } else {
        let r = 1.0 - p;
        r * (1.0 - r.powi(params.k as i32)) / p
    };
    TimeBudget {
        t_pp: own_sum / params.data_rate,
        t_np: p * own_sum / params.data_rate,
    }
}

/// Node throughput in packets per second.
///
/// Numerator and denominator are both evaluated; their ratio reduces to the
/// data rate for every valid `p < 1`.
pub fn throughput(params: &ForwardingParams) -> Result<f64, ModelError> {
    let times = time_components(params);
    let denominator = times.total();
    if params.p >= 1.0 || denominator <= 0.0 {
        return Err(ModelError::DegenerateDenominator { p: params.p });
    }
    let numerator: f64 = (1..=params.k)
        .map(|j| params.own_term(j) + params.neighbor_term(j))
        .sum();
    Ok(numerator / denominator)
}

/// Rate of packets at risk of being dropped per unit time.
pub fn packet_drop_rate(
    self_packets: u64,
    neighbor_packets: u64,
    total_time: f64,
) -> Result<f64, ModelError> {
    if total_time.is_nan() || total_time <= 0.0 {
        return Err(ModelError::NonPositiveTime(total_time));
    }
    Ok((self_packets + neighbor_packets) as f64 / total_time)
}

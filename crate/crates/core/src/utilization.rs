//! Node power and utilization.
//!
//! "Power" here is a work rate in packets per second, not watts. Utilization is
//! the ratio of outgoing to incoming work rate, evaluated per node, per route
//! and summed over all routes through a node.

use thiserror::Error;

use crate::model::TimeBudget;

/// Relative tolerance between the ratio and simplified utilization forms.
pub const FORM_AGREEMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UtilizationError {
    #[error("invalid counters: {0}")]
    InvalidCounters(String),
    #[error("{count} packets over a zero {component} time component")]
    ZeroTime { component: &'static str, count: u64 },
    #[error("utilization undefined for a node with no neighbor input")]
    NoInput,
    #[error("utilization forms disagree on route {route}: {ratio_form} vs {simplified_form}")]
    FormMismatch {
        route: usize,
        ratio_form: f64,
        simplified_form: f64,
    },
}

/// Per-node packet counts over a measurement interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PacketCounters {
    k_pout: u64,
    k_nout: u64,
    k_nin: u64,
}

impl PacketCounters {
    pub fn new(k_pout: u64, k_nout: u64, k_nin: u64) -> Result<Self, UtilizationError> {
        if k_nout > k_nin {
            return Err(UtilizationError::InvalidCounters(format!(
                "forwarded neighbor packets ({k_nout}) exceed received ({k_nin})"
            )));
        }
        Ok(Self {
            k_pout,
            k_nout,
            k_nin,
        })
    }

    /// Own packets sent out.
    pub fn k_pout(&self) -> u64 {
        self.k_pout
    }

    /// Neighbor packets forwarded out.
    pub fn k_nout(&self) -> u64 {
        self.k_nout
    }

    /// Neighbor packets received.
    pub fn k_nin(&self) -> u64 {
        self.k_nin
    }

    /// All input to a node is neighbor traffic, so total input equals `k_nin`.
    pub fn k_pin(&self) -> u64 {
        self.k_nin
    }

    /// Component-wise sum.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            k_pout: self.k_pout + other.k_pout,
            k_nout: self.k_nout + other.k_nout,
            k_nin: self.k_nin + other.k_nin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRates {
    pub n_ppout: f64,
    pub n_pnout: f64,
    pub n_pin: f64,
}

impl PowerRates {
    /// Total outgoing work rate.
    pub fn n_pout(&self) -> f64 {
        self.n_ppout + self.n_pnout
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteUtilization {
    /// 1-based route index.
    pub route_index: usize,
    pub value: f64,
}

// A zero count over a zero time contributes no work.
fn rate(count: u64, time: f64, component: &'static str) -> Result<f64, UtilizationError> {
    match (count, time > 0.0) {
        (0, _) => Ok(0.0),
        (_, true) => Ok(count as f64 / time),
        (count, false) => Err(UtilizationError::ZeroTime { component, count }),
    }
}

pub fn power_out(
    counters: &PacketCounters,
    times: &TimeBudget,
) -> Result<PowerRates, UtilizationError> {
    Ok(PowerRates {
        n_ppout: rate(counters.k_pout, times.t_pp(), "t_pp")?,
        n_pnout: rate(counters.k_nout, times.t_np(), "t_np")?,
        n_pin: rate(counters.k_nin, times.t_np(), "t_np")?,
    })
}

/// Outgoing over incoming work rate for one node.
pub fn utilization_node(
    counters: &PacketCounters,
    times: &TimeBudget,
) -> Result<f64, UtilizationError> {
    if counters.k_nin == 0 {
        return Err(UtilizationError::NoInput);
    }
    let rates = power_out(counters, times)?;
    Ok(rates.n_pout() / rates.n_pin)
}

/// `(1 / k_nin) [k_pout (t_np / t_pp) + k_nout]`, algebraically equal to
/// [`utilization_node`] after cancelling `t_np`.
pub fn utilization_node_simplified(
    counters: &PacketCounters,
    times: &TimeBudget,
) -> Result<f64, UtilizationError> {
    if counters.k_nin == 0 {
        return Err(UtilizationError::NoInput);
    }
    if times.t_np() <= 0.0 {
        return Err(UtilizationError::ZeroTime {
            component: "t_np",
            count: counters.k_nin,
        });
    }
    let own = match counters.k_pout {
        0 => 0.0,
        k if times.t_pp() > 0.0 => k as f64 * (times.t_np() / times.t_pp()),
        k => {
            return Err(UtilizationError::ZeroTime {
                component: "t_pp",
                count: k,
            })
        }
    };
    Ok((own + counters.k_nout as f64) / counters.k_nin as f64)
}

pub fn utilization_per_route(
    per_route: &[(PacketCounters, TimeBudget)],
) -> Result<Vec<RouteUtilization>, UtilizationError> {
    per_route
        .iter()
        .enumerate()
        .map(|(i, (counters, times))| {
            Ok(RouteUtilization {
                route_index: i + 1,
                value: utilization_node(counters, times)?,
            })
        })
        .collect()
}

/// Total utilization summed over routes.
///
/// Each route is evaluated through both the ratio form and the simplified
/// form; disagreement beyond [`FORM_AGREEMENT_TOLERANCE`] is an error. The
/// simplified value is returned.
pub fn utilization_total(
    per_route: &[(PacketCounters, TimeBudget)],
) -> Result<f64, UtilizationError> {
    let mut total = 0.0;
    for (i, (counters, times)) in per_route.iter().enumerate() {
        let ratio_form = utilization_node(counters, times)?;
        let simplified_form = utilization_node_simplified(counters, times)?;
        let scale = ratio_form
            .abs()
            .max(simplified_form.abs())
            .max(f64::MIN_POSITIVE);
        if (ratio_form - simplified_form).abs() > FORM_AGREEMENT_TOLERANCE * scale {
            return Err(UtilizationError::FormMismatch {
                route: i + 1,
                ratio_form,
                simplified_form,
            });
        }
        total += simplified_form;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(p: u64, n: u64, i: u64) -> PacketCounters {
        PacketCounters::new(p, n, i).unwrap()
    }

    fn t(pp: f64, np: f64) -> TimeBudget {
        TimeBudget::new(pp, np).unwrap()
    }

    #[test]
    fn power_out_examples() {
        let r = power_out(&c(4, 6, 12), &t(2.0, 3.0)).unwrap();
        assert_eq!(
            (r.n_ppout, r.n_pnout, r.n_pout(), r.n_pin),
            (2.0, 2.0, 4.0, 4.0)
        );

        let r = power_out(&c(0, 0, 0), &t(1.0, 1.0)).unwrap();
        assert_eq!(
            (r.n_ppout, r.n_pnout, r.n_pout(), r.n_pin),
            (0.0, 0.0, 0.0, 0.0)
        );

        let r = power_out(&c(0, 3, 3), &t(1.0, 1.5)).unwrap();
        assert_eq!(
            (r.n_ppout, r.n_pnout, r.n_pout(), r.n_pin),
            (0.0, 2.0, 2.0, 2.0)
        );
    }

    #[test]
    fn power_out_zero_time() {
        assert_eq!(
            power_out(&c(3, 0, 0), &t(0.0, 1.0)),
            Err(UtilizationError::ZeroTime {
                component: "t_pp",
                count: 3
            })
        );
        assert!(power_out(&c(0, 2, 2), &t(1.0, 0.0)).is_err());
    }

    #[test]
    fn counters_reject_overforwarding() {
        assert!(PacketCounters::new(0, 5, 4).is_err());
        assert_eq!(c(1, 2, 3).k_pin(), 3);
    }

    #[test]
    fn utilization_node_examples() {
        assert_eq!(utilization_node(&c(4, 6, 12), &t(2.0, 3.0)).unwrap(), 1.0);
        // Simplified form by hand: (1/12)(4 * 3/2 + 6) = 1.
        assert_eq!(
            utilization_node_simplified(&c(4, 6, 12), &t(2.0, 3.0)).unwrap(),
            1.0
        );
        assert_eq!(utilization_node(&c(0, 6, 12), &t(1.0, 3.0)).unwrap(), 0.5);
        for k in [1, 7, 1000] {
            assert_eq!(utilization_node(&c(0, k, k), &t(0.3, 2.5)).unwrap(), 1.0);
        }
        assert_eq!(
            utilization_node(&c(3, 0, 0), &t(1.0, 1.0)),
            Err(UtilizationError::NoInput)
        );
    }

    #[test]
    fn utilization_total_examples() {
        let worked = (c(4, 6, 12), t(2.0, 3.0));
        assert_eq!(utilization_total(&[worked, worked]).unwrap(), 2.0);
        assert_eq!(utilization_total(&[]).unwrap(), 0.0);
        let half = (c(0, 6, 12), t(1.0, 3.0));
        assert_eq!(utilization_total(&[half, worked]).unwrap(), 1.5);
        assert_eq!(
            utilization_total(&[worked, (c(1, 0, 0), t(1.0, 1.0))]),
            Err(UtilizationError::NoInput)
        );
    }

    #[test]
    fn per_route_indices_are_one_based() {
        let r = utilization_per_route(&[(c(0, 6, 12), t(1.0, 3.0)), (c(4, 6, 12), t(2.0, 3.0))])
            .unwrap();
        assert_eq!(
            r[0],
            RouteUtilization {
                route_index: 1,
                value: 0.5
            }
        );
        assert_eq!(
            r[1],
            RouteUtilization {
                route_index: 2,
                value: 1.0
            }
        );
    }

    fn counters_strategy() -> impl Strategy<Value = PacketCounters> {
        (1u64..=10_000, 1u64..=10_000)
            .prop_flat_map(|(nin, pout)| (Just(pout), 1u64..=nin, Just(nin)))
            .prop_map(|(p, n, i)| PacketCounters::new(p, n, i).unwrap())
    }

    proptest! {
        #[test]
        fn forms_agree(cnt in counters_strategy(), pp in 1e-3f64..1e2, np in 1e-3f64..1e2) {
            let times = t(pp, np);
            let a = utilization_node(&cnt, &times).unwrap();
            let b = utilization_node_simplified(&cnt, &times).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
        }

        #[test]
        fn invariant_under_count_scaling(cnt in counters_strategy(), scale in 1u64..=50, pp in 1e-3f64..1e2, np in 1e-3f64..1e2) {
            let times = t(pp, np);
            let scaled = c(cnt.k_pout() * scale, cnt.k_nout() * scale, cnt.k_nin() * scale);
            let a = utilization_node(&cnt, &times).unwrap();
            let b = utilization_node(&scaled, &times).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn power_out_is_additive(a in counters_strategy(), b in counters_strategy(), pp in 1e-3f64..1e2, np in 1e-3f64..1e2) {
            let times = t(pp, np);
            let merged = power_out(&a.merge(&b), &times).unwrap().n_pout();
            let parts = power_out(&a, &times).unwrap().n_pout() + power_out(&b, &times).unwrap().n_pout();
            prop_assert!((merged - parts).abs() <= 1e-9 * merged.max(1.0));
        }

        #[test]
        fn singleton_total_is_node_value(cnt in counters_strategy(), pp in 1e-3f64..1e2, np in 1e-3f64..1e2) {
            let times = t(pp, np);
            let node = utilization_node(&cnt, &times).unwrap();
            let total = utilization_total(&[(cnt, times)]).unwrap();
            prop_assert!((node - total).abs() <= 1e-9 * node.max(1.0));
        }
    }
}

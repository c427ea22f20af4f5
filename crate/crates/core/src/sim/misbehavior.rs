use super::trace::Trace;
use super::SimError;

/// Neighbor-class drop ratio of one node over one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowDrop {
    pub node: usize,
    pub window: usize,
    pub offered: u64,
    pub dropped: u64,
}

impl WindowDrop {
    /// Can exceed 1 when packets offered in an earlier window expire here.
    pub fn ratio(&self) -> f64 {
        self.dropped as f64 / self.offered as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MisbehaviorStats {
    /// Share of node-windows whose neighbor drop ratio exceeds the threshold.
    pub malicious_fraction: f64,
    /// Node-windows with at least one neighbor packet offered.
    pub windows: Vec<WindowDrop>,
}

/// Splits the trace into consecutive windows of `window_epochs` epochs (the
/// last one may be shorter) and flags node-windows whose neighbor drop ratio
/// is above `threshold`.
pub fn classify_misbehavior(
    trace: &Trace,
    threshold: f64,
    window_epochs: u64,
) -> Result<MisbehaviorStats, SimError> {
    if trace.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    if !(threshold > 0.0 && threshold < 1.0) || window_epochs < 1 {
        return Err(SimError::InvalidConfig(format!(
            "classification needs 0 < threshold < 1 and window >= 1, got ({threshold}, {window_epochs})"
        )));
    }

    let mut windows: Vec<WindowDrop> = Vec::new();
    for (i, chunk) in trace.records.chunks(window_epochs as usize).enumerate() {
        let mut per_node: Vec<WindowDrop> = Vec::new();
        for snap in chunk.iter().flat_map(|r| r.nodes.iter()) {
            let entry = match per_node.iter_mut().find(|w| w.node == snap.node) {
                Some(w) => w,
                None => {
                    per_node.push(WindowDrop {
                        node: snap.node,
                        window: i,
                        offered: 0,
                        dropped: 0,
                    });
                    per_node.last_mut().expect("just pushed")
                }
            };
            entry.offered += snap.epoch_neighbor.offered;
            entry.dropped += snap.epoch_neighbor.dropped;
        }
        per_node.sort_by_key(|w| w.node);
        windows.extend(per_node.into_iter().filter(|w| w.offered > 0));
    }

    let flagged = windows.iter().filter(|w| w.ratio() > threshold).count();
    let malicious_fraction = if windows.is_empty() {
        0.0
    } else {
        flagged as f64 / windows.len() as f64
    };
    Ok(MisbehaviorStats {
        malicious_fraction,
        windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::node::ClassTally;
    use crate::sim::trace::{NodeSnapshot, TraceRecord};

    fn record(epoch: u64, offered: u64, dropped: u64) -> TraceRecord {
        let tally = ClassTally {
            offered,
            forwarded: offered.saturating_sub(dropped),
            dropped,
        };
        TraceRecord {
            epoch,
            nodes: vec![NodeSnapshot {
                node: 0,
                epoch_own: ClassTally::default(),
                epoch_neighbor: tally,
                total_own: ClassTally::default(),
                total_neighbor: tally,
                queued_own: 0,
                queued_neighbor: 0,
                t_pp: 0.5,
                t_np: 0.5,
                energy_remaining: 0,
            }],
        }
    }

    fn trace(per_epoch: &[(u64, u64)]) -> Trace {
        Trace {
            epoch_length: 1.0,
            records: per_epoch
                .iter()
                .enumerate()
                .map(|(e, &(o, d))| record(e as u64, o, d))
                .collect(),
        }
    }

    #[test]
    fn no_drops_is_zero() {
        let t = trace(&[(10, 0); 20]);
        assert_eq!(
            classify_misbehavior(&t, 0.5, 10)
                .unwrap()
                .malicious_fraction,
            0.0
        );
    }

    #[test]
    fn all_dropped_is_one() {
        let t = trace(&[(10, 10); 20]);
        assert_eq!(
            classify_misbehavior(&t, 0.5, 10)
                .unwrap()
                .malicious_fraction,
            1.0
        );
    }

    #[test]
    fn counts_windows_above_threshold() {
        // Four windows of two epochs: ratios 0.1, 0.4, 0.6, 0.9.
        let t = trace(&[
            (5, 0),
            (5, 1),
            (5, 2),
            (5, 2),
            (5, 3),
            (5, 3),
            (5, 4),
            (5, 5),
        ]);
        let stats = classify_misbehavior(&t, 0.5, 2).unwrap();
        let ratios: Vec<f64> = stats.windows.iter().map(WindowDrop::ratio).collect();
        assert_eq!(ratios, vec![0.1, 0.4, 0.6, 0.9]);
        assert_eq!(stats.malicious_fraction, 0.5);
    }

    #[test]
    fn windows_without_neighbor_traffic_are_skipped() {
        let t = trace(&[(0, 0), (0, 0), (4, 4), (4, 4)]);
        let stats = classify_misbehavior(&t, 0.5, 2).unwrap();
        assert_eq!(stats.windows.len(), 1);
        assert_eq!(stats.malicious_fraction, 1.0);
    }

    #[test]
    fn trailing_partial_window() {
        let t = trace(&[(4, 0), (4, 0), (4, 4)]);
        let stats = classify_misbehavior(&t, 0.5, 2).unwrap();
        assert_eq!(stats.windows.len(), 2);
        assert_eq!(stats.malicious_fraction, 0.5);
    }

    #[test]
    fn empty_trace_is_an_error() {
        assert_eq!(
            classify_misbehavior(&Trace::default(), 0.5, 10),
            Err(SimError::EmptyTrace)
        );
    }
}

use super::node::ClassTally;

/// State of one forwarding node at the end of an epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSnapshot {
    pub node: usize,
    /// Activity during this epoch only.
    pub epoch_own: ClassTally,
    pub epoch_neighbor: ClassTally,
    /// Cumulative activity since the start of the run.
    pub total_own: ClassTally,
    pub total_neighbor: ClassTally,
    pub queued_own: usize,
    pub queued_neighbor: usize,
    /// Realized time split for this epoch.
    pub t_pp: f64,
    pub t_np: f64,
    pub energy_remaining: u64,
}

impl NodeSnapshot {
    pub fn own_drop_ratio(&self) -> Option<f64> {
        self.epoch_own.drop_ratio()
    }

    pub fn neighbor_drop_ratio(&self) -> Option<f64> {
        self.epoch_neighbor.drop_ratio()
    }

    pub fn is_conserved(&self) -> bool {
        let ok = |t: &ClassTally, q: usize| t.offered == t.forwarded + t.dropped + q as u64;
        ok(&self.total_own, self.queued_own) && ok(&self.total_neighbor, self.queued_neighbor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub epoch: u64,
    pub nodes: Vec<NodeSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub epoch_length: f64,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Final cumulative snapshot of each forwarding node.
    pub fn final_snapshots(&self) -> &[NodeSnapshot] {
        self.records
            .last()
            .map(|r| r.nodes.as_slice())
            .unwrap_or(&[])
    }

    /// Epoch index of the first record whose conservation check fails.
    pub fn first_conservation_violation(&self) -> Option<u64> {
        self.records
            .iter()
            .find(|r| !r.nodes.iter().all(NodeSnapshot::is_conserved))
            .map(|r| r.epoch)
    }

    /// Largest deviation of `t_pp + t_np` from the epoch length.
    pub fn max_time_split_error(&self) -> f64 {
        self.records
            .iter()
            .flat_map(|r| r.nodes.iter())
            .map(|n| (n.t_pp + n.t_np - self.epoch_length).abs())
            .fold(0.0, f64::max)
    }

    /// Sum of realized `(t_pp, t_np)` over the run for one node.
    pub fn time_totals(&self, node: usize) -> (f64, f64) {
        self.records
            .iter()
            .flat_map(|r| r.nodes.iter().filter(move |n| n.node == node))
            .fold((0.0, 0.0), |(pp, np), n| (pp + n.t_pp, np + n.t_np))
    }
}

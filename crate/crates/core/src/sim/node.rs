use std::collections::VecDeque;

use crate::model::TimeBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketClass {
    /// Generated by the node itself.
    Own,
    /// Received from a neighbor for forwarding.
    Neighbor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub id: u64,
    pub class: PacketClass,
    /// Node that generated the packet.
    pub origin: usize,
    pub created_epoch: u64,
    /// First epoch at which the packet is discarded if still queued.
    pub deadline_epoch: u64,
}

/// Offered/forwarded/dropped counts for one packet class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassTally {
    pub offered: u64,
    pub forwarded: u64,
    pub dropped: u64,
}

impl ClassTally {
    pub fn add(&mut self, other: &ClassTally) {
        self.offered += other.offered;
        self.forwarded += other.forwarded;
        self.dropped += other.dropped;
    }

    pub fn drop_ratio(&self) -> Option<f64> {
        (self.offered > 0).then(|| self.dropped as f64 / self.offered as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Forward,
    Drop,
}

/// Forwarding state of a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeState {
    pub self_queue: VecDeque<Packet>,
    pub neighbor_queue: VecDeque<Packet>,
    /// Remaining neighbor-forwarding credits (DSR only).
    pub energy_remaining: u64,
    /// Cumulative tallies since the start of the run.
    pub own: ClassTally,
    pub neighbor: ClassTally,
}

impl NodeState {
    pub fn new(energy: u64) -> Self {
        Self {
            self_queue: VecDeque::new(),
            neighbor_queue: VecDeque::new(),
            energy_remaining: energy,
            own: ClassTally::default(),
            neighbor: ClassTally::default(),
        }
    }

    pub fn tally(&self, class: PacketClass) -> &ClassTally {
        match class {
            PacketClass::Own => &self.own,
            PacketClass::Neighbor => &self.neighbor,
        }
    }

    /// Whether `offered = forwarded + dropped + queued` holds for both classes.
    pub fn is_conserved(&self) -> bool {
        let ok = |t: &ClassTally, q: usize| t.offered == t.forwarded + t.dropped + q as u64;
        ok(&self.own, self.self_queue.len()) && ok(&self.neighbor, self.neighbor_queue.len())
    }

    /// Energy-gated forwarding decision of the selfish baseline.
    ///
    /// Own packets always pass. A neighbor packet passes only while credits
    /// remain and consumes one credit.
    pub fn dsr_decide(&mut self, packet: &Packet) -> Decision {
        match packet.class {
            PacketClass::Own => Decision::Forward,
            PacketClass::Neighbor if self.energy_remaining > 0 => {
                self.energy_remaining -= 1;
                Decision::Forward
            }
            PacketClass::Neighbor => Decision::Drop,
        }
    }

    pub fn ctc_split(&self, epoch_length: f64, min_share_fraction: f64) -> TimeBudget {
        ctc_split(
            self.self_queue.len(),
            self.neighbor_queue.len(),
            epoch_length,
            min_share_fraction,
        )
    }
}

/// Fraction of an epoch given to neighbor traffic: proportional to the
/// neighbor backlog, clamped to `[min, 1 - min]`, one half when both queues
/// are empty.
pub fn neighbor_share(
    self_backlog: usize,
    neighbor_backlog: usize,
    min_share_fraction: f64,
) -> f64 {
    let total = self_backlog + neighbor_backlog;
    let share = if total == 0 {
        0.5
    } else {
        neighbor_backlog as f64 / total as f64
    };
    share.clamp(min_share_fraction, 1.0 - min_share_fraction)
}

pub fn ctc_split(
    self_backlog: usize,
    neighbor_backlog: usize,
    epoch_length: f64,
    min_share_fraction: f64,
) -> TimeBudget {
    let t_np = neighbor_share(self_backlog, neighbor_backlog, min_share_fraction) * epoch_length;
    TimeBudget::new(epoch_length - t_np, t_np).expect("share lies in [0, 1]")
}

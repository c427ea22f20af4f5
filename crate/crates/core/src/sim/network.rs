use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Policy, SimConfig};
use super::node::{neighbor_share, ClassTally, Decision, NodeState, Packet, PacketClass};
use super::trace::{NodeSnapshot, TraceRecord};
use super::SimError;

/// Index of the forwarding node in a star network.
pub const TARGET: usize = 0;

/// Leaf of the star. Leaves only generate traffic toward the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceNode {
    pub id: usize,
    pub emitted: u64,
}

/// Star of `neighbor_count` traffic sources around one forwarding node.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: SimConfig,
    target: NodeState,
    sources: Vec<SourceNode>,
    rng: ChaCha8Rng,
    next_packet_id: u64,
    // Cumulative expected arrivals; each epoch admits the integer increment.
    own_arrivals: f64,
    neighbor_arrivals: f64,
    next_source: usize,
}

pub fn build_network(config: &SimConfig) -> Result<Network, SimError> {
    config.validate()?;
    Ok(Network {
        config: config.clone(),
        target: NodeState::new(config.energy_budget),
        sources: (1..=config.neighbor_count)
            .map(|id| SourceNode { id, emitted: 0 })
            .collect(),
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        next_packet_id: 0,
        own_arrivals: 0.0,
        neighbor_arrivals: 0.0,
        next_source: 0,
    })
}

impl Network {
    pub fn node_count(&self) -> usize {
        1 + self.sources.len()
    }

    pub fn link_count(&self) -> usize {
        self.sources.len()
    }

    /// Undirected links as `(target, leaf)` pairs.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sources.iter().map(|s| (TARGET, s.id))
    }

    pub fn target(&self) -> &NodeState {
        &self.target
    }

    pub fn sources(&self) -> &[SourceNode] {
        &self.sources
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Advances the network by one epoch.
    ///
    /// Order within an epoch: expire packets at their deadline, admit new
    /// arrivals, service the queues under `policy`, apply ambient loss to every
    /// serviced packet, then record counters.
    pub fn step(&mut self, policy: Policy, epoch: u64) -> TraceRecord {
        let mut own = ClassTally::default();
        let mut neighbor = ClassTally::default();

        own.dropped += expire(&mut self.target.self_queue, epoch);
        neighbor.dropped += expire(&mut self.target.neighbor_queue, epoch);

        own.offered = self.admit(PacketClass::Own, epoch);
        neighbor.offered = self.admit(PacketClass::Neighbor, epoch);

        let capacity = self.config.capacity();
        let epoch_length = self.config.epoch_length;
        let d0 = self.config.base_drop_prob;
        let (t_pp, t_np) = match policy {
            Policy::Ctc => {
                let share = neighbor_share(
                    self.target.self_queue.len(),
                    self.target.neighbor_queue.len(),
                    self.config.min_share_fraction,
                );
                let neighbor_cap = (share * capacity as f64 + 1e-9).floor() as usize;
                let own_cap = ((1.0 - share) * capacity as f64 + 1e-9).floor() as usize;
                for _ in 0..own_cap.min(self.target.self_queue.len()) {
                    self.target.self_queue.pop_front();
                    transmit(&mut self.rng, d0, &mut own);
                }
                for _ in 0..neighbor_cap.min(self.target.neighbor_queue.len()) {
                    self.target.neighbor_queue.pop_front();
                    transmit(&mut self.rng, d0, &mut neighbor);
                }
                let t_np = share * epoch_length;
                (epoch_length - t_np, t_np)
            }
            Policy::Dsr => {
                let served_own = capacity.min(self.target.self_queue.len());
                for _ in 0..served_own {
                    self.target.self_queue.pop_front();
                    transmit(&mut self.rng, d0, &mut own);
                }
                let remaining = capacity - served_own;
                for _ in 0..remaining.min(self.target.neighbor_queue.len()) {
                    let packet = self
                        .target
                        .neighbor_queue
                        .pop_front()
                        .expect("bounded by queue length");
                    match self.target.dsr_decide(&packet) {
                        Decision::Forward => transmit(&mut self.rng, d0, &mut neighbor),
                        Decision::Drop => neighbor.dropped += 1,
                    }
                }
                let t_pp = served_own as f64 / capacity as f64 * epoch_length;
                (t_pp, epoch_length - t_pp)
            }
        };

        self.target.own.add(&own);
        self.target.neighbor.add(&neighbor);

        TraceRecord {
            epoch,
            nodes: vec![NodeSnapshot {
                node: TARGET,
                epoch_own: own,
                epoch_neighbor: neighbor,
                total_own: self.target.own,
                total_neighbor: self.target.neighbor,
                queued_own: self.target.self_queue.len(),
                queued_neighbor: self.target.neighbor_queue.len(),
                t_pp,
                t_np,
                energy_remaining: self.target.energy_remaining,
            }],
        }
    }

    fn admit(&mut self, class: PacketClass, epoch: u64) -> u64 {
        let (rate, acc) = match class {
            PacketClass::Own => (self.config.self_rate_fn.eval(epoch), &mut self.own_arrivals),
            PacketClass::Neighbor => (
                self.config.neighbor_rate_fn.eval(epoch),
                &mut self.neighbor_arrivals,
            ),
        };
        let before = acc.floor();
        *acc += rate;
        let count = (acc.floor() - before) as u64;

        let deadline_epoch = epoch + self.config.deadline_epochs;
        for _ in 0..count {
            let origin = match class {
                PacketClass::Own => TARGET,
                PacketClass::Neighbor => {
                    let n = self.sources.len();
                    let source = &mut self.sources[self.next_source];
                    source.emitted += 1;
                    self.next_source = (self.next_source + 1) % n;
                    source.id
                }
            };
            let packet = Packet {
                id: self.next_packet_id,
                class,
                origin,
                created_epoch: epoch,
                deadline_epoch,
            };
            self.next_packet_id += 1;
            match class {
                PacketClass::Own => self.target.self_queue.push_back(packet),
                PacketClass::Neighbor => self.target.neighbor_queue.push_back(packet),
            }
        }
        count
    }
}

/// Removes packets whose deadline has been reached. Queues are FIFO with
/// nondecreasing deadlines, so only the front needs checking.
fn expire(queue: &mut VecDeque<Packet>, epoch: u64) -> u64 {
    let mut expired = 0;
    while queue.front().is_some_and(|p| p.deadline_epoch <= epoch) {
        queue.pop_front();
        expired += 1;
    }
    expired
}

fn transmit(rng: &mut ChaCha8Rng, d0: f64, tally: &mut ClassTally) {
    if d0 > 0.0 && rng.random_bool(d0) {
        tally.dropped += 1;
    } else {
        tally.forwarded += 1;
    }
}

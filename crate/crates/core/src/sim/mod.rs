//! Discrete-epoch packet-forwarding simulator.
//!
//! A star network of traffic sources feeds one forwarding node that keeps a
//! FIFO queue per packet class. Each epoch the node services at most
//! `data_rate * epoch_length` packets, splitting that capacity between its
//! own traffic and neighbor traffic according to a [`Policy`]. Queued packets
//! are discarded once their deadline is reached, and every serviced packet is
//! independently lost with the ambient drop probability.
//!
//! Runs are single-threaded and fully determined by their [`SimConfig`],
//! including the seed.

mod config;
mod misbehavior;
mod network;
mod node;
mod trace;

use thiserror::Error;

pub use self::config::{Policy, RateFunction, RateKind, SimConfig};
pub use self::misbehavior::{classify_misbehavior, MisbehaviorStats, WindowDrop};
pub use self::network::{build_network, Network, SourceNode, TARGET};
pub use self::node::{
    ctc_split, neighbor_share, ClassTally, Decision, NodeState, Packet, PacketClass,
};
pub use self::trace::{NodeSnapshot, Trace, TraceRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("trace is empty")]
    EmptyTrace,
}

/// Runs `config.epochs` epochs under `config.policy`.
pub fn run(config: &SimConfig) -> Result<Trace, SimError> {
    let mut network = build_network(config)?;
    let records = (0..config.epochs)
        .map(|epoch| network.step(config.policy, epoch))
        .collect();
    Ok(Trace {
        epoch_length: config.epoch_length,
        records,
    })
}

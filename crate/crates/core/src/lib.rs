//! Asymmetric time-division forwarding for mobile ad hoc networks.
//!
//! The crate has two halves. [`model`] and [`utilization`] evaluate the
//! closed-form forwarding, throughput and utilization expressions for a single
//! node. [`sim`], [`experiments`] and [`report`] run a seeded packet-level
//! simulation of a forwarding node under the cooperative time-split policy
//! (CTC) and an energy-gated selfish baseline (DSR), sweep it over the four
//! traffic cases, and export the results as CSV series.
//!
//! Runnable examples for each capability live in `examples/`.

pub mod experiments;
pub mod model;
pub mod report;
pub mod sim;
pub mod utilization;

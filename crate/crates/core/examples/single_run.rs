//! One simulation run under each policy, with per-window drop ratios.
//!
//!     cargo run --example single_run [-- config.json]
//!
//! Without an argument a moderately overloaded built-in config is used.

use ctc_sim::experiments::summarize;
use ctc_sim::report::load_config;
use ctc_sim::sim::{self, classify_misbehavior, Policy, RateFunction, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => SimConfig {
            self_rate_fn: RateFunction::constant(700.0),
            neighbor_rate_fn: RateFunction::increasing(100.0, 6.0),
            energy_budget: 15_000,
            seed: 7,
            ..SimConfig::default()
        },
    };

    for policy in [Policy::Ctc, Policy::Dsr] {
        let config = SimConfig {
            policy,
            ..base.clone()
        };
        let trace = sim::run(&config)?;
        let row = summarize("custom", 0, &config, &trace)?;
        println!("{policy}:");
        println!(
            "  own      offered {:>6} forwarded {:>6} dropped {:>6}",
            row.own.offered, row.own.forwarded, row.own.dropped
        );
        println!(
            "  neighbor offered {:>6} forwarded {:>6} dropped {:>6}",
            row.neighbor.offered, row.neighbor.forwarded, row.neighbor.dropped
        );
        println!(
            "  drop ratio {:.4}, throughput {:.1}/s, utilization {:.4}",
            row.drop_ratio, row.throughput, row.utilization
        );
        let last = &trace.final_snapshots()[0];
        println!("  energy left {}", last.energy_remaining);

        let stats =
            classify_misbehavior(&trace, config.misbehavior_threshold, config.window_epochs)?;
        let ratios: Vec<String> = stats
            .windows
            .iter()
            .map(|w| format!("{:.2}", w.ratio()))
            .collect();
        println!("  neighbor drop per window: {}", ratios.join(" "));
        println!("  malicious fraction {:.2}", stats.malicious_fraction);
    }
    Ok(())
}

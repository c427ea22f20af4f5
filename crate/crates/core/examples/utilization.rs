//! Node and route utilization from packet counters and time components.
//!
//!     cargo run --example utilization

use ctc_sim::model::TimeBudget;
use ctc_sim::utilization::{
    power_out, utilization_node, utilization_node_simplified, utilization_per_route,
    utilization_total, PacketCounters,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let counters = PacketCounters::new(4, 6, 12)?;
    let times = TimeBudget::new(2.0, 3.0)?;
    let rates = power_out(&counters, &times)?;
    println!(
        "rates: own out {:.3}/s, neighbor out {:.3}/s, in {:.3}/s",
        rates.n_ppout, rates.n_pnout, rates.n_pin
    );
    println!(
        "node: ratio form {}, simplified form {}",
        utilization_node(&counters, &times)?,
        utilization_node_simplified(&counters, &times)?
    );

    let routes = [
        (PacketCounters::new(4, 6, 12)?, TimeBudget::new(2.0, 3.0)?),
        (PacketCounters::new(10, 3, 3)?, TimeBudget::new(4.0, 1.0)?),
        (PacketCounters::new(0, 5, 10)?, TimeBudget::new(1.0, 1.0)?),
    ];
    for r in utilization_per_route(&routes)? {
        println!("route {}: {:.4}", r.route_index, r.value);
    }
    println!("total: {:.4}", utilization_total(&routes)?);
    println!("no routes: {}", utilization_total(&[])?);
    Ok(())
}

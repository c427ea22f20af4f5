//! Closed-form forwarding model for a few (p, k) settings.
//!
//!     cargo run --example model_eval

use ctc_sim::model::{self, ForwardingParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data_rate = 1000.0;
    println!("    p   k   p_self  p_nbr    t_pp      t_np      t_i       throughput");
    for (p, k) in [(0.0, 5), (0.1, 5), (0.5, 2), (0.5, 10), (0.9, 20)] {
        let params = ForwardingParams::new(p, k, data_rate)?;
        let probs = model::prob_batch(&params);
        let times = model::time_components(&params);
        let closed = model::time_components_closed_form(&params);
        assert!((times.total() - closed.total()).abs() <= 1e-9 * closed.total().max(1e-300));
        println!(
            "  {p:.1} {k:>3}  {:.4}  {:.4}   {:.6}  {:.6}  {:.6}  {:.3}",
            probs.p_self,
            probs.p_neighbor,
            times.t_pp(),
            times.t_np(),
            times.total(),
            model::throughput(&params)?,
        );
    }

    // A node that forwards everything (p = 1) leaves no own transmissions to
    // normalise throughput against.
    let all_forward = ForwardingParams::new(1.0, 3, data_rate)?;
    println!("p = 1: {}", model::throughput(&all_forward).unwrap_err());

    println!(
        "drop rate of 30 + 20 packets over 10 s: {}",
        model::packet_drop_rate(30, 20, 10.0)?
    );
    Ok(())
}

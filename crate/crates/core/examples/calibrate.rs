//! Reproduces the calibration of the experiment defaults.
//!
//! Runs the four cases with the committed parameters and prints the
//! seed-averaged drop ratio and malicious fraction per sweep value, the
//! quantities the Case I band, Case III ordering, Case IV constancy and
//! Case V shape checks are judged on.
//!
//!     cargo run --release --example calibrate [-- <seeds>]

use ctc_sim::experiments::{case_spec, derive_case_v, run_case, CaseId, ResultTable};
use ctc_sim::sim::Policy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(10);
    let mut tables: Vec<ResultTable> = Vec::new();
    for case in CaseId::ALL {
        let table = run_case(&case_spec(case).with_seeds(1, seeds))?;
        println!("case {case}");
        println!("  sweep   ctc_drop  dsr_drop  ctc_mal  dsr_mal");
        let ctc = table.mean_by_sweep(Policy::Ctc, |r| r.drop_ratio);
        let dsr = table.mean_by_sweep(Policy::Dsr, |r| r.drop_ratio);
        let ctc_m = table.mean_by_sweep(Policy::Ctc, |r| r.malicious_fraction);
        let dsr_m = table.mean_by_sweep(Policy::Dsr, |r| r.malicious_fraction);
        for i in 0..ctc.len() {
            println!(
                "  {:>5}   {:.4}    {:.4}    {:.4}   {:.4}",
                ctc[i].0, ctc[i].1, dsr[i].1, ctc_m[i].1, dsr_m[i].1
            );
        }
        tables.push(table);
    }

    let curves = derive_case_v(&tables)?;
    println!("pooled drop buckets (raw / smoothed malicious fraction, rows)");
    for algorithm in [Policy::Ctc, Policy::Dsr] {
        let smoothed = curves.smoothed(algorithm);
        for (raw, fit) in curves.curve(algorithm).iter().zip(&smoothed) {
            println!(
                "  {algorithm} {:>3}%  {:.4}  {:.4}  {}",
                raw.lower_pct, raw.mean_malicious, fit.mean_malicious, raw.count
            );
        }
    }
    Ok(())
}

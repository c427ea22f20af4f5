//! Sweeps one traffic case and writes its result CSV.
//!
//!     cargo run --release --example case_sweep -- II case_ii.csv
//!
//! Prints the seed-averaged drop ratio per sweep value for both policies.

use std::fs::File;
use std::io::BufWriter;

use ctc_sim::experiments::{case_spec, run_case, CaseId};
use ctc_sim::report::{emit_csv, sweep_means};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let case: CaseId = args.next().as_deref().unwrap_or("I").parse()?;
    let out = args.next().unwrap_or_else(|| format!("case_{case}.csv"));

    let table = run_case(&case_spec(case))?;
    let bytes = emit_csv(&table, BufWriter::new(File::create(&out)?))?;
    println!("case {case}: {} rows, {bytes} bytes -> {out}", table.len());

    for (algorithm, points) in sweep_means(&table, |r| r.drop_ratio) {
        let line: Vec<String> = points.iter().map(|(x, y)| format!("{x}:{y:.3}")).collect();
        println!("{algorithm}: {}", line.join(" "));
    }
    Ok(())
}

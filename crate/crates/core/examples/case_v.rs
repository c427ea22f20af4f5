//! Malicious fraction against drop ratio, pooled over all four cases.
//!
//!     cargo run --release --example case_v
//!
//! Prints the raw and isotonic-smoothed bucket curves (figures 5 and 6) and
//! the per-case curves they are pooled from.

use ctc_sim::experiments::{case_spec, derive_case_v, run_case, CaseId, CaseVCurves};
use ctc_sim::report::figure_series;
use ctc_sim::sim::Policy;

fn print_curves(label: &str, curves: &CaseVCurves) {
    println!("{label}");
    for algorithm in [Policy::Ctc, Policy::Dsr] {
        let points: Vec<String> = curves
            .curve(algorithm)
            .iter()
            .map(|b| format!("{}%:{:.2}", b.lower_pct, b.mean_malicious))
            .collect();
        println!("  {algorithm}: {}", points.join(" "));
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = CaseId::ALL
        .iter()
        .map(|&c| run_case(&case_spec(c)))
        .collect::<Result<Vec<_>, _>>()?;

    for (case, table) in CaseId::ALL.iter().zip(&tables) {
        print_curves(
            &format!("case {case}"),
            &derive_case_v(std::slice::from_ref(table))?,
        );
    }
    print_curves("pooled", &derive_case_v(&tables)?);

    for figure in [5, 6] {
        let fig = figure_series(&tables, figure)?;
        println!("figure {figure} ({} vs {})", fig.y_label, fig.x_label);
        for s in &fig.series {
            let points: Vec<String> = s
                .points
                .iter()
                .map(|(x, y)| format!("{x}:{y:.3}"))
                .collect();
            println!("  {}: {}", s.algorithm, points.join(" "));
        }
    }
    Ok(())
}

//! Same config and seed give byte-identical CSV; a different seed does not.
//!
//!     cargo run --example determinism

use ctc_sim::experiments::{case_spec, run_case, CaseId};
use ctc_sim::report::emit_csv;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let render = |first_seed| -> Result<Vec<u8>, Box<dyn std::error::Error>> {
        let spec = case_spec(CaseId::III)
            .with_sweep(vec![400, 1200])
            .with_seeds(first_seed, 3);
        let mut buf = Vec::new();
        emit_csv(&run_case(&spec)?, &mut buf)?;
        Ok(buf)
    };

    let a = render(1)?;
    let b = render(1)?;
    let c = render(2)?;
    println!("{} bytes per run", a.len());
    println!("same seed identical:      {}", a == b);
    println!("different seed identical: {}", a == c);
    assert!(a == b && a != c);
    print!("{}", String::from_utf8(a)?);
    Ok(())
}

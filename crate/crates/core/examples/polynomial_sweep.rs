//! How close the fast path gets to the polynomial-growth asymptotics.

use walkbound::cli::{sweep_rows, SweepArgs, SweepFamily};
use walkbound::Result;

fn main() -> Result<()> {
    for p in [0.0, 2.0] {
        let args = SweepArgs {
            family: SweepFamily::PolyFastPath,
            n_list: vec![100, 1_000, 10_000, 100_000],
            g: None,
            p,
            max_vertices: 20_000,
            out: None,
        };
        println!("p = {p}");
        println!(
            "{:>8} {:>12} {:>16} {:>16} {:>8}",
            "n", "g", "E T", "bound", "ratio"
        );
        for row in sweep_rows(&args)? {
            println!(
                "{:>8} {:>12.8} {:>16.1} {:>16.1} {:>8.4}",
                row.n,
                row.g,
                row.closed_form_et,
                row.mean_bound,
                row.ratio.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}

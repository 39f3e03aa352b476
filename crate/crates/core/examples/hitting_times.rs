//! Exact hitting statistics on a small weighted graph.

use walkbound::{exact, GraphBuilder, Result};

fn main() -> Result<()> {
    // A square with a diagonal and a heavy dangling edge at the target.
    let g = GraphBuilder::new()
        .edge("o", "a", 1.0)
        .edge("o", "b", 2.0)
        .edge("a", "b", 0.5)
        .edge("a", "z", 1.0)
        .edge("b", "z", 3.0)
        .edge("z", "tail", 4.0)
        .origin("o")
        .target("z")
        .build()?;

    let (mean, second) = exact::hitting_moments(&g)?;
    println!("E T       = {mean:.6}");
    println!("Var T     = {:.6}", second - mean * mean);
    println!("r(o, z)   = {:.6}", exact::effective_resistance(&g)?);

    let stats = exact::hitting_time_pmf(&g, 40)?;
    println!("P(T <= 5) = {:.6}", stats.cdf(5));
    println!("P(T > 40) = {:.3e}", stats.survival_mass);

    for beta in [0.5, 0.9, 0.99] {
        let p = exact::walk_parameters(&g, beta)?;
        println!(
            "beta {beta}: S = {:.6}, R = {:.6}, Gamma = {:.6}",
            p.s, p.r, p.gamma
        );
    }
    Ok(())
}

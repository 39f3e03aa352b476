//! Simulated hitting times against the exact law.

use walkbound::montecarlo::{
    clopper_pearson, simulate_hitting, write_hitting_csv, GraphWalker, SimConfig,
};
use walkbound::{exact, generators, Result};

fn main() -> Result<()> {
    let g = generators::unit_path(10)?;
    let walker = GraphWalker::new(&g)?;
    let samples = simulate_hitting(&walker, &SimConfig::hitting(42, 20_000, 1_000_000));

    let (mean, se) = samples.mean();
    println!(
        "E T = {} exact, {mean:.2} +- {se:.2} simulated",
        exact::expected_hitting_time(&g)?
    );

    let k: usize = 60;
    let hits = samples.count_at_most(k as u64)?;
    let (lo, hi) = clopper_pearson(hits, samples.samples.len() as u64, 0.95)?;
    let stats = exact::hitting_time_pmf(&g, k)?;
    println!(
        "P(T <= {k}) = {:.4} exact, 95% interval [{lo:.4}, {hi:.4}]",
        stats.cdf(k)
    );

    let mut out = Vec::new();
    write_hitting_csv(&mut out, &samples)?;
    let text = String::from_utf8_lossy(&out);
    for line in text.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}

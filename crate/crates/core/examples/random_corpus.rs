//! Every property check over a seeded corpus of random graphs.

use walkbound::bounds::TheoremConfig;
use walkbound::{cli, generators, Result};

fn main() -> Result<()> {
    let graphs = generators::corpus(0, 200)?;
    let summary = cli::check_corpus(&graphs, &TheoremConfig::default())?;
    println!(
        "{} graphs, {} verdicts ({} vacuous), {} bound, {} flow and {} commute violations",
        summary.graphs,
        summary.verdicts,
        summary.vacuous,
        summary.bound_violations,
        summary.flow_violations,
        summary.commute_violations
    );
    Ok(())
}

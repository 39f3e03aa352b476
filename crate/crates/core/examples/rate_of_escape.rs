//! Speed and single-logarithm scaling of escaping walks.

use walkbound::generators;
use walkbound::montecarlo::{escape_ratios, Estimator, GraphWalker, IntegerWalker, SimConfig};
use walkbound::Result;

fn main() -> Result<()> {
    let record = vec![100, 1_000, 10_000, 100_000];

    let biased = IntegerWalker::new(2.0, None)?;
    let config = SimConfig::escape(1, 100, record.clone(), Estimator::SpeedRatio);
    println!("biased walk, g = 2 (speed 1/3):");
    for s in escape_ratios(&biased, &config)?.summary(Estimator::SpeedRatio) {
        println!(
            "  k {:>7}: mean {:.4}, 10-90% [{:.4}, {:.4}]",
            s.k, s.mean, s.q10, s.q90
        );
    }

    let cuts = generators::default_cut_points(16, 3);
    let g = generators::concatenated_fast(&cuts, 0.0)?;
    let walker = GraphWalker::new(&g)?;
    let record: Vec<u64> = [16u64, 64, 256, 1024, 4096, 16_384, 65_536].to_vec();
    let config = SimConfig::escape(2, 20, record, Estimator::SingleLogRatio);
    println!(
        "concatenated fast paths, p = 0 (limit sqrt(2)/2 = {:.4}):",
        0.5f64.sqrt()
    );
    for s in escape_ratios(&walker, &config)?.summary(Estimator::SingleLogRatio) {
        println!(
            "  k {:>6}: mean {:.4}, running max {:.4}",
            s.k, s.mean, s.running_max
        );
    }
    Ok(())
}

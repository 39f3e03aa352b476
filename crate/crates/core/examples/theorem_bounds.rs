//! Lower bounds on the hitting time against exact values.

use walkbound::bounds::{self, Check, GOption, TheoremConfig};
use walkbound::{generators, Result};

fn main() -> Result<()> {
    let g = generators::fast_path(12, 1.6)?;
    let report = bounds::check_theorem1(&g, &TheoremConfig::default())?;

    println!("n = {}, w_z/w_o = {:.4}", report.n, report.ratio);
    println!(
        "g_a = {:.6}, g_b = {:.6}, g' = {:?}",
        report.g_a, report.g_b, report.g_prime
    );
    println!(
        "E T = {:.4} >= {:.4} (option a), {:.4} (option b)",
        report.expected_t, report.mean_bound_a, report.mean_bound_b
    );

    println!("\ntail bound for option b:");
    for v in report
        .verdicts
        .iter()
        .filter(|v| v.check == Check::Tail && v.option == GOption::B)
    {
        println!(
            "  a = {:.4}: P = {:.3e} <= {:.3e}  {:?}",
            v.parameter.unwrap(),
            v.exact,
            v.bound,
            v.status
        );
    }
    println!(
        "\nall {} checks passed: {}",
        report.verdicts.len(),
        report.passed()
    );
    Ok(())
}

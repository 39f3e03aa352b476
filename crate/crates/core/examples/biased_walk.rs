//! The biased walk on the integers that every bound compares against.

use walkbound::{exact, generators, reference, Result};

fn main() -> Result<()> {
    let g = 1.5;
    let m = reference::mean_m(g);
    println!(
        "g = {g}: speed {:.4}, m_g = {m:.4}",
        reference::BiasedWalk::new(g)?.speed()
    );

    for i in 0..5 {
        let a = 1.0 + (m - 1.0) * i as f64 / 5.0;
        println!("  I({a:.3}) = {:.6}", reference::rate_i(g, a)?);
    }

    // The walk on a long line has the same Laplace transform as the walk on Z.
    let n = 10;
    let line = generators::biased_line_with_tail(n, g, generators::safe_tail(g, 1e-13))?;
    for beta in [0.3, 0.7, 0.95] {
        println!(
            "  beta {beta}: phi^n = {:.12}, line = {:.12}",
            reference::step_transform(g, beta)?.powi(n as i32),
            exact::survival_transform(&line, beta)?
        );
    }

    let pmf = reference::tn_pmf(g, n, 200)?;
    let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    println!(
        "E T_n (truncated at 200) = {mean:.4}, m_g n = {:.4}",
        m * n as f64
    );
    Ok(())
}

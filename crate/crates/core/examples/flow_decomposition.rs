//! The loss flow of a walk and its decomposition into path flows.

use walkbound::{bounds, exact, flows, generators, Result};

fn main() -> Result<()> {
    let g = bounds::reduce(&generators::random_graph(&generators::RandomSpec::corpus(
        7,
    ))?);
    let beta = 0.8;

    let flow = flows::build_flow(&g, beta)?;
    println!("node-law residual {:.1e}", flows::verify_node_law(&flow));

    let d = flows::decompose(&flow)?;
    for c in &d.components {
        let path: Vec<&str> = c.path.iter().map(|&x| g.label(x)).collect();
        println!("alpha {:.5}  {}", c.alpha, path.join(" -> "));
    }
    println!("dead end alpha {:.5}", d.dead_end_alpha);
    println!("reconstruction error {:.1e}", d.reconstruction_error(&flow));

    let arrays = flows::array_representation(&d);
    let p = exact::walk_parameters(&g, beta)?;
    println!("S     {:.10}  arrays {:.10}", p.s, arrays.survival());
    println!("Gamma {:.10}  arrays {:.10}", p.gamma, arrays.gamma()?);
    println!("R     {:.10} <= {:.10}", p.r, arrays.visits_bound());
    Ok(())
}

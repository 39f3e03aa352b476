//! Writing a generated graph to disk and reading it back.

use walkbound::generators::GeneratorSpec;
use walkbound::{graph, Result};

fn main() -> Result<()> {
    let spec = GeneratorSpec::RecurrentTreeLine {
        arity: 2,
        depths: vec![1, 2, 3],
        length: 6,
        max_vertices: 10_000,
    };
    let g = spec.build()?;
    let text = graph::serialize(&g);

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("tree_line.json");
    std::fs::write(&path, &text)?;
    let back = graph::parse(&std::fs::read(&path)?)?;

    assert_eq!(back, g);
    println!(
        "{} vertices, {} edges, {} targets; metadata {:?}",
        back.num_vertices(),
        back.num_edges(),
        back.targets().len(),
        back.metadata().map(|m| (&m.generator, m.safe_horizon))
    );
    println!("{} bytes on disk", text.len());
    Ok(())
}

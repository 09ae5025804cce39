//! Builds the graph induced by a banded precision matrix and colors it.
use sparse_hct::graph::{greedy_coloring, induced_graph, sparsity_degree};
use sparse_hct::model::{build_omega, OmegaSpec};

fn main() -> sparse_hct::Result<()> {
    for spec in ["tridiagonal:0.3", "five_diagonal:0.4,0.1", "paired_block:0.6", "block_five_diagonal:4,25,0.45,0.1"] {
        let spec: OmegaSpec = spec.parse()?;
        let omega = build_omega(&spec, 100)?;
        let g = induced_graph(&omega);
        let c = greedy_coloring(&g);
        assert!(c.is_proper(&g));
        println!(
            "{spec:?}: K = {}, edges = {}, components = {}, colors = {}",
            sparsity_degree(&omega),
            g.num_edges(),
            g.components().len(),
            c.num_colors
        );
    }
    Ok(())
}

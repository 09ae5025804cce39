//! Graph induced by the nonzero pattern of a precision matrix.

use std::io::Write;

use crate::error::Result;
use crate::matrix::SparseSymMatrix;

/// Edge `(i, j)` exists iff `Ω(i, j) ≠ 0` and `i ≠ j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedGraph {
    adjacency: Vec<Vec<usize>>,
}

impl InducedGraph {
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        Self { adjacency }
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let p = self.num_nodes();
        let mut seen = vec![false; p];
        let mut out = Vec::new();
        for s in 0..p {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                for &j in &self.adjacency[comp[k]] {
                    if !seen[j] {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

pub fn induced_graph(omega: &SparseSymMatrix) -> InducedGraph {
    // the matrix never stores explicit off-diagonal zeros
    let adjacency = (0..omega.dim())
        .map(|i| omega.off_diagonal_row(i).iter().map(|e| e.0).collect())
        .collect();
    InducedGraph { adjacency }
}

/// `K`: the largest number of nonzeros in any row, diagonal included.
pub fn sparsity_degree(omega: &SparseSymMatrix) -> usize {
    omega.max_row_nnz()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub color: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    /// No edge joins two nodes of the same color.
    pub fn is_proper(&self, graph: &InducedGraph) -> bool {
        graph.edges().all(|(i, j)| self.color[i] != self.color[j])
    }

    /// Nodes grouped by color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (i, &c) in self.color.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["node", "color"])?;
        for (i, c) in self.color.iter().enumerate() {
            out.write_record([i.to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Greedy coloring in node order, each node taking the smallest color not
/// used by an earlier neighbor. Uses at most `max_degree + 1` colors.
pub fn greedy_coloring(graph: &InducedGraph) -> Coloring {
    let p = graph.num_nodes();
    let mut color = vec![usize::MAX; p];
    let mut taken: Vec<usize> = Vec::new();
    let mut num_colors = 0;
    for i in 0..p {
        taken.clear();
        taken.extend(graph.neighbors(i).iter().map(|&j| color[j]).filter(|&c| c != usize::MAX));
        taken.sort_unstable();
        taken.dedup();
        let c = taken
            .iter()
            .enumerate()
            .find(|(k, &c)| *k != c)
            .map_or(taken.len(), |(k, _)| k);
        color[i] = c;
        num_colors = num_colors.max(c + 1);
    }
    Coloring { color, num_colors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_omega, OmegaSpec};

    #[test]
    fn identity_has_no_edges() {
        let g = induced_graph(&SparseSymMatrix::identity(5));
        assert_eq!(g.num_edges(), 0);
        let c = greedy_coloring(&g);
        assert_eq!(c.num_colors, 1);
    }

    #[test]
    fn tridiagonal_is_a_path() {
        let g = induced_graph(&build_omega(&OmegaSpec::Tridiagonal { a: 0.3 }, 5).unwrap());
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn paired_block_is_a_matching() {
        let omega = build_omega(&OmegaSpec::PairedBlock { h: 0.6 }, 6).unwrap();
        let g = induced_graph(&omega);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(g.components().len(), 3);
    }

    #[test]
    fn path_needs_two_colors() {
        let g = induced_graph(&build_omega(&OmegaSpec::Tridiagonal { a: 0.3 }, 3).unwrap());
        let c = greedy_coloring(&g);
        assert_eq!(c.num_colors, 2);
        assert!(c.is_proper(&g));
    }

    #[test]
    fn sparsity_degrees() {
        assert_eq!(sparsity_degree(&SparseSymMatrix::identity(4)), 1);
        let five = build_omega(&OmegaSpec::FiveDiagonal { a1: 0.3, a2: 0.1 }, 20).unwrap();
        assert_eq!(sparsity_degree(&five), 5);
        let tri2 = build_omega(&OmegaSpec::Tridiagonal { a: 0.3 }, 2).unwrap();
        assert_eq!(sparsity_degree(&tri2), 2);
    }

    #[test]
    fn five_diagonal_coloring_is_bounded() {
        let g = induced_graph(&build_omega(&OmegaSpec::FiveDiagonal { a1: 0.3, a2: 0.1 }, 20).unwrap());
        let c = greedy_coloring(&g);
        assert!(c.is_proper(&g));
        assert!(c.num_colors <= 5);
        assert!(c.num_colors <= g.max_degree() + 1);
    }

    #[test]
    fn improper_coloring_is_detected() {
        let g = InducedGraph::from_adjacency(vec![vec![1], vec![0]]);
        let c = Coloring { color: vec![0, 0], num_colors: 1 };
        assert!(!c.is_proper(&g));
    }
}

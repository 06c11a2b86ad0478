//! Compressed sparse row adjacency.

use crate::error::{check_vertex, Error, Result};
use crate::generator::EdgeList;
use crate::VertexId;

/// Symmetric CSR graph. Every undirected input edge is stored as two arcs and
/// each row is sorted ascending. Duplicate arcs and self-loops are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    row_starts: Vec<u64>,
    adjacency: Vec<VertexId>,
    in_edges_total: u64,
}

impl CsrGraph {
    pub fn build(edges: &EdgeList) -> Result<CsrGraph> {
        Self::from_edges(edges.num_vertices, &edges.edges)
    }

    pub fn from_edges(num_vertices: usize, edges: &[(VertexId, VertexId)]) -> Result<CsrGraph> {
        if num_vertices > VertexId::MAX as usize {
            return Err(Error::Capacity(format!("{num_vertices} vertices do not fit 32-bit ids")));
        }
        let num_arcs = (edges.len() as u64)
            .checked_mul(2)
            .filter(|&a| a <= isize::MAX as u64 / 4)
            .ok_or_else(|| Error::Capacity(format!("{} edges overflow offsets", edges.len())))?;

        let mut row_starts = vec![0u64; num_vertices + 1];
        for &(u, v) in edges {
            check_vertex(u, num_vertices)?;
            check_vertex(v, num_vertices)?;
            row_starts[u as usize + 1] += 1;
            row_starts[v as usize + 1] += 1;
        }
        for i in 1..=num_vertices {
            row_starts[i] += row_starts[i - 1];
        }
        debug_assert_eq!(row_starts[num_vertices], num_arcs);

        let mut fill: Vec<u64> = row_starts[..num_vertices].to_vec();
        let mut adjacency = vec![0 as VertexId; num_arcs as usize];
        for &(u, v) in edges {
            adjacency[fill[u as usize] as usize] = v;
            fill[u as usize] += 1;
            adjacency[fill[v as usize] as usize] = u;
            fill[v as usize] += 1;
        }
        for w in row_starts.windows(2) {
            adjacency[w[0] as usize..w[1] as usize].sort_unstable();
        }

        Ok(CsrGraph { row_starts, adjacency, in_edges_total: edges.len() as u64 })
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.row_starts.len() - 1
    }

    #[inline]
    pub fn num_arcs(&self) -> u64 {
        self.adjacency.len() as u64
    }

    /// Number of undirected input edges (the TEPS numerator).
    #[inline]
    pub fn in_edges_total(&self) -> u64 {
        self.in_edges_total
    }

    #[inline]
    pub fn row_starts(&self) -> &[u64] {
        &self.row_starts
    }

    #[inline]
    pub fn adjacency(&self) -> &[VertexId] {
        &self.adjacency
    }

    pub fn degree(&self, v: VertexId) -> Result<u64> {
        check_vertex(v, self.num_vertices())?;
        Ok(self.degree_unchecked(v))
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, v: VertexId) -> u64 {
        self.row_starts[v as usize + 1] - self.row_starts[v as usize]
    }

    /// Adjacency row of `v`. Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.adjacency[self.row_starts[v] as usize..self.row_starts[v + 1] as usize]
    }

    pub fn max_degree(&self) -> u64 {
        self.row_starts.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Binary search on the sorted row.
    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }
}

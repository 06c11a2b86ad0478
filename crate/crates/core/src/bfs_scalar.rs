//! Scalar per-layer kernels and the sequential reference traversal.

use std::collections::VecDeque;
use std::ops::Range;

use rayon::prelude::*;

use crate::csr::CsrGraph;
use crate::error::{check_vertex, Result};
use crate::frontier::{BfsTree, BitIter, Bitmap, LayerCounters, WORD_BITS};
use crate::VertexId;

/// Level of a vertex the traversal never reached.
pub const UNREACHED: u32 = u32::MAX;

/// Words handed to one rayon task when a kernel runs on more than one thread.
pub(crate) const WORDS_PER_TASK: usize = 256;

/// Per-range results of a layer kernel, summed across worker tasks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct LayerTally {
    pub found: u64,
    pub edges: u64,
    pub fallbacks: u64,
    pub gathers: u64,
}

impl std::ops::Add for LayerTally {
    type Output = LayerTally;

    fn add(self, o: LayerTally) -> LayerTally {
        LayerTally {
            found: self.found + o.found,
            edges: self.edges + o.edges,
            fallbacks: self.fallbacks + o.fallbacks,
            gathers: self.gathers + o.gathers,
        }
    }
}

/// Runs `work` over `0..num_words`, in parallel chunks when the current rayon
/// pool has more than one thread, and sums what it reports.
pub(crate) fn for_word_ranges<F>(num_words: usize, work: F) -> LayerTally
where
    F: Fn(Range<usize>) -> LayerTally + Sync,
{
    if rayon::current_num_threads() <= 1 || num_words <= WORDS_PER_TASK {
        return work(0..num_words);
    }
    (0..num_words.div_ceil(WORDS_PER_TASK))
        .into_par_iter()
        .map(|c| work(c * WORDS_PER_TASK..((c + 1) * WORDS_PER_TASK).min(num_words)))
        .reduce(LayerTally::default, |a, b| a + b)
}

/// Top-down step: every frontier vertex claims its unvisited neighbours.
///
/// Claims go through an atomic test-and-set on `visited`, so under concurrency
/// exactly one frontier vertex becomes the parent of each discovered vertex.
pub fn top_down_layer(
    g: &CsrGraph,
    frontier: &Bitmap,
    visited: &Bitmap,
    next: &Bitmap,
    tree: &BfsTree,
    counters: LayerCounters,
) -> LayerCounters {
    let t = for_word_ranges(frontier.num_words(), |words| {
        let mut t = LayerTally::default();
        for w in words {
            for b in BitIter(frontier.word(w)) {
                let u = (w * WORD_BITS) as VertexId + b;
                for &v in g.neighbors(u) {
                    if !visited.contains(v) && visited.insert(v) {
                        tree.set_parent(v, u);
                        next.insert(v);
                        t.found += 1;
                        t.edges += g.degree_unchecked(v);
                    }
                }
            }
        }
        t
    });
    counters.advance(t.found, t.edges)
}

/// Bottom-up step: every unvisited vertex adopts the first frontier vertex in
/// its adjacency row.
pub fn bottom_up_layer(
    g: &CsrGraph,
    frontier: &Bitmap,
    visited: &Bitmap,
    next: &Bitmap,
    tree: &BfsTree,
    counters: LayerCounters,
) -> LayerCounters {
    let t = for_word_ranges(visited.num_words(), |words| {
        let mut t = LayerTally::default();
        for w in words {
            let unvisited = !visited.word(w) & visited.valid_bits(w);
            for b in BitIter(unvisited) {
                let v = (w * WORD_BITS) as VertexId + b;
                if let Some(p) = first_parent_in(g.neighbors(v), frontier) {
                    visited.insert(v);
                    next.insert(v);
                    tree.set_parent(v, p);
                    t.found += 1;
                    t.edges += g.degree_unchecked(v);
                }
            }
        }
        t
    });
    counters.advance(t.found, t.edges)
}

#[inline]
pub(crate) fn first_parent_in(row: &[VertexId], frontier: &Bitmap) -> Option<VertexId> {
    row.iter().copied().find(|&n| frontier.contains(n))
}

/// Plain queue-based BFS. Sequential and deterministic; used as the oracle for
/// every other traversal.
pub fn bfs_reference(g: &CsrGraph, source: VertexId) -> Result<(BfsTree, Vec<u32>)> {
    let n = g.num_vertices();
    check_vertex(source, n)?;
    let tree = BfsTree::new(n, source)?;
    let mut levels = vec![UNREACHED; n];
    levels[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let next_level = levels[u as usize] + 1;
        for &v in g.neighbors(u) {
            if levels[v as usize] == UNREACHED {
                levels[v as usize] = next_level;
                tree.set_parent(v, u);
                queue.push_back(v);
            }
        }
    }
    Ok((tree, levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Layer {
        frontier: Bitmap,
        visited: Bitmap,
        next: Bitmap,
        tree: BfsTree,
    }

    impl Layer {
        fn new(n: usize, source: VertexId, frontier: &[VertexId], visited: &[VertexId]) -> Layer {
            let l = Layer {
                frontier: Bitmap::new(n),
                visited: Bitmap::new(n),
                next: Bitmap::new(n),
                tree: BfsTree::new(n, source).unwrap(),
            };
            frontier.iter().for_each(|&v| l.frontier.set_atomic(v).unwrap());
            visited.iter().for_each(|&v| l.visited.set_atomic(v).unwrap());
            l
        }

        fn out(&self) -> Vec<VertexId> {
            self.next.iter_ones().collect()
        }
    }

    fn star(leaves: u32) -> CsrGraph {
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        CsrGraph::from_edges(leaves as usize + 1, &edges).unwrap()
    }

    #[test]
    fn top_down_star() {
        let g = star(4);
        let l = Layer::new(5, 0, &[0], &[0]);
        let c = top_down_layer(
            &g,
            &l.frontier,
            &l.visited,
            &l.next,
            &l.tree,
            LayerCounters { e_u: 8, ..Default::default() },
        );
        assert_eq!(l.out(), vec![1, 2, 3, 4]);
        for v in 1..5 {
            assert_eq!(l.tree.parent(v), Some(0));
        }
        assert_eq!(c, LayerCounters { e_f: 4, v_f: 4, e_u: 4 });
    }

    #[test]
    fn top_down_empty_frontier_and_isolated() {
        let g = CsrGraph::from_edges(3, &[(1, 2)]).unwrap();
        let l = Layer::new(3, 0, &[], &[0]);
        let c = top_down_layer(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default());
        assert!(l.out().is_empty());
        assert_eq!(c.v_f, 0);
        assert_eq!(l.visited.iter_ones().collect::<Vec<_>>(), vec![0]);

        let l = Layer::new(3, 0, &[0], &[0]);
        top_down_layer(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default());
        assert!(l.out().is_empty());
    }

    #[test]
    fn bottom_up_path() {
        let g = CsrGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let l = Layer::new(3, 0, &[0], &[0]);
        let c = bottom_up_layer(
            &g,
            &l.frontier,
            &l.visited,
            &l.next,
            &l.tree,
            LayerCounters { e_u: 3, ..Default::default() },
        );
        assert_eq!(l.out(), vec![1]);
        assert_eq!(l.tree.parent(1), Some(0));
        assert_eq!(l.tree.parent(2), None);
        assert!(!l.visited.contains(2));
        assert_eq!(c, LayerCounters { e_f: 2, v_f: 1, e_u: 1 });
    }

    #[test]
    fn bottom_up_all_visited() {
        let g = CsrGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let l = Layer::new(3, 0, &[1, 2], &[0, 1, 2]);
        bottom_up_layer(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default());
        assert!(l.out().is_empty());
    }

    #[test]
    fn bottom_up_triangle() {
        let g = CsrGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let l = Layer::new(3, 0, &[0], &[0]);
        bottom_up_layer(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default());
        assert_eq!(l.out(), vec![1, 2]);
        assert_eq!(l.tree.parent(1), Some(0));
        assert_eq!(l.tree.parent(2), Some(0));
    }

    #[test]
    fn bottom_up_picks_first_in_row() {
        // Vertex 3 sees frontier vertices 1 and 2; row order makes 1 the parent.
        let g = CsrGraph::from_edges(4, &[(3, 2), (3, 1), (0, 1), (0, 2)]).unwrap();
        let l = Layer::new(4, 0, &[1, 2], &[0, 1, 2]);
        bottom_up_layer(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default());
        assert_eq!(l.tree.parent(3), Some(1));
    }

    #[test]
    fn reference_levels() {
        let g = CsrGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (tree, levels) = bfs_reference(&g, 0).unwrap();
        assert_eq!(levels, vec![0, 1, 2]);
        assert_eq!(tree.parents(), vec![0, 0, 1]);

        let g = CsrGraph::from_edges(4, &[(1, 2)]).unwrap();
        let (_, levels) = bfs_reference(&g, 0).unwrap();
        assert_eq!(levels, vec![0, UNREACHED, UNREACHED, UNREACHED]);
        assert!(bfs_reference(&g, 4).is_err());
    }

    #[test]
    fn parallel_kernels_match_sequential() {
        use crate::generator::{generate, GraphParams};
        let g = CsrGraph::build(&generate(GraphParams::new(14, 8, 3)).unwrap()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let src = g.adjacency()[0];
        let (_, levels) = bfs_reference(&g, src).unwrap();
        for kernel in [top_down_layer, bottom_up_layer] {
            let n = g.num_vertices();
            let mut frontier = Bitmap::new(n);
            let visited = Bitmap::new(n);
            let mut next = Bitmap::new(n);
            let tree = BfsTree::new(n, src).unwrap();
            frontier.insert(src);
            visited.insert(src);
            let mut depth = 0;
            while frontier.count_ones() > 0 {
                pool.install(|| kernel(&g, &frontier, &visited, &next, &tree, LayerCounters::default()));
                depth += 1;
                for v in next.iter_ones() {
                    assert_eq!(levels[v as usize], depth);
                }
                std::mem::swap(&mut frontier, &mut next);
                next.clear();
            }
        }
    }
}

//! Sixteen-lane vector kernels.
//!
//! The bottom-up kernel walks the visited bitmap one half-word (16 vertices)
//! at a time. For every still-unvisited lane it gathers the neighbour at
//! adjacency position `pos`, probes the frontier bitmap for it and, for lanes
//! that hit, scatters the parent and ORs the half-word into `visited` and
//! `next`. Positions `0..max_pos` are probed this way; any lane left without a
//! parent and with a longer row continues with the scalar search from position
//! `max_pos`.
//!
//! The top-down kernel walks each frontier row in chunks of sixteen arcs,
//! gathers the visited bits of the chunk and claims the unvisited ones.

use std::ops::Range;

use crate::bfs_scalar::{first_parent_in, for_word_ranges, LayerTally};
use crate::csr::CsrGraph;
use crate::error::{Error, Result};
use crate::frontier::{BfsTree, BitIter, Bitmap, Half, LayerCounters, WORD_BITS};
use crate::lanes::{Backend, LaneBackend, LaneMask, LaneVector, RowBounds, Selected};
use crate::{with_backend, VertexId};

#[cfg(target_arch = "x86_64")]
use crate::lanes::Avx512;

/// Adjacency positions probed by the vector bottom-up before falling back.
pub const DEFAULT_MAX_POS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VecConfig {
    pub max_pos: u32,
    pub backend: Backend,
}

impl Default for VecConfig {
    fn default() -> Self {
        VecConfig { max_pos: DEFAULT_MAX_POS, backend: Backend::HardwareSimd }
    }
}

impl VecConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_pos == 0 {
            return Err(Error::InvalidParams("max_pos must be at least 1".into()));
        }
        Ok(())
    }
}

/// Software counters reported by the vector kernels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VecStats {
    /// Vertices handed to the scalar search after `max_pos` positions.
    pub fallbacks: u64,
    /// Masked gathers issued (adjacency and bitmap probes).
    pub gathers: u64,
}

impl From<LayerTally> for VecStats {
    fn from(t: LayerTally) -> Self {
        VecStats { fallbacks: t.fallbacks, gathers: t.gathers }
    }
}

#[derive(Clone, Copy)]
struct LayerRefs<'a> {
    g: &'a CsrGraph,
    frontier: &'a Bitmap,
    visited: &'a Bitmap,
    next: &'a Bitmap,
    tree: &'a BfsTree,
}

pub fn masked_gather(backend: Backend, base: &[u32], idx: LaneVector, m: LaneMask, fill: u32) -> LaneVector {
    with_backend!(backend, b => b.masked_gather(base, idx, m, fill))
}

pub fn masked_scatter(backend: Backend, base: &mut [u32], idx: LaneVector, vals: LaneVector, m: LaneMask) {
    with_backend!(backend, b => b.masked_scatter(base, idx, vals, m))
}

/// The sixteen vertex ids covered by one half of a bitmap word.
#[inline]
pub fn load_vertices(word_index: usize, half: Half) -> LaneVector {
    LaneVector::iota((word_index * WORD_BITS) as u32 + half.shift())
}

/// Lanes that name a vertex of `g`.
fn in_graph(g: &CsrGraph, vertices: LaneVector) -> LaneMask {
    let n = g.num_vertices() as u64;
    let mut m = 0u16;
    for i in 0..16 {
        if (vertices.lane(i) as u64) < n {
            m |= 1 << i;
        }
    }
    LaneMask::new(m)
}

/// Gathers the `pos`-th neighbour of every lane that is neither visited
/// (`mask_vis`) nor already parented (`mask_done`) and whose row is long
/// enough. Returns the neighbours and the mask of lanes that produced one.
pub fn load_adj(
    backend: Backend,
    g: &CsrGraph,
    vertices: LaneVector,
    pos: u32,
    mask_done: LaneMask,
    mask_vis: u16,
) -> (LaneVector, LaneMask) {
    let candidates = !LaneMask::new(mask_vis) & !mask_done & in_graph(g, vertices);
    with_backend!(backend, b => {
        let bounds = b.row_bounds(g.row_starts(), vertices, candidates);
        b.adjacent_at(g.adjacency(), &bounds, pos, candidates)
    })
}

/// One probe step of the vector bottom-up for the half-word `(word_index, half)`.
///
/// Lanes whose `pos`-th neighbour is in the frontier get that neighbour as
/// parent, are marked in `visited` and `next`, and join `mask_done`. Returns
/// the lanes that found a parent.
#[allow(clippy::too_many_arguments)]
pub fn looking_parents(
    backend: Backend,
    g: &CsrGraph,
    frontier: &Bitmap,
    visited: &Bitmap,
    next: &Bitmap,
    tree: &BfsTree,
    vertices: LaneVector,
    pos: u32,
    word_index: usize,
    half: Half,
    mask_vis: u16,
    mask_done: &mut LaneMask,
) -> LaneMask {
    assert_eq!(vertices, load_vertices(word_index, half), "vertices must be the half-word's own lanes");
    let l = LayerRefs { g, frontier, visited, next, tree };
    let valid = in_graph(g, vertices);
    let mask_vis = LaneMask::new(mask_vis) | !valid;
    let before = *mask_done;
    let mut tally = LayerTally::default();
    with_backend!(backend, b => {
        let bounds = b.row_bounds_run(g.row_starts(), vertices.lane(0), !mask_vis);
        let (_, found) = looking_parents_at(b, &l, vertices, &bounds, pos, !mask_vis & !before, &mut tally);
        if !found.is_empty() {
            visited.or_half_unchecked(word_index, half, found.bits());
            next.or_half_unchecked(word_index, half, found.bits());
            *mask_done |= found;
        }
        found
    })
}

/// Probes the `pos`-th neighbour of the `candidates` lanes against the
/// frontier and records a parent for each hit. Returns the lanes that had a
/// neighbour to probe and the lanes that found a parent. Bitmaps are left to
/// the caller.
#[inline(always)]
fn looking_parents_at<B: LaneBackend>(
    b: B,
    l: &LayerRefs<'_>,
    vertices: LaneVector,
    bounds: &RowBounds,
    pos: u32,
    candidates: LaneMask,
    tally: &mut LayerTally,
) -> (LaneMask, LaneMask) {
    if candidates.is_empty() {
        return (candidates, candidates);
    }
    let (adj, active) = b.adjacent_at(l.g.adjacency(), bounds, pos, candidates);
    tally.gathers += 1;
    if active.is_empty() {
        return (active, active);
    }
    let found = b.probe_bits(l.frontier.words(), adj, active);
    tally.gathers += 1;
    if !found.is_empty() {
        b.scatter_slots(l.tree.slots(), vertices, adj, found);
    }
    (active, found)
}

#[inline(always)]
fn bottom_up_words<B: LaneBackend>(b: B, l: &LayerRefs<'_>, max_pos: u32, words: Range<usize>) -> LayerTally {
    let row_starts = l.g.row_starts();
    let adjacency = l.g.adjacency();
    let mut t = LayerTally::default();
    for w in words {
        let valid_word = l.visited.valid_bits(w);
        let seen_word = l.visited.word(w) | !valid_word;
        if seen_word == u32::MAX {
            continue;
        }
        // Both halves advance through the positions together so that their
        // independent gathers overlap. The word belongs to this task for the
        // whole layer, so lanes found so far are the only change to its
        // visited bits.
        let vertices = Half::BOTH.map(|half| load_vertices(w, half));
        let mut mask_vis = Half::BOTH.map(|half| LaneMask::new((seen_word >> half.shift()) as u16));
        let mut bounds = [RowBounds::default(); 2];
        for h in 0..2 {
            if mask_vis[h] != LaneMask::ALL {
                bounds[h] = b.row_bounds_run(row_starts, vertices[h].lane(0), !mask_vis[h]);
                // Lanes with an empty row cannot find a parent.
                mask_vis[h] |= !b.rows_longer_than(&bounds[h], 0, !mask_vis[h]);
            }
        }
        let mut done = [LaneMask::NONE; 2];
        let mut live = mask_vis.map(|m| m != LaneMask::ALL);
        for pos in 0..max_pos {
            for h in 0..2 {
                if !live[h] {
                    continue;
                }
                let (active, found) =
                    looking_parents_at(b, l, vertices[h], &bounds[h], pos, !mask_vis[h] & !done[h], &mut t);
                done[h] |= found;
                live[h] = !active.is_empty() && !(!mask_vis[h] & !done[h]).is_empty();
            }
            if !live[0] && !live[1] {
                break;
            }
        }

        let mut found_word = 0u32;
        for h in 0..2 {
            if mask_vis[h] == LaneMask::ALL {
                continue;
            }
            for i in done[h].lanes() {
                t.found += 1;
                t.edges += bounds[h].ends[i] - bounds[h].starts[i];
            }
            let mut found = done[h].bits();
            for i in b.rows_longer_than(&bounds[h], max_pos, !mask_vis[h] & !done[h]).lanes() {
                let (start, end) = (bounds[h].starts[i], bounds[h].ends[i]);
                t.fallbacks += 1;
                let row = &adjacency[(start + max_pos as u64) as usize..end as usize];
                if let Some(p) = first_parent_in(row, l.frontier) {
                    l.tree.set_parent(vertices[h].lane(i), p);
                    found |= 1 << i;
                    t.found += 1;
                    t.edges += end - start;
                }
            }
            found_word |= (found as u32) << Half::BOTH[h].shift();
        }
        if found_word != 0 {
            l.visited.or_word(w, found_word);
            l.next.or_word(w, found_word);
        }
    }
    t
}

#[inline(always)]
fn top_down_words<B: LaneBackend>(b: B, l: &LayerRefs<'_>, words: Range<usize>) -> LayerTally {
    let mut t = LayerTally::default();
    for w in words {
        for bit in BitIter(l.frontier.word(w)) {
            let u = (w * WORD_BITS) as VertexId + bit;
            let parent = LaneVector::splat(u);
            let row = l.g.neighbors(u);
            let probe = |start: usize| {
                let chunk = &row[start..(start + 16).min(row.len())];
                let m = LaneMask::first(chunk.len());
                let idx = b.load_prefix(chunk);
                (idx, m & !b.probe_bits(l.visited.words(), idx, m))
            };
            // The next chunk's visited bits are gathered before this chunk is
            // claimed; a lane claimed in between just loses its atomic claim.
            let mut start = 0;
            let mut ahead = if row.is_empty() { None } else { Some(probe(0)) };
            while let Some((idx, unvisited)) = ahead {
                start += 16;
                ahead = if start < row.len() { Some(probe(start)) } else { None };
                t.gathers += 1;
                if unvisited.is_empty() {
                    continue;
                }
                let mut claimed = 0u16;
                for i in unvisited.lanes() {
                    let v = idx.lane(i);
                    if l.visited.insert(v) {
                        claimed |= 1 << i;
                        l.next.insert(v);
                        t.found += 1;
                        t.edges += l.g.degree_unchecked(v);
                    }
                }
                if claimed != 0 {
                    b.scatter_slots(l.tree.slots(), idx, parent, LaneMask::new(claimed));
                }
            }
        }
    }
    t
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
fn bottom_up_words_avx512(hw: Avx512, l: &LayerRefs<'_>, max_pos: u32, words: Range<usize>) -> LayerTally {
    bottom_up_words(hw, l, max_pos, words)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
fn top_down_words_avx512(hw: Avx512, l: &LayerRefs<'_>, words: Range<usize>) -> LayerTally {
    top_down_words(hw, l, words)
}

/// Vector bottom-up step. Produces the same `visited` and `next` bitmaps as
/// [`crate::bfs_scalar::bottom_up_layer`]; single-threaded it also picks the
/// same parents, since both take the first frontier vertex of a sorted row.
pub fn bottom_up_multiple_set(
    g: &CsrGraph,
    frontier: &Bitmap,
    visited: &Bitmap,
    next: &Bitmap,
    tree: &BfsTree,
    counters: LayerCounters,
    cfg: &VecConfig,
) -> (LayerCounters, VecStats) {
    let l = LayerRefs { g, frontier, visited, next, tree };
    let max_pos = cfg.max_pos.max(1);
    let num_words = visited.num_words();
    let t = match cfg.backend.select() {
        #[cfg(target_arch = "x86_64")]
        // SAFETY: `hw` exists only when the CPU supports AVX-512F.
        Selected::Hardware(hw) => for_word_ranges(num_words, |r| unsafe { bottom_up_words_avx512(hw, &l, max_pos, r) }),
        Selected::Emulation(e) => for_word_ranges(num_words, |r| bottom_up_words(e, &l, max_pos, r)),
    };
    (counters.advance(t.found, t.edges), t.into())
}

/// Vector top-down step over sixteen-arc chunks of each frontier row.
pub fn top_down_chunked(
    g: &CsrGraph,
    frontier: &Bitmap,
    visited: &Bitmap,
    next: &Bitmap,
    tree: &BfsTree,
    counters: LayerCounters,
    backend: Backend,
) -> (LayerCounters, VecStats) {
    let l = LayerRefs { g, frontier, visited, next, tree };
    let num_words = frontier.num_words();
    let t = match backend.select() {
        #[cfg(target_arch = "x86_64")]
        // SAFETY: `hw` exists only when the CPU supports AVX-512F.
        Selected::Hardware(hw) => for_word_ranges(num_words, |r| unsafe { top_down_words_avx512(hw, &l, r) }),
        Selected::Emulation(e) => for_word_ranges(num_words, |r| top_down_words(e, &l, r)),
    };
    (counters.advance(t.found, t.edges), t.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfs_scalar::{bottom_up_layer, top_down_layer};
    use crate::generator::{generate, GraphParams};
    use crate::lanes::hardware_available;

    const BACKENDS: [Backend; 2] = [Backend::HardwareSimd, Backend::ScalarEmulation];

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

        fn bottom_up(&self, g: &CsrGraph, cfg: &VecConfig) -> (LayerCounters, VecStats) {
            bottom_up_multiple_set(
                g,
                &self.frontier,
                &self.visited,
                &self.next,
                &self.tree,
                LayerCounters::default(),
                cfg,
            )
        }
    }

    fn path3() -> CsrGraph {
        CsrGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn triangle() -> CsrGraph {
        CsrGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn gather_examples() {
        for be in BACKENDS {
            let base = [10, 20, 30];
            let idx = LaneVector::from_fn(|i| if i < 3 { i as u32 } else { 1000 });
            let r = masked_gather(be, &base, idx, LaneMask::new(0x0007), 0);
            let mut expect = [0u32; 16];
            expect[..3].copy_from_slice(&[10, 20, 30]);
            assert_eq!(r.to_array(), expect);
            let r = masked_gather(be, &base, idx, LaneMask::NONE, 7);
            assert_eq!(r, LaneVector::splat(7));
        }
    }

    #[test]
    #[should_panic]
    fn gather_rejects_active_out_of_bounds() {
        masked_gather(Backend::HardwareSimd, &[1, 2], LaneVector::splat(2), LaneMask::new(1), 0);
    }

    #[test]
    fn scatter_examples() {
        for be in BACKENDS {
            let mut base = vec![0u32; 10];
            masked_scatter(be, &mut base, LaneVector::splat(5), LaneVector::splat(99), LaneMask::new(1));
            assert_eq!(base[5], 99);
            assert_eq!(base.iter().filter(|&&x| x != 0).count(), 1);

            let before = base.clone();
            masked_scatter(be, &mut base, LaneVector::iota(0), LaneVector::splat(1), LaneMask::NONE);
            assert_eq!(base, before);

            let idx = LaneVector::splat(0).with_lane(1, 7).with_lane(3, 7);
            let vals = LaneVector::iota(100);
            masked_scatter(be, &mut base, idx, vals, LaneMask::new(0b1010));
            assert!(base[7] == vals.lane(1) || base[7] == vals.lane(3));
        }
    }

    #[test]
    fn vertices_of_half_words() {
        assert_eq!(load_vertices(0, Half::Low), LaneVector::iota(0));
        assert_eq!(load_vertices(0, Half::High).to_array()[0], 16);
        assert_eq!(load_vertices(0, Half::High).to_array()[15], 31);
        assert_eq!(load_vertices(3, Half::High), LaneVector::iota(112));
    }

    #[test]
    fn load_adj_examples() {
        let g = path3();
        for be in BACKENDS {
            let v = load_vertices(0, Half::Low);
            let (adj, m) = load_adj(be, &g, v, 0, LaneMask::NONE, 0x0001);
            assert_eq!(m.bits(), 0x0006);
            assert_eq!(adj.lane(1), 0);
            assert_eq!(adj.lane(2), 1);
            assert_eq!(adj.lane(0), 0);

            let (_, m) = load_adj(be, &g, v, 2, LaneMask::NONE, 0);
            assert!(m.is_empty());
            let (_, m) = load_adj(be, &g, v, 0, LaneMask::NONE, 0xFFFF);
            assert!(m.is_empty());
            let (_, m) = load_adj(be, &g, v, 0, LaneMask::new(0x0002), 0x0001);
            assert_eq!(m.bits(), 0x0004);
        }
    }

    #[test]
    fn looking_parents_triangle() {
        let g = triangle();
        for be in BACKENDS {
            let l = Layer::new(3, 0, &[0], &[0]);
            let mut done = LaneMask::NONE;
            let vis = l.visited.get_half(0, Half::Low).unwrap();
            let found = looking_parents(
                be,
                &g,
                &l.frontier,
                &l.visited,
                &l.next,
                &l.tree,
                load_vertices(0, Half::Low),
                0,
                0,
                Half::Low,
                vis,
                &mut done,
            );
            assert_eq!(found.bits(), 0b110);
            assert_eq!(done.bits(), 0b110);
            assert_eq!(l.tree.parent(1), Some(0));
            assert_eq!(l.tree.parent(2), Some(0));
            assert_eq!(l.next.iter_ones().collect::<Vec<_>>(), vec![1, 2]);

            // Lanes already done are not re-parented.
            let again = looking_parents(
                be,
                &g,
                &l.frontier,
                &l.visited,
                &l.next,
                &l.tree,
                load_vertices(0, Half::Low),
                1,
                0,
                Half::Low,
                0x0001,
                &mut done,
            );
            assert!(again.is_empty());
            assert_eq!(l.tree.parent(1), Some(0));
        }
    }

    #[test]
    fn looking_parents_empty_frontier() {
        let g = triangle();
        for be in BACKENDS {
            let l = Layer::new(3, 0, &[], &[0]);
            let mut done = LaneMask::NONE;
            let found = looking_parents(
                be,
                &g,
                &l.frontier,
                &l.visited,
                &l.next,
                &l.tree,
                load_vertices(0, Half::Low),
                0,
                0,
                Half::Low,
                1,
                &mut done,
            );
            assert!(found.is_empty());
            assert!(done.is_empty());
            assert_eq!(l.visited.count_ones(), 1);
            assert_eq!(l.next.count_ones(), 0);
        }
    }

    /// Vertex 20 is adjacent to 0..=9; only 9 is in the frontier, and it sits
    /// at adjacency position 9.
    fn late_parent_graph() -> CsrGraph {
        let edges: Vec<_> = (0..10).map(|u| (u, 20)).collect();
        CsrGraph::from_edges(24, &edges).unwrap()
    }

    #[test]
    fn late_parent_goes_through_fallback() {
        let g = late_parent_graph();
        assert_eq!(g.neighbors(20)[9], 9);
        for be in BACKENDS {
            let l = Layer::new(24, 9, &[9], &[9]);
            let (c, stats) = l.bottom_up(&g, &VecConfig { max_pos: 8, backend: be });
            assert_eq!(stats.fallbacks, 1);
            assert_eq!(l.tree.parent(20), Some(9));
            assert_eq!(c.v_f, 1);

            let l = Layer::new(24, 9, &[9], &[9]);
            let (_, stats) = l.bottom_up(&g, &VecConfig { max_pos: 10, backend: be });
            assert_eq!(stats.fallbacks, 0);
            assert_eq!(l.tree.parent(20), Some(9));
        }
    }

    #[test]
    fn empty_frontier_changes_nothing() {
        let g = triangle();
        let l = Layer::new(3, 0, &[], &[0]);
        let (c, _) = l.bottom_up(&g, &VecConfig::default());
        assert_eq!(c.v_f, 0);
        assert_eq!(l.visited.count_ones(), 1);
        assert_eq!(l.next.count_ones(), 0);
    }

    #[test]
    fn chunked_top_down_star() {
        let edges: Vec<_> = (1..=20).map(|l| (0, l)).collect();
        let g = CsrGraph::from_edges(21, &edges).unwrap();
        for be in BACKENDS {
            let l = Layer::new(21, 0, &[0], &[0]);
            let (c, stats) =
                top_down_chunked(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default(), be);
            assert_eq!(c.v_f, 20);
            assert_eq!(stats.gathers, 2);
            assert_eq!(l.next.iter_ones().collect::<Vec<_>>(), (1..=20).collect::<Vec<_>>());
            assert!((1..=20).all(|v| l.tree.parent(v) == Some(0)));
        }
    }

    #[test]
    fn chunked_top_down_short_row() {
        let g = path3();
        for be in BACKENDS {
            let l = Layer::new(3, 1, &[1], &[1]);
            let (c, stats) =
                top_down_chunked(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default(), be);
            assert_eq!(c.v_f, 2);
            assert_eq!(stats.gathers, 1);
            assert_eq!(l.tree.parent(0), Some(1));
            assert_eq!(l.tree.parent(2), Some(1));
        }
    }

    /// Drives a whole traversal layer by layer, running the scalar kernel and
    /// the vector kernel on copies of the same pre-layer state.
    fn compare_layers(g: &CsrGraph, source: VertexId, cfg: &VecConfig, top_down: bool) {
        let n = g.num_vertices();
        let mut frontier = Bitmap::new(n);
        let mut visited = Bitmap::new(n);
        let mut tree = BfsTree::new(n, source).unwrap();
        frontier.insert(source);
        visited.insert(source);
        while frontier.count_ones() > 0 {
            let (vis_s, next_s, tree_s) = (visited.clone(), Bitmap::new(n), tree.clone());
            let (vis_v, next_v, tree_v) = (visited.clone(), Bitmap::new(n), tree.clone());
            if top_down {
                top_down_layer(g, &frontier, &vis_s, &next_s, &tree_s, LayerCounters::default());
                top_down_chunked(g, &frontier, &vis_v, &next_v, &tree_v, LayerCounters::default(), cfg.backend);
            } else {
                bottom_up_layer(g, &frontier, &vis_s, &next_s, &tree_s, LayerCounters::default());
                bottom_up_multiple_set(g, &frontier, &vis_v, &next_v, &tree_v, LayerCounters::default(), cfg);
            }
            assert_eq!(vis_s, vis_v);
            assert_eq!(next_s, next_v);
            for v in next_v.iter_ones() {
                let p = tree_v.parent(v).unwrap();
                assert!(frontier.contains(p));
                assert!(g.has_arc(p, v));
                if !top_down {
                    assert_eq!(tree_s.parent(v), Some(p));
                }
            }
            frontier = next_v;
            visited = vis_v;
            tree = tree_v;
        }
    }

    #[test]
    fn layer_equivalence_small_graphs() {
        for scale in [4, 6, 8] {
            let g = CsrGraph::build(&generate(GraphParams::new(scale, 8, 17)).unwrap()).unwrap();
            for be in BACKENDS {
                for max_pos in [1, 3, 8] {
                    let cfg = VecConfig { max_pos, backend: be };
                    for s in (0..g.num_vertices() as u32).step_by(7) {
                        compare_layers(&g, s, &cfg, false);
                        compare_layers(&g, s, &cfg, true);
                    }
                }
            }
        }
    }

    #[test]
    fn fallback_count_at_threshold_extremes() {
        let g = CsrGraph::build(&generate(GraphParams::new(9, 8, 5)).unwrap()).unwrap();
        let src = (0..g.num_vertices() as u32).max_by_key(|&v| g.degree(v).unwrap()).unwrap();
        let n = g.num_vertices();
        // One top-down layer from the hub, then measure the bottom-up step.
        let l = Layer::new(n, src, &[src], &[src]);
        top_down_layer(&g, &l.frontier, &l.visited, &l.next, &l.tree, LayerCounters::default());
        let frontier = l.next.clone();
        let visited = l.visited.clone();

        let run = |max_pos| {
            let next = Bitmap::new(n);
            let vis = visited.clone();
            let tree = l.tree.clone();
            bottom_up_multiple_set(
                &g,
                &frontier,
                &vis,
                &next,
                &tree,
                LayerCounters::default(),
                &VecConfig { max_pos, backend: Backend::ScalarEmulation },
            )
            .1
        };

        let max_degree = g.max_degree() as u32;
        assert_eq!(run(max_degree).fallbacks, 0);

        let expected = (0..n as u32)
            .filter(|&v| !visited.contains(v))
            .filter(|&v| {
                let row = g.neighbors(v);
                row.len() >= 2 && !frontier.contains(row[0])
            })
            .count() as u64;
        assert!(expected > 0);
        assert_eq!(run(1).fallbacks, expected);
    }

    #[test]
    fn hardware_backend_detection_is_consistent() {
        let selected = matches!(Backend::HardwareSimd.select(), Selected::Emulation(_));
        assert_eq!(selected, !hardware_available());
    }
}

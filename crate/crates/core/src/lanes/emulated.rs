use std::sync::atomic::{AtomicU32, Ordering::Relaxed};

use super::{LaneBackend, LaneMask, LaneVector, RowBounds, LANES};

/// Per-lane scalar loops. Defines the reference semantics of every lane op.
#[derive(Clone, Copy, Debug, Default)]
pub struct Emulated;

impl LaneBackend for Emulated {
    #[inline]
    fn masked_gather(self, base: &[u32], idx: LaneVector, m: LaneMask, fill: u32) -> LaneVector {
        let idx = idx.to_array();
        LaneVector::from_fn(|i| if m.test(i) { base[idx[i] as usize] } else { fill })
    }

    #[inline]
    fn masked_scatter(self, base: &mut [u32], idx: LaneVector, vals: LaneVector, m: LaneMask) {
        for i in m.lanes() {
            base[idx.lane(i) as usize] = vals.lane(i);
        }
    }

    #[inline]
    fn row_bounds(self, row_starts: &[u64], vertices: LaneVector, m: LaneMask) -> RowBounds {
        let mut b = RowBounds::default();
        for i in m.lanes() {
            let v = vertices.lane(i) as usize;
            b.starts[i] = row_starts[v];
            b.ends[i] = row_starts[v + 1];
        }
        b
    }

    #[inline]
    fn row_bounds_run(self, row_starts: &[u64], first: u32, m: LaneMask) -> RowBounds {
        self.row_bounds(row_starts, LaneVector::iota(first), m)
    }

    #[inline]
    fn rows_longer_than(self, bounds: &RowBounds, len: u32, m: LaneMask) -> LaneMask {
        let mut out = 0u16;
        for i in m.lanes() {
            if bounds.ends[i] - bounds.starts[i] > len as u64 {
                out |= 1 << i;
            }
        }
        LaneMask::new(out)
    }

    #[inline]
    fn adjacent_at(
        self,
        adjacency: &[u32],
        bounds: &RowBounds,
        pos: u32,
        candidates: LaneMask,
    ) -> (LaneVector, LaneMask) {
        let mut out = [0u32; LANES];
        let mut active = 0u16;
        for i in candidates.lanes() {
            let at = bounds.starts[i] + pos as u64;
            if at < bounds.ends[i] {
                out[i] = adjacency[at as usize];
                active |= 1 << i;
            }
        }
        (LaneVector::from_array(out), LaneMask::new(active))
    }

    #[inline]
    fn probe_bits(self, words: &[AtomicU32], vals: LaneVector, m: LaneMask) -> LaneMask {
        let mut hit = 0u16;
        for i in m.lanes() {
            let x = vals.lane(i);
            if words[(x >> 5) as usize].load(Relaxed) & (1 << (x & 0x1F)) != 0 {
                hit |= 1 << i;
            }
        }
        LaneMask::new(hit)
    }

    #[inline]
    fn scatter_slots(self, slots: &[AtomicU32], idx: LaneVector, vals: LaneVector, m: LaneMask) {
        for i in m.lanes() {
            slots[idx.lane(i) as usize].store(vals.lane(i), Relaxed);
        }
    }

    #[inline]
    fn load_prefix(self, src: &[u32]) -> LaneVector {
        let mut out = [0u32; LANES];
        let n = src.len().min(LANES);
        out[..n].copy_from_slice(&src[..n]);
        LaneVector::from_array(out)
    }
}

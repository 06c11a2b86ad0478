use std::arch::x86_64::*;
use std::mem::transmute;
use std::sync::atomic::AtomicU32;

use super::{Emulated, LaneBackend, LaneMask, LaneVector, RowBounds};

/// AVX-512F backend. Only obtainable through [`Avx512::detect`], so holding one
/// proves the CPU supports the instructions.
#[derive(Clone, Copy, Debug)]
pub struct Avx512 {
    _detected: (),
}

impl Avx512 {
    pub fn detect() -> Option<Avx512> {
        is_x86_feature_detected!("avx512f").then_some(Avx512 { _detected: () })
    }
}

const I32_LIMIT: usize = i32::MAX as usize;

#[inline(always)]
fn reg(v: LaneVector) -> __m512i {
    // SAFETY: both are 64 bytes of plain integer data.
    unsafe { transmute::<[u32; 16], __m512i>(v.to_array()) }
}

#[inline(always)]
fn lanes(r: __m512i) -> LaneVector {
    // SAFETY: as above.
    LaneVector::from_array(unsafe { transmute::<__m512i, [u32; 16]>(r) })
}

#[cold]
#[inline(never)]
fn lane_out_of_bounds(what: &str, len: usize) -> ! {
    panic!("active lane {what} out of bounds for length {len}")
}

#[target_feature(enable = "avx512f")]
fn oob_u32(m: __mmask16, idx: __m512i, len: usize) -> bool {
    _mm512_mask_cmpge_epu32_mask(m, idx, _mm512_set1_epi32(len as i32)) != 0
}

#[target_feature(enable = "avx512f")]
unsafe fn gather_u32(base: *const u32, idx: __m512i, m: __mmask16, fill: u32) -> __m512i {
    _mm512_mask_i32gather_epi32::<4>(_mm512_set1_epi32(fill as i32), m, idx, base as *const i32)
}

#[target_feature(enable = "avx512f")]
unsafe fn scatter_u32(base: *mut u32, idx: __m512i, vals: __m512i, m: __mmask16) {
    _mm512_mask_i32scatter_epi32::<4>(base as *mut i32, m, idx, vals)
}

#[target_feature(enable = "avx512f")]
unsafe fn gather_bounds(row_starts: &[u64], vertices: __m512i, m: __mmask16) -> RowBounds {
    let lo_idx = _mm512_castsi512_si256(vertices);
    let hi_idx = _mm512_extracti64x4_epi64::<1>(vertices);
    let (m_lo, m_hi) = (m as __mmask8, (m >> 8) as __mmask8);
    let starts = row_starts.as_ptr() as *const i64;
    let ends = starts.add(1);
    let z = _mm512_setzero_si512();
    let mut b = RowBounds::default();
    let s_lo = _mm512_mask_i32gather_epi64::<8>(z, m_lo, lo_idx, starts);
    let s_hi = _mm512_mask_i32gather_epi64::<8>(z, m_hi, hi_idx, starts);
    let e_lo = _mm512_mask_i32gather_epi64::<8>(z, m_lo, lo_idx, ends);
    let e_hi = _mm512_mask_i32gather_epi64::<8>(z, m_hi, hi_idx, ends);
    _mm512_storeu_si512(b.starts.as_mut_ptr() as *mut _, s_lo);
    _mm512_storeu_si512(b.starts.as_mut_ptr().add(8) as *mut _, s_hi);
    _mm512_storeu_si512(b.ends.as_mut_ptr() as *mut _, e_lo);
    _mm512_storeu_si512(b.ends.as_mut_ptr().add(8) as *mut _, e_hi);
    b
}

#[target_feature(enable = "avx512f")]
unsafe fn load_bounds_run(starts: *const u64, m: __mmask16) -> RowBounds {
    let (m_lo, m_hi) = (m as __mmask8, (m >> 8) as __mmask8);
    let p = starts as *const i64;
    let mut b = RowBounds::default();
    _mm512_storeu_si512(b.starts.as_mut_ptr() as *mut _, _mm512_maskz_loadu_epi64(m_lo, p));
    _mm512_storeu_si512(b.starts.as_mut_ptr().add(8) as *mut _, _mm512_maskz_loadu_epi64(m_hi, p.add(8)));
    _mm512_storeu_si512(b.ends.as_mut_ptr() as *mut _, _mm512_maskz_loadu_epi64(m_lo, p.add(1)));
    _mm512_storeu_si512(b.ends.as_mut_ptr().add(8) as *mut _, _mm512_maskz_loadu_epi64(m_hi, p.add(9)));
    b
}

#[target_feature(enable = "avx512f")]
unsafe fn rows_longer_than(bounds: &RowBounds, len: u32, m: __mmask16) -> __mmask16 {
    let vlen = _mm512_set1_epi64(len as i64);
    let half = |i: usize, k: __mmask8| {
        let s = _mm512_loadu_si512(bounds.starts.as_ptr().add(i) as *const _);
        let e = _mm512_loadu_si512(bounds.ends.as_ptr().add(i) as *const _);
        _mm512_mask_cmpgt_epu64_mask(k, _mm512_sub_epi64(e, s), vlen)
    };
    half(0, m as __mmask8) as __mmask16 | (half(8, (m >> 8) as __mmask8) as __mmask16) << 8
}

#[target_feature(enable = "avx512f")]
unsafe fn adjacent_at(adjacency: &[u32], bounds: &RowBounds, pos: u32, candidates: __mmask16) -> (__m512i, __mmask16) {
    let vpos = _mm512_set1_epi64(pos as i64);
    let len = _mm512_set1_epi64(adjacency.len() as i64);
    let base = adjacency.as_ptr() as *const i32;
    let z = _mm256_setzero_si256();

    let s_lo = _mm512_loadu_si512(bounds.starts.as_ptr() as *const _);
    let s_hi = _mm512_loadu_si512(bounds.starts.as_ptr().add(8) as *const _);
    let e_lo = _mm512_loadu_si512(bounds.ends.as_ptr() as *const _);
    let e_hi = _mm512_loadu_si512(bounds.ends.as_ptr().add(8) as *const _);
    let a_lo = _mm512_add_epi64(s_lo, vpos);
    let a_hi = _mm512_add_epi64(s_hi, vpos);
    let k_lo = _mm512_mask_cmpgt_epu64_mask(candidates as __mmask8, e_lo, a_lo);
    let k_hi = _mm512_mask_cmpgt_epu64_mask((candidates >> 8) as __mmask8, e_hi, a_hi);
    if _mm512_mask_cmpge_epu64_mask(k_lo, a_lo, len) | _mm512_mask_cmpge_epu64_mask(k_hi, a_hi, len) != 0 {
        lane_out_of_bounds("adjacency position", adjacency.len());
    }
    let v_lo = _mm512_mask_i64gather_epi32::<4>(z, k_lo, a_lo, base);
    let v_hi = _mm512_mask_i64gather_epi32::<4>(z, k_hi, a_hi, base);
    let v = _mm512_inserti64x4::<1>(_mm512_castsi256_si512(v_lo), v_hi);
    (v, k_lo as __mmask16 | (k_hi as __mmask16) << 8)
}

#[target_feature(enable = "avx512f")]
unsafe fn probe_bits(words: *const u32, vals: __m512i, m: __mmask16) -> __mmask16 {
    let word_idx = _mm512_srli_epi32::<5>(vals);
    let bits = _mm512_sllv_epi32(_mm512_set1_epi32(1), _mm512_and_si512(vals, _mm512_set1_epi32(0x1F)));
    let w = _mm512_mask_i32gather_epi32::<4>(_mm512_setzero_si512(), m, word_idx, words as *const i32);
    _mm512_mask_test_epi32_mask(m, w, bits)
}

#[target_feature(enable = "avx512f")]
unsafe fn load_prefix(src: &[u32]) -> __m512i {
    let m = LaneMask::first(src.len()).bits();
    _mm512_maskz_loadu_epi32(m, src.as_ptr() as *const i32)
}

impl LaneBackend for Avx512 {
    #[inline(always)]
    fn masked_gather(self, base: &[u32], idx: LaneVector, m: LaneMask, fill: u32) -> LaneVector {
        if base.len() > I32_LIMIT {
            return Emulated.masked_gather(base, idx, m, fill);
        }
        // SAFETY: `self` proves AVX-512F; active indices are checked against the
        // slice length before the gather touches memory.
        unsafe {
            let idx = reg(idx);
            if oob_u32(m.bits(), idx, base.len()) {
                lane_out_of_bounds("index", base.len());
            }
            lanes(gather_u32(base.as_ptr(), idx, m.bits(), fill))
        }
    }

    #[inline(always)]
    fn masked_scatter(self, base: &mut [u32], idx: LaneVector, vals: LaneVector, m: LaneMask) {
        if base.len() > I32_LIMIT {
            return Emulated.masked_scatter(base, idx, vals, m);
        }
        // SAFETY: as for `masked_gather`; the slice is borrowed mutably.
        unsafe {
            let idx = reg(idx);
            if oob_u32(m.bits(), idx, base.len()) {
                lane_out_of_bounds("index", base.len());
            }
            scatter_u32(base.as_mut_ptr(), idx, reg(vals), m.bits())
        }
    }

    #[inline(always)]
    fn row_bounds(self, row_starts: &[u64], vertices: LaneVector, m: LaneMask) -> RowBounds {
        let rows = row_starts.len().saturating_sub(1);
        if rows > I32_LIMIT {
            return Emulated.row_bounds(row_starts, vertices, m);
        }
        // SAFETY: every active vertex is < rows, so both `v` and `v + 1` index
        // inside `row_starts`.
        unsafe {
            let v = reg(vertices);
            if oob_u32(m.bits(), v, rows) {
                lane_out_of_bounds("vertex", rows);
            }
            gather_bounds(row_starts, v, m.bits())
        }
    }

    #[inline(always)]
    fn row_bounds_run(self, row_starts: &[u64], first: u32, m: LaneMask) -> RowBounds {
        let rows = row_starts.len().saturating_sub(1);
        let first = first as usize;
        if m.is_empty() {
            return RowBounds::default();
        }
        let highest = 15 - m.bits().leading_zeros() as usize;
        if first + highest >= rows {
            lane_out_of_bounds("vertex", rows);
        }
        // SAFETY: the highest active lane's vertex is below `rows`, so every
        // unmasked element read, up to `row_starts[first + highest + 1]`, is in
        // bounds. Masked-off elements are not accessed.
        unsafe { load_bounds_run(row_starts.as_ptr().wrapping_add(first), m.bits()) }
    }

    #[inline(always)]
    fn rows_longer_than(self, bounds: &RowBounds, len: u32, m: LaneMask) -> LaneMask {
        // SAFETY: reads only the two fixed-size arrays of `bounds`.
        LaneMask::new(unsafe { rows_longer_than(bounds, len, m.bits()) })
    }

    #[inline(always)]
    fn adjacent_at(
        self,
        adjacency: &[u32],
        bounds: &RowBounds,
        pos: u32,
        candidates: LaneMask,
    ) -> (LaneVector, LaneMask) {
        // SAFETY: gathered positions are checked against the adjacency length.
        let (v, k) = unsafe { adjacent_at(adjacency, bounds, pos, candidates.bits()) };
        (lanes(v), LaneMask::new(k))
    }

    #[inline(always)]
    fn probe_bits(self, words: &[AtomicU32], vals: LaneVector, m: LaneMask) -> LaneMask {
        if words.len() > I32_LIMIT {
            return Emulated.probe_bits(words, vals, m);
        }
        // SAFETY: word indices are checked. AtomicU32 has the layout of u32; the
        // gather is a plain load, which may observe a concurrent atomic OR either
        // before or after it lands. Kernels only use this as a filter and
        // re-confirm claims atomically.
        unsafe {
            let v = reg(vals);
            if oob_u32(m.bits(), _mm512_srli_epi32::<5>(v), words.len()) {
                lane_out_of_bounds("bit", words.len() * 32);
            }
            LaneMask::new(probe_bits(words.as_ptr() as *const u32, v, m.bits()))
        }
    }

    #[inline(always)]
    fn scatter_slots(self, slots: &[AtomicU32], idx: LaneVector, vals: LaneVector, m: LaneMask) {
        if slots.len() > I32_LIMIT {
            return Emulated.scatter_slots(slots, idx, vals, m);
        }
        // SAFETY: indices are checked. Kernels only scatter to slots owned by the
        // calling thread for the current layer, so no other access races with
        // these plain stores.
        unsafe {
            let idx = reg(idx);
            if oob_u32(m.bits(), idx, slots.len()) {
                lane_out_of_bounds("index", slots.len());
            }
            scatter_u32(slots.as_ptr() as *mut u32, idx, reg(vals), m.bits())
        }
    }

    #[inline(always)]
    fn load_prefix(self, src: &[u32]) -> LaneVector {
        // SAFETY: masked-off lanes are not read.
        lanes(unsafe { load_prefix(src) })
    }
}

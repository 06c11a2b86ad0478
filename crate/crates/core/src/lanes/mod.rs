//! 16-lane vector contract with a hardware backend and a scalar emulation.
//!
//! Both backends must agree bit for bit on every operation. Masked-off lanes of
//! a result are always zero unless a fill value says otherwise, and scatters
//! resolve duplicate indices in ascending lane order (the highest active lane
//! wins), which is what the AVX-512 scatter instruction does.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not};
use std::sync::atomic::AtomicU32;

#[cfg(target_arch = "x86_64")]
mod avx512;
mod emulated;

#[cfg(target_arch = "x86_64")]
pub use avx512::Avx512;
pub use emulated::Emulated;

pub const LANES: usize = 16;

/// Sixteen 32-bit lanes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LaneVector([u32; LANES]);

impl LaneVector {
    #[inline]
    pub const fn from_array(lanes: [u32; LANES]) -> Self {
        LaneVector(lanes)
    }

    #[inline]
    pub const fn to_array(self) -> [u32; LANES] {
        self.0
    }

    #[inline]
    pub const fn splat(x: u32) -> Self {
        LaneVector([x; LANES])
    }

    /// `[base, base + 1, ..., base + 15]`.
    #[inline]
    pub fn iota(base: u32) -> Self {
        LaneVector(std::array::from_fn(|i| base.wrapping_add(i as u32)))
    }

    #[inline]
    pub fn lane(self, i: usize) -> u32 {
        self.0[i]
    }

    #[inline]
    pub fn with_lane(mut self, i: usize, x: u32) -> Self {
        self.0[i] = x;
        self
    }

    #[inline]
    pub fn from_fn(f: impl FnMut(usize) -> u32) -> Self {
        LaneVector(std::array::from_fn(f))
    }
}

impl fmt::Debug for LaneVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// One enable bit per lane; bit `i` governs lane `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LaneMask(u16);

impl LaneMask {
    pub const NONE: LaneMask = LaneMask(0);
    pub const ALL: LaneMask = LaneMask(u16::MAX);

    #[inline]
    pub const fn new(bits: u16) -> Self {
        LaneMask(bits)
    }

    /// The lowest `n` lanes (all of them for `n >= 16`).
    #[inline]
    pub const fn first(n: usize) -> Self {
        if n >= LANES {
            LaneMask::ALL
        } else {
            LaneMask(((1u32 << n) - 1) as u16)
        }
    }

    #[inline]
    pub const fn bits(self) -> u16 {
        self.0
    }

    #[inline]
    pub const fn test(self, lane: usize) -> bool {
        self.0 & (1 << lane) != 0
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// Active lane indices, ascending.
    #[inline]
    pub fn lanes(self) -> impl Iterator<Item = usize> {
        crate::frontier::BitIter(self.0 as u32).map(|b| b as usize)
    }
}

impl fmt::Debug for LaneMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaneMask({:#06x})", self.0)
    }
}

impl BitAnd for LaneMask {
    type Output = LaneMask;
    #[inline]
    fn bitand(self, rhs: LaneMask) -> LaneMask {
        LaneMask(self.0 & rhs.0)
    }
}

impl BitOr for LaneMask {
    type Output = LaneMask;
    #[inline]
    fn bitor(self, rhs: LaneMask) -> LaneMask {
        LaneMask(self.0 | rhs.0)
    }
}

impl Not for LaneMask {
    type Output = LaneMask;
    #[inline]
    fn not(self) -> LaneMask {
        LaneMask(!self.0)
    }
}

impl BitAndAssign for LaneMask {
    #[inline]
    fn bitand_assign(&mut self, rhs: LaneMask) {
        self.0 &= rhs.0;
    }
}

impl BitOrAssign for LaneMask {
    #[inline]
    fn bitor_assign(&mut self, rhs: LaneMask) {
        self.0 |= rhs.0;
    }
}

/// Adjacency ranges `[starts[i], ends[i])` of the sixteen lane vertices.
/// Lanes that were masked off when the bounds were loaded hold an empty range.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct RowBounds {
    pub starts: [u64; LANES],
    pub ends: [u64; LANES],
}

/// Which implementation executes the lane operations.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Hash)]
pub enum Backend {
    /// AVX-512 when the CPU supports it, otherwise the emulation.
    #[default]
    HardwareSimd,
    ScalarEmulation,
}

impl Backend {
    /// The backend that will actually run on this machine.
    pub fn resolve(self) -> Backend {
        match self {
            Backend::HardwareSimd if hardware_available() => Backend::HardwareSimd,
            _ => Backend::ScalarEmulation,
        }
    }
}

pub fn hardware_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        Avx512::detect().is_some()
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// The primitive lane operations the vector kernels are written against.
///
/// Every method checks that its active lanes index inside the slices it is
/// given, so an implementation never reads or writes out of bounds.
pub trait LaneBackend: Copy + Send + Sync {
    /// Active lanes read `base[idx]`, inactive lanes hold `fill`.
    fn masked_gather(self, base: &[u32], idx: LaneVector, m: LaneMask, fill: u32) -> LaneVector;

    /// `base[idx] = vals` for active lanes, ascending lane order.
    fn masked_scatter(self, base: &mut [u32], idx: LaneVector, vals: LaneVector, m: LaneMask);

    /// Row ranges of the active lane vertices.
    fn row_bounds(self, row_starts: &[u64], vertices: LaneVector, m: LaneMask) -> RowBounds;

    /// Row ranges of the consecutive vertices `first..first + 16`, masked as
    /// [`LaneBackend::row_bounds`]. Equal to `row_bounds` on `LaneVector::iota(first)`.
    fn row_bounds_run(self, row_starts: &[u64], first: u32, m: LaneMask) -> RowBounds;

    /// The `pos`-th neighbour of each candidate lane whose row is long enough.
    /// Returns the neighbours (zero elsewhere) and the mask of lanes that had one.
    fn adjacent_at(
        self,
        adjacency: &[u32],
        bounds: &RowBounds,
        pos: u32,
        candidates: LaneMask,
    ) -> (LaneVector, LaneMask);

    /// Active lanes whose row holds more than `len` entries.
    fn rows_longer_than(self, bounds: &RowBounds, len: u32, m: LaneMask) -> LaneMask;

    /// Active lanes whose bit `vals[i]` is set in the word array.
    fn probe_bits(self, words: &[AtomicU32], vals: LaneVector, m: LaneMask) -> LaneMask;

    /// Scatter into an atomic slot array (the parent array). Lanes are stored
    /// in ascending order with relaxed ordering.
    fn scatter_slots(self, slots: &[AtomicU32], idx: LaneVector, vals: LaneVector, m: LaneMask);

    /// Up to sixteen contiguous values; lanes past `src.len()` are zero.
    fn load_prefix(self, src: &[u32]) -> LaneVector;
}

/// A resolved backend, carrying the proof of hardware support when it has one.
#[derive(Clone, Copy, Debug)]
pub enum Selected {
    #[cfg(target_arch = "x86_64")]
    Hardware(Avx512),
    Emulation(Emulated),
}

impl Backend {
    pub fn select(self) -> Selected {
        match self {
            #[cfg(target_arch = "x86_64")]
            Backend::HardwareSimd => match Avx512::detect() {
                Some(hw) => Selected::Hardware(hw),
                None => Selected::Emulation(Emulated),
            },
            _ => Selected::Emulation(Emulated),
        }
    }
}

/// Evaluates `$body` with `$b` bound to the concrete backend `$backend` selects.
#[macro_export]
macro_rules! with_backend {
    ($backend:expr, $b:ident => $body:expr) => {
        match $crate::lanes::Backend::select($backend) {
            #[cfg(target_arch = "x86_64")]
            $crate::lanes::Selected::Hardware($b) => $body,
            $crate::lanes::Selected::Emulation($b) => $body,
        }
    };
}

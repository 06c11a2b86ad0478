//! Bitmaps for the frontier, output queue and visited set, plus the BFS tree.
//!
//! Bit `v` lives in word `v >> 5` at position `v & 0x1F`. All writes are
//! atomic word-ORs so kernels can share one bitmap across worker threads.

use std::sync::atomic::{AtomicU32, Ordering::Relaxed};

use crate::error::{check_vertex, Error, Result};
use crate::VertexId;

pub const WORD_BITS: usize = 32;

/// Parent value of a vertex that has not been reached.
pub const NIL: VertexId = VertexId::MAX;

/// Which 16-bit half of a bitmap word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Half {
    Low,
    High,
}

impl Half {
    pub const BOTH: [Half; 2] = [Half::Low, Half::High];

    #[inline]
    pub fn shift(self) -> u32 {
        match self {
            Half::Low => 0,
            Half::High => 16,
        }
    }
}

impl TryFrom<u32> for Half {
    type Error = Error;

    fn try_from(h: u32) -> Result<Half> {
        match h {
            0 => Ok(Half::Low),
            1 => Ok(Half::High),
            _ => Err(Error::InvalidParams(format!("half must be 0 or 1, got {h}"))),
        }
    }
}

#[derive(Debug)]
pub struct Bitmap {
    words: Vec<AtomicU32>,
    len: usize,
}

impl Bitmap {
    pub fn new(len: usize) -> Bitmap {
        Bitmap { words: (0..len.div_ceil(WORD_BITS)).map(|_| AtomicU32::new(0)).collect(), len }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    #[inline]
    pub(crate) fn words(&self) -> &[AtomicU32] {
        &self.words
    }

    pub fn test(&self, v: VertexId) -> Result<bool> {
        check_vertex(v, self.len)?;
        Ok(self.contains(v))
    }

    pub fn set_atomic(&self, v: VertexId) -> Result<()> {
        check_vertex(v, self.len)?;
        self.insert(v);
        Ok(())
    }

    pub fn get_half(&self, word_index: usize, half: Half) -> Result<u16> {
        self.check_word(word_index)?;
        Ok(self.half(word_index, half))
    }

    pub fn or_half(&self, word_index: usize, half: Half, bits: u16) -> Result<()> {
        self.check_word(word_index)?;
        self.or_half_unchecked(word_index, half, bits);
        Ok(())
    }

    fn check_word(&self, word_index: usize) -> Result<()> {
        if word_index < self.words.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: (word_index * WORD_BITS) as u64, num_vertices: self.len })
        }
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        let v = v as usize;
        self.words[v / WORD_BITS].load(Relaxed) & (1 << (v % WORD_BITS)) != 0
    }

    /// Atomically sets bit `v`; returns true if this call flipped it from 0.
    #[inline]
    pub fn insert(&self, v: VertexId) -> bool {
        let v = v as usize;
        debug_assert!(v < self.len);
        let bit = 1 << (v % WORD_BITS);
        self.words[v / WORD_BITS].fetch_or(bit, Relaxed) & bit == 0
    }

    #[inline]
    pub fn word(&self, i: usize) -> u32 {
        self.words[i].load(Relaxed)
    }

    #[inline]
    pub(crate) fn or_word(&self, i: usize, bits: u32) {
        if bits != 0 {
            self.words[i].fetch_or(bits, Relaxed);
        }
    }

    #[inline]
    pub(crate) fn half(&self, word_index: usize, half: Half) -> u16 {
        (self.words[word_index].load(Relaxed) >> half.shift()) as u16
    }

    #[inline]
    pub(crate) fn or_half_unchecked(&self, word_index: usize, half: Half, bits: u16) {
        debug_assert!(
            ((bits as u32) << half.shift()) & !self.valid_bits(word_index) == 0,
            "or_half would set padding bits"
        );
        self.or_word(word_index, (bits as u32) << half.shift());
    }

    /// Mask of the bits of word `i` that correspond to real vertices.
    #[inline]
    pub fn valid_bits(&self, i: usize) -> u32 {
        let tail = self.len - i * WORD_BITS;
        if tail >= WORD_BITS {
            u32::MAX
        } else {
            (1u32 << tail) - 1
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.load(Relaxed).count_ones() as u64).sum()
    }

    pub fn clear(&mut self) {
        for w in &mut self.words {
            *w.get_mut() = 0;
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(i, w)| BitIter(w.load(Relaxed)).map(move |b| (i * WORD_BITS) as VertexId + b))
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.words.iter().map(|w| w.load(Relaxed)).collect()
    }
}

impl Clone for Bitmap {
    fn clone(&self) -> Self {
        Bitmap { words: self.words.iter().map(|w| AtomicU32::new(w.load(Relaxed))).collect(), len: self.len }
    }
}

impl PartialEq for Bitmap {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.to_vec() == other.to_vec()
    }
}

impl Eq for Bitmap {}

/// Iterates the set bit positions of a word, lowest first.
#[derive(Debug, Clone, Copy)]
pub struct BitIter(pub u32);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Predecessor array of a traversal rooted at `source`.
#[derive(Debug)]
pub struct BfsTree {
    parent: Vec<AtomicU32>,
    source: VertexId,
}

impl BfsTree {
    pub fn new(num_vertices: usize, source: VertexId) -> Result<BfsTree> {
        check_vertex(source, num_vertices)?;
        let parent: Vec<AtomicU32> = (0..num_vertices).map(|_| AtomicU32::new(NIL)).collect();
        parent[source as usize].store(source, Relaxed);
        Ok(BfsTree { parent, source })
    }

    /// Wraps an explicit parent array, e.g. one loaded from disk or tampered in a test.
    pub fn from_parents(source: VertexId, parents: Vec<VertexId>) -> Result<BfsTree> {
        check_vertex(source, parents.len())?;
        Ok(BfsTree { parent: parents.into_iter().map(AtomicU32::new).collect(), source })
    }

    #[inline]
    pub fn source(&self) -> VertexId {
        self.source
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        match self.parent[v as usize].load(Relaxed) {
            NIL => None,
            p => Some(p),
        }
    }

    #[inline]
    pub fn set_parent(&self, v: VertexId, p: VertexId) {
        self.parent[v as usize].store(p, Relaxed);
    }

    #[inline]
    pub(crate) fn slots(&self) -> &[AtomicU32] {
        &self.parent
    }

    pub fn parents(&self) -> Vec<VertexId> {
        self.parent.iter().map(|p| p.load(Relaxed)).collect()
    }

    pub fn num_visited(&self) -> usize {
        self.parent.iter().filter(|p| p.load(Relaxed) != NIL).count()
    }

    /// Depth of every vertex along its parent chain, `u32::MAX` for vertices
    /// without a parent. Fails with a vertex whose chain does not end at the
    /// source: it loops, leaves the vertex range or hits a parentless vertex.
    pub fn depths(&self) -> std::result::Result<Vec<u32>, VertexId> {
        const UNKNOWN: u32 = u32::MAX - 1;
        let parents = self.parents();
        let n = parents.len();
        let mut depth = vec![UNKNOWN; n];
        for (v, &p) in parents.iter().enumerate() {
            if p == NIL {
                depth[v] = u32::MAX;
            }
        }
        if parents[self.source as usize] != self.source {
            return Err(self.source);
        }
        depth[self.source as usize] = 0;
        let mut path = Vec::new();
        for start in 0..n {
            let mut v = start;
            while depth[v] == UNKNOWN {
                if path.len() > n {
                    return Err(start as VertexId);
                }
                path.push(v);
                let p = parents[v] as usize;
                if p >= n {
                    return Err(v as VertexId);
                }
                v = p;
            }
            if depth[v] == u32::MAX && !path.is_empty() {
                return Err(*path.last().unwrap() as VertexId);
            }
            let mut d = depth[v];
            while let Some(u) = path.pop() {
                d += 1;
                depth[u] = d;
            }
        }
        Ok(depth)
    }
}

impl Clone for BfsTree {
    fn clone(&self) -> Self {
        BfsTree { parent: self.parents().into_iter().map(AtomicU32::new).collect(), source: self.source }
    }
}

/// Per-layer heuristic inputs: edges to check from the frontier (`e_f`),
/// frontier vertices (`v_f`) and edges still attached to unvisited vertices (`e_u`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LayerCounters {
    pub e_f: u64,
    pub v_f: u64,
    pub e_u: u64,
}

impl LayerCounters {
    /// Counters after a layer that discovered `vertices` vertices carrying
    /// `edges` arcs in total.
    #[inline]
    pub fn advance(self, vertices: u64, edges: u64) -> LayerCounters {
        LayerCounters { e_f: edges, v_f: vertices, e_u: self.e_u.saturating_sub(edges) }
    }
}

//! Kronecker (R-MAT) edge-list generation.
//!
//! Every edge is drawn from its own RNG substream, seeded from the graph seed
//! and the edge index, so the output does not depend on generation order or on
//! the number of worker threads.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::VertexId;

/// Graph500 initiator probabilities (A, B, C, D).
pub const GRAPH500_PROBS: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

/// Largest supported scale. Vertex ids are 32-bit and `u32::MAX` is reserved.
pub const MAX_SCALE: u32 = 31;

/// Default cap on the number of generated edges (8 GiB of endpoint pairs).
pub const DEFAULT_MAX_EDGES: u64 = 1 << 30;

const DUMP_MAGIC: &[u8; 8] = b"HBFSEDG1";
const PERMUTATION_SALT: u64 = 0x5045_524d_5554_4531;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub scale: u32,
    pub edgefactor: u32,
    pub seed: u64,
    /// Quadrant probabilities: top-left, top-right, bottom-left, bottom-right.
    pub probs: [f64; 4],
}

impl GraphParams {
    pub fn new(scale: u32, edgefactor: u32, seed: u64) -> Self {
        GraphParams { scale, edgefactor, seed, probs: GRAPH500_PROBS }
    }

    pub fn with_probs(mut self, probs: [f64; 4]) -> Self {
        self.probs = probs;
        self
    }

    pub fn num_vertices(&self) -> usize {
        1usize << self.scale
    }

    /// Undirected edge count, `2^scale * edgefactor`.
    pub fn num_edges(&self) -> u64 {
        (1u64 << self.scale) * self.edgefactor as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale > MAX_SCALE {
            return Err(Error::InvalidParams(format!("scale {} exceeds maximum {MAX_SCALE}", self.scale)));
        }
        if self.edgefactor < 1 {
            return Err(Error::InvalidParams("edgefactor must be at least 1".into()));
        }
        if self.probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParams(format!("probabilities must lie in [0, 1], got {:?}", self.probs)));
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("probabilities sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    /// Relabel vertices with a seeded random permutation after sampling.
    pub permute: bool,
    pub max_edges: u64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { permute: true, max_edges: DEFAULT_MAX_EDGES }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<(VertexId, VertexId)>,
    pub num_vertices: usize,
    pub params: GraphParams,
}

/// Seed of the RNG substream that produces edge `index`.
///
/// Both inputs go through the SplitMix64 finalizer so that neighbouring edge
/// indices land on unrelated points of the SplitMix64 sequence.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws one edge by `scale` recursive quadrant choices.
pub fn rmat_edge<R: RngExt + ?Sized>(params: &GraphParams, rng: &mut R) -> (VertexId, VertexId) {
    let [a, b, c, _] = params.probs;
    let ab = a + b;
    let abc = ab + c;
    let (mut u, mut v) = (0u32, 0u32);
    for _ in 0..params.scale {
        let r: f64 = rng.random();
        let (du, dv) = if r < a {
            (0, 0)
        } else if r < ab {
            (0, 1)
        } else if r < abc {
            (1, 0)
        } else {
            (1, 1)
        };
        u = (u << 1) | du;
        v = (v << 1) | dv;
    }
    (u, v)
}

/// The un-permuted edge at position `index`.
pub fn edge_at(params: &GraphParams, index: u64) -> (VertexId, VertexId) {
    let mut rng = SplitMix64::seed_from_u64(substream_seed(params.seed, index));
    rmat_edge(params, &mut rng)
}

pub fn generate(params: GraphParams) -> Result<EdgeList> {
    generate_with(params, GenOptions::default())
}

pub fn generate_with(params: GraphParams, opts: GenOptions) -> Result<EdgeList> {
    params.validate()?;
    let count = params.num_edges();
    if count > opts.max_edges {
        return Err(Error::Capacity(format!("{count} edges requested, budget is {}", opts.max_edges)));
    }
    let mut edges: Vec<(VertexId, VertexId)> = (0..count).into_par_iter().map(|i| edge_at(&params, i)).collect();

    if opts.permute {
        let perm = vertex_permutation(&params);
        edges.par_iter_mut().for_each(|(u, v)| (*u, *v) = (perm[*u as usize], perm[*v as usize]));
    }

    Ok(EdgeList { edges, num_vertices: params.num_vertices(), params })
}

fn vertex_permutation(params: &GraphParams) -> Vec<VertexId> {
    let n = params.num_vertices();
    let mut perm: Vec<VertexId> = (0..n as u64).map(|v| v as VertexId).collect();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(params.seed ^ PERMUTATION_SALT);
    perm.shuffle(&mut rng);
    perm
}

impl EdgeList {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Writes the little-endian dump: magic, scale, edgefactor, seed, count, then
    /// `count` pairs of u64 endpoints.
    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&self.params.scale.to_le_bytes())?;
        w.write_all(&self.params.edgefactor.to_le_bytes())?;
        w.write_all(&self.params.seed.to_le_bytes())?;
        w.write_all(&(self.edges.len() as u64).to_le_bytes())?;
        for &(u, v) in &self.edges {
            w.write_all(&(u as u64).to_le_bytes())?;
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a dump produced by [`EdgeList::write_to`]. The format does not
    /// carry quadrant probabilities; the loaded params report the Graph500 ones.
    pub fn read_from<R: Read>(r: R) -> Result<EdgeList> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::BadFormat(format!("bad magic {magic:?}")));
        }
        let scale = read_u32(&mut r)?;
        let edgefactor = read_u32(&mut r)?;
        let seed = read_u64(&mut r)?;
        let count = read_u64(&mut r)?;
        let params = GraphParams::new(scale, edgefactor, seed);
        params.validate().map_err(|e| Error::BadFormat(e.to_string()))?;
        let n = params.num_vertices() as u64;
        let mut edges = Vec::with_capacity(count.min(DEFAULT_MAX_EDGES) as usize);
        for i in 0..count {
            let u = read_u64(&mut r)?;
            let v = read_u64(&mut r)?;
            if u >= n || v >= n {
                return Err(Error::BadFormat(format!("edge {i} ({u}, {v}) has an endpoint outside [0, {n})")));
            }
            edges.push((u as VertexId, v as VertexId));
        }
        Ok(EdgeList { edges, num_vertices: n as usize, params })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EdgeList> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

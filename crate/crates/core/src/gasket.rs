//! Level-N Sierpinski gasket graphs.
//!
//! Vertices live on the dyadic triangular lattice of the unit equilateral
//! triangle: a vertex is stored as integer coordinates `(i, j)` meaning
//! `a0 + (i / 2^N)(a1 - a0) + (j / 2^N)(a2 - a0)`. Identity is decided on
//! these integers only, so deduplication is exact at every level.
//!
//! Vertex order is canonical: the corners `a0, a1, a2` first, then every
//! other vertex sorted by planar `(x, y)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{real, Real};

/// Dense 0-based vertex index in canonical order.
pub type VertexId = usize;

/// Largest level accepted by [`GasketGraph::build`].
pub const MAX_LEVEL: u32 = 12;

/// One of the three boundary vertices `a0, a1, a2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    A0,
    A1,
    A2,
}

impl Corner {
    pub const ALL: [Corner; 3] = [Corner::A0, Corner::A1, Corner::A2];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Corner> {
        match i {
            0 => Ok(Corner::A0),
            1 => Ok(Corner::A1),
            2 => Ok(Corner::A2),
            _ => domain(format!("corner index {i} is not in {{0,1,2}}")),
        }
    }

    /// Corners are the first three vertices in canonical order.
    #[inline]
    pub fn vertex(self) -> VertexId {
        self.index()
    }

    fn lattice(self, side: u32) -> LatticePoint {
        match self {
            Corner::A0 => LatticePoint { i: 0, j: 0 },
            Corner::A1 => LatticePoint { i: side, j: 0 },
            Corner::A2 => LatticePoint { i: 0, j: side },
        }
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.index())
    }
}

/// Cell address: a word over `{0,1,2}`; the empty word is the whole gasket.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if let Some(bad) = letters.iter().find(|&&l| l > 2) {
            return domain(format!("invalid word letter {bad}; alphabet is {{0,1,2}}"));
        }
        Ok(Word(letters))
    }

    /// The word `i i ... i` of length `depth`.
    pub fn repeated(corner: Corner, depth: u32) -> Self {
        Word(vec![corner.index() as u8; depth as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn extends(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1),
                '2' => Ok(2),
                other => domain(format!("invalid word letter {other:?}; alphabet is {{0,1,2}}")),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Integer lattice coordinates with implicit denominator `2^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub i: u32,
    pub j: u32,
}

impl LatticePoint {
    fn offset(self, di: u32, dj: u32) -> Self {
        LatticePoint { i: self.i + di, j: self.j + dj }
    }

    /// Key ordering points by planar `(x, y)`: `x * 2^(N+1) = 2i + j`, `y ∝ j`.
    fn planar_key(self) -> (u64, u32) {
        (2 * self.i as u64 + self.j as u64, self.j)
    }
}

/// The approximating graph `G_N = (V_N, E_N)`.
#[derive(Debug, Clone)]
pub struct GasketGraph {
    level: u32,
    points: Vec<LatticePoint>,
    edges: Vec<(VertexId, VertexId)>,
    adj_offsets: Vec<usize>,
    adj: Vec<VertexId>,
    inc: Vec<usize>,
    index: HashMap<LatticePoint, VertexId>,
}

/// `|V_N| = (3/2)(3^N + 1)`.
pub fn vertex_count(level: u32) -> usize {
    3 * (3usize.pow(level) + 1) / 2
}

/// `|E_N| = 3^(N+1)`.
pub fn edge_count(level: u32) -> usize {
    3usize.pow(level + 1)
}

impl GasketGraph {
    pub fn build(level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::Capacity(format!(
                "gasket level {level} exceeds the cap {MAX_LEVEL}"
            )));
        }
        let side = 1u32 << level;
        let mut cells = Vec::with_capacity(3usize.pow(level));
        collect_cells(LatticePoint { i: 0, j: 0 }, side, level, &mut cells);

        let mut raw: Vec<LatticePoint> = cells
            .iter()
            .flat_map(|&(o, s)| [o, o.offset(s, 0), o.offset(0, s)])
            .collect();
        raw.sort_unstable_by_key(|p| p.planar_key());
        raw.dedup();

        let corners: Vec<LatticePoint> = Corner::ALL.iter().map(|c| c.lattice(side)).collect();
        let mut points = corners.clone();
        points.extend(raw.into_iter().filter(|p| !corners.contains(p)));
        let index: HashMap<LatticePoint, VertexId> =
            points.iter().enumerate().map(|(k, &p)| (p, k)).collect();

        let mut edges: Vec<(VertexId, VertexId)> = cells
            .iter()
            .flat_map(|&(o, s)| {
                let v = [index[&o], index[&o.offset(s, 0)], index[&o.offset(0, s)]];
                [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])]
            })
            .map(|(x, y)| (x.min(y), x.max(y)))
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let n = points.len();
        let mut degree = vec![0usize; n];
        for &(x, y) in &edges {
            degree[x] += 1;
            degree[y] += 1;
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        for d in &degree {
            adj_offsets.push(adj_offsets.last().unwrap() + d);
        }
        let mut fill = adj_offsets[..n].to_vec();
        let mut adj = vec![0; adj_offsets[n]];
        let mut inc = vec![0; adj_offsets[n]];
        for (e, &(x, y)) in edges.iter().enumerate() {
            adj[fill[x]] = y;
            inc[fill[x]] = e;
            fill[x] += 1;
            adj[fill[y]] = x;
            inc[fill[y]] = e;
            fill[y] += 1;
        }
        for v in 0..n {
            let (lo, hi) = (adj_offsets[v], adj_offsets[v + 1]);
            let mut pairs: Vec<(VertexId, usize)> =
                adj[lo..hi].iter().copied().zip(inc[lo..hi].iter().copied()).collect();
            pairs.sort_unstable();
            for (k, (a, e)) in pairs.into_iter().enumerate() {
                adj[lo + k] = a;
                inc[lo + k] = e;
            }
        }

        Ok(GasketGraph { level, points, edges, adj_offsets, adj, inc, index })
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Unordered edges `(x, y)` with `x < y`, sorted.
    #[inline]
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    /// Edge ids incident to `v`, aligned with [`neighbors`](Self::neighbors).
    #[inline]
    pub fn incident_edges(&self, v: VertexId) -> &[usize] {
        &self.inc[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.adj_offsets[v + 1] - self.adj_offsets[v]
    }

    #[inline]
    pub fn is_corner(&self, v: VertexId) -> bool {
        v < 3
    }

    pub fn corner_of(&self, v: VertexId) -> Option<Corner> {
        Corner::from_index(v).ok()
    }

    pub fn interior(&self) -> impl Iterator<Item = VertexId> {
        3..self.num_vertices()
    }

    pub fn lattice_point(&self, v: VertexId) -> LatticePoint {
        self.points[v]
    }

    pub fn vertex_at(&self, p: LatticePoint) -> Option<VertexId> {
        self.index.get(&p).copied()
    }

    /// Planar coordinates for `a0=(0,0)`, `a1=(1,0)`, `a2=(1/2, √3/2)`.
    pub fn coordinates<T: Real>(&self, v: VertexId) -> (T, T) {
        let p = self.points[v];
        let denom: T = real((1u64 << self.level) as f64);
        let i = real::<T>(p.i as f64);
        let j = real::<T>(p.j as f64);
        let half: T = real(0.5);
        let h: T = real(3.0f64.sqrt() / 2.0);
        ((i + half * j) / denom, h * j / denom)
    }

    /// Mass `1/|V_N|` charged to each vertex by `m_N`.
    pub fn vertex_measure<T: Real>(&self) -> T {
        T::one() / real::<T>(self.num_vertices() as f64)
    }

    /// Reflection fixing `a0` and swapping `a1 <-> a2`, as a vertex permutation.
    pub fn mirror(&self) -> Vec<VertexId> {
        self.points
            .iter()
            .map(|p| self.index[&LatticePoint { i: p.j, j: p.i }])
            .collect()
    }

    /// `V_N ∩ K_w`, sorted.
    pub fn cell_vertices(&self, w: &Word) -> Result<Vec<VertexId>> {
        if w.len() > self.level as usize {
            return domain(format!(
                "word of length {} is deeper than the graph level {}",
                w.len(),
                self.level
            ));
        }
        let mut origin = LatticePoint { i: 0, j: 0 };
        let mut side = 1u32 << self.level;
        for &l in w.letters() {
            side /= 2;
            origin = match l {
                0 => origin,
                1 => origin.offset(side, 0),
                _ => origin.offset(0, side),
            };
        }
        let mut cells = Vec::new();
        collect_cells(origin, side, self.level - w.len() as u32, &mut cells);
        let mut out: Vec<VertexId> = cells
            .iter()
            .flat_map(|&(o, s)| [o, o.offset(s, 0), o.offset(0, s)])
            .map(|p| self.index[&p])
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Address of the unique `depth`-cell containing `corner`.
    pub fn corner_cell(&self, corner: Corner, depth: u32) -> Word {
        Word::repeated(corner, depth)
    }

    /// Structural self-check: counts, degree profile and connectivity.
    pub fn audit(&self) -> Result<()> {
        let n = self.num_vertices();
        if n != vertex_count(self.level) {
            return domain(format!("|V| = {n}, expected {}", vertex_count(self.level)));
        }
        if self.num_edges() != edge_count(self.level) {
            return domain(format!(
                "|E| = {}, expected {}",
                self.num_edges(),
                edge_count(self.level)
            ));
        }
        for v in 0..n {
            let want = if self.is_corner(v) { 2 } else { 4 };
            if self.degree(v) != want {
                return domain(format!("vertex {v} has degree {}", self.degree(v)));
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != n {
            return domain(format!("graph is disconnected: reached {reached} of {n}"));
        }
        Ok(())
    }

    pub fn to_export(&self) -> GraphExport {
        GraphExport {
            level: self.level,
            vertices: (0..self.num_vertices())
                .map(|v| {
                    let (x, y) = self.coordinates::<f64>(v);
                    VertexExport { id: v, x, y, is_corner: self.is_corner(v) }
                })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_export())?)
    }
}

/// JSON shape of an exported graph.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphExport {
    pub level: u32,
    pub vertices: Vec<VertexExport>,
    pub edges: Vec<[VertexId; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VertexExport {
    pub id: VertexId,
    pub x: f64,
    pub y: f64,
    pub is_corner: bool,
}

// Cells in word order: child 0 at the origin, 1 along a1, 2 along a2.
fn collect_cells(origin: LatticePoint, side: u32, depth: u32, out: &mut Vec<(LatticePoint, u32)>) {
    if depth == 0 {
        out.push((origin, side));
        return;
    }
    let h = side / 2;
    collect_cells(origin, h, depth - 1, out);
    collect_cells(origin.offset(h, 0), h, depth - 1, out);
    collect_cells(origin.offset(0, h), h, depth - 1, out);
}

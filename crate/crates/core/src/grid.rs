//! Staircase graphs, grid windows and quotient maps.
//!
//! A staircase graph is the subgraph of the square grid induced by the
//! intersection of `m` consecutive negative diagonals (constant `x + y`) and
//! `n` consecutive positive diagonals (constant `x - y`). The vertices on one
//! positive diagonal form a *slash*; slashes are independent sets, numbered
//! `1..=n`, and all edges run between consecutive slashes. For odd `m` there
//! are two isomorphism classes of staircases with the same dimensions,
//! distinguished here as [`Variant::Plain`] and [`Variant::Prime`]; for even
//! `m` there is a single class.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::pebble::Distribution;
use crate::{Error, Result};

/// A lattice point. Ordering is lexicographic by `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridCoord {
    pub x: i32,
    pub y: i32,
}

impl GridCoord {
    pub fn new(x: i32, y: i32) -> Self {
        GridCoord { x, y }
    }

    /// Index of the positive diagonal (`x - y`) this point lies on.
    pub fn pos_diag(self) -> i32 {
        self.x - self.y
    }

    /// Index of the negative diagonal (`x + y`) this point lies on.
    pub fn neg_diag(self) -> i32 {
        self.x + self.y
    }

    pub fn manhattan(self, other: GridCoord) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_grid_neighbor(self, other: GridCoord) -> bool {
        self.manhattan(other) == 1
    }
}

impl fmt::Display for GridCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// The two isomorphism classes of staircases of odd width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Prime,
}

/// Dimensions and class of a staircase graph: `width` negative diagonals
/// crossed with `length` positive diagonals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StaircaseSpec {
    #[serde(rename = "m")]
    pub width: u32,
    #[serde(rename = "n")]
    pub length: u32,
    pub variant: Variant,
}

impl StaircaseSpec {
    pub fn new(width: u32, length: u32, variant: Variant) -> Self {
        StaircaseSpec { width, length, variant }.normalized()
    }

    pub fn plain(width: u32, length: u32) -> Self {
        Self::new(width, length, Variant::Plain)
    }

    pub fn prime(width: u32, length: u32) -> Self {
        Self::new(width, length, Variant::Prime)
    }

    /// For even widths the two variants coincide; fold Prime into Plain.
    pub fn normalized(self) -> Self {
        if self.width % 2 == 0 {
            StaircaseSpec { variant: Variant::Plain, ..self }
        } else {
            self
        }
    }

    fn validate(self) -> Result<Self> {
        if self.width == 0 || self.length == 0 {
            return Err(Error::InvalidSpec(format!(
                "staircase dimensions must be positive, got {}x{}",
                self.width, self.length
            )));
        }
        Ok(self.normalized())
    }

    /// Smallest `x - y` value of the canonical coordinate frame.
    ///
    /// Plain staircases of odd width use positive diagonals `0..=n-1`; all
    /// others use `1..=n`.
    pub fn pos_diag_min(self) -> i32 {
        if self.width % 2 == 1 && self.variant == Variant::Plain {
            0
        } else {
            1
        }
    }

    /// Canonical vertex set: `x + y` in `1..=m`, `x - y` in the variant's
    /// range, matching parities.
    pub fn coords(self) -> Vec<GridCoord> {
        let s0 = self.pos_diag_min();
        let mut out = Vec::new();
        for s in s0..s0 + self.length as i32 {
            for j in 1..=self.width as i32 {
                if (j - s).rem_euclid(2) == 0 {
                    out.push(GridCoord::new((j + s) / 2, (j - s) / 2));
                }
            }
        }
        out
    }

    /// Number of vertices on slash `s` (1-based).
    pub fn slash_size(self, s: u32) -> u32 {
        let diag = self.pos_diag_min() + s as i32 - 1;
        // Count values in 1..=m with the parity of `diag`.
        if diag.rem_euclid(2) == 1 {
            self.width.div_ceil(2)
        } else {
            self.width / 2
        }
    }

    /// Variant of a staircase whose positive-diagonal range starts at `s0`.
    pub(crate) fn variant_for_start(width: u32, s0: i32) -> Variant {
        if width % 2 == 0 || s0.rem_euclid(2) == 1 {
            if width % 2 == 0 {
                Variant::Plain
            } else {
                Variant::Prime
            }
        } else {
            Variant::Plain
        }
    }
}

impl fmt::Display for StaircaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tick = if self.variant == Variant::Prime { "'" } else { "" };
        write!(f, "S{}{},{}", tick, self.width, self.length)
    }
}

impl FromStr for StaircaseSpec {
    type Err = Error;

    /// Parses labels like `S3,4` and `S'7,5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse staircase spec {s:?}"));
        let rest = s.strip_prefix('S').ok_or_else(bad)?;
        let (variant, rest) = match rest.strip_prefix('\'') {
            Some(r) => (Variant::Prime, r),
            None => (Variant::Plain, rest),
        };
        let (w, l) = rest.split_once(',').ok_or_else(bad)?;
        let width: u32 = w.parse().map_err(|_| bad())?;
        let length: u32 = l.parse().map_err(|_| bad())?;
        StaircaseSpec { width, length, variant }.validate()
    }
}

/// Identity of a graph for reports and checkpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphId {
    Staircase(StaircaseSpec),
    Window { rows: u32, cols: u32 },
    Custom { vertices: usize, edges: usize, hash: u64 },
}

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphId::Staircase(spec) => spec.fmt(f),
            GraphId::Window { rows: 1, cols } => write!(f, "P{cols}"),
            GraphId::Window { rows, cols: 1 } => write!(f, "P{rows}"),
            GraphId::Window { rows, cols } => write!(f, "G{rows}x{cols}"),
            GraphId::Custom { vertices, edges, hash } => {
                write!(f, "custom(v={vertices},e={edges},h={hash:016x})")
            }
        }
    }
}

/// An induced subgraph of the square grid with its slash structure.
///
/// Vertices are sorted by `(slash, x)`; adjacency is exactly grid adjacency
/// restricted to the vertex set. All-pairs distances are precomputed.
#[derive(Clone, Debug)]
pub struct PebbleGraph {
    vertices: Vec<GridCoord>,
    coord_index: HashMap<GridCoord, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    slash_no: Vec<u32>,
    diag_no: Vec<u32>,
    slash_members: Vec<Vec<usize>>,
    n_slashes: u32,
    n_diags: u32,
    dist: Vec<Vec<u16>>,
    spec: Option<StaircaseSpec>,
    window: Option<(u32, u32)>,
}

impl PartialEq for PebbleGraph {
    /// Structural equality: same labelled vertices and edges.
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for PebbleGraph {}

pub(crate) const DIST_UNREACHABLE: u16 = u16::MAX;

impl PebbleGraph {
    /// Builds the graph induced by an explicit coordinate set.
    ///
    /// The slash/diagonal frames come from the provenance when one is given,
    /// otherwise from the occupied ranges.
    pub(crate) fn from_coords(
        mut coords: Vec<GridCoord>,
        spec: Option<StaircaseSpec>,
        window: Option<(u32, u32)>,
    ) -> Result<PebbleGraph> {
        coords.sort_by_key(|c| (c.pos_diag(), c.x));
        coords.dedup();
        if coords.is_empty() {
            return Err(Error::InvalidSpec("empty vertex set".into()));
        }
        let (s_min, n_slashes, j_min, n_diags) = match (spec, window) {
            (Some(sp), _) => (sp.pos_diag_min(), sp.length, 1, sp.width),
            (None, Some((r, c))) => (1 - c as i32, r + c - 1, 2, r + c - 1),
            (None, None) => {
                let s_lo = coords.iter().map(|c| c.pos_diag()).min().unwrap();
                let s_hi = coords.iter().map(|c| c.pos_diag()).max().unwrap();
                let j_lo = coords.iter().map(|c| c.neg_diag()).min().unwrap();
                let j_hi = coords.iter().map(|c| c.neg_diag()).max().unwrap();
                (s_lo, (s_hi - s_lo + 1) as u32, j_lo, (j_hi - j_lo + 1) as u32)
            }
        };
        let coord_index: HashMap<GridCoord, usize> =
            coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut slash_no = Vec::with_capacity(coords.len());
        let mut diag_no = Vec::with_capacity(coords.len());
        let mut slash_members = vec![Vec::new(); n_slashes as usize];
        for (i, c) in coords.iter().enumerate() {
            let s = c.pos_diag() - s_min;
            let j = c.neg_diag() - j_min;
            if s < 0 || s >= n_slashes as i32 || j < 0 || j >= n_diags as i32 {
                return Err(Error::InvalidSpec(format!(
                    "vertex {c} outside the declared diagonal frame"
                )));
            }
            slash_no.push(s as u32 + 1);
            diag_no.push(j as u32 + 1);
            slash_members[s as usize].push(i);
        }
        let mut adj = vec![Vec::new(); coords.len()];
        let mut edges = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let nb = GridCoord::new(c.x + dx, c.y + dy);
                if let Some(&j) = coord_index.get(&nb) {
                    adj[i].push(j);
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        edges.sort_unstable();
        let dist = all_pairs_bfs(&adj);
        Ok(PebbleGraph {
            vertices: coords,
            coord_index,
            adj,
            edges,
            slash_no,
            diag_no,
            slash_members,
            n_slashes,
            n_diags,
            dist,
            spec,
            window,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn coords(&self) -> &[GridCoord] {
        &self.vertices
    }

    pub fn coord(&self, v: usize) -> GridCoord {
        self.vertices[v]
    }

    pub fn index_of(&self, c: GridCoord) -> Option<usize> {
        self.coord_index.get(&c).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Hop distance, `None` when the vertices are in different components.
    pub fn distance(&self, u: usize, v: usize) -> Option<u32> {
        match self.dist[u][v] {
            DIST_UNREACHABLE => None,
            d => Some(d as u32),
        }
    }

    pub(crate) fn raw_distances(&self, v: usize) -> &[u16] {
        &self.dist[v]
    }

    /// Number of slashes in the graph's frame (equals `n` for staircases).
    pub fn n_slashes(&self) -> u32 {
        self.n_slashes
    }

    /// Number of negative diagonals in the frame (equals `m` for staircases).
    pub fn n_diags(&self) -> u32 {
        self.n_diags
    }

    /// 1-based slash number of a vertex.
    pub fn slash_of(&self, v: usize) -> u32 {
        self.slash_no[v]
    }

    /// 1-based negative-diagonal number of a vertex.
    pub fn diag_of(&self, v: usize) -> u32 {
        self.diag_no[v]
    }

    /// Vertices on slash `s` (1-based), in vertex order.
    pub fn slash_vertices(&self, s: u32) -> &[usize] {
        &self.slash_members[(s - 1) as usize]
    }

    pub fn provenance(&self) -> Option<StaircaseSpec> {
        self.spec
    }

    pub fn window(&self) -> Option<(u32, u32)> {
        self.window
    }

    pub fn graph_id(&self) -> GraphId {
        if let Some(spec) = self.spec {
            GraphId::Staircase(spec)
        } else if let Some((rows, cols)) = self.window {
            GraphId::Window { rows, cols }
        } else {
            GraphId::Custom {
                vertices: self.vertices.len(),
                edges: self.edges.len(),
                hash: coord_hash(&self.vertices),
            }
        }
    }

    pub fn is_connected(&self) -> bool {
        self.dist[0].iter().all(|&d| d != DIST_UNREACHABLE)
    }

    /// True when the graph is a (possibly single-vertex) path.
    pub fn is_path(&self) -> bool {
        self.is_connected()
            && self.edges.len() + 1 == self.vertices.len()
            && self.adj.iter().all(|a| a.len() <= 2)
    }

    /// Path vertices in end-to-end order; `None` when not a path.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if !self.is_path() {
            return None;
        }
        if self.n_vertices() == 1 {
            return Some(vec![0]);
        }
        let start = (0..self.n_vertices()).find(|&v| self.degree(v) == 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while order.len() < self.n_vertices() {
            let next = *self.adj[cur].iter().find(|&&w| w != prev)?;
            order.push(next);
            prev = cur;
            cur = next;
        }
        Some(order)
    }
}

fn all_pairs_bfs(adj: &[Vec<usize>]) -> Vec<Vec<u16>> {
    let n = adj.len();
    let mut out = Vec::with_capacity(n);
    let mut queue = Vec::with_capacity(n);
    for start in 0..n {
        let mut row = vec![DIST_UNREACHABLE; n];
        row[start] = 0;
        queue.clear();
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for &w in &adj[v] {
                if row[w] == DIST_UNREACHABLE {
                    row[w] = row[v] + 1;
                    queue.push(w);
                }
            }
        }
        out.push(row);
    }
    out
}

fn coord_hash(coords: &[GridCoord]) -> u64 {
    // FNV-1a over the sorted coordinate list; stable across runs.
    let mut h: u64 = 0xcbf29ce484222325;
    for c in coords {
        for part in [c.x, c.y] {
            for byte in part.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    h
}

/// Builds the canonical staircase graph for a spec.
pub fn build_staircase(spec: StaircaseSpec) -> Result<PebbleGraph> {
    let spec = spec.validate()?;
    PebbleGraph::from_coords(spec.coords(), Some(spec), None)
}

/// Builds a `rows x cols` grid window with vertices `(x, y)`, `x` in
/// `1..=rows`, `y` in `1..=cols`.
pub fn build_grid_window(rows: u32, cols: u32) -> Result<PebbleGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSpec(format!(
            "window dimensions must be positive, got {rows}x{cols}"
        )));
    }
    let mut coords = Vec::with_capacity((rows * cols) as usize);
    for x in 1..=rows as i32 {
        for y in 1..=cols as i32 {
            coords.push(GridCoord::new(x, y));
        }
    }
    PebbleGraph::from_coords(coords, None, Some((rows, cols)))
}

/// Builds a path on `n` vertices (a `1 x n` grid window).
pub fn build_path(n: u32) -> Result<PebbleGraph> {
    build_grid_window(1, n)
}

// ===== lattice symmetries =======================================================

/// An isometry of the diagonal frame: optionally swap the roles of the two
/// diagonal directions, optionally negate either, then translate. Only maps
/// whose two shifts have equal parity are points of the lattice.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DiagMap {
    swap: bool,
    neg_j: bool,
    neg_s: bool,
    dj: i32,
    ds: i32,
}

impl DiagMap {
    pub(crate) fn apply(self, c: GridCoord) -> GridCoord {
        let (mut j, mut s) = (c.neg_diag(), c.pos_diag());
        if self.swap {
            std::mem::swap(&mut j, &mut s);
        }
        if self.neg_j {
            j = -j;
        }
        if self.neg_s {
            s = -s;
        }
        j += self.dj;
        s += self.ds;
        debug_assert!((j - s).rem_euclid(2) == 0);
        GridCoord::new((j + s) / 2, (j - s) / 2)
    }
}

fn occupied_range(coords: &[GridCoord], f: impl Fn(GridCoord) -> i32) -> (i32, i32) {
    let lo = coords.iter().map(|&c| f(c)).min().unwrap();
    let hi = coords.iter().map(|&c| f(c)).max().unwrap();
    (lo, hi)
}

/// All lattice isometries mapping `a`'s vertex set onto `b`'s, found by
/// aligning the diagonal bounding ranges under the eight frame symmetries.
fn affine_set_maps(a: &PebbleGraph, b: &PebbleGraph) -> Vec<(DiagMap, Vec<usize>)> {
    let mut found = Vec::new();
    if a.n_vertices() != b.n_vertices() {
        return found;
    }
    let (aj_lo, aj_hi) = occupied_range(a.coords(), GridCoord::neg_diag);
    let (as_lo, as_hi) = occupied_range(a.coords(), GridCoord::pos_diag);
    let (bj_lo, _) = occupied_range(b.coords(), GridCoord::neg_diag);
    let (bs_lo, _) = occupied_range(b.coords(), GridCoord::pos_diag);
    for swap in [false, true] {
        for neg_j in [false, true] {
            for neg_s in [false, true] {
                let (j_lo, j_hi) = if swap { (as_lo, as_hi) } else { (aj_lo, aj_hi) };
                let (s_lo, s_hi) = if swap { (aj_lo, aj_hi) } else { (as_lo, as_hi) };
                let j_start = if neg_j { -j_hi } else { j_lo };
                let s_start = if neg_s { -s_hi } else { s_lo };
                let map = DiagMap {
                    swap,
                    neg_j,
                    neg_s,
                    dj: bj_lo - j_start,
                    ds: bs_lo - s_start,
                };
                if (map.dj - map.ds).rem_euclid(2) != 0 {
                    continue;
                }
                let mut bijection = Vec::with_capacity(a.n_vertices());
                let mut ok = true;
                for &c in a.coords() {
                    match b.index_of(map.apply(c)) {
                        Some(i) => bijection.push(i),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let mut seen = vec![false; b.n_vertices()];
                for &i in &bijection {
                    seen[i] = true;
                }
                if seen.iter().all(|&x| x) && edges_preserved(a, b, &bijection) {
                    found.push((map, bijection));
                }
            }
        }
    }
    found
}

fn edges_preserved(a: &PebbleGraph, b: &PebbleGraph, bijection: &[usize]) -> bool {
    a.edges().len() == b.edges().len()
        && a.edges().iter().all(|&(u, v)| b.has_edge(bijection[u], bijection[v]))
}

/// Backtracking isomorphism search; feasible for small graphs only.
fn exhaustive_isomorphism(a: &PebbleGraph, b: &PebbleGraph) -> Option<Vec<usize>> {
    if a.n_vertices() != b.n_vertices() || a.edges().len() != b.edges().len() {
        return None;
    }
    let n = a.n_vertices();
    let mut deg_a: Vec<usize> = (0..n).collect();
    // Map high-degree vertices first; they are the most constrained.
    deg_a.sort_by_key(|&v| std::cmp::Reverse(a.degree(v)));
    let mut assigned = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        a: &PebbleGraph,
        b: &PebbleGraph,
        order: &[usize],
        pos: usize,
        assigned: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        'cand: for w in 0..b.n_vertices() {
            if used[w] || a.degree(v) != b.degree(w) {
                continue;
            }
            for &nb in a.neighbors(v) {
                if assigned[nb] != usize::MAX && !b.has_edge(w, assigned[nb]) {
                    continue 'cand;
                }
            }
            // Also reject mapped non-neighbours that would become adjacent.
            for u in 0..a.n_vertices() {
                if assigned[u] != usize::MAX && !a.has_edge(v, u) && b.has_edge(w, assigned[u]) {
                    continue 'cand;
                }
            }
            assigned[v] = w;
            used[w] = true;
            if go(a, b, order, pos + 1, assigned, used) {
                return true;
            }
            assigned[v] = usize::MAX;
            used[w] = false;
        }
        false
    }
    if go(a, b, &deg_a, 0, &mut assigned, &mut used) {
        Some(assigned)
    } else {
        None
    }
}

const EXHAUSTIVE_ISO_CAP: usize = 20;

/// Vertex bijection between two staircases when they are isomorphic.
///
/// The known coincidences (width/length swap; the two variants at even
/// length) are found through lattice isometries; anything that escapes those
/// falls back to an exhaustive search on graphs of at most
/// 20 vertices. Returned bijections are verified edge-preserving.
pub fn staircase_isomorphism(
    a: StaircaseSpec,
    b: StaircaseSpec,
) -> Result<Option<Vec<usize>>> {
    let ga = build_staircase(a)?;
    let gb = build_staircase(b)?;
    if let Some((_, bijection)) = affine_set_maps(&ga, &gb).into_iter().next() {
        return Ok(Some(bijection));
    }
    if ga.n_vertices() <= EXHAUSTIVE_ISO_CAP && gb.n_vertices() <= EXHAUSTIVE_ISO_CAP {
        return Ok(exhaustive_isomorphism(&ga, &gb));
    }
    Ok(None)
}

/// First lattice isometry carrying `a` onto `b`, as a vertex bijection.
pub(crate) fn align(a: &PebbleGraph, b: &PebbleGraph) -> Option<Vec<usize>> {
    affine_set_maps(a, b).into_iter().next().map(|(_, bij)| bij)
}

/// Lattice isometries carrying `a`'s vertex set *into* `b`'s, as injections.
///
/// Since both graphs are induced subgraphs of the grid and the maps are
/// isometries, adjacency is preserved in both directions automatically.
/// Ranges are anchored at either end of `b`'s diagonal bounds, so shifted
/// placements (e.g. onto the last diagonals) are found too. Non-swapping
/// maps come first.
pub(crate) fn affine_embeddings(a: &PebbleGraph, b: &PebbleGraph) -> Vec<Vec<usize>> {
    let mut found: Vec<Vec<usize>> = Vec::new();
    if a.n_vertices() > b.n_vertices() {
        return found;
    }
    let (aj_lo, aj_hi) = occupied_range(a.coords(), GridCoord::neg_diag);
    let (as_lo, as_hi) = occupied_range(a.coords(), GridCoord::pos_diag);
    let (bj_lo, bj_hi) = occupied_range(b.coords(), GridCoord::neg_diag);
    let (bs_lo, bs_hi) = occupied_range(b.coords(), GridCoord::pos_diag);
    for swap in [false, true] {
        for neg_j in [false, true] {
            for neg_s in [false, true] {
                let (j_lo, j_hi) = if swap { (as_lo, as_hi) } else { (aj_lo, aj_hi) };
                let (s_lo, s_hi) = if swap { (aj_lo, aj_hi) } else { (as_lo, as_hi) };
                let j_span = j_hi - j_lo;
                let s_span = s_hi - s_lo;
                let j_start = if neg_j { -j_hi } else { j_lo };
                let s_start = if neg_s { -s_hi } else { s_lo };
                for dj in [bj_lo - j_start, bj_hi - j_span - j_start] {
                    for ds in [bs_lo - s_start, bs_hi - s_span - s_start] {
                        let map = DiagMap { swap, neg_j, neg_s, dj, ds };
                        if (map.dj - map.ds).rem_euclid(2) != 0 {
                            continue;
                        }
                        let image: Option<Vec<usize>> =
                            a.coords().iter().map(|&c| b.index_of(map.apply(c))).collect();
                        if let Some(bijection) = image {
                            let mut seen = vec![false; b.n_vertices()];
                            let injective = bijection.iter().all(|&i| {
                                let fresh = !seen[i];
                                seen[i] = true;
                                fresh
                            });
                            if injective && !found.contains(&bijection) {
                                found.push(bijection);
                            }
                        }
                    }
                }
            }
        }
    }
    found
}

/// Nontrivial self-maps found through lattice isometries (always verified).
pub(crate) fn affine_automorphisms(g: &PebbleGraph) -> Vec<Vec<usize>> {
    affine_set_maps(g, g)
        .into_iter()
        .map(|(_, bij)| bij)
        .filter(|bij| bij.iter().enumerate().any(|(i, &j)| i != j))
        .collect()
}

/// Exhaustive automorphism search by backtracking; `None` above the cap.
pub(crate) fn exhaustive_automorphisms(g: &PebbleGraph, cap: usize) -> Option<Vec<Vec<usize>>> {
    if g.n_vertices() > cap {
        return None;
    }
    let n = g.n_vertices();
    let mut out = Vec::new();
    let mut assigned = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        g: &PebbleGraph,
        pos: usize,
        assigned: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == g.n_vertices() {
            out.push(assigned.clone());
            return;
        }
        'cand: for w in 0..g.n_vertices() {
            if used[w] || g.degree(pos) != g.degree(w) {
                continue;
            }
            for &nb in g.neighbors(pos) {
                if nb < pos && !g.has_edge(w, assigned[nb]) {
                    continue 'cand;
                }
            }
            for u in 0..pos {
                if !g.has_edge(pos, u) && g.has_edge(w, assigned[u]) {
                    continue 'cand;
                }
            }
            assigned[pos] = w;
            used[w] = true;
            go(g, pos + 1, assigned, used, out);
            used[w] = false;
        }
        assigned[pos] = usize::MAX;
    }
    go(g, 0, &mut assigned, &mut used, &mut out);
    Some(out)
}

// ===== quotient maps ============================================================

/// A surjection onto a smaller graph under which pebbling moves project to
/// moves (or stay inside one fibre): `{h1, h2}` is a target edge exactly when
/// some source edge maps onto it.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    source: Arc<PebbleGraph>,
    target: Arc<PebbleGraph>,
    assignment: Vec<usize>,
}

impl QuotientMap {
    pub fn new(
        source: PebbleGraph,
        target: PebbleGraph,
        assignment: Vec<usize>,
    ) -> Result<QuotientMap> {
        let q = QuotientMap {
            source: Arc::new(source),
            target: Arc::new(target),
            assignment,
        };
        q.verify()?;
        Ok(q)
    }

    pub fn source(&self) -> &PebbleGraph {
        &self.source
    }

    pub fn target(&self) -> &PebbleGraph {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn image_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    fn verify(&self) -> Result<()> {
        if self.assignment.len() != self.source.n_vertices() {
            return Err(Error::InvalidQuotient("assignment length mismatch".into()));
        }
        let mut hit = vec![false; self.target.n_vertices()];
        for &t in &self.assignment {
            if t >= self.target.n_vertices() {
                return Err(Error::InvalidQuotient("assignment out of range".into()));
            }
            hit[t] = true;
        }
        if !hit.iter().all(|&x| x) {
            return Err(Error::InvalidQuotient("assignment not surjective".into()));
        }
        let mut image: HashSet<(usize, usize)> = HashSet::new();
        for &(u, v) in self.source.edges() {
            let (a, b) = (self.assignment[u], self.assignment[v]);
            if a != b {
                image.insert((a.min(b), a.max(b)));
            }
        }
        let target_edges: HashSet<(usize, usize)> =
            self.target.edges().iter().copied().collect();
        if image != target_edges {
            return Err(Error::InvalidQuotient(
                "image of source edges differs from target edge set".into(),
            ));
        }
        Ok(())
    }

    /// Pushes a distribution forward: fibre sums.
    pub fn collapse(&self, dist: &Distribution) -> Result<Distribution> {
        if dist.len() != self.source.n_vertices() {
            return Err(Error::GraphMismatch(format!(
                "distribution has {} entries, source graph has {} vertices",
                dist.len(),
                self.source.n_vertices()
            )));
        }
        let mut counts = vec![0u32; self.target.n_vertices()];
        for (v, c) in dist.iter_counts() {
            counts[self.assignment[v]] += c;
        }
        Ok(Distribution::from_counts(counts))
    }

    /// Collapses each slash to one path vertex.
    pub fn slash_to_path(g: &PebbleGraph) -> Result<QuotientMap> {
        let target = build_path(g.n_slashes())?;
        let assignment = (0..g.n_vertices()).map(|v| (g.slash_of(v) - 1) as usize).collect();
        QuotientMap::new(g.clone(), target, assignment)
    }

    /// Folds the first negative diagonal of a 7-wide staircase onto the
    /// third, producing the 6-wide staircase of the same length.
    pub fn merge_first_and_third_diagonals(g: &PebbleGraph) -> Result<QuotientMap> {
        let spec = g.provenance().ok_or_else(|| {
            Error::InvalidQuotient("diagonal merge needs a staircase".into())
        })?;
        if spec.width != 7 {
            return Err(Error::InvalidQuotient(format!(
                "diagonal merge is defined for width 7, got {}",
                spec.width
            )));
        }
        // Reflect across the second negative diagonal: diagonal 1 lands on 3.
        let fold = |c: GridCoord| {
            if c.neg_diag() <= 2 {
                GridCoord::new(2 - c.y, 2 - c.x)
            } else {
                c
            }
        };
        let image_coords: Vec<GridCoord> = {
            let mut set: Vec<GridCoord> = g.coords().iter().map(|&c| fold(c)).collect();
            set.sort_by_key(|c| (c.pos_diag(), c.x));
            set.dedup();
            set
        };
        let image = PebbleGraph::from_coords(image_coords, None, None)?;
        let target_spec = StaircaseSpec::new(6, spec.length, Variant::Plain);
        let target = build_staircase(target_spec)?;
        let (_, relabel) = affine_set_maps(&image, &target).into_iter().next().ok_or_else(
            || Error::InvalidQuotient("folded staircase failed to align with its 6-wide form".into()),
        )?;
        let assignment = g
            .coords()
            .iter()
            .map(|&c| relabel[image.index_of(fold(c)).expect("fold image vertex")])
            .collect();
        QuotientMap::new(g.clone(), target, assignment)
    }
}

// ===== serialization ============================================================

#[derive(Serialize, Deserialize)]
struct GraphWire {
    spec: Option<StaircaseSpec>,
    vertices: Vec<(i32, i32)>,
    edges: Vec<(usize, usize)>,
}

impl Serialize for PebbleGraph {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        GraphWire {
            spec: self.spec,
            vertices: self.vertices.iter().map(|c| (c.x, c.y)).collect(),
            edges: self.edges.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PebbleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = GraphWire::deserialize(de)?;
        let coords: Vec<GridCoord> =
            wire.vertices.iter().map(|&(x, y)| GridCoord::new(x, y)).collect();
        let g = if let Some(spec) = wire.spec {
            let built = build_staircase(spec).map_err(DeError::custom)?;
            if built.coords() != coords.as_slice() {
                return Err(DeError::custom(
                    "vertex list does not match the declared staircase spec",
                ));
            }
            built
        } else {
            PebbleGraph::from_coords(coords, None, None).map_err(DeError::custom)?
        };
        let mut declared = wire.edges;
        declared.sort_unstable();
        if declared != g.edges {
            return Err(DeError::custom(
                "edge list does not match grid adjacency of the vertex set",
            ));
        }
        Ok(g)
    }
}

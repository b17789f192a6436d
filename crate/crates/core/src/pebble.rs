//! Pebbling distributions, moves and the exact reachability engine.
//!
//! A pebbling move removes two pebbles from a vertex and places one on a
//! neighbour. A distribution is *k-reachable* for a target when some move
//! sequence leaves at least `k` pebbles there, and *k-solvable* when every
//! vertex is k-reachable.
//!
//! Reachability is decided by depth-first search over distributions with
//! three sound cuts:
//!
//! * a weight bound `W_T(P) = sum of P(v) / 2^d(v,T)` that never increases
//!   under moves, checked incrementally in scaled integer arithmetic;
//! * memoization of exhausted (failed) distributions;
//! * a linear-time sufficient check that routes pebbles greedily along a
//!   BFS forest towards the target and succeeds early when that alone
//!   concentrates `k` pebbles.

use std::collections::HashSet;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::grid::{PebbleGraph, DIST_UNREACHABLE};
use crate::{Error, Result};

/// One pebbling move: two pebbles leave `from`, one arrives at `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Move {
    pub from: usize,
    pub to: usize,
}

impl From<(usize, usize)> for Move {
    fn from((from, to): (usize, usize)) -> Self {
        Move { from, to }
    }
}

impl From<Move> for (usize, usize) {
    fn from(mv: Move) -> Self {
        (mv.from, mv.to)
    }
}

impl std::fmt::Display for Move {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// Pebble counts indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution {
    counts: Vec<u32>,
}

impl Distribution {
    pub fn zeros(n: usize) -> Self {
        Distribution { counts: vec![0; n] }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Distribution { counts }
    }

    /// Builds from sparse `(vertex, count)` pairs; duplicate vertices sum.
    pub fn from_pairs(n: usize, pairs: &[(usize, u32)]) -> Result<Self> {
        let mut counts = vec![0u32; n];
        for &(v, c) in pairs {
            if v >= n {
                return Err(Error::GraphMismatch(format!(
                    "pebble on vertex {v}, but the graph has {n} vertices"
                )));
            }
            counts[v] += c;
        }
        Ok(Distribution { counts })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn count(&self, v: usize) -> u32 {
        self.counts[v]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Total number of pebbles.
    pub fn size(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn set_count(&mut self, v: usize, c: u32) {
        self.counts[v] = c;
    }

    pub fn add(&mut self, v: usize, delta: u32) {
        self.counts[v] += delta;
    }

    /// Vertices holding at least one pebble.
    pub fn support(&self) -> Vec<usize> {
        self.iter_counts().map(|(v, _)| v).collect()
    }

    /// Nonzero `(vertex, count)` entries in vertex order.
    pub fn iter_counts(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(v, &c)| (v, c))
    }

    /// Sparse pairs form, the shape used on the wire.
    pub fn pairs(&self) -> Vec<(usize, u32)> {
        self.iter_counts().collect()
    }

    /// Applies one move, returning the new distribution.
    pub fn apply_move(&self, g: &PebbleGraph, mv: Move) -> Result<Distribution> {
        let mut next = self.clone();
        next.apply_move_in_place(g, mv)?;
        Ok(next)
    }

    pub fn apply_move_in_place(&mut self, g: &PebbleGraph, mv: Move) -> Result<()> {
        if self.counts.len() != g.n_vertices() {
            return Err(Error::GraphMismatch(format!(
                "distribution has {} entries, graph has {} vertices",
                self.counts.len(),
                g.n_vertices()
            )));
        }
        if mv.from >= self.counts.len() || mv.to >= self.counts.len() {
            return Err(Error::IllegalMove(format!("move {mv} out of range")));
        }
        if !g.has_edge(mv.from, mv.to) {
            return Err(Error::IllegalMove(format!("move {mv} is not along an edge")));
        }
        if self.counts[mv.from] < 2 {
            return Err(Error::IllegalMove(format!(
                "move {mv} needs 2 pebbles at {}, found {}",
                mv.from, self.counts[mv.from]
            )));
        }
        self.counts[mv.from] -= 2;
        self.counts[mv.to] += 1;
        Ok(())
    }
}

/// Replays a move sequence from a starting distribution, validating each move.
pub fn replay(g: &PebbleGraph, start: &Distribution, moves: &[Move]) -> Result<Distribution> {
    let mut cur = start.clone();
    for &mv in moves {
        cur.apply_move_in_place(g, mv)?;
    }
    Ok(cur)
}

/// Exact weight of a distribution against a target set:
/// `sum of P(v) / 2^d(v, T)` with `d` the hop distance to the nearest target.
/// Vertices in other components contribute nothing. The weight never
/// increases under pebbling moves, so `W_T(P) < k` refutes k-reachability.
pub fn weight_bound(g: &PebbleGraph, dist: &Distribution, targets: &[usize]) -> BigRational {
    let mut total = BigRational::zero();
    for (v, c) in dist.iter_counts() {
        let d = targets
            .iter()
            .filter_map(|&t| g.distance(v, t))
            .min();
        if let Some(d) = d {
            let denom = BigInt::one() << d as usize;
            total += BigRational::new(BigInt::from(c), denom);
        }
    }
    total
}

/// Three-valued answer from a budgeted search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Yes,
    No,
    Unknown,
}

impl Outcome {
    pub fn is_yes(self) -> bool {
        self == Outcome::Yes
    }
}

// Scaled weights must leave 8 bits of headroom for 255 pebbles.
const MAX_SHIFT: u32 = 54;
const MAX_PEBBLES: u32 = 255;

enum DfsResult {
    Found,
    Exhausted,
    OutOfBudget,
}

/// Exact reachability search for one target set.
struct ReachEngine<'g> {
    g: &'g PebbleGraph,
    k: u32,
    targets: Vec<usize>,
    /// Scaled weight per pebble: `2^(shift - d)` for target distance `d`,
    /// 0 off-component.
    wrow: Vec<u64>,
    k_scaled: u64,
    /// Moves with the target's component, ordered goal-first.
    moves: Vec<Move>,
    /// BFS-forest parent towards the targets; usize::MAX at roots.
    parent: Vec<usize>,
    /// Non-root component vertices in decreasing target distance.
    tree_order: Vec<usize>,
    failed: HashSet<Vec<u8>>,
    node_budget: Option<u64>,
    nodes: u64,
    stack: Vec<Move>,
    witness: Option<Vec<Move>>,
}

impl<'g> ReachEngine<'g> {
    fn new(g: &'g PebbleGraph, targets: &[usize], k: u32) -> Result<Self> {
        let n = g.n_vertices();
        let mut targets: Vec<usize> = targets.to_vec();
        targets.sort_unstable();
        targets.dedup();
        for &t in &targets {
            if t >= n {
                return Err(Error::GraphMismatch(format!(
                    "target {t} out of range for a graph on {n} vertices"
                )));
            }
        }
        let mut tdist = vec![DIST_UNREACHABLE; n];
        for v in 0..n {
            for &t in &targets {
                tdist[v] = tdist[v].min(g.raw_distances(t)[v]);
            }
        }
        let shift = tdist
            .iter()
            .filter(|&&d| d != DIST_UNREACHABLE)
            .map(|&d| d as u32)
            .max()
            .unwrap_or(0);
        if shift > MAX_SHIFT {
            return Err(Error::EngineLimit(format!(
                "target distance {shift} exceeds the scaled-weight limit {MAX_SHIFT}"
            )));
        }
        let wrow: Vec<u64> = tdist
            .iter()
            .map(|&d| {
                if d == DIST_UNREACHABLE {
                    0
                } else {
                    1u64 << (shift - d as u32)
                }
            })
            .collect();
        let mut moves = Vec::new();
        for v in 0..n {
            for &w in g.neighbors(v) {
                if tdist[w] != DIST_UNREACHABLE {
                    moves.push(Move { from: v, to: w });
                }
            }
        }
        // Goal-first: prefer moves that land nearest the targets.
        moves.sort_by_key(|mv| (tdist[mv.to], mv.from, mv.to));
        let mut parent = vec![usize::MAX; n];
        let mut tree_order: Vec<usize> = Vec::new();
        for v in 0..n {
            if tdist[v] != DIST_UNREACHABLE && tdist[v] > 0 {
                parent[v] = g
                    .neighbors(v)
                    .iter()
                    .copied()
                    .find(|&w| tdist[w] + 1 == tdist[v])
                    .expect("positive target distance implies a closer neighbour");
                tree_order.push(v);
            }
        }
        tree_order.sort_by_key(|&v| std::cmp::Reverse(tdist[v]));
        Ok(ReachEngine {
            g,
            k,
            targets,
            wrow,
            k_scaled: (k as u64) << shift,
            moves,
            parent,
            tree_order,
            failed: HashSet::new(),
            node_budget: None,
            nodes: 0,
            stack: Vec::new(),
            witness: None,
        })
    }

    fn counts_u8(&self, dist: &Distribution) -> Result<Vec<u8>> {
        if dist.len() != self.g.n_vertices() {
            return Err(Error::GraphMismatch(format!(
                "distribution has {} entries, graph has {} vertices",
                dist.len(),
                self.g.n_vertices()
            )));
        }
        if dist.size() > MAX_PEBBLES {
            return Err(Error::EngineLimit(format!(
                "engine handles at most {MAX_PEBBLES} pebbles, got {}",
                dist.size()
            )));
        }
        Ok(dist.counts().iter().map(|&c| c as u8).collect())
    }

    fn run(&mut self, dist: &Distribution, want_witness: bool) -> Result<Outcome> {
        if self.k == 0 {
            self.witness = Some(Vec::new());
            return Ok(Outcome::Yes);
        }
        if self.k > dist.size() {
            return Ok(Outcome::No);
        }
        let mut counts = self.counts_u8(dist)?;
        let weight: u64 = counts
            .iter()
            .zip(&self.wrow)
            .map(|(&c, &w)| c as u64 * w)
            .sum();
        self.stack.clear();
        self.witness = None;
        match self.dfs(&mut counts, weight, want_witness) {
            DfsResult::Found => Ok(Outcome::Yes),
            DfsResult::Exhausted => Ok(Outcome::No),
            DfsResult::OutOfBudget => Ok(Outcome::Unknown),
        }
    }

    fn on_targets(&self, counts: &[u8]) -> u32 {
        self.targets.iter().map(|&t| counts[t] as u32).sum()
    }

    /// Greedy routing along the BFS forest: each vertex forwards half of
    /// what it accumulates. Reaching `k` this way proves reachability;
    /// falling short proves nothing.
    fn tree_estimate(&self, counts: &[u8]) -> u32 {
        let mut avail: Vec<u32> = counts.iter().map(|&c| c as u32).collect();
        for &v in &self.tree_order {
            let sent = avail[v] / 2;
            avail[self.parent[v]] += sent;
        }
        self.targets.iter().map(|&t| avail[t]).sum()
    }

    /// Emits the greedy routing as explicit moves (farthest vertices first).
    fn tree_witness(&self, counts: &[u8]) -> Vec<Move> {
        let mut avail: Vec<u32> = counts.iter().map(|&c| c as u32).collect();
        let mut moves = self.stack.clone();
        for &v in &self.tree_order {
            let sent = avail[v] / 2;
            avail[self.parent[v]] += sent;
            for _ in 0..sent {
                moves.push(Move { from: v, to: self.parent[v] });
            }
        }
        moves
    }

    fn dfs(&mut self, counts: &mut Vec<u8>, weight: u64, want_witness: bool) -> DfsResult {
        self.nodes += 1;
        if let Some(budget) = self.node_budget {
            if self.nodes > budget {
                return DfsResult::OutOfBudget;
            }
        }
        if self.on_targets(counts) >= self.k {
            if want_witness {
                self.witness = Some(self.stack.clone());
            }
            return DfsResult::Found;
        }
        if weight < self.k_scaled {
            return DfsResult::Exhausted;
        }
        if self.tree_estimate(counts) >= self.k {
            if want_witness {
                self.witness = Some(self.tree_witness(counts));
            }
            return DfsResult::Found;
        }
        if self.failed.contains(counts.as_slice()) {
            return DfsResult::Exhausted;
        }
        for i in 0..self.moves.len() {
            let mv = self.moves[i];
            if counts[mv.from] < 2 {
                continue;
            }
            counts[mv.from] -= 2;
            counts[mv.to] += 1;
            self.stack.push(mv);
            let child_weight = weight - 2 * self.wrow[mv.from] + self.wrow[mv.to];
            let res = self.dfs(counts, child_weight, want_witness);
            self.stack.pop();
            counts[mv.from] += 2;
            counts[mv.to] -= 1;
            match res {
                DfsResult::Exhausted => {}
                other => return other,
            }
        }
        self.failed.insert(counts.clone());
        DfsResult::Exhausted
    }
}

/// Can `k` pebbles be concentrated on `target`?
pub fn is_k_reachable(g: &PebbleGraph, dist: &Distribution, target: usize, k: u32) -> Result<bool> {
    let mut engine = ReachEngine::new(g, &[target], k)?;
    Ok(engine.run(dist, false)?.is_yes())
}

/// Can `k` pebbles in total be placed on the target set simultaneously?
pub fn is_k_set_reachable(
    g: &PebbleGraph,
    dist: &Distribution,
    targets: &[usize],
    k: u32,
) -> Result<bool> {
    let mut engine = ReachEngine::new(g, targets, k)?;
    Ok(engine.run(dist, false)?.is_yes())
}

/// Like [`is_k_reachable`], returning a verified move sequence on success.
pub fn reach_witness(
    g: &PebbleGraph,
    dist: &Distribution,
    target: usize,
    k: u32,
) -> Result<Option<Vec<Move>>> {
    let mut engine = ReachEngine::new(g, &[target], k)?;
    if !engine.run(dist, true)?.is_yes() {
        return Ok(None);
    }
    let moves = engine.witness.take().expect("witness recorded on success");
    let end = replay(g, dist, &moves)?;
    if end.count(target) < k {
        return Err(Error::VerificationFailed(format!(
            "extracted witness leaves {} pebbles on vertex {target}, wanted {k}",
            end.count(target)
        )));
    }
    Ok(Some(moves))
}

/// Reachability under a node budget; `Unknown` when the budget runs out.
pub fn reach_outcome_budgeted(
    g: &PebbleGraph,
    dist: &Distribution,
    target: usize,
    k: u32,
    node_budget: u64,
) -> Result<Outcome> {
    let mut engine = ReachEngine::new(g, &[target], k)?;
    engine.node_budget = Some(node_budget);
    engine.run(dist, false)
}

/// Is every vertex k-reachable?
pub fn is_k_solvable(g: &PebbleGraph, dist: &Distribution, k: u32) -> Result<bool> {
    Ok(first_unsolvable_vertex(g, dist, k)?.is_none())
}

/// First vertex (in a fail-fast order) that is not k-reachable, if any.
///
/// Vertices are tried in increasing weight order, so hopeless targets are
/// found before expensive near-misses are explored.
pub fn first_unsolvable_vertex(
    g: &PebbleGraph,
    dist: &Distribution,
    k: u32,
) -> Result<Option<usize>> {
    let mut order: Vec<usize> = (0..g.n_vertices()).collect();
    let keys: Vec<BigRational> = order
        .iter()
        .map(|&v| weight_bound(g, dist, &[v]))
        .collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    for v in order {
        if !is_k_reachable(g, dist, v, k)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Slashes whose vertex set is k-reachable (pooled over the slash).
pub fn k_reachable_slashes(g: &PebbleGraph, dist: &Distribution, k: u32) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for s in 1..=g.n_slashes() {
        if is_k_set_reachable(g, dist, g.slash_vertices(s), k)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// The slashes onto which two pebbles can be gathered.
pub fn two_reachable_slashes(g: &PebbleGraph, dist: &Distribution) -> Result<Vec<u32>> {
    k_reachable_slashes(g, dist, 2)
}

// ===== cuts between consecutive slashes ========================================

/// Vertices incident to the cut between slash `c` and slash `c + 1`:
/// endpoints of edges that cross it.
pub fn cut_incident_vertices(g: &PebbleGraph, cut_after_slash: u32) -> Result<Vec<usize>> {
    let c = cut_after_slash;
    if c == 0 || c >= g.n_slashes() {
        return Err(Error::InvalidSpec(format!(
            "cut after slash {c} out of range (graph has {} slashes)",
            g.n_slashes()
        )));
    }
    let mut out: Vec<usize> = g
        .edges()
        .iter()
        .filter(|&&(u, v)| {
            let (a, b) = (g.slash_of(u).min(g.slash_of(v)), g.slash_of(u).max(g.slash_of(v)));
            (a, b) == (c, c + 1)
        })
        .flat_map(|&(u, v)| [u, v])
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Could any legal move sequence ever send a pebble across the cut?
///
/// A crossing move needs two pebbles on a cut-incident vertex, so the cut is
/// quiet exactly when no such vertex is 2-reachable.
pub fn crossing_move_possible(
    g: &PebbleGraph,
    dist: &Distribution,
    cut_after_slash: u32,
) -> Result<bool> {
    for v in cut_incident_vertices(g, cut_after_slash)? {
        if is_k_reachable(g, dist, v, 2)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Crossing possibility on both sides of an inner slash: `(left, right)` for
/// the cuts before and after it.
pub fn crossing_moves_at_slash(
    g: &PebbleGraph,
    dist: &Distribution,
    slash: u32,
) -> Result<(bool, bool)> {
    if slash <= 1 || slash >= g.n_slashes() {
        return Err(Error::InvalidSpec(format!(
            "slash {slash} is not inner (graph has {} slashes)",
            g.n_slashes()
        )));
    }
    Ok((
        crossing_move_possible(g, dist, slash - 1)?,
        crossing_move_possible(g, dist, slash)?,
    ))
}

/// Cuts that no pebble can ever cross under the given distribution.
pub fn quiet_cuts(g: &PebbleGraph, dist: &Distribution) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for c in 1..g.n_slashes() {
        if !crossing_move_possible(g, dist, c)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// One side of a cut, relabelled to a canonical staircase where possible.
#[derive(Clone, Debug)]
pub struct SplitPart {
    pub graph: PebbleGraph,
    pub dist: Distribution,
    /// `original_vertices[i]` is the source-graph index of part vertex `i`.
    pub original_vertices: Vec<usize>,
}

/// Splits a staircase and its distribution at the cut after slash `c`.
///
/// Both sides come back as canonical staircases (the left side keeps the
/// source variant; the right side's variant is read off its first slash),
/// with pebbles carried along.
pub fn split_at_cut(
    g: &PebbleGraph,
    dist: &Distribution,
    cut_after_slash: u32,
) -> Result<(SplitPart, SplitPart)> {
    let c = cut_after_slash;
    if c == 0 || c >= g.n_slashes() {
        return Err(Error::InvalidSpec(format!(
            "cut after slash {c} out of range (graph has {} slashes)",
            g.n_slashes()
        )));
    }
    if dist.len() != g.n_vertices() {
        return Err(Error::GraphMismatch("distribution does not fit the graph".into()));
    }
    let left = extract_part(g, dist, 1, c)?;
    let right = extract_part(g, dist, c + 1, g.n_slashes())?;
    for (side, part) in [("left", &left), ("right", &right)] {
        if !is_k_solvable(&part.graph, &part.dist, 1)? {
            return Err(Error::VerificationFailed(format!(
                "{side} part of the split after slash {c} is not solvable on its own"
            )));
        }
    }
    Ok((left, right))
}

/// Induced subgraph on a slash range, with the distribution restricted to it.
pub(crate) fn extract_part(
    g: &PebbleGraph,
    dist: &Distribution,
    s_lo: u32,
    s_hi: u32,
) -> Result<SplitPart> {
    let originals: Vec<usize> = (0..g.n_vertices())
        .filter(|&v| (s_lo..=s_hi).contains(&g.slash_of(v)))
        .collect();
    let coords: Vec<_> = originals.iter().map(|&v| g.coord(v)).collect();
    let raw = PebbleGraph::from_coords(coords, None, None)?;
    // Raw construction re-sorts by (slash, x); recover the original index of
    // each part vertex through its coordinate.
    let originals_sorted: Vec<usize> = raw
        .coords()
        .iter()
        .map(|&c| originals.iter().copied().find(|&v| g.coord(v) == c).unwrap())
        .collect();
    let (graph, original_vertices) = match g.provenance() {
        Some(spec) => {
            let length = s_hi - s_lo + 1;
            let relabelled = [crate::grid::Variant::Plain, crate::grid::Variant::Prime]
                .into_iter()
                .map(|var| crate::grid::StaircaseSpec::new(spec.width, length, var))
                .find_map(|cand| {
                    let target = crate::grid::build_staircase(cand).ok()?;
                    let bijection = crate::grid::align(&raw, &target)?;
                    Some((target, bijection))
                });
            match relabelled {
                Some((target, bijection)) => {
                    // original_vertices in target order.
                    let mut orig = vec![usize::MAX; target.n_vertices()];
                    for (raw_i, &tgt_i) in bijection.iter().enumerate() {
                        orig[tgt_i] = originals_sorted[raw_i];
                    }
                    (target, orig)
                }
                None => (raw, originals_sorted),
            }
        }
        None => (raw, originals_sorted),
    };
    let counts = original_vertices.iter().map(|&v| dist.count(v)).collect();
    Ok(SplitPart {
        graph,
        dist: Distribution::from_counts(counts),
        original_vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_path, build_staircase, StaircaseSpec};

    fn path_dist(counts: Vec<u32>) -> (PebbleGraph, Distribution) {
        let g = build_path(counts.len() as u32).unwrap();
        // Path vertices are already in end-to-end coordinate order.
        let order = g.path_order().unwrap();
        let mut d = Distribution::zeros(g.n_vertices());
        for (i, &c) in counts.iter().enumerate() {
            d.set_count(order[i], c);
        }
        (g, d)
    }

    #[test]
    fn moves_transfer_and_validate() {
        let (g, d) = path_dist(vec![2, 0, 0]);
        let order = g.path_order().unwrap();
        let mv = Move { from: order[0], to: order[1] };
        let next = d.apply_move(&g, mv).unwrap();
        assert_eq!(next.count(order[0]), 0);
        assert_eq!(next.count(order[1]), 1);
        // Not enough pebbles now.
        assert!(next.apply_move(&g, mv).is_err());
        // Not an edge.
        assert!(d.apply_move(&g, Move { from: order[0], to: order[2] }).is_err());
    }

    #[test]
    fn weight_is_exact_and_monotone() {
        let (g, d) = path_dist(vec![4, 0, 0]);
        let order = g.path_order().unwrap();
        let t = order[2];
        let w0 = weight_bound(&g, &d, &[t]);
        assert_eq!(w0, BigRational::new(1.into(), 1.into()));
        // A move towards the target preserves the weight exactly...
        let d1 = d.apply_move(&g, Move { from: order[0], to: order[1] }).unwrap();
        assert_eq!(weight_bound(&g, &d1, &[t]), w0);
        // ...and a move away from it loses weight.
        let (g, d) = path_dist(vec![0, 4, 0]);
        let order = g.path_order().unwrap();
        let t = order[2];
        let away = d.apply_move(&g, Move { from: order[1], to: order[0] }).unwrap();
        assert_eq!(weight_bound(&g, &d, &[t]), BigRational::new(2.into(), 1.into()));
        assert_eq!(weight_bound(&g, &away, &[t]), BigRational::new(5.into(), 4.into()));
    }

    #[test]
    fn four_pebbles_reach_across_two_edges() {
        let (g, d) = path_dist(vec![4, 0, 0]);
        let order = g.path_order().unwrap();
        assert!(is_k_reachable(&g, &d, order[2], 1).unwrap());
        assert!(!is_k_reachable(&g, &d, order[2], 2).unwrap());
        let (g, d) = path_dist(vec![3, 0, 0]);
        let order = g.path_order().unwrap();
        assert!(!is_k_reachable(&g, &d, order[2], 1).unwrap());
    }

    #[test]
    fn witnesses_replay_to_the_target() {
        let (g, d) = path_dist(vec![8, 0, 0, 0]);
        let order = g.path_order().unwrap();
        let target = order[3];
        let moves = reach_witness(&g, &d, target, 1).unwrap().unwrap();
        let end = replay(&g, &d, &moves).unwrap();
        assert!(end.count(target) >= 1);
        // One pebble short of the full-power requirement.
        let (g, d) = path_dist(vec![7, 0, 0, 0]);
        assert!(reach_witness(&g, &d, order[3], 1).unwrap().is_none());
    }

    #[test]
    fn zero_k_is_always_reachable() {
        let (g, d) = path_dist(vec![0, 0]);
        assert!(is_k_reachable(&g, &d, 0, 0).unwrap());
        assert_eq!(reach_witness(&g, &d, 0, 0).unwrap().unwrap().len(), 0);
    }

    #[test]
    fn set_reachability_pools_targets() {
        let (g, d) = path_dist(vec![2, 0, 2]);
        let order = g.path_order().unwrap();
        // Each end can send one pebble to the middle: 2 pebbles total.
        assert!(is_k_set_reachable(&g, &d, &[order[1]], 2).unwrap());
        // Both ends together already hold 4.
        assert!(is_k_set_reachable(&g, &d, &[order[0], order[2]], 4).unwrap());
        assert!(!is_k_set_reachable(&g, &d, &[order[1]], 3).unwrap());
    }

    #[test]
    fn solvability_reports_a_failing_vertex() {
        let (g, d) = path_dist(vec![2, 0, 0, 0]);
        let order = g.path_order().unwrap();
        assert!(!is_k_solvable(&g, &d, 1).unwrap());
        let bad = first_unsolvable_vertex(&g, &d, 1).unwrap().unwrap();
        assert_eq!(bad, order[3]);
        let (g, d) = path_dist(vec![2, 0, 2]);
        assert!(is_k_solvable(&g, &d, 1).unwrap());
    }

    #[test]
    fn star_center_solves_prime_three_by_three() {
        let g = build_staircase(StaircaseSpec::prime(3, 3)).unwrap();
        // The middle slash is a single vertex adjacent to all four others.
        let center = g.slash_vertices(2)[0];
        assert_eq!(g.degree(center), 4);
        let mut d = Distribution::zeros(g.n_vertices());
        d.set_count(center, 2);
        assert!(is_k_solvable(&g, &d, 1).unwrap());
        let mut d = Distribution::zeros(g.n_vertices());
        d.set_count(center, 1);
        assert!(!is_k_solvable(&g, &d, 1).unwrap());
    }

    #[test]
    fn disconnected_components_do_not_help() {
        let g = build_staircase(StaircaseSpec::prime(3, 1)).unwrap();
        assert_eq!(g.n_vertices(), 2); // isolated pair
        let mut d = Distribution::zeros(2);
        d.set_count(0, 4);
        assert!(!is_k_reachable(&g, &d, 1, 1).unwrap());
        assert!(is_k_reachable(&g, &d, 0, 4).unwrap());
    }

    #[test]
    fn budgeted_search_reports_unknown() {
        // Star: weight exactly meets the bound, the greedy routing falls
        // short, and the real answer needs expanding at least one move.
        let g = build_staircase(StaircaseSpec::prime(3, 3)).unwrap();
        let center = g.slash_vertices(2)[0];
        let leaves: Vec<usize> = (0..g.n_vertices()).filter(|&v| v != center).collect();
        let mut d = Distribution::zeros(g.n_vertices());
        d.set_count(leaves[0], 1);
        d.set_count(leaves[1], 1);
        d.set_count(leaves[2], 2);
        let target = leaves[3];
        let out = reach_outcome_budgeted(&g, &d, target, 1, 1).unwrap();
        assert_eq!(out, Outcome::Unknown);
        let out = reach_outcome_budgeted(&g, &d, target, 1, u64::MAX).unwrap();
        assert_eq!(out, Outcome::No);
    }

    #[test]
    fn quiet_cut_detection() {
        let g = build_staircase(StaircaseSpec::plain(3, 5)).unwrap();
        // All ones: no vertex ever gets two pebbles, so no move exists at all.
        let ones = Distribution::from_counts(vec![1; g.n_vertices()]);
        assert_eq!(quiet_cuts(&g, &ones).unwrap(), vec![1, 2, 3, 4]);
        // Four pebbles on the first slash can push two onto slash 2 and one
        // across the second cut, but never reach the far cuts.
        let first = g.slash_vertices(1)[0];
        let mut d = Distribution::zeros(g.n_vertices());
        d.set_count(first, 4);
        assert!(crossing_move_possible(&g, &d, 1).unwrap());
        assert!(crossing_move_possible(&g, &d, 2).unwrap());
        assert_eq!(quiet_cuts(&g, &d).unwrap(), vec![3, 4]);
    }

    #[test]
    fn split_carries_pebbles_and_specs() {
        let g = build_staircase(StaircaseSpec::plain(5, 5)).unwrap();
        let d = Distribution::from_counts((0..g.n_vertices() as u32).collect());
        let (left, right) = split_at_cut(&g, &d, 2).unwrap();
        assert_eq!(left.graph.provenance().unwrap().length, 2);
        assert_eq!(right.graph.provenance().unwrap().length, 3);
        assert_eq!(left.dist.size() + right.dist.size(), d.size());
        // Pebble counts survive the relabelling vertex by vertex.
        for (i, &orig) in left.original_vertices.iter().enumerate() {
            assert_eq!(left.dist.count(i), d.count(orig));
        }
        for (i, &orig) in right.original_vertices.iter().enumerate() {
            assert_eq!(right.dist.count(i), d.count(orig));
        }
    }
}

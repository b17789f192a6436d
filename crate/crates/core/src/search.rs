//! Exhaustive search for k-optimal pebbling numbers.
//!
//! The k-optimal pebbling number of a graph is the smallest size of a
//! distribution from which every vertex is k-reachable. The search scans
//! distribution sizes upward; for each size it enumerates all multisets of
//! vertices in colexicographic rank order and tests solvability, so a hit at
//! size `t` comes with a full refutation of every smaller size.
//!
//! The scan over one size is embarrassingly parallel and organized in fixed
//! batches of fixed blocks of ranks. Batches complete atomically, which makes
//! witnesses, counters and checkpoints independent of the thread count.
//! Candidates are filtered before the exact engine runs: only the
//! lexicographically least distribution of each symmetry orbit is tested, and
//! a per-vertex weight screen discards distributions that provably cannot
//! cover some vertex.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::{affine_automorphisms, exhaustive_automorphisms, GraphId, PebbleGraph};
use crate::pebble::{is_k_solvable, Distribution};
use crate::{Error, Result};

// ===== multiset enumeration ====================================================

/// Binomial coefficients as a Pascal table, `table[n][k] = C(n, k)`.
struct Binomials {
    rows: Vec<Vec<u128>>,
}

impl Binomials {
    fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        Binomials { rows }
    }

    fn c(&self, n: usize, k: usize) -> u128 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }
}

/// Size-`t` multisets over `n` vertices, totally ordered by colex rank.
///
/// A multiset `v_1 <= ... <= v_t` corresponds to the strictly increasing
/// sequence `u_i = v_i + i` (0-based), and its rank is the sum of
/// `C(u_i, i + 1)`.
pub(crate) struct MultisetSpace {
    n: usize,
    t: usize,
    total: u64,
    binom: Binomials,
}

impl MultisetSpace {
    pub(crate) fn new(n: usize, t: usize) -> Result<Self> {
        let binom = Binomials::new(n + t);
        let total = binom.c(n + t - 1, t);
        let total = u64::try_from(total).map_err(|_| {
            Error::EngineLimit(format!(
                "search space of {t}-pebble distributions on {n} vertices overflows"
            ))
        })?;
        Ok(MultisetSpace { n, t, total, binom })
    }

    pub(crate) fn total(&self) -> u64 {
        self.total
    }

    /// Strictly increasing representative of the multiset at `rank`.
    pub(crate) fn unrank(&self, rank: u64) -> Vec<u32> {
        debug_assert!(rank < self.total);
        let mut rem = rank as u128;
        let mut combo = vec![0u32; self.t];
        let mut hi = self.n + self.t - 1;
        for i in (0..self.t).rev() {
            // Largest u with C(u, i + 1) <= rem.
            let mut u = hi;
            while self.binom.c(u, i + 1) > rem {
                u -= 1;
            }
            combo[i] = u as u32;
            rem -= self.binom.c(u, i + 1);
            hi = u;
        }
        combo
    }

    /// Advances to the next combination in colex order.
    pub(crate) fn advance(&self, combo: &mut [u32]) {
        let t = combo.len();
        for i in 0..t {
            let ceiling = if i + 1 < t { combo[i + 1] } else { (self.n + self.t - 1) as u32 };
            if combo[i] + 1 < ceiling {
                combo[i] += 1;
                for (j, slot) in combo.iter_mut().enumerate().take(i) {
                    *slot = j as u32;
                }
                return;
            }
        }
    }

    /// Pebble counts of the multiset at a combination.
    pub(crate) fn counts(&self, combo: &[u32], out: &mut [u8]) {
        out.fill(0);
        for (i, &u) in combo.iter().enumerate() {
            out[(u as usize) - i] += 1;
        }
    }
}

// ===== symmetry ================================================================

/// Automorphisms of the graph: lattice reflections plus, on small graphs, an
/// exhaustive search; closed under composition (capped) and deduplicated.
/// The identity is not included.
pub fn automorphism_group(g: &PebbleGraph) -> Vec<Vec<usize>> {
    const EXHAUSTIVE_CAP: usize = 16;
    const CLOSURE_CAP: usize = 512;
    let mut perms: Vec<Vec<usize>> = affine_automorphisms(g);
    if let Some(all) = exhaustive_automorphisms(g, EXHAUSTIVE_CAP) {
        perms.extend(all);
    }
    let identity: Vec<usize> = (0..g.n_vertices()).collect();
    perms.retain(|p| *p != identity);
    perms.sort();
    perms.dedup();
    // Close under composition; any subset of the automorphism group keeps the
    // orbit filter sound, so hitting the cap only costs pruning power.
    let mut closed = perms.clone();
    let mut frontier = perms.clone();
    while !frontier.is_empty() && closed.len() < CLOSURE_CAP {
        let mut next = Vec::new();
        for a in &frontier {
            for b in &perms {
                let composed: Vec<usize> = (0..a.len()).map(|v| b[a[v]]).collect();
                if composed != identity
                    && !closed.contains(&composed)
                    && !next.contains(&composed)
                {
                    next.push(composed);
                }
            }
        }
        closed.extend(next.iter().cloned());
        frontier = next;
    }
    closed.sort();
    closed
}

/// True when `counts` is the lex-least distribution in its orbit under the
/// given permutations.
fn orbit_minimal(counts: &[u8], perms: &[Vec<usize>], scratch: &mut [u8]) -> bool {
    for p in perms {
        scratch.fill(0);
        for (v, &c) in counts.iter().enumerate() {
            scratch[p[v]] = c;
        }
        if *scratch < *counts {
            return false;
        }
    }
    true
}

// ===== weight prescreen ========================================================

/// Scaled weight row for one target: a distribution can cover the target
/// only if the dot product with `w` reaches `need`.
struct ScreenRow {
    target: usize,
    need: u64,
    w: Vec<u64>,
}

fn build_screen(g: &PebbleGraph, k: u32) -> Vec<ScreenRow> {
    const MAX_SHIFT: u32 = 54;
    let n = g.n_vertices();
    let mut rows: Vec<ScreenRow> = Vec::with_capacity(n);
    for target in 0..n {
        let dists = g.raw_distances(target);
        let shift = dists
            .iter()
            .filter(|&&d| d != crate::grid::DIST_UNREACHABLE)
            .map(|&d| d as u32)
            .max()
            .unwrap_or(0);
        if shift > MAX_SHIFT {
            continue; // screen is optional; skip pathological targets
        }
        let w = dists
            .iter()
            .map(|&d| {
                if d == crate::grid::DIST_UNREACHABLE {
                    0
                } else {
                    1u64 << (shift - d as u32)
                }
            })
            .collect();
        rows.push(ScreenRow { target, need: (k as u64) << shift, w });
    }
    // Hard-to-cover targets first: check eccentric vertices before central ones.
    let ecc = |t: usize| {
        g.raw_distances(t)
            .iter()
            .filter(|&&d| d != crate::grid::DIST_UNREACHABLE)
            .max()
            .copied()
            .unwrap_or(0)
    };
    rows.sort_by_key(|r| std::cmp::Reverse((ecc(r.target), r.target)));
    rows
}

/// True when the weight screen cannot rule the candidate out.
fn passes_screen(rows: &[ScreenRow], counts: &[u8]) -> bool {
    let support: Vec<(usize, u64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(v, &c)| (v, c as u64))
        .collect();
    rows.iter().all(|row| {
        let total: u64 = support.iter().map(|&(v, c)| c * row.w[v]).sum();
        total >= row.need
    })
}

// ===== search driver ===========================================================

/// Wall-clock, parallelism and checkpoint limits for a search.
#[derive(Clone, Debug, Default)]
pub struct BudgetConfig {
    /// Stop and report an interval after this much total work time.
    pub budget: Option<Duration>,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
    /// Persist and resume scan progress at this path.
    pub checkpoint: Option<PathBuf>,
}

/// Result of a size scan: an exact value or a partially refuted interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchValue {
    Exact(u32),
    Interval { lower: u32, upper: Option<u32> },
}

impl std::fmt::Display for SearchValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            SearchValue::Exact(v) => write!(f, "{v}"),
            SearchValue::Interval { lower, upper: Some(u) } => write!(f, "[{lower}, {u}]"),
            SearchValue::Interval { lower, upper: None } => write!(f, "[{lower}, ?]"),
        }
    }
}

impl SearchValue {
    pub fn exact(&self) -> Option<u32> {
        match *self {
            SearchValue::Exact(v) => Some(v),
            SearchValue::Interval { .. } => None,
        }
    }

    pub fn lower(&self) -> u32 {
        match *self {
            SearchValue::Exact(v) => v,
            SearchValue::Interval { lower, .. } => lower,
        }
    }
}

/// Everything a finished (or budget-stopped) search has to say.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub graph: GraphId,
    pub k: u32,
    pub value: SearchValue,
    /// Sparse `(vertex, count)` pairs of a minimum solvable distribution.
    pub witness: Option<Vec<(usize, u32)>>,
    /// True when every smaller size was fully refuted.
    pub exhaustive: bool,
    pub candidates_examined: u64,
    pub pruned_by_weight: u64,
    pub orbit_skipped: u64,
    #[serde(skip, default)]
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn witness_distribution(&self, g: &PebbleGraph) -> Result<Option<Distribution>> {
        match &self.witness {
            Some(pairs) => Ok(Some(Distribution::from_pairs(g.n_vertices(), pairs)?)),
            None => Ok(None),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    graph: GraphId,
    k: u32,
    t: u32,
    cursor: u64,
    examined: u64,
    pruned_weight: u64,
    orbit_skipped: u64,
    elapsed_ms: u64,
}

fn load_checkpoint(path: &PathBuf, graph: &GraphId, k: u32) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(path)?;
    let cp: Checkpoint = serde_json::from_str(&text)?;
    if cp.graph != *graph || cp.k != k {
        return Err(Error::Cache(format!(
            "checkpoint at {} belongs to a different search ({} k={})",
            path.display(),
            cp.graph,
            cp.k
        )));
    }
    Ok(Some(cp))
}

fn store_checkpoint(path: &PathBuf, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string_pretty(cp)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

const BLOCK_SIZE: u64 = 4096;
const BLOCKS_PER_BATCH: u64 = 64;

struct BlockResult {
    min_hit: Option<u64>,
    examined: u64,
    pruned_weight: u64,
    orbit_skipped: u64,
}

struct ScanCtx<'g> {
    g: &'g PebbleGraph,
    k: u32,
    space: MultisetSpace,
    perms: &'g [Vec<usize>],
    screen: &'g [ScreenRow],
}

impl ScanCtx<'_> {
    /// Scans ranks `[start, end)` completely.
    fn scan_block(&self, start: u64, end: u64) -> BlockResult {
        let n = self.g.n_vertices();
        let mut combo = self.space.unrank(start);
        let mut counts = vec![0u8; n];
        let mut scratch = vec![0u8; n];
        let mut res = BlockResult {
            min_hit: None,
            examined: end - start,
            pruned_weight: 0,
            orbit_skipped: 0,
        };
        for rank in start..end {
            self.space.counts(&combo, &mut counts);
            if !orbit_minimal(&counts, self.perms, &mut scratch) {
                res.orbit_skipped += 1;
            } else if !passes_screen(self.screen, &counts) {
                res.pruned_by_weight_inc();
            } else {
                let dist = Distribution::from_counts(counts.iter().map(|&c| c as u32).collect());
                if is_k_solvable(self.g, &dist, self.k).unwrap_or(false) && res.min_hit.is_none() {
                    res.min_hit = Some(rank);
                }
            }
            if rank + 1 < end {
                self.space.advance(&mut combo);
            }
        }
        res
    }
}

impl BlockResult {
    fn pruned_by_weight_inc(&mut self) {
        self.pruned_weight += 1;
    }
}

enum ScanOutcome {
    Found { rank: u64 },
    Refuted,
    OutOfBudget { cursor: u64 },
}

/// Computes the k-optimal pebbling number of `g` by exhaustive size scan.
///
/// Returns [`SearchValue::Exact`] with a witness when the scan completes and
/// [`SearchValue::Interval`] when the budget runs out (with a checkpoint
/// written if one was configured). Reports are byte-identical across thread
/// counts; only `elapsed` varies, and it is excluded from serialization.
pub fn optimal_pebbling_number(
    g: &PebbleGraph,
    k: u32,
    config: &BudgetConfig,
) -> Result<SearchReport> {
    let started = Instant::now();
    let graph_id = g.graph_id();
    if k == 0 {
        return Ok(SearchReport {
            graph: graph_id,
            k,
            value: SearchValue::Exact(0),
            witness: Some(Vec::new()),
            exhaustive: true,
            candidates_examined: 0,
            pruned_by_weight: 0,
            orbit_skipped: 0,
            elapsed: started.elapsed(),
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::EngineLimit(format!("thread pool: {e}")))?;
    let perms = automorphism_group(g);
    let screen = build_screen(g, k);

    let mut examined = 0u64;
    let mut pruned_weight = 0u64;
    let mut orbit_skipped = 0u64;
    let mut prior_elapsed = Duration::ZERO;
    let mut resume: Option<(u32, u64)> = None;
    if let Some(path) = &config.checkpoint {
        if let Some(cp) = load_checkpoint(path, &graph_id, k)? {
            examined = cp.examined;
            pruned_weight = cp.pruned_weight;
            orbit_skipped = cp.orbit_skipped;
            prior_elapsed = Duration::from_millis(cp.elapsed_ms);
            resume = Some((cp.t, cp.cursor));
        }
    }
    let deadline = config.budget.map(|b| {
        let remaining = b.saturating_sub(prior_elapsed);
        Instant::now() + remaining
    });
    let elapsed_total =
        |started: Instant| prior_elapsed + started.elapsed();

    let t_start = resume.map(|(t, _)| t).unwrap_or(k);
    // An all-k distribution is k-solvable, so the scan always terminates.
    let t_cap = k as u64 * g.n_vertices() as u64;
    let mut t = t_start;
    loop {
        let cursor0 = match resume.take() {
            Some((_, cur)) => cur,
            None => 0,
        };
        let ctx = ScanCtx {
            g,
            k,
            space: MultisetSpace::new(g.n_vertices(), t as usize)?,
            perms: &perms,
            screen: &screen,
        };
        let outcome = scan_size(
            &pool,
            &ctx,
            cursor0,
            deadline,
            &mut examined,
            &mut pruned_weight,
            &mut orbit_skipped,
        );
        match outcome {
            ScanOutcome::Found { rank } => {
                let combo = ctx.space.unrank(rank);
                let mut counts = vec![0u8; g.n_vertices()];
                ctx.space.counts(&combo, &mut counts);
                let dist = Distribution::from_counts(counts.iter().map(|&c| c as u32).collect());
                debug_assert!(is_k_solvable(g, &dist, k)?);
                if let Some(path) = &config.checkpoint {
                    // The search is over; a stale cursor would poison reruns.
                    let _ = std::fs::remove_file(path);
                }
                return Ok(SearchReport {
                    graph: graph_id,
                    k,
                    value: SearchValue::Exact(t),
                    witness: Some(dist.pairs()),
                    exhaustive: true,
                    candidates_examined: examined,
                    pruned_by_weight: pruned_weight,
                    orbit_skipped,
                    elapsed: elapsed_total(started),
                });
            }
            ScanOutcome::Refuted => {
                t += 1;
                if t as u64 > t_cap {
                    return Err(Error::VerificationFailed(format!(
                        "no solvable distribution up to size {t_cap} on {graph_id}; \
                         this contradicts the all-{k} distribution"
                    )));
                }
            }
            ScanOutcome::OutOfBudget { cursor } => {
                let elapsed = elapsed_total(started);
                if let Some(path) = &config.checkpoint {
                    store_checkpoint(
                        path,
                        &Checkpoint {
                            graph: graph_id.clone(),
                            k,
                            t,
                            cursor,
                            examined,
                            pruned_weight,
                            orbit_skipped,
                            elapsed_ms: elapsed.as_millis() as u64,
                        },
                    )?;
                }
                return Ok(SearchReport {
                    graph: graph_id,
                    k,
                    value: SearchValue::Interval { lower: t, upper: None },
                    witness: None,
                    exhaustive: false,
                    candidates_examined: examined,
                    pruned_by_weight: pruned_weight,
                    orbit_skipped,
                    elapsed,
                });
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn scan_size(
    pool: &rayon::ThreadPool,
    ctx: &ScanCtx,
    cursor0: u64,
    deadline: Option<Instant>,
    examined: &mut u64,
    pruned_weight: &mut u64,
    orbit_skipped: &mut u64,
) -> ScanOutcome {
    let total = ctx.space.total();
    let mut cursor = cursor0;
    while cursor < total {
        if let Some(d) = deadline {
            if Instant::now() >= d {
                return ScanOutcome::OutOfBudget { cursor };
            }
        }
        // One batch: a fixed number of fixed-size blocks, scanned fully, so
        // results do not depend on the thread count.
        let batch_end = (cursor + BLOCK_SIZE * BLOCKS_PER_BATCH).min(total);
        let blocks: Vec<(u64, u64)> = (0..)
            .map(|i| cursor + i * BLOCK_SIZE)
            .take_while(|&s| s < batch_end)
            .map(|s| (s, (s + BLOCK_SIZE).min(batch_end)))
            .collect();
        let results: Vec<BlockResult> =
            pool.install(|| blocks.par_iter().map(|&(s, e)| ctx.scan_block(s, e)).collect());
        let mut min_hit: Option<u64> = None;
        for r in &results {
            *examined += r.examined;
            *pruned_weight += r.pruned_weight;
            *orbit_skipped += r.orbit_skipped;
            min_hit = match (min_hit, r.min_hit) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
        if let Some(rank) = min_hit {
            return ScanOutcome::Found { rank };
        }
        cursor = batch_end;
    }
    ScanOutcome::Refuted
}

/// Smallest size of a k-solvable distribution together with *every* witness
/// of that size, by full enumeration (no symmetry reduction).
pub fn minimal_solvable_distributions(
    g: &PebbleGraph,
    k: u32,
) -> Result<(u32, Vec<Distribution>)> {
    if k == 0 {
        return Ok((0, vec![Distribution::zeros(g.n_vertices())]));
    }
    let screen = build_screen(g, k);
    let t_cap = k as u64 * g.n_vertices() as u64;
    let mut t = k;
    loop {
        let space = MultisetSpace::new(g.n_vertices(), t as usize)?;
        let mut combo = space.unrank(0);
        let mut counts = vec![0u8; g.n_vertices()];
        let mut found = Vec::new();
        for rank in 0..space.total() {
            space.counts(&combo, &mut counts);
            if passes_screen(&screen, &counts) {
                let dist = Distribution::from_counts(counts.iter().map(|&c| c as u32).collect());
                if is_k_solvable(g, &dist, k)? {
                    found.push(dist);
                }
            }
            if rank + 1 < space.total() {
                space.advance(&mut combo);
            }
        }
        if !found.is_empty() {
            return Ok((t, found));
        }
        t += 1;
        if t as u64 > t_cap {
            return Err(Error::VerificationFailed(
                "exceeded the all-k distribution size without a hit".into(),
            ));
        }
    }
}

// ===== structure of 2-solvable path distributions ==============================

/// Shape of one segment in a decomposed path distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    /// Ones with a single doubled vertex: `1^a 2 1^b`.
    Pair,
    /// Ones around an isolated pile of four: `1^a 0 4 0 1^b`.
    Pile,
}

/// One segment, as an inclusive range of path positions (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSegment {
    pub kind: SegmentKind,
    pub start: usize,
    pub end: usize,
}

/// Outcome of parsing a path distribution into segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionOutcome {
    Valid(Vec<PrimeSegment>),
    /// No parse; `frontier` is the furthest path position the parser reached.
    Invalid { frontier: usize },
}

/// Parses a distribution on a path into segments separated by single empty
/// vertices, where each segment is either `1^a 2 1^b` or `1^a 0 4 0 1^b`.
/// The grammar is unambiguous, so a greedy left-to-right parse suffices.
pub fn prime_segment_decomposition(
    g: &PebbleGraph,
    dist: &Distribution,
) -> Result<DecompositionOutcome> {
    let order = g
        .path_order()
        .ok_or_else(|| Error::InvalidSpec("segment decomposition needs a path".into()))?;
    if dist.len() != g.n_vertices() {
        return Err(Error::GraphMismatch("distribution does not fit the graph".into()));
    }
    let c: Vec<u32> = order.iter().map(|&v| dist.count(v)).collect();
    let n = c.len();
    let mut segments = Vec::new();
    let mut i = 0usize;
    let mut frontier = 0usize;
    loop {
        // One segment starting at i.
        let start = i;
        let mut p = i;
        while p < n && c[p] == 1 {
            p += 1;
        }
        frontier = frontier.max(p);
        let seg_end = if p < n && c[p] == 2 {
            let mut q = p + 1;
            while q < n && c[q] == 1 {
                q += 1;
            }
            frontier = frontier.max(q);
            segments.push(PrimeSegment { kind: SegmentKind::Pair, start, end: q - 1 });
            q
        } else if p + 2 < n && c[p] == 0 && c[p + 1] == 4 && c[p + 2] == 0 {
            let mut q = p + 3;
            while q < n && c[q] == 1 {
                q += 1;
            }
            frontier = frontier.max(q);
            segments.push(PrimeSegment { kind: SegmentKind::Pile, start, end: q - 1 });
            q
        } else {
            return Ok(DecompositionOutcome::Invalid { frontier: frontier.min(n - 1) });
        };
        if seg_end == n {
            return Ok(DecompositionOutcome::Valid(segments));
        }
        // Exactly one empty separator vertex between segments.
        if c[seg_end] != 0 || seg_end + 1 == n {
            return Ok(DecompositionOutcome::Invalid { frontier: seg_end.min(n - 1) });
        }
        i = seg_end + 1;
    }
}

// ===== decomposition bounds ====================================================

/// Bounds extracted from one verified distribution by cutting and collapsing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionBound {
    /// Quiet cuts of the distribution (no move can ever cross them).
    pub quiet_cuts: Vec<u32>,
    /// Per-part certified upper bounds: each part's distribution is
    /// re-verified k-solvable on the part graph.
    pub parts: Vec<(GraphId, u32)>,
    /// Exact k-optimal number of the slash-path quotient, a lower bound for
    /// the graph itself; only computed for short paths.
    pub path_lower: Option<u32>,
}

const PATH_LOWER_CAP: u32 = 12;

/// Verifies `dist` k-solvable, splits it along its quiet cuts into staircase
/// parts (each re-verified), and collapses slashes to a path for a lower
/// bound.
pub fn decompose_and_bound(
    g: &PebbleGraph,
    dist: &Distribution,
    k: u32,
) -> Result<DecompositionBound> {
    if !is_k_solvable(g, dist, k)? {
        return Err(Error::VerificationFailed(
            "decomposition needs a k-solvable distribution".into(),
        ));
    }
    let quiet = crate::pebble::quiet_cuts(g, dist)?;
    let mut parts = Vec::new();
    let mut boundaries = vec![0u32];
    boundaries.extend(&quiet);
    boundaries.push(g.n_slashes());
    for w in boundaries.windows(2) {
        let (lo, hi) = (w[0] + 1, w[1]);
        if lo > hi {
            continue;
        }
        let part = crate::pebble::extract_part(g, dist, lo, hi)?;
        if !is_k_solvable(&part.graph, &part.dist, k)? {
            return Err(Error::VerificationFailed(format!(
                "part on slashes {lo}..={hi} lost solvability after the split"
            )));
        }
        parts.push((part.graph.graph_id(), part.dist.size()));
    }
    let path_lower = if g.n_slashes() <= PATH_LOWER_CAP && g.n_slashes() >= 1 {
        let quotient = crate::grid::QuotientMap::slash_to_path(g)?;
        let report = optimal_pebbling_number(quotient.target(), k, &BudgetConfig::default())?;
        report.value.exact()
    } else {
        None
    };
    Ok(DecompositionBound { quiet_cuts: quiet, parts, path_lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_path, build_staircase, StaircaseSpec};

    #[test]
    fn ranks_round_trip() {
        let space = MultisetSpace::new(5, 3).unwrap();
        assert_eq!(space.total(), 35); // C(7, 3)
        let mut combo = space.unrank(0);
        for rank in 0..space.total() {
            assert_eq!(space.unrank(rank), combo, "rank {rank}");
            if rank + 1 < space.total() {
                space.advance(&mut combo);
            }
        }
    }

    #[test]
    fn counts_have_the_right_size() {
        let space = MultisetSpace::new(4, 6).unwrap();
        let mut counts = vec![0u8; 4];
        for rank in [0, 1, 17, space.total() - 1] {
            let combo = space.unrank(rank);
            space.counts(&combo, &mut counts);
            assert_eq!(counts.iter().map(|&c| c as u32).sum::<u32>(), 6);
        }
    }

    #[test]
    fn path_optimal_numbers_match_the_two_thirds_rule() {
        // ceil(2n/3) for n = 1..7.
        let expected = [1, 2, 2, 3, 4, 4, 5];
        for (i, &want) in expected.iter().enumerate() {
            let g = build_path(i as u32 + 1).unwrap();
            let report = optimal_pebbling_number(&g, 1, &BudgetConfig::default()).unwrap();
            assert_eq!(report.value, SearchValue::Exact(want), "P_{}", i + 1);
            assert!(report.exhaustive);
            let w = report.witness_distribution(&g).unwrap().unwrap();
            assert!(is_k_solvable(&g, &w, 1).unwrap());
            assert_eq!(w.size(), want);
        }
    }

    #[test]
    fn star_staircase_needs_two_pebbles() {
        let g = build_staircase(StaircaseSpec::prime(3, 3)).unwrap();
        let report = optimal_pebbling_number(&g, 1, &BudgetConfig::default()).unwrap();
        assert_eq!(report.value, SearchValue::Exact(2));
    }

    #[test]
    fn isolated_vertices_force_pebbles_everywhere() {
        let g = build_staircase(StaircaseSpec::prime(3, 1)).unwrap();
        let report = optimal_pebbling_number(&g, 1, &BudgetConfig::default()).unwrap();
        assert_eq!(report.value, SearchValue::Exact(2));
    }

    #[test]
    fn zero_budget_reports_an_interval() {
        let g = build_staircase(StaircaseSpec::plain(4, 4)).unwrap();
        let config = BudgetConfig { budget: Some(Duration::ZERO), ..Default::default() };
        let report = optimal_pebbling_number(&g, 1, &config).unwrap();
        assert!(!report.exhaustive);
        assert_eq!(report.value, SearchValue::Interval { lower: 1, upper: None });
    }

    #[test]
    fn checkpoint_resume_reaches_the_same_answer() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.json");
        let g = build_staircase(StaircaseSpec::plain(3, 4)).unwrap();
        let fresh = optimal_pebbling_number(&g, 1, &BudgetConfig::default()).unwrap();
        let stopped = optimal_pebbling_number(
            &g,
            1,
            &BudgetConfig {
                budget: Some(Duration::ZERO),
                checkpoint: Some(path.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!stopped.exhaustive);
        assert!(path.exists());
        let resumed = optimal_pebbling_number(
            &g,
            1,
            &BudgetConfig { checkpoint: Some(path.clone()), ..Default::default() },
        )
        .unwrap();
        assert_eq!(resumed.value, fresh.value);
        assert_eq!(resumed.witness, fresh.witness);
        assert_eq!(resumed.candidates_examined, fresh.candidates_examined);
        assert!(!path.exists(), "finished search clears its checkpoint");
    }

    #[test]
    fn thread_count_does_not_change_the_report() {
        let g = build_staircase(StaircaseSpec::plain(4, 4)).unwrap();
        let one = optimal_pebbling_number(
            &g,
            1,
            &BudgetConfig { threads: 1, ..Default::default() },
        )
        .unwrap();
        let many = optimal_pebbling_number(
            &g,
            1,
            &BudgetConfig { threads: 8, ..Default::default() },
        )
        .unwrap();
        assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&many).unwrap());
    }

    #[test]
    fn all_witnesses_on_a_short_path() {
        let g = build_path(3).unwrap();
        let (size, witnesses) = minimal_solvable_distributions(&g, 2).unwrap();
        assert_eq!(size, 4);
        let order = g.path_order().unwrap();
        let mut shapes: Vec<Vec<u32>> = witnesses
            .iter()
            .map(|w| order.iter().map(|&v| w.count(v)).collect())
            .collect();
        shapes.sort();
        // Both ends can feed the middle, so (2,0,2) qualifies too.
        assert_eq!(
            shapes,
            vec![
                vec![0, 4, 0],
                vec![1, 1, 2],
                vec![1, 2, 1],
                vec![2, 0, 2],
                vec![2, 1, 1]
            ]
        );
    }

    #[test]
    fn segment_grammar_accepts_and_rejects() {
        let g = build_path(3).unwrap();
        let order = g.path_order().unwrap();
        let dist_of = |shape: &[u32]| {
            let mut d = Distribution::zeros(3);
            for (i, &c) in shape.iter().enumerate() {
                d.set_count(order[i], c);
            }
            d
        };
        match prime_segment_decomposition(&g, &dist_of(&[0, 4, 0])).unwrap() {
            DecompositionOutcome::Valid(segs) => {
                assert_eq!(segs, vec![PrimeSegment { kind: SegmentKind::Pile, start: 0, end: 2 }]);
            }
            other => panic!("expected a parse, got {other:?}"),
        }
        match prime_segment_decomposition(&g, &dist_of(&[1, 2, 1])).unwrap() {
            DecompositionOutcome::Valid(segs) => {
                assert_eq!(segs, vec![PrimeSegment { kind: SegmentKind::Pair, start: 0, end: 2 }]);
            }
            other => panic!("expected a parse, got {other:?}"),
        }
        assert!(matches!(
            prime_segment_decomposition(&g, &dist_of(&[2, 2, 0])).unwrap(),
            DecompositionOutcome::Invalid { .. }
        ));
        assert!(matches!(
            prime_segment_decomposition(&g, &dist_of(&[4, 0, 0])).unwrap(),
            DecompositionOutcome::Invalid { .. }
        ));
    }

    #[test]
    fn multi_segment_parse() {
        let g = build_path(7).unwrap();
        let order = g.path_order().unwrap();
        let shape = [1, 2, 0, 1, 1, 2, 1];
        let mut d = Distribution::zeros(7);
        for (i, &c) in shape.iter().enumerate() {
            d.set_count(order[i], c);
        }
        match prime_segment_decomposition(&g, &d).unwrap() {
            DecompositionOutcome::Valid(segs) => {
                assert_eq!(segs.len(), 2);
                assert_eq!((segs[0].start, segs[0].end), (0, 1));
                assert_eq!((segs[1].start, segs[1].end), (3, 6));
            }
            other => panic!("expected a parse, got {other:?}"),
        }
    }

    #[test]
    fn decomposition_bound_on_a_two_block_distribution() {
        // Two separated solvable blocks on S3,4: each half holds a doubled
        // vertex next to its lonely neighbours.
        let g = build_staircase(StaircaseSpec::plain(3, 4)).unwrap();
        let report = optimal_pebbling_number(&g, 1, &BudgetConfig::default()).unwrap();
        let witness = report.witness_distribution(&g).unwrap().unwrap();
        let bound = decompose_and_bound(&g, &witness, 1).unwrap();
        let parts_total: u32 = bound.parts.iter().map(|&(_, s)| s).sum();
        assert_eq!(parts_total, witness.size());
        assert!(bound.path_lower.unwrap() <= report.value.exact().unwrap());
    }
}

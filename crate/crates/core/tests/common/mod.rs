//! Shared fixtures for the integration suites: a pool of small graphs,
//! seeded random distributions, and naive oracles that recompute
//! reachability by plain breadth-first enumeration of every obtainable
//! distribution — no weight pruning, no memoization, no symmetry. Slow and
//! obviously correct, which is the point.

#![allow(dead_code)] // each test target uses a different slice of this module

use std::collections::{HashSet, VecDeque};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use pebbling::cache::WitnessCache;
use pebbling::constructions;
use pebbling::grid::{build_grid_window, build_path, GraphId, QuotientMap};
use pebbling::harness::{expected_value, Expected};
use pebbling::pebble::{
    crossing_moves_at_slash, is_k_reachable, is_k_set_reachable, is_k_solvable, quiet_cuts,
    split_at_cut, two_reachable_slashes,
};
use pebbling::{build_staircase, Distribution, PebbleGraph, StaircaseSpec, Variant};

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5EED_0000 ^ salt)
}

/// Connected graphs with at most `max_vertices` vertices, mixing staircases
/// of every width, grid windows and paths.
pub fn small_graphs(max_vertices: usize) -> Vec<PebbleGraph> {
    let mut pool = Vec::new();
    for width in 2..=7u32 {
        for length in 1..=8u32 {
            for variant in [Variant::Plain, Variant::Prime] {
                let spec = StaircaseSpec::new(width, length, variant);
                if spec.variant != variant {
                    continue; // even widths fold the variants together
                }
                let g = build_staircase(spec).unwrap();
                if g.n_vertices() <= max_vertices && g.is_connected() {
                    pool.push(g);
                }
            }
        }
    }
    for (rows, cols) in [(2, 2), (2, 3), (2, 4), (2, 5), (3, 3), (3, 4)] {
        let g = build_grid_window(rows, cols).unwrap();
        if g.n_vertices() <= max_vertices {
            pool.push(g);
        }
    }
    for n in 2..=12u32 {
        let g = build_path(n).unwrap();
        if g.n_vertices() <= max_vertices {
            pool.push(g);
        }
    }
    pool
}

/// A random distribution of at most `max_size` pebbles; roughly half the
/// draws concentrate pebbles into piles, the interesting regime for moves.
pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize, max_size: u32) -> Distribution {
    let size = rng.gen_range(0..=max_size);
    let mut dist = Distribution::zeros(n);
    let mut left = size;
    while left > 0 {
        let v = rng.gen_range(0..n);
        let chunk = if rng.gen_bool(0.5) {
            left.min([2, 4][rng.gen_range(0..2)])
        } else {
            1
        };
        dist.add(v, chunk);
        left -= chunk;
    }
    dist
}

// ===== naive oracles ===========================================================

/// Every distribution obtainable from `start`, by breadth-first search over
/// whole count vectors. Calls `visit` on each state including the start.
fn walk_states(g: &PebbleGraph, start: &[u32], mut visit: impl FnMut(&[u32]) -> bool) {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
    seen.insert(start.to_vec());
    if visit(start) {
        return;
    }
    queue.push_back(start.to_vec());
    while let Some(c) = queue.pop_front() {
        for v in 0..g.n_vertices() {
            if c[v] >= 2 {
                for &u in g.neighbors(v) {
                    let mut d = c.clone();
                    d[v] -= 2;
                    d[u] += 1;
                    if seen.insert(d.clone()) {
                        if visit(&d) {
                            return;
                        }
                        queue.push_back(d.clone());
                    }
                }
            }
        }
    }
}

pub fn naive_k_reachable(g: &PebbleGraph, dist: &Distribution, target: usize, k: u32) -> bool {
    let mut hit = false;
    walk_states(g, dist.counts(), |c| {
        if c[target] >= k {
            hit = true;
        }
        hit
    });
    hit
}

pub fn naive_k_set_reachable(g: &PebbleGraph, dist: &Distribution, set: &[usize], k: u32) -> bool {
    let mut hit = false;
    walk_states(g, dist.counts(), |c| {
        if set.iter().map(|&v| c[v]).sum::<u32>() >= k {
            hit = true;
        }
        hit
    });
    hit
}

pub fn naive_k_solvable(g: &PebbleGraph, dist: &Distribution, k: u32) -> bool {
    (0..g.n_vertices()).all(|t| naive_k_reachable(g, dist, t, k))
}

/// Every distribution with exactly `size` pebbles on `g`, by a plain
/// odometer over count vectors.
pub fn for_each_distribution_of_size(
    g: &PebbleGraph,
    size: u32,
    f: &mut impl FnMut(&Distribution),
) {
    fn rec(n: usize, v: usize, left: u32, counts: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if v + 1 == n {
            counts[v] = left;
            f(counts);
            counts[v] = 0;
            return;
        }
        for c in 0..=left {
            counts[v] = c;
            rec(n, v + 1, left - c, counts, f);
        }
        counts[v] = 0;
    }
    let mut counts = vec![0u32; g.n_vertices()];
    rec(g.n_vertices(), 0, size, &mut counts, &mut |c| {
        f(&Distribution::from_counts(c.to_vec()))
    });
}

// ===== suite runners ===========================================================

pub struct SuiteReport {
    pub samples: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn assert_clean(&self, expected_samples: usize, label: &str) {
        assert_eq!(
            self.samples, expected_samples,
            "{label}: ran {} samples, wanted {expected_samples}",
            self.samples
        );
        assert!(
            self.failures.is_empty(),
            "{label}: {}/{} failed:\n{}",
            self.failures.len(),
            self.samples,
            self.failures.join("\n")
        );
    }
}

/// Criterion-8 style oracle comparison: `cases` random (graph, distribution,
/// target, k) instances on graphs of at most 12 vertices with at most 8
/// pebbles and k at most 3, engine versus naive enumeration.
pub fn run_oracle_suite(cases: usize) -> SuiteReport {
    let mut rng = rng(8);
    let pool = small_graphs(12);
    let mut failures = Vec::new();
    for i in 0..cases {
        let g = &pool[rng.gen_range(0..pool.len())];
        let dist = random_distribution(&mut rng, g.n_vertices(), 8);
        let target = rng.gen_range(0..g.n_vertices());
        let k = rng.gen_range(1..=3);
        let engine = is_k_reachable(g, &dist, target, k).unwrap();
        let naive = naive_k_reachable(g, &dist, target, k);
        if engine != naive {
            failures.push(format!(
                "case {i}: {} dist {:?} target {target} k {k}: engine {engine}, naive {naive}",
                g.graph_id(),
                dist.pairs()
            ));
        }
    }
    SuiteReport { samples: cases, failures, notes: Vec::new() }
}

fn flip(v: Variant) -> Variant {
    match v {
        Variant::Plain => Variant::Prime,
        Variant::Prime => Variant::Plain,
    }
}

fn part_pi(part_id: &GraphId, cache: &WitnessCache) -> Option<u32> {
    let GraphId::Staircase(spec) = part_id else { return None };
    if let Expected::Exact(v) = expected_value(*spec) {
        return Some(v);
    }
    // Tables are silent on a few tiny cases; the cache has them all exact.
    cache
        .lookup(part_id, 1)
        .filter(|e| e.exact)
        .map(|e| e.size)
}

/// One solvable sample for the lemma battery: a graph together with a
/// verified solvable distribution of size below n+1.
fn lemma_sample(
    rng: &mut ChaCha8Rng,
    cache: &WitnessCache,
) -> (PebbleGraph, Distribution) {
    loop {
        let width = rng.gen_range(3..=6u32);
        let max_n = match width {
            3 | 4 => 12,
            5 => 12,
            _ => 9,
        };
        let n = rng.gen_range(4..=max_n);
        let variant = if rng.gen_bool(0.5) { Variant::Plain } else { Variant::Prime };
        let spec = StaircaseSpec::new(width, n, variant);
        let (g, witness) = match constructions::staircase_distribution(spec, cache) {
            Ok(pair) => pair,
            Err(_) => continue,
        };
        match rng.gen_range(0..3) {
            // The verified witness itself.
            0 => {
                if witness.size() < n + 1 {
                    return (g, witness);
                }
            }
            // Witness plus a little noise, re-checked.
            1 => {
                let mut d = witness.clone();
                for _ in 0..rng.gen_range(1..=2) {
                    d.add(rng.gen_range(0..g.n_vertices()), 1);
                }
                if d.size() < n + 1 && is_k_solvable(&g, &d, 1).unwrap() {
                    return (g, d);
                }
            }
            // Rejection-sampled from scratch.
            _ => {
                let d = random_distribution(rng, g.n_vertices(), n);
                if d.size() < n + 1 && is_k_solvable(&g, &d, 1).unwrap() {
                    return (g, d);
                }
            }
        }
    }
}

/// Criterion-9 battery: 200 random solvable staircase distributions with
/// |P| < n+1. Each sample must leave some slash not 2-reachable; samples
/// with |P| < n-1 are further pushed through the inner-slash, one-sided-cut
/// and split bookkeeping checks.
pub fn run_lemma_suite(cases: usize) -> SuiteReport {
    let mut rng = rng(9);
    let cache = WitnessCache::builtin().unwrap();
    let mut failures = Vec::new();
    let mut small_cases = 0usize;
    for i in 0..cases {
        let (g, dist) = lemma_sample(&mut rng, &cache);
        let spec = g.provenance().unwrap();
        let n = g.n_slashes();
        let label = format!("case {i} on {spec} size {}", dist.size());
        let reach2 = two_reachable_slashes(&g, &dist).unwrap();

        // Solvable with fewer than n+1 pebbles: some slash not 2-reachable.
        if reach2.len() as u32 == n {
            failures.push(format!("{label}: every slash 2-reachable"));
            continue;
        }

        if dist.size() >= n.saturating_sub(1) {
            continue;
        }
        small_cases += 1;

        // Below n-1 pebbles: some inner slash is not 2-reachable ...
        let inner_missing: Vec<u32> =
            (2..n).filter(|s| !reach2.contains(s)).collect();
        if inner_missing.is_empty() {
            failures.push(format!("{label}: all inner slashes 2-reachable"));
            continue;
        }
        // ... and every such slash admits a quiet side.
        for &s in &inner_missing {
            let (left, right) = crossing_moves_at_slash(&g, &dist, s).unwrap();
            if left && right {
                failures.push(format!("{label}: slash {s} crossable on both sides"));
            }
        }

        // Split at a quiet cut: parts verify, sizes sum, variants follow the
        // parity bookkeeping, and part optima never exceed the whole.
        let cuts = quiet_cuts(&g, &dist).unwrap();
        let Some(&c) = cuts.first() else {
            failures.push(format!("{label}: no quiet cut despite a dead inner slash"));
            continue;
        };
        let (left, right) = match split_at_cut(&g, &dist, c) {
            Ok(parts) => parts,
            Err(e) => {
                failures.push(format!("{label}: split at {c} failed: {e}"));
                continue;
            }
        };
        if left.dist.size() + right.dist.size() != dist.size() {
            failures.push(format!("{label}: split sizes do not sum"));
        }
        // Left keeps the variant, right flips on an odd cut. Odd-width parts
        // of even length are flip-isomorphic to their twin and come back
        // labelled Plain.
        let canon = |width: u32, length: u32, variant| {
            let v = if width % 2 == 1 && length % 2 == 0 { Variant::Plain } else { variant };
            GraphId::Staircase(StaircaseSpec::new(width, length, v))
        };
        let want_left = canon(spec.width, c, spec.variant);
        let right_variant =
            if c % 2 == 0 { spec.variant } else { flip(spec.variant) };
        let want_right = canon(spec.width, n - c, right_variant);
        if left.graph.graph_id() != want_left || right.graph.graph_id() != want_right {
            failures.push(format!(
                "{label}: cut {c} produced {} + {}, expected {want_left} + {want_right}",
                left.graph.graph_id(),
                right.graph.graph_id()
            ));
        }
        if let (Some(pl), Some(pr)) = (
            part_pi(&left.graph.graph_id(), &cache),
            part_pi(&right.graph.graph_id(), &cache),
        ) {
            if pl + pr > dist.size() {
                failures.push(format!(
                    "{label}: parts need {pl}+{pr} pebbles, more than the whole"
                ));
            }
        }
    }
    SuiteReport {
        samples: cases,
        failures,
        notes: vec![format!("{small_cases} samples small enough for the split battery")],
    }
}

/// Criterion-10 battery: reachability transfers through collapsing maps.
/// Half the samples force a reachable instance by piling 2^d pebbles at
/// distance d; the rest are unconstrained implications.
pub fn run_collapsing_suite(cases: usize) -> SuiteReport {
    let mut rng = rng(10);
    let mut failures = Vec::new();
    let mut transfers = 0usize;
    for i in 0..cases {
        let width = rng.gen_range(3..=7u32);
        let n = rng.gen_range(2..=7u32);
        let variant = if rng.gen_bool(0.5) { Variant::Plain } else { Variant::Prime };
        let spec = StaircaseSpec::new(width, n, variant);
        let g = build_staircase(spec).unwrap();
        let q = if width == 7 && rng.gen_bool(0.5) {
            QuotientMap::merge_first_and_third_diagonals(&g).unwrap()
        } else {
            QuotientMap::slash_to_path(&g).unwrap()
        };
        let k = rng.gen_range(1..=2u32);
        let target = rng.gen_range(0..g.n_vertices());
        let mut dist = random_distribution(&mut rng, g.n_vertices(), 8);
        if rng.gen_bool(0.5) {
            // Rig the instance so the source side is k-reachable for sure;
            // stay near the target to keep the pile within engine limits.
            let from = (0..8)
                .map(|_| rng.gen_range(0..g.n_vertices()))
                .find(|&v| g.distance(v, target).unwrap() <= 5)
                .unwrap_or(target);
            let d = g.distance(from, target).unwrap();
            dist.add(from, k * 2u32.pow(d));
        }
        let label = format!("case {i} on {spec} k {k}");
        let set_mode = rng.gen_bool(0.3);
        let (src_ok, img_ok) = if set_mode {
            let s = rng.gen_range(1..=g.n_slashes());
            let set: Vec<usize> = g.slash_vertices(s).to_vec();
            let image: Vec<usize> = {
                let mut im: Vec<usize> = set.iter().map(|&v| q.image_of(v)).collect();
                im.sort_unstable();
                im.dedup();
                im
            };
            (
                is_k_set_reachable(&g, &dist, &set, k).unwrap(),
                is_k_set_reachable(q.target(), &q.collapse(&dist).unwrap(), &image, k).unwrap(),
            )
        } else {
            (
                is_k_reachable(&g, &dist, target, k).unwrap(),
                is_k_reachable(
                    q.target(),
                    &q.collapse(&dist).unwrap(),
                    q.image_of(target),
                    k,
                )
                .unwrap(),
            )
        };
        if src_ok {
            transfers += 1;
            if !img_ok {
                failures.push(format!("{label}: reachable upstairs, lost in the quotient"));
            }
        }
    }
    SuiteReport {
        samples: cases,
        failures,
        notes: vec![format!("{transfers} samples exercised a real transfer")],
    }
}

//! Quotient maps must never lose reachability: whatever a distribution can
//! deliver in the source graph, its collapsed image delivers in the
//! quotient. Runs the randomized transfer battery plus shape checks for the
//! two bundled maps.

mod common;

use pebbling::cache::WitnessCache;
use pebbling::grid::{GraphId, QuotientMap};
use pebbling::pebble::{is_k_solvable, k_reachable_slashes};
use pebbling::{build_staircase, StaircaseSpec};

#[test]
fn two_hundred_transfer_samples() {
    let report = common::run_collapsing_suite(200);
    for note in &report.notes {
        println!("collapsing: {note}");
    }
    report.assert_clean(200, "collapsing transfer");
}

#[test]
fn slash_collapse_targets_a_path() {
    for spec in [StaircaseSpec::plain(4, 6), StaircaseSpec::prime(5, 3)] {
        let g = build_staircase(spec).unwrap();
        let q = QuotientMap::slash_to_path(&g).unwrap();
        assert!(q.target().is_path());
        assert_eq!(q.target().n_vertices() as u32, g.n_slashes());
        // Each slash lands on a single path vertex, consecutively.
        for v in 0..g.n_vertices() {
            for w in 0..g.n_vertices() {
                let same = g.slash_of(v) == g.slash_of(w);
                assert_eq!(same, q.image_of(v) == q.image_of(w));
            }
        }
    }
}

#[test]
fn diagonal_merge_narrows_seven_to_six() {
    for n in [4u32, 6, 7] {
        let g = build_staircase(StaircaseSpec::plain(7, n)).unwrap();
        let q = QuotientMap::merge_first_and_third_diagonals(&g).unwrap();
        assert_eq!(
            q.target().graph_id(),
            GraphId::Staircase(StaircaseSpec::plain(6, n)),
            "merging diagonals of S7,{n} must land on S6,{n}"
        );
        // Slashes keep their indices through the merge.
        for v in 0..g.n_vertices() {
            assert_eq!(g.slash_of(v), q.target().slash_of(q.image_of(v)));
        }
    }
}

#[test]
fn solvability_and_slash_coverage_survive_the_merge() {
    let cache = WitnessCache::builtin().unwrap();
    for spec in [
        StaircaseSpec::plain(7, 5),
        StaircaseSpec::prime(7, 5),
        StaircaseSpec::plain(7, 7),
    ] {
        let g = build_staircase(spec).unwrap();
        let (dist, _) = cache.verified_witness(&g, 1).unwrap().expect("cached witness");
        let q = QuotientMap::merge_first_and_third_diagonals(&g).unwrap();
        let collapsed = q.collapse(&dist).unwrap();
        assert!(
            is_k_solvable(q.target(), &collapsed, 1).unwrap(),
            "collapse of the {spec} witness is not solvable on the quotient"
        );
        for k in 1..=2u32 {
            let up = k_reachable_slashes(&g, &dist, k).unwrap();
            let down = k_reachable_slashes(q.target(), &collapsed, k).unwrap();
            for s in up {
                assert!(
                    down.contains(&s),
                    "slash {s} was {k}-reachable on {spec} but not after the merge"
                );
            }
        }
    }
}

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hampack::bitset::BitSet;
use hampack::solver::{clique_cover_size, solve_forced};
use hampack::{build_full, build_zero_fixed, oracle, solve, verify, SolveBudget, SolveStatus};

/// Maximum independent set of the induced subgraph on `vertices`, by brute force.
fn brute_mis(rows: &[BitSet], vertices: &[usize]) -> usize {
    let n = vertices.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let chosen: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vertices[i]).collect();
        let independent = chosen
            .iter()
            .enumerate()
            .all(|(i, &a)| chosen[i + 1..].iter().all(|&b| !rows[a].contains(b)));
        if independent {
            best = size;
        }
    }
    best
}

#[test]
fn oracle_examples() {
    assert_eq!(oracle(&common::space(&[(2, 3)]), 3, None).unwrap(), 2);
    assert_eq!(oracle(&common::space(&[(2, 4)]), 2, None).unwrap(), 8);
    assert_eq!(oracle(&common::space(&[(2, 2)]), 1, None).unwrap(), 4);
    assert!(oracle(&common::space(&[(2, 5)]), 2, None).is_err());
}

#[test]
fn solve_examples() {
    let s = common::space(&[(2, 4), (3, 1)]);
    assert_eq!(solve(&build_full(&s, 3).unwrap(), SolveBudget::default()).best_value, 6);
    let s = common::space(&[(2, 2), (3, 3)]);
    assert_eq!(solve(&build_full(&s, 3).unwrap(), SolveBudget::default()).best_value, 9);
}

#[test]
fn solve_forced_examples() {
    let s = common::space(&[(2, 4), (3, 1)]);
    let m = build_full(&s, 3).unwrap();
    let pins = [s.zero(), s.parse_word("00111").unwrap()];
    let r = solve_forced(&m, &pins, SolveBudget::default()).unwrap();
    assert_eq!((r.status, r.best_value), (SolveStatus::Optimal, 4));
    assert!(pins.iter().all(|p| r.witness.contains(p)));

    let s = common::space(&[(2, 2), (3, 2), (5, 1)]);
    let m = build_full(&s, 3).unwrap();
    let pins = [s.zero(), s.parse_word("00111").unwrap()];
    assert_eq!(solve_forced(&m, &pins, SolveBudget::default()).unwrap().best_value, 11);

    let close = [s.zero(), s.parse_word("00001").unwrap()];
    let r = solve_forced(&m, &close, SolveBudget::default()).unwrap();
    assert_eq!((r.status, r.best_value), (SolveStatus::Infeasible, 0));
}

#[test]
fn empty_free_set_returns_offset() {
    // every nonzero word is within distance 2 of zero
    let s = common::space(&[(2, 2)]);
    let m = build_zero_fixed(&s, 3).unwrap();
    assert!(m.free().is_empty());
    let r = solve(&m, SolveBudget::default());
    assert_eq!((r.status, r.best_value, r.upper_bound), (SolveStatus::Optimal, 1, 1));
}

#[test]
fn optimum_is_nonincreasing_in_d() {
    for blocks in [vec![(2, 4), (3, 1)], vec![(2, 2), (3, 2)], vec![(3, 3)], vec![(2, 3), (4, 1)]] {
        let s = common::space(&blocks);
        let values: Vec<usize> = (1..=s.n())
            .map(|d| {
                let r = solve(&build_full(&s, d).unwrap(), SolveBudget::default());
                assert!(r.is_optimal());
                assert!(verify(&r.witness, d).passed);
                assert_eq!(r.witness.len(), r.best_value);
                r.best_value
            })
            .collect();
        assert_eq!(values[0] as u64, s.cardinality());
        assert!(values.windows(2).all(|w| w[0] >= w[1]), "{s}: {values:?}");
        assert_eq!(*values.last().unwrap(), blocks[0].0 as usize, "{s}");
    }
}

#[test]
fn json_report_has_stable_fields() {
    let s = common::space(&[(2, 3)]);
    let r = solve(&build_full(&s, 3).unwrap(), SolveBudget::default());
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["status", "value", "bound", "witness", "elapsed_secs", "nodes"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["witness"], serde_json::json!(["000", "111"]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// The clique covers used for bounding never undercut the true optimum
    /// of a small induced subgraph.
    #[test]
    fn clique_cover_is_an_upper_bound(seed in any::<u64>(), size in 1usize..=20, d in 2usize..=4, which in 0usize..4) {
        let blocks = [vec![(2, 5), (3, 1)], vec![(2, 2), (3, 3)], vec![(3, 2), (4, 2)], vec![(2, 6)]][which].clone();
        let s = common::space(&blocks);
        let m = build_full(&s, d).unwrap();
        let rows: Vec<BitSet> = (0..m.free().len()).map(|i| m.conflict_row(i).clone()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vertices: Vec<usize> = (0..rows.len()).collect();
        vertices.shuffle(&mut rng);
        vertices.truncate(size);
        let mut subset = BitSet::new(rows.len());
        for &v in &vertices {
            subset.insert(v);
        }
        let cover = clique_cover_size(&rows, &subset);
        let mis = brute_mis(&rows, &vertices);
        prop_assert!(cover >= mis, "cover {} < optimum {}", cover, mis);
        prop_assert!(cover <= size);
    }

    /// A node budget stops early but always brackets the optimum.
    #[test]
    fn budgets_bracket_the_optimum(limit in 1u64..200) {
        let s = common::space(&[(2, 4), (3, 2)]);
        let m = build_full(&s, 3).unwrap();
        let r = solve(&m, SolveBudget::default().with_node_limit(limit));
        prop_assert!(r.best_value <= 12 && 12 <= r.upper_bound);
        prop_assert!(verify(&r.witness, 3).passed);
        prop_assert_eq!(r.witness.len(), r.best_value);
        if r.status != SolveStatus::Optimal {
            prop_assert_eq!(r.status, SolveStatus::BudgetExhausted);
        }
    }
}

mod common;

use hampack::branch::enumerate_branches;
use hampack::emit::{render, EmitOptions, Format};
use hampack::model::read_solution;
use hampack::{
    build_full, build_pair, build_profile_forbidding, build_reduced, build_zero_fixed, distance,
    marginal_distances, model_stats, solve, verify, MarginalProfile, SolveBudget,
};

const SAMPLE: &[&[(u32, usize)]] = &[
    &[(2, 4), (3, 1)],
    &[(2, 3), (3, 2)],
    &[(2, 2), (3, 1), (4, 1)],
    &[(3, 3)],
    &[(2, 5)],
    &[(2, 1), (3, 3)],
];

#[test]
fn conflicts_are_symmetric_irreflexive_and_within_range() {
    for blocks in SAMPLE {
        let s = common::space(blocks);
        for d in 2..=s.n().min(4) {
            for m in [
                build_full(&s, d).unwrap(),
                build_zero_fixed(&s, d).unwrap(),
                build_reduced(&s, d).unwrap(),
            ] {
                m.check_invariants().unwrap();
                for i in 0..m.free().len() {
                    let row = m.conflict_row(i);
                    assert!(!row.contains(i));
                    for j in row.iter() {
                        assert!(m.conflict_row(j).contains(i));
                        let dist = distance(&m.free_word(i), &m.free_word(j)).unwrap();
                        assert!((1..d).contains(&dist), "{s} d={d}: {dist}");
                    }
                }
            }
        }
    }
}

#[test]
fn forbidding_adds_exactly_the_profile_pairs() {
    let s = common::space(&[(2, 4), (3, 2)]);
    let d = 3;
    let profile = MarginalProfile::from_printed(&s, &[1, 2]).unwrap();
    let m = build_profile_forbidding(&s, d, &profile).unwrap();
    for i in 0..m.free().len() {
        for j in 0..m.free().len() {
            if i == j {
                continue;
            }
            let (a, b) = (m.free_word(i), m.free_word(j));
            let dist = distance(&a, &b).unwrap();
            let expected =
                (1..d).contains(&dist) || (dist == d && marginal_distances(&a, &b).unwrap() == profile);
            assert_eq!(m.conflict_row(i).contains(j), expected, "{a} {b}");
        }
    }
    let wrong_total = MarginalProfile::from_printed(&s, &[1, 1]).unwrap();
    assert!(build_profile_forbidding(&s, d, &wrong_total).is_err());
}

#[test]
fn eliminated_words_clash_with_a_pinned_word() {
    for blocks in SAMPLE {
        let s = common::space(blocks);
        for d in 2..=s.n().min(4) {
            for branch in enumerate_branches(&s, d) {
                let m = build_pair(&s, d, &branch.second).unwrap();
                m.check_invariants().unwrap();
                let pins = m.fixed_one_words();
                assert_eq!(pins.len(), 2);
                let free: std::collections::BTreeSet<u64> = m.free().iter().copied().collect();
                for w in s.words() {
                    if free.contains(&w.index()) || pins.contains(&w) {
                        continue;
                    }
                    assert!(
                        pins.iter().any(|p| distance(p, &w).unwrap() < d),
                        "{w} was eliminated but fits next to both pins"
                    );
                }
                for i in 0..m.free().len() {
                    let w = m.free_word(i);
                    assert!(pins.iter().all(|p| distance(p, &w).unwrap() >= d));
                }
            }
        }
    }
}

#[test]
fn pair_models_never_beat_the_full_model() {
    for blocks in SAMPLE {
        let s = common::space(blocks);
        for d in 2..=s.n().min(4) {
            let full = solve(&build_full(&s, d).unwrap(), SolveBudget::default());
            assert!(full.is_optimal());
            let mut best_branch = 0;
            for branch in enumerate_branches(&s, d) {
                let r = solve(&build_pair(&s, d, &branch.second).unwrap(), SolveBudget::default());
                assert!(r.is_optimal());
                assert!(r.best_value <= full.best_value, "{s} d={d} {}", branch.second);
                best_branch = best_branch.max(r.best_value);
            }
            if full.best_value >= 2 {
                assert_eq!(best_branch, full.best_value, "{s} d={d}");
            }
        }
    }
}

#[test]
fn pair_model_rejects_second_word_at_wrong_distance() {
    let s = common::space(&[(2, 7), (3, 1)]);
    assert!(build_pair(&s, 3, &s.parse_word("00000011").unwrap()).is_err());
}

#[test]
fn emission_is_deterministic_and_complete() {
    let s = common::space(&[(2, 7), (3, 1)]);
    let m = build_pair(&s, 3, &s.parse_word("00000111").unwrap()).unwrap();
    let stats = model_stats(&m);
    for format in [Format::Lp, Format::Mps] {
        let first = render(&m, format, EmitOptions::default());
        let rebuilt = build_pair(&s, 3, &s.parse_word("00000111").unwrap()).unwrap();
        assert_eq!(first, render(&rebuilt, format, EmitOptions::default()));
        let names: std::collections::BTreeSet<&str> = first
            .split(|c: char| c.is_whitespace())
            .filter(|t| t.starts_with("x_"))
            .collect();
        assert_eq!(names.len(), 300);
        assert!(!first.contains("x_00000000") && !first.contains("x_00000111"));
    }
    let lp = render(&m, Format::Lp, EmitOptions::default());
    let rows = lp.lines().filter(|l| l.trim_start().starts_with('c') && l.contains("<= 1")).count();
    assert_eq!(rows, stats.conflicts);
    let with_fixed = render(&m, Format::Lp, EmitOptions { include_fixed: true });
    assert!(with_fixed.contains("x_00000000") && with_fixed.contains("x_00000111"));
}

#[test]
fn solutions_map_back_to_words_by_name() {
    let s = common::space(&[(2, 4), (3, 2)]);
    let m = build_pair(&s, 3, &s.parse_word("000111").unwrap()).unwrap();
    let r = solve(&m, SolveBudget::default());
    let mut text = String::from("# external solver output\n");
    for i in 0..m.free().len() {
        let w = m.free_word(i);
        let value = if r.witness.contains(&w) { "1" } else { "0" };
        text.push_str(&format!("{} = {value}\n", hampack::emit::var_name(&w)));
    }
    let code = read_solution(&m, &text).unwrap();
    assert_eq!(code, r.witness);
    assert!(verify(&code, 3).passed);
    assert!(read_solution(&m, "x_001 1\n").is_err());
}

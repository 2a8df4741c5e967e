mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hampack::{
    connectify, connectify_traced, contact_graph, distance, is_connected, min_distance, symbol_swap,
    verify, Code, Codeword, MixedSpace, SeedChoice,
};

/// A maximal packing built greedily over a shuffled word order.
fn random_greedy_packing(space: &MixedSpace, d: usize, rng: &mut ChaCha8Rng) -> Code {
    let mut words: Vec<Codeword> = space.words().collect();
    words.shuffle(rng);
    let mut chosen: Vec<Codeword> = Vec::new();
    for w in words {
        if chosen.iter().all(|c| distance(c, &w).unwrap() >= d) {
            chosen.push(w);
        }
    }
    Code::new(space, chosen).unwrap()
}

fn pairwise_distances(words: &[Codeword]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            out.push(distance(a, b).unwrap());
        }
    }
    out.sort_unstable();
    out
}

#[test]
fn connectify_on_random_greedy_packings() {
    let family: Vec<_> = common::all_spaces(500)
        .into_iter()
        .filter(|b| b.iter().map(|&(_, a)| a).sum::<usize>() >= 2)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut trials = 0;
    let mut disconnected_inputs = 0;
    while trials < 150 {
        let blocks = family.choose(&mut rng).unwrap();
        let s = common::space(blocks);
        let d = rng.gen_range(2..=4usize.min(s.n()));
        let code = random_greedy_packing(&s, d, &mut rng);
        if code.len() < 2 {
            continue;
        }
        trials += 1;
        if !is_connected(&contact_graph(&code, d).unwrap()).unwrap() {
            disconnected_inputs += 1;
        }
        let seed = if trials % 2 == 0 { SeedChoice::Smallest } else { SeedChoice::Random(trials) };
        let trace = connectify_traced(&code, d, seed).unwrap();
        let out = &trace.code;
        assert_eq!(out.len(), code.len(), "space {s} d={d}");
        assert!(verify(out, d).passed, "space {s} d={d}");
        assert!(min_distance(out).unwrap() >= d);
        assert!(is_connected(&contact_graph(out, d).unwrap()).unwrap(), "space {s} d={d}");
        for pair in trace.steps.windows(2) {
            let before = (pair[0].remaining, pair[0].gap);
            let after = (pair[1].remaining, pair[1].gap);
            assert!(after < before, "progress measure did not drop: {before:?} -> {after:?}");
        }
    }
    assert!(disconnected_inputs > 0, "the sample should include disconnected inputs");
}

#[test]
fn connected_input_keeps_size_and_distance() {
    let s = common::space(&[(2, 4), (3, 1)]);
    let code = Code::parse(&s, "00000\n00111\n11001\n11110\n").unwrap();
    assert!(is_connected(&contact_graph(&code, 3).unwrap()).unwrap());
    let out = connectify(&code, 3).unwrap();
    assert_eq!(out.len(), 4);
    assert_eq!(min_distance(&out).unwrap(), 3);
    assert!(is_connected(&contact_graph(&out, 3).unwrap()).unwrap());
}

#[test]
fn singleton_is_unchanged() {
    let s = common::space(&[(2, 5)]);
    let code = Code::new(&s, [s.zero()]).unwrap();
    assert_eq!(connectify(&code, 3).unwrap(), code);
}

#[test]
fn seeded_runs_are_reproducible() {
    let s = common::space(&[(2, 5), (3, 1)]);
    let code = random_greedy_packing(&s, 3, &mut ChaCha8Rng::seed_from_u64(3));
    let a = connectify_traced(&code, 3, SeedChoice::Random(11)).unwrap();
    let b = connectify_traced(&code, 3, SeedChoice::Random(11)).unwrap();
    assert_eq!(a.code, b.code);
    assert_eq!(a.steps, b.steps);
}

#[test]
fn infeasible_input_is_rejected() {
    let s = common::space(&[(2, 5)]);
    let code = Code::parse(&s, "00000\n00001\n").unwrap();
    assert!(connectify(&code, 3).is_err());
    assert!(contact_graph(&code, 3).is_err());
}

fn random_word_set(s: &MixedSpace, rng: &mut ChaCha8Rng, size: usize) -> Vec<Codeword> {
    let mut all: Vec<Codeword> = s.words().collect();
    all.shuffle(rng);
    all.truncate(size);
    all
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symbol_swap_is_an_isometric_involution(seed in any::<u64>(), size in 0usize..12) {
        let s = common::space(&[(2, 3), (3, 2), (4, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words = random_word_set(&s, &mut rng, size);
        let j = rng.gen_range(0..s.n());
        let k = s.radices()[j];
        let a = rng.gen_range(0..k);
        let b = (a + rng.gen_range(1..k)) % k;
        let swapped = symbol_swap(&words, j, a, b).unwrap();
        prop_assert_eq!(swapped.len(), words.len());
        for (i, x) in words.iter().enumerate() {
            for (l, y) in words.iter().enumerate() {
                prop_assert_eq!(
                    distance(x, y).unwrap(),
                    distance(&swapped[i], &swapped[l]).unwrap()
                );
            }
        }
        prop_assert_eq!(pairwise_distances(&words), pairwise_distances(&swapped));
        prop_assert_eq!(symbol_swap(&swapped, j, a, b).unwrap(), words);
    }

    #[test]
    fn contact_edges_are_exactly_distance_d(seed in any::<u64>(), d in 2usize..=4) {
        let s = common::space(&[(2, 4), (3, 2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_greedy_packing(&s, d, &mut rng);
        let g = contact_graph(&code, d).unwrap();
        let words = code.words();
        let edges: std::collections::BTreeSet<(usize, usize)> = g.edges().collect();
        for i in 0..words.len() {
            for l in i + 1..words.len() {
                let dist = distance(&words[i], &words[l]).unwrap();
                prop_assert_eq!(edges.contains(&(i, l)), dist == d);
            }
        }
        prop_assert_eq!(g.edge_count(), edges.len());
    }
}

#[test]
fn symbol_swap_rejects_bad_arguments() {
    let s = common::space(&[(2, 2), (3, 1)]);
    let words = vec![s.zero()];
    assert!(symbol_swap(&words, 0, 1, 1).is_err());
    assert!(symbol_swap(&words, 1, 0, 2).is_err());
    assert!(symbol_swap(&words, 3, 0, 1).is_err());
    assert!(symbol_swap(&[], 0, 0, 2).unwrap().is_empty());
}

#[test]
fn verify_reports_violations() {
    let s = common::space(&[(2, 5)]);
    let code = Code::parse(&s, "# two close words\n00000\n\n00011\n11111\n").unwrap();
    let r = verify(&code, 3);
    assert!(!r.passed);
    assert_eq!(r.min_distance, Some(2));
    assert_eq!(r.violations.len(), 1);
    assert_eq!(r.cardinality, 3);
    let err = Code::parse(&s, "00000\n0000x\n").unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
}

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hampack::{ball, distance, marginal_distances, MixedSpace};

/// Up to three blocks, alphabets strictly increasing in 2..=6, lengths 1..=4.
fn block_lists() -> impl Strategy<Value = Vec<(u32, usize)>> {
    (
        proptest::sample::subsequence(vec![2u32, 3, 4, 5, 6], 1..=3),
        proptest::collection::vec(1usize..=4, 3),
    )
        .prop_map(|(ks, alphas)| ks.into_iter().zip(alphas).collect())
}

fn random_symbols(space: &MixedSpace, rng: &mut ChaCha8Rng) -> Vec<u32> {
    space.radices().iter().map(|&k| rng.gen_range(0..k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_axioms(blocks in block_lists(), seed in any::<u64>()) {
        let s = common::space(&blocks);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let w = s.word(&random_symbols(&s, &mut rng)).unwrap();
            let x = s.word(&random_symbols(&s, &mut rng)).unwrap();
            let y = s.word(&random_symbols(&s, &mut rng)).unwrap();
            let wx = distance(&w, &x).unwrap();
            prop_assert_eq!(wx, common::naive_distance(w.symbols(), x.symbols()));
            prop_assert_eq!(wx == 0, w == x);
            prop_assert_eq!(wx, distance(&x, &w).unwrap());
            prop_assert!(wx <= distance(&w, &y).unwrap() + distance(&y, &x).unwrap());
            prop_assert_eq!(distance(&w, &w).unwrap(), 0);
        }
    }

    #[test]
    fn marginals_sum_to_distance(blocks in block_lists(), seed in any::<u64>()) {
        let s = common::space(&blocks);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let w = s.word(&random_symbols(&s, &mut rng)).unwrap();
            let x = s.word(&random_symbols(&s, &mut rng)).unwrap();
            let m = marginal_distances(&w, &x).unwrap();
            prop_assert_eq!(m.total(), distance(&w, &x).unwrap());
            prop_assert_eq!(m.per_block().len(), s.blocks().len());
            for (j, &part) in m.per_block().iter().enumerate() {
                let expected = s
                    .block_positions(j)
                    .filter(|&i| w.symbols()[i] != x.symbols()[i])
                    .count();
                prop_assert_eq!(part, expected);
            }
        }
    }

    #[test]
    fn ball_size_matches_formula(blocks in block_lists(), seed in any::<u64>(), r in 0usize..=4) {
        let s = common::space(&blocks);
        prop_assume!(s.cardinality() <= 5000);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = s.word(&random_symbols(&s, &mut rng)).unwrap();
        let r = r.min(s.n());
        let b = ball(&s, &c, r).unwrap();
        prop_assert_eq!(b.len() as u64, common::ball_size_formula(&blocks, r));
        for w in &b {
            prop_assert!(distance(w, &c).unwrap() <= r);
        }
    }

    /// Permuting positions inside a block and symbols per position maps
    /// balls onto balls of the same radius.
    #[test]
    fn balls_follow_space_symmetries(blocks in block_lists(), seed in any::<u64>(), r in 0usize..=3) {
        let s = common::space(&blocks);
        prop_assume!(s.cardinality() <= 5000);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positions: Vec<usize> = (0..s.n()).collect();
        for j in 0..s.blocks().len() {
            positions[s.block_positions(j)].shuffle(&mut rng);
        }
        let relabel: Vec<Vec<u32>> = s
            .radices()
            .iter()
            .map(|&k| {
                let mut p: Vec<u32> = (0..k).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let image = |w: &[u32]| -> Vec<u32> {
            (0..s.n()).map(|i| relabel[i][w[positions[i]] as usize]).collect()
        };
        let c = s.word(&random_symbols(&s, &mut rng)).unwrap();
        let r = r.min(s.n());
        let mapped: BTreeSet<_> = ball(&s, &c, r)
            .unwrap()
            .iter()
            .map(|w| s.word(&image(w.symbols())).unwrap())
            .collect();
        let target = ball(&s, &s.word(&image(c.symbols())).unwrap(), r).unwrap();
        prop_assert_eq!(mapped, target);
    }

    #[test]
    fn swapping_block_order_in_spec_is_rejected(k in 3u32..8, a in 1usize..4, b in 1usize..4) {
        let spec = format!("{}^{},{}^{}", k, a, k - 1, b);
        prop_assert!(MixedSpace::parse(&spec).is_err());
    }
}

#[test]
fn rank_is_a_bijection_on_small_spaces() {
    let family = common::all_spaces(1000);
    assert!(family.len() > 100);
    for blocks in family {
        let s = common::space(&blocks);
        let mut seen = vec![false; s.cardinality() as usize];
        for i in 0..s.cardinality() {
            let w = s.unrank(i).unwrap();
            assert_eq!(w.index(), i);
            assert_eq!(s.rank_symbols(w.symbols()), i, "space {s}");
            assert!(!std::mem::replace(&mut seen[i as usize], true));
        }
        assert!(s.unrank(s.cardinality()).is_err());
    }
}

#[test]
fn rank_order_is_printed_lexicographic_order() {
    let s = common::space(&[(2, 3), (3, 2)]);
    let printed: Vec<String> = s.words().map(|w| w.to_string()).collect();
    let mut sorted = printed.clone();
    sorted.sort();
    assert_eq!(printed, sorted);
    assert_eq!(printed.first().unwrap(), "00000");
    assert_eq!(printed.last().unwrap(), "22111");
}

#[test]
fn ball_extremes() {
    let s = common::space(&[(2, 3), (3, 1)]);
    let c = s.parse_word("2101").unwrap();
    assert_eq!(ball(&s, &c, 0).unwrap().into_iter().collect::<Vec<_>>(), vec![c.clone()]);
    assert_eq!(ball(&s, &c, 4).unwrap().len(), 24);
}

#[test]
fn space_and_word_parse_errors_carry_positions() {
    let err = MixedSpace::parse("2^7,3^x").unwrap_err().to_string();
    assert!(err.contains("position"), "{err}");
    let s = MixedSpace::parse("2^7,3^1").unwrap();
    let err = s.parse_word("30000000").unwrap_err().to_string();
    assert!(err.contains("position 0"), "{err}");
    let err = s.parse_word("00000020").unwrap_err().to_string();
    assert!(err.contains("position 6"), "{err}");
    assert!(MixedSpace::parse("").is_err());
    assert!(MixedSpace::parse("1^3").is_err());
    assert!(MixedSpace::parse("2^0").is_err());
}

//! Shared test helpers: space families and independent reference formulas.
#![allow(dead_code)]

use hampack::MixedSpace;

/// Every space with strictly increasing alphabets (each at least 2) and
/// cardinality at most `limit`, as `(alphabet, length)` block lists.
pub fn all_spaces(limit: u64) -> Vec<Vec<(u32, usize)>> {
    fn go(min_k: u32, remaining: u64, prefix: &mut Vec<(u32, usize)>, out: &mut Vec<Vec<(u32, usize)>>) {
        let mut k = min_k;
        while u64::from(k) <= remaining {
            let mut size = u64::from(k);
            let mut alpha = 1;
            while size <= remaining {
                prefix.push((k, alpha));
                out.push(prefix.clone());
                go(k + 1, remaining / size, prefix, out);
                prefix.pop();
                alpha += 1;
                size *= u64::from(k);
            }
            k += 1;
        }
    }
    let mut out = Vec::new();
    go(2, limit, &mut Vec::new(), &mut out);
    out
}

pub fn space(blocks: &[(u32, usize)]) -> MixedSpace {
    MixedSpace::new(blocks).expect("valid test space")
}

/// Hamming distance computed straight from symbol slices.
pub fn naive_distance(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Ball size from the generating polynomial prod_j (1 + (k_j - 1) x)^{alpha_j}.
pub fn ball_size_formula(blocks: &[(u32, usize)], r: usize) -> u64 {
    let mut poly = vec![1u64];
    for &(k, alpha) in blocks {
        for _ in 0..alpha {
            let mut next = vec![0u64; poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * u64::from(k - 1);
            }
            poly = next;
        }
    }
    poly.iter().take(r + 1).sum()
}

/// Number of ways to write `d` as an ordered sum of parts with `0 <= part_j <= bounds[j]`.
pub fn bounded_compositions(d: usize, bounds: &[usize]) -> usize {
    let mut ways = vec![0usize; d + 1];
    ways[0] = 1;
    for &b in bounds {
        let mut next = vec![0usize; d + 1];
        for (s, w) in ways.iter().enumerate() {
            for part in 0..=b.min(d - s) {
                next[s + part] += w;
            }
        }
        ways = next;
    }
    ways[d]
}

//! Mixed Hamming spaces.
//!
//! A space is a product of alphabet blocks `Z_{k_s}^{α_s} × … × Z_{k_1}^{α_1}`
//! with `k_1 < … < k_s`. Words are printed and stored with the largest
//! alphabet block first, and every word has a mixed-radix rank in which the
//! leftmost printed symbol is the most significant digit. Rank order is
//! therefore the same as lexicographic order on printed words.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One alphabet block: `length` coordinates over `Z_alphabet`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub alphabet: u32,
    pub length: usize,
}

#[derive(Debug)]
struct SpaceInner {
    /// Sorted by strictly increasing alphabet size.
    blocks: Vec<Block>,
    n: usize,
    cardinality: u64,
    /// Alphabet size of every printed position.
    radices: Vec<u32>,
    /// Index into `blocks` of every printed position.
    block_of: Vec<usize>,
    /// Mixed-radix place value of every printed position.
    place_values: Vec<u64>,
}

/// A mixed Hamming space. Cloning is cheap.
#[derive(Clone)]
pub struct MixedSpace {
    inner: Arc<SpaceInner>,
}

impl PartialEq for MixedSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.blocks == other.inner.blocks
    }
}

impl Eq for MixedSpace {}

impl Hash for MixedSpace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.blocks.hash(state);
    }
}

impl fmt::Debug for MixedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedSpace({self})")
    }
}

/// Formats as the CLI spec string, e.g. `2^7,3^1`.
impl fmt::Display for MixedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| format!("{}^{}", b.alphabet, b.length))
            .collect();
        f.write_str(&terms.join(","))
    }
}

/// Builds a validated space from `(alphabet, length)` pairs in any order.
pub fn make_space(spec: &[(u32, usize)]) -> Result<MixedSpace> {
    MixedSpace::new(spec)
}

impl MixedSpace {
    pub fn new(spec: &[(u32, usize)]) -> Result<Self> {
        if spec.is_empty() {
            return Err(Error::InvalidSpace("no alphabet blocks given".into()));
        }
        let mut blocks: Vec<Block> = spec
            .iter()
            .map(|&(alphabet, length)| Block { alphabet, length })
            .collect();
        blocks.sort();
        for b in &blocks {
            if b.alphabet < 2 {
                return Err(Error::InvalidSpace(format!(
                    "alphabet size {} is below 2",
                    b.alphabet
                )));
            }
            if b.length < 1 {
                return Err(Error::InvalidSpace(format!(
                    "block over Z_{} has length 0",
                    b.alphabet
                )));
            }
        }
        for pair in blocks.windows(2) {
            if pair[0].alphabet == pair[1].alphabet {
                return Err(Error::InvalidSpace(format!(
                    "alphabet size {} appears twice",
                    pair[0].alphabet
                )));
            }
        }

        let n: usize = blocks.iter().map(|b| b.length).sum();
        let mut radices = Vec::with_capacity(n);
        let mut block_of = Vec::with_capacity(n);
        for (j, b) in blocks.iter().enumerate().rev() {
            radices.extend(std::iter::repeat(b.alphabet).take(b.length));
            block_of.extend(std::iter::repeat(j).take(b.length));
        }
        let mut place_values = vec![0u64; n];
        let mut acc: u64 = 1;
        for pos in (0..n).rev() {
            place_values[pos] = acc;
            acc = acc.checked_mul(radices[pos] as u64).ok_or_else(|| {
                Error::SpaceTooLarge(format!("cardinality of {spec:?} overflows 64 bits"))
            })?;
        }

        Ok(MixedSpace {
            inner: Arc::new(SpaceInner {
                blocks,
                n,
                cardinality: acc,
                radices,
                block_of,
                place_values,
            }),
        })
    }

    /// Parses the CLI form `k^alpha,k^alpha,...` with strictly increasing `k`.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |position: usize, message: &str| Error::Parse {
            input: text.to_string(),
            position,
            message: message.to_string(),
        };
        let mut spec = Vec::new();
        let mut offset = 0;
        for term in text.split(',') {
            let (k, alpha) = term
                .split_once('^')
                .ok_or_else(|| err(offset, "expected a term of the form k^alpha"))?;
            let k: u32 = k
                .trim()
                .parse()
                .map_err(|_| err(offset, "alphabet size is not an integer"))?;
            let alpha: usize = alpha
                .trim()
                .parse()
                .map_err(|_| err(offset + term.find('^').unwrap_or(0) + 1, "block length is not an integer"))?;
            if let Some(&(prev, _)) = spec.last() {
                if k <= prev {
                    return Err(err(offset, "alphabet sizes must be strictly increasing"));
                }
            }
            spec.push((k, alpha));
            offset += term.len() + 1;
        }
        Self::new(&spec)
    }

    /// Blocks in strictly increasing alphabet order.
    pub fn blocks(&self) -> &[Block] {
        &self.inner.blocks
    }

    /// Number of coordinates.
    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn cardinality(&self) -> u64 {
        self.inner.cardinality
    }

    /// Alphabet size at each printed position.
    pub fn radices(&self) -> &[u32] {
        &self.inner.radices
    }

    /// Block index (into [`blocks`](Self::blocks)) of each printed position.
    pub fn block_of(&self) -> &[usize] {
        &self.inner.block_of
    }

    /// Printed positions belonging to block `j`.
    pub fn block_positions(&self, j: usize) -> std::ops::Range<usize> {
        let start: usize = self.blocks()[j + 1..].iter().map(|b| b.length).sum();
        start..start + self.blocks()[j].length
    }

    /// Cardinality as `usize`, for spaces whose words are enumerated densely.
    pub fn dense_size(&self) -> Result<usize> {
        usize::try_from(self.cardinality())
            .ok()
            .filter(|&c| c <= 1 << 26)
            .ok_or_else(|| Error::SpaceTooLarge(format!("{self} has {} words", self.cardinality())))
    }

    /// True when every alphabet fits the single-digit text format.
    pub fn is_digit_printable(&self) -> bool {
        self.blocks().iter().all(|b| b.alphabet <= 10)
    }

    pub fn zero(&self) -> Codeword {
        Codeword {
            space: self.clone(),
            symbols: vec![0; self.n()].into(),
            index: 0,
        }
    }

    /// The word of rank `index`.
    pub fn unrank(&self, index: u64) -> Result<Codeword> {
        if index >= self.cardinality() {
            return Err(Error::IndexOutOfRange {
                index,
                cardinality: self.cardinality(),
            });
        }
        let mut symbols = vec![0u32; self.n()];
        self.unrank_into(index, &mut symbols);
        Ok(Codeword {
            space: self.clone(),
            symbols: symbols.into(),
            index,
        })
    }

    /// Decodes `index` into `out` without validation or allocation.
    pub fn unrank_into(&self, mut index: u64, out: &mut [u32]) {
        for (pos, &radix) in self.radices().iter().enumerate().rev() {
            out[pos] = (index % radix as u64) as u32;
            index /= radix as u64;
        }
    }

    /// Rank of a raw symbol sequence. Symbols must already be in range.
    pub fn rank_symbols(&self, symbols: &[u32]) -> u64 {
        symbols
            .iter()
            .zip(&self.inner.place_values)
            .map(|(&s, &p)| s as u64 * p)
            .sum()
    }

    pub fn word(&self, symbols: &[u32]) -> Result<Codeword> {
        if symbols.len() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "word has {} symbols, space {self} needs {}",
                symbols.len(),
                self.n()
            )));
        }
        for (pos, (&s, &radix)) in symbols.iter().zip(self.radices()).enumerate() {
            if s >= radix {
                return Err(Error::InvalidArgument(format!(
                    "symbol {s} at position {pos} exceeds alphabet size {radix}"
                )));
            }
        }
        Ok(Codeword {
            space: self.clone(),
            symbols: symbols.into(),
            index: self.rank_symbols(symbols),
        })
    }

    /// Parses a contiguous digit string in printed order, e.g. `20001010`.
    pub fn parse_word(&self, text: &str) -> Result<Codeword> {
        let err = |position: usize, message: String| Error::Parse {
            input: text.to_string(),
            position,
            message,
        };
        let text_trim = text.trim();
        let chars: Vec<char> = text_trim.chars().collect();
        if chars.len() != self.n() {
            return Err(err(
                chars.len().min(self.n()),
                format!("expected {} symbols for space {self}, found {}", self.n(), chars.len()),
            ));
        }
        let mut symbols = Vec::with_capacity(self.n());
        for (pos, (c, &radix)) in chars.iter().zip(self.radices()).enumerate() {
            let s = c
                .to_digit(10)
                .ok_or_else(|| err(pos, format!("`{c}` is not a digit")))?;
            if s >= radix {
                return Err(err(
                    pos,
                    format!("symbol {s} is not below alphabet size {radix}"),
                ));
            }
            symbols.push(s);
        }
        self.word(&symbols)
    }

    pub fn words(&self) -> impl Iterator<Item = Codeword> + '_ {
        (0..self.cardinality()).map(move |i| self.unrank(i).expect("rank in range"))
    }

    /// Hamming distance between raw symbol sequences of this space.
    #[inline]
    pub fn raw_distance(a: &[u32], b: &[u32]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    /// Per-block difference counts between raw symbol sequences.
    pub fn raw_marginals(&self, a: &[u32], b: &[u32]) -> Vec<usize> {
        let mut out = vec![0; self.blocks().len()];
        for ((x, y), &j) in a.iter().zip(b).zip(self.block_of()) {
            if x != y {
                out[j] += 1;
            }
        }
        out
    }
}

/// A point of a mixed space.
#[derive(Clone)]
pub struct Codeword {
    space: MixedSpace,
    symbols: Box<[u32]>,
    index: u64,
}

impl Codeword {
    pub fn space(&self) -> &MixedSpace {
        &self.space
    }

    /// Symbols in printed order.
    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn index(&self) -> u64 {
        self.index
    }
}

/// Rank of a word.
pub fn rank(w: &Codeword) -> u64 {
    w.index
}

/// Word of rank `i`.
pub fn unrank(space: &MixedSpace, i: u64) -> Result<Codeword> {
    space.unrank(i)
}

impl PartialEq for Codeword {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.space == other.space
    }
}

impl Eq for Codeword {}

impl Hash for Codeword {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state);
    }
}

impl PartialOrd for Codeword {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Rank order, which equals lexicographic order of printed words.
impl Ord for Codeword {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index.cmp(&other.index)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.space.is_digit_printable() {
            for s in self.symbols.iter() {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join("."))
        }
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword({self})")
    }
}

fn check_same(w: &Codeword, x: &Codeword) -> Result<()> {
    if w.space != x.space {
        return Err(Error::MismatchedSpaces);
    }
    Ok(())
}

/// Number of positions in which `w` and `x` differ.
pub fn distance(w: &Codeword, x: &Codeword) -> Result<usize> {
    check_same(w, x)?;
    Ok(MixedSpace::raw_distance(&w.symbols, &x.symbols))
}

/// Difference counts per alphabet block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarginalProfile {
    /// Entry `j` counts differences inside block `j` (increasing alphabet order).
    per_block: Vec<usize>,
}

impl MarginalProfile {
    /// Builds a profile from per-block counts in increasing alphabet order.
    pub fn new(space: &MixedSpace, per_block: Vec<usize>) -> Result<Self> {
        if per_block.len() != space.blocks().len() {
            return Err(Error::InvalidProfile(format!(
                "{} entries given, space {space} has {} blocks",
                per_block.len(),
                space.blocks().len()
            )));
        }
        for (m, b) in per_block.iter().zip(space.blocks()) {
            if *m > b.length {
                return Err(Error::InvalidProfile(format!(
                    "{m} differences requested in a block of length {} over Z_{}",
                    b.length, b.alphabet
                )));
            }
        }
        Ok(MarginalProfile { per_block })
    }

    /// Builds a profile from counts listed in printed order (largest alphabet first).
    pub fn from_printed(space: &MixedSpace, printed: &[usize]) -> Result<Self> {
        let mut per_block = printed.to_vec();
        per_block.reverse();
        Self::new(space, per_block)
    }

    pub fn per_block(&self) -> &[usize] {
        &self.per_block
    }

    /// Counts in printed order, largest alphabet first.
    pub fn printed(&self) -> Vec<usize> {
        self.per_block.iter().rev().copied().collect()
    }

    pub fn total(&self) -> usize {
        self.per_block.iter().sum()
    }
}

/// Printed order, e.g. `0,3` for (ternary 0, binary 3).
impl fmt::Display for MarginalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.printed().iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn marginal_distances(w: &Codeword, x: &Codeword) -> Result<MarginalProfile> {
    check_same(w, x)?;
    Ok(MarginalProfile {
        per_block: w.space.raw_marginals(&w.symbols, &x.symbols),
    })
}

/// All words within distance `r` of `center`, in rank order.
pub fn ball(space: &MixedSpace, center: &Codeword, r: usize) -> Result<BTreeSet<Codeword>> {
    if center.space() != space {
        return Err(Error::MismatchedSpaces);
    }
    if r > space.n() {
        return Err(Error::InvalidArgument(format!(
            "radius {r} exceeds word length {}",
            space.n()
        )));
    }
    let mut out = BTreeSet::new();
    let mut current = center.symbols().to_vec();
    ball_rec(space, center.symbols(), &mut current, 0, r, &mut out);
    Ok(out)
}

fn ball_rec(
    space: &MixedSpace,
    center: &[u32],
    current: &mut Vec<u32>,
    pos: usize,
    budget: usize,
    out: &mut BTreeSet<Codeword>,
) {
    if pos == space.n() || budget == 0 {
        let index = space.rank_symbols(current);
        out.insert(Codeword {
            space: space.clone(),
            symbols: current.clone().into(),
            index,
        });
        return;
    }
    ball_rec(space, center, current, pos + 1, budget, out);
    for s in 0..space.radices()[pos] {
        if s != center[pos] {
            current[pos] = s;
            ball_rec(space, center, current, pos + 1, budget - 1, out);
        }
    }
    current[pos] = center[pos];
}

/// Ranks of all words within distance `r` of the word with symbols `center`.
pub(crate) fn ball_ranks(space: &MixedSpace, center: &[u32], r: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut current = center.to_vec();
    ball_ranks_rec(space, center, &mut current, 0, r, &mut out);
    out.sort_unstable();
    out
}

fn ball_ranks_rec(
    space: &MixedSpace,
    center: &[u32],
    current: &mut Vec<u32>,
    pos: usize,
    budget: usize,
    out: &mut Vec<u64>,
) {
    if pos == space.n() || budget == 0 {
        out.push(space.rank_symbols(current));
        return;
    }
    ball_ranks_rec(space, center, current, pos + 1, budget, out);
    for s in 0..space.radices()[pos] {
        if s != center[pos] {
            current[pos] = s;
            ball_ranks_rec(space, center, current, pos + 1, budget - 1, out);
        }
    }
    current[pos] = center[pos];
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s371() -> MixedSpace {
        MixedSpace::new(&[(2, 7), (3, 1)]).unwrap()
    }

    #[test]
    fn make_space_examples() {
        let s = s371();
        assert_eq!(s.n(), 8);
        assert_eq!(s.cardinality(), 384);
        let s = make_space(&[(2, 1)]).unwrap();
        assert_eq!((s.n(), s.cardinality()), (1, 2));
        let s = make_space(&[(5, 1), (2, 2), (3, 2)]).unwrap();
        assert_eq!((s.n(), s.cardinality()), (5, 180));
        assert_eq!(s.blocks()[0].alphabet, 2);
        assert_eq!(s.radices(), &[5, 3, 3, 2, 2]);
    }

    #[test]
    fn make_space_errors() {
        assert!(make_space(&[]).is_err());
        assert!(make_space(&[(1, 3)]).is_err());
        assert!(make_space(&[(2, 0)]).is_err());
        assert!(make_space(&[(2, 1), (2, 3)]).is_err());
    }

    #[test]
    fn parse_space_string() {
        assert_eq!(MixedSpace::parse("2^7,3^1").unwrap(), s371());
        let err = MixedSpace::parse("3^1,2^7").unwrap_err();
        assert!(matches!(err, Error::Parse { position: 4, .. }), "{err}");
        assert!(MixedSpace::parse("2^x").is_err());
        assert!(MixedSpace::parse("27").is_err());
        assert_eq!(s371().to_string(), "2^7,3^1");
    }

    #[test]
    fn distance_examples() {
        let s = s371();
        let z = s.parse_word("00000000").unwrap();
        let a = s.parse_word("00000111").unwrap();
        let b = s.parse_word("20001010").unwrap();
        assert_eq!(distance(&z, &a).unwrap(), 3);
        assert_eq!(distance(&a, &a).unwrap(), 0);
        assert_eq!(distance(&z, &b).unwrap(), 3);
        let other = make_space(&[(2, 8)]).unwrap();
        assert!(matches!(
            distance(&z, &other.zero()),
            Err(Error::MismatchedSpaces)
        ));
    }

    #[test]
    fn marginal_examples() {
        let s = s371();
        let z = s.zero();
        let a = s.parse_word("00000111").unwrap();
        let p = marginal_distances(&z, &a).unwrap();
        assert_eq!(p.printed(), vec![0, 3]);
        assert_eq!(p.total(), 3);

        let s43 = make_space(&[(2, 4), (3, 3)]).unwrap();
        let w = s43.parse_word("1110000").unwrap();
        assert_eq!(marginal_distances(&s43.zero(), &w).unwrap().printed(), vec![3, 0]);
        assert_eq!(marginal_distances(&w, &w).unwrap().per_block(), &[0, 0]);
    }

    #[test]
    fn rank_unrank_examples() {
        let s = s371();
        assert_eq!(s.unrank(0).unwrap().to_string(), "00000000");
        assert_eq!(unrank(&make_space(&[(2, 1)]).unwrap(), 1).unwrap().to_string(), "1");
        assert!(matches!(s.unrank(384), Err(Error::IndexOutOfRange { .. })));
        let w = s.parse_word("10000001").unwrap();
        assert_eq!(rank(&w), 129);
    }

    #[test]
    fn parse_word_diagnostics() {
        let s = s371();
        match s.parse_word("00300000") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        match s.parse_word("3000000") {
            Err(Error::Parse { .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(s.parse_word("2000000x").is_err());
        // position 0 is ternary so 2 is fine there
        assert!(s.parse_word("20000000").is_ok());
    }

    #[test]
    fn ball_examples() {
        let s = s371();
        let z = s.zero();
        assert_eq!(ball(&s, &z, 2).unwrap().len(), 45);
        let c = s.parse_word("21010101").unwrap();
        let b0 = ball(&s, &c, 0).unwrap();
        assert_eq!(b0.into_iter().collect::<Vec<_>>(), vec![c.clone()]);
        assert_eq!(ball(&s, &c, 8).unwrap().len(), 384);
        assert!(ball(&s, &c, 9).is_err());
    }

    #[test]
    fn ball_ranks_match_ball() {
        let s = make_space(&[(2, 3), (3, 1), (4, 1)]).unwrap();
        let c = s.parse_word("32101").unwrap();
        for r in 0..=s.n() {
            let a: Vec<u64> = ball(&s, &c, r).unwrap().iter().map(|w| w.index()).collect();
            assert_eq!(a, ball_ranks(&s, c.symbols(), r));
        }
    }
}

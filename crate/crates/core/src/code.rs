//! Codes, their minimum distance, contact graphs, and the connectification
//! transform that turns any packing into an equally large one whose contact
//! graph is connected.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Codeword, MixedSpace};

/// A set of words from one space, kept in rank order.
#[derive(Clone, PartialEq, Eq)]
pub struct Code {
    space: MixedSpace,
    words: Vec<Codeword>,
}

impl Code {
    /// Fails on duplicates or words from another space.
    pub fn new(space: &MixedSpace, words: impl IntoIterator<Item = Codeword>) -> Result<Self> {
        let mut words: Vec<Codeword> = words.into_iter().collect();
        if words.iter().any(|w| w.space() != space) {
            return Err(Error::MismatchedSpaces);
        }
        words.sort();
        if let Some(pair) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::DuplicateWord(pair[0].to_string()));
        }
        Ok(Code {
            space: space.clone(),
            words,
        })
    }

    pub fn empty(space: &MixedSpace) -> Self {
        Code {
            space: space.clone(),
            words: Vec::new(),
        }
    }

    /// Parses the text code format: one printed word per line, `#` comments.
    pub fn parse(space: &MixedSpace, text: &str) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut words = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let w = space.parse_word(line).map_err(|e| Error::CodeFile {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            if !seen.insert(w.index()) {
                return Err(Error::CodeFile {
                    line: lineno + 1,
                    message: format!("duplicate word {w}"),
                });
            }
            words.push(w);
        }
        Code::new(space, words)
    }

    pub fn space(&self) -> &MixedSpace {
        &self.space
    }

    pub fn words(&self) -> &[Codeword] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Codeword) -> bool {
        self.words.binary_search(w).is_ok()
    }

    /// One word per line, in rank order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let w = &self.words;
        (0..w.len()).flat_map(move |i| {
            (i + 1..w.len())
                .map(move |j| (i, j, MixedSpace::raw_distance(w[i].symbols(), w[j].symbols())))
        })
    }

    /// First pair closer than `d`, if any.
    pub(crate) fn first_violation(&self, d: usize) -> Option<(usize, usize, usize)> {
        self.pairs().find(|&(_, _, dist)| dist < d)
    }

    fn require_feasible(&self, d: usize) -> Result<()> {
        match self.first_violation(d) {
            Some((i, j, distance)) => Err(Error::Infeasible {
                a: self.words[i].to_string(),
                b: self.words[j].to_string(),
                distance,
                d,
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Code")
            .field("space", &self.space)
            .field("words", &self.words)
            .finish()
    }
}

/// Minimum pairwise distance.
pub fn min_distance(code: &Code) -> Result<usize> {
    code.pairs()
        .map(|(_, _, d)| d)
        .min()
        .ok_or(Error::TooFewWords(code.len()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub a: String,
    pub b: String,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub space: String,
    pub d: usize,
    pub cardinality: usize,
    /// `None` for codes with fewer than two words.
    pub min_distance: Option<usize>,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "space        {}", self.space)?;
        writeln!(f, "d            {}", self.d)?;
        writeln!(f, "cardinality  {}", self.cardinality)?;
        match self.min_distance {
            Some(m) => writeln!(f, "min distance {m}")?,
            None => writeln!(f, "min distance -")?,
        }
        for v in &self.violations {
            writeln!(f, "violation    {} {} at distance {}", v.a, v.b, v.distance)?;
        }
        write!(f, "result       {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Checks a code against minimum distance `d`, listing every violating pair.
pub fn verify(code: &Code, d: usize) -> VerifyReport {
    let violations: Vec<Violation> = code
        .pairs()
        .filter(|&(_, _, dist)| dist < d)
        .map(|(i, j, distance)| Violation {
            a: code.words[i].to_string(),
            b: code.words[j].to_string(),
            distance,
        })
        .collect();
    VerifyReport {
        space: code.space.to_string(),
        d,
        cardinality: code.len(),
        min_distance: min_distance(code).ok(),
        passed: violations.is_empty(),
        violations,
    }
}

/// Graph on the words of a code with edges exactly at distance `d`.
#[derive(Debug, Clone)]
pub struct ContactGraph {
    code: Code,
    d: usize,
    adjacency: Vec<Vec<usize>>,
}

impl ContactGraph {
    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Neighbours of vertex `i` (indices into `code().words()`).
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }
}

pub fn contact_graph(code: &Code, d: usize) -> Result<ContactGraph> {
    code.require_feasible(d)?;
    let mut adjacency = vec![Vec::new(); code.len()];
    for (i, j, dist) in code.pairs() {
        if dist == d {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    Ok(ContactGraph {
        code: code.clone(),
        d,
        adjacency,
    })
}

/// Disjoint-set forest with path halving and union by size.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

pub fn is_connected(g: &ContactGraph) -> Result<bool> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidArgument("contact graph has no vertices".into()));
    }
    let mut uf = UnionFind::new(n);
    let mut components = n;
    for (i, j) in g.edges() {
        if uf.union(i, j) {
            components -= 1;
        }
    }
    Ok(components == 1)
}

/// Exchanges symbols `a` and `b` at position `j` in every word.
///
/// This is an isometry of the space, so all pairwise distances are kept.
pub fn symbol_swap(words: &[Codeword], j: usize, a: u32, b: u32) -> Result<Vec<Codeword>> {
    let Some(first) = words.first() else {
        return Ok(Vec::new());
    };
    let space = first.space().clone();
    if j >= space.n() {
        return Err(Error::InvalidSwap(format!(
            "position {j} outside word length {}",
            space.n()
        )));
    }
    let radix = space.radices()[j];
    if a == b || a >= radix || b >= radix {
        return Err(Error::InvalidSwap(format!(
            "symbols {a} and {b} at position {j} (alphabet size {radix})"
        )));
    }
    words
        .iter()
        .map(|w| {
            if w.space() != &space {
                return Err(Error::MismatchedSpaces);
            }
            let mut s = w.symbols().to_vec();
            swap_symbol(&mut s, j, a, b);
            space.word(&s)
        })
        .collect()
}

#[inline]
fn swap_symbol(word: &mut [u32], j: usize, a: u32, b: u32) {
    if word[j] == a {
        word[j] = b;
    } else if word[j] == b {
        word[j] = a;
    }
}

/// How connectify picks its starting word.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SeedChoice {
    /// Lexicographically smallest word of the input.
    #[default]
    Smallest,
    /// Uniformly random word drawn from a seeded generator.
    Random(u64),
}

/// One outer-loop iteration of connectify.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectifyStep {
    /// Words not yet attached, at the start of the iteration.
    pub remaining: usize,
    /// Distance between the attached and unattached parts (0 once nothing remains).
    pub gap: usize,
    /// Words absorbed at distance exactly `d` during this iteration.
    pub absorbed: usize,
    /// The symbol swap `(position, a, b)` applied to the unattached part, if any.
    pub swap: Option<(usize, u32, u32)>,
}

#[derive(Debug, Clone)]
pub struct ConnectifyTrace {
    pub code: Code,
    pub steps: Vec<ConnectifyStep>,
}

/// Returns an equally large `d`-feasible code with a connected contact graph.
pub fn connectify(code: &Code, d: usize) -> Result<Code> {
    connectify_traced(code, d, SeedChoice::Smallest).map(|t| t.code)
}

pub fn connectify_traced(code: &Code, d: usize, seed: SeedChoice) -> Result<ConnectifyTrace> {
    if code.is_empty() {
        return Err(Error::InvalidArgument("cannot connectify an empty code".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("distance must be positive".into()));
    }
    code.require_feasible(d)?;
    let space = code.space().clone();

    let mut rest: Vec<Vec<u32>> = code.words().iter().map(|w| w.symbols().to_vec()).collect();
    let seed_index = match seed {
        SeedChoice::Smallest => 0,
        SeedChoice::Random(s) => {
            let idx: Vec<usize> = (0..rest.len()).collect();
            *idx.choose(&mut ChaCha8Rng::seed_from_u64(s)).expect("nonempty")
        }
    };
    let mut attached = vec![rest.remove(seed_index)];
    let mut steps = Vec::new();

    let gap_of = |attached: &[Vec<u32>], rest: &[Vec<u32>]| -> usize {
        rest.iter()
            .flat_map(|y| attached.iter().map(move |x| MixedSpace::raw_distance(x, y)))
            .min()
            .unwrap_or(0)
    };

    while !rest.is_empty() {
        let mut step = ConnectifyStep {
            remaining: rest.len(),
            gap: gap_of(&attached, &rest),
            absorbed: 0,
            swap: None,
        };

        // grow the attached part through contacts at distance exactly d
        loop {
            let hit = rest.iter().position(|y| {
                attached
                    .iter()
                    .any(|x| MixedSpace::raw_distance(x, y) == d)
            });
            match hit {
                Some(k) => {
                    attached.push(rest.remove(k));
                    step.absorbed += 1;
                }
                None => break,
            }
        }

        if !rest.is_empty() {
            // closest unattached word, ties broken lexicographically
            let (gap, far) = rest
                .iter()
                .map(|y| {
                    let dist = attached
                        .iter()
                        .map(|x| MixedSpace::raw_distance(x, y))
                        .min()
                        .expect("attached part is nonempty");
                    (dist, y)
                })
                .min()
                .expect("rest is nonempty");
            assert!(gap > d, "packing lost d-feasibility during connectify");
            let near = attached
                .iter()
                .filter(|x| MixedSpace::raw_distance(x, far) == gap)
                .min()
                .expect("some attached word realises the gap");
            let j = (0..space.n())
                .find(|&j| near[j] != far[j])
                .expect("words at positive distance differ somewhere");
            let (a, b) = (near[j], far[j]);
            for y in rest.iter_mut() {
                swap_symbol(y, j, a, b);
            }
            step.swap = Some((j, a, b));
        }
        steps.push(step);
    }

    let words = attached
        .iter()
        .map(|s| space.word(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConnectifyTrace {
        code: Code::new(&space, words)?,
        steps,
    })
}

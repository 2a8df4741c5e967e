//! Binary packing models over a mixed space.
//!
//! Every model has the same shape: a set of binary variables (one per free
//! word), pairwise conflict rows `x_a + x_b <= 1`, and a constant offset for
//! the words pinned to one. The builders differ only in which words are
//! pinned or eliminated before the conflicts are generated.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::code::Code;
use crate::error::{Error, Result};
use crate::space::{ball_ranks, distance, Codeword, MarginalProfile, MixedSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Every word is a free variable.
    Full,
    /// The zero word is pinned to one and its `d-1` ball pinned to zero.
    ZeroFixed,
    /// As `ZeroFixed`, with the pinned-to-zero words dropped entirely.
    Reduced,
    /// The zero word and one word at distance `d` pinned, both `d-1` balls dropped.
    Pair,
    /// The full model with contacts of one marginal profile also forbidden.
    ProfileForbidding,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Full => "full",
            ModelKind::ZeroFixed => "zero",
            ModelKind::Reduced => "reduced",
            ModelKind::Pair => "pair",
            ModelKind::ProfileForbidding => "forbid",
        })
    }
}

#[derive(Clone)]
pub struct PackingModel {
    space: MixedSpace,
    d: usize,
    kind: ModelKind,
    fixed_one: Vec<u64>,
    fixed_zero: Vec<u64>,
    free: Vec<u64>,
    /// Conflict adjacency over positions in `free`.
    conflicts: Vec<BitSet>,
    forbidden_profile: Option<MarginalProfile>,
}

impl fmt::Debug for PackingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PackingModel")
            .field("space", &self.space)
            .field("d", &self.d)
            .field("kind", &self.kind)
            .field("stats", &model_stats(self))
            .finish()
    }
}

/// Whether two words may not both be selected.
fn conflict_raw(
    space: &MixedSpace,
    d: usize,
    profile: Option<&MarginalProfile>,
    a: &[u32],
    b: &[u32],
) -> bool {
    let dist = MixedSpace::raw_distance(a, b);
    if dist == 0 {
        return false;
    }
    if dist < d {
        return true;
    }
    match profile {
        Some(p) if dist == d => space.raw_marginals(a, b) == p.per_block(),
        _ => false,
    }
}

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument("minimum distance must be at least 1".into()));
    }
    Ok(())
}

impl PackingModel {
    fn assemble(
        space: &MixedSpace,
        d: usize,
        kind: ModelKind,
        fixed_one: Vec<u64>,
        fixed_zero: Vec<u64>,
        free: Vec<u64>,
        forbidden_profile: Option<MarginalProfile>,
    ) -> Self {
        let n = space.n();
        let mut free_symbols = vec![0u32; free.len() * n];
        for (chunk, &r) in free_symbols.chunks_mut(n.max(1)).zip(&free) {
            space.unrank_into(r, chunk);
        }
        let m = free.len();
        let profile = forbidden_profile.as_ref();
        let conflicts: Vec<BitSet> = (0..m)
            .into_par_iter()
            .map(|i| {
                let a = &free_symbols[i * n..(i + 1) * n];
                let mut row = BitSet::new(m);
                for j in 0..m {
                    if j != i && conflict_raw(space, d, profile, a, &free_symbols[j * n..(j + 1) * n]) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        PackingModel {
            space: space.clone(),
            d,
            kind,
            fixed_one,
            fixed_zero,
            free,
            conflicts,
            forbidden_profile,
        }
    }

    pub fn space(&self) -> &MixedSpace {
        &self.space
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Ranks of words pinned to one, ascending.
    pub fn fixed_one(&self) -> &[u64] {
        &self.fixed_one
    }

    /// Ranks of words pinned to zero, ascending.
    pub fn fixed_zero(&self) -> &[u64] {
        &self.fixed_zero
    }

    /// Ranks of the free words, ascending.
    pub fn free(&self) -> &[u64] {
        &self.free
    }

    pub fn forbidden_profile(&self) -> Option<&MarginalProfile> {
        self.forbidden_profile.as_ref()
    }

    /// Constant added to the objective for the words pinned to one.
    pub fn objective_offset(&self) -> usize {
        self.fixed_one.len()
    }

    /// Conflict neighbours of free word `i` (positions into [`free`](Self::free)).
    pub fn conflict_row(&self, i: usize) -> &BitSet {
        &self.conflicts[i]
    }

    pub(crate) fn conflict_rows(&self) -> &[BitSet] {
        &self.conflicts
    }

    pub fn free_word(&self, i: usize) -> Codeword {
        self.space.unrank(self.free[i]).expect("free ranks are in range")
    }

    pub fn fixed_one_words(&self) -> Vec<Codeword> {
        self.fixed_one
            .iter()
            .map(|&r| self.space.unrank(r).expect("rank in range"))
            .collect()
    }

    /// Whether two words of the model's space conflict under this model's rules.
    pub fn is_conflict(&self, a: &Codeword, b: &Codeword) -> bool {
        conflict_raw(
            &self.space,
            self.d,
            self.forbidden_profile.as_ref(),
            a.symbols(),
            b.symbols(),
        )
    }

    /// Conflicting pairs `(i, j)` with `i < j`, as positions into `free`.
    pub fn conflict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.conflicts
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Pins `forced` to one and drops every free word conflicting with them.
    ///
    /// Returns `None` when the pins cannot hold together: a forced word is
    /// already pinned to zero or eliminated, or two pinned words conflict.
    pub fn with_forced(&self, forced: &[Codeword]) -> Result<Option<PackingModel>> {
        let mut ones: BTreeSet<u64> = self.fixed_one.iter().copied().collect();
        for w in forced {
            if w.space() != &self.space {
                return Err(Error::MismatchedSpaces);
            }
            let r = w.index();
            if !ones.contains(&r) && self.free.binary_search(&r).is_err() {
                return Ok(None);
            }
            ones.insert(r);
        }
        let pinned: Vec<Codeword> = ones
            .iter()
            .map(|&r| self.space.unrank(r).expect("rank in range"))
            .collect();
        for (i, a) in pinned.iter().enumerate() {
            if pinned[i + 1..].iter().any(|b| self.is_conflict(a, b)) {
                return Ok(None);
            }
        }
        let mut fixed_zero: BTreeSet<u64> = self.fixed_zero.iter().copied().collect();
        let mut free = Vec::new();
        for (i, &r) in self.free.iter().enumerate() {
            if ones.contains(&r) {
                continue;
            }
            let w = self.free_word(i);
            if pinned.iter().any(|p| self.is_conflict(p, &w)) {
                if self.kind == ModelKind::ZeroFixed {
                    fixed_zero.insert(r);
                }
            } else {
                free.push(r);
            }
        }
        Ok(Some(Self::assemble(
            &self.space,
            self.d,
            self.kind,
            ones.into_iter().collect(),
            fixed_zero.into_iter().collect(),
            free,
            self.forbidden_profile.clone(),
        )))
    }

    /// Checks the structural invariants; used by tests and debug assertions.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidArgument(m));
        let ones: BTreeSet<u64> = self.fixed_one.iter().copied().collect();
        let zeros: BTreeSet<u64> = self.fixed_zero.iter().copied().collect();
        for r in &self.free {
            if ones.contains(r) || zeros.contains(r) {
                return fail(format!("rank {r} is both free and fixed"));
            }
        }
        if ones.intersection(&zeros).next().is_some() {
            return fail("a word is pinned to both one and zero".into());
        }
        let pinned = self.fixed_one_words();
        for (i, a) in pinned.iter().enumerate() {
            for b in &pinned[i + 1..] {
                if self.is_conflict(a, b) {
                    return fail(format!("pinned words {a} and {b} conflict"));
                }
            }
        }
        for i in 0..self.free.len() {
            let w = self.free_word(i);
            if let Some(p) = pinned.iter().find(|p| self.is_conflict(p, &w)) {
                return fail(format!("free word {w} conflicts with pinned word {p}"));
            }
            for j in 0..self.free.len() {
                let expect = i != j && self.is_conflict(&w, &self.free_word(j));
                if self.conflicts[i].contains(j) != expect {
                    return fail(format!("conflict row {i} disagrees at {j}"));
                }
            }
        }
        Ok(())
    }
}

fn all_ranks(space: &MixedSpace) -> Result<std::ops::Range<u64>> {
    space.dense_size()?;
    Ok(0..space.cardinality())
}

/// Every word free; conflicts at distance `1..=d-1`.
pub fn build_full(space: &MixedSpace, d: usize) -> Result<PackingModel> {
    check_d(d)?;
    let free = all_ranks(space)?.collect();
    Ok(PackingModel::assemble(space, d, ModelKind::Full, vec![], vec![], free, None))
}

/// Zero word pinned to one, its punctured `d-1` ball pinned to zero.
pub fn build_zero_fixed(space: &MixedSpace, d: usize) -> Result<PackingModel> {
    check_d(d)?;
    let z = vec![0u32; space.n()];
    let near: BTreeSet<u64> = ball_ranks(space, &z, d - 1).into_iter().collect();
    let free = all_ranks(space)?.filter(|r| !near.contains(r)).collect();
    let fixed_zero = near.into_iter().filter(|&r| r != 0).collect();
    Ok(PackingModel::assemble(
        space,
        d,
        ModelKind::ZeroFixed,
        vec![0],
        fixed_zero,
        free,
        None,
    ))
}

/// Zero word pinned to one and the rest of its `d-1` ball removed from the model.
pub fn build_reduced(space: &MixedSpace, d: usize) -> Result<PackingModel> {
    check_d(d)?;
    let z = vec![0u32; space.n()];
    let near: BTreeSet<u64> = ball_ranks(space, &z, d - 1).into_iter().collect();
    let free = all_ranks(space)?.filter(|r| !near.contains(r)).collect();
    Ok(PackingModel::assemble(
        space,
        d,
        ModelKind::Reduced,
        vec![0],
        vec![],
        free,
        None,
    ))
}

/// Zero word and `second` pinned; every word within `d-1` of either is removed.
pub fn build_pair(space: &MixedSpace, d: usize, second: &Codeword) -> Result<PackingModel> {
    check_d(d)?;
    let z = space.zero();
    let found = distance(&z, second)?;
    if found != d {
        return Err(Error::WrongDistance {
            word: second.to_string(),
            expected: d,
            found,
        });
    }
    let mut near: BTreeSet<u64> = ball_ranks(space, z.symbols(), d - 1).into_iter().collect();
    near.extend(ball_ranks(space, second.symbols(), d - 1));
    let free = all_ranks(space)?
        .filter(|r| !near.contains(r) && *r != second.index())
        .collect();
    Ok(PackingModel::assemble(
        space,
        d,
        ModelKind::Pair,
        vec![0, second.index()],
        vec![],
        free,
        None,
    ))
}

/// Full model plus conflicts between every pair at distance exactly `d`
/// whose marginal profile equals `profile`.
pub fn build_profile_forbidding(
    space: &MixedSpace,
    d: usize,
    profile: &MarginalProfile,
) -> Result<PackingModel> {
    check_d(d)?;
    // re-validate against this space in case the profile was built for another
    let profile = MarginalProfile::new(space, profile.per_block().to_vec())?;
    if profile.total() != d {
        return Err(Error::InvalidProfile(format!(
            "profile {profile} sums to {}, expected {d}",
            profile.total()
        )));
    }
    let free = all_ranks(space)?.collect();
    Ok(PackingModel::assemble(
        space,
        d,
        ModelKind::ProfileForbidding,
        vec![],
        vec![],
        free,
        Some(profile),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub free: usize,
    pub fixed_one: usize,
    pub fixed_zero: usize,
    pub conflicts: usize,
}

pub fn model_stats(model: &PackingModel) -> ModelStats {
    ModelStats {
        free: model.free.len(),
        fixed_one: model.fixed_one.len(),
        fixed_zero: model.fixed_zero.len(),
        conflicts: model.conflicts.iter().map(BitSet::count).sum::<usize>() / 2,
    }
}

/// Selected words of an external solver solution (`name value` or
/// `name = value` lines), together with the model's pinned words.
///
/// Lines whose first token is not a variable name are ignored, so most
/// solver dumps can be fed in after trimming headers.
pub fn read_solution(model: &PackingModel, text: &str) -> Result<Code> {
    let space = model.space();
    let mut words: BTreeSet<Codeword> = model.fixed_one_words().into_iter().collect();
    for (lineno, line) in text.lines().enumerate() {
        let cleaned = line.replace(['=', ':'], " ");
        let mut tokens = cleaned.split_whitespace();
        let Some(name) = tokens.next() else { continue };
        let Some(body) = name.strip_prefix("x_") else { continue };
        let value: f64 = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::CodeFile {
                line: lineno + 1,
                message: format!("variable {name} has no numeric value"),
            })?;
        if value < 0.5 {
            continue;
        }
        let w = crate::emit::word_from_var_body(space, body).map_err(|e| Error::CodeFile {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        words.insert(w);
    }
    Code::new(space, words)
}

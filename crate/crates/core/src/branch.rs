//! Pair branching.
//!
//! Some maximum packing has a connected contact graph, so when it has at
//! least two words it contains a pair at distance exactly `d`. Translating
//! one word of that pair to zero and permuting coordinates inside each block
//! maps the other onto a canonical word determined only by how the `d`
//! differences split across the alphabet blocks. The packing number is
//! therefore the best over one pinned-pair model per split.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_pair, build_profile_forbidding};
use crate::solver::{solve_forced_with, solve_with, SolveBudget, SolveOptions, SolveResult, SolveStatus};
use crate::space::{distance, marginal_distances, Codeword, MarginalProfile, MixedSpace};
use crate::code::Code;

/// One canonical choice of the second pinned word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSpec {
    pub space: MixedSpace,
    pub d: usize,
    pub profile: MarginalProfile,
    /// Within each block, the last `m_j` positions hold symbol 1.
    pub second: Codeword,
}

impl BranchSpec {
    pub fn new(space: &MixedSpace, profile: MarginalProfile) -> Result<Self> {
        let profile = MarginalProfile::new(space, profile.per_block().to_vec())?;
        let mut symbols = vec![0u32; space.n()];
        for (j, &m) in profile.per_block().iter().enumerate() {
            let positions = space.block_positions(j);
            for pos in positions.end - m..positions.end {
                symbols[pos] = 1;
            }
        }
        let second = space.word(&symbols)?;
        Ok(BranchSpec {
            space: space.clone(),
            d: profile.total(),
            profile,
            second,
        })
    }
}

/// One branch per split of `d` across the blocks, ordered lexicographically
/// on the profile read largest alphabet first. Empty when `d > n` or `d == 0`.
pub fn enumerate_branches(space: &MixedSpace, d: usize) -> Vec<BranchSpec> {
    let mut out = Vec::new();
    if d == 0 || d > space.n() {
        return out;
    }
    // printed order: block s-1 first
    let lengths: Vec<usize> = space.blocks().iter().rev().map(|b| b.length).collect();
    let mut current = Vec::with_capacity(lengths.len());
    compositions(&lengths, d, &mut current, &mut |printed| {
        let profile = MarginalProfile::from_printed(space, printed).expect("parts within block lengths");
        out.push(BranchSpec::new(space, profile).expect("canonical word is valid"));
    });
    out
}

fn compositions(caps: &[usize], remaining: usize, current: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    let k = current.len();
    if k == caps.len() {
        if remaining == 0 {
            emit(current);
        }
        return;
    }
    let rest: usize = caps[k + 1..].iter().sum();
    let lo = remaining.saturating_sub(rest);
    for m in lo..=caps[k].min(remaining) {
        current.push(m);
        compositions(caps, remaining - m, current, emit);
        current.pop();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditOutcome {
    /// Every packing of at least `known_lower` words has a contact pair of this profile.
    BranchUnavoidable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AuditMethod {
    /// More words than patterns on the blocks the profile leaves untouched.
    Pigeonhole { patterns: u64 },
    /// Solved the profile-forbidding model; `bound` is its proven upper bound.
    Solved { bound: usize, status: SolveStatus },
    /// `known_lower` is too small for the argument to say anything.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub profile: Vec<usize>,
    pub known_lower: usize,
    pub outcome: AuditOutcome,
    pub method: AuditMethod,
}

/// Decides whether every packing with at least `known_lower` words must
/// contain a contact pair whose differences split as `profile`.
///
/// When the profile covers whole blocks and `known_lower` exceeds the number
/// of patterns on the remaining blocks, two words agree outside the profile
/// blocks and so differ in exactly those blocks. Otherwise the model that
/// forbids such contacts is solved with the zero word pinned (every
/// translation preserves marginal profiles); if it cannot reach
/// `known_lower`, the branch is unavoidable.
pub fn audit_branch(
    space: &MixedSpace,
    d: usize,
    profile: &MarginalProfile,
    known_lower: usize,
    budget: SolveBudget,
    options: SolveOptions,
) -> Result<AuditReport> {
    let profile = MarginalProfile::new(space, profile.per_block().to_vec())?;
    if profile.total() != d {
        return Err(Error::InvalidProfile(format!(
            "profile {profile} sums to {}, expected {d}",
            profile.total()
        )));
    }
    let report = |outcome, method| AuditReport {
        profile: profile.printed(),
        known_lower,
        outcome,
        method,
    };
    if known_lower <= 2 {
        return Ok(report(AuditOutcome::Inconclusive, AuditMethod::Trivial));
    }

    let whole_blocks = profile
        .per_block()
        .iter()
        .zip(space.blocks())
        .all(|(&m, b)| m == 0 || m == b.length);
    if whole_blocks {
        let patterns = profile
            .per_block()
            .iter()
            .zip(space.blocks())
            .filter(|(&m, _)| m == 0)
            .try_fold(1u64, |acc, (_, b)| acc.checked_mul((b.alphabet as u64).checked_pow(b.length as u32)?));
        if let Some(patterns) = patterns {
            if known_lower as u64 > patterns {
                return Ok(report(
                    AuditOutcome::BranchUnavoidable,
                    AuditMethod::Pigeonhole { patterns },
                ));
            }
        }
    }

    let model = build_profile_forbidding(space, d, &profile)?;
    let budget = SolveBudget {
        lower_bound: Some(known_lower - 1),
        ..budget
    };
    let result = solve_forced_with(&model, &[space.zero()], budget, options)?;
    let outcome = if result.status != SolveStatus::BudgetExhausted && result.upper_bound < known_lower {
        AuditOutcome::BranchUnavoidable
    } else {
        AuditOutcome::Inconclusive
    };
    Ok(report(
        outcome,
        AuditMethod::Solved {
            bound: result.upper_bound,
            status: result.status,
        },
    ))
}

/// Outcome of one branch inside [`packing_number_traced`].
#[derive(Debug, Clone, Serialize)]
pub struct BranchOutcome {
    pub profile: Vec<usize>,
    pub second: String,
    pub status: SolveStatus,
    pub value: usize,
    pub bound: usize,
    pub nodes: u64,
}

#[derive(Debug, Clone)]
pub struct PackingTrace {
    pub result: SolveResult,
    pub branches: Vec<BranchOutcome>,
}

/// Maximum packing size, computed as the best over all canonical pair branches.
pub fn packing_number(space: &MixedSpace, d: usize, budget: SolveBudget) -> Result<SolveResult> {
    packing_number_with(space, d, budget, SolveOptions::default())
}

pub fn packing_number_with(
    space: &MixedSpace,
    d: usize,
    budget: SolveBudget,
    options: SolveOptions,
) -> Result<SolveResult> {
    packing_number_traced(space, d, budget, options).map(|t| t.result)
}

pub fn packing_number_traced(
    space: &MixedSpace,
    d: usize,
    budget: SolveBudget,
    options: SolveOptions,
) -> Result<PackingTrace> {
    if d == 0 {
        return Err(Error::InvalidArgument("minimum distance must be at least 1".into()));
    }
    let start = Instant::now();
    if d > space.n() {
        let witness = Code::new(space, [space.zero()])?;
        return Ok(PackingTrace {
            result: SolveResult {
                status: SolveStatus::Optimal,
                best_value: 1,
                upper_bound: 1,
                witness,
                elapsed: start.elapsed(),
                node_count: 0,
            },
            branches: Vec::new(),
        });
    }

    let deadline = budget.time_limit.map(|t| start + t);
    let mut floor = budget.lower_bound;
    let mut best: Option<SolveResult> = None;
    let mut upper = 0;
    let mut nodes = 0u64;
    let mut exhausted = false;
    let mut branches = Vec::new();

    for branch in enumerate_branches(space, d) {
        debug_assert_eq!(distance(&space.zero(), &branch.second)?, d);
        debug_assert_eq!(marginal_distances(&space.zero(), &branch.second)?, branch.profile);
        let remaining_time = deadline.map(|dl| dl.saturating_duration_since(Instant::now()));
        let remaining_nodes = budget.node_limit.map(|l| l.saturating_sub(nodes));
        if remaining_time == Some(Duration::ZERO) || remaining_nodes == Some(0) {
            exhausted = true;
            upper = space.cardinality() as usize;
            break;
        }
        let model = build_pair(space, d, &branch.second)?;
        let r = solve_with(
            &model,
            SolveBudget {
                time_limit: remaining_time,
                node_limit: remaining_nodes,
                lower_bound: floor,
            },
            options,
        );
        nodes += r.node_count;
        upper = upper.max(r.upper_bound);
        exhausted |= r.status == SolveStatus::BudgetExhausted;
        floor = Some(floor.unwrap_or(0).max(r.best_value));
        branches.push(BranchOutcome {
            profile: branch.profile.printed(),
            second: branch.second.to_string(),
            status: r.status,
            value: r.best_value,
            bound: r.upper_bound,
            nodes: r.node_count,
        });
        if best.as_ref().map_or(true, |b| r.best_value > b.best_value) {
            best = Some(r);
        }
    }

    let best = best.expect("at least one branch when d <= n");
    let status = if exhausted {
        SolveStatus::BudgetExhausted
    } else if upper == best.best_value {
        SolveStatus::Optimal
    } else {
        SolveStatus::FeasibleLowerBound
    };
    Ok(PackingTrace {
        result: SolveResult {
            status,
            best_value: best.best_value,
            upper_bound: upper.max(best.best_value),
            witness: best.witness,
            elapsed: start.elapsed(),
            node_count: nodes,
        },
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::make_space;

    fn words(bs: &[BranchSpec]) -> Vec<String> {
        bs.iter().map(|b| b.second.to_string()).collect()
    }

    #[test]
    fn branches_small_spaces() {
        let s = make_space(&[(2, 4), (3, 1)]).unwrap();
        let bs = enumerate_branches(&s, 3);
        assert_eq!(words(&bs), vec!["00111", "10011"]);
        assert_eq!(bs[0].profile.printed(), vec![0, 3]);
        assert_eq!(bs[1].profile.printed(), vec![1, 2]);

        let s = make_space(&[(2, 3), (3, 2)]).unwrap();
        assert_eq!(words(&enumerate_branches(&s, 4)), vec!["01111", "11011"]);

        let s = make_space(&[(2, 7), (3, 1)]).unwrap();
        let w = words(&enumerate_branches(&s, 3));
        assert_eq!(w.len(), 2);
        assert!(w.contains(&"00000111".to_string()));

        assert!(enumerate_branches(&s, 9).is_empty());
    }

    #[test]
    fn packing_number_d_above_n() {
        let s = make_space(&[(2, 1)]).unwrap();
        let r = packing_number(&s, 5, SolveBudget::default()).unwrap();
        assert_eq!((r.best_value, r.status), (1, SolveStatus::Optimal));
    }

    #[test]
    fn packing_number_small_rows() {
        let s = make_space(&[(2, 4), (3, 1)]).unwrap();
        assert_eq!(packing_number(&s, 3, SolveBudget::default()).unwrap().best_value, 6);
        let s = make_space(&[(2, 4), (7, 1)]).unwrap();
        assert_eq!(packing_number(&s, 3, SolveBudget::default()).unwrap().best_value, 8);
    }

    #[test]
    fn pigeonhole_audit() {
        let s = make_space(&[(2, 4), (3, 3)]).unwrap();
        let p = MarginalProfile::from_printed(&s, &[3, 0]).unwrap();
        let r = audit_branch(&s, 3, &p, 17, SolveBudget::default(), SolveOptions::default()).unwrap();
        assert_eq!(r.outcome, AuditOutcome::BranchUnavoidable);
        assert_eq!(r.method, AuditMethod::Pigeonhole { patterns: 16 });
    }

    #[test]
    fn trivial_audit_is_inconclusive() {
        let s = make_space(&[(2, 7), (3, 1)]).unwrap();
        let p = MarginalProfile::from_printed(&s, &[0, 3]).unwrap();
        let r = audit_branch(&s, 3, &p, 2, SolveBudget::default(), SolveOptions::default()).unwrap();
        assert_eq!(r.outcome, AuditOutcome::Inconclusive);
        let bad = MarginalProfile::from_printed(&s, &[1, 1]).unwrap();
        assert!(audit_branch(&s, 3, &bad, 26, SolveBudget::default(), SolveOptions::default()).is_err());
    }

    #[test]
    fn solved_audit_on_small_space() {
        let s = make_space(&[(2, 4), (3, 1)]).unwrap();
        let p = MarginalProfile::from_printed(&s, &[0, 3]).unwrap();
        let r = audit_branch(&s, 3, &p, 6, SolveBudget::default(), SolveOptions::default()).unwrap();
        let forbid = crate::solver::solve(&build_profile_forbidding(&s, 3, &p).unwrap(), SolveBudget::default());
        assert!(forbid.is_optimal());
        assert!(matches!(r.method, AuditMethod::Solved { .. }));
        assert_eq!(r.outcome == AuditOutcome::BranchUnavoidable, forbid.best_value < 6);
    }
}

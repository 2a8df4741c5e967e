//! Exact solver for packing models.
//!
//! A packing model with pairwise conflicts is a maximum independent set
//! problem on its conflict graph. The search is a bitset branch-and-bound in
//! the style of the coloring-based maximum clique solvers: at each node the
//! candidate set is greedily covered by conflict cliques (a sequential
//! coloring of the compatibility graph); a vertex whose clique index cannot
//! lift the current selection above the incumbent is never branched on.
//! Subtrees near the root are explored in parallel with a shared incumbent.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::cover::{greedy_cliques, renumber, root_cover};
use crate::code::{verify, Code};
use crate::error::{Error, Result};
use crate::model::PackingModel;
use crate::space::{Codeword, MixedSpace};

/// Limits on a single solve. All limits are optional.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveBudget {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// A value known to be achievable (objective including pinned words).
    /// The search then only looks for strictly larger packings.
    pub lower_bound: Option<usize>,
}

impl SolveBudget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn with_lower_bound(mut self, value: usize) -> Self {
        self.lower_bound = Some(value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    /// Subtrees shallower than this are spawned as parallel tasks.
    pub split_depth: usize,
    /// Print incumbent and node counts to standard error every few seconds.
    pub progress: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            threads: 1,
            split_depth: 3,
            progress: false,
        }
    }
}

impl SolveOptions {
    pub fn with_threads(threads: usize) -> Self {
        SolveOptions {
            threads,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// `best_value` is the exact optimum.
    Optimal,
    /// The search finished but did not beat the supplied lower bound, which
    /// it could not witness; `upper_bound` is that proven bound.
    FeasibleLowerBound,
    /// Stopped by the budget; `best_value` and `upper_bound` bracket the optimum.
    BudgetExhausted,
    /// The pinned words conflict with each other; no packing exists.
    Infeasible,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleLowerBound => "feasible_lower_bound",
            SolveStatus::BudgetExhausted => "budget_exhausted",
            SolveStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub best_value: usize,
    pub upper_bound: usize,
    /// Includes the model's pinned words.
    pub witness: Code,
    pub elapsed: Duration,
    pub node_count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub value: usize,
    pub bound: usize,
    pub witness: Vec<String>,
    pub elapsed_secs: f64,
    pub nodes: u64,
}

impl SolveResult {
    pub fn report(&self) -> SolveReport {
        SolveReport {
            status: self.status,
            value: self.best_value,
            bound: self.upper_bound,
            witness: self.witness.words().iter().map(|w| w.to_string()).collect(),
            elapsed_secs: self.elapsed.as_secs_f64(),
            nodes: self.node_count,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report()).expect("report serialises")
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    fn infeasible(space: &MixedSpace, start: Instant) -> Self {
        SolveResult {
            status: SolveStatus::Infeasible,
            best_value: 0,
            upper_bound: 0,
            witness: Code::empty(space),
            elapsed: start.elapsed(),
            node_count: 0,
        }
    }
}

/// Size of the smallest clique cover of `subset` that the solver's covering
/// routines produce: the greedy cover, the root cover of the whole graph
/// restricted to `subset`, and every re-numbered variant of the greedy cover.
///
/// Any independent set inside `subset` meets each clique at most once, so
/// this is an upper bound on the residual optimum.
pub fn clique_cover_size(conflict: &[BitSet], subset: &BitSet) -> usize {
    let greedy = greedy_cliques(conflict, subset);
    let restricted = root_cover(conflict)
        .iter()
        .filter(|c| c.intersects(subset))
        .count();
    let mut best = greedy.len().min(restricted);
    for low in 1..greedy.len() {
        let mut cliques = greedy.clone();
        renumber(conflict, &mut cliques, low);
        best = best.min(cliques.len());
    }
    best
}

struct Search {
    /// Compatibility rows (complement of conflicts, no loops), search order.
    compat: Vec<BitSet>,
    /// Conflict rows, search order.
    conflict: Vec<BitSet>,
    /// Clique cover of the root, restricted to each node as an alternative bound.
    root: Vec<BitSet>,
    best: AtomicUsize,
    witness: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    stop: AtomicBool,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    split_depth: usize,
    parallel: bool,
    progress: Option<Mutex<Instant>>,
    start: Instant,
    offset: usize,
}

impl Search {
    fn stopped(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }

    /// Counts a node and checks the budget. Returns true when the search must stop.
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.node_limit {
            if n >= limit {
                self.stop.store(true, Ordering::Relaxed);
            }
        }
        if n % 1024 == 0 {
            let now = Instant::now();
            if self.deadline.is_some_and(|d| now >= d) {
                self.stop.store(true, Ordering::Relaxed);
            }
            if let Some(last) = &self.progress {
                if let Ok(mut last) = last.try_lock() {
                    if now.duration_since(*last) >= Duration::from_secs(5) {
                        *last = now;
                        eprintln!(
                            "solve: {:.1}s  nodes {}  incumbent {}",
                            now.duration_since(self.start).as_secs_f64(),
                            n,
                            self.offset + self.best.load(Ordering::Relaxed)
                        );
                    }
                }
            }
        }
        self.stopped()
    }

    fn offer(&self, size: usize, stack: &[usize]) {
        if size <= self.best.load(Ordering::Relaxed) {
            return;
        }
        let mut w = self.witness.lock().expect("witness lock");
        if size > self.best.load(Ordering::Relaxed) {
            self.best.store(size, Ordering::Relaxed);
            w.clear();
            w.extend_from_slice(stack);
        }
    }

    /// Clique cover of `p`; returns the vertices whose clique index is at
    /// least `kmin`, with those indices, in cover order.
    fn color(&self, p: &BitSet, kmin: usize) -> (Vec<usize>, Vec<usize>) {
        let low = kmin.saturating_sub(1);
        let meeting = self.root.iter().filter(|c| c.intersects(p)).count();
        if meeting <= low {
            return (Vec::new(), Vec::new());
        }
        let mut cliques = greedy_cliques(&self.conflict, p);
        if meeting < cliques.len() {
            cliques = self
                .root
                .iter()
                .map(|c| c.iter().filter(|&v| p.contains(v)).collect::<Vec<_>>())
                .filter(|c| !c.is_empty())
                .collect();
        }
        if low > 0 && cliques.len() > low {
            renumber(&self.conflict, &mut cliques, low);
        }
        let mut verts = Vec::new();
        let mut colors = Vec::new();
        for (k, clique) in cliques.iter().enumerate().skip(low) {
            for &v in clique {
                verts.push(v);
                colors.push(k + 1);
            }
        }
        (verts, colors)
    }

    /// Children of a node in processing order: `(vertex, clique index, candidate set)`.
    fn children(&self, mut p: BitSet, size: usize) -> Vec<(usize, usize, BitSet)> {
        let best = self.best.load(Ordering::Relaxed);
        let kmin = (best + 1).saturating_sub(size);
        let (verts, colors) = self.color(&p, kmin);
        let mut out = Vec::with_capacity(verts.len());
        for i in (0..verts.len()).rev() {
            let v = verts[i];
            let mut child = p.clone();
            child.intersect_with(&self.compat[v]);
            out.push((v, colors[i], child));
            p.remove(v);
        }
        out
    }

    fn expand(&self, size: usize, mut p: BitSet, stack: &mut Vec<usize>, depth: usize) {
        if self.tick() {
            return;
        }
        if p.is_empty() {
            self.offer(size, stack);
            return;
        }
        if self.parallel && depth < self.split_depth {
            let tasks = self.children(p, size);
            tasks.into_par_iter().for_each(|(v, c, child)| {
                if self.stopped() || size + c <= self.best.load(Ordering::Relaxed) {
                    return;
                }
                let mut st = stack.clone();
                st.push(v);
                self.expand(size + 1, child, &mut st, depth + 1);
            });
            return;
        }
        let best = self.best.load(Ordering::Relaxed);
        let kmin = (best + 1).saturating_sub(size);
        let (verts, colors) = self.color(&p, kmin);
        let mut child = BitSet::new(p.capacity());
        for i in (0..verts.len()).rev() {
            if size + colors[i] <= self.best.load(Ordering::Relaxed) || self.stopped() {
                return;
            }
            let v = verts[i];
            p.intersection_into(&self.compat[v], &mut child);
            stack.push(v);
            self.expand(size + 1, child.clone(), stack, depth + 1);
            stack.pop();
            p.remove(v);
        }
    }

    /// Runs the whole search; returns an upper bound on the free part.
    fn run(&self, m: usize) -> usize {
        if m == 0 {
            return self.best.load(Ordering::Relaxed);
        }
        let root = BitSet::full(m);
        self.tick();
        let tasks = self.children(root, 0);
        let run_task = |(v, c, child): &(usize, usize, BitSet)| -> bool {
            if self.stopped() {
                return false;
            }
            if *c <= self.best.load(Ordering::Relaxed) {
                return true;
            }
            let mut st = vec![*v];
            self.expand(1, child.clone(), &mut st, 1);
            !self.stopped()
        };
        let done: Vec<bool> = if self.parallel && self.split_depth > 0 {
            tasks.par_iter().map(run_task).collect()
        } else {
            tasks.iter().map(run_task).collect()
        };
        let best = self.best.load(Ordering::Relaxed);
        tasks
            .iter()
            .zip(done)
            .filter(|(_, ok)| !ok)
            .map(|((_, c, _), _)| *c)
            .fold(best, usize::max)
    }
}

fn greedy_independent(rows: &[BitSet]) -> Vec<usize> {
    let mut blocked = BitSet::new(rows.len());
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if !blocked.contains(i) {
            chosen.push(i);
            blocked.union_with(row);
        }
    }
    chosen
}

/// Solves with default options (single thread).
pub fn solve(model: &PackingModel, budget: SolveBudget) -> SolveResult {
    solve_with(model, budget, SolveOptions::default())
}

pub fn solve_with(model: &PackingModel, budget: SolveBudget, options: SolveOptions) -> SolveResult {
    let start = Instant::now();
    let pinned = model.fixed_one_words();
    for (i, a) in pinned.iter().enumerate() {
        if pinned[i + 1..].iter().any(|b| model.is_conflict(a, b)) {
            return SolveResult::infeasible(model.space(), start);
        }
    }

    let rows = model.conflict_rows();
    let m = rows.len();
    let offset = model.objective_offset();

    // cover order: ascending conflict degree, ties by rank, so branching (which
    // runs from the back) takes the highest conflict degree first
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (rows[i].count(), i));
    let mut position = vec![0; m];
    for (k, &i) in order.iter().enumerate() {
        position[i] = k;
    }
    let conflict: Vec<BitSet> = order
        .iter()
        .map(|&i| {
            let mut row = BitSet::new(m);
            for j in rows[i].iter() {
                row.insert(position[j]);
            }
            row
        })
        .collect();
    let compat: Vec<BitSet> = conflict
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let mut c = BitSet::full(m);
            c.difference_with(row);
            c.remove(k);
            c
        })
        .collect();

    let greedy: Vec<usize> = greedy_independent(rows).into_iter().map(|i| position[i]).collect();
    let floor = budget
        .lower_bound
        .map_or(0, |lb| lb.saturating_sub(offset))
        .max(greedy.len());

    let threads = if options.threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        options.threads
    };
    let root = root_cover(&conflict);
    let search = Search {
        compat,
        conflict,
        root,
        best: AtomicUsize::new(floor),
        witness: Mutex::new(greedy),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        deadline: budget.time_limit.map(|t| start + t),
        node_limit: budget.node_limit,
        split_depth: options.split_depth,
        parallel: threads > 1,
        progress: options.progress.then(|| Mutex::new(start)),
        start,
        offset,
    };

    let free_bound = if threads > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| search.run(m)),
            Err(_) => search.run(m),
        }
    } else {
        search.run(m)
    };

    let stopped = search.stopped();
    let chosen = search.witness.into_inner().expect("witness lock");
    let best_value = offset + chosen.len();
    let mut words: Vec<Codeword> = pinned;
    words.extend(chosen.iter().map(|&k| model.free_word(order[k])));
    let witness = Code::new(model.space(), words).expect("witness words are distinct");
    debug_assert!(verify(&witness, model.d()).passed, "witness violates distance");
    debug_assert_eq!(witness.len(), best_value);

    let upper_bound = offset + free_bound.max(chosen.len());
    let status = if stopped {
        SolveStatus::BudgetExhausted
    } else if upper_bound == best_value {
        SolveStatus::Optimal
    } else {
        SolveStatus::FeasibleLowerBound
    };
    SolveResult {
        status,
        best_value,
        upper_bound,
        witness,
        elapsed: start.elapsed(),
        node_count: search.nodes.load(Ordering::Relaxed),
    }
}

/// Optimum with `forced` words additionally pinned to one.
pub fn solve_forced(
    model: &PackingModel,
    forced: &[Codeword],
    budget: SolveBudget,
) -> Result<SolveResult> {
    solve_forced_with(model, forced, budget, SolveOptions::default())
}

pub fn solve_forced_with(
    model: &PackingModel,
    forced: &[Codeword],
    budget: SolveBudget,
    options: SolveOptions,
) -> Result<SolveResult> {
    let start = Instant::now();
    Ok(match model.with_forced(forced)? {
        Some(m) => solve_with(&m, budget, options),
        None => SolveResult::infeasible(model.space(), start),
    })
}

/// Largest space the exhaustive oracle accepts.
pub const ORACLE_MAX_WORDS: u64 = 24;

/// Exact packing number by plain subset enumeration, for cross-checking.
///
/// Words are added in rank order and a branch is cut only when the new word
/// is too close to a chosen one; there is no bounding. Returns 0 when the
/// forced words are themselves too close.
pub fn oracle(space: &MixedSpace, d: usize, forced: Option<&[Codeword]>) -> Result<usize> {
    if space.cardinality() > ORACLE_MAX_WORDS {
        return Err(Error::SpaceTooLarge(format!(
            "oracle handles at most {ORACLE_MAX_WORDS} words, {space} has {}",
            space.cardinality()
        )));
    }
    let words: Vec<Vec<u32>> = (0..space.cardinality())
        .map(|i| {
            let mut s = vec![0; space.n()];
            space.unrank_into(i, &mut s);
            s
        })
        .collect();
    let n = words.len();
    // too_close[i] has bit j set when words i and j cannot coexist (including i == j)
    let too_close: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| MixedSpace::raw_distance(&words[i], &words[j]) < d || i == j)
                .fold(0u32, |acc, j| acc | 1 << j)
        })
        .collect();

    let mut chosen = 0u32;
    for w in forced.unwrap_or(&[]) {
        if w.space() != space {
            return Err(Error::MismatchedSpaces);
        }
        let i = w.index() as usize;
        if chosen & (1 << i) != 0 {
            continue;
        }
        if chosen & too_close[i] != 0 {
            return Ok(0);
        }
        chosen |= 1 << i;
    }

    fn dfs(from: usize, chosen: u32, too_close: &[u32], best: &mut usize) {
        *best = (*best).max(chosen.count_ones() as usize);
        for j in from..too_close.len() {
            if chosen & too_close[j] == 0 {
                dfs(j + 1, chosen | 1 << j, too_close, best);
            }
        }
    }
    let mut best = 0;
    dfs(0, chosen, &too_close, &mut best);
    Ok(best)
}

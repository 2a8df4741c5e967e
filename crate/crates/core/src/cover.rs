//! Clique covers of conflict graphs, the bounding device of the solver.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;

/// Random vertex priorities tried when building the root cover.
const ROOT_TRIALS: u64 = 6;
/// Improvement sweeps over the root cover.
const POLISH_SWEEPS: usize = 4;

/// Covers `subset` by cliques of `conflict`, built one at a time. Each clique
/// starts at the first uncovered vertex and grows by the candidate that keeps
/// the most candidates open (first one on ties).
pub(crate) fn greedy_cliques(conflict: &[BitSet], subset: &BitSet) -> Vec<Vec<usize>> {
    greedy_cliques_by(conflict, subset, None)
}

/// As [`greedy_cliques`], but with `priority` deciding the start vertex of
/// each clique and breaking growth ties (lower first).
fn greedy_cliques_by(conflict: &[BitSet], subset: &BitSet, priority: Option<&[usize]>) -> Vec<Vec<usize>> {
    let earlier = |a: usize, b: usize| priority.map_or(a < b, |p| p[a] < p[b]);
    let mut cliques = Vec::new();
    let mut uncovered = subset.clone();
    let mut open = BitSet::new(subset.capacity());
    while let Some(mut v) = uncovered.first() {
        if let Some(p) = priority {
            v = uncovered.iter().min_by_key(|&u| p[u]).expect("nonempty");
        }
        let mut clique = Vec::new();
        open.clone_from(&uncovered);
        loop {
            clique.push(v);
            uncovered.remove(v);
            open.remove(v);
            open.intersect_with(&conflict[v]);
            let mut pick: Option<usize> = None;
            let mut most = 0;
            for u in open.iter() {
                let c = open.intersection_count(&conflict[u]);
                if pick.is_none() || c > most || (c == most && earlier(u, pick.expect("set"))) {
                    pick = Some(u);
                    most = c;
                }
            }
            match pick {
                Some(u) => v = u,
                None => break,
            }
        }
        cliques.push(clique);
    }
    cliques
}

/// Clique membership with room for vertices to move between cliques.
struct Cover<'a> {
    conflict: &'a [BitSet],
    members: Vec<BitSet>,
    sizes: Vec<usize>,
}

impl<'a> Cover<'a> {
    fn new(conflict: &'a [BitSet], cliques: &[Vec<usize>]) -> Self {
        let members: Vec<BitSet> = cliques
            .iter()
            .map(|c| {
                let mut b = BitSet::new(conflict.len());
                for &v in c {
                    b.insert(v);
                }
                b
            })
            .collect();
        let sizes = cliques.iter().map(Vec::len).collect();
        Cover { conflict, members, sizes }
    }

    fn accepts(&self, k: usize, v: usize) -> bool {
        self.members[k].intersection_count(&self.conflict[v]) == self.sizes[k]
    }

    fn shift(&mut self, v: usize, from: Option<usize>, to: usize) {
        if let Some(f) = from {
            self.members[f].remove(v);
            self.sizes[f] -= 1;
        }
        self.members[to].insert(v);
        self.sizes[to] += 1;
    }

    /// Places `v` (currently in `from`, if any) into one of `targets`, directly
    /// or by first moving the single member of the target that `v` does not
    /// conflict with into another target. Returns the moves made.
    fn place(
        &mut self,
        v: usize,
        from: Option<usize>,
        targets: &[usize],
    ) -> Option<Vec<(usize, Option<usize>, usize)>> {
        for &k1 in targets {
            let missing = self.sizes[k1] - self.members[k1].intersection_count(&self.conflict[v]);
            if missing == 0 {
                self.shift(v, from, k1);
                return Some(vec![(v, from, k1)]);
            }
            if missing == 1 {
                let w = self.members[k1]
                    .iter()
                    .find(|&u| !self.conflict[v].contains(u))
                    .expect("one member outside the conflict row");
                if let Some(&k2) = targets.iter().find(|&&k2| k2 != k1 && self.accepts(k2, w)) {
                    self.shift(w, Some(k1), k2);
                    self.shift(v, from, k1);
                    return Some(vec![(w, Some(k1), k2), (v, from, k1)]);
                }
            }
        }
        None
    }

    fn undo(&mut self, log: &[(usize, Option<usize>, usize)]) {
        for &(v, from, to) in log.iter().rev() {
            self.members[to].remove(v);
            self.sizes[to] -= 1;
            if let Some(f) = from {
                self.members[f].insert(v);
                self.sizes[f] += 1;
            }
        }
    }
}

/// Moves vertices out of cliques `low..` into the first `low` cliques where
/// possible. Emptied cliques are dropped, so the cover only shrinks.
pub(crate) fn renumber(conflict: &[BitSet], cliques: &mut Vec<Vec<usize>>, low: usize) {
    let mut cover = Cover::new(conflict, &cliques[..low]);
    let targets: Vec<usize> = (0..low).collect();
    for clique in cliques[low..].iter_mut() {
        clique.retain(|&v| cover.place(v, None, &targets).is_none());
    }
    cliques.retain(|c| !c.is_empty());
}

/// Tries to dissolve cliques, smallest first, by placing all their members
/// in other cliques.
fn polish(conflict: &[BitSet], cliques: &[Vec<usize>]) -> Vec<BitSet> {
    let mut cover = Cover::new(conflict, cliques);
    let mut alive: Vec<usize> = (0..cliques.len()).collect();
    for _ in 0..POLISH_SWEEPS {
        let mut order = alive.clone();
        order.sort_by_key(|&q| (cover.sizes[q], q));
        let mut dissolved = false;
        for q in order {
            let targets: Vec<usize> = alive.iter().copied().filter(|&k| k != q).collect();
            let verts: Vec<usize> = cover.members[q].iter().collect();
            let mut log = Vec::new();
            let mut ok = true;
            for v in verts {
                match cover.place(v, Some(q), &targets) {
                    Some(moves) => log.extend(moves),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                alive.retain(|&k| k != q);
                dissolved = true;
            } else {
                cover.undo(&log);
            }
        }
        if !dissolved {
            break;
        }
    }
    alive.into_iter().map(|k| cover.members[k].clone()).collect()
}

/// A small clique cover of all `conflict.len()` vertices: the best of several
/// greedy covers under different vertex priorities, each polished.
pub(crate) fn root_cover(conflict: &[BitSet]) -> Vec<BitSet> {
    let m = conflict.len();
    let all = BitSet::full(m);
    let mut best = polish(conflict, &greedy_cliques(conflict, &all));
    let mut priority: Vec<usize> = (0..m).collect();
    for trial in 0..ROOT_TRIALS {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        priority.shuffle(&mut rng);
        let cover = polish(conflict, &greedy_cliques_by(conflict, &all, Some(&priority)));
        if cover.len() < best.len() {
            best = cover;
        }
    }
    best
}

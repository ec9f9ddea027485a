//! Exact enumeration of proper covering sets by dynamic programming over
//! (terminal target, cardinality) collections.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::Result;
use crate::graph::{Instance, TargetId};
use crate::route::{Route, SignalView};
use crate::trie::SetTrie;

const NO_PRED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub mask: u64,
    pub cost: u32,
    /// Terminal of the predecessor entry, `NO_PRED` for a first leg.
    pred_terminal: u32,
    pred_index: u32,
}

/// `C^k_{v,t}` for every terminal `t` and cardinality `k`, each a trie over
/// member masks.
#[derive(Debug, Clone)]
pub struct CoveringCollection {
    width: usize,
    /// `levels[k - 1][t]`
    levels: Vec<Vec<SetTrie<Entry>>>,
}

impl CoveringCollection {
    fn new(width: usize) -> CoveringCollection {
        CoveringCollection {
            width,
            levels: Vec::new(),
        }
    }

    fn push_level(&mut self) {
        self.levels
            .push((0..self.width).map(|_| SetTrie::new(self.width)).collect());
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of non-empty cardinality levels.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn trie(&self, terminal: usize, k: usize) -> Option<&SetTrie<Entry>> {
        self.levels.get(k.checked_sub(1)?)?.get(terminal)
    }

    /// Cost stored for exactly `mask` ending at `terminal`; `None` stands for
    /// an infinite cost.
    pub fn lookup(&self, terminal: usize, mask: u64) -> Option<u32> {
        self.trie(terminal, mask.count_ones() as usize)?
            .get(mask)
            .map(|e| e.cost)
    }

    /// Stores `(mask, cost)` at `terminal` if it improves on the current
    /// entry. Returns whether the collection changed.
    fn relax(&mut self, terminal: usize, mask: u64, cost: u32, pred: (u32, u32)) -> bool {
        let k = mask.count_ones() as usize;
        while self.levels.len() < k {
            self.push_level();
        }
        let trie = &mut self.levels[k - 1][terminal];
        let entry = Entry {
            mask,
            cost,
            pred_terminal: pred.0,
            pred_index: pred.1,
        };
        match trie.get_mut(mask) {
            Some(e) if e.cost <= cost => false,
            Some(e) => {
                *e = entry;
                true
            }
            None => {
                trie.insert(mask, entry);
                true
            }
        }
    }

    /// Local target sequence of the route stored at `(terminal, index)`.
    fn sequence(&self, terminal: usize, k: usize, index: usize) -> Vec<usize> {
        let mut seq = Vec::with_capacity(k);
        let (mut t, mut k, mut i) = (terminal, k, index);
        loop {
            seq.push(t);
            let e = &self.levels[k - 1][t].values()[i];
            if e.pred_terminal == NO_PRED {
                break;
            }
            t = e.pred_terminal as usize;
            i = e.pred_index as usize;
            k -= 1;
        }
        seq.reverse();
        seq
    }

    pub fn total_entries(&self) -> usize {
        self.levels.iter().flatten().map(SetTrie::len).sum()
    }
}

/// Runs the dynamic program and returns the raw collection.
pub fn compute_collection(view: &SignalView<'_>, budget: &Budget) -> Result<CoveringCollection> {
    let m = view.len();
    let mut coll = CoveringCollection::new(m);
    for j in 0..m {
        if view.from_start[j] <= view.deadline[j] && view.start_interior(j) == 0 {
            coll.relax(j, 1 << j, view.from_start[j], (NO_PRED, 0));
        }
    }
    let mut k = 1;
    while k < m && coll.levels.len() >= k {
        budget.check()?;
        if coll.levels.len() == k {
            coll.push_level();
        }
        let (lower, upper) = coll.levels.split_at_mut(k);
        let current = &lower[k - 1];
        let next = &mut upper[0];
        for (t, trie) in current.iter().enumerate() {
            for (idx, e) in trie.values().iter().enumerate() {
                for u in 0..m {
                    if e.mask >> u & 1 == 1 {
                        continue;
                    }
                    let cost = e.cost + view.dist(t, u);
                    if cost > view.deadline[u] || view.interior(t, u) & !e.mask != 0 {
                        continue;
                    }
                    let mask = e.mask | 1 << u;
                    let entry = Entry {
                        mask,
                        cost,
                        pred_terminal: t as u32,
                        pred_index: idx as u32,
                    };
                    match next[u].get_mut(mask) {
                        Some(old) if old.cost <= cost => {}
                        Some(old) => *old = entry,
                        None => {
                            next[u].insert(mask, entry);
                        }
                    }
                }
            }
        }
        if coll.levels[k].iter().all(SetTrie::is_empty) {
            coll.levels.pop();
            break;
        }
        k += 1;
    }
    Ok(coll)
}

/// A proper covering set with one minimum-cost route.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringSetResult {
    /// Sorted, including the start vertex when it is a target of the signal.
    pub set: Vec<TargetId>,
    pub route: Route,
    pub cost: u32,
    pub proper: bool,
    pub dominated: bool,
    pub maximal: bool,
}

/// All proper covering sets of signal `s` from `v`, with dominance flags.
pub fn compute_cov_sets(v: usize, s: usize, inst: &Instance) -> Result<Vec<CoveringSetResult>> {
    let view = SignalView::new(inst, v, s)?;
    cov_sets_for_view(&view, &Budget::unlimited())
}

pub fn cov_sets_for_view(view: &SignalView<'_>, budget: &Budget) -> Result<Vec<CoveringSetResult>> {
    let coll = compute_collection(view, budget)?;
    Ok(results_from_collection(view, &coll))
}

/// One result per distinct set, keeping the cheapest terminal (lowest
/// terminal index on ties). Ordered by cardinality, then mask.
pub fn results_from_collection(view: &SignalView<'_>, coll: &CoveringCollection) -> Vec<CoveringSetResult> {
    let mut best: std::collections::HashMap<u64, (u32, usize, usize, usize)> = Default::default();
    for (ki, level) in coll.levels.iter().enumerate() {
        for (t, trie) in level.iter().enumerate() {
            for (i, e) in trie.values().iter().enumerate() {
                let cand = (e.cost, t, ki + 1, i);
                best.entry(e.mask)
                    .and_modify(|b| {
                        if (cand.0, cand.1) < (b.0, b.1) {
                            *b = cand;
                        }
                    })
                    .or_insert(cand);
            }
        }
    }
    let mut masks: Vec<u64> = best.keys().copied().collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    let mut out = Vec::with_capacity(masks.len() + 1);
    if view.start_member.is_some() {
        out.push(CoveringSetResult {
            set: view.set_of(0),
            route: Route::stay(view.start),
            cost: 0,
            proper: true,
            dominated: false,
            maximal: false,
        });
    }
    for mask in masks {
        let (cost, t, k, i) = best[&mask];
        let route = view.route(&coll.sequence(t, k, i));
        debug_assert_eq!(route.cost, cost);
        out.push(CoveringSetResult {
            set: view.set_of(mask),
            route,
            cost,
            proper: true,
            dominated: false,
            maximal: false,
        });
    }
    annotate_dominance(&mut out);
    out
}

/// Exact `c*(T')`: the stored route for exactly `set`, or `None` when `set`
/// is not a stored covering set (including the empty set).
pub fn min_cost_covering_route<'a>(
    set: &[TargetId],
    results: &'a [CoveringSetResult],
) -> Option<(&'a Route, u32)> {
    if set.is_empty() {
        return None;
    }
    let mut key = set.to_vec();
    key.sort();
    key.dedup();
    results
        .iter()
        .filter(|r| r.set == key)
        .min_by_key(|r| r.cost)
        .map(|r| (&r.route, r.cost))
}

/// Marks each set dominated iff some other stored set strictly contains it.
pub fn annotate_dominance(results: &mut [CoveringSetResult]) {
    let mut order: Vec<usize> = (0..results.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(results[i].set.len()));
    let mut maximal: Vec<usize> = Vec::new();
    for i in order {
        let dominated = maximal.iter().any(|&j| {
            results[j].set.len() > results[i].set.len() && is_subset(&results[i].set, &results[j].set)
        });
        results[i].dominated = dominated;
        results[i].maximal = !dominated;
        if !dominated {
            maximal.push(i);
        }
    }
}

/// Subset test on sorted slices.
pub fn is_subset(a: &[TargetId], b: &[TargetId]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

/// Serializable covering-set record.
#[derive(Debug, Clone, Serialize)]
pub struct CovSetDoc {
    /// Vertex ids of the covered targets.
    pub set: Vec<usize>,
    pub cost: u32,
    pub route: Vec<usize>,
    pub maximal: bool,
}

impl CovSetDoc {
    pub fn from_result(r: &CoveringSetResult, inst: &Instance) -> CovSetDoc {
        CovSetDoc {
            set: r.set.iter().map(|&t| inst.target(t).vertex).collect(),
            cost: r.cost,
            route: r.route.vertex_sequence(inst),
            maximal: r.maximal,
        }
    }
}

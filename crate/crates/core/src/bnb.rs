//! Depth-first branch and bound over covering routes built by insertion.
//!
//! Routes are local member sequences of a [`SignalView`]. A route `r'` is
//! contained in `r` when it is an order-preserving subsequence of `r` with
//! the same first target: insertions only happen after an existing target,
//! so exactly those routes can grow into `r`.

use crate::budget::Budget;
use crate::error::Result;
use crate::route::{Route, SignalView};

/// `a` is an order-preserving subsequence of `b` sharing its first target.
pub fn contained_in(a: &[usize], b: &[usize]) -> bool {
    if a.is_empty() || b.is_empty() || a[0] != b[0] || a.len() > b.len() {
        return a.is_empty();
    }
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

fn arrivals(view: &SignalView<'_>, r: &[usize]) -> Vec<i64> {
    let mut out = Vec::with_capacity(r.len());
    let mut time = 0i64;
    for (i, &t) in r.iter().enumerate() {
        time += if i == 0 {
            view.from_start[t] as i64
        } else {
            view.dist(r[i - 1], t) as i64
        };
        out.push(time);
    }
    out
}

fn is_covering(view: &SignalView<'_>, r: &[usize]) -> bool {
    arrivals(view, r)
        .iter()
        .zip(r)
        .all(|(&a, &t)| a <= view.deadline[t] as i64)
}

/// Insertion heuristic `min(a, PFS - e)` for inserting `q` after the `p`-th
/// target (1-based). The tail insertion has no extra mileage.
pub fn heuristic_h(view: &SignalView<'_>, r: &[usize], q: usize, p: usize) -> i64 {
    let arr = arrivals(view, r);
    heuristic_with(view, r, &arr, pfs(view, r, &arr), q, p)
}

fn pfs(view: &SignalView<'_>, r: &[usize], arr: &[i64]) -> i64 {
    r.iter()
        .zip(arr)
        .map(|(&t, &a)| view.deadline[t] as i64 - a)
        .min()
        .unwrap_or(0)
}

fn heuristic_with(view: &SignalView<'_>, r: &[usize], arr: &[i64], pfs: i64, q: usize, p: usize) -> i64 {
    let at = r[p - 1];
    let reach = arr[p - 1] + view.dist(at, q) as i64;
    let advance = view.deadline[q] as i64 - reach;
    let extra = match r.get(p) {
        Some(&succ) => reach + view.dist(q, succ) as i64 - arr[p],
        None => 0,
    };
    advance.min(pfs - extra)
}

fn insert(r: &[usize], q: usize, p: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(r.len() + 1);
    out.extend_from_slice(&r[..p]);
    out.push(q);
    out.extend_from_slice(&r[p..]);
    out
}

/// Closed-route sets of one search.
#[derive(Debug, Clone, Default)]
pub struct SearchState {
    /// Minimal closed routes, used for pruning.
    pub cl_min: Vec<Vec<usize>>,
    /// Maximal closed routes, the result.
    pub cl_max: Vec<Vec<usize>>,
    /// Number of nodes expanded so far.
    pub expansions: usize,
}

impl SearchState {
    pub fn close(&mut self, r: &[usize]) {
        self.cl_min.retain(|x| !contained_in(r, x));
        self.cl_min.push(r.to_vec());
        if !self.cl_max.iter().any(|x| contained_in(r, x)) {
            self.cl_max.push(r.to_vec());
        }
    }

    fn pruned(&self, r: &[usize]) -> bool {
        self.cl_min.iter().any(|x| contained_in(x, r))
    }
}

struct Search<'v, 'a> {
    view: &'v SignalView<'a>,
    tight: Vec<bool>,
    state: SearchState,
    budget: &'v Budget,
}

impl Search<'_, '_> {
    /// Ranked covering, non-pruned expansions of `r`.
    fn expand(&self, r: &[usize]) -> Vec<Vec<usize>> {
        let m = self.view.len();
        let arr = arrivals(self.view, r);
        let pfs = pfs(self.view, r, &arr);
        let mut in_r = vec![false; m];
        for &t in r {
            in_r[t] = true;
        }
        // Feasible insertions with their heuristic value, per target.
        let mut cands: Vec<Vec<(usize, i64, Vec<usize>)>> = vec![Vec::new(); m];
        for q in (0..m).filter(|&q| !in_r[q]) {
            for p in 1..=r.len() {
                let next = insert(r, q, p);
                if !is_covering(self.view, &next) || self.state.pruned(&next) {
                    continue;
                }
                let h = heuristic_with(self.view, r, &arr, pfs, q, p);
                cands[q].push((p, h, next));
            }
        }
        let mut out = Vec::new();

        // Tight targets: positions per target, then targets by best position.
        let mut tight: Vec<(usize, Vec<(usize, i64, Vec<usize>)>)> = Vec::new();
        for q in 0..m {
            if !self.tight[q] || cands[q].is_empty() {
                continue;
            }
            let mut list = std::mem::take(&mut cands[q]);
            list.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            tight.push((q, list));
        }
        tight.sort_by(|a, b| b.1[0].1.cmp(&a.1[0].1).then(a.0.cmp(&b.0)));
        for (_, list) in tight {
            out.extend(list.into_iter().map(|c| c.2));
        }

        // Large targets: targets per position, then positions by best target.
        let mut by_pos: Vec<Vec<(usize, i64, Vec<usize>)>> = vec![Vec::new(); r.len() + 1];
        for q in (0..m).filter(|&q| !self.tight[q]) {
            for (p, h, next) in std::mem::take(&mut cands[q]) {
                by_pos[p].push((q, h, next));
            }
        }
        let mut large: Vec<(usize, Vec<(usize, i64, Vec<usize>)>)> = by_pos
            .into_iter()
            .enumerate()
            .filter(|(_, l)| !l.is_empty())
            .map(|(p, mut l)| {
                l.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                (p, l)
            })
            .collect();
        large.sort_by(|a, b| b.1[0].1.cmp(&a.1[0].1).then(a.0.cmp(&b.0)));
        for (_, list) in large {
            out.extend(list.into_iter().map(|c| c.2));
        }
        out
    }

    fn tree_search(&mut self, k: usize, r: Vec<usize>) -> Result<()> {
        self.budget.check()?;
        self.state.expansions += 1;
        let mut next = self.expand(&r);
        if next.is_empty() {
            self.state.close(&r);
        } else if k > 0 {
            self.tree_search(k - 1, next.swap_remove(0))?;
        } else {
            for child in next {
                // Earlier siblings may have closed a subsequence meanwhile.
                if self.state.pruned(&child) {
                    continue;
                }
                self.tree_search(0, child.clone())?;
                self.state.close(&child);
            }
        }
        Ok(())
    }
}

/// Runs the search with backtracking limit `rho` and returns the closed
/// search state.
pub fn search(view: &SignalView<'_>, rho: f64, delta: f64, budget: &Budget) -> Result<SearchState> {
    let m = view.len();
    let tight = (0..m)
        .map(|t| (view.deadline[t] as f64) < delta * view.from_start[t] as f64)
        .collect();
    let mut s = Search {
        view,
        tight,
        state: SearchState::default(),
        budget,
    };
    let k = (rho * m as f64).ceil() as usize;
    for t in 0..m {
        if view.from_start[t] <= view.deadline[t] {
            s.tree_search(k, vec![t])?;
        }
    }
    Ok(s.state)
}

/// Routes of `CL_max`.
pub fn branch_and_bound(view: &SignalView<'_>, rho: f64, delta: f64, budget: &Budget) -> Result<Vec<Route>> {
    Ok(search(view, rho, delta, budget)?
        .cl_max
        .iter()
        .map(|r| view.route(r))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::hourglass_single_signal;
    use crate::graph::{Edge, Instance, SignalSpec, TargetSpec};
    use crate::graph::TargetId;

    #[test]
    fn containment() {
        assert!(contained_in(&[0, 2], &[0, 1, 2]));
        assert!(!contained_in(&[2, 0], &[0, 1, 2]));
        assert!(!contained_in(&[1, 2], &[0, 1, 2]));
        assert!(contained_in(&[0, 1], &[0, 1]));
    }

    #[test]
    fn close_keeps_minimal_and_maximal() {
        let mut s = SearchState::default();
        s.close(&[0]);
        s.close(&[0, 1]);
        assert_eq!(s.cl_max, vec![vec![0], vec![0, 1]]);
        // Closing only evicts supersequences of the closed route.
        assert_eq!(s.cl_min, vec![vec![0], vec![0, 1]]);
        s.close(&[0, 1]);
        assert_eq!(s.cl_max.len(), 2);

        let mut s = SearchState::default();
        s.close(&[0, 1]);
        s.close(&[0]);
        assert_eq!(s.cl_min, vec![vec![0]]);
        assert_eq!(s.cl_max, vec![vec![0, 1]]);
    }

    #[test]
    fn tail_heuristic() {
        let inst = hourglass_single_signal();
        let view = SignalView::new(&inst, 0, 0).unwrap();
        // r = <v0, t1>, insert t2 at the tail: a = 4 - 2, PFS = 3.
        assert_eq!(heuristic_h(&view, &[0], 1, 1), 2);
        // r = <v0, t1, t3>: PFS = 1, inserting t2 after t1 adds mileage 1.
        assert_eq!(heuristic_h(&view, &[0, 2], 1, 1), 0);
    }

    fn maximal_sets(routes: &[Route], inst: &Instance) -> Vec<Vec<TargetId>> {
        let sets: Vec<Vec<TargetId>> = routes.iter().map(|r| r.covered_targets(inst)).collect();
        let mut max: Vec<Vec<TargetId>> = sets
            .iter()
            .filter(|a| !sets.iter().any(|b| b.len() > a.len() && crate::covering::is_subset(a, b)))
            .cloned()
            .collect();
        max.sort();
        max.dedup();
        max
    }

    #[test]
    fn hourglass_exact_search_finds_the_triples() {
        let inst = hourglass_single_signal();
        let view = SignalView::new(&inst, 0, 0).unwrap();
        let routes = branch_and_bound(&view, 0.0, 2.0, &Budget::unlimited()).unwrap();
        assert!(routes.iter().all(|r| r.is_covering(&inst)));
        let max = maximal_sets(&routes, &inst);
        assert_eq!(max.len(), 4);
        assert!(max.iter().all(|s| s.len() == 3));

        let greedy = branch_and_bound(&view, 1.0, 2.0, &Budget::unlimited()).unwrap();
        assert!(greedy.len() <= 4);
        assert!(greedy.iter().all(|r| r.is_covering(&inst)));
    }

    #[test]
    fn only_one_route_possible() {
        let inst = Instance::new(
            3,
            vec![Edge { u: 0, v: 1, cost: 1 }, Edge { u: 0, v: 2, cost: 1 }],
            vec![
                TargetSpec { vertex: 1, value: 1.0, deadline: 1 },
                TargetSpec { vertex: 2, value: 1.0, deadline: 5 },
            ],
            vec![SignalSpec { id: "a".into(), coverage: vec![(1, 0.5), (2, 1.0)] }, SignalSpec { id: "b".into(), coverage: vec![(1, 0.5)] }],
            Some(0),
        )
        .unwrap();
        let view = SignalView::new(&inst, 0, 1).unwrap();
        let routes = branch_and_bound(&view, 0.0, 2.0, &Budget::unlimited()).unwrap();
        assert_eq!(routes.len(), 1);
        assert_eq!(routes[0].vertex_sequence(&inst), vec![0, 1]);
    }
}

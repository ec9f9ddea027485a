//! Topology detection and the polynomial solvers for lines, cycles and stars.

use std::collections::BTreeSet;

use crate::budget::Budget;
use crate::covering::{annotate_dominance, CoveringSetResult};
use crate::error::{Error, Result};
use crate::graph::{Instance, TargetId};
use crate::route::{Route, SignalView};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyClass {
    Linear,
    Cycle,
    Star,
    /// Acyclic, with the given number of leaves.
    Tree(usize),
    Arbitrary,
}

fn neighbours(inst: &Instance) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); inst.num_vertices()];
    for e in inst.edges() {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    adj
}

pub fn detect_topology(inst: &Instance) -> TopologyClass {
    let n = inst.num_vertices();
    let adj = neighbours(inst);
    let edges: usize = adj.iter().map(BTreeSet::len).sum::<usize>() / 2;
    let max_deg = adj.iter().map(BTreeSet::len).max().unwrap_or(0);
    if edges + 1 == n {
        if max_deg <= 2 {
            TopologyClass::Linear
        } else if n >= 4 && max_deg == n - 1 {
            TopologyClass::Star
        } else {
            TopologyClass::Tree(adj.iter().filter(|a| a.len() == 1).count())
        }
    } else if n >= 3 && edges == n && adj.iter().all(|a| a.len() == 2) {
        TopologyClass::Cycle
    } else {
        TopologyClass::Arbitrary
    }
}

/// Members of the view split into the two directions away from the start,
/// each ordered by distance along the graph.
fn sides(view: &SignalView<'_>, topo: TopologyClass) -> Result<(Vec<usize>, Vec<usize>)> {
    let inst = view.inst;
    let adj = neighbours(inst);
    let n = inst.num_vertices();
    let cost = |a: usize, b: usize| inst.dist(a, b) as u64;
    let mut local = vec![None; n];
    for (i, &t) in view.members.iter().enumerate() {
        local[inst.target(t).vertex] = Some(i);
    }
    // Walk the path or cycle once, recording cumulative positions.
    let (walk, closed) = match topo {
        TopologyClass::Linear => {
            let first = (0..n).find(|&x| adj[x].len() <= 1).unwrap_or(0);
            (walk_from(&adj, first, None), false)
        }
        TopologyClass::Cycle => {
            let v = view.start;
            let towards = *adj[v].iter().next().expect("cycle vertex has neighbours");
            (walk_from(&adj, v, Some(towards)), true)
        }
        _ => {
            return Err(Error::WrongTopology {
                expected: "line or cycle",
            })
        }
    };
    let mut pos = vec![0u64; n];
    for w in walk.windows(2) {
        pos[w[1]] = pos[w[0]] + cost(w[0], w[1]);
    }
    let here = pos[view.start];
    let key = |x: usize| pos[x];
    let mut right: Vec<usize> = walk.iter().copied().filter(|&x| key(x) > here && local[x].is_some()).collect();
    let mut left: Vec<usize> = walk.iter().copied().filter(|&x| key(x) < here && local[x].is_some()).collect();
    right.sort_by_key(|&x| key(x));
    left.sort_by_key(|&x| std::cmp::Reverse(key(x)));
    if closed {
        // Every member lies on both sides of the start on a cycle.
        left = right.iter().rev().copied().collect();
    }
    let to_local = |xs: Vec<usize>| xs.into_iter().map(|x| local[x].unwrap()).collect();
    Ok((to_local(left), to_local(right)))
}

fn walk_from(adj: &[BTreeSet<usize>], start: usize, towards: Option<usize>) -> Vec<usize> {
    let mut walk = vec![start];
    let mut prev = start;
    let mut cur = match towards.or_else(|| adj[start].iter().next().copied()) {
        Some(c) => c,
        None => return walk,
    };
    while cur != start {
        walk.push(cur);
        match adj[cur].iter().copied().find(|&x| x != prev) {
            Some(next) => {
                prev = cur;
                cur = next;
            }
            None => break,
        }
    }
    walk
}

/// Proper covering sets on a line or cycle. Each set is determined by how
/// many targets it takes on each side of the start; the search keeps the
/// earliest time for every (left count, right count, current side).
pub fn solve_line_cycle(v: usize, s: usize, inst: &Instance) -> Result<Vec<CoveringSetResult>> {
    let view = SignalView::new(inst, v, s)?;
    let topo = detect_topology(inst);
    line_cycle_for_view(&view, topo, &Budget::unlimited())
}

pub fn line_cycle_for_view(view: &SignalView<'_>, topo: TopologyClass, budget: &Budget) -> Result<Vec<CoveringSetResult>> {
    let (left, right) = sides(view, topo)?;
    let m = view.len();
    let cycle = topo == TopologyClass::Cycle;
    let (nl, nr) = (left.len(), right.len());
    // best[a][b][side]: (time, predecessor (a, b, side)); side 0 = left.
    type Cell = Option<(u32, Option<(usize, usize, usize)>)>;
    let mut best: Vec<Vec<[Cell; 2]>> = vec![vec![[None, None]; nr + 1]; nl + 1];
    let fits = |a: usize, b: usize| !cycle || a + b <= m;
    let mask_of = |a: usize, b: usize| -> u64 {
        left[..a]
            .iter()
            .chain(&right[..b])
            .fold(0u64, |acc, &i| acc | 1 << i)
    };
    let first_leg = |t: usize| view.from_start[t] <= view.deadline[t] && view.start_interior(t) == 0;
    if nl > 0 && first_leg(left[0]) {
        best[1][0][0] = Some((view.from_start[left[0]], None));
    }
    if nr > 0 && first_leg(right[0]) {
        best[0][1][1] = Some((view.from_start[right[0]], None));
    }
    for total in 1..=m {
        budget.check()?;
        for a in 0..=total.min(nl) {
            let b = total - a;
            if b > nr || !fits(a, b) {
                continue;
            }
            for side in 0..2 {
                let Some((time, _)) = best[a][b][side] else { continue };
                let cur = if side == 0 { left[a - 1] } else { right[b - 1] };
                let mask = mask_of(a, b);
                let mut step = |na: usize, nb: usize, nside: usize, u: usize| {
                    if mask >> u & 1 == 1 {
                        return;
                    }
                    let t = time + view.dist(cur, u);
                    if t > view.deadline[u] || view.interior(cur, u) & !mask != 0 {
                        return;
                    }
                    let cell = &mut best[na][nb][nside];
                    if cell.is_none_or(|(old, _)| t < old) {
                        *cell = Some((t, Some((a, b, side))));
                    }
                };
                if a < nl && fits(a + 1, b) {
                    step(a + 1, b, 0, left[a]);
                }
                if b < nr && fits(a, b + 1) {
                    step(a, b + 1, 1, right[b]);
                }
            }
        }
    }

    let mut out = Vec::new();
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
    let mut found: Vec<(u64, u32, usize, usize, usize)> = Vec::new();
    for a in 0..=nl {
        for b in 0..=nr {
            let cells = &best[a][b];
            let pick = match (cells[0], cells[1]) {
                (Some(l), Some(r)) => Some(if r.0 < l.0 { 1 } else { 0 }),
                (Some(_), None) => Some(0),
                (None, Some(_)) => Some(1),
                (None, None) => None,
            };
            if let Some(side) = pick {
                found.push((mask_of(a, b), cells[side].unwrap().0, a, b, side));
            }
        }
    }
    // On a cycle several (a, b) splits reach the full set; keep the cheapest.
    found.sort_by_key(|&(mask, cost, a, b, _)| (mask.count_ones(), mask, cost, a, b));
    found.dedup_by_key(|x| x.0);
    for (mask, cost, a, b, side) in found {
        let mut seq = Vec::new();
        let mut state = Some((a, b, side));
        while let Some((a, b, side)) = state {
            seq.push(if side == 0 { left[a - 1] } else { right[b - 1] });
            state = best[a][b][side].unwrap().1;
        }
        seq.reverse();
        let route = view.route(&seq);
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
    Ok(out)
}

/// One branch of a star seen as a scheduling task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarTask {
    pub target: TargetId,
    /// Branch length `gamma`.
    pub branch: u32,
    /// Time the Defender is busy with the branch: out and back.
    pub processing: u32,
    /// Latest completion: `d + gamma`.
    pub due: u32,
}

/// Earliest-due-date schedule of star branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSchedule {
    /// Tasks in EDD order.
    pub tasks: Vec<StarTask>,
    pub feasible: bool,
}

impl StarSchedule {
    pub fn new(inst: &Instance, hub: usize, targets: &[TargetId]) -> StarSchedule {
        let mut tasks: Vec<StarTask> = targets
            .iter()
            .map(|&t| {
                let gamma = inst.dist(hub, inst.target(t).vertex);
                StarTask {
                    target: t,
                    branch: gamma,
                    processing: 2 * gamma,
                    due: inst.target(t).deadline + gamma,
                }
            })
            .collect();
        tasks.sort_by_key(|x| (x.due, x.target));
        let mut elapsed = 0u32;
        let mut feasible = true;
        for task in &tasks {
            elapsed += task.processing;
            if elapsed > task.due {
                feasible = false;
                break;
            }
        }
        StarSchedule { tasks, feasible }
    }

    pub fn route(&self, inst: &Instance, hub: usize) -> Route {
        Route::new(inst, hub, self.tasks.iter().map(|x| x.target).collect())
    }
}

fn check_star_hub(inst: &Instance, v: usize) -> Result<()> {
    inst.check_vertex(v)?;
    let adj = neighbours(inst);
    let n = inst.num_vertices();
    let edges: usize = adj.iter().map(BTreeSet::len).sum::<usize>() / 2;
    let hub = (0..n).find(|&x| adj[x].len() + 1 == n);
    match hub {
        _ if edges + 1 != n => Err(Error::WrongTopology { expected: "star" }),
        None => Err(Error::WrongTopology { expected: "star" }),
        Some(_) if adj[v].len() + 1 == n => Ok(()),
        Some(_) => Err(Error::StartNotHub(v)),
    }
}

/// A route covering every target of signal `s` from the hub, if one exists.
pub fn edd_full_cover(v: usize, s: usize, inst: &Instance) -> Result<Option<Route>> {
    check_star_hub(inst, v)?;
    let view = SignalView::new(inst, v, s)?;
    let sched = StarSchedule::new(inst, v, &view.members);
    Ok(sched.feasible.then(|| sched.route(inst, v)))
}

/// Best pure response on a star: drop the least valuable target until the
/// rest can be scheduled. Returns the route and the largest value left
/// uncovered.
pub fn best_pure_star(v: usize, s: usize, inst: &Instance) -> Result<(Route, f64)> {
    check_star_hub(inst, v)?;
    let view = SignalView::new(inst, v, s)?;
    let mut kept = view.members.clone();
    loop {
        let sched = StarSchedule::new(inst, v, &kept);
        if sched.feasible {
            let route = sched.route(inst, v);
            let value = inst.signals()[s]
                .targets()
                .filter(|&t| !route.covers(inst, t))
                .map(|t| inst.target(t).value)
                .fold(0.0, f64::max);
            return Ok((route, value));
        }
        let drop = kept
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let (va, vb) = (inst.target(*a.1).value, inst.target(*b.1).value);
                va.total_cmp(&vb).then(a.1.cmp(b.1))
            })
            .map(|(i, _)| i)
            .expect("an infeasible schedule has a task");
        kept.remove(drop);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::compute_cov_sets;
    use crate::graph::tests::hourglass_single_signal;
    use crate::graph::{Edge, SignalSpec, TargetSpec};

    fn build(n: usize, edges: &[(usize, usize, u32)], targets: &[(usize, f64, u32)]) -> Instance {
        Instance::new(
            n,
            edges.iter().map(|&(u, v, cost)| Edge { u, v, cost }).collect(),
            targets
                .iter()
                .map(|&(vertex, value, deadline)| TargetSpec { vertex, value, deadline })
                .collect(),
            vec![SignalSpec {
                id: "s".into(),
                coverage: targets.iter().map(|t| (t.0, 1.0)).collect(),
            }],
            None,
        )
        .unwrap()
    }

    fn same_sets(a: &[CoveringSetResult], b: &[CoveringSetResult]) {
        let key = |x: &[CoveringSetResult]| {
            let mut v: Vec<_> = x.iter().map(|c| (c.set.clone(), c.cost, c.maximal)).collect();
            v.sort();
            v
        };
        assert_eq!(key(a), key(b));
    }

    #[test]
    fn classes() {
        let line = build(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)], &[(0, 1.0, 4)]);
        assert_eq!(detect_topology(&line), TopologyClass::Linear);
        let cyc = build(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], &[(0, 1.0, 4)]);
        assert_eq!(detect_topology(&cyc), TopologyClass::Cycle);
        assert_eq!(detect_topology(&hourglass_single_signal()), TopologyClass::Arbitrary);
        let star = build(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)], &[(1, 1.0, 4)]);
        assert_eq!(detect_topology(&star), TopologyClass::Star);
        let tree = build(6, &[(0, 1, 1), (1, 2, 1), (1, 3, 1), (3, 4, 1), (3, 5, 1)], &[(2, 1.0, 4)]);
        assert_eq!(detect_topology(&tree), TopologyClass::Tree(4));
    }

    #[test]
    fn line_matches_dp() {
        // t1 - t2 - v - t3 - t4, all deadlines 4.
        let inst = build(
            5,
            &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)],
            &[(0, 1.0, 4), (1, 1.0, 4), (3, 1.0, 4), (4, 1.0, 4)],
        );
        let fast = solve_line_cycle(2, 0, &inst).unwrap();
        same_sets(&fast, &compute_cov_sets(2, 0, &inst).unwrap());
        assert!(fast.iter().any(|c| c.set.len() == 2 && c.set.contains(&TargetId(1)) && c.set.contains(&TargetId(2))));
    }

    #[test]
    fn single_target_line() {
        let inst = build(2, &[(0, 1, 3)], &[(1, 1.0, 3)]);
        assert_eq!(solve_line_cycle(0, 0, &inst).unwrap().len(), 1);
        let inst = build(2, &[(0, 1, 3)], &[(1, 1.0, 2)]);
        assert!(solve_line_cycle(0, 0, &inst).unwrap().is_empty());
    }

    #[test]
    fn cycle_full_sweep() {
        let edges: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8, 1)).collect();
        let targets: Vec<_> = (1..8).map(|i| (i, 1.0, 20)).collect();
        let inst = build(8, &edges, &targets);
        let res = solve_line_cycle(0, 0, &inst).unwrap();
        let full = res.iter().find(|c| c.set.len() == 7).unwrap();
        assert_eq!(full.cost, 7);
        same_sets(&res, &compute_cov_sets(0, 0, &inst).unwrap());
    }

    #[test]
    fn cycle_full_set_takes_cheaper_direction() {
        let inst = build(3, &[(0, 1, 3), (1, 2, 2), (2, 0, 2)], &[(0, 1.0, 1), (1, 1.0, 9), (2, 1.0, 9)]);
        let res = solve_line_cycle(0, 0, &inst).unwrap();
        assert_eq!(res.iter().find(|c| c.set.len() == 3).unwrap().cost, 4);
        same_sets(&res, &compute_cov_sets(0, 0, &inst).unwrap());
    }

    #[test]
    fn wrong_topology() {
        let inst = hourglass_single_signal();
        assert!(matches!(solve_line_cycle(0, 0, &inst), Err(Error::WrongTopology { .. })));
        assert!(matches!(edd_full_cover(0, 0, &inst), Err(Error::WrongTopology { .. })));
    }

    fn star(gammas: &[u32], deadlines: &[u32], values: &[f64]) -> Instance {
        let edges: Vec<_> = gammas.iter().enumerate().map(|(i, &g)| (0, i + 1, g)).collect();
        let targets: Vec<_> = (0..gammas.len()).map(|i| (i + 1, values[i], deadlines[i])).collect();
        build(gammas.len() + 1, &edges, &targets)
    }

    #[test]
    fn edd_examples() {
        let inst = star(&[1, 1], &[2, 4], &[1.0, 1.0]);
        let r = edd_full_cover(0, 0, &inst).unwrap().unwrap();
        assert_eq!(r.arrivals, vec![1, 3]);
        let inst = star(&[1, 1], &[1, 1], &[0.3, 0.9]);
        assert!(edd_full_cover(0, 0, &inst).unwrap().is_none());
        let (route, value) = best_pure_star(0, 0, &inst).unwrap();
        assert_eq!(route.targets, vec![TargetId(1)]);
        assert_eq!(value, 0.3);
        assert_eq!(edd_full_cover(1, 0, &inst), Err(Error::StartNotHub(1)));
        let inst = star(&[2], &[2], &[1.0]);
        assert!(edd_full_cover(0, 0, &inst).unwrap().is_some());
        let inst = star(&[2], &[1], &[1.0]);
        assert!(edd_full_cover(0, 0, &inst).unwrap().is_none());
    }

    #[test]
    fn schedulable_star_has_value_zero() {
        let inst = star(&[1, 2, 1], &[10, 10, 10], &[0.5, 0.5, 0.5]);
        let (route, value) = best_pure_star(0, 0, &inst).unwrap();
        assert_eq!(route.len(), 3);
        assert_eq!(value, 0.0);
    }
}

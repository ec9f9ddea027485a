//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the library's route generators or its LP. Routes are
//! enumerated exhaustively, and game values come from the Attacker's side of
//! the zero-sum game (a different LP than the one the library solves).

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use alarm_patrol::graph::{Edge, SignalSpec, TargetSpec};
use alarm_patrol::{Instance, TargetId};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sorted target indices.
pub type Set = Vec<usize>;

/// Every covering set of signal `s` from `v` with its cheapest route cost.
///
/// Sequences are enumerated depth-first. A leg may only pass through signal
/// targets that were already visited; the start target counts as visited at
/// time 0. The stay set (start target or empty) is always included.
pub fn covering_sets(inst: &Instance, v: usize, s: usize) -> BTreeMap<Set, u32> {
    let members: Vec<usize> = inst.signals()[s].coverage.iter().map(|(t, _)| t.0).collect();
    let in_signal = |t: usize| members.contains(&t);
    let mut visited = vec![false; inst.targets().len()];
    if let Some(t) = inst.target_at(v) {
        if in_signal(t.0) {
            visited[t.0] = true;
        }
    }
    let mut out = BTreeMap::new();
    dfs(inst, &members, v, 0, &mut visited, &mut out);
    out
}

fn dfs(inst: &Instance, members: &[usize], at: usize, time: u32, visited: &mut Vec<bool>, out: &mut BTreeMap<Set, u32>) {
    let set: Set = members.iter().copied().filter(|&t| visited[t]).sorted();
    let e = out.entry(set).or_insert(u32::MAX);
    *e = (*e).min(time);
    for &t in members {
        if visited[t] {
            continue;
        }
        let tgt = &inst.targets()[t];
        let arrival = time + inst.dist(at, tgt.vertex);
        if arrival > tgt.deadline {
            continue;
        }
        let path = inst.distances().path(at, tgt.vertex);
        let clean = path[1..path.len() - 1].iter().all(|&x| match inst.target_at(x) {
            Some(u) if members.contains(&u.0) => visited[u.0],
            _ => true,
        });
        if !clean {
            continue;
        }
        visited[t] = true;
        dfs(inst, members, tgt.vertex, arrival, visited, out);
        visited[t] = false;
    }
}

trait Sorted {
    fn sorted(self) -> Set;
}

impl<I: Iterator<Item = usize>> Sorted for I {
    fn sorted(self) -> Set {
        let mut v: Set = self.collect();
        v.sort_unstable();
        v
    }
}

/// Sets not strictly contained in another set of the family, empty set
/// excluded.
pub fn maximal(sets: impl IntoIterator<Item = Set>) -> BTreeSet<Set> {
    let all: Vec<Set> = sets.into_iter().filter(|x| !x.is_empty()).collect();
    all.iter()
        .filter(|a| {
            !all.iter()
                .any(|b| b.len() > a.len() && a.iter().all(|x| b.contains(x)))
        })
        .cloned()
        .collect()
}

pub fn ids(set: &[TargetId]) -> Set {
    set.iter().map(|t| t.0).sorted()
}

/// Game value from the Attacker's side:
/// `max_y sum_s min_Q sum_{t not in Q} y_t p(s|t) pi(t)` over mixed targets
/// `y`, with `families[s]` the Defender's covered sets for signal `s`.
pub fn attacker_value(inst: &Instance, families: &[Vec<Set>]) -> f64 {
    let nt = inst.targets().len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let y: Vec<_> = (0..nt).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let z: Vec<_> = (0..families.len())
        .map(|_| lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let row: Vec<_> = y.iter().map(|&x| (x, 1.0)).collect();
    lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 1.0);
    for (s, fam) in families.iter().enumerate() {
        let sig = &inst.signals()[s];
        for q in fam {
            let mut row = vec![(z[s], 1.0)];
            for &(t, p) in &sig.coverage {
                if !q.contains(&t.0) {
                    row.push((y[t.0], -p * inst.targets()[t.0].value));
                }
            }
            lp.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
        }
    }
    lp.solve().expect("attacker LP is feasible and bounded").objective()
}

/// Exact `g_v` by brute force: every covering set of every signal.
pub fn oracle_value(inst: &Instance, v: usize) -> f64 {
    let fams: Vec<Vec<Set>> = (0..inst.signals().len())
        .map(|s| covering_sets(inst, v, s).into_keys().collect())
        .collect();
    attacker_value(inst, &fams)
}

/// Plain permutation search for a Hamiltonian path.
pub fn has_hamiltonian_path(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    fn extend(adj: &[Vec<bool>], path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if path.len() == adj.len() {
            return true;
        }
        let last = *path.last().unwrap();
        for w in 0..adj.len() {
            if !used[w] && adj[last][w] {
                used[w] = true;
                path.push(w);
                if extend(adj, path, used) {
                    return true;
                }
                path.pop();
                used[w] = false;
            }
        }
        false
    }
    (0..n).any(|s| {
        let mut used = vec![false; n];
        used[s] = true;
        extend(&adj, &mut vec![s], &mut used)
    })
}

/// Whether `xs` splits into two halves of equal sum.
pub fn has_equal_partition(xs: &[u32]) -> bool {
    let total: u32 = xs.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    let half = (total / 2) as usize;
    let mut reach = vec![false; half + 1];
    reach[0] = true;
    for &x in xs {
        for s in (x as usize..=half).rev() {
            reach[s] |= reach[s - x as usize];
        }
    }
    reach[half]
}

/// Random connected simple graph: a shuffled spanning tree plus extra edges
/// with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        let (a, b) = (order[i].min(parent), order[i].max(parent));
        edges.insert((a, b));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    edges.into_iter().collect()
}

fn single_signal(targets: &[TargetSpec]) -> Vec<SignalSpec> {
    vec![SignalSpec {
        id: "s1".into(),
        coverage: targets.iter().map(|t| (t.vertex, 1.0)).collect(),
    }]
}

fn random_targets(vertices: impl Iterator<Item = usize>, max_deadline: u32, rng: &mut ChaCha8Rng) -> Vec<TargetSpec> {
    vertices
        .map(|v| TargetSpec {
            vertex: v,
            value: rng.random_range(0.05..1.0),
            deadline: rng.random_range(1..=max_deadline),
        })
        .collect()
}

/// A path `0 - 1 - ... - n-1` with random costs; every vertex is a target
/// and the start is random.
pub fn random_line(n: usize, seed: u64) -> (Instance, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Edge> = (1..n)
        .map(|i| Edge { u: i - 1, v: i, cost: rng.random_range(1..=3) })
        .collect();
    let span: u32 = edges.iter().map(|e| e.cost).sum();
    let targets = random_targets(0..n, 2 * span, &mut rng);
    let start = rng.random_range(0..n);
    let inst = Instance::new(n, edges, targets.clone(), single_signal(&targets), Some(start)).unwrap();
    (inst, start)
}

/// A cycle over `n` vertices with random costs; every vertex is a target.
pub fn random_cycle(n: usize, seed: u64) -> (Instance, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Edge> = (0..n)
        .map(|i| Edge { u: i, v: (i + 1) % n, cost: rng.random_range(1..=3) })
        .collect();
    let span: u32 = edges.iter().map(|e| e.cost).sum();
    let targets = random_targets(0..n, span + span / 2, &mut rng);
    let start = rng.random_range(0..n);
    let inst = Instance::new(n, edges, targets.clone(), single_signal(&targets), Some(start)).unwrap();
    (inst, start)
}

/// A star with hub `0` and `leaves` leaf targets; the hub is a target with
/// probability one half. The start is the hub.
pub fn random_star(leaves: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Edge> = (1..=leaves)
        .map(|i| Edge { u: 0, v: i, cost: rng.random_range(1..=4) })
        .collect();
    let span: u32 = edges.iter().map(|e| e.cost).sum();
    let first = if rng.random_bool(0.5) { 0 } else { 1 };
    let targets = random_targets(first..=leaves, span + 2, &mut rng);
    Instance::new(leaves + 1, edges, targets.clone(), single_signal(&targets), Some(0)).unwrap()
}

/// The two four-target examples used for the missed-detection bound: edges
/// t1-t2, t1-t3, t1-t4 (cost 2), t3-t4, deadlines (1, 3, 2, 2), all values
/// `value`.
pub fn robustness_example(value: f64) -> Instance {
    let edges = vec![
        Edge { u: 0, v: 1, cost: 1 },
        Edge { u: 0, v: 2, cost: 1 },
        Edge { u: 0, v: 3, cost: 2 },
        Edge { u: 2, v: 3, cost: 1 },
    ];
    let targets: Vec<TargetSpec> = [1, 3, 2, 2]
        .iter()
        .enumerate()
        .map(|(v, &d)| TargetSpec { vertex: v, value, deadline: d })
        .collect();
    Instance::new(4, edges, targets.clone(), single_signal(&targets), None).unwrap()
}

/// Dijkstra distances from `src`, used to cross-check the distance matrix.
pub fn dijkstra(inst: &Instance, src: usize) -> Vec<u64> {
    let n = inst.num_vertices();
    let mut dist = vec![u64::MAX; n];
    let mut heap = std::collections::BinaryHeap::new();
    dist[src] = 0;
    heap.push(std::cmp::Reverse((0u64, src)));
    while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for e in inst.edges() {
            let w = if e.u == u {
                e.v
            } else if e.v == u {
                e.u
            } else {
                continue;
            };
            let nd = d + e.cost as u64;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(std::cmp::Reverse((nd, w)));
            }
        }
    }
    dist
}

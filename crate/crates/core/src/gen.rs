//! Seeded instance generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, so a given
//! `(parameters, seed)` pair yields the same instance on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::{Edge, Instance, SignalSpec, TargetSpec};

/// Random connected graph on `n` vertices with unit edges, roughly
/// `eps * n(n-1)/2` of them.
fn random_graph(n: usize, eps: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Edge>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidDensity(eps));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 targets, got {n}")));
    }
    let max = n * (n - 1) / 2;
    let count = if eps == 1.0 {
        max
    } else {
        let normal = Normal::new(eps * max as f64, 1.0).expect("unit standard deviation");
        let draw: f64 = normal.sample(rng);
        (draw.round().max(0.0) as usize).clamp(n - 1, max)
    };
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(rng);
    pairs.truncate(count);

    // Bridge every extra component to the ones before it.
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while comp[r] != r {
            r = comp[r];
        }
        let mut y = x;
        while comp[y] != r {
            let next = comp[y];
            comp[y] = r;
            y = next;
        }
        r
    }
    for &(u, v) in &pairs {
        let (a, b) = (find(&mut comp, u), find(&mut comp, v));
        comp[a.max(b)] = a.min(b);
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        let r = find(&mut comp, x);
        members[r].push(x);
    }
    let groups: Vec<Vec<usize>> = members.into_iter().filter(|g| !g.is_empty()).collect();
    let mut linked: Vec<usize> = groups[0].clone();
    for g in &groups[1..] {
        let a = g[rng.random_range(0..g.len())];
        let b = linked[rng.random_range(0..linked.len())];
        pairs.push((a.min(b), a.max(b)));
        linked.extend(g);
    }
    Ok(pairs
        .into_iter()
        .map(|(u, v)| Edge { u, v, cost: 1 })
        .collect())
}

/// Value in `(0, 1]`.
fn positive_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

fn worstcase_layer(n: usize, eps: f64, rng: &mut ChaCha8Rng) -> Result<(Vec<Edge>, Vec<TargetSpec>, usize)> {
    let edges = random_graph(n, eps, rng)?;
    let targets = (0..n)
        .map(|v| TargetSpec {
            vertex: v,
            value: positive_unit(rng),
            deadline: (n - 1) as u32,
        })
        .collect();
    let start = rng.random_range(0..n);
    Ok((edges, targets, start))
}

/// Every vertex is a target with deadline `n - 1`, one signal covers all of
/// them; the start vertex is drawn uniformly.
pub fn gen_worstcase(n: usize, eps: f64, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (edges, targets, start) = worstcase_layer(n, eps, &mut rng)?;
    let signals = vec![SignalSpec {
        id: "s1".into(),
        coverage: (0..n).map(|v| (v, 1.0)).collect(),
    }];
    Instance::new(n, edges, targets, signals, Some(start))
}

/// The worst-case graph with `m` signals. Each target gets a uniformly
/// random nonempty subset of signals with normalized uniform weights; a
/// signal left without targets is attached to a random target.
pub fn gen_multisignal(n: usize, m: usize, eps: f64, seed: u64) -> Result<Instance> {
    if m == 0 || m > 63 {
        return Err(Error::InvalidParameter(format!("signal count must lie in 1..=63, got {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (edges, targets, start) = worstcase_layer(n, eps, &mut rng)?;
    // rows[t][s] = unnormalized weight of signal s at target t.
    let mut rows = vec![vec![0.0; m]; n];
    let mut used = vec![false; m];
    for row in rows.iter_mut() {
        let subset: u64 = rng.random_range(1..=(u64::MAX >> (64 - m)));
        for (s, w) in row.iter_mut().enumerate() {
            if subset >> s & 1 == 1 {
                *w = positive_unit(&mut rng);
                used[s] = true;
            }
        }
    }
    for (s, u) in used.iter().enumerate() {
        if !u {
            let t = rng.random_range(0..n);
            rows[t][s] = positive_unit(&mut rng);
        }
    }
    let mut signals: Vec<SignalSpec> = (0..m)
        .map(|s| SignalSpec {
            id: format!("s{}", s + 1),
            coverage: Vec::new(),
        })
        .collect();
    for (t, row) in rows.iter().enumerate() {
        let total: f64 = row.iter().sum();
        let support = row.iter().filter(|&&w| w > 0.0).count();
        for (s, &w) in row.iter().enumerate() {
            if w > 0.0 {
                let p = if support == 1 { 1.0 } else { w / total };
                signals[s].coverage.push((t, p));
            }
        }
    }
    Instance::new(n, edges, targets, signals, Some(start))
}

/// Two-level star: hub `0`, inner targets `1..=n` at distance `gamma_i`,
/// outer targets `n+1..=2n` a further `gamma_i` away. With
/// `H = sum(gamma) / 2`, inner deadlines are `6H - 3 gamma_i` and outer ones
/// `10H - 2 gamma_i`.
pub fn gen_s2lstar(gammas: &[u32]) -> Result<Instance> {
    let n = gammas.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two branches".into()));
    }
    if gammas.contains(&0) {
        return Err(Error::InvalidParameter("branch weights must be positive".into()));
    }
    let total: u32 = gammas.iter().sum();
    if total % 2 == 1 {
        return Err(Error::OddTotalWeight);
    }
    let h = total / 2;
    let mut edges = Vec::with_capacity(2 * n);
    let mut targets = Vec::with_capacity(2 * n);
    for (i, &g) in gammas.iter().enumerate() {
        let (inner, outer) = (i + 1, n + i + 1);
        edges.push(Edge { u: 0, v: inner, cost: g });
        edges.push(Edge { u: inner, v: outer, cost: g });
        targets.push(TargetSpec { vertex: inner, value: 1.0, deadline: 6 * h - 3 * g });
        targets.push(TargetSpec { vertex: outer, value: 1.0, deadline: 10 * h - 2 * g });
    }
    let signals = vec![SignalSpec {
        id: "s1".into(),
        coverage: (1..=2 * n).map(|v| (v, 1.0)).collect(),
    }];
    Instance::new(2 * n + 1, edges, targets, signals, Some(0))
}

/// Adds a start vertex `n` adjacent to every vertex of the `n`-vertex graph
/// `edges`; all original vertices become targets with deadline `n`.
pub fn gen_from_hampath(n: usize, edges: &[(usize, usize)]) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidParameter("graph has no vertices".into()));
    }
    let mut all: Vec<Edge> = edges.iter().map(|&(u, v)| Edge { u, v, cost: 1 }).collect();
    all.extend((0..n).map(|u| Edge { u, v: n, cost: 1 }));
    let targets = (0..n)
        .map(|v| TargetSpec { vertex: v, value: 1.0, deadline: n as u32 })
        .collect();
    let signals = vec![SignalSpec {
        id: "s1".into(),
        coverage: (0..n).map(|v| (v, 1.0)).collect(),
    }];
    Instance::new(n + 1, all, targets, signals, Some(n))
}

/// Parses an adjacency list: one line `u v1 v2 ...` per vertex, `#` starts a
/// comment. Returns the vertex count and the undirected edge list.
pub fn parse_adjacency(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut n = 0;
    let mut edges = std::collections::BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ids = line
            .split_whitespace()
            .map(|x| x.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::MalformedDocument(format!("line {}: {e}", lineno + 1)))?;
        let u = ids[0];
        n = n.max(u + 1);
        for &v in &ids[1..] {
            if v == u {
                return Err(Error::MalformedDocument(format!("line {}: self-loop at {u}", lineno + 1)));
            }
            n = n.max(v + 1);
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Ok((n, edges.into_iter().collect()))
}

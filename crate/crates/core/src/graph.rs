//! Instance model: graph, targets, alarm signals and shortest paths.
//!
//! Instances are immutable once built. Every constructor validates the full
//! set of invariants and precomputes the all-pairs distance matrix, so solvers
//! can assume a connected graph with normalized signal probabilities.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that `sum_s p(s|t) = 1`.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// Index of a target inside [`Instance::targets`] (ascending vertex order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TargetId(pub usize);

impl fmt::Display for TargetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Undirected edge with an integer traversal cost in turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub vertex: usize,
    /// Attacker payoff on a successful attack, in `(0, 1]`.
    pub value: f64,
    /// Penetration time in turns, `>= 1`.
    pub deadline: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub id: String,
    /// `(target, p(s|t))`, sorted by target, every probability `> 0`.
    pub coverage: Vec<(TargetId, f64)>,
}

impl Signal {
    pub fn targets(&self) -> impl Iterator<Item = TargetId> + '_ {
        self.coverage.iter().map(|&(t, _)| t)
    }

    pub fn prob(&self, t: TargetId) -> f64 {
        self.coverage
            .binary_search_by_key(&t, |&(x, _)| x)
            .map(|i| self.coverage[i].1)
            .unwrap_or(0.0)
    }
}

/// All-pairs shortest path lengths plus a next-hop table describing one
/// canonical shortest path per ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
    next: Vec<u32>,
}

const UNREACHABLE: u32 = u32::MAX;
const NO_HOP: u32 = u32::MAX;

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, u: usize, w: usize) -> u32 {
        self.dist[u * self.n + w]
    }

    pub fn is_reachable(&self, u: usize, w: usize) -> bool {
        self.dist(u, w) != UNREACHABLE
    }

    /// Canonical shortest path from `u` to `w`, both endpoints included.
    pub fn path(&self, u: usize, w: usize) -> Vec<usize> {
        let mut path = vec![u];
        if u == w || !self.is_reachable(u, w) {
            return path;
        }
        let mut cur = u;
        while cur != w {
            cur = self.next[cur * self.n + w] as usize;
            path.push(cur);
        }
        path
    }
}

/// Floyd-Warshall over the instance graph.
///
/// Intermediate vertices are relaxed in ascending id order and only strict
/// improvements replace a stored path, so among equal-length paths the one
/// found through the lowest intermediate vertex is kept.
pub fn floyd_warshall(num_vertices: usize, edges: &[Edge]) -> DistanceMatrix {
    let n = num_vertices;
    let mut dist = vec![UNREACHABLE; n * n];
    let mut next = vec![NO_HOP; n * n];
    for i in 0..n {
        dist[i * n + i] = 0;
        next[i * n + i] = i as u32;
    }
    for e in edges {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            if e.cost < dist[a * n + b] {
                dist[a * n + b] = e.cost;
                next[a * n + b] = b as u32;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == UNREACHABLE {
                continue;
            }
            for j in 0..n {
                let dkj = dist[k * n + j];
                if dkj == UNREACHABLE {
                    continue;
                }
                let cand = dik + dkj;
                if cand < dist[i * n + j] {
                    dist[i * n + j] = cand;
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    DistanceMatrix { n, dist, next }
}

/// A validated patrolling instance.
#[derive(Debug, Clone)]
pub struct Instance {
    num_vertices: usize,
    edges: Vec<Edge>,
    targets: Vec<Target>,
    signals: Vec<Signal>,
    start: Option<usize>,
    target_at: Vec<Option<TargetId>>,
    dist: DistanceMatrix,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.num_vertices == other.num_vertices
            && self.edges == other.edges
            && self.targets == other.targets
            && self.signals == other.signals
            && self.start == other.start
    }
}

/// Target entry used when constructing an instance programmatically.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub vertex: usize,
    pub value: f64,
    pub deadline: u32,
}

/// Signal entry used when constructing an instance programmatically;
/// coverage is given as `(target vertex, probability)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub id: String,
    pub coverage: Vec<(usize, f64)>,
}

impl Instance {
    /// Validates the raw data and precomputes shortest paths.
    pub fn new(
        num_vertices: usize,
        edges: Vec<Edge>,
        targets: Vec<TargetSpec>,
        signals: Vec<SignalSpec>,
        start: Option<usize>,
    ) -> Result<Instance> {
        let malformed = |m: String| Err(Error::MalformedDocument(m));
        if num_vertices == 0 {
            return malformed("instance needs at least one vertex".into());
        }
        for e in &edges {
            if e.u >= num_vertices || e.v >= num_vertices {
                return malformed(format!("edge ({}, {}) references unknown vertex", e.u, e.v));
            }
            if e.u == e.v {
                return malformed(format!("self-loop at vertex {}", e.u));
            }
            if e.cost == 0 {
                return malformed(format!("edge ({}, {}) has zero cost", e.u, e.v));
            }
        }
        if let Some(s) = start {
            if s >= num_vertices {
                return malformed(format!("start vertex {s} out of range"));
            }
        }

        let mut targets = targets;
        targets.sort_by_key(|t| t.vertex);
        if targets.is_empty() {
            return malformed("instance needs at least one target".into());
        }
        let mut target_at = vec![None; num_vertices];
        for (i, t) in targets.iter().enumerate() {
            if t.vertex >= num_vertices {
                return malformed(format!("target vertex {} out of range", t.vertex));
            }
            if target_at[t.vertex].is_some() {
                return malformed(format!("duplicate target at vertex {}", t.vertex));
            }
            if !(t.value > 0.0 && t.value <= 1.0) {
                return malformed(format!("target {} value {} not in (0, 1]", t.vertex, t.value));
            }
            if t.deadline == 0 {
                return malformed(format!("target {} has zero deadline", t.vertex));
            }
            target_at[t.vertex] = Some(TargetId(i));
        }

        let mut seen_ids = HashSet::new();
        let mut built = Vec::with_capacity(signals.len());
        for s in signals {
            if !seen_ids.insert(s.id.clone()) {
                return malformed(format!("duplicate signal id `{}`", s.id));
            }
            if s.coverage.is_empty() {
                return Err(Error::EmptySignalCoverage(s.id));
            }
            let mut cov: BTreeMap<TargetId, f64> = BTreeMap::new();
            for &(vertex, p) in &s.coverage {
                let tid = match target_at.get(vertex).copied().flatten() {
                    Some(t) => t,
                    None => {
                        return malformed(format!(
                            "signal `{}` covers vertex {vertex}, which is not a target",
                            s.id
                        ))
                    }
                };
                if !(p > 0.0 && p <= 1.0) {
                    return malformed(format!(
                        "signal `{}` has probability {p} for vertex {vertex}; must be in (0, 1]",
                        s.id
                    ));
                }
                if cov.insert(tid, p).is_some() {
                    return malformed(format!("signal `{}` lists vertex {vertex} twice", s.id));
                }
            }
            built.push(Signal {
                id: s.id,
                coverage: cov.into_iter().collect(),
            });
        }

        let mut sums = vec![0.0; targets.len()];
        for s in &built {
            for &(t, p) in &s.coverage {
                sums[t.0] += p;
            }
        }
        for (i, sum) in sums.iter().enumerate() {
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::ProbabilityNotNormalized(targets[i].vertex));
            }
        }

        let dist = floyd_warshall(num_vertices, &edges);
        if (1..num_vertices).any(|w| !dist.is_reachable(0, w)) {
            return Err(Error::DisconnectedGraph);
        }

        let targets = targets
            .into_iter()
            .map(|t| Target {
                vertex: t.vertex,
                value: t.value,
                deadline: t.deadline,
            })
            .collect();
        Ok(Instance {
            num_vertices,
            edges,
            targets,
            signals: built,
            start,
            target_at,
            dist,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target(&self, t: TargetId) -> &Target {
        &self.targets[t.0]
    }

    pub fn target_ids(&self) -> impl Iterator<Item = TargetId> {
        (0..self.targets.len()).map(TargetId)
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn signal(&self, s: usize) -> Result<&Signal> {
        self.signals.get(s).ok_or(Error::SignalUnknown(s))
    }

    /// Suggested start vertex recorded by generators, if any.
    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn target_at(&self, vertex: usize) -> Option<TargetId> {
        self.target_at.get(vertex).copied().flatten()
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    /// Shortest-path distance between two vertices.
    #[inline]
    pub fn dist(&self, u: usize, w: usize) -> u32 {
        self.dist.dist(u, w)
    }

    /// Distance between two targets.
    #[inline]
    pub fn tdist(&self, a: TargetId, b: TargetId) -> u32 {
        self.dist.dist(self.targets[a.0].vertex, self.targets[b.0].vertex)
    }

    /// Signals `s` with `p(s|t) > 0`, together with the probability.
    pub fn signals_of(&self, t: TargetId) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.signals
            .iter()
            .enumerate()
            .filter_map(move |(i, s)| {
                let p = s.prob(t);
                (p > 0.0).then_some((i, p))
            })
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.num_vertices {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }

    /// Parses and validates an instance document.
    pub fn from_toml_str(doc: &str) -> Result<Instance> {
        let raw: InstanceDoc =
            toml::from_str(doc).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        raw.into_instance()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Instance> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            vertices: self.num_vertices,
            start: self.start,
            edges: self
                .edges
                .iter()
                .map(|e| [e.u as u64, e.v as u64, e.cost as u64])
                .collect(),
            targets: self
                .targets
                .iter()
                .map(|t| TargetDoc {
                    vertex: t.vertex,
                    value: t.value,
                    deadline: t.deadline,
                })
                .collect(),
            signals: self
                .signals
                .iter()
                .map(|s| SignalDoc {
                    id: s.id.clone(),
                    coverage: s
                        .coverage
                        .iter()
                        .map(|&(t, p)| CoverageDoc {
                            target: self.targets[t.0].vertex,
                            prob: p,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_doc()).expect("instance documents always serialize")
    }
}

/// Parses an instance document (`build_instance`).
pub fn build_instance(doc: &str) -> Result<Instance> {
    Instance::from_toml_str(doc)
}

/// Recomputes the distance matrix of a validated instance.
pub fn all_pairs_shortest_paths(inst: &Instance) -> DistanceMatrix {
    floyd_warshall(inst.num_vertices, &inst.edges)
}

/// Targets strictly inside the canonical shortest path from `u` to `w`.
pub fn interior_targets(u: usize, w: usize, inst: &Instance, dm: &DistanceMatrix) -> Vec<TargetId> {
    let path = dm.path(u, w);
    if path.len() <= 2 {
        return Vec::new();
    }
    path[1..path.len() - 1]
        .iter()
        .filter_map(|&x| inst.target_at(x))
        .collect()
}

// ---------------------------------------------------------------------------
// Document schema

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    pub edges: Vec<[u64; 3]>,
    pub targets: Vec<TargetDoc>,
    pub signals: Vec<SignalDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDoc {
    pub vertex: usize,
    pub value: f64,
    pub deadline: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalDoc {
    pub id: String,
    pub coverage: Vec<CoverageDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageDoc {
    pub target: usize,
    pub prob: f64,
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<Instance> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for [u, v, c] in self.edges {
            let cost = u32::try_from(c)
                .map_err(|_| Error::MalformedDocument(format!("edge cost {c} too large")))?;
            edges.push(Edge {
                u: u as usize,
                v: v as usize,
                cost,
            });
        }
        let targets = self
            .targets
            .into_iter()
            .map(|t| TargetSpec {
                vertex: t.vertex,
                value: t.value,
                deadline: t.deadline,
            })
            .collect();
        let signals = self
            .signals
            .into_iter()
            .map(|s| SignalSpec {
                id: s.id,
                coverage: s.coverage.into_iter().map(|c| (c.target, c.prob)).collect(),
            })
            .collect();
        Instance::new(self.vertices, edges, targets, signals, self.start)
    }
}

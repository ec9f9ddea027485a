//! Routes over targets and the per-(start, signal) view used by the route
//! generators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Instance, TargetId};

/// A sequence of distinct targets visited from `start` along shortest paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Route {
    pub start: usize,
    pub targets: Vec<TargetId>,
    /// Arrival time at each listed target.
    pub arrivals: Vec<u32>,
    pub cost: u32,
}

impl Route {
    /// The empty route: stay at `start`.
    pub fn stay(start: usize) -> Route {
        Route {
            start,
            targets: Vec::new(),
            arrivals: Vec::new(),
            cost: 0,
        }
    }

    pub fn new(inst: &Instance, start: usize, targets: Vec<TargetId>) -> Route {
        let mut arrivals = Vec::with_capacity(targets.len());
        let mut at = start;
        let mut time = 0u32;
        for &t in &targets {
            let vertex = inst.target(t).vertex;
            time += inst.dist(at, vertex);
            arrivals.push(time);
            at = vertex;
        }
        Route {
            start,
            cost: time,
            targets,
            arrivals,
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Every listed target is reached no later than its deadline.
    pub fn is_covering(&self, inst: &Instance) -> bool {
        self.targets
            .iter()
            .zip(&self.arrivals)
            .all(|(&t, &a)| a <= inst.target(t).deadline)
    }

    /// Capture-on-contact: the start vertex counts as covered at time 0.
    pub fn covers(&self, inst: &Instance, t: TargetId) -> bool {
        inst.target(t).vertex == self.start || self.targets.contains(&t)
    }

    /// Sorted covered targets, including the start vertex if it is a target.
    pub fn covered_targets(&self, inst: &Instance) -> Vec<TargetId> {
        let mut set = self.targets.clone();
        if let Some(t) = inst.target_at(self.start) {
            if !set.contains(&t) {
                set.push(t);
            }
        }
        set.sort();
        set
    }

    /// Start vertex followed by the vertex of every listed target.
    pub fn vertex_sequence(&self, inst: &Instance) -> Vec<usize> {
        std::iter::once(self.start)
            .chain(self.targets.iter().map(|&t| inst.target(t).vertex))
            .collect()
    }

    /// The full walk along canonical shortest paths.
    pub fn walk(&self, inst: &Instance) -> Vec<usize> {
        let mut walk = vec![self.start];
        let mut at = self.start;
        for &t in &self.targets {
            let v = inst.target(t).vertex;
            walk.extend(inst.distances().path(at, v).into_iter().skip(1));
            at = v;
        }
        walk
    }
}

/// Serializable form of a route, in vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteDoc {
    pub vertices: Vec<usize>,
    pub arrivals: Vec<u32>,
    pub cost: u32,
}

impl RouteDoc {
    pub fn from_route(route: &Route, inst: &Instance) -> RouteDoc {
        RouteDoc {
            vertices: route.vertex_sequence(inst),
            arrivals: route.arrivals.clone(),
            cost: route.cost,
        }
    }
}

/// Dense local view of one signal from one start vertex.
///
/// Local index `i` refers to `members[i]`; sets of members are `u64` masks.
/// The start vertex, when it is a target, is pre-covered and excluded from
/// `members`.
#[derive(Debug, Clone)]
pub struct SignalView<'a> {
    pub inst: &'a Instance,
    pub start: usize,
    pub signal: usize,
    pub members: Vec<TargetId>,
    /// Start target when it belongs to `T(s)`.
    pub start_member: Option<TargetId>,
    pub from_start: Vec<u32>,
    pub deadline: Vec<u32>,
    dist: Vec<u32>,
    interior: Vec<u64>,
    start_interior: Vec<u64>,
}

impl<'a> SignalView<'a> {
    pub fn new(inst: &'a Instance, start: usize, signal: usize) -> Result<SignalView<'a>> {
        inst.check_vertex(start)?;
        let sig = inst.signal(signal)?;
        let start_target = inst.target_at(start);
        let start_member = start_target.filter(|t| sig.targets().any(|x| x == *t));
        let members: Vec<TargetId> = sig
            .targets()
            .filter(|&t| Some(t) != start_member)
            .collect();
        let m = members.len();
        if m > 63 {
            return Err(Error::TooManyTargets(m));
        }
        let mut local = vec![None; inst.num_vertices()];
        for (i, &t) in members.iter().enumerate() {
            local[inst.target(t).vertex] = Some(i);
        }
        let dm = inst.distances();
        let mask_of_path = |u: usize, w: usize| -> u64 {
            let path = dm.path(u, w);
            if path.len() <= 2 {
                return 0;
            }
            path[1..path.len() - 1]
                .iter()
                .filter_map(|&x| local[x])
                .fold(0u64, |acc, i| acc | (1 << i))
        };
        let vert: Vec<usize> = members.iter().map(|&t| inst.target(t).vertex).collect();
        let mut dist = vec![0; m * m];
        let mut interior = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                dist[i * m + j] = inst.dist(vert[i], vert[j]);
                if i != j {
                    interior[i * m + j] = mask_of_path(vert[i], vert[j]);
                }
            }
        }
        Ok(SignalView {
            inst,
            start,
            signal,
            from_start: vert.iter().map(|&x| inst.dist(start, x)).collect(),
            deadline: members.iter().map(|&t| inst.target(t).deadline).collect(),
            start_interior: vert.iter().map(|&x| mask_of_path(start, x)).collect(),
            start_member,
            members,
            dist,
            interior,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.members.len() + j]
    }

    /// Members strictly inside the canonical path `i -> j`.
    #[inline]
    pub fn interior(&self, i: usize, j: usize) -> u64 {
        self.interior[i * self.members.len() + j]
    }

    /// Members strictly inside the canonical path `start -> j`.
    #[inline]
    pub fn start_interior(&self, j: usize) -> u64 {
        self.start_interior[j]
    }

    /// Converts a local sequence into a route.
    pub fn route(&self, seq: &[usize]) -> Route {
        Route::new(
            self.inst,
            self.start,
            seq.iter().map(|&i| self.members[i]).collect(),
        )
    }

    /// Sorted covered subset of `T(s)` for a member mask.
    pub fn set_of(&self, mask: u64) -> Vec<TargetId> {
        let mut set: Vec<TargetId> = (0..self.members.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.members[i])
            .collect();
        set.extend(self.start_member);
        set.sort();
        set
    }

    /// Member mask of a set of targets; `None` if some target is neither a
    /// member nor the pre-covered start.
    pub fn mask_of(&self, set: &[TargetId]) -> Option<u64> {
        let mut mask = 0u64;
        for t in set {
            if Some(*t) == self.start_member {
                continue;
            }
            let i = self.members.iter().position(|m| m == t)?;
            mask |= 1 << i;
        }
        Some(mask)
    }

    /// Local index of a member target.
    pub fn local(&self, t: TargetId) -> Option<usize> {
        self.members.iter().position(|&m| m == t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::hourglass_single_signal;

    #[test]
    fn arrivals_and_coverage() {
        let inst = hourglass_single_signal();
        let ids: Vec<TargetId> = inst.target_ids().collect();
        let r = Route::new(&inst, 0, vec![ids[0], ids[1], ids[2]]);
        assert_eq!(r.arrivals, vec![1, 2, 4]);
        assert_eq!(r.cost, 4);
        assert!(r.is_covering(&inst));
        let all = Route::new(&inst, 0, ids.clone());
        assert_eq!(all.arrivals, vec![1, 2, 4, 5]);
        assert!(!all.is_covering(&inst));
        assert_eq!(r.walk(&inst), vec![0, 1, 2, 0, 3]);
    }

    #[test]
    fn start_target_is_covered() {
        let inst = hourglass_single_signal();
        let t1 = inst.target_at(1).unwrap();
        let r = Route::stay(1);
        assert!(r.covers(&inst, t1));
        assert_eq!(r.covered_targets(&inst), vec![t1]);
        let view = SignalView::new(&inst, 1, 0).unwrap();
        assert_eq!(view.len(), 3);
        assert_eq!(view.start_member, Some(t1));
        assert_eq!(view.set_of(0).len(), 1);
    }
}

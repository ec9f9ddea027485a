//! The signal-response game from a fixed vertex: route menus, payoffs and the
//! maxmin linear program.

use std::collections::HashSet;
use std::time::Duration;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::approx_route_set;
use crate::bnb::branch_and_bound;
use crate::budget::Budget;
use crate::covering::{cov_sets_for_view, is_subset, CoveringSetResult};
use crate::error::{Error, Result};
use crate::graph::{Instance, TargetId};
use crate::route::{Route, RouteDoc, SignalView};
use crate::topology::{detect_topology, line_cycle_for_view, TopologyClass};

/// Feasibility tolerance accepted on the returned strategy.
pub const LP_TOL: f64 = 1e-6;

/// `pi(t)` when `r` leaves `t` uncovered, `0` otherwise.
pub fn attacker_utility(r: &Route, t: TargetId, inst: &Instance) -> f64 {
    if r.covers(inst, t) {
        0.0
    } else {
        inst.target(t).value
    }
}

/// Candidate routes per signal, indexed like `Instance::signals`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RouteMenu {
    pub routes: Vec<Vec<Route>>,
}

impl RouteMenu {
    pub fn new(routes: Vec<Vec<Route>>) -> RouteMenu {
        RouteMenu { routes }
    }

    /// Appends every route of `other`, signal by signal.
    pub fn extend(&mut self, other: &RouteMenu) {
        if self.routes.len() < other.routes.len() {
            self.routes.resize(other.routes.len(), Vec::new());
        }
        for (mine, theirs) in self.routes.iter_mut().zip(&other.routes) {
            mine.extend(theirs.iter().cloned());
        }
    }
}

/// Sorted targets of `T(s)` that `r` covers.
fn covered_in_signal(r: &Route, s: usize, inst: &Instance) -> Vec<TargetId> {
    inst.signals()[s]
        .targets()
        .filter(|&t| r.covers(inst, t))
        .collect()
}

/// Keeps one route per covered subset of `T(s)` (the cheapest, first on
/// ties), adds the stay route and optionally drops routes whose covered set
/// is strictly contained in another's.
pub fn prepare_menu(v: usize, s: usize, routes: &[Route], inst: &Instance, filter_dominated: bool) -> Vec<Route> {
    let mut best: Vec<(Vec<TargetId>, &Route)> = Vec::new();
    let stay = Route::stay(v);
    let mut index = std::collections::HashMap::new();
    for r in std::iter::once(&stay).chain(routes) {
        let set = covered_in_signal(r, s, inst);
        match index.get(&set) {
            Some(&i) => {
                let slot: &mut (Vec<TargetId>, &Route) = &mut best[i];
                if r.cost < slot.1.cost {
                    slot.1 = r;
                }
            }
            None => {
                index.insert(set.clone(), best.len());
                best.push((set, r));
            }
        }
    }
    if filter_dominated {
        let mut order: Vec<usize> = (0..best.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(best[i].0.len()));
        let mut kept: Vec<usize> = Vec::new();
        for i in order {
            let dominated = kept
                .iter()
                .any(|&j| best[j].0.len() > best[i].0.len() && is_subset(&best[i].0, &best[j].0));
            if !dominated {
                kept.push(i);
            }
        }
        kept.sort();
        kept.into_iter().map(|i| best[i].1.clone()).collect()
    } else {
        best.into_iter().map(|(_, r)| r.clone()).collect()
    }
}

/// Defender strategy and Attacker value of the signal-response game.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalResponseSolution {
    pub vertex: usize,
    pub g_v: f64,
    /// Per signal: routes with positive probability.
    pub strategy: Vec<Vec<(Route, f64)>>,
    /// Targets whose expected Attacker payoff attains `g_v`.
    pub best_responses: Vec<TargetId>,
}

impl SignalResponseSolution {
    /// Attacker expected payoff of attacking `t` against this strategy.
    pub fn attacker_payoff(&self, t: TargetId, inst: &Instance) -> f64 {
        inst.signals_of(t)
            .map(|(s, p)| {
                p * self.strategy[s]
                    .iter()
                    .map(|(r, q)| q * attacker_utility(r, t, inst))
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn to_doc(&self, inst: &Instance) -> SolutionDoc {
        SolutionDoc {
            vertex: self.vertex,
            g_v: self.g_v,
            signals: self
                .strategy
                .iter()
                .zip(inst.signals())
                .map(|(routes, sig)| SignalStrategyDoc {
                    signal: sig.id.clone(),
                    routes: routes
                        .iter()
                        .map(|(r, p)| WeightedRouteDoc {
                            route: RouteDoc::from_route(r, inst),
                            prob: *p,
                        })
                        .collect(),
                })
                .collect(),
            best_responses: self
                .best_responses
                .iter()
                .map(|&t| inst.target(t).vertex)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionDoc {
    pub vertex: usize,
    pub g_v: f64,
    pub signals: Vec<SignalStrategyDoc>,
    /// Vertex ids of the Attacker's best responses.
    pub best_responses: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignalStrategyDoc {
    pub signal: String,
    pub routes: Vec<WeightedRouteDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedRouteDoc {
    pub route: RouteDoc,
    pub prob: f64,
}

/// Solves `min g` subject to the Attacker payoff of every target being at
/// most `g`, with one probability distribution over routes per signal.
/// Menus are deduplicated by covered set and the stay route is always added.
pub fn solve_srg(v: usize, menus: &RouteMenu, inst: &Instance) -> Result<SignalResponseSolution> {
    solve_prepared(v, &prepared_menus(v, menus, inst, false)?, inst)
}

fn prepared_menus(v: usize, menus: &RouteMenu, inst: &Instance, filter: bool) -> Result<Vec<Vec<Route>>> {
    inst.check_vertex(v)?;
    let empty = Vec::new();
    Ok((0..inst.signals().len())
        .map(|s| prepare_menu(v, s, menus.routes.get(s).unwrap_or(&empty), inst, filter))
        .collect())
}

fn solve_prepared(v: usize, menus: &[Vec<Route>], inst: &Instance) -> Result<SignalResponseSolution> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let g = lp.add_var(1.0, (0.0, f64::INFINITY));
    let vars: Vec<Vec<minilp::Variable>> = menus
        .iter()
        .map(|routes| routes.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect())
        .collect();
    for t in inst.target_ids() {
        let mut row = vec![(g, -1.0)];
        for (s, p) in inst.signals_of(t) {
            for (r, &x) in menus[s].iter().zip(&vars[s]) {
                let u = attacker_utility(r, t, inst);
                if u != 0.0 {
                    row.push((x, p * u));
                }
            }
        }
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 0.0);
    }
    for xs in &vars {
        let row: Vec<_> = xs.iter().map(|&x| (x, 1.0)).collect();
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 1.0);
    }
    let sol = lp.solve().map_err(|e| Error::LpNumericalFailure(e.to_string()))?;

    let mut strategy = Vec::with_capacity(menus.len());
    for (routes, xs) in menus.iter().zip(&vars) {
        let raw: Vec<f64> = xs.iter().map(|&x| sol[x].max(0.0)).collect();
        let total: f64 = raw.iter().sum();
        if (total - 1.0).abs() > LP_TOL {
            return Err(Error::LpNumericalFailure(format!(
                "signal distribution sums to {total}"
            )));
        }
        strategy.push(
            routes
                .iter()
                .zip(raw)
                .filter(|&(_, p)| p > 0.0)
                .map(|(r, p)| (r.clone(), p / total))
                .collect(),
        );
    }
    let mut solution = SignalResponseSolution {
        vertex: v,
        g_v: sol.objective(),
        strategy,
        best_responses: Vec::new(),
    };
    let payoffs: Vec<f64> = inst
        .target_ids()
        .map(|t| solution.attacker_payoff(t, inst))
        .collect();
    let max = payoffs.iter().cloned().fold(0.0, f64::max);
    if (max - solution.g_v).abs() > LP_TOL {
        return Err(Error::LpNumericalFailure(format!(
            "objective {} disagrees with strategy value {max}",
            solution.g_v
        )));
    }
    solution.g_v = max;
    solution.best_responses = inst
        .target_ids()
        .zip(&payoffs)
        .filter(|&(_, &p)| p >= max - LP_TOL)
        .map(|(t, _)| t)
        .collect();
    Ok(solution)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    /// Exact covering-set dynamic program.
    Dp,
    /// Branch and bound with full backtracking.
    Bnb,
    /// Monotonic routes over heuristic and random orders.
    ApproxDp,
    /// Branch and bound with limited backtracking.
    ApproxBnb,
}

impl Algo {
    pub fn is_exact(self) -> bool {
        matches!(self, Algo::Dp | Algo::Bnb)
    }

    pub fn name(self) -> &'static str {
        match self {
            Algo::Dp => "dp",
            Algo::Bnb => "bnb",
            Algo::ApproxDp => "approx-dp",
            Algo::ApproxBnb => "approx-bnb",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algo> {
        match s {
            "dp" => Ok(Algo::Dp),
            "bnb" => Ok(Algo::Bnb),
            "approx-dp" => Ok(Algo::ApproxDp),
            "approx-bnb" => Ok(Algo::ApproxBnb),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    pub algo: Algo,
    /// Backtracking limit for `ApproxBnb`.
    pub rho: f64,
    /// Tight/large split for branch and bound.
    pub delta: f64,
    pub rand_orders: usize,
    pub seed: u64,
    pub time_limit: Option<Duration>,
    /// Use the line/cycle solver when the graph allows it (exact algorithms).
    pub auto_topology: bool,
    /// Drop routes whose covered set is strictly inside another's before the LP.
    pub filter_dominated: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            algo: Algo::Dp,
            rho: 1.0,
            delta: 2.0,
            rand_orders: 10,
            seed: 0,
            time_limit: None,
            auto_topology: false,
            filter_dominated: true,
        }
    }
}

impl SolveParams {
    pub fn new(algo: Algo) -> SolveParams {
        SolveParams {
            algo,
            ..SolveParams::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }
}

/// Menus generated for one start vertex, with covering-set counts.
#[derive(Debug, Clone, Default)]
pub struct GeneratedMenus {
    pub menu: RouteMenu,
    /// Exact covering sets per signal, when the DP produced them.
    pub covsets: Option<Vec<Vec<CoveringSetResult>>>,
    /// Distinct covered sets over all signals.
    pub covsets_total: usize,
    /// Distinct covered sets not strictly inside another of the same signal.
    pub covsets_nondominated: usize,
}

fn count_sets(routes: &[Route], s: usize, inst: &Instance) -> (usize, usize) {
    let sets: HashSet<Vec<TargetId>> = routes.iter().map(|r| covered_in_signal(r, s, inst)).collect();
    let sets: Vec<Vec<TargetId>> = sets.into_iter().filter(|x| !x.is_empty()).collect();
    let nd = sets
        .iter()
        .filter(|a| !sets.iter().any(|b| b.len() > a.len() && is_subset(a, b)))
        .count();
    (sets.len(), nd)
}

/// Generates the route menu of every signal with the chosen algorithm.
pub fn generate_menus(v: usize, params: &SolveParams, inst: &Instance) -> Result<GeneratedMenus> {
    params.validate()?;
    inst.check_vertex(v)?;
    let budget = Budget::with_limit(params.time_limit);
    let topo = if params.auto_topology && params.algo.is_exact() {
        Some(detect_topology(inst)).filter(|t| matches!(t, TopologyClass::Linear | TopologyClass::Cycle))
    } else {
        None
    };
    let per_signal: Vec<Result<(Vec<Route>, Option<Vec<CoveringSetResult>>)>> = (0..inst.signals().len())
        .into_par_iter()
        .map(|s| {
            let view = SignalView::new(inst, v, s)?;
            match params.algo {
                Algo::Dp => {
                    let sets = match topo {
                        Some(t) => line_cycle_for_view(&view, t, &budget)?,
                        None => cov_sets_for_view(&view, &budget)?,
                    };
                    let routes = sets.iter().map(|c| c.route.clone()).collect();
                    Ok((routes, Some(sets)))
                }
                Algo::Bnb => Ok((branch_and_bound(&view, 0.0, params.delta, &budget)?, None)),
                Algo::ApproxBnb => Ok((branch_and_bound(&view, params.rho, params.delta, &budget)?, None)),
                Algo::ApproxDp => Ok((
                    approx_route_set(&view, params.rand_orders, params.seed ^ s as u64, &budget)?,
                    None,
                )),
            }
        })
        .collect();
    let mut out = GeneratedMenus::default();
    let mut covsets = Vec::new();
    for (s, res) in per_signal.into_iter().enumerate() {
        let (routes, sets) = res?;
        let (total, nd) = match &sets {
            Some(sets) => (
                sets.len(),
                sets.iter().filter(|c| c.maximal).count(),
            ),
            None => count_sets(&routes, s, inst),
        };
        out.covsets_total += total;
        out.covsets_nondominated += nd;
        out.menu.routes.push(routes);
        covsets.extend(sets.map(|x| (s, x)));
    }
    if params.algo == Algo::Dp {
        out.covsets = Some(covsets.into_iter().map(|(_, x)| x).collect());
    }
    Ok(out)
}

/// Generates menus with `params.algo` and solves the game from `v`.
pub fn solve_srg_auto(v: usize, params: &SolveParams, inst: &Instance) -> Result<SignalResponseSolution> {
    solve_with_menus(v, params, inst).map(|(sol, _)| sol)
}

/// Like [`solve_srg_auto`], also returning the generated menus.
pub fn solve_with_menus(v: usize, params: &SolveParams, inst: &Instance) -> Result<(SignalResponseSolution, GeneratedMenus)> {
    let generated = generate_menus(v, params, inst)?;
    let menus = prepared_menus(v, &generated.menu, inst, params.filter_dominated)?;
    Budget::with_limit(params.time_limit).check()?;
    let sol = solve_prepared(v, &menus, inst)?;
    Ok((sol, generated))
}

//! Best waiting vertex for the Defender and the missed-detection bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Instance;
use crate::srg::{solve_srg_auto, SolveParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementReport {
    /// `g_v` for every vertex, indexed by vertex id.
    pub values: Vec<f64>,
    pub best: usize,
    /// Best vertex other than `best`; `None` with a single vertex.
    pub second: Option<usize>,
    /// Supremum of tolerable missed-detection rates; `None` when `g_best = 1`.
    pub alpha_bound: Option<f64>,
}

impl PlacementReport {
    /// Builds the report from a value table; ties go to the lowest vertex id.
    pub fn from_values(values: Vec<f64>) -> PlacementReport {
        let argmin = |skip: Option<usize>| {
            (0..values.len())
                .filter(|&v| Some(v) != skip)
                .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        };
        let best = argmin(None).expect("instances have at least one vertex");
        let second = argmin(Some(best));
        let alpha_bound = match second {
            None => Some(1.0),
            Some(s) => max_tolerable_missed_detection(values[best], values[s]).ok(),
        };
        PlacementReport {
            values,
            best,
            second,
            alpha_bound,
        }
    }

    pub fn g_best(&self) -> f64 {
        self.values[self.best]
    }

    /// Whether `(1 - alpha)(1 - g_best) > 1 - g_second` holds, i.e. waiting
    /// at the best vertex stays optimal under missed-detection rate `alpha`.
    pub fn placement_justified(&self, alpha: f64) -> bool {
        match self.second {
            None => true,
            Some(s) => (1.0 - alpha) * (1.0 - self.g_best()) > 1.0 - self.values[s],
        }
    }
}

/// `1 - (1 - g_second) / (1 - g_best)`, the largest missed-detection rate for
/// which the best placement is guaranteed to remain optimal.
pub fn max_tolerable_missed_detection(g_best: f64, g_second: f64) -> Result<f64> {
    if g_best >= 1.0 {
        return Err(Error::Undefined);
    }
    Ok(1.0 - (1.0 - g_second) / (1.0 - g_best))
}

/// Solves the signal-response game from every vertex.
pub fn best_placement(inst: &Instance, params: &SolveParams) -> Result<PlacementReport> {
    let values = (0..inst.num_vertices())
        .into_par_iter()
        .map(|v| solve_srg_auto(v, params, inst).map(|s| s.g_v))
        .collect::<Result<Vec<f64>>>()?;
    Ok(PlacementReport::from_values(values))
}

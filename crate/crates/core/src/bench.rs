//! Benchmark grid over generated worst-case instances, written as CSV.

use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::gen_worstcase;
use crate::srg::{solve_with_menus, Algo, SolveParams};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ALARM_PATROL_THREADS";

/// An algorithm with its optional parameter: random orders for `approx-dp`,
/// `rho` for `approx-bnb`. Written `name[:param]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgoSpec {
    pub algo: Algo,
    pub param: Option<f64>,
}

impl AlgoSpec {
    pub fn params(&self, seed: u64, timeout: Duration) -> SolveParams {
        let mut p = SolveParams::new(self.algo);
        p.seed = seed;
        p.time_limit = Some(timeout);
        match (self.algo, self.param) {
            (Algo::ApproxDp, Some(x)) => p.rand_orders = x as usize,
            (Algo::ApproxBnb, Some(x)) => p.rho = x,
            _ => {}
        }
        p
    }

    fn params_label(&self) -> String {
        match self.algo {
            Algo::ApproxDp => format!("rand_orders={}", self.param.unwrap_or(10.0) as usize),
            Algo::ApproxBnb => format!("rho={}", self.param.unwrap_or(1.0)),
            Algo::Bnb => "rho=0".into(),
            Algo::Dp => String::new(),
        }
    }
}

impl FromStr for AlgoSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<AlgoSpec> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let algo: Algo = name.trim().parse()?;
        let param = param
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad parameter in `{s}`")))
            })
            .transpose()?;
        if param.is_some() && algo.is_exact() {
            return Err(Error::InvalidParameter(format!("`{name}` takes no parameter")));
        }
        Ok(AlgoSpec { algo, param })
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub targets: Vec<usize>,
    pub eps: Vec<f64>,
    pub instances_per_cell: usize,
    pub algos: Vec<AlgoSpec>,
    pub timeout: Duration,
    pub serial: bool,
    pub seed_base: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            targets: vec![6, 8, 10],
            eps: vec![0.25],
            instances_per_cell: 10,
            algos: vec![
                AlgoSpec { algo: Algo::Dp, param: None },
                AlgoSpec { algo: Algo::ApproxDp, param: Some(10.0) },
            ],
            timeout: Duration::from_secs(300),
            serial: false,
            seed_base: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub targets: usize,
    pub eps: f64,
    pub seed: u64,
    pub algo: String,
    pub params: String,
    pub runtime_ms: f64,
    pub g_v: Option<f64>,
    /// `(1 - g_approx) / (1 - g_exact)`, when an exact value is available.
    pub ratio: Option<f64>,
    pub covsets_total: Option<usize>,
    pub covsets_nondominated: Option<usize>,
    pub timeout: bool,
}

/// Runs every algorithm on one instance; the first exact value found is the
/// reference for the ratio column.
fn run_instance(cfg: &BenchConfig, targets: usize, eps: f64, seed: u64) -> Result<Vec<BenchRow>> {
    let inst = gen_worstcase(targets, eps, seed)?;
    let v = inst.start().expect("generated instances record a start");
    let mut rows = Vec::with_capacity(cfg.algos.len());
    for spec in &cfg.algos {
        let params = spec.params(seed, cfg.timeout);
        let begin = Instant::now();
        let outcome = solve_with_menus(v, &params, &inst);
        let runtime_ms = begin.elapsed().as_secs_f64() * 1e3;
        let mut row = BenchRow {
            targets,
            eps,
            seed,
            algo: spec.algo.name().into(),
            params: spec.params_label(),
            runtime_ms,
            g_v: None,
            ratio: None,
            covsets_total: None,
            covsets_nondominated: None,
            timeout: false,
        };
        match outcome {
            Ok((sol, menus)) => {
                row.g_v = Some(sol.g_v);
                row.covsets_total = Some(menus.covsets_total);
                row.covsets_nondominated = Some(menus.covsets_nondominated);
            }
            Err(Error::Timeout) => row.timeout = true,
            Err(e) => return Err(e),
        }
        rows.push(row);
    }
    let exact = cfg
        .algos
        .iter()
        .zip(&rows)
        .find(|(s, r)| s.algo.is_exact() && r.g_v.is_some())
        .and_then(|(_, r)| r.g_v);
    if let Some(g) = exact.filter(|&g| g < 1.0) {
        for row in &mut rows {
            row.ratio = row.g_v.map(|h| (1.0 - h) / (1.0 - g));
        }
    }
    Ok(rows)
}

fn thread_count(serial: bool) -> usize {
    if serial {
        return 1;
    }
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|x| x.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs the whole grid. Rows come out ordered by (targets, eps, seed, algo
/// position) regardless of scheduling.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.algos.is_empty() {
        return Err(Error::InvalidParameter("no algorithms given".into()));
    }
    let jobs: Vec<(usize, f64, u64)> = cfg
        .targets
        .iter()
        .flat_map(|&n| {
            cfg.eps.iter().flat_map(move |&e| {
                (0..cfg.instances_per_cell as u64).map(move |i| (n, e, cfg.seed_base + i))
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cfg.serial))
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let per_job: Vec<Result<Vec<BenchRow>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, e, seed)| run_instance(cfg, n, e, seed))
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

//! C interface to the alarm-patrol solvers.
//!
//! Objects are opaque handles created by `ap_*` constructors and released by
//! the matching `*_free` function. Every fallible call returns an
//! [`ApStatus`]; on failure a message is available from
//! [`ap_last_error_message`] on the same thread until the next failing call.
//! Strings handed out by the library must be released with
//! [`ap_string_free`].
//!
//! Pointer arguments must be null or valid for the documented use; handles
//! must not be used after being freed. Handles are immutable, so they may be
//! shared between threads for read-only calls.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use alarm_patrol::gen::gen_worstcase;
use alarm_patrol::placement::{best_placement, PlacementReport};
use alarm_patrol::srg::{solve_srg_auto, Algo, SolveParams};
use alarm_patrol::{Error, Instance};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The instance document or file contents were rejected.
    Malformed = 3,
    InvalidArgument = 4,
    SolverFailure = 5,
    Timeout = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApAlgorithm {
    Dp = 0,
    Bnb = 1,
    ApproxDp = 2,
    ApproxBnb = 3,
}

/// Solver options; obtain defaults from [`ap_solve_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ApSolveOptions {
    pub algorithm: ApAlgorithm,
    pub rho: f64,
    pub delta: f64,
    pub rand_orders: u32,
    pub seed: u64,
    /// Zero disables the limit.
    pub time_limit_ms: u64,
    pub auto_topology: bool,
}

pub struct ApInstance(Instance);

pub struct ApSolution {
    g_v: f64,
    json: String,
}

pub struct ApPlacement(PlacementReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(ApStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match &e {
            Error::MalformedDocument(_)
            | Error::DisconnectedGraph
            | Error::ProbabilityNotNormalized(_)
            | Error::EmptySignalCoverage(_) => ApStatus::Malformed,
            Error::Timeout => ApStatus::Timeout,
            Error::Io(_) => ApStatus::Io,
            Error::LpNumericalFailure(_) | Error::Undefined => ApStatus::SolverFailure,
            _ => ApStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ApStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ApStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ApStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ApStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(ApStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|e| Failure(ApStatus::InvalidArgument, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn instance<'a>(p: *const ApInstance) -> Result<&'a Instance, Failure> {
    p.as_ref().map(|i| &i.0).ok_or_else(|| null("instance"))
}

/// Message of the last failing call on this thread, or null. The pointer is
/// owned by the library and stays valid until the next failing call.
#[no_mangle]
pub extern "C" fn ap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn ap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance document (TOML text).
#[no_mangle]
pub unsafe extern "C" fn ap_instance_from_str(doc: *const c_char, out: *mut *mut ApInstance) -> ApStatus {
    guard(|| {
        let text = read_str(doc, "doc")?;
        write_out(out, ApInstance(Instance::from_toml_str(text)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ap_instance_from_file(path: *const c_char, out: *mut *mut ApInstance) -> ApStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        write_out(out, ApInstance(Instance::from_path(path)?))
    })
}

/// Generates a worst-case instance; see the library documentation.
#[no_mangle]
pub unsafe extern "C" fn ap_gen_worstcase(targets: usize, eps: f64, seed: u64, out: *mut *mut ApInstance) -> ApStatus {
    guard(|| write_out(out, ApInstance(gen_worstcase(targets, eps, seed)?)))
}

/// Serializes the instance back to a TOML document.
#[no_mangle]
pub unsafe extern "C" fn ap_instance_to_string(inst: *const ApInstance, out: *mut *mut c_char) -> ApStatus {
    guard(|| write_string(out, instance(inst)?.to_toml_string()))
}

#[no_mangle]
pub unsafe extern "C" fn ap_instance_free(inst: *mut ApInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Zero for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ap_instance_num_vertices(inst: *const ApInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.num_vertices())
}

#[no_mangle]
pub unsafe extern "C" fn ap_instance_num_targets(inst: *const ApInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.targets().len())
}

#[no_mangle]
pub unsafe extern "C" fn ap_instance_num_signals(inst: *const ApInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.signals().len())
}

#[no_mangle]
pub extern "C" fn ap_solve_options_default() -> ApSolveOptions {
    let p = SolveParams::default();
    ApSolveOptions {
        algorithm: ApAlgorithm::Dp,
        rho: p.rho,
        delta: p.delta,
        rand_orders: p.rand_orders as u32,
        seed: p.seed,
        time_limit_ms: 0,
        auto_topology: false,
    }
}

fn params(opts: &ApSolveOptions) -> SolveParams {
    SolveParams {
        algo: match opts.algorithm {
            ApAlgorithm::Dp => Algo::Dp,
            ApAlgorithm::Bnb => Algo::Bnb,
            ApAlgorithm::ApproxDp => Algo::ApproxDp,
            ApAlgorithm::ApproxBnb => Algo::ApproxBnb,
        },
        rho: opts.rho,
        delta: opts.delta,
        rand_orders: opts.rand_orders as usize,
        seed: opts.seed,
        time_limit: (opts.time_limit_ms > 0).then(|| Duration::from_millis(opts.time_limit_ms)),
        auto_topology: opts.auto_topology,
        ..SolveParams::default()
    }
}

unsafe fn options(opts: *const ApSolveOptions) -> SolveParams {
    params(&opts.as_ref().copied().unwrap_or_else(|| ap_solve_options_default()))
}

/// Solves the game from `vertex`. A null `opts` means the defaults.
#[no_mangle]
pub unsafe extern "C" fn ap_solve(
    inst: *const ApInstance,
    vertex: usize,
    opts: *const ApSolveOptions,
    out: *mut *mut ApSolution,
) -> ApStatus {
    guard(|| {
        let inst = instance(inst)?;
        let sol = solve_srg_auto(vertex, &options(opts), inst)?;
        let json = serde_json::to_string(&sol.to_doc(inst))
            .map_err(|e| Failure(ApStatus::SolverFailure, e.to_string()))?;
        write_out(out, ApSolution { g_v: sol.g_v, json })
    })
}

/// NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ap_solution_value(sol: *const ApSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.g_v)
}

/// The solution as JSON: `{vertex, g_v, signals, best_responses}`.
#[no_mangle]
pub unsafe extern "C" fn ap_solution_to_json(sol: *const ApSolution, out: *mut *mut c_char) -> ApStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("solution"))?;
        write_string(out, sol.json.clone())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ap_solution_free(sol: *mut ApSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Solves from every vertex. A null `opts` means the defaults.
#[no_mangle]
pub unsafe extern "C" fn ap_placement(
    inst: *const ApInstance,
    opts: *const ApSolveOptions,
    out: *mut *mut ApPlacement,
) -> ApStatus {
    guard(|| {
        let inst = instance(inst)?;
        write_out(out, ApPlacement(best_placement(inst, &options(opts))?))
    })
}

/// Best vertex; `usize::MAX` for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ap_placement_best(p: *const ApPlacement) -> usize {
    p.as_ref().map_or(usize::MAX, |p| p.0.best)
}

#[no_mangle]
pub unsafe extern "C" fn ap_placement_value(p: *const ApPlacement, vertex: usize, out: *mut f64) -> ApStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("placement"))?;
        let g = p.0.values.get(vertex).copied().ok_or_else(|| {
            Failure(ApStatus::InvalidArgument, format!("vertex {vertex} is out of range"))
        })?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = g;
        Ok(())
    })
}

/// Missed-detection bound; `SOLVER_FAILURE` when it is undefined.
#[no_mangle]
pub unsafe extern "C" fn ap_placement_alpha_bound(p: *const ApPlacement, out: *mut f64) -> ApStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("placement"))?;
        let a = p.0.alpha_bound.ok_or_else(|| Failure::from(Error::Undefined))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = a;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ap_placement_free(p: *mut ApPlacement) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

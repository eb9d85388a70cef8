//! C ABI for the routing toolkit.
//!
//! Instances and solutions are opaque heap handles: every constructor has a
//! matching `_free`, and every fallible entry point returns a
//! [`ConvrptwStatus`].  On failure a thread-local message is stored and
//! stays readable through [`convrptw_last_error`] until the next failing
//! call on the same thread.  Panics never unwind across the boundary; they
//! are caught and reported as [`ConvrptwStatus::Panic`].
//!
//! The matching C header is generated into `include/convrptw.h` by the
//! build script.

use convrptw::io::instance_from_str;
use convrptw::{
    construct, eliminate_routes, evaluate_solution, exact_min_vehicles, read_instance,
    read_solution, reoptimize, update, write_solution, ConstructError, ConstructionParams,
    EliminateError, EliminationParams, Instance, IoError, OracleError, OracleLimits,
    RollingError, Solution, SolutionDoc,
};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe, UnwindSafe};
use std::path::Path;
use std::time::Duration;

// ---- status and error reporting ----

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvrptwStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The file could not be read or written.
    Io = 3,
    /// The file or text exists but does not parse as the expected format.
    Parse = 4,
    /// The instance admits no feasible plan.
    Infeasible = 5,
    /// A size or effort limit refused the computation.
    Limits = 6,
    /// A numeric or structural argument is out of range.
    BadParams = 7,
    /// The library panicked; the handle states are unspecified but valid.
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(text).expect("nul bytes stripped"));
    });
}

fn fail(status: ConvrptwStatus, msg: impl Into<String>) -> ConvrptwStatus {
    set_error(msg);
    status
}

/// Message of the most recent failure on this thread, or null when the
/// last call succeeded.  The pointer stays valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn convrptw_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Library version as a static nul-terminated string; never freed.
#[no_mangle]
pub extern "C" fn convrptw_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Runs `f` with panics converted to [`ConvrptwStatus::Panic`].
fn guarded<F>(f: F) -> ConvrptwStatus
where
    F: FnOnce() -> ConvrptwStatus + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(status) => status,
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with a non-string payload".into());
            fail(ConvrptwStatus::Panic, text)
        }
    }
}

fn status_of_io(e: &IoError) -> ConvrptwStatus {
    match e {
        IoError::File { .. } => ConvrptwStatus::Io,
        _ => ConvrptwStatus::Parse,
    }
}

// ---- argument decoding ----

/// Borrows a required C string argument.
///
/// # Safety
/// `ptr` must be null or point to a nul-terminated string.
unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, ConvrptwStatus> {
    if ptr.is_null() {
        return Err(fail(
            ConvrptwStatus::NullArgument,
            format!("{name} must not be null"),
        ));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        fail(
            ConvrptwStatus::InvalidUtf8,
            format!("{name} is not valid UTF-8"),
        )
    })
}

/// Borrows a required handle argument.
unsafe fn handle_arg<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, ConvrptwStatus> {
    if ptr.is_null() {
        return Err(fail(
            ConvrptwStatus::NullArgument,
            format!("{name} must not be null"),
        ));
    }
    Ok(&*ptr)
}

/// Stores `value` behind a required out-pointer.
unsafe fn emit<T>(out: *mut T, name: &str, value: T) -> Result<(), ConvrptwStatus> {
    if out.is_null() {
        return Err(fail(
            ConvrptwStatus::NullArgument,
            format!("{name} must not be null"),
        ));
    }
    out.write(value);
    Ok(())
}

// ---- opaque handles ----

/// An immutable routing instance.  Opaque; create with the `_read` or
/// `_from_json` constructors and release with [`convrptw_instance_free`].
pub struct ConvrptwInstance {
    inner: Instance,
}

/// A multi-day plan.  Opaque; produced by the solver entry points or read
/// from a file, released with [`convrptw_solution_free`].
pub struct ConvrptwSolution {
    inner: Solution,
}

fn box_instance(inner: Instance) -> *mut ConvrptwInstance {
    Box::into_raw(Box::new(ConvrptwInstance { inner }))
}

fn box_solution(inner: Solution) -> *mut ConvrptwSolution {
    Box::into_raw(Box::new(ConvrptwSolution { inner }))
}

// ---- instances ----

/// Reads an instance file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn convrptw_instance_read(
    path: *const c_char,
    out: *mut *mut ConvrptwInstance,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let path = match str_arg(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match read_instance(Path::new(path)) {
            Ok(instance) => match emit(out, "out", box_instance(instance)) {
                Ok(()) => ConvrptwStatus::Ok,
                Err(status) => status,
            },
            Err(e) => fail(status_of_io(&e), e.to_string()),
        }
    }))
}

/// Parses an instance from its JSON document text.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn convrptw_instance_from_json(
    text: *const c_char,
    out: *mut *mut ConvrptwInstance,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let text = match str_arg(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match instance_from_str(text) {
            Ok(instance) => match emit(out, "out", box_instance(instance)) {
                Ok(()) => ConvrptwStatus::Ok,
                Err(status) => status,
            },
            Err(e) => fail(ConvrptwStatus::Parse, e.to_string()),
        }
    }))
}

/// Releases an instance handle; a null pointer is a no-op.
///
/// # Safety
/// `instance` must be null or a pointer returned by an instance constructor,
/// and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn convrptw_instance_free(instance: *mut ConvrptwInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of customers; 0 on a null handle.
///
/// # Safety
/// `instance` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn convrptw_instance_customer_count(
    instance: *const ConvrptwInstance,
) -> u64 {
    instance
        .as_ref()
        .map_or(0, |h| h.inner.customer_count() as u64)
}

/// Number of planning days; 0 on a null handle.
///
/// # Safety
/// `instance` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn convrptw_instance_day_count(instance: *const ConvrptwInstance) -> u64 {
    instance.as_ref().map_or(0, |h| h.inner.day_count() as u64)
}

/// Vehicle capacity; 0 on a null handle.
///
/// # Safety
/// `instance` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn convrptw_instance_capacity(instance: *const ConvrptwInstance) -> u64 {
    instance.as_ref().map_or(0, |h| h.inner.capacity())
}

// ---- solving ----

fn elimination_params(ct_max_seconds: f64, seed: u64) -> Result<EliminationParams, ConvrptwStatus> {
    if !(ct_max_seconds > 0.0 && ct_max_seconds.is_finite()) {
        return Err(fail(
            ConvrptwStatus::BadParams,
            format!("ct_max_seconds must be a positive finite number, got {ct_max_seconds}"),
        ));
    }
    Ok(EliminationParams {
        ct_max: Duration::from_secs_f64(ct_max_seconds),
        rng_seed: seed,
        ..EliminationParams::default()
    })
}

fn status_of_construct(e: &ConstructError) -> ConvrptwStatus {
    match e {
        ConstructError::SingletonInfeasible { .. } => ConvrptwStatus::Infeasible,
        ConstructError::BadParams(_) => ConvrptwStatus::BadParams,
    }
}

fn status_of_eliminate(_: &EliminateError) -> ConvrptwStatus {
    ConvrptwStatus::BadParams
}

fn status_of_rolling(e: &RollingError) -> ConvrptwStatus {
    match e {
        RollingError::InfeasibleCustomer { .. } => ConvrptwStatus::Infeasible,
        _ => ConvrptwStatus::BadParams,
    }
}

/// Solves an instance from scratch: construction, route elimination under
/// the given wall-clock budget, then distance descent.
///
/// # Safety
/// `instance` must be a live instance handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn convrptw_solve(
    instance: *const ConvrptwInstance,
    ct_max_seconds: f64,
    seed: u64,
    out: *mut *mut ConvrptwSolution,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let handle = match handle_arg(instance, "instance") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let params = match elimination_params(ct_max_seconds, seed) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let built = match construct(&handle.inner, &ConstructionParams::default()) {
            Ok(s) => s,
            Err(e) => return fail(status_of_construct(&e), e.to_string()),
        };
        let (mut solution, _) = match eliminate_routes(&handle.inner, &built, &params) {
            Ok(pair) => pair,
            Err(e) => return fail(status_of_eliminate(&e), e.to_string()),
        };
        reoptimize(&handle.inner, &mut solution);
        match emit(out, "out", box_solution(solution)) {
            Ok(()) => ConvrptwStatus::Ok,
            Err(status) => status,
        }
    }))
}

/// Carries a previous plan into a new planning period, keeping drivers on
/// their customers where feasible.  When `out_ic_pct` is non-null it
/// receives the percentage of retained customers that changed vehicle.
///
/// # Safety
/// `instance` and `prev` must be live handles; `out` must be valid;
/// `out_ic_pct` may be null.
#[no_mangle]
pub unsafe extern "C" fn convrptw_update(
    instance: *const ConvrptwInstance,
    prev: *const ConvrptwSolution,
    ct_max_seconds: f64,
    seed: u64,
    out: *mut *mut ConvrptwSolution,
    out_ic_pct: *mut f64,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let handle = match handle_arg(instance, "instance") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let previous = match handle_arg(prev, "prev") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let params = match elimination_params(ct_max_seconds, seed) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let outcome = match update(&handle.inner, &previous.inner, &params) {
            Ok(o) => o,
            Err(e) => return fail(status_of_rolling(&e), e.to_string()),
        };
        if !out_ic_pct.is_null() {
            out_ic_pct.write(outcome.ic_pct);
        }
        match emit(out, "out", box_solution(outcome.solution)) {
            Ok(()) => ConvrptwStatus::Ok,
            Err(status) => status,
        }
    }))
}

/// Proves the minimum vehicle count exhaustively.  `max_nodes` bounds the
/// assignment attempts; pass 0 for the default budget.
///
/// # Safety
/// `instance` must be a live instance handle; `out_min_vehicles` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn convrptw_oracle_min_vehicles(
    instance: *const ConvrptwInstance,
    max_nodes: u64,
    out_min_vehicles: *mut u64,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let handle = match handle_arg(instance, "instance") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let mut limits = OracleLimits::default();
        if max_nodes > 0 {
            limits.max_nodes = max_nodes;
        }
        match exact_min_vehicles(&handle.inner, &limits) {
            Ok(res) => match emit(out_min_vehicles, "out_min_vehicles", res.min_vehicles as u64) {
                Ok(()) => ConvrptwStatus::Ok,
                Err(status) => status,
            },
            Err(e @ OracleError::NoFeasibleRoute { .. }) => {
                fail(ConvrptwStatus::Infeasible, e.to_string())
            }
            Err(e) => fail(ConvrptwStatus::Limits, e.to_string()),
        }
    }))
}

// ---- solutions ----

/// Reads a solution file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn convrptw_solution_read(
    path: *const c_char,
    out: *mut *mut ConvrptwSolution,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let path = match str_arg(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match read_solution(Path::new(path)) {
            Ok(doc) => match emit(out, "out", box_solution(doc.solution)) {
                Ok(()) => ConvrptwStatus::Ok,
                Err(status) => status,
            },
            Err(e) => fail(status_of_io(&e), e.to_string()),
        }
    }))
}

/// Validates `solution` against `instance` and writes it as a solution
/// document naming that instance.
///
/// # Safety
/// `instance` and `solution` must be live handles; `path` must be a
/// nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn convrptw_solution_write(
    instance: *const ConvrptwInstance,
    solution: *const ConvrptwSolution,
    path: *const c_char,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let inst = match handle_arg(instance, "instance") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let sol = match handle_arg(solution, "solution") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let path = match str_arg(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if let Err(e) = sol.inner.validate(&inst.inner) {
            return fail(ConvrptwStatus::BadParams, e.to_string());
        }
        let doc = SolutionDoc {
            instance: inst.inner.name().to_string(),
            solution: sol.inner.clone(),
        };
        match write_solution(&doc, Path::new(path)) {
            Ok(()) => ConvrptwStatus::Ok,
            Err(e) => fail(status_of_io(&e), e.to_string()),
        }
    }))
}

/// Releases a solution handle; a null pointer is a no-op.
///
/// # Safety
/// `solution` must be null or a pointer returned by this library, and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn convrptw_solution_free(solution: *mut ConvrptwSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Vehicles serving at least one customer; 0 on a null handle.
///
/// # Safety
/// `solution` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn convrptw_solution_nv(solution: *const ConvrptwSolution) -> u64 {
    solution.as_ref().map_or(0, |h| h.inner.nv() as u64)
}

/// Headline measurements of a solution against its instance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvrptwMetrics {
    /// Vehicles serving at least one customer.
    pub nv: u64,
    /// Total travel time over all vehicles and days, in hours.
    pub travel_time_hours: f64,
    /// Total travel distance, in metres.
    pub distance_metres: i64,
    /// Percentage of visits arriving after the window close.
    pub ptw_pct: f64,
    /// Total lateness as a percentage of total travel time.
    pub ltw_pct: f64,
    /// True iff every route respects windows, capacity and the horizon.
    pub feasible: bool,
}

/// Evaluates `solution` against `instance`.
///
/// # Safety
/// `instance` and `solution` must be live handles; `out_metrics` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn convrptw_solution_metrics(
    instance: *const ConvrptwInstance,
    solution: *const ConvrptwSolution,
    out_metrics: *mut ConvrptwMetrics,
) -> ConvrptwStatus {
    guarded(AssertUnwindSafe(|| {
        let inst = match handle_arg(instance, "instance") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let sol = match handle_arg(solution, "solution") {
            Ok(h) => h,
            Err(status) => return status,
        };
        let metrics = match evaluate_solution(&inst.inner, &sol.inner) {
            Ok(m) => m,
            Err(e) => return fail(ConvrptwStatus::BadParams, e.to_string()),
        };
        let value = ConvrptwMetrics {
            nv: metrics.nv as u64,
            travel_time_hours: metrics.travel_time.hours(),
            distance_metres: metrics.total_distance.metres(),
            ptw_pct: metrics.ptw_pct,
            ltw_pct: metrics.ltw_pct,
            feasible: metrics.feasible,
        };
        match emit(out_metrics, "out_metrics", value) {
            Ok(()) => ConvrptwStatus::Ok,
            Err(status) => status,
        }
    }))
}

// ---- tests ----

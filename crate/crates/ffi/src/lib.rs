//! C ABI over the `nagata` library.
//!
//! Spaces and maps are opaque handles created by `*_from_*` / `*_new`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`NagataStatus`]; on failure a message is available from
//! [`nagata_last_error`] on the same thread until the next failing call.
//! Strings handed out by the library are released with [`nagata_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nagata::dim::{greedy_parts, min_parts_exact, nagata_check, DimError, ExhaustiveLimits};
use nagata::heisenberg::{
    bfs_word_lengths, claim1_word, word_constant_threshold, BfsBudget, GeneratingSet, HeisenbergError,
    DEFAULT_WORD_CONSTANT,
};
use nagata::maps::{MapError, MapFile, MetricMap};
use nagata::metric::{default_labels, SpaceFile};
use nagata::{FiniteMetricSpace, MetricError};

/// Relative tolerance used when callers pass a negative value.
pub const NAGATA_DEFAULT_REL_TOL: f64 = 1e-9;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NagataStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpace = 3,
    InvalidMap = 4,
    Parse = 5,
    LimitExceeded = 6,
    NotFound = 7,
    Internal = 99,
}

/// Opaque validated finite metric space.
pub struct NagataSpace {
    inner: FiniteMetricSpace,
}

/// Opaque map between two finite metric spaces.
pub struct NagataMap {
    inner: MetricMap,
}

/// Summary of a Nagata check at one scale.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NagataCheckResult {
    pub violation: bool,
    /// Center of the witness; meaningful only when `violation` is set.
    pub center: usize,
    pub margin: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: NagataStatus, message: impl Into<String>) -> NagataStatus {
    set_error(message.into());
    status
}

fn metric_status(e: &MetricError) -> NagataStatus {
    match e {
        MetricError::IndexOutOfRange { .. }
        | MetricError::InvalidExponent(_)
        | MetricError::NonPositiveScale(_)
        | MetricError::InvalidTolerance(_)
        | MetricError::EmptySubset
        | MetricError::RepeatedIndex(_) => NagataStatus::InvalidArgument,
        _ => NagataStatus::InvalidSpace,
    }
}

fn dim_status(e: &DimError) -> NagataStatus {
    match e {
        DimError::Metric(m) => metric_status(m),
        DimError::TooLarge { .. } | DimError::PartLimitExceeded { .. } => NagataStatus::LimitExceeded,
        _ => NagataStatus::InvalidArgument,
    }
}

fn map_status(e: &MapError) -> NagataStatus {
    match e {
        MapError::Metric(m) => metric_status(m),
        MapError::Dim(d) => dim_status(d),
        MapError::AssignmentLength { .. } | MapError::AssignmentOutOfRange { .. } => NagataStatus::InvalidMap,
        _ => NagataStatus::InvalidArgument,
    }
}

fn heisenberg_status(e: &HeisenbergError) -> NagataStatus {
    match e {
        HeisenbergError::BudgetExceeded { .. } => NagataStatus::LimitExceeded,
        HeisenbergError::BoundViolated { .. } | HeisenbergError::ProfileInvariant { .. } => NagataStatus::Internal,
        _ => NagataStatus::InvalidArgument,
    }
}

/// Runs `body`, converting panics into [`NagataStatus::Internal`].
fn guard(body: impl FnOnce() -> NagataStatus) -> NagataStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(NagataStatus::Internal, "panic inside the nagata library"),
    }
}

fn rel_tol_or_default(rel_tol: f64) -> f64 {
    if rel_tol < 0.0 {
        NAGATA_DEFAULT_REL_TOL
    } else {
        rel_tol
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, NagataStatus> {
    if text.is_null() {
        return Err(fail(NagataStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(NagataStatus::Parse, "string is not valid UTF-8"))
}

fn into_c_string(text: String, out: *mut *mut c_char) -> NagataStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            NagataStatus::Ok
        }
        Err(_) => fail(NagataStatus::Internal, "string contains a NUL byte"),
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(NagataStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

/// Message for the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nagata_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nagata_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a space from a row-major `n x n` distance matrix. A negative
/// `rel_tol` selects [`NAGATA_DEFAULT_REL_TOL`].
///
/// # Safety
/// `matrix` must point to `n * n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_space_from_matrix(
    matrix: *const f64,
    n: usize,
    rel_tol: f64,
    out: *mut *mut NagataSpace,
) -> NagataStatus {
    non_null!(matrix, out);
    guard(|| {
        let Some(len) = n.checked_mul(n) else {
            return fail(NagataStatus::InvalidArgument, "matrix size overflows");
        };
        let flat = std::slice::from_raw_parts(matrix, len);
        let rows: Vec<Vec<f64>> = flat.chunks(n.max(1)).take(n).map(<[f64]>::to_vec).collect();
        match FiniteMetricSpace::validate_with_tolerance(default_labels(n), rows, rel_tol_or_default(rel_tol)) {
            Ok(space) => {
                *out = Box::into_raw(Box::new(NagataSpace { inner: space }));
                NagataStatus::Ok
            }
            Err(e) => fail(metric_status(&e), e.to_string()),
        }
    })
}

/// Builds a space from its JSON file form (`{"matrix": ...}` or
/// `{"points": ..., "metric": "l1" | "l2" | "linf"}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_space_from_json(
    json: *const c_char,
    rel_tol: f64,
    out: *mut *mut NagataSpace,
) -> NagataStatus {
    non_null!(out);
    guard(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let file: SpaceFile = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => return fail(NagataStatus::Parse, e.to_string()),
        };
        match file.into_space(rel_tol_or_default(rel_tol)) {
            Ok(space) => {
                *out = Box::into_raw(Box::new(NagataSpace { inner: space }));
                NagataStatus::Ok
            }
            Err(e) => fail(metric_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `space` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nagata_space_free(space: *mut NagataSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// # Safety
/// `space` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nagata_space_len(space: *const NagataSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.len())
}

/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_space_distance(
    space: *const NagataSpace,
    i: usize,
    j: usize,
    out: *mut f64,
) -> NagataStatus {
    non_null!(space, out);
    let s = &(*space).inner;
    if i >= s.len() || j >= s.len() {
        return fail(
            NagataStatus::InvalidArgument,
            format!("index out of range for {} points", s.len()),
        );
    }
    *out = s.d(i, j);
    NagataStatus::Ok
}

/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_space_is_ultrametric(space: *const NagataSpace, out: *mut bool) -> NagataStatus {
    non_null!(space, out);
    guard(|| {
        *out = (*space).inner.is_ultrametric();
        NagataStatus::Ok
    })
}

/// Full-precision JSON form of the space; free with [`nagata_string_free`].
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_space_to_json(space: *const NagataSpace, out: *mut *mut c_char) -> NagataStatus {
    non_null!(space, out);
    guard(|| match serde_json::to_string(&(*space).inner.to_file()) {
        Ok(text) => into_c_string(text, out),
        Err(e) => fail(NagataStatus::Internal, e.to_string()),
    })
}

/// Nagata check for `n` at scale `r`.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_check_scale(
    space: *const NagataSpace,
    n: usize,
    r: f64,
    out: *mut NagataCheckResult,
) -> NagataStatus {
    non_null!(space, out);
    guard(|| match nagata_check(&(*space).inner, n, r) {
        Ok(report) => {
            *out = NagataCheckResult {
                violation: !report.is_ok(),
                center: report.witness.as_ref().map_or(0, |w| w.center),
                margin: report.margin,
            };
            NagataStatus::Ok
        }
        Err(e) => fail(dim_status(&e), e.to_string()),
    })
}

/// The full check report as JSON; free with [`nagata_string_free`].
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_check_json(
    space: *const NagataSpace,
    n: usize,
    r: f64,
    out: *mut *mut c_char,
) -> NagataStatus {
    non_null!(space, out);
    guard(|| match nagata_check(&(*space).inner, n, r) {
        Ok(report) => match serde_json::to_string(&report) {
            Ok(text) => into_c_string(text, out),
            Err(e) => fail(NagataStatus::Internal, e.to_string()),
        },
        Err(e) => fail(dim_status(&e), e.to_string()),
    })
}

/// Smallest `m` such that `m + 1` parts with `K r`-bounded `r`-components
/// exist, by exhaustive search (at most 14 points and 4 parts).
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_min_parts_exact(
    space: *const NagataSpace,
    r: f64,
    k: f64,
    out: *mut usize,
) -> NagataStatus {
    non_null!(space, out);
    guard(
        || match min_parts_exact(&(*space).inner, r, k, ExhaustiveLimits::default()) {
            Ok(exact) => {
                *out = exact.m;
                NagataStatus::Ok
            }
            Err(e) => fail(dim_status(&e), e.to_string()),
        },
    )
}

/// Number of parts used by the first-fit decomposer.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_greedy_part_count(
    space: *const NagataSpace,
    r: f64,
    k: f64,
    out: *mut usize,
) -> NagataStatus {
    non_null!(space, out);
    guard(|| match greedy_parts(&(*space).inner, r, k) {
        Ok(d) => {
            *out = d.part_count();
            NagataStatus::Ok
        }
        Err(e) => fail(dim_status(&e), e.to_string()),
    })
}

/// Builds a map; both spaces are copied, so the caller keeps ownership.
///
/// # Safety
/// `domain` and `codomain` must be live handles, `assignment` must point to
/// `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_map_new(
    domain: *const NagataSpace,
    codomain: *const NagataSpace,
    assignment: *const usize,
    len: usize,
    out: *mut *mut NagataMap,
) -> NagataStatus {
    non_null!(domain, codomain, assignment, out);
    guard(|| {
        let assignment = std::slice::from_raw_parts(assignment, len).to_vec();
        match MetricMap::new((*domain).inner.clone(), (*codomain).inner.clone(), assignment) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(NagataMap { inner: map }));
                NagataStatus::Ok
            }
            Err(e) => fail(map_status(&e), e.to_string()),
        }
    })
}

/// Builds a map from its JSON file form (`domain`, `codomain`, `assignment`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_map_from_json(
    json: *const c_char,
    rel_tol: f64,
    out: *mut *mut NagataMap,
) -> NagataStatus {
    non_null!(out);
    guard(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let file: MapFile = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => return fail(NagataStatus::Parse, e.to_string()),
        };
        match file.into_map(rel_tol_or_default(rel_tol)) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(NagataMap { inner: map }));
                NagataStatus::Ok
            }
            Err(e) => fail(map_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `map` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nagata_map_free(map: *mut NagataMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_map_lipschitz(map: *const NagataMap, out: *mut f64) -> NagataStatus {
    non_null!(map, out);
    guard(|| {
        *out = (*map).inner.lipschitz_constant();
        NagataStatus::Ok
    })
}

/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_map_openness(map: *const NagataMap, out: *mut f64) -> NagataStatus {
    non_null!(map, out);
    guard(|| {
        *out = (*map).inner.openness_constant();
        NagataStatus::Ok
    })
}

/// Whether the fiber space sits between `d_Y / lambda` and `mu d_Y` under
/// the Hausdorff distance.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_map_fiber_space_check(map: *const NagataMap, out: *mut bool) -> NagataStatus {
    non_null!(map, out);
    guard(|| match (*map).inner.fiber_space_check() {
        Ok(report) => {
            *out = report.ok;
            NagataStatus::Ok
        }
        Err(e) => fail(map_status(&e), e.to_string()),
    })
}

/// Ball-image criterion with constant `mu` over the default radius grid.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_map_brodskiy(map: *const NagataMap, mu: f64, out: *mut bool) -> NagataStatus {
    non_null!(map, out);
    guard(|| match (*map).inner.check_brodskiy(mu, None) {
        Ok(report) => {
            *out = report.holds();
            NagataStatus::Ok
        }
        Err(e) => fail(map_status(&e), e.to_string()),
    })
}

/// `12 + 6 sqrt 2`.
#[no_mangle]
pub extern "C" fn nagata_word_constant() -> f64 {
    word_constant_threshold()
}

/// The explicit `{a, b}`-word for `c^k` over the letters `a A b B`
/// (capitals are inverses); free with [`nagata_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_claim1_word(k: i64, out: *mut *mut c_char) -> NagataStatus {
    non_null!(out);
    guard(|| match claim1_word(k, DEFAULT_WORD_CONSTANT) {
        Ok(word) => into_c_string(word.to_string(), out),
        Err(e) => fail(heisenberg_status(&e), e.to_string()),
    })
}

/// Length of the explicit word for `c^k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_claim1_length(k: i64, out: *mut usize) -> NagataStatus {
    non_null!(out);
    guard(|| match claim1_word(k, DEFAULT_WORD_CONSTANT) {
        Ok(word) => {
            *out = word.len();
            NagataStatus::Ok
        }
        Err(e) => fail(heisenberg_status(&e), e.to_string()),
    })
}

/// Exact `{a, b}` word length of `c^k` by breadth-first search to `radius`;
/// [`NagataStatus::NotFound`] when `c^k` lies outside the ball.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nagata_central_word_length(k: i64, radius: u32, out: *mut u32) -> NagataStatus {
    non_null!(out);
    guard(
        || match bfs_word_lengths(radius, GeneratingSet::Ab, BfsBudget::default()) {
            Ok(table) => match table.length([0, 0, k]) {
                Some(len) => {
                    *out = len;
                    NagataStatus::Ok
                }
                None => fail(NagataStatus::NotFound, format!("c^{k} is not within distance {radius}")),
            },
            Err(e) => fail(heisenberg_status(&e), e.to_string()),
        },
    )
}

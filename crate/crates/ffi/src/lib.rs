//! C ABI over `scs-core`.
//!
//! Objects are opaque handles created by `scs_*` constructors and released
//! with the matching `*_free`. Every fallible call returns an [`ScsStatus`]
//! and writes results through out-pointers; on failure a message is kept
//! per thread and can be read with [`scs_last_error_message`]. Strings
//! returned by the library are released with [`scs_string_free`].
//!
//! No Rust panic crosses the boundary: each entry point runs inside
//! `catch_unwind` and reports `SCS_STATUS_INTERNAL` instead.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scs_core::bounds;
use scs_core::cfr::{self, SearchOutcome};
use scs_core::constructions;
use scs_core::error::ScsError;
use scs_core::io;
use scs_core::spectral;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MalformedInput = 3,
    PreconditionFailed = 4,
    /// Search stopped at its node budget without a decision.
    BudgetHit = 5,
    /// Search proved that the requested CFR does not exist.
    Exhausted = 6,
    BufferTooSmall = 7,
    Io = 8,
    Internal = 9,
}

/// A circular Florentine rectangle.
pub struct ScsCfr(cfr::Cfr);

/// A family of K sets of M time-domain sequences.
pub struct ScsFamily(scs_core::sequence::ScsFamily);

/// Correlation maxima over a shift window.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScsSummary {
    /// Largest per-set maximum (auto sidelobes and intra-set cross values).
    pub theta_a: f64,
    /// Largest cross value between sequences of different sets.
    pub theta_c: f64,
    pub theta_max: f64,
    /// Smallest ZCZ width over the sets.
    pub zcz_width: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &ScsError) -> ScsStatus {
    match err {
        ScsError::InvalidParameter(_)
        | ScsError::LengthMismatch { .. }
        | ScsError::WrongDomain { .. } => ScsStatus::InvalidArgument,
        ScsError::MalformedCfr(_) | ScsError::Json(_) => ScsStatus::MalformedInput,
        ScsError::Precondition(_)
        | ScsError::NotUnimodular { .. }
        | ScsError::NotOrthogonal { .. }
        | ScsError::EmptyFamily => ScsStatus::PreconditionFailed,
        ScsError::Io(_) => ScsStatus::Io,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<ScsStatus, (ScsStatus, String)>) -> ScsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScsStatus::Internal
        }
    }
}

fn core<T>(r: scs_core::error::Result<T>) -> Result<T, (ScsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (ScsStatus, String) {
    (ScsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (ScsStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (ScsStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(
    p: *const T,
    len: usize,
    what: &str,
) -> Result<&'a [T], (ScsStatus, String)> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, (ScsStatus, String)> {
    if p.is_null() {
        return Err(null("string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ScsStatus::MalformedInput, "string is not UTF-8".into()))
}

/// Message for the last failed call on this thread. Empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn scs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn scs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- CFRs ----------------------------------------------------------------

/// Multiplication table of Z_p without its zero row ((p−1)×p).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_from_prime(p: usize, out: *mut *mut ScsCfr) -> ScsStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = Box::into_raw(Box::new(ScsCfr(core(cfr::cfr_from_prime(p))?)));
        Ok(ScsStatus::Ok)
    })
}

/// Backtracking search for a `rows`×`n` CFR. Returns `SCS_STATUS_OK` with a
/// handle in `out`, `SCS_STATUS_BUDGET_HIT` or `SCS_STATUS_EXHAUSTED`.
/// `nodes` (optional) receives the number of search nodes.
///
/// # Safety
/// `out` must be valid; `nodes` may be null.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_search(
    n: usize,
    rows: usize,
    budget: u64,
    out: *mut *mut ScsCfr,
    nodes: *mut u64,
) -> ScsStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        let report = core(cfr::search_cfr(n, rows, budget))?;
        if let Some(nodes) = nodes.as_mut() {
            *nodes = report.nodes;
        }
        Ok(match report.outcome {
            SearchOutcome::Found(c) => {
                *slot = Box::into_raw(Box::new(ScsCfr(c)));
                ScsStatus::Ok
            }
            SearchOutcome::BudgetHit => ScsStatus::BudgetHit,
            SearchOutcome::Exhausted => ScsStatus::Exhausted,
        })
    })
}

/// Parse the text format: a header line "N r" followed by r rows.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_from_text(
    text: *const c_char,
    out: *mut *mut ScsCfr,
) -> ScsStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        let src = self::text(text)?;
        *slot = Box::into_raw(Box::new(ScsCfr(core(cfr::Cfr::from_text(src))?)));
        Ok(ScsStatus::Ok)
    })
}

/// Check the CFR axioms on a row-major `rows`×`n` matrix. `ok` receives
/// the verdict; malformed input (ragged or out-of-range) is an error.
///
/// # Safety
/// `data` must point to `rows * n` values; `ok` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_verify(
    data: *const usize,
    rows: usize,
    n: usize,
    ok: *mut bool,
) -> ScsStatus {
    guard(|| {
        let ok = out(ok, "ok")?;
        let total = rows
            .checked_mul(n)
            .ok_or((ScsStatus::InvalidArgument, "matrix too large".to_string()))?;
        let values = slice(data, total, "data")?;
        let matrix: Vec<Vec<usize>> = if n == 0 {
            Vec::new()
        } else {
            values.chunks(n).map(<[usize]>::to_vec).collect()
        };
        *ok = core(cfr::verify_cfr(&matrix))?.is_ok();
        Ok(ScsStatus::Ok)
    })
}

/// N, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_order(c: *const ScsCfr) -> usize {
    c.as_ref().map_or(0, |c| c.0.order())
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_num_rows(c: *const ScsCfr) -> usize {
    c.as_ref().map_or(0, |c| c.0.num_rows())
}

/// Copy the matrix row-major into `buf` (capacity `cap` values).
///
/// # Safety
/// `c` must be a live handle; `buf` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_rows(c: *const ScsCfr, buf: *mut usize, cap: usize) -> ScsStatus {
    guard(|| {
        let c = &deref(c, "cfr")?.0;
        let need = c.order() * c.num_rows();
        if cap < need {
            return Err((
                ScsStatus::BufferTooSmall,
                format!("need {need} values, got {cap}"),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (d, s) in dst.iter_mut().zip(c.rows().iter().flatten()) {
            *d = *s;
        }
        Ok(ScsStatus::Ok)
    })
}

/// Release a CFR handle. Null is ignored.
///
/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_free(c: *mut ScsCfr) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

// ---- families ------------------------------------------------------------

unsafe fn make_family(
    out: *mut *mut ScsFamily,
    build: impl FnOnce() -> Result<scs_core::sequence::ScsFamily, (ScsStatus, String)>,
) -> ScsStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        *slot = Box::into_raw(Box::new(ScsFamily(build()?)));
        Ok(ScsStatus::Ok)
    })
}

/// Time-domain construction: one sequence of length N(N+1) per CFR row.
///
/// # Safety
/// `c` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_family_c1(c: *const ScsCfr, out: *mut *mut ScsFamily) -> ScsStatus {
    make_family(out, || {
        core(constructions::construction1(&deref(c, "cfr")?.0))
    })
}

/// One inserted zero column at `s0` ∈ Z_{N+1}.
///
/// # Safety
/// `c` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_family_c2(
    c: *const ScsCfr,
    s0: usize,
    out: *mut *mut ScsFamily,
) -> ScsStatus {
    make_family(out, || {
        core(constructions::construction2(&deref(c, "cfr")?.0, s0))
    })
}

/// Zero columns at the `len` indices in `insert`.
///
/// # Safety
/// `c` must be a live handle; `insert` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn scs_family_c3(
    c: *const ScsCfr,
    insert: *const usize,
    len: usize,
    out: *mut *mut ScsFamily,
) -> ScsStatus {
    make_family(out, || {
        let cfr = &deref(c, "cfr")?.0;
        core(constructions::construction3(
            cfr,
            slice(insert, len, "insert")?,
        ))
    })
}

/// ZCZ sets built with the order-N DFT matrix. `k` = 0 uses every CFR row.
///
/// # Safety
/// `c` must be a live handle; `insert` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn scs_family_c4(
    c: *const ScsCfr,
    insert: *const usize,
    len: usize,
    k: usize,
    out: *mut *mut ScsFamily,
) -> ScsStatus {
    make_family(out, || {
        let cfr = &deref(c, "cfr")?.0;
        let k = (k != 0).then_some(k);
        core(constructions::construction4(
            cfr,
            None,
            slice(insert, len, "insert")?,
            k,
        ))
    })
}

/// Load a family from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_family_from_json(
    json: *const c_char,
    out: *mut *mut ScsFamily,
) -> ScsStatus {
    make_family(out, || core(io::family_from_json(text(json)?)))
}

/// L, K and M. Any out-pointer may be null.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn scs_family_shape(
    f: *const ScsFamily,
    length: *mut usize,
    num_sets: *mut usize,
    set_size: *mut usize,
) -> ScsStatus {
    guard(|| {
        let f = &deref(f, "family")?.0;
        for (p, v) in [
            (length, f.length()),
            (num_sets, f.num_sets()),
            (set_size, f.set_size()),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(ScsStatus::Ok)
    })
}

/// Forbidden carriers, ascending. `len` always receives |Ω|; the copy
/// happens only when `cap` is large enough.
///
/// # Safety
/// `f` must be a live handle; `buf` must hold `cap` values; `len` valid.
#[no_mangle]
pub unsafe extern "C" fn scs_family_omega(
    f: *const ScsFamily,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> ScsStatus {
    guard(|| {
        let f = &deref(f, "family")?.0;
        let omega = f.constraint().forbidden_vec();
        *out(len, "len")? = omega.len();
        if cap < omega.len() {
            return Err((
                ScsStatus::BufferTooSmall,
                format!("need {} values, got {cap}", omega.len()),
            ));
        }
        if !omega.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(omega.as_ptr(), buf, omega.len());
        }
        Ok(ScsStatus::Ok)
    })
}

/// Copy member `index` of set `set` as interleaved (re, im) pairs into
/// `buf`, which must hold `cap` doubles (at least 2L).
///
/// # Safety
/// `f` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn scs_family_sequence(
    f: *const ScsFamily,
    set: usize,
    index: usize,
    buf: *mut f64,
    cap: usize,
) -> ScsStatus {
    guard(|| {
        let f = &deref(f, "family")?.0;
        let seq = f.sets().get(set).and_then(|s| s.get(index)).ok_or((
            ScsStatus::InvalidArgument,
            format!("no member ({set}, {index})"),
        ))?;
        let need = 2 * seq.len();
        if cap < need {
            return Err((
                ScsStatus::BufferTooSmall,
                format!("need {need} doubles, got {cap}"),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (pair, v) in dst.chunks_exact_mut(2).zip(seq.values()) {
            pair[0] = v.re;
            pair[1] = v.im;
        }
        Ok(ScsStatus::Ok)
    })
}

/// Correlation maxima over shifts 0 ≤ τ < `window` (0 means the full
/// period). Zero tests use `zero_tol`, or the default when it is ≤ 0.
///
/// # Safety
/// `f` must be a live handle; `summary` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_family_summary(
    f: *const ScsFamily,
    window: usize,
    zero_tol: f64,
    summary: *mut ScsSummary,
) -> ScsStatus {
    guard(|| {
        let f = &deref(f, "family")?.0;
        let dst = out(summary, "summary")?;
        let window = if window == 0 { f.length() } else { window };
        let tol = if zero_tol > 0.0 {
            zero_tol
        } else {
            scs_core::tol::ZERO
        };
        let s = core(spectral::summarize(f, window, tol))?;
        *dst = ScsSummary {
            theta_a: s.theta_a,
            theta_c: s.theta_c,
            theta_max: s.theta_max,
            zcz_width: s.sets.iter().map(|x| x.zcz_width).min().unwrap_or(0),
        };
        Ok(ScsStatus::Ok)
    })
}

/// Serialize to the family JSON format. Free the result with
/// [`scs_string_free`].
///
/// # Safety
/// `f` must be a live handle; `json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_family_to_json(
    f: *const ScsFamily,
    json: *mut *mut c_char,
) -> ScsStatus {
    guard(|| {
        let f = &deref(f, "family")?.0;
        let slot = out(json, "json")?;
        let s = core(io::family_to_json(f))?;
        *slot = CString::new(s)
            .map_err(|_| (ScsStatus::Internal, "JSON contains NUL".to_string()))?
            .into_raw();
        Ok(ScsStatus::Ok)
    })
}

/// Release a family handle. Null is ignored.
///
/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scs_family_free(f: *mut ScsFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

// ---- bounds --------------------------------------------------------------

unsafe fn bound(out: *mut f64, f: impl FnOnce() -> scs_core::error::Result<f64>) -> ScsStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = core(f())?;
        Ok(ScsStatus::Ok)
    })
}

/// L·√(((M−1)L+n)/((L−n)(ML−1))).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_liu_bound(m: usize, l: usize, n: usize, out: *mut f64) -> ScsStatus {
    bound(out, || bounds::liu_bound(m, l, n))
}

/// Autocorrelation and cross-correlation floors under uniform power.
///
/// # Safety
/// `theta_a` and `theta_c` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_improved_bounds(
    l: usize,
    n: usize,
    theta_a: *mut f64,
    theta_c: *mut f64,
) -> ScsStatus {
    guard(|| {
        let a = out(theta_a, "theta_a")?;
        let c = out(theta_c, "theta_c")?;
        (*a, *c) = core(bounds::improved_bounds(l, n))?;
        Ok(ScsStatus::Ok)
    })
}

/// L/√(L−n).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_interset_bound(l: usize, n: usize, out: *mut f64) -> ScsStatus {
    bound(out, || bounds::interset_bound(l, n))
}

/// θ_max divided by the Liu bound.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_optimality_factor(
    theta_max: f64,
    m: usize,
    l: usize,
    n: usize,
    out: *mut f64,
) -> ScsStatus {
    bound(out, || bounds::optimality_factor(theta_max, m, l, n))
}

/// Closed-form η of the time-domain family from an F×N CFR.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn scs_cfr_family_eta(order: usize, rows: usize, out: *mut f64) -> ScsStatus {
    bound(out, || bounds::cfr_family_eta(order, rows))
}

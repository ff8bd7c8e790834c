//! C ABI for `rectcover`.
//!
//! Every fallible function returns an [`RcStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`rc_last_error`]. Handles are opaque and must be released with
//! the matching `*_free` function; strings returned by the library are freed
//! with [`rc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rectcover::construction::{build_bounded, exact_zero_count, IncidenceInstance, DEFAULT_MAX_M};
use rectcover::cover::{generate_cover, prune_cover, select_primes, verify_cover, CoverPlan, Mode};
use rectcover::formats::{from_pbm, to_pbm};
use rectcover::optimize::{exact_min_cover, stats, SolverLimits};
use rectcover::{BoolMatrix, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    /// A structural or cover check failed.
    VerificationFailed = 4,
    /// A size guard refused the request.
    GuardExceeded = 5,
    Parse = 6,
    Io = 7,
    /// Panic or other unexpected failure inside the library.
    Internal = 8,
}

/// Prime selection strategy for [`rc_cover_generate`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcMode {
    Adaptive = 0,
    Paper = 1,
}

impl From<RcMode> for Mode {
    fn from(m: RcMode) -> Self {
        match m {
            RcMode::Adaptive => Mode::Adaptive,
            RcMode::Paper => Mode::Paper,
        }
    }
}

/// Summary written by [`rc_cover_verify`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RcCoverCheck {
    /// The prime product exceeds the largest possible gap.
    pub sufficient: bool,
    pub monochromatic: bool,
    pub covered: bool,
    pub crt: bool,
    /// One-entries left uncovered.
    pub defects: usize,
}

/// Limits for [`rc_exact_min_cover`] and [`rc_stats_json`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RcLimits {
    pub max_entries: usize,
    pub max_ones: usize,
    pub max_candidates: usize,
    pub greedy_cap: usize,
}

impl From<RcLimits> for SolverLimits {
    fn from(l: RcLimits) -> Self {
        SolverLimits {
            max_entries: l.max_entries,
            max_ones: l.max_ones,
            max_candidates: l.max_candidates,
            greedy_cap: l.greedy_cap,
        }
    }
}

/// Bit-packed boolean matrix.
pub struct RcMatrix(BoolMatrix);

/// Point-line incidence instance.
pub struct RcInstance(IncidenceInstance);

/// Residue rectangle cover of an instance.
pub struct RcCover(CoverPlan);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> RcStatus {
    match err {
        Error::IndexOutOfRange { .. } => RcStatus::OutOfRange,
        Error::InvalidDimensions { .. } | Error::Parameter(_) | Error::InvalidCover(_) => RcStatus::InvalidArgument,
        Error::Parse(_) | Error::Json(_) => RcStatus::Parse,
        Error::EnumerationOverflow { .. } | Error::SizeGuard { .. } => RcStatus::GuardExceeded,
        Error::StructuralFailure(_) | Error::CoverCheckFailed(_) | Error::ConstructionBug(_) => {
            RcStatus::VerificationFailed
        }
        Error::Io(_) => RcStatus::Io,
    }
}

struct Fail(RcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(RcStatus::Internal, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RcStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("internal error: {msg}"));
            RcStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(RcStatus::Internal, e.to_string()))?;
    put(out, c.into_raw(), "out")
}

fn to_u64(v: u128, what: &str) -> Result<u64, Fail> {
    u64::try_from(v).map_err(|_| Fail(RcStatus::OutOfRange, format!("{what} = {v} does not fit in 64 bits")))
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn rc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Free a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `rows x cols` matrix of zeros.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_new(rows: usize, cols: usize, out: *mut *mut RcMatrix) -> RcStatus {
    guard(|| {
        let m = BoolMatrix::zeros(rows, cols)?;
        put(out, Box::into_raw(Box::new(RcMatrix(m))), "out")
    })
}

/// Parse a plain (`P1`) PBM image. Black pixels are ones.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_from_pbm(text: *const c_char, out: *mut *mut RcMatrix) -> RcStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(RcStatus::Parse, format!("pbm is not UTF-8: {e}")))?;
        let m = from_pbm(text)?;
        put(out, Box::into_raw(Box::new(RcMatrix(m))), "out")
    })
}

/// Render as plain PBM. Free the result with [`rc_string_free`].
///
/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_to_pbm(m: *const RcMatrix, out: *mut *mut c_char) -> RcStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        put_string(out, to_pbm(&m.0))
    })
}

/// # Safety
/// `m` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_free(m: *mut RcMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_rows(m: *const RcMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// Column count, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_cols(m: *const RcMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_get(m: *const RcMatrix, row: usize, col: usize, out: *mut bool) -> RcStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        put(out, m.0.entry(row, col)?, "out")
    })
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_set(m: *mut RcMatrix, row: usize, col: usize, value: bool) -> RcStatus {
    guard(|| {
        let m = deref_mut(m, "matrix")?;
        m.0.set(row, col, value)?;
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_count_zeros(m: *const RcMatrix, out: *mut usize) -> RcStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        put(out, m.0.count_zeros(), "out")
    })
}

/// Search for a 2x2 all-zero submatrix. On a hit `*found` is true and
/// `block` receives `{row1, row2, col1, col2}`; otherwise `block` is left
/// untouched.
///
/// # Safety
/// `m` must be a live handle, `found` valid for writes and `block` valid for
/// four writes.
#[no_mangle]
pub unsafe extern "C" fn rc_matrix_find_zero_2x2(m: *const RcMatrix, found: *mut bool, block: *mut usize) -> RcStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        if block.is_null() {
            return Err(null("block"));
        }
        let hit = m.0.find_zero_2x2();
        put(found, hit.is_some(), "found")?;
        if let Some(z) = hit {
            for (i, v) in [z.r1, z.r2, z.c1, z.c2].into_iter().enumerate() {
                block.add(i).write(v);
            }
        }
        Ok(())
    })
}

/// Statistics as JSON with keys `ones`, `zeros`, `d`, `explicit`, `greedy`,
/// `exact`, `optimal`, `lower`. `limits` may be null for the defaults.
///
/// # Safety
/// `m` must be a live handle, `limits` null or valid, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_stats_json(
    m: *const RcMatrix,
    limits: *const RcLimits,
    out: *mut *mut c_char,
) -> RcStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        let limits = limits.as_ref().map_or_else(SolverLimits::default, |l| (*l).into());
        let s = stats(&m.0, None, &limits)?;
        put_string(out, serde_json::to_string(&s)?)
    })
}

/// Size of a minimum rectangle cover and whether it is proven optimal.
/// Returns [`RcStatus::GuardExceeded`] when the matrix is too large for the
/// exact solver. `limits` may be null for the defaults.
///
/// # Safety
/// `m` must be a live handle, `limits` null or valid, the outputs valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn rc_exact_min_cover(
    m: *const RcMatrix,
    limits: *const RcLimits,
    size: *mut usize,
    optimal: *mut bool,
) -> RcStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        let limits = limits.as_ref().map_or_else(SolverLimits::default, |l| (*l).into());
        let ex = exact_min_cover(&m.0, &limits)?;
        put(size, ex.size(), "size")?;
        put(optimal, ex.certificate.optimal, "optimal")
    })
}

/// Default solver limits.
#[no_mangle]
pub extern "C" fn rc_limits_default() -> RcLimits {
    let l = SolverLimits::default();
    RcLimits {
        max_entries: l.max_entries,
        max_ones: l.max_ones,
        max_candidates: l.max_candidates,
        greedy_cap: l.greedy_cap,
    }
}

/// `2m^4 - (m(m+1)/2)^2`, the number of zeros the instance for `m` has.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_exact_zero_count(m: u64, out: *mut u64) -> RcStatus {
    guard(|| {
        if m == 0 {
            return Err(Error::Parameter("m must be at least 1".into()).into());
        }
        put(out, to_u64(exact_zero_count(m), "zero count")?, "out")
    })
}

/// Build the incidence instance for `m`. `max_m` of 0 means the library
/// default.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_instance_build(m: u64, max_m: u64, out: *mut *mut RcInstance) -> RcStatus {
    guard(|| {
        let cap = if max_m == 0 { DEFAULT_MAX_M } else { max_m };
        let inst = build_bounded(m, cap)?;
        put(out, Box::into_raw(Box::new(RcInstance(inst))), "out")
    })
}

/// # Safety
/// `inst` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn rc_instance_free(inst: *mut RcInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Side length `n = 2m^3`, or 0 for null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_instance_n(inst: *const RcInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n())
}

/// Copy of the instance matrix as a new handle owned by the caller.
///
/// # Safety
/// `inst` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_instance_matrix(inst: *const RcInstance, out: *mut *mut RcMatrix) -> RcStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        put(out, Box::into_raw(Box::new(RcMatrix(inst.0.matrix().clone()))), "out")
    })
}

/// Check for a 2x2 all-zero block, both by scanning and against the line
/// geometry. A block gives [`RcStatus::VerificationFailed`].
///
/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_instance_verify(inst: *const RcInstance) -> RcStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        rectcover::construction::verify_no_zero_block(&inst.0)?;
        Ok(())
    })
}

/// Every residue slot for the chosen primes, empty ones included.
///
/// # Safety
/// `inst` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_cover_generate(inst: *const RcInstance, mode: RcMode, out: *mut *mut RcCover) -> RcStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let plan = select_primes(inst.0.m(), mode.into());
        let cover = generate_cover(&inst.0, &plan)?;
        put(out, Box::into_raw(Box::new(RcCover(cover))), "out")
    })
}

/// # Safety
/// `cover` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn rc_cover_free(cover: *mut RcCover) {
    if !cover.is_null() {
        drop(Box::from_raw(cover));
    }
}

/// Number of rectangles, or 0 for null.
///
/// # Safety
/// `cover` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_cover_len(cover: *const RcCover) -> usize {
    cover.as_ref().map_or(0, |c| c.0.len())
}

/// Non-empty rectangles, or 0 for null.
///
/// # Safety
/// `cover` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_cover_nonempty(cover: *const RcCover) -> usize {
    cover.as_ref().map_or(0, |c| c.0.nonempty_count)
}

/// Check the cover against its instance. A failing check under a
/// sufficient prime plan returns [`RcStatus::VerificationFailed`]; under an
/// insufficient plan the call succeeds and `out` records what failed.
///
/// # Safety
/// Both handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_cover_verify(
    inst: *const RcInstance,
    cover: *const RcCover,
    out: *mut RcCoverCheck,
) -> RcStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let cover = deref(cover, "cover")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = match verify_cover(&inst.0, &cover.0) {
            Ok(r) => r,
            Err(Error::CoverCheckFailed(r)) => {
                let r = *r;
                out.write(RcCoverCheck {
                    sufficient: r.sufficient,
                    monochromatic: r.monochromatic,
                    covered: r.covered,
                    crt: r.crt,
                    defects: r.defects,
                });
                return Err(Error::CoverCheckFailed(Box::new(r)).into());
            }
            Err(e) => return Err(e.into()),
        };
        out.write(RcCoverCheck {
            sufficient: report.sufficient,
            monochromatic: report.monochromatic,
            covered: report.covered,
            crt: report.crt,
            defects: report.defects,
        });
        Ok(())
    })
}

/// Drop empty and redundant rectangles into a new handle.
///
/// # Safety
/// Both handles must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_cover_prune(
    inst: *const RcInstance,
    cover: *const RcCover,
    out: *mut *mut RcCover,
) -> RcStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let cover = deref(cover, "cover")?;
        let pruned = prune_cover(&inst.0, &cover.0)?;
        put(out, Box::into_raw(Box::new(RcCover(pruned))), "out")
    })
}

/// Cover as JSON. Free the result with [`rc_string_free`].
///
/// # Safety
/// `cover` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rc_cover_to_json(cover: *const RcCover, out: *mut *mut c_char) -> RcStatus {
    guard(|| {
        let cover = deref(cover, "cover")?;
        put_string(out, serde_json::to_string(&cover.0.export())?)
    })
}

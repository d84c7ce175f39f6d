//! C ABI over `walsh_greedy`.
//!
//! Results come back through out-parameters; every function returns a
//! [`WgStatus`]. Strings and handles handed out here are owned by the caller
//! and must be released with [`wg_string_free`], [`wg_report_free`] or
//! [`wg_expansion_free`]. The message for the most recent failure on the
//! calling thread is available from [`wg_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use walsh_greedy::counterexample::ConstructionConfig;
use walsh_greedy::dyadic::{level_cap, set_level_cap};
use walsh_greedy::report::report_json;
use walsh_greedy::{
    block_max_search, greedy_gap_norm, lebesgue_constant, verify_theorem, Error, Expansion,
    Rational, VerificationReport,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Resource = 3,
    Parse = 4,
    NeedsExactEvaluation = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Opaque verification report.
pub struct WgReport(VerificationReport);

/// Opaque finite Walsh expansion.
pub struct WgExpansion(Expansion);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> WgStatus {
    match e {
        _ if e.is_resource() => WgStatus::Resource,
        Error::Parse(_) | Error::UnorderedExpansion(_) => WgStatus::Parse,
        Error::NeedsExactEvaluation(_) => WgStatus::NeedsExactEvaluation,
        Error::Stage { source, .. } => status_of(source),
        _ => WgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), WgStatus>) -> WgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WgStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            WgStatus::Panic
        }
    }
}

fn fail(e: Error) -> WgStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn null() -> WgStatus {
    set_error("null pointer argument");
    WgStatus::NullPointer
}

fn string_out(out: *mut *mut c_char, s: &str) -> Result<(), WgStatus> {
    let c = CString::new(s).map_err(|_| WgStatus::InvalidUtf8)?;
    // SAFETY: callers check `out` for null before reaching here.
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn rational_out(out: *mut *mut c_char, r: &Rational) -> Result<(), WgStatus> {
    string_out(out, &r.to_string())
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn wg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sets the grid memory guard and returns the previous value.
#[no_mangle]
pub extern "C" fn wg_set_level_cap(cap: u32) -> u32 {
    set_level_cap(cap)
}

/// `||D_m||_1` as an exact `p/q` string.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn wg_lebesgue_constant(m: u64, out: *mut *mut c_char) -> WgStatus {
    if out.is_null() {
        return null();
    }
    guard(|| rational_out(out, &lebesgue_constant(m)))
}

/// `||D_m||_1` rounded to the nearest double.
#[no_mangle]
pub extern "C" fn wg_lebesgue_constant_f64(m: u64) -> f64 {
    lebesgue_constant(m).to_f64()
}

/// Maximizer of `||D_m||_1` over `2^{k-1} <= m < 2^k`.
///
/// # Safety
/// `out_m` and `out_value` must be valid pointers to writable storage.
#[no_mangle]
pub unsafe extern "C" fn wg_block_max_search(
    k: u32,
    out_m: *mut u64,
    out_value: *mut *mut c_char,
) -> WgStatus {
    if out_m.is_null() || out_value.is_null() {
        return null();
    }
    guard(|| {
        let rec = block_max_search(k).map_err(fail)?;
        *out_m = rec.m;
        rational_out(out_value, &rec.lebesgue)
    })
}

/// Builds the construction with `blocks` blocks and certifies it.
/// `level_cap == 0` uses the current memory guard.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn wg_verify(
    blocks: u32,
    level_cap_override: u32,
    out: *mut *mut WgReport,
) -> WgStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let cfg = ConstructionConfig {
            level_cap: if level_cap_override == 0 {
                level_cap()
            } else {
                level_cap_override
            },
            ..ConstructionConfig::minimal(blocks as usize)
        };
        let report = verify_theorem(&cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(WgReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`wg_verify`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn wg_report_free(report: *mut WgReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Whether every certificate in the report holds. False for null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wg_report_all_passed(report: *const WgReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.all_passed)
}

/// Number of per-block records (blocks 2..=V).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wg_report_record_count(report: *const WgReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.records.len())
}

/// Block index, `m_nu`, certified gap lower bound (as a double) and pass flag
/// of record `i`.
///
/// # Safety
/// `report` must be a live handle; all out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_report_record(
    report: *const WgReport,
    i: usize,
    out_nu: *mut u64,
    out_m_nu: *mut u64,
    out_gap_lower: *mut f64,
    out_passed: *mut bool,
) -> WgStatus {
    let Some(report) = report.as_ref() else {
        return null();
    };
    if out_nu.is_null() || out_m_nu.is_null() || out_gap_lower.is_null() || out_passed.is_null() {
        return null();
    }
    guard(|| {
        let rec = report.0.records.get(i).ok_or_else(|| {
            set_error(format!("record {i} out of range"));
            WgStatus::InvalidArgument
        })?;
        *out_nu = rec.nu;
        *out_m_nu = rec.m_nu;
        *out_gap_lower = rec.gap_lower.to_f64();
        *out_passed = rec.passed;
        Ok(())
    })
}

/// Exact gap lower bound of record `i` as a `p/q` string.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_report_gap_lower_exact(
    report: *const WgReport,
    i: usize,
    out: *mut *mut c_char,
) -> WgStatus {
    let Some(report) = report.as_ref() else {
        return null();
    };
    if out.is_null() {
        return null();
    }
    guard(|| match report.0.records.get(i) {
        Some(rec) => rational_out(out, &rec.gap_lower),
        None => {
            set_error(format!("record {i} out of range"));
            Err(WgStatus::InvalidArgument)
        }
    })
}

/// The report in the same JSON form the CLI `verify` command writes.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_report_to_json(
    report: *const WgReport,
    out: *mut *mut c_char,
) -> WgStatus {
    let Some(report) = report.as_ref() else {
        return null();
    };
    if out.is_null() {
        return null();
    }
    guard(|| string_out(out, &report_json(&report.0)))
}

/// Parses the `index<TAB>coeff` expansion format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_expansion_parse(
    text: *const c_char,
    out: *mut *mut WgExpansion,
) -> WgStatus {
    if text.is_null() || out.is_null() {
        return null();
    }
    guard(|| {
        let text = CStr::from_ptr(text).to_str().map_err(|_| {
            set_error("expansion text is not UTF-8");
            WgStatus::InvalidUtf8
        })?;
        let e = Expansion::parse_text(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(WgExpansion(e)));
        Ok(())
    })
}

/// # Safety
/// `e` must come from [`wg_expansion_parse`] and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn wg_expansion_free(e: *mut WgExpansion) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wg_expansion_len(e: *const WgExpansion) -> usize {
    e.as_ref().map_or(0, |e| e.0.len())
}

/// `||G_{m2} - G_{m1}||_1` on a level-`level` grid, as exact strings: the
/// computed value and the dropped-tail remainder bounding its error.
///
/// # Safety
/// `e` must be a live handle; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_expansion_gap_norm(
    e: *const WgExpansion,
    m1: usize,
    m2: usize,
    level: u32,
    out_value: *mut *mut c_char,
    out_remainder: *mut *mut c_char,
) -> WgStatus {
    let Some(e) = e.as_ref() else {
        return null();
    };
    if out_value.is_null() || out_remainder.is_null() {
        return null();
    }
    guard(|| {
        let gap = greedy_gap_norm(&e.0, m1, m2, level).map_err(fail)?;
        rational_out(out_value, &gap.value)?;
        rational_out(out_remainder, &gap.remainder)
    })
}

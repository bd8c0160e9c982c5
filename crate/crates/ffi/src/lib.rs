//! C ABI over `ffbundle`.
//!
//! Bundles cross the boundary as opaque `FfbBundle` handles created by
//! [`ffb_bundle_parse`] and released with [`ffb_bundle_free`]. Every fallible
//! call returns an [`FfbStatus`] and writes its result through an out-pointer;
//! after a failure, [`ffb_last_error`] describes it. Strings returned by the
//! library are released with [`ffb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ffbundle::criteria::{is_quotient, is_subbundle, slopewise_dominates};
use ffbundle::degeneration::degeneration_trace;
use ffbundle::degree::{c_value, dim_hom, stratum_dim};
use ffbundle::{Error, HNBundle};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// An input violates a precondition; for triples, the message names the condition.
    Precondition = 4,
    Undefined = 5,
    Unsupported = 6,
    /// A result does not fit in a 64-bit integer.
    Overflow = 7,
    Internal = 8,
    Panic = 9,
}

/// Opaque bundle handle.
pub struct FfbBundle(HNBundle);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: FfbStatus, msg: impl AsRef<str>) -> FfbStatus {
    set_error(msg.as_ref());
    status
}

fn from_error(e: Error) -> FfbStatus {
    let status = match &e {
        Error::Parse(_) => FfbStatus::Parse,
        Error::Condition(_) | Error::Precondition(_) => FfbStatus::Precondition,
        Error::UndefinedInput(_) => FfbStatus::Undefined,
        Error::Unsupported(_) => FfbStatus::Unsupported,
        Error::Internal(_) => FfbStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> FfbStatus) -> FfbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(FfbStatus::Panic, "panic inside ffbundle"),
    }
}

unsafe fn bundle<'a>(p: *const FfbBundle) -> Result<&'a HNBundle, FfbStatus> {
    p.as_ref()
        .map(|b| &b.0)
        .ok_or_else(|| fail(FfbStatus::NullPointer, "null bundle handle"))
}

unsafe fn write<T>(out: *mut T, value: T) -> FfbStatus {
    match out.as_mut() {
        Some(slot) => {
            *slot = value;
            FfbStatus::Ok
        }
        None => fail(FfbStatus::NullPointer, "null output pointer"),
    }
}

unsafe fn write_i64(out: *mut i64, value: BigInt) -> FfbStatus {
    match value.to_i64() {
        Some(v) => write(out, v),
        None => fail(
            FfbStatus::Overflow,
            format!("{value} does not fit in 64 bits"),
        ),
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfbStatus {
    if out.is_null() {
        return fail(FfbStatus::NullPointer, "null output pointer");
    }
    match CString::new(s) {
        Ok(c) => write(out, c.into_raw()),
        Err(_) => fail(FfbStatus::Internal, "string contains a nul byte"),
    }
}

unsafe fn write_bundle(out: *mut *mut FfbBundle, b: HNBundle) -> FfbStatus {
    if out.is_null() {
        return fail(FfbStatus::NullPointer, "null output pointer");
    }
    write(out, Box::into_raw(Box::new(FfbBundle(b))))
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message describing the most recent failure on this thread; empty if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ffb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses the text form, e.g. `"3/2:2,0:1,-1"`; `"0"` is the zero bundle.
///
/// # Safety
/// `text` must be a valid nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_parse(
    text: *const c_char,
    out: *mut *mut FfbBundle,
) -> FfbStatus {
    guard(|| {
        if text.is_null() {
            return fail(FfbStatus::NullPointer, "null text");
        }
        let s = match CStr::from_ptr(text).to_str() {
            Ok(s) => s,
            Err(_) => return fail(FfbStatus::InvalidUtf8, "text is not UTF-8"),
        };
        match s.parse::<HNBundle>() {
            Ok(b) => write_bundle(out, b),
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `b` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_free(b: *mut FfbBundle) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Canonical text form; release with [`ffb_string_free`].
///
/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_to_string(
    b: *const FfbBundle,
    out: *mut *mut c_char,
) -> FfbStatus {
    guard(|| {
        let v = try_ffi!(bundle(b));
        write_string(out, v.to_string())
    })
}

/// JSON form `{"summands":[{"slope":"3/2","mult":2}]}`; release with [`ffb_string_free`].
///
/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_to_json(
    b: *const FfbBundle,
    out: *mut *mut c_char,
) -> FfbStatus {
    guard(|| {
        let v = try_ffi!(bundle(b));
        write_string(out, serde_json::to_string(v).expect("bundles serialize"))
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn ffb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_rank(b: *const FfbBundle, out: *mut i64) -> FfbStatus {
    guard(|| {
        let v = try_ffi!(bundle(b));
        write_i64(out, v.rank())
    })
}

/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_degree(b: *const FfbBundle, out: *mut i64) -> FfbStatus {
    guard(|| {
        let v = try_ffi!(bundle(b));
        write_i64(out, v.degree())
    })
}

/// # Safety
/// `b` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_dual(
    b: *const FfbBundle,
    out: *mut *mut FfbBundle,
) -> FfbStatus {
    guard(|| {
        let v = try_ffi!(bundle(b));
        write_bundle(out, v.dual())
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_bundle_direct_sum(
    a: *const FfbBundle,
    b: *const FfbBundle,
    out: *mut *mut FfbBundle,
) -> FfbStatus {
    guard(|| {
        let (a, b) = (try_ffi!(bundle(a)), try_ffi!(bundle(b)));
        write_bundle(out, a.direct_sum(b))
    })
}

/// Whether `e` embeds into `f`.
///
/// # Safety
/// `e`, `f` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_is_subbundle(
    e: *const FfbBundle,
    f: *const FfbBundle,
    out: *mut bool,
) -> FfbStatus {
    guard(|| {
        let (e, f) = (try_ffi!(bundle(e)), try_ffi!(bundle(f)));
        write(out, is_subbundle(e, f))
    })
}

/// Whether `f` slopewise dominates `e`.
///
/// # Safety
/// `f`, `e` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_slopewise_dominates(
    f: *const FfbBundle,
    e: *const FfbBundle,
    out: *mut bool,
) -> FfbStatus {
    guard(|| {
        let (f, e) = (try_ffi!(bundle(f)), try_ffi!(bundle(e)));
        write(out, slopewise_dominates(f, e))
    })
}

/// Whether `q` is a quotient of `e`.
///
/// # Safety
/// `q`, `e` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_is_quotient(
    q: *const FfbBundle,
    e: *const FfbBundle,
    out: *mut bool,
) -> FfbStatus {
    guard(|| {
        let (q, e) = (try_ffi!(bundle(q)), try_ffi!(bundle(e)));
        write(out, is_quotient(q, e))
    })
}

/// # Safety
/// `e`, `f` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_dim_hom(
    e: *const FfbBundle,
    f: *const FfbBundle,
    out: *mut i64,
) -> FfbStatus {
    guard(|| {
        let (e, f) = (try_ffi!(bundle(e)), try_ffi!(bundle(f)));
        write_i64(out, dim_hom(e, f))
    })
}

/// # Safety
/// `e`, `f`, `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_stratum_dim(
    e: *const FfbBundle,
    f: *const FfbBundle,
    q: *const FfbBundle,
    out: *mut i64,
) -> FfbStatus {
    guard(|| {
        let (e, f, q) = (
            try_ffi!(bundle(e)),
            try_ffi!(bundle(f)),
            try_ffi!(bundle(q)),
        );
        match stratum_dim(e, f, q) {
            Ok(d) => write_i64(out, d),
            Err(err) => from_error(err),
        }
    })
}

/// `c_{E,F}(Q)`.
///
/// # Safety
/// `e`, `f`, `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_c_value(
    e: *const FfbBundle,
    f: *const FfbBundle,
    q: *const FfbBundle,
    out: *mut i64,
) -> FfbStatus {
    guard(|| {
        let (e, f, q) = (
            try_ffi!(bundle(e)),
            try_ffi!(bundle(f)),
            try_ffi!(bundle(q)),
        );
        write_i64(out, c_value(e, f, q))
    })
}

/// The degenerating sequence of a reduced triple as JSON with keys `chain`,
/// `steps`, `c` and `r`; release with [`ffb_string_free`].
///
/// # Safety
/// `e`, `f`, `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ffb_trace_json(
    e: *const FfbBundle,
    f: *const FfbBundle,
    q: *const FfbBundle,
    out: *mut *mut c_char,
) -> FfbStatus {
    guard(|| {
        let (e, f, q) = (
            try_ffi!(bundle(e)),
            try_ffi!(bundle(f)),
            try_ffi!(bundle(q)),
        );
        match degeneration_trace(e, f, q) {
            Ok(t) => write_string(out, serde_json::to_string(&t).expect("traces serialize")),
            Err(err) => from_error(err),
        }
    })
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ffb_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

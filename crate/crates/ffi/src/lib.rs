//! C ABI over `ccloop`.
//!
//! Loops are opaque `CclLoop` handles owned by the caller and released with
//! `ccl_loop_free`. Every fallible call returns a `CclStatus`; on failure a
//! message is kept per thread and can be read with `ccl_last_error`.
//! Array outputs follow one convention: the call writes up to `cap` items,
//! always stores the full length in `*len`, and returns
//! `CCL_STATUS_BUFFER_TOO_SMALL` if `cap` was not enough.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;

use ccloop::identities::{check_identity, parse_identity, Property};
use ccloop::search::{find_models, SearchError, SearchSpec};
use ccloop::structure::{center, nucleus, quotient, StructureError};
use ccloop::{ElemSet, LoopTable};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CclStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Text did not parse, or a grid is not a loop table.
    InvalidTable = 3,
    /// An element index is outside `0..order`.
    OutOfRange = 4,
    /// Identity or search-spec syntax error, or unknown property name.
    Syntax = 5,
    /// Order or assignment count above the library's limits.
    TooLarge = 6,
    NotSubloop = 7,
    NotNormal = 8,
    /// The search space was exhausted without a model.
    Unsatisfiable = 9,
    /// The search stopped at its time limit without a model.
    NoModel = 10,
    BufferTooSmall = 11,
    /// A panic was caught at the boundary.
    Internal = 99,
}

/// Opaque loop handle.
pub struct CclLoop(LoopTable);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: CclStatus, message: impl ToString) -> CclStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.to_string());
    status
}

fn guard(f: impl FnOnce() -> CclStatus) -> CclStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(CclStatus::Internal, "panic inside ccloop"))
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, CclStatus> {
    if s.is_null() {
        return Err(fail(CclStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(CclStatus::InvalidUtf8, e))
}

unsafe fn handle<'a>(q: *const CclLoop) -> Result<&'a LoopTable, CclStatus> {
    q.as_ref().map(|h| &h.0).ok_or_else(|| fail(CclStatus::NullPointer, "null loop handle"))
}

unsafe fn emit(q: LoopTable, out: *mut *mut CclLoop) -> CclStatus {
    *out = Box::into_raw(Box::new(CclLoop(q)));
    CclStatus::Ok
}

/// Copies `items` into `buf[..cap]` and stores the full length in `len`.
unsafe fn write_array<T: Copy>(items: &[T], buf: *mut T, cap: usize, len: *mut usize) -> CclStatus {
    if len.is_null() || (buf.is_null() && cap > 0) {
        return fail(CclStatus::NullPointer, "null output buffer");
    }
    *len = items.len();
    let k = items.len().min(cap);
    if k > 0 {
        ptr::copy_nonoverlapping(items.as_ptr(), buf, k);
    }
    if items.len() > cap {
        return fail(CclStatus::BufferTooSmall, format!("{} items needed", items.len()));
    }
    CclStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

fn elem(q: &LoopTable, x: u32) -> Result<usize, CclStatus> {
    let x = x as usize;
    if x < q.order() {
        Ok(x)
    } else {
        Err(fail(CclStatus::OutOfRange, format!("element {x} outside 0..{}", q.order())))
    }
}

fn structure_status(e: StructureError) -> CclStatus {
    let s = match e {
        StructureError::NotSubloop(_) => CclStatus::NotSubloop,
        StructureError::NotNormal(_) => CclStatus::NotNormal,
        StructureError::OrderTooLarge { .. } => CclStatus::TooLarge,
        _ => CclStatus::Internal,
    };
    fail(s, e)
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ccl_status_name(status: CclStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CclStatus::Ok => c"ok",
        CclStatus::NullPointer => c"null pointer",
        CclStatus::InvalidUtf8 => c"invalid UTF-8",
        CclStatus::InvalidTable => c"invalid table",
        CclStatus::OutOfRange => c"element out of range",
        CclStatus::Syntax => c"syntax error",
        CclStatus::TooLarge => c"too large",
        CclStatus::NotSubloop => c"not a subloop",
        CclStatus::NotNormal => c"not normal",
        CclStatus::Unsatisfiable => c"unsatisfiable",
        CclStatus::NoModel => c"no model found",
        CclStatus::BufferTooSmall => c"buffer too small",
        CclStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Message for the last failure on this thread, NUL-terminated, truncated
/// to `cap` bytes. `*len` receives the untruncated length plus one.
///
/// # Safety
/// `buf` must be valid for `cap` bytes; `len` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ccl_last_error(buf: *mut c_char, cap: usize, len: *mut usize) -> CclStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_c_string(&msg, buf, cap, len)
}

unsafe fn write_c_string(s: &str, buf: *mut c_char, cap: usize, len: *mut usize) -> CclStatus {
    if !len.is_null() {
        *len = s.len() + 1;
    }
    if buf.is_null() || cap == 0 {
        return if s.is_empty() && cap > 0 { CclStatus::Ok } else { CclStatus::BufferTooSmall };
    }
    let k = s.len().min(cap - 1);
    ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, k);
    *buf.add(k) = 0;
    if k < s.len() {
        CclStatus::BufferTooSmall
    } else {
        CclStatus::Ok
    }
}

/// Parses the `.tbl` text format.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_from_tbl(src: *const c_char, out: *mut *mut CclLoop) -> CclStatus {
    guard(|| {
        if out.is_null() {
            return fail(CclStatus::NullPointer, "null output handle");
        }
        let s = tri!(text(src));
        match LoopTable::parse_tbl(s) {
            Ok(q) => emit(q, out),
            Err(e) => fail(CclStatus::InvalidTable, e),
        }
    })
}

/// Builds a loop from `n * n` row-major entries.
///
/// # Safety
/// `entries` must point to `n * n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_from_table(entries: *const u32, n: usize, out: *mut *mut CclLoop) -> CclStatus {
    guard(|| {
        if out.is_null() || entries.is_null() {
            return fail(CclStatus::NullPointer, "null argument");
        }
        let flat = std::slice::from_raw_parts(entries, n * n);
        let rows: Vec<Vec<i64>> = flat.chunks(n.max(1)).map(|r| r.iter().map(|&v| v as i64).collect()).collect();
        match LoopTable::from_rows(&rows) {
            Ok(q) => emit(q, out),
            Err(e) => fail(CclStatus::InvalidTable, e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `q` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_free(q: *mut CclLoop) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Order of the loop, or 0 for a null handle.
///
/// # Safety
/// `q` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_order(q: *const CclLoop) -> usize {
    q.as_ref().map_or(0, |h| h.0.order())
}

/// Operation selector for `ccl_loop_op`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CclOp {
    Mul = 0,
    /// `x \ y`
    LeftDiv = 1,
    /// `x / y`
    RightDiv = 2,
}

/// `*out = x op y`.
///
/// # Safety
/// `q` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_op(q: *const CclLoop, op: CclOp, x: u32, y: u32, out: *mut u32) -> CclStatus {
    guard(|| {
        let q = tri!(handle(q));
        if out.is_null() {
            return fail(CclStatus::NullPointer, "null output");
        }
        let (x, y) = (tri!(elem(q, x)), tri!(elem(q, y)));
        *out = match op {
            CclOp::Mul => q.mul(x, y),
            CclOp::LeftDiv => q.ldiv(x, y),
            CclOp::RightDiv => q.rdiv(x, y),
        } as u32;
        CclStatus::Ok
    })
}

/// Evaluates a named property such as `"cc"`, `"pa"`, `"wip"`, `"extra"`.
///
/// # Safety
/// `q`, `name` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_has_property(q: *const CclLoop, name: *const c_char, out: *mut bool) -> CclStatus {
    guard(|| {
        let q = tri!(handle(q));
        let name = tri!(text(name));
        if out.is_null() {
            return fail(CclStatus::NullPointer, "null output");
        }
        match Property::from_str(name) {
            Ok(p) => {
                *out = p.holds(q);
                CclStatus::Ok
            }
            Err(e) => fail(CclStatus::Syntax, e),
        }
    })
}

/// Checks an identity over all assignments. When it fails, the least
/// counterexample (one element per variable, variables in alphabetical
/// order) is written to `witness` under the array convention; when it
/// holds, `*witness_len` is 0.
///
/// # Safety
/// `q`, `identity`, `holds` and `witness_len` must be valid; `witness` must
/// be valid for `cap` items.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_check_identity(
    q: *const CclLoop,
    identity: *const c_char,
    holds: *mut bool,
    witness: *mut u32,
    cap: usize,
    witness_len: *mut usize,
) -> CclStatus {
    guard(|| {
        let q = tri!(handle(q));
        let src = tri!(text(identity));
        if holds.is_null() {
            return fail(CclStatus::NullPointer, "null output");
        }
        let id = match parse_identity(src) {
            Ok(id) => id,
            Err(e) => return fail(CclStatus::Syntax, e),
        };
        let outcome = match check_identity(q, &id) {
            Ok(o) => o,
            Err(e) => return fail(CclStatus::TooLarge, e),
        };
        *holds = outcome.holds;
        let w: Vec<u32> = outcome.counterexample.unwrap_or_default().into_iter().map(|x| x as u32).collect();
        write_array(&w, witness, cap, witness_len)
    })
}

/// Members of the nucleus, ascending.
///
/// # Safety
/// `q` and `len` must be valid; `buf` must be valid for `cap` items.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_nucleus(q: *const CclLoop, buf: *mut u32, cap: usize, len: *mut usize) -> CclStatus {
    guard(|| {
        let q = tri!(handle(q));
        let v: Vec<u32> = nucleus(q).iter().map(|x| x as u32).collect();
        write_array(&v, buf, cap, len)
    })
}

/// Members of the center, ascending.
///
/// # Safety
/// As for `ccl_loop_nucleus`.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_center(q: *const CclLoop, buf: *mut u32, cap: usize, len: *mut usize) -> CclStatus {
    guard(|| {
        let q = tri!(handle(q));
        let v: Vec<u32> = center(q).iter().map(|x| x as u32).collect();
        write_array(&v, buf, cap, len)
    })
}

/// Serializes to `.tbl` text (NUL-terminated). `*len` receives the byte
/// count including the terminator.
///
/// # Safety
/// `q` must be valid; `buf` must be valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_to_tbl(q: *const CclLoop, buf: *mut c_char, cap: usize, len: *mut usize) -> CclStatus {
    guard(|| {
        let q = tri!(handle(q));
        match write_c_string(&q.to_tbl(), buf, cap, len) {
            CclStatus::Ok => CclStatus::Ok,
            s => fail(s, "buffer too small"),
        }
    })
}

/// Quotient by the normal subloop with the given members.
///
/// # Safety
/// `q` and `out` must be valid; `members` must point to `count` values.
#[no_mangle]
pub unsafe extern "C" fn ccl_loop_quotient(
    q: *const CclLoop,
    members: *const u32,
    count: usize,
    out: *mut *mut CclLoop,
) -> CclStatus {
    guard(|| {
        let q = tri!(handle(q));
        if out.is_null() || (members.is_null() && count > 0) {
            return fail(CclStatus::NullPointer, "null argument");
        }
        let mut h = ElemSet::empty(q.order());
        for &m in std::slice::from_raw_parts(members, count) {
            h.insert(tri!(elem(q, m)));
        }
        match quotient(q, &h) {
            Ok(quot) => emit(quot.table, out),
            Err(e) => structure_status(e),
        }
    })
}

/// First model of the given order satisfying `require` (comma-separated
/// properties or identities, e.g. `"cc, pa, nonassociative"`).
/// `time_limit_secs` of 0 means no limit.
///
/// # Safety
/// `require` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ccl_search_first(
    order: usize,
    require: *const c_char,
    seed: u64,
    time_limit_secs: u64,
    out: *mut *mut CclLoop,
) -> CclStatus {
    guard(|| {
        if out.is_null() {
            return fail(CclStatus::NullPointer, "null output handle");
        }
        let req = tri!(text(require));
        let mut spec = match SearchSpec::new(order).require(req) {
            Ok(s) => s.limit(1).seed(seed),
            Err(e) => return fail(CclStatus::Syntax, e),
        };
        if time_limit_secs > 0 {
            spec = spec.time_limit(std::time::Duration::from_secs(time_limit_secs));
        }
        match find_models(&spec) {
            Ok(o) => match o.models.into_iter().next() {
                Some(m) => emit(m, out),
                None => fail(CclStatus::NoModel, "time limit reached"),
            },
            Err(SearchError::Unsatisfiable(_)) => fail(CclStatus::Unsatisfiable, "no model exists"),
            Err(e @ SearchError::OrderTooLarge { .. }) => fail(CclStatus::TooLarge, e),
            Err(e) => fail(CclStatus::Syntax, e),
        }
    })
}

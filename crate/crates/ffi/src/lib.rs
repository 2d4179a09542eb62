//! C ABI for the sat2tri reduction library.
//!
//! All functions follow the same conventions: opaque handles created and
//! destroyed by this library, integer status codes (`SAT2TRI_OK` = 0), and
//! a thread-local textual error readable via [`sat2tri_last_error`].
//! Strings returned through `char **` out-parameters must be released with
//! [`sat2tri_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sat2tri::compiler::{compile, BlockLibrary, CompileResult};
use sat2tri::farey::{farey_distance, Slope};
use sat2tri::formula::{brute_force_sat, parse_dimacs, parse_expr, Formula};
use sat2tri::tri::render_tri_text;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sat2TriStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    CompileError = 4,
    Unsupported = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// The message of the most recent error on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn sat2tri_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Opaque parsed formula.
pub struct Sat2TriFormula {
    inner: Formula,
}

/// Opaque compilation output (triangulation plus certificate).
pub struct Sat2TriResult {
    inner: CompileResult,
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Sat2TriStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(Sat2TriStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        Sat2TriStatus::InvalidUtf8
    })
}

fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Sat2TriStatus>) -> Sat2TriStatus {
    if out.is_null() {
        set_error("null out-parameter");
        return Sat2TriStatus::NullArgument;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            unsafe { ptr::write(out, v) };
            Sat2TriStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            Sat2TriStatus::Panic
        }
    }
}

/// Parse an expression-syntax formula (e.g. `(a | b) & ~c`).
///
/// # Safety
/// `expr` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_formula_parse(
    expr: *const c_char,
    out: *mut *mut Sat2TriFormula,
) -> Sat2TriStatus {
    guard(out, || {
        let text = read_str(expr)?;
        let f = parse_expr(text).map_err(|e| {
            set_error(&e.to_string());
            Sat2TriStatus::ParseError
        })?;
        Ok(Box::into_raw(Box::new(Sat2TriFormula { inner: f })))
    })
}

/// Parse a DIMACS CNF file body.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_formula_parse_dimacs(
    text: *const c_char,
    out: *mut *mut Sat2TriFormula,
) -> Sat2TriStatus {
    guard(out, || {
        let text = read_str(text)?;
        let f = parse_dimacs(text).map_err(|e| {
            set_error(&e.to_string());
            Sat2TriStatus::ParseError
        })?;
        Ok(Box::into_raw(Box::new(Sat2TriFormula { inner: f })))
    })
}

/// Release a formula handle. Null is ignored.
///
/// # Safety
/// `f` must be a pointer previously returned by a parse function, or null.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_formula_free(f: *mut Sat2TriFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// The formula's length |Q| (occurrences plus operators).
///
/// # Safety
/// `f` must be a valid formula handle.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_formula_length(f: *const Sat2TriFormula) -> u64 {
    if f.is_null() {
        return 0;
    }
    (*f).inner.length()
}

/// Brute-force satisfiability. Writes 1 (satisfiable) or 0 to `out`.
///
/// # Safety
/// `f` must be a valid formula handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_formula_satisfiable(
    f: *const Sat2TriFormula,
    out: *mut c_int,
) -> Sat2TriStatus {
    guard(out, || {
        if f.is_null() {
            set_error("null formula");
            return Err(Sat2TriStatus::NullArgument);
        }
        let solutions = brute_force_sat(&(*f).inner).map_err(|e| {
            set_error(&e.to_string());
            Sat2TriStatus::Unsupported
        })?;
        Ok(c_int::from(!solutions.is_empty()))
    })
}

/// Compile the formula in abstract block mode.
///
/// # Safety
/// `f` must be a valid formula handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_compile(
    f: *const Sat2TriFormula,
    out: *mut *mut Sat2TriResult,
) -> Sat2TriStatus {
    guard(out, || {
        if f.is_null() {
            set_error("null formula");
            return Err(Sat2TriStatus::NullArgument);
        }
        let lib = BlockLibrary::abstract_library();
        let result = compile(&(*f).inner, &lib).map_err(|e| {
            set_error(&e.to_string());
            Sat2TriStatus::CompileError
        })?;
        Ok(Box::into_raw(Box::new(Sat2TriResult { inner: result })))
    })
}

/// Release a compilation result. Null is ignored.
///
/// # Safety
/// `r` must be a pointer previously returned by `sat2tri_compile`, or null.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_result_free(r: *mut Sat2TriResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Total tetrahedron count of the compiled manifold.
///
/// # Safety
/// `r` must be a valid result handle.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_result_tet_count(r: *const Sat2TriResult) -> u64 {
    if r.is_null() {
        return 0;
    }
    (*r).inner.certificate.tet_count
}

fn export_string(s: String) -> Result<*mut c_char, Sat2TriStatus> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| {
            set_error("output contained an interior NUL");
            Sat2TriStatus::Unsupported
        })
}

/// The certificate as a JSON string; free with `sat2tri_string_free`.
///
/// # Safety
/// `r` must be a valid result handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_result_certificate_json(
    r: *const Sat2TriResult,
    out: *mut *mut c_char,
) -> Sat2TriStatus {
    guard(out, || {
        if r.is_null() {
            set_error("null result");
            return Err(Sat2TriStatus::NullArgument);
        }
        let json = serde_json::to_string_pretty(&(*r).inner.certificate).map_err(|e| {
            set_error(&e.to_string());
            Sat2TriStatus::Unsupported
        })?;
        export_string(json)
    })
}

/// The gluing table in the `tri` text format; free with `sat2tri_string_free`.
///
/// # Safety
/// `r` must be a valid result handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_result_tri_text(
    r: *const Sat2TriResult,
    out: *mut *mut c_char,
) -> Sat2TriStatus {
    guard(out, || {
        if r.is_null() {
            set_error("null result");
            return Err(Sat2TriStatus::NullArgument);
        }
        export_string(render_tri_text(&(*r).inner.complex.tri))
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be a pointer previously returned through a `char **`
/// out-parameter of this library, or null.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact Farey-graph distance between two slopes given as strings
/// (`p/q`, an integer, or `inf`).
///
/// # Safety
/// `a` and `b` must be valid NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sat2tri_farey_distance(
    a: *const c_char,
    b: *const c_char,
    out: *mut u64,
) -> Sat2TriStatus {
    guard(out, || {
        let sa: Slope = read_str(a)?.parse().map_err(|_| {
            set_error("bad slope literal");
            Sat2TriStatus::ParseError
        })?;
        let sb: Slope = read_str(b)?.parse().map_err(|_| {
            set_error("bad slope literal");
            Sat2TriStatus::ParseError
        })?;
        Ok(farey_distance(&sa, &sb))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn round_trip_through_the_c_abi() {
        unsafe {
            let expr = CString::new("a & ~a").unwrap();
            let mut f: *mut Sat2TriFormula = ptr::null_mut();
            assert_eq!(sat2tri_formula_parse(expr.as_ptr(), &mut f), Sat2TriStatus::Ok);
            assert_eq!(sat2tri_formula_length(f), 4);

            let mut sat: c_int = -1;
            assert_eq!(sat2tri_formula_satisfiable(f, &mut sat), Sat2TriStatus::Ok);
            assert_eq!(sat, 0);

            let mut r: *mut Sat2TriResult = ptr::null_mut();
            assert_eq!(sat2tri_compile(f, &mut r), Sat2TriStatus::Ok);
            assert!(sat2tri_result_tet_count(r) > 0);

            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(sat2tri_result_certificate_json(r, &mut json), Sat2TriStatus::Ok);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"q_len\": 4"));
            sat2tri_string_free(json);

            sat2tri_result_free(r);
            sat2tri_formula_free(f);
        }
    }

    #[test]
    fn errors_set_the_thread_local_message() {
        unsafe {
            let bad = CString::new("a &&& b").unwrap();
            let mut f: *mut Sat2TriFormula = ptr::null_mut();
            assert_eq!(sat2tri_formula_parse(bad.as_ptr(), &mut f), Sat2TriStatus::ParseError);
            let msg = CStr::from_ptr(sat2tri_last_error()).to_str().unwrap();
            assert!(!msg.is_empty());

            let mut d = 0u64;
            let a = CString::new("3/2").unwrap();
            let inf = CString::new("inf").unwrap();
            assert_eq!(sat2tri_farey_distance(a.as_ptr(), inf.as_ptr(), &mut d), Sat2TriStatus::Ok);
            assert_eq!(d, 2);
            assert_eq!(
                sat2tri_farey_distance(a.as_ptr(), ptr::null(), &mut d),
                Sat2TriStatus::NullArgument
            );
        }
    }

    #[test]
    fn null_handles_are_tolerated() {
        unsafe {
            sat2tri_formula_free(ptr::null_mut());
            sat2tri_result_free(ptr::null_mut());
            sat2tri_string_free(ptr::null_mut());
            assert_eq!(sat2tri_formula_length(ptr::null()), 0);
            assert_eq!(sat2tri_result_tet_count(ptr::null()), 0);
            let mut r: *mut Sat2TriResult = ptr::null_mut();
            assert_eq!(sat2tri_compile(ptr::null(), &mut r), Sat2TriStatus::NullArgument);
        }
    }
}

//! C ABI for `cubicjac`.
//!
//! Maps live behind the opaque `CjMap` handle. Every entry point returns a
//! `CjStatus`; on failure `cj_last_error` gives a message for the calling
//! thread. Strings handed out by the library must be released with
//! `cj_string_free`, maps with `cj_map_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cubicjac::algebra::compose_maps;
use cubicjac::cli;
use cubicjac::error::Error;
use cubicjac::jacobian::jacobian_rank;
use cubicjac::keller::{invert_keller, is_keller};
use cubicjac::report::Report;
use cubicjac::text::{format_map, parse_field, parse_map, MapKind, ParsedMap};

/// Result codes. Values 1 to 5 match the command-line exit codes.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CjStatus {
    Ok = 0,
    Io = 1,
    Parse = 2,
    Hypothesis = 3,
    TheoremViolation = 4,
    ResourceCap = 5,
    NullPointer = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

/// A polynomial map together with its coefficient field.
pub struct CjMap {
    parsed: ParsedMap,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CjStatus {
    match e.exit_code() {
        1 => CjStatus::Io,
        2 => CjStatus::Parse,
        4 => CjStatus::TheoremViolation,
        5 => CjStatus::ResourceCap,
        _ => CjStatus::Hypothesis,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CjStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(&format!("null pointer passed as `{name}`"));
            CjStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_error("string argument is not valid UTF-8");
            CjStatus::InvalidUtf8
        }
        Err(_) => {
            set_error("internal panic");
            CjStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

unsafe fn map_arg<'a>(p: *const CjMap, name: &'static str) -> Result<&'a CjMap, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn put<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior nul removed")
        .into_raw()
}

fn report_json(r: &Report) -> String {
    serde_json::to_string(&r.to_json()).expect("serializable")
}

fn boxed(parsed: ParsedMap) -> *mut CjMap {
    Box::into_raw(Box::new(CjMap { parsed }))
}

/// Parse map text. `field` may be null to use the text's own header (or Q).
///
/// # Safety
/// `text` and `field` (when non-null) must be nul-terminated strings and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cj_map_parse(
    text: *const c_char,
    field: *const c_char,
    out: *mut *mut CjMap,
) -> CjStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let field = if field.is_null() {
            None
        } else {
            Some(parse_field(str_arg(field, "field")?)?)
        };
        let parsed = parse_map(text, field.as_ref())?;
        put(out, boxed(parsed), "out")
    })
}

/// Release a map. Null is ignored.
///
/// # Safety
/// `map` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cj_map_free(map: *mut CjMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Write the map in the text format accepted by `cj_map_parse`.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_map_to_text(map: *const CjMap, out: *mut *mut c_char) -> CjStatus {
    guard(|| {
        let m = map_arg(map, "map")?;
        let text = format_map(&m.parsed.map, m.parsed.kind);
        put(out, owned_string(text), "out")
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cj_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Rank of the Jacobian matrix of `H` over the rational function field.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_jacobian_rank(map: *const CjMap, out: *mut usize) -> CjStatus {
    guard(|| {
        let m = map_arg(map, "map")?;
        put(out, jacobian_rank(&m.parsed.h()?), "out")
    })
}

/// Whether `F = x + H` has constant nonzero Jacobian determinant.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_is_keller(map: *const CjMap, out: *mut bool) -> CjStatus {
    guard(|| {
        let m = map_arg(map, "map")?;
        put(out, is_keller(&m.parsed.f()?)?, "out")
    })
}

/// Classification report for a cubic map of Jacobian rank at most two, as
/// JSON.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_classify(map: *const CjMap, out: *mut *mut c_char) -> CjStatus {
    guard(|| {
        let m = map_arg(map, "map")?;
        put(
            out,
            owned_string(report_json(&cli::classify(&m.parsed)?)),
            "out",
        )
    })
}

/// Keller normal form report, as JSON.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_keller_normal_form(
    map: *const CjMap,
    out: *mut *mut c_char,
) -> CjStatus {
    guard(|| {
        let m = map_arg(map, "map")?;
        put(
            out,
            owned_string(report_json(&cli::keller(&m.parsed)?)),
            "out",
        )
    })
}

/// Inverse of the Keller map `F = x + H`. A `degree_bound` of 0 selects
/// `(deg F)^(n-1)`.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_invert(
    map: *const CjMap,
    degree_bound: u32,
    out: *mut *mut CjMap,
) -> CjStatus {
    guard(|| {
        let m = map_arg(map, "map")?;
        let bound = (degree_bound > 0).then_some(degree_bound);
        let g = invert_keller(&m.parsed.f()?, bound)?;
        let parsed = ParsedMap {
            field: m.parsed.field.clone(),
            kind: MapKind::Full,
            map: g,
        };
        put(out, boxed(parsed), "out")
    })
}

/// Elementary decomposition of `F = x + H`, as JSON.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_tame_decompose(
    map: *const CjMap,
    allow_extra_variable: bool,
    out: *mut *mut c_char,
) -> CjStatus {
    guard(|| {
        let m = map_arg(map, "map")?;
        let r = cli::tame(&m.parsed, allow_extra_variable)?;
        put(out, owned_string(report_json(&r)), "out")
    })
}

/// The full map `f(g(x))`.
///
/// # Safety
/// `f` and `g` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cj_compose(
    f: *const CjMap,
    g: *const CjMap,
    out: *mut *mut CjMap,
) -> CjStatus {
    guard(|| {
        let f = map_arg(f, "f")?;
        let g = map_arg(g, "g")?;
        let composed = compose_maps(&f.parsed.f()?, &g.parsed.f()?)?;
        let parsed = ParsedMap {
            field: f.parsed.field.clone(),
            kind: MapKind::Full,
            map: composed,
        };
        put(out, boxed(parsed), "out")
    })
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cj_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cj_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

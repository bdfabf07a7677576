//! C ABI for `divisorial`.
//!
//! Conventions:
//! - Every fallible call returns a [`DvStatus`]; results come back through
//!   out-pointers, which are left untouched on failure.
//! - Objects are opaque handles (`DvScenario`, `DvReport`, `DvPoly`)
//!   released with the matching `dv_*_free`. Freeing NULL is a no-op.
//! - Strings returned to the caller are NUL-terminated, heap-allocated and
//!   must be released with [`dv_string_free`].
//! - After a failure, [`dv_last_error_message`] describes it (per thread).
//!
//! Panics never cross the boundary; they are reported as `DV_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use divisorial::report::{metric_point, render_text, run, to_json, Report};
use divisorial::scenario::{bundled, parse_scenario, Scenario};
use divisorial::symkernel::{parse_poly, poly_gcd, Poly};
use divisorial::Error;
use num_complex::Complex64;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    DegenerateBasis = 4,
    OnDivisor = 5,
    NotFound = 6,
    Invalid = 7,
    Panic = 8,
}

/// A parsed scenario.
pub struct DvScenario(Scenario);

/// The result of running a scenario.
pub struct DvReport(Report);

/// An exact polynomial over ℚ(i).
pub struct DvPoly(Poly);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DvStatus {
    match e {
        Error::Parse { .. } => DvStatus::Parse,
        Error::DegenerateBasis => DvStatus::DegenerateBasis,
        Error::OnDivisor { .. } => DvStatus::OnDivisor,
        _ => DvStatus::Invalid,
    }
}

fn fail(e: Error) -> DvStatus {
    set_error(&e.to_string());
    status_of(&e)
}

/// Run `f`, converting panics into `DvStatus::Panic`.
fn guard(f: impl FnOnce() -> DvStatus) -> DvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            DvStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, DvStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(DvStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        DvStatus::InvalidUtf8
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> DvStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            DvStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            DvStatus::Invalid
        }
    }
}

macro_rules! check_null {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null pointer argument");
            return DvStatus::NullPointer;
        }
    };
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn dv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse scenario text.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_scenario_parse(src: *const c_char, out: *mut *mut DvScenario) -> DvStatus {
    guard(|| {
        check_null!(out);
        let src = match str_arg(src) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_scenario(src) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(DvScenario(s)));
                DvStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Load one of the bundled scenarios by name (`p2_toric`, …).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_scenario_bundled(name: *const c_char, out: *mut *mut DvScenario) -> DvStatus {
    guard(|| {
        check_null!(out);
        let name = match str_arg(name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let Some(src) = bundled(name) else {
            set_error(&format!("no bundled scenario named '{name}'"));
            return DvStatus::NotFound;
        };
        match parse_scenario(src) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(DvScenario(s)));
                DvStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dv_scenario_free(s: *mut DvScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Run every requested analysis. `seed` overrides the scenario's seed when
/// `use_seed` is true.
///
/// # Safety
/// `s` must be a live scenario handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_run(s: *const DvScenario, seed: u64, use_seed: bool, out: *mut *mut DvReport) -> DvStatus {
    guard(|| {
        check_null!(s, out);
        match run(&(*s).0, use_seed.then_some(seed)) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(DvReport(r)));
                DvStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `r` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dv_report_free(r: *mut DvReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// The report as JSON (schema 1). Free with [`dv_string_free`].
///
/// # Safety
/// `r` must be a live report handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_report_json(r: *const DvReport, out: *mut *mut c_char) -> DvStatus {
    guard(|| {
        check_null!(r, out);
        give_string(to_json(&(*r).0), out)
    })
}

/// The human-readable report. Free with [`dv_string_free`].
///
/// # Safety
/// `r` must be a live report handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_report_text(r: *const DvReport, out: *mut *mut c_char) -> DvStatus {
    guard(|| {
        check_null!(r, out);
        give_string(render_text(&(*r).0), out)
    })
}

/// Abelian / subalgebra / Kähler flags. The Kähler flag is -1 when that
/// analysis was not requested.
///
/// # Safety
/// `r` must be a live report handle; the out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn dv_report_verdicts(
    r: *const DvReport,
    abelian: *mut bool,
    subalgebra: *mut bool,
    kahler: *mut i32,
) -> DvStatus {
    guard(|| {
        check_null!(r, abelian, subalgebra, kahler);
        let rep = &(*r).0;
        *abelian = rep.algebra.abelian;
        *subalgebra = rep.algebra.subalgebra;
        *kahler = rep.kahler.as_ref().map_or(-1, |k| k.kahler as i32);
        DvStatus::Ok
    })
}

/// Degree of the divisor, or `DV_STATUS_INVALID` when the divisor analysis
/// was not requested.
///
/// # Safety
/// `r` must be a live report handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_report_divisor_degree(r: *const DvReport, out: *mut u32) -> DvStatus {
    guard(|| {
        check_null!(r, out);
        match &(*r).0.divisor {
            Some(d) => {
                *out = d.divisor.degree;
                DvStatus::Ok
            }
            None => {
                set_error("divisor analysis was not requested");
                DvStatus::Invalid
            }
        }
    })
}

/// Evaluate the metric at a point of the scenario's metric chart. `re` and
/// `im` hold `n` coordinates; `g_re` and `g_im` receive `n*n` entries in
/// row-major order.
///
/// # Safety
/// `s` must be a live scenario handle and the arrays sized as described.
#[no_mangle]
pub unsafe extern "C" fn dv_metric_at(
    s: *const DvScenario,
    re: *const f64,
    im: *const f64,
    n: usize,
    g_re: *mut f64,
    g_im: *mut f64,
) -> DvStatus {
    guard(|| {
        check_null!(s, re, im, g_re, g_im);
        let p: Vec<Complex64> = (0..n).map(|k| Complex64::new(*re.add(k), *im.add(k))).collect();
        match metric_point(&(*s).0, &p) {
            Ok(r) => {
                for (i, row) in r.g.rows().iter().enumerate() {
                    for (j, z) in row.iter().enumerate() {
                        *g_re.add(i * n + j) = z.re;
                        *g_im.add(i * n + j) = z.im;
                    }
                }
                DvStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parse a polynomial in the comma-separated variables `vars` (e.g. "x,y").
///
/// # Safety
/// `src` and `vars` must be NUL-terminated strings; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_poly_parse(src: *const c_char, vars: *const c_char, out: *mut *mut DvPoly) -> DvStatus {
    guard(|| {
        check_null!(out);
        let (src, vars) = match (str_arg(src), str_arg(vars)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let names: Vec<&str> = vars.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
        match parse_poly(src, &names) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(DvPoly(p)));
                DvStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `p` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dv_poly_free(p: *mut DvPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical text of a polynomial. Free with [`dv_string_free`].
///
/// # Safety
/// `p` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_poly_to_string(p: *const DvPoly, out: *mut *mut c_char) -> DvStatus {
    guard(|| {
        check_null!(p, out);
        give_string((*p).0.to_string(), out)
    })
}

/// Product of two polynomials (variables are merged by name).
///
/// # Safety
/// `a`, `b` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_poly_mul(a: *const DvPoly, b: *const DvPoly, out: *mut *mut DvPoly) -> DvStatus {
    guard(|| {
        check_null!(a, b, out);
        *out = Box::into_raw(Box::new(DvPoly((*a).0.mul(&(*b).0))));
        DvStatus::Ok
    })
}

/// Monic greatest common divisor.
///
/// # Safety
/// `a`, `b` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dv_poly_gcd(a: *const DvPoly, b: *const DvPoly, out: *mut *mut DvPoly) -> DvStatus {
    guard(|| {
        check_null!(a, b, out);
        *out = Box::into_raw(Box::new(DvPoly(poly_gcd(&(*a).0, &(*b).0))));
        DvStatus::Ok
    })
}

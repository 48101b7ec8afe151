//! C interface to alg2d.
//!
//! Fields and MSCs are opaque handles. Every call returns an [`Alg2dStatus`];
//! results come back through out-pointers as JSON strings owned by the
//! caller and released with [`alg2d_string_free`]. The message for the most
//! recent failure on the calling thread is available from
//! [`alg2d_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use alg2d::api::{self, ApiError, AutMethod, Input, Report};
use alg2d::errata::Reading;
use alg2d::field::{AnyField, FieldSpec};
use alg2d::text::{parse_msc, render_msc};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alg2dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed field spec, MSC, family name or option.
    Usage = 3,
    /// The computation failed or is out of scope.
    Compute = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alg2dAutMethod {
    Brute = 0,
    Closed = 1,
    Both = 2,
}

/// A validated field specification.
pub struct Alg2dField {
    spec: FieldSpec,
}

/// Structure constants over a field.
pub struct Alg2dMsc {
    spec: FieldSpec,
    text: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: Alg2dStatus, msg: &str) -> Alg2dStatus {
    set_error(msg);
    status
}

fn api_fail(e: ApiError) -> Alg2dStatus {
    let status = match e {
        ApiError::Usage(_) => Alg2dStatus::Usage,
        ApiError::Compute(_) => Alg2dStatus::Compute,
    };
    fail(status, &e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Alg2dStatus> {
    if p.is_null() {
        return Err(fail(Alg2dStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(Alg2dStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn guarded(body: impl FnOnce() -> Alg2dStatus) -> Alg2dStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(_) => fail(Alg2dStatus::Panic, "internal panic"),
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Alg2dStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            Alg2dStatus::Ok
        }
        Err(_) => fail(Alg2dStatus::Compute, "result contains a nul byte"),
    }
}

unsafe fn put_report(out: *mut *mut c_char, r: Result<Report, ApiError>) -> Alg2dStatus {
    match r {
        Ok(r) => put_string(out, r.json.to_string()),
        Err(e) => api_fail(e),
    }
}

fn reading(verbatim_a10: bool) -> Reading {
    if verbatim_a10 {
        Reading::verbatim([alg2d::errata::Erratum::A10ThirdFamilyEntry])
    } else {
        Reading::corrected()
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn alg2d_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned through an out-pointer. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn alg2d_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a field spec such as "q:7", "q:9" or "rational".
///
/// # Safety
/// `spec` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn alg2d_field_new(spec: *const c_char, out: *mut *mut Alg2dField) -> Alg2dStatus {
    guarded(|| {
        if out.is_null() {
            return fail(Alg2dStatus::NullPointer, "null out pointer");
        }
        let s = match read_str(spec) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match s.parse::<FieldSpec>() {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(Alg2dField { spec }));
                Alg2dStatus::Ok
            }
            Err(e) => fail(Alg2dStatus::Usage, &format!("field {s:?}: {e}")),
        }
    })
}

/// # Safety
/// `field` must come from [`alg2d_field_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn alg2d_field_free(field: *mut Alg2dField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Field order, or 0 for the rationals.
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn alg2d_field_order(field: *const Alg2dField) -> u64 {
    field.as_ref().and_then(|f| f.spec.size()).unwrap_or(0)
}

/// Parses "a1,a2,a3,a4;b1,b2,b3,b4" over `field`.
///
/// # Safety
/// `field` must be a live handle, `text` nul-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_msc_parse(
    field: *const Alg2dField,
    text: *const c_char,
    out: *mut *mut Alg2dMsc,
) -> Alg2dStatus {
    guarded(|| {
        let (Some(field), false) = (field.as_ref(), out.is_null()) else {
            return fail(Alg2dStatus::NullPointer, "null handle or out pointer");
        };
        let t = match read_str(text) {
            Ok(t) => t,
            Err(st) => return st,
        };
        let rendered = match field.spec.build() {
            AnyField::Finite(f) => parse_msc(&f, t).map(|a| render_msc(&f, &a)),
            AnyField::Rational(f) => parse_msc(&f, t).map(|a| render_msc(&f, &a)),
        };
        match rendered {
            Ok(text) => {
                *out = Box::into_raw(Box::new(Alg2dMsc {
                    spec: field.spec.clone(),
                    text,
                }));
                Alg2dStatus::Ok
            }
            Err(e) => fail(Alg2dStatus::Usage, &format!("msc {t:?}: {e}")),
        }
    })
}

/// # Safety
/// `msc` must come from [`alg2d_msc_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn alg2d_msc_free(msc: *mut Alg2dMsc) {
    if !msc.is_null() {
        drop(Box::from_raw(msc));
    }
}

/// Canonical text of an MSC.
///
/// # Safety
/// `msc` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_msc_render(msc: *const Alg2dMsc, out: *mut *mut c_char) -> Alg2dStatus {
    guarded(|| match (msc.as_ref(), out.is_null()) {
        (Some(m), false) => put_string(out, m.text.clone()),
        _ => fail(Alg2dStatus::NullPointer, "null handle or out pointer"),
    })
}

/// Derivation algebra as JSON `{dimension, basis, source, ...}`.
///
/// # Safety
/// `msc` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_der(msc: *const Alg2dMsc, out: *mut *mut c_char) -> Alg2dStatus {
    guarded(|| match (msc.as_ref(), out.is_null()) {
        (Some(m), false) => put_report(
            out,
            api::der(&m.spec.to_string(), Input::Msc(&m.text), None, &Reading::corrected()),
        ),
        _ => fail(Alg2dStatus::NullPointer, "null handle or out pointer"),
    })
}

/// Exhaustive automorphism group as JSON `{order, elements, filter_used, ...}`.
///
/// # Safety
/// `msc` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_aut(msc: *const Alg2dMsc, out: *mut *mut c_char) -> Alg2dStatus {
    guarded(|| match (msc.as_ref(), out.is_null()) {
        (Some(m), false) => put_report(
            out,
            api::aut(&m.spec.to_string(), Input::Msc(&m.text), AutMethod::Brute, &Reading::corrected()),
        ),
        _ => fail(Alg2dStatus::NullPointer, "null handle or out pointer"),
    })
}

/// Derivations of a canonical family ("A3@c=1,0,2") from the closed form.
/// A nonzero `verbatim_a10` reads the A10 third-family entry as printed.
///
/// # Safety
/// `field` must be a live handle, `family` nul-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_family_der(
    field: *const Alg2dField,
    family: *const c_char,
    verbatim_a10: i32,
    out: *mut *mut c_char,
) -> Alg2dStatus {
    guarded(|| {
        let (Some(field), false) = (field.as_ref(), out.is_null()) else {
            return fail(Alg2dStatus::NullPointer, "null handle or out pointer");
        };
        let name = match read_str(family) {
            Ok(s) => s,
            Err(st) => return st,
        };
        put_report(
            out,
            api::der(&field.spec.to_string(), Input::Family(name), None, &reading(verbatim_a10 != 0)),
        )
    })
}

/// Automorphisms of a canonical family. With [`Alg2dAutMethod::Both`] the
/// JSON carries `agree`.
///
/// # Safety
/// `field` must be a live handle, `family` nul-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_family_aut(
    field: *const Alg2dField,
    family: *const c_char,
    method: Alg2dAutMethod,
    verbatim_a10: i32,
    out: *mut *mut c_char,
) -> Alg2dStatus {
    guarded(|| {
        let (Some(field), false) = (field.as_ref(), out.is_null()) else {
            return fail(Alg2dStatus::NullPointer, "null handle or out pointer");
        };
        let name = match read_str(family) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let method = match method {
            Alg2dAutMethod::Brute => AutMethod::Brute,
            Alg2dAutMethod::Closed => AutMethod::Closed,
            Alg2dAutMethod::Both => AutMethod::Both,
        };
        put_report(
            out,
            api::aut(&field.spec.to_string(), Input::Family(name), method, &reading(verbatim_a10 != 0)),
        )
    })
}

/// Isomorphism test; JSON `{isomorphic, witness}`.
///
/// # Safety
/// Both handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_iso(a: *const Alg2dMsc, b: *const Alg2dMsc, out: *mut *mut c_char) -> Alg2dStatus {
    guarded(|| {
        let (Some(a), Some(b), false) = (a.as_ref(), b.as_ref(), out.is_null()) else {
            return fail(Alg2dStatus::NullPointer, "null handle or out pointer");
        };
        if a.spec != b.spec {
            return fail(Alg2dStatus::Usage, "the two MSCs are over different fields");
        }
        put_report(out, api::iso(&a.spec.to_string(), &a.text, &b.text))
    })
}

/// Canonical class; JSON `{class, family, witness, ...}`.
///
/// # Safety
/// `msc` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_classify(msc: *const Alg2dMsc, out: *mut *mut c_char) -> Alg2dStatus {
    guarded(|| match (msc.as_ref(), out.is_null()) {
        (Some(m), false) => put_report(out, api::classify(&m.spec.to_string(), &m.text)),
        _ => fail(Alg2dStatus::NullPointer, "null handle or out pointer"),
    })
}

/// Table verification report as JSON. `fields` may be null for the
/// regime's default fields.
///
/// # Safety
/// `regime` must be nul-terminated, `fields` nul-terminated or null, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn alg2d_verify_table(
    regime: *const c_char,
    fields: *const c_char,
    budget: u32,
    out: *mut *mut c_char,
) -> Alg2dStatus {
    guarded(|| {
        if out.is_null() {
            return fail(Alg2dStatus::NullPointer, "null out pointer");
        }
        let regime = match read_str(regime) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let fields = if fields.is_null() {
            None
        } else {
            match read_str(fields) {
                Ok(s) => Some(s),
                Err(st) => return st,
            }
        };
        match api::verify_table(regime, fields, budget as usize, Reading::corrected()) {
            Ok(r) => put_string(out, serde_json_string(&r)),
            Err(e) => api_fail(e),
        }
    })
}

fn serde_json_string(r: &alg2d::verify::VerificationReport) -> String {
    serde_json::to_string(r).expect("serializable")
}

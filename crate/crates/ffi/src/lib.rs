//! C ABI for the isoprof toolkit.
//!
//! Conventions:
//! - Objects are created behind opaque pointers and released with the
//!   matching `_free` function. A `_free` on NULL is a no-op.
//! - Every fallible call returns an `int` status: 0 success, 1 domain or
//!   config error, 2 numerical failure, 3 NULL or otherwise invalid argument.
//! - On failure the thread-local message from `isoprof_last_error` describes
//!   the problem; it stays valid until the next failing call on that thread.

use isoprof::bounds;
use isoprof::potential::Potential;
use isoprof::profile::{ProfileFn, ProfileKind};
use isoprof::radial::RadialMeasure;
use isoprof::witness;
use isoprof::{Error, QuadraturePlan};
use std::cell::RefCell;
use std::ffi::CString;
use std::os::raw::{c_char, c_double, c_int, c_uint};

pub const ISOPROF_OK: c_int = 0;
pub const ISOPROF_ERR_DOMAIN: c_int = 1;
pub const ISOPROF_ERR_NUMERIC: c_int = 2;
pub const ISOPROF_ERR_INVALID: c_int = 3;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_for(e: &Error) -> c_int {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::UnboundedInverse(_) => ISOPROF_ERR_DOMAIN,
        _ => ISOPROF_ERR_NUMERIC,
    }
}

fn fail(e: Error) -> c_int {
    set_error(&e.to_string());
    code_for(&e)
}

fn invalid(msg: &str) -> c_int {
    set_error(msg);
    ISOPROF_ERR_INVALID
}

/// Opaque potential handle.
pub struct IsoprofPotential {
    inner: Potential,
}

/// Opaque radial-measure handle.
pub struct IsoprofRadial {
    inner: RadialMeasure,
}

/// Message of the last failing call on this thread, as a NUL-terminated
/// string. Valid until the next failing call on the same thread. Never NULL.
#[no_mangle]
pub extern "C" fn isoprof_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create the power potential `phi(x) = (lambda x)^alpha`. Requires
/// `alpha >= 1` and `lambda > 0`.
#[no_mangle]
pub extern "C" fn isoprof_potential_power(
    alpha: c_double,
    lambda: c_double,
    out: *mut *mut IsoprofPotential,
) -> c_int {
    if out.is_null() {
        return invalid("out pointer is NULL");
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return invalid("alpha must be finite and >= 1");
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid("lambda must be finite and > 0");
    }
    let p = Potential::power_scaled(alpha, lambda);
    unsafe { *out = Box::into_raw(Box::new(IsoprofPotential { inner: p })) };
    ISOPROF_OK
}

/// Release a potential handle.
#[no_mangle]
pub extern "C" fn isoprof_potential_free(p: *mut IsoprofPotential) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Evaluate `phi(x)`.
#[no_mangle]
pub extern "C" fn isoprof_potential_eval(
    p: *const IsoprofPotential,
    x: c_double,
    out: *mut c_double,
) -> c_int {
    if p.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    match unsafe { &(*p).inner }.eval(x) {
        Ok(v) => {
            unsafe { *out = v };
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

/// Evaluate `phi^{-1}(y)` for `y >= 0`.
#[no_mangle]
pub extern "C" fn isoprof_potential_inverse(
    p: *const IsoprofPotential,
    y: c_double,
    out: *mut c_double,
) -> c_int {
    if p.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    match unsafe { &(*p).inner }.inverse(y) {
        Ok(v) => {
            unsafe { *out = v };
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

/// Normalize the radial measure in dimension `n >= 1` for the potential.
/// The potential handle stays owned by the caller.
#[no_mangle]
pub extern "C" fn isoprof_radial_new(
    n: c_uint,
    p: *const IsoprofPotential,
    out: *mut *mut IsoprofRadial,
) -> c_int {
    if p.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    let pot = unsafe { &(*p).inner }.clone();
    match RadialMeasure::normalize(n, pot, QuadraturePlan::default()) {
        Ok(m) => {
            unsafe { *out = Box::into_raw(Box::new(IsoprofRadial { inner: m })) };
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

/// Release a radial-measure handle.
#[no_mangle]
pub extern "C" fn isoprof_radial_free(m: *mut IsoprofRadial) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Mode of the radial density.
#[no_mangle]
pub extern "C" fn isoprof_radial_mode(m: *const IsoprofRadial, out: *mut c_double) -> c_int {
    if m.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    unsafe { *out = (*m).inner.mode() };
    ISOPROF_OK
}

/// Tail mass `nu{(r, inf)}` for `r > 0`.
#[no_mangle]
pub extern "C" fn isoprof_radial_tail(
    m: *const IsoprofRadial,
    r: c_double,
    out: *mut c_double,
) -> c_int {
    if m.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    match unsafe { &(*m).inner }.tail(r) {
        Ok(v) => {
            unsafe { *out = v };
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

/// Quantile: the radius with CDF mass `a`, for `a` in (0, 1).
#[no_mangle]
pub extern "C" fn isoprof_radial_quantile(
    m: *const IsoprofRadial,
    a: c_double,
    out: *mut c_double,
) -> c_int {
    if m.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    match unsafe { &(*m).inner }.quantile(a) {
        Ok(v) => {
            unsafe { *out = v };
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

/// One-dimensional comparison profile `I_phi(a)`.
#[no_mangle]
pub extern "C" fn isoprof_profile_iphi(
    p: *const IsoprofPotential,
    a: c_double,
    out: *mut c_double,
) -> c_int {
    if p.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    let pot = unsafe { &(*p).inner }.clone();
    let r = ProfileFn::new(ProfileKind::IPhi(pot), QuadraturePlan::default())
        .and_then(|f| f.eval(a));
    match r {
        Ok(v) => {
            unsafe { *out = v };
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

/// Certified lower bound on the isoperimetric profile of the full measure at
/// mass `a`. `out_valid` receives 1 when every validity condition of the
/// certificate passed, 0 otherwise; the bound value is only meaningful when
/// the certificate is valid.
#[no_mangle]
pub extern "C" fn isoprof_bound_theorem(
    n: c_uint,
    p: *const IsoprofPotential,
    a: c_double,
    out_value: *mut c_double,
    out_valid: *mut c_int,
) -> c_int {
    if p.is_null() || out_value.is_null() || out_valid.is_null() {
        return invalid("NULL argument");
    }
    let pot = unsafe { &(*p).inner };
    let ledger = isoprof::ConstantsLedger::default();
    match bounds::theorem_muphi(n, pot, a, &ledger, QuadraturePlan::default()) {
        Ok(cert) => {
            unsafe {
                *out_value = cert.value;
                *out_valid = cert.valid() as c_int;
            }
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

/// Witness upper bound on the same profile: min of the ball and half-space
/// boundary measures at mass `a`.
#[no_mangle]
pub extern "C" fn isoprof_witness_upper_bound(
    n: c_uint,
    p: *const IsoprofPotential,
    a: c_double,
    out: *mut c_double,
) -> c_int {
    if p.is_null() || out.is_null() {
        return invalid("NULL argument");
    }
    let pot = unsafe { &(*p).inner };
    match witness::upper_bound(n, pot, a, QuadraturePlan::default()) {
        Ok(v) => {
            unsafe { *out = v };
            ISOPROF_OK
        }
        Err(e) => fail(e),
    }
}

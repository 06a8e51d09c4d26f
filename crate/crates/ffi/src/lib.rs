//! C interface to `kronrec`.
//!
//! Polynomials live behind an opaque [`KrPolynomial`] handle. Every entry
//! point returns a [`KrStatus`]; on failure [`kr_last_error_message`] gives a
//! description valid until the next call on the same thread. Strings handed
//! out by the library are released with [`kr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kronrec::density::{certify_non_density, epsilon_bound};
use kronrec::lattice_structure::{canonical_basis_m, integral_basis, PivotRule};
use kronrec::poly_core::{mahler_measure, parse_polynomial, IntPolynomial, MahlerVariant};
use kronrec::toeplitz::{trench_det, LaurentSymbol};
use kronrec::Error;

/// Opaque polynomial with integer coefficients.
pub struct KrPolynomial(IntPolynomial);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidPolynomial = 2,
    InvalidArgument = 3,
    DomainError = 4,
    NumericFailure = 5,
    Utf8 = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrMahlerVariant {
    Plain = 0,
    HalfScaled = 1,
    DoubleScaled = 2,
    Conjugate = 3,
}

/// Lower and upper ends of each certified bound.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KrEpsilonBound {
    pub half_scaled_lo: f64,
    pub half_scaled_hi: f64,
    pub double_scaled_lo: f64,
    pub double_scaled_hi: f64,
    pub stated_lo: f64,
    pub stated_hi: f64,
    pub refined_lo: f64,
    pub refined_hi: f64,
    pub coarse_lo: f64,
    pub coarse_hi: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KrStatus {
    match e {
        Error::Parse(_) => KrStatus::InvalidPolynomial,
        Error::InvalidArgument(_) => KrStatus::InvalidArgument,
        Error::PrecisionExhausted { .. } | Error::Numeric(_) => KrStatus::NumericFailure,
        _ => KrStatus::DomainError,
    }
}

struct Fail(KrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(KrStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KrStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            KrStatus::Panic
        }
    }
}

unsafe fn handle<'a>(p: *const KrPolynomial) -> Result<&'a IntPolynomial, Fail> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null("polynomial handle"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(KrStatus::Utf8, "string contains an interior NUL".into()))
}

/// Parses comma-separated coefficients, constant term first (`"-2,1"` is `x - 2`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kr_polynomial_parse(text: *const c_char, result: *mut *mut KrPolynomial) -> KrStatus {
    guard(|| {
        let slot = out(result, "output pointer")?;
        *slot = ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| Fail(KrStatus::Utf8, e.to_string()))?;
        *slot = Box::into_raw(Box::new(KrPolynomial(parse_polynomial(s)?)));
        Ok(())
    })
}

/// Builds a polynomial from `len` coefficients, constant term first.
///
/// # Safety
/// `coeffs` must point to `len` readable values and `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kr_polynomial_from_coeffs(
    coeffs: *const i64,
    len: usize,
    result: *mut *mut KrPolynomial,
) -> KrStatus {
    guard(|| {
        let slot = out(result, "output pointer")?;
        *slot = ptr::null_mut();
        if coeffs.is_null() {
            return Err(null("coefficients"));
        }
        let c = std::slice::from_raw_parts(coeffs, len);
        *slot = Box::into_raw(Box::new(KrPolynomial(IntPolynomial::from_i64(c)?)));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kr_polynomial_free(p: *mut KrPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kr_polynomial_degree(p: *const KrPolynomial, degree: *mut usize) -> KrStatus {
    guard(|| {
        *out(degree, "degree")? = handle(p)?.degree();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kr_mahler_measure(
    p: *const KrPolynomial,
    variant: KrMahlerVariant,
    value: *mut f64,
    error: *mut f64,
) -> KrStatus {
    guard(|| {
        let v = match variant {
            KrMahlerVariant::Plain => MahlerVariant::Plain,
            KrMahlerVariant::HalfScaled => MahlerVariant::HalfScaled,
            KrMahlerVariant::DoubleScaled => MahlerVariant::DoubleScaled,
            KrMahlerVariant::Conjugate => MahlerVariant::Conjugate,
        };
        let (value, error) = (out(value, "value")?, out(error, "error")?);
        let m = mahler_measure(handle(p)?, v)?;
        *value = m.value;
        *error = m.error;
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kr_epsilon_bound(p: *const KrPolynomial, bound: *mut KrEpsilonBound) -> KrStatus {
    guard(|| {
        let slot = out(bound, "bound")?;
        let b = epsilon_bound(handle(p)?)?;
        *slot = KrEpsilonBound {
            half_scaled_lo: b.eps_half_scaled.lo,
            half_scaled_hi: b.eps_half_scaled.hi,
            double_scaled_lo: b.eps_double_scaled.lo,
            double_scaled_hi: b.eps_double_scaled.hi,
            stated_lo: b.eps_stated.lo,
            stated_hi: b.eps_stated.hi,
            refined_lo: b.eps_refined.lo,
            refined_hi: b.eps_refined.hi,
            coarse_lo: b.eps_coarse.lo,
            coarse_hi: b.eps_coarse.hi,
        };
        Ok(())
    })
}

/// Sets `certified` when the volume bound proves the subgroup is not
/// `eps`-dense in the `m`-torus.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kr_certify_non_density(
    p: *const KrPolynomial,
    m: usize,
    eps: f64,
    volume_bound: *mut f64,
    certified: *mut bool,
) -> KrStatus {
    guard(|| {
        let (vb, cert) = (out(volume_bound, "volume_bound")?, out(certified, "certified")?);
        let c = certify_non_density(handle(p)?, m, eps)?;
        *vb = c.volume_bound;
        *cert = c.certified;
        Ok(())
    })
}

/// Index of the integral recurrences of length `m` in the rational ones,
/// as a decimal string.
///
/// # Safety
/// Pointers must be valid; free the string with [`kr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn kr_lattice_index(p: *const KrPolynomial, m: usize, index: *mut *mut c_char) -> KrStatus {
    guard(|| {
        let slot = out(index, "index")?;
        *slot = ptr::null_mut();
        *slot = into_c_string(integral_basis(handle(p)?, m)?.index.to_string())?;
        Ok(())
    })
}

/// Canonical `p`-adic basis as JSON; rationals are `"p/q"` strings.
/// `positive_pivot` selects the first strictly positive slope as pivot.
///
/// # Safety
/// Pointers must be valid; free the string with [`kr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn kr_canonical_basis_json(
    p: *const KrPolynomial,
    prime: u64,
    m: usize,
    positive_pivot: bool,
    json: *mut *mut c_char,
) -> KrStatus {
    guard(|| {
        let slot = out(json, "json")?;
        *slot = ptr::null_mut();
        let rule = if positive_pivot { PivotRule::Positive } else { PivotRule::NonNegative };
        let b = canonical_basis_m(handle(p)?, prime, m, rule)?;
        let text = serde_json::to_string(&b).map_err(|e| Fail(KrStatus::DomainError, e.to_string()))?;
        *slot = into_c_string(text)?;
        Ok(())
    })
}

/// Determinant of the `n x n` Toeplitz matrix of the integer symbol
/// `coeffs[0] x^{-r} + ... + coeffs[len-1] x^{len-1-r}`.
///
/// # Safety
/// `coeffs` must point to `len` values and `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kr_trench_det(
    coeffs: *const i64,
    len: usize,
    r: usize,
    n: usize,
    value: *mut f64,
) -> KrStatus {
    guard(|| {
        let slot = out(value, "value")?;
        if coeffs.is_null() {
            return Err(null("coefficients"));
        }
        let c = std::slice::from_raw_parts(coeffs, len);
        let sym = LaurentSymbol::from_i64(r, c)?;
        *slot = trench_det(&sym, n)?.value;
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn kr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread; empty after success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn kr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

//! C ABI for the subhyp library. Domains are opaque handles created from
//! JSON or the built-in catalog; every fallible call returns a status code
//! and the last error message is retrievable per thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use subhyp::certify::{self, CertifyParams};
use subhyp::geometry::{Norm, PlanarDomain, Point};
use subhyp::metric;

/// Opaque planar domain handle.
pub struct SubhypDomain {
    inner: PlanarDomain,
}

/// Status codes returned by the fallible entry points.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SubhypStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    InvalidDomain = 3,
    PointOutsideDomain = 4,
    Disconnected = 5,
    NumericFailure = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &subhyp::Error) -> SubhypStatus {
    use subhyp::Error as E;
    set_error(&err.to_string());
    match err {
        E::InvalidDomain(_) => SubhypStatus::InvalidDomain,
        E::InvalidParameter(_) | E::BadExponent(_) => SubhypStatus::InvalidArgument,
        E::PointOutsideDomain { .. } => SubhypStatus::PointOutsideDomain,
        E::Disconnected => SubhypStatus::Disconnected,
        _ => SubhypStatus::NumericFailure,
    }
}

fn guarded<F: FnOnce() -> SubhypStatus>(f: F) -> SubhypStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            SubhypStatus::Panic
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn subhyp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the last error message on this thread into `buf` (truncated to
/// `len − 1` bytes, always NUL-terminated). Returns the full message length.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be NULL (then only the
/// required length is returned).
#[no_mangle]
pub unsafe extern "C" fn subhyp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parse a domain from its JSON encoding
/// `{"name": ..., "outer": [[x,y],...], "holes": [...]}`.
/// Returns NULL on failure (see `subhyp_last_error_message`).
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn subhyp_domain_from_json(json: *const c_char) -> *mut SubhypDomain {
    let Some(text) = cstr(json) else {
        set_error("json pointer is NULL or not UTF-8");
        return std::ptr::null_mut();
    };
    let parsed: Result<subhyp::geometry::DomainFile, _> = serde_json_from_str(text);
    let file = match parsed {
        Ok(f) => f,
        Err(msg) => {
            set_error(&msg);
            return std::ptr::null_mut();
        }
    };
    match PlanarDomain::from_file(file) {
        Ok(inner) => Box::into_raw(Box::new(SubhypDomain { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

// serde_json is consumed through the main crate to keep a single version
fn serde_json_from_str(text: &str) -> Result<subhyp::geometry::DomainFile, String> {
    subhyp::geometry::domain_file_from_json(text).map_err(|e| e.to_string())
}

/// Build a catalog domain by name ("square", "disk-256", "annulus",
/// "inward-cusp-2", "exterior-cusp-2", "rooms-and-corridors").
///
/// # Safety
/// `name` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn subhyp_domain_from_catalog(name: *const c_char) -> *mut SubhypDomain {
    let Some(name) = cstr(name) else {
        set_error("name pointer is NULL or not UTF-8");
        return std::ptr::null_mut();
    };
    match subhyp::catalog::get(name) {
        Ok(inner) => Box::into_raw(Box::new(SubhypDomain { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Release a domain handle. NULL is accepted.
///
/// # Safety
/// `domain` must have been returned by one of the constructors and not freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn subhyp_domain_free(domain: *mut SubhypDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Membership in the open set: 1 inside, 0 outside or on the boundary,
/// −1 when the handle is NULL.
///
/// # Safety
/// `domain` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn subhyp_domain_contains(
    domain: *const SubhypDomain,
    x: f64,
    y: f64,
) -> i32 {
    let Some(d) = domain.as_ref() else {
        return -1;
    };
    d.inner.contains(Point::new(x, y)) as i32
}

/// Exact boundary distance of an interior point. `uniform_norm` selects the
/// max-norm (nonzero) or the Euclidean norm (zero).
///
/// # Safety
/// `domain` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn subhyp_boundary_distance(
    domain: *const SubhypDomain,
    x: f64,
    y: f64,
    uniform_norm: i32,
    out: *mut f64,
) -> SubhypStatus {
    let (Some(d), false) = (domain.as_ref(), out.is_null()) else {
        set_error("NULL handle or output pointer");
        return SubhypStatus::NullArgument;
    };
    guarded(|| {
        let norm = if uniform_norm != 0 { Norm::Uniform } else { Norm::Euclidean };
        match d.inner.boundary_distance(Point::new(x, y), norm) {
            Ok(v) => {
                *out = v;
                SubhypStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Subhyperbolic distance estimate between two interior points: an upper
/// bound with the last refinement delta reported as the gap.
///
/// # Safety
/// `domain` must be a live handle; `out_value` and `out_gap` must point to
/// writable f64 slots (out_gap may be NULL).
#[no_mangle]
pub unsafe extern "C" fn subhyp_distance(
    domain: *const SubhypDomain,
    alpha: f64,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    h: f64,
    tol: f64,
    out_value: *mut f64,
    out_gap: *mut f64,
) -> SubhypStatus {
    let (Some(d), false) = (domain.as_ref(), out_value.is_null()) else {
        set_error("NULL handle or output pointer");
        return SubhypStatus::NullArgument;
    };
    guarded(|| {
        let h = if h > 0.0 { h } else { d.inner.diam(Norm::Euclidean) / 64.0 };
        let tol = if tol > 0.0 { tol } else { 0.01 };
        match metric::subhyp_distance(&d.inner, alpha, Point::new(x0, y0), Point::new(x1, y1), h, tol)
        {
            Ok(res) => {
                *out_value = res.value;
                if !out_gap.is_null() {
                    *out_gap = res.gap;
                }
                SubhypStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Sobolev extension verdict for W^1_p at the metric criterion's exponent:
/// writes 0 (extension domain), 1 (not an extension domain) or
/// 2 (inconclusive) into `out_verdict`.
///
/// # Safety
/// `domain` must be a live handle; `out_verdict` must point to a writable
/// i32.
#[no_mangle]
pub unsafe extern "C" fn subhyp_classify_extension(
    domain: *const SubhypDomain,
    p: f64,
    budget: u32,
    seed: u64,
    out_verdict: *mut i32,
) -> SubhypStatus {
    let (Some(d), false) = (domain.as_ref(), out_verdict.is_null()) else {
        set_error("NULL handle or output pointer");
        return SubhypStatus::NullArgument;
    };
    guarded(|| {
        let alpha = match certify::alpha_from_p(p, 2) {
            Ok(a) => a,
            Err(e) => return status_of(&e),
        };
        let mut params = CertifyParams::new(&d.inner, alpha);
        params.budget = if budget == 0 { 120 } else { budget as usize };
        params.seed = seed;
        match certify::classify_extension(&d.inner, p, 2, &params) {
            Ok(rep) => {
                *out_verdict = rep.verdict.exit_code();
                SubhypStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_handle() -> *mut SubhypDomain {
        let name = CString::new("square").unwrap();
        unsafe { subhyp_domain_from_catalog(name.as_ptr()) }
    }

    #[test]
    fn catalog_roundtrip_and_contains() {
        let dom = square_handle();
        assert!(!dom.is_null());
        unsafe {
            assert_eq!(subhyp_domain_contains(dom, 0.5, 0.5), 1);
            assert_eq!(subhyp_domain_contains(dom, 0.0, 0.5), 0);
            assert_eq!(subhyp_domain_contains(std::ptr::null(), 0.5, 0.5), -1);
            subhyp_domain_free(dom);
        }
    }

    #[test]
    fn json_domain_and_distance() {
        let json = CString::new(
            r#"{"name":"tri-box","outer":[[0.0,0.0],[2.0,0.0],[2.0,1.0],[0.0,1.0]],"holes":[]}"#,
        )
        .unwrap();
        unsafe {
            let dom = subhyp_domain_from_json(json.as_ptr());
            assert!(!dom.is_null());
            let mut d = 0.0;
            let st = subhyp_boundary_distance(dom, 1.0, 0.5, 0, &mut d);
            assert_eq!(st, SubhypStatus::Ok);
            assert!((d - 0.5).abs() < 1e-12);
            let st = subhyp_boundary_distance(dom, -1.0, 0.5, 0, &mut d);
            assert_eq!(st, SubhypStatus::PointOutsideDomain);
            let mut buf = vec![0i8; 128];
            let n = subhyp_last_error_message(buf.as_mut_ptr() as *mut c_char, buf.len());
            assert!(n > 0);
            subhyp_domain_free(dom);
        }
    }

    #[test]
    fn bad_json_sets_error() {
        let json = CString::new("{not json").unwrap();
        unsafe {
            let dom = subhyp_domain_from_json(json.as_ptr());
            assert!(dom.is_null());
            let mut buf = vec![0i8; 256];
            let n = subhyp_last_error_message(buf.as_mut_ptr() as *mut c_char, buf.len());
            assert!(n > 0);
        }
    }

    #[test]
    fn metric_through_the_abi() {
        let dom = square_handle();
        unsafe {
            let mut value = 0.0;
            let mut gap = 0.0;
            let st = subhyp_distance(dom, 1.0, 0.2, 0.2, 0.7, 0.2, 0.0, 0.01, &mut value, &mut gap);
            assert_eq!(st, SubhypStatus::Ok);
            assert!((value - 0.5).abs() < 0.005, "value {value}");
            assert!(gap >= 0.0);
            // outside endpoint reports the right status
            let st = subhyp_distance(dom, 1.0, -2.0, 0.2, 0.7, 0.2, 0.0, 0.01, &mut value, &mut gap);
            assert_eq!(st, SubhypStatus::PointOutsideDomain);
            subhyp_domain_free(dom);
        }
    }

    #[test]
    fn version_is_nul_terminated() {
        unsafe {
            let v = CStr::from_ptr(subhyp_version());
            assert!(!v.to_str().unwrap().is_empty());
        }
    }
}

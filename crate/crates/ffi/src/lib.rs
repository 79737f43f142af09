//! C interface to `renorm-julia`.
//!
//! Every entry point returns an `int32_t` status (`RJ_OK` or a negative
//! `RJ_ERR_*` code) and writes results through out-pointers. A map is an
//! opaque `RjMap` obtained from [`rj_map_new`] and released with
//! [`rj_map_free`]. Panics never cross the boundary; they surface as
//! `RJ_ERR_PANIC`. The message of the most recent failure on the calling
//! thread is available through [`rj_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use renorm_julia::boettcher::{self, GeodesicSpec, Potential};
use renorm_julia::free_energy::{self, TruncationPolicy};
use renorm_julia::{map, thermo, Error, MapParams, SpherePoint};

pub const RJ_OK: i32 = 0;
pub const RJ_ERR_NULL: i32 = -1;
pub const RJ_ERR_INVALID_PARAMETER: i32 = -2;
pub const RJ_ERR_POLE: i32 = -3;
pub const RJ_ERR_DOMAIN: i32 = -4;
pub const RJ_ERR_BRANCH_AMBIGUITY: i32 = -5;
pub const RJ_ERR_NON_CONVERGENCE: i32 = -6;
pub const RJ_ERR_TRUNCATION: i32 = -7;
pub const RJ_ERR_UNDECIDED: i32 = -8;
pub const RJ_ERR_NON_CONTRACTION: i32 = -9;
pub const RJ_ERR_RESONANCE: i32 = -10;
pub const RJ_ERR_UNSUPPORTED_ORDER: i32 = -11;
pub const RJ_ERR_SIZE_GUARD: i32 = -12;
pub const RJ_ERR_BUFFER_TOO_SMALL: i32 = -13;
pub const RJ_ERR_PANIC: i32 = -99;

/// Potential kinds written by [`rj_green_potential`].
pub const RJ_POTENTIAL_BASIN: i32 = 0;
pub const RJ_POTENTIAL_CENTER: i32 = 1;
pub const RJ_POTENTIAL_OUTSIDE: i32 = 2;

/// Opaque map handle.
pub struct RjMap {
    params: MapParams,
    policy: TruncationPolicy,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Pole(_) => RJ_ERR_POLE,
        Error::Domain(_) => RJ_ERR_DOMAIN,
        Error::BranchAmbiguity(_) => RJ_ERR_BRANCH_AMBIGUITY,
        Error::NonConvergence { .. } => RJ_ERR_NON_CONVERGENCE,
        Error::TruncationFailure { .. } => RJ_ERR_TRUNCATION,
        Error::Undecided(_) => RJ_ERR_UNDECIDED,
        Error::NonContraction(_) => RJ_ERR_NON_CONTRACTION,
        Error::NearIntegerResonance(_) => RJ_ERR_RESONANCE,
        Error::UnsupportedOrder(_) => RJ_ERR_UNSUPPORTED_ORDER,
        Error::SizeGuard(_) => RJ_ERR_SIZE_GUARD,
        Error::InvalidParameter(_) => RJ_ERR_INVALID_PARAMETER,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
    Buffer(usize),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RJ_OK,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            RJ_ERR_NULL
        }
        Ok(Err(Fail::Core(e))) => {
            set_last_error(e.to_string());
            code_of(&e)
        }
        Ok(Err(Fail::Buffer(need))) => {
            set_last_error(format!("output buffer needs {need} doubles"));
            RJ_ERR_BUFFER_TOO_SMALL
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RJ_ERR_PANIC
        }
    }
}

unsafe fn handle<'a>(m: *const RjMap) -> Result<&'a RjMap, Fail> {
    m.as_ref().ok_or(Fail::Null("map"))
}

unsafe fn write<T>(ptr: *mut T, v: T, what: &'static str) -> Result<(), Fail> {
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    ptr.write(v);
    Ok(())
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn rj_status_name(code: i32) -> *const c_char {
    let s: &'static CStr = match code {
        RJ_OK => c"ok",
        RJ_ERR_NULL => c"null pointer",
        RJ_ERR_INVALID_PARAMETER => c"invalid parameter",
        RJ_ERR_POLE => c"pole",
        RJ_ERR_DOMAIN => c"domain error",
        RJ_ERR_BRANCH_AMBIGUITY => c"branch ambiguity",
        RJ_ERR_NON_CONVERGENCE => c"non-convergence",
        RJ_ERR_TRUNCATION => c"truncation failure",
        RJ_ERR_UNDECIDED => c"undecided",
        RJ_ERR_NON_CONTRACTION => c"non-contraction",
        RJ_ERR_RESONANCE => c"near-integer resonance",
        RJ_ERR_UNSUPPORTED_ORDER => c"unsupported order",
        RJ_ERR_SIZE_GUARD => c"size guard",
        RJ_ERR_BUFFER_TOO_SMALL => c"buffer too small",
        RJ_ERR_PANIC => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rj_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a map for branching number `b >= 2` with the default series
/// truncation.
///
/// # Safety
/// `out` must be a valid pointer to an `RjMap *`.
#[no_mangle]
pub unsafe extern "C" fn rj_map_new(b: u32, out: *mut *mut RjMap) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let params = MapParams::new(b)?;
        let m = Box::new(RjMap { params, policy: TruncationPolicy::default() });
        out.write(Box::into_raw(m));
        Ok(())
    })
}

/// Releases a map. Null is ignored.
///
/// # Safety
/// `m` must come from [`rj_map_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rj_map_free(m: *mut RjMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Overrides the series truncation used by [`rj_free_energy`].
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rj_map_set_truncation(m: *mut RjMap, tol: f64, max_terms: usize) -> i32 {
    guard(|| {
        let m = m.as_mut().ok_or(Fail::Null("map"))?;
        let policy = TruncationPolicy { tol, max_terms, ..m.policy };
        policy.validate()?;
        m.policy = policy;
        Ok(())
    })
}

/// Branching number of a map, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rj_map_b(m: *const RjMap) -> u32 {
    m.as_ref().map_or(0, |m| m.params.b())
}

/// `f(t)` on the sphere. `*is_infinity` is set to 1 when the image is the
/// point at infinity, in which case `re` and `im` are left untouched.
///
/// # Safety
/// `m` must be a live handle and the out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn rj_map_eval(
    m: *const RjMap,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    is_infinity: *mut i32,
) -> i32 {
    guard(|| {
        let m = handle(m)?;
        match map::eval_finite(m.params, Complex64::new(re, im)) {
            SpherePoint::Finite(z) => {
                write(out_re, z.re, "out_re")?;
                write(out_im, z.im, "out_im")?;
                write(is_infinity, 0, "is_infinity")
            }
            SpherePoint::Infinity => write(is_infinity, 1, "is_infinity"),
        }
    })
}

/// `F` and its first `order` derivatives at `t`, written as interleaved
/// `(re, im)` pairs into `out`, which must hold `2 * (order + 1)` doubles.
///
/// # Safety
/// `m` must be a live handle and `out` point to `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rj_free_energy(
    m: *const RjMap,
    re: f64,
    im: f64,
    order: usize,
    out: *mut f64,
    out_len: usize,
) -> i32 {
    guard(|| {
        let m = handle(m)?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let need = 2 * (order + 1);
        if out_len < need {
            return Err(Fail::Buffer(need));
        }
        let jet = free_energy::eval_f_jet(m.params, Complex64::new(re, im), &m.policy, order)?;
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (k, d) in jet.derivatives().iter().take(order + 1).enumerate() {
            dst[2 * k] = d.re;
            dst[2 * k + 1] = d.im;
        }
        Ok(())
    })
}

/// Green potential of the basin of 0. `*kind` is one of the
/// `RJ_POTENTIAL_*` values; `*value` is the potential for a basin point,
/// `+inf` at the center and NaN outside.
///
/// # Safety
/// `m` must be a live handle and the out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn rj_green_potential(
    m: *const RjMap,
    re: f64,
    im: f64,
    tol: f64,
    kind: *mut i32,
    value: *mut f64,
) -> i32 {
    guard(|| {
        let m = handle(m)?;
        let (k, v) = match boettcher::green_potential(m.params, Complex64::new(re, im).into(), tol)? {
            Potential::Basin(g) => (RJ_POTENTIAL_BASIN, g),
            Potential::Center => (RJ_POTENTIAL_CENTER, f64::INFINITY),
            Potential::Outside => (RJ_POTENTIAL_OUTSIDE, f64::NAN),
        };
        write(kind, k, "kind")?;
        write(value, v, "value")
    })
}

/// Point of the basin at Böttcher angle `theta` (turns) and potential `g > 0`.
///
/// # Safety
/// `m` must be a live handle and the out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn rj_geodesic_point(
    m: *const RjMap,
    theta: f64,
    g: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> i32 {
    guard(|| {
        let m = handle(m)?;
        let z = boettcher::geodesic_point(m.params, GeodesicSpec::new(theta, g)?)?;
        write(out_re, z.re, "out_re")?;
        write(out_im, z.im, "out_im")
    })
}

/// Cylinder-sum pressure of `-kappa ln|beta|` at tree depth `depth`.
///
/// # Safety
/// `m` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rj_pressure(m: *const RjMap, kappa: f64, depth: usize, out: *mut f64) -> i32 {
    guard(|| {
        let m = handle(m)?;
        let e = thermo::pressure_estimate(m.params, kappa, depth)?;
        write(out, e.value, "out")
    })
}

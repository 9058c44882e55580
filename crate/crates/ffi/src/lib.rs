//! C interface.
//!
//! Handles are opaque and owned by the caller: every `*_new` or computing
//! function that hands out a pointer has a matching `*_free`. Functions return
//! a [`GinoeStatus`]; on failure the message is available from
//! [`ginoe_last_error`] on the same thread.

use ginoe_core::moments::{m0_exact, m0_hyp, moment_real_any, Sqrt2Rational};
use ginoe_core::montecarlo::{empirical_real_moments, MCConfig};
use ginoe_core::numerics::{Ball, CBall, PrecisionContext};
use ginoe_core::output::{ball_strings, q_string};
use ginoe_core::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes. Nonzero values match the exit codes of the `ginoe` tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GinoeStatus {
    Ok = 0,
    InvalidArgument = 2,
    Domain = 3,
    Verification = 4,
    Internal = 5,
}

/// Which component of a value to format.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GinoePart {
    Real = 0,
    Imag = 1,
}

/// Working precision shared by computations.
pub struct GinoeContext {
    ctx: PrecisionContext,
}

/// A computed value with its rigorous error bound.
pub struct GinoeValue {
    value: CBall,
    exact: Option<Sqrt2Rational>,
    bits: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GinoeStatus {
    match e.exit_code() {
        2 => GinoeStatus::InvalidArgument,
        3 => GinoeStatus::Domain,
        4 => GinoeStatus::Verification,
        _ => GinoeStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (GinoeStatus, String)>) -> GinoeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GinoeStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            GinoeStatus::Internal
        }
    }
}

fn core_err(e: Error) -> (GinoeStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_arg(name: &str) -> (GinoeStatus, String) {
    (GinoeStatus::InvalidArgument, format!("{name} is null"))
}

unsafe fn context<'a>(ctx: *const GinoeContext) -> Result<&'a PrecisionContext, (GinoeStatus, String)> {
    ctx.as_ref().map(|c| &c.ctx).ok_or_else(|| null_arg("ctx"))
}

unsafe fn emit(out: *mut *mut GinoeValue, v: GinoeValue) -> Result<(), (GinoeStatus, String)> {
    if out.is_null() {
        return Err(null_arg("out"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// Copy `s` into `buf` (NUL-terminated, truncated to `len`). Returns the full length of `s`.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize) -> usize {
    if !buf.is_null() && len > 0 {
        let n = s.len().min(len - 1);
        std::ptr::copy_nonoverlapping(s.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
    }
    s.len()
}

/// Message of the last failed call on this thread. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn ginoe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// New context with `bits` bits of target precision.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ginoe_context_new(bits: u32, out: *mut *mut GinoeContext) -> GinoeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let ctx = PrecisionContext::new(bits).map_err(core_err)?;
        *out = Box::into_raw(Box::new(GinoeContext { ctx }));
        Ok(())
    })
}

/// # Safety
/// `ctx` must come from [`ginoe_context_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ginoe_context_free(ctx: *mut GinoeContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// # Safety
/// `v` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ginoe_value_free(v: *mut GinoeValue) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Expected number of real eigenvalues, with its exact form in ℚ(√2).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ginoe_m0(ctx: *const GinoeContext, n: u32, out: *mut *mut GinoeValue) -> GinoeStatus {
    guard(|| {
        let c = context(ctx)?;
        let v = m0_hyp(n, c).map_err(core_err)?;
        let exact = m0_exact(n).ok();
        emit(out, GinoeValue { value: v.value, exact, bits: c.target_bits })
    })
}

/// `E Σ |λ|^(2p)` over real eigenvalues for complex `p = p_re + i p_im`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ginoe_moment(
    ctx: *const GinoeContext,
    n: u32,
    p_re: f64,
    p_im: f64,
    out: *mut *mut GinoeValue,
) -> GinoeStatus {
    guard(|| {
        let c = context(ctx)?;
        if !p_re.is_finite() || !p_im.is_finite() {
            return Err((GinoeStatus::InvalidArgument, "p must be finite".into()));
        }
        let p = CBall::from_f64(p_re, p_im, c.working());
        let v = moment_real_any(n, &p, c).map_err(core_err)?;
        let exact = v.exact.map(|e| e.value);
        emit(out, GinoeValue { value: v.value, exact, bits: c.target_bits })
    })
}

/// Density of real eigenvalues at `x`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ginoe_density(ctx: *const GinoeContext, n: u32, x: f64, out: *mut *mut GinoeValue) -> GinoeStatus {
    guard(|| {
        let c = context(ctx)?;
        if !x.is_finite() {
            return Err((GinoeStatus::InvalidArgument, "x must be finite".into()));
        }
        let v = ginoe_core::density::rho_real(n, &Ball::from_f64(x, c.working()), c).map_err(core_err)?;
        emit(out, GinoeValue { value: CBall::from_real(v), exact: None, bits: c.target_bits })
    })
}

/// Moment generating function at real `t`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ginoe_mgf(ctx: *const GinoeContext, n: u32, t: f64, out: *mut *mut GinoeValue) -> GinoeStatus {
    guard(|| {
        let c = context(ctx)?;
        if !t.is_finite() {
            return Err((GinoeStatus::InvalidArgument, "t must be finite".into()));
        }
        let v = ginoe_core::transforms::mgf_value(n, &Ball::from_f64(t, c.working()), 0, c).map_err(core_err)?;
        emit(out, GinoeValue { value: v.value, exact: None, bits: c.target_bits })
    })
}

/// Stieltjes transform at `t = t_re + i t_im`, `t_im != 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ginoe_stieltjes(
    ctx: *const GinoeContext,
    n: u32,
    t_re: f64,
    t_im: f64,
    out: *mut *mut GinoeValue,
) -> GinoeStatus {
    guard(|| {
        let c = context(ctx)?;
        if !t_re.is_finite() || !t_im.is_finite() {
            return Err((GinoeStatus::InvalidArgument, "t must be finite".into()));
        }
        let t = CBall::from_f64(t_re, t_im, c.working());
        let v = ginoe_core::transforms::stieltjes_value(n, &t, 0, c).map_err(core_err)?;
        emit(out, GinoeValue { value: v.value, exact: None, bits: c.target_bits })
    })
}

/// Monte Carlo estimate of `E Σ λ^(2p)` over real eigenvalues.
///
/// # Safety
/// `mean` and `std_error` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ginoe_mc_moment(
    n: u32,
    p: u32,
    samples: u64,
    seed: u64,
    workers: u32,
    mean: *mut f64,
    std_error: *mut f64,
) -> GinoeStatus {
    guard(|| {
        if mean.is_null() || std_error.is_null() {
            return Err(null_arg("mean/std_error"));
        }
        let cfg = MCConfig { workers: workers as usize, ..MCConfig::new(n as usize, samples, seed) };
        let s = empirical_real_moments(&cfg, &[p], None).map_err(core_err)?;
        *mean = s.means[0];
        *std_error = s.std_errors[0];
        Ok(())
    })
}

/// Nearest double to a component's midpoint.
///
/// # Safety
/// `v` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ginoe_value_mid(v: *const GinoeValue, part: GinoePart) -> f64 {
    match v.as_ref() {
        Some(v) => match part {
            GinoePart::Real => v.value.re.to_f64(),
            GinoePart::Imag => v.value.im.to_f64(),
        },
        None => f64::NAN,
    }
}

/// Upper bound on the absolute error of either component.
///
/// # Safety
/// `v` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ginoe_value_err(v: *const GinoeValue) -> f64 {
    v.as_ref().map_or(f64::NAN, |v| v.value.rad().to_f64())
}

/// Decimal string of a component at the context precision. Returns the string
/// length; at most `len - 1` bytes plus a NUL are written to `buf`.
///
/// # Safety
/// `v` must be valid; `buf` must hold `len` bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn ginoe_value_decimal(v: *const GinoeValue, part: GinoePart, buf: *mut c_char, len: usize) -> usize {
    let Some(v) = v.as_ref() else { return 0 };
    let b = match part {
        GinoePart::Real => &v.value.re,
        GinoePart::Imag => &v.value.im,
    };
    copy_out(&ball_strings(b, v.bits).0, buf, len)
}

/// Exact form as `"a + b*sqrt(2)"`, or length 0 when none is known.
///
/// # Safety
/// `v` must be valid; `buf` must hold `len` bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn ginoe_value_exact(v: *const GinoeValue, buf: *mut c_char, len: usize) -> usize {
    let Some(e) = v.as_ref().and_then(|v| v.exact.as_ref()) else {
        return copy_out("", buf, len);
    };
    copy_out(&format!("{} + {}*sqrt(2)", q_string(&e.a), q_string(&e.b)), buf, len)
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ginoe_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!(),
    };
    V.as_ptr()
}

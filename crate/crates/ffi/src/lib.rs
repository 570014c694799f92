//! C ABI for `orbitprec`.
//!
//! Every function returns an [`OrbitprecStatus`]; on failure the message is
//! available from [`orbitprec_last_error`] on the same thread. Handles are
//! opaque and released with [`orbitprec_system_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use orbitprec::cli::{rate_report, SweepConfig, LYAPUNOV_M_CAP};
use orbitprec::dynsys::{validated_lyapunov, LogisticSystem, MapForm};
use orbitprec::mpfloat::{parse_rational, Rational};
use orbitprec::orbit::{ErrorMode, SearchMode};
use orbitprec::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitprecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutsideDomain = 3,
    NoHaltWithinCap = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitprecForm {
    Form1 = 0,
    Form2 = 1,
    Form3 = 2,
    MeanValue = 3,
    RunningError = 4,
}

impl From<OrbitprecForm> for MapForm {
    fn from(f: OrbitprecForm) -> MapForm {
        match f {
            OrbitprecForm::Form1 => MapForm::Form1,
            OrbitprecForm::Form2 => MapForm::Form2,
            OrbitprecForm::Form3 => MapForm::Form3,
            OrbitprecForm::MeanValue => MapForm::MeanValue,
            OrbitprecForm::RunningError => MapForm::RunningError,
        }
    }
}

/// A logistic map `x -> mu x (1 - x)` with its evaluation form.
pub struct OrbitprecSystem {
    inner: LogisticSystem,
}

/// Result of a minimal-precision search.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct OrbitprecReport {
    /// Smallest working precision in bits.
    pub m_min: u32,
    /// Bits lost per step; NaN when `n == 0`.
    pub sigma_est: f64,
    /// Last orbit value and its error bound, rounded to double.
    pub final_value: f64,
    pub final_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> OrbitprecStatus {
    match e {
        Error::NoHaltWithinCap { .. } => OrbitprecStatus::NoHaltWithinCap,
        Error::OutsideDomain(_) | Error::DomainDeparture => OrbitprecStatus::OutsideDomain,
        Error::InvalidParameter(_) | Error::Parse(_) | Error::InvalidPrecision | Error::NonPositive => {
            OrbitprecStatus::InvalidArgument
        }
        _ => OrbitprecStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (OrbitprecStatus, String)>) -> OrbitprecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OrbitprecStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OrbitprecStatus::Internal
        }
    }
}

fn lift(e: Error) -> (OrbitprecStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OrbitprecStatus, String) {
    (OrbitprecStatus::NullPointer, format!("{what} is null"))
}

fn ratio(num: i64, den: i64) -> Result<Rational, (OrbitprecStatus, String)> {
    if den == 0 {
        return Err((OrbitprecStatus::InvalidArgument, "zero denominator".into()));
    }
    Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
}

fn new_system(
    mu: Rational,
    form: OrbitprecForm,
    out: *mut *mut OrbitprecSystem,
) -> Result<(), (OrbitprecStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let inner = LogisticSystem::new(mu, form.into()).map_err(lift)?;
    // SAFETY: `out` is non-null and points to writable storage per the contract.
    unsafe { *out = Box::into_raw(Box::new(OrbitprecSystem { inner })) };
    Ok(())
}

/// Creates a system with `mu = mu_num / mu_den`, `0 < mu <= 4`.
///
/// # Safety
/// `out` must point to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn orbitprec_system_new(
    mu_num: i64,
    mu_den: i64,
    form: OrbitprecForm,
    out: *mut *mut OrbitprecSystem,
) -> OrbitprecStatus {
    guard(|| new_system(ratio(mu_num, mu_den)?, form, out))
}

/// Like [`orbitprec_system_new`] with `mu` given as text, e.g. "3.75" or "15/4".
///
/// # Safety
/// `mu` must be a NUL-terminated string and `out` writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn orbitprec_system_new_str(
    mu: *const c_char,
    form: OrbitprecForm,
    out: *mut *mut OrbitprecSystem,
) -> OrbitprecStatus {
    guard(|| {
        if mu.is_null() {
            return Err(null("mu"));
        }
        let text = CStr::from_ptr(mu)
            .to_str()
            .map_err(|_| (OrbitprecStatus::InvalidArgument, "mu is not UTF-8".into()))?;
        new_system(parse_rational(text).map_err(lift)?, form, out)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `sys` must come from `orbitprec_system_new*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orbitprec_system_free(sys: *mut OrbitprecSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Smallest precision at which the orbit of `x0_num / x0_den` of length `n`
/// holds `p` digits at every point, searched up to `m_cap` bits. `absolute`
/// selects the absolute error criterion.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orbitprec_find_min_precision(
    sys: *const OrbitprecSystem,
    x0_num: i64,
    x0_den: i64,
    n: usize,
    p: i32,
    absolute: bool,
    m_cap: u32,
    out: *mut OrbitprecReport,
) -> OrbitprecStatus {
    guard(|| {
        let sys = sys.as_ref().ok_or_else(|| null("sys"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SweepConfig {
            x0: ratio(x0_num, x0_den)?,
            n,
            p,
            mode: if absolute {
                ErrorMode::Absolute
            } else {
                ErrorMode::Relative
            },
            search: SearchMode::BracketBisect,
            m_cap,
            ..SweepConfig::desk()
        };
        let found = rate_report(&sys.inner, &cfg, None).map_err(lift)?;
        let last = found
            .run
            .points
            .last()
            .ok_or((OrbitprecStatus::Internal, "empty orbit".into()))?;
        *out = OrbitprecReport {
            m_min: found.m_min,
            sigma_est: found.report.map_or(f64::NAN, |r| r.sigma_est),
            final_value: last.fl().to_f64(),
            final_error: last.err().to_f64(),
        };
        Ok(())
    })
}

/// Lyapunov exponent estimate along a validated orbit of `x0_num / x0_den`.
/// `half_width` bounds the rounding effect on `value`.
///
/// # Safety
/// `sys` must be a live handle; `value` and `half_width` writable.
#[no_mangle]
pub unsafe extern "C" fn orbitprec_lyapunov(
    sys: *const OrbitprecSystem,
    x0_num: i64,
    x0_den: i64,
    iterations: usize,
    transient: usize,
    value: *mut f64,
    half_width: *mut f64,
) -> OrbitprecStatus {
    guard(|| {
        let sys = sys.as_ref().ok_or_else(|| null("sys"))?;
        if value.is_null() || half_width.is_null() {
            return Err(null("output"));
        }
        let x0 = ratio(x0_num, x0_den)?;
        let est = validated_lyapunov(&sys.inner, &x0, iterations, transient, LYAPUNOV_M_CAP).map_err(lift)?;
        if est.singular() {
            return Err((OrbitprecStatus::OutsideDomain, "orbit meets a critical point".into()));
        }
        *value = est.value;
        *half_width = est.half_width;
        Ok(())
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn orbitprec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

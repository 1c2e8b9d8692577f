//! C interface to `pso-core`.
//!
//! Every function returns a [`PsoStatus`]. On failure the message is kept
//! per thread and read with [`pso_last_error`]. Strings handed out by the
//! library are released with [`pso_string_free`], Fock handles with
//! [`pso_fock_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_rational::BigRational;
use pso_core::engine::{CreationWord, FockVector};
use pso_core::fock::ModuleSnapshot;
use pso_core::graded::{self, RelationFamily};
use pso_core::{gz, Error};

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PsoStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    VerificationFailed = 3,
    Internal = 4,
}

/// Levels `0..=max_level` of a Fock space, built once.
pub struct PsoFock {
    snapshot: ModuleSnapshot,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> PsoStatus {
    match err {
        Error::Internal(_) => PsoStatus::Internal,
        _ => PsoStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (PsoStatus, String)>) -> PsoStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsoStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside pso-core");
            PsoStatus::Internal
        }
    }
}

fn lift<T>(r: pso_core::Result<T>) -> Result<T, (PsoStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (PsoStatus, String) {
    (PsoStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (PsoStatus, String) {
    (PsoStatus::InvalidArgument, msg.into())
}

fn write<T>(out: *mut T, value: T) -> Result<(), (PsoStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null; the caller provides a writable location.
    unsafe { out.write(value) };
    Ok(())
}

fn text(s: *const c_char, what: &str) -> Result<String, (PsoStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and nul-terminated by contract.
    let c = unsafe { CStr::from_ptr(s) };
    c.to_str().map(str::to_owned).map_err(|_| invalid(format!("{what} is not UTF-8")))
}

fn hand_out(s: String) -> Result<*mut c_char, (PsoStatus, String)> {
    CString::new(s).map(CString::into_raw).map_err(|_| (PsoStatus::Internal, "string contains nul".into()))
}

fn word(modes: *const i64, len: usize) -> Result<FockVector, (PsoStatus, String)> {
    let modes = if len == 0 {
        Vec::new()
    } else if modes.is_null() {
        return Err(null("word"));
    } else {
        // SAFETY: non-null, `len` elements by contract.
        unsafe { std::slice::from_raw_parts(modes, len) }.to_vec()
    };
    Ok(FockVector::word(lift(CreationWord::new(modes))?))
}

fn order(num: i64, den: i64) -> Result<BigRational, (PsoStatus, String)> {
    if den == 0 {
        return Err(invalid("order denominator is zero"));
    }
    Ok(BigRational::new(num.into(), den.into()))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn pso_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Dimension of the span closed under the graded bracket at rank `n`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pso_closure_dim(n: u32, out: *mut u64) -> PsoStatus {
    guard(|| {
        let dim = lift(graded::bracket_closure_dim(n as usize))?;
        write(out, dim as u64)
    })
}

/// Checks one triple-relation family (`"parafermion"`, `"paraboson"`,
/// `"relative-paraboson"`, `"relative-parafermion"`) at rank `n`.
/// Returns `VERIFICATION_FAILED` if any instance fails; counts are written either way.
///
/// # Safety
/// `family` must be null or a nul-terminated string; `instances` and `failed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pso_relation_check(
    family: *const c_char,
    n: u32,
    instances: *mut u64,
    failed: *mut u64,
) -> PsoStatus {
    guard(|| {
        let family = lift(RelationFamily::parse(&text(family, "family")?))?;
        let report = lift(graded::relation_check(family, n as usize))?;
        write(instances, report.instances as u64)?;
        write(failed, report.failed as u64)?;
        match report.first_counterexample {
            Some(c) => Err((PsoStatus::VerificationFailed, c)),
            None => Ok(()),
        }
    })
}

/// Builds levels `0..=max_level` of the order `p_num/p_den` Fock space of rank `n`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pso_fock_new(n: u32, p_num: i64, p_den: i64, max_level: u32, out: *mut *mut PsoFock) -> PsoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        if n as usize > pso_core::cli::MAX_RANK {
            return Err(invalid(format!("rank {n} exceeds {}", pso_core::cli::MAX_RANK)));
        }
        let snapshot = lift(ModuleSnapshot::build(n as usize, order(p_num, p_den)?, max_level as usize))?;
        write(out, Box::into_raw(Box::new(PsoFock { snapshot })))
    })
}

/// Releases a handle from [`pso_fock_new`]; null is ignored.
///
/// # Safety
/// `fock` must be null or a handle from [`pso_fock_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pso_fock_free(fock: *mut PsoFock) {
    if !fock.is_null() {
        // SAFETY: produced by Box::into_raw in pso_fock_new and freed once.
        drop(unsafe { Box::from_raw(fock) });
    }
}

fn handle<'a>(fock: *const PsoFock) -> Result<&'a PsoFock, (PsoStatus, String)> {
    // SAFETY: null or a live handle from pso_fock_new.
    unsafe { fock.as_ref() }.ok_or_else(|| null("fock handle"))
}

/// Dimension table as JSON; free the string with [`pso_string_free`].
///
/// # Safety
/// `fock` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pso_fock_json(fock: *const PsoFock, out: *mut *mut c_char) -> PsoStatus {
    guard(|| {
        let fock = handle(fock)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = hand_out(fock.snapshot.to_json().to_string())?;
        write(out, s)
    })
}

/// Dimension of the quotient at `level`, summed over weights.
///
/// # Safety
/// `fock` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pso_fock_level_dim(fock: *const PsoFock, level: u32, out: *mut u64) -> PsoStatus {
    guard(|| {
        let fock = handle(fock)?;
        if level as usize > fock.snapshot.max_level() {
            return Err(invalid(format!("level {level} was not built")));
        }
        let dim: usize = fock.snapshot.level(level as usize).iter().map(|b| b.rank).sum();
        write(out, dim as u64)
    })
}

/// `⟨w1|w2⟩` for two creation words, written as a decimal fraction string.
///
/// # Safety
/// `fock` must be null or a live handle; `w1`/`w2` null or valid for `len1`/`len2` reads; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pso_fock_inner_product(
    fock: *const PsoFock,
    w1: *const i64,
    len1: usize,
    w2: *const i64,
    len2: usize,
    out: *mut *mut c_char,
) -> PsoStatus {
    guard(|| {
        let fock = handle(fock)?;
        let (v1, v2) = (word(w1, len1)?, word(w2, len2)?);
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let value = lift(fock.snapshot.engine().inner_product(&v1, &v2))?;
        let s = hand_out(pso_core::exact::format_rational(&value))?;
        write(out, s)
    })
}

/// Number of basis patterns at `level` for rank `n` and integer order `p`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pso_gz_count(n: u32, p: i64, level: u32, out: *mut u64) -> PsoStatus {
    guard(|| {
        if n == 0 || n as usize > pso_core::cli::MAX_RANK {
            return Err(invalid(format!("rank must lie in 1..={}", pso_core::cli::MAX_RANK)));
        }
        if p <= 0 {
            return Err(invalid("order must be positive"));
        }
        write(out, gz::basis_size(n as usize, p, level as usize) as u64)
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pso_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw in this crate and freed once.
        drop(unsafe { CString::from_raw(s) });
    }
}

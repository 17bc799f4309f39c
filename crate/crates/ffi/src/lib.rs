//! C ABI for `lane_emden`.
//!
//! Every fallible function returns an [`LeStatus`] and writes its result
//! through an out-pointer. On failure the out-pointer is left untouched and
//! [`le_last_error`] describes the error for the calling thread.
//!
//! Solutions are opaque: create with [`le_solution_new`], release with
//! [`le_solution_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lane_emden::factor::{cardano_roots, positive_root_f};
use lane_emden::families::{calibrate_b, scaling_lambda, scaling_parity};
use lane_emden::{classify, Branch, Error, Regime, Solution, SolutionParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Pole = 3,
    DegenerateModulus = 4,
    DegenerateLattice = 5,
    NoConvergence = 6,
    OutOfRegime = 7,
    NoRealSolution = 8,
    Unreachable = 9,
    IntegrationFailure = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeRegime {
    NoRealSolution = 0,
    SingularFixedPoint = 1,
    DcFamily = 2,
    Schuster = 3,
    ScFamily = 4,
    Srivastava = 5,
    WeierstrassFamily = 6,
}

impl From<Regime> for LeRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::NoRealSolution => LeRegime::NoRealSolution,
            Regime::SingularFixedPoint => LeRegime::SingularFixedPoint,
            Regime::DcFamily => LeRegime::DcFamily,
            Regime::Schuster => LeRegime::Schuster,
            Regime::ScFamily => LeRegime::ScFamily,
            Regime::Srivastava => LeRegime::Srivastava,
            Regime::WeierstrassFamily => LeRegime::WeierstrassFamily,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeBranch {
    Plus = 1,
    Minus = -1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeSample {
    pub xi: f64,
    pub theta: f64,
    pub dtheta: f64,
}

/// Roots `a < b < c` of the cubic in `z²`, for `-2 < C < 2`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeRoots {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Opaque solution handle.
pub struct LeSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> LeStatus {
    match e {
        Error::Domain(_) => LeStatus::Domain,
        Error::Pole(_) => LeStatus::Pole,
        Error::DegenerateModulus(_) => LeStatus::DegenerateModulus,
        Error::DegenerateLattice => LeStatus::DegenerateLattice,
        Error::NoConvergence(_) => LeStatus::NoConvergence,
        Error::OutOfRegime { .. } => LeStatus::OutOfRegime,
        Error::NoRealSolution(_) => LeStatus::NoRealSolution,
        Error::Unreachable(_) => LeStatus::Unreachable,
        Error::IntegrationFailure { .. } => LeStatus::IntegrationFailure,
    }
}

/// Runs `f`, writes its value to `out`, and turns errors and panics into
/// status codes.
///
/// # Safety
/// `out` must be NULL or valid for writes.
unsafe fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Error>) -> LeStatus {
    if out.is_null() {
        set_error("output pointer is null".into());
        return LeStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            out.write(v);
            LeStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            LeStatus::Panic
        }
    }
}

/// Enum arguments arrive as plain integers: an out-of-range C enum value
/// would be undefined behaviour as a Rust enum.
fn branch(sign: i32) -> Result<Branch, Error> {
    match sign {
        s if s == LeBranch::Plus as i32 => Ok(Branch::Plus),
        s if s == LeBranch::Minus as i32 => Ok(Branch::Minus),
        s => Err(Error::Domain(format!("branch {s} is neither +1 nor -1"))),
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn le_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated name of an [`LeStatus`] value; "unknown" for
/// anything else.
#[no_mangle]
pub extern "C" fn le_status_name(status: i32) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer\0",
        2 => b"domain\0",
        3 => b"pole\0",
        4 => b"degenerate modulus\0",
        5 => b"degenerate lattice\0",
        6 => b"no convergence\0",
        7 => b"out of regime\0",
        8 => b"no real solution\0",
        9 => b"unreachable\0",
        10 => b"integration failure\0",
        99 => b"panic\0",
        _ => b"unknown\0",
    };
    s.as_ptr().cast()
}

/// Library version, NUL-terminated.
#[no_mangle]
pub extern "C" fn le_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// Output pointers must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn le_classify(c: f64, out: *mut LeRegime) -> LeStatus {
    guard(out, || classify(c).map(LeRegime::from))
}

/// # Safety
/// Output pointers must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn le_cardano_roots(c: f64, out: *mut LeRoots) -> LeStatus {
    guard(out, || {
        cardano_roots(c).map(|r| LeRoots {
            a: r.a,
            b: r.b,
            c: r.c,
        })
    })
}

/// Real root `f` of `f³ - 3f = C` for `C >= 2`.
///
/// # Safety
/// Output pointers must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn le_positive_root(c: f64, out: *mut f64) -> LeStatus {
    guard(out, || positive_root_f(c).map(|r| r.f))
}

/// `λ(C, m)`; `parity` (may be NULL) receives the sign `s` in
/// `θ(ξ/λ)/sqrt(λ) = s·θ(ξ)`.
///
/// # Safety
/// Output pointers must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn le_scaling_lambda(
    c: f64,
    m: i32,
    out: *mut f64,
    parity: *mut f64,
) -> LeStatus {
    let status = guard(out, || scaling_lambda(c, m));
    if status == LeStatus::Ok && !parity.is_null() {
        if let Ok(p) = scaling_parity(c, m) {
            parity.write(p);
        }
    }
    status
}

/// `B` such that `2·ξ0·θ(ξ0)² = z0²` on the branch through `ln(Bξ0) = 0`.
///
/// # Safety
/// Output pointers must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn le_calibrate_b(c: f64, xi0: f64, z0: f64, out: *mut f64) -> LeStatus {
    guard(out, || calibrate_b(c, xi0, z0))
}

fn new_handle(params: Result<SolutionParams, Error>) -> Result<*mut LeSolution, Error> {
    let sol = Solution::new(params?)?;
    Ok(Box::into_raw(Box::new(LeSolution(sol))))
}

/// Solution for constant `c`, scale `b > 0` and sign `br` (an
/// [`LeBranch`] value), in the representation selected by `c`.
///
/// # Safety
/// Output pointers must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn le_solution_new(
    c: f64,
    b: f64,
    br: i32,
    out: *mut *mut LeSolution,
) -> LeStatus {
    guard(out, || {
        new_handle(branch(br).and_then(|br| SolutionParams::new(c, b, br)))
    })
}

/// Same as [`le_solution_new`] but always in the ℘ representation
/// (`C > 0`, `C != 2`).
///
/// # Safety
/// Output pointers must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn le_solution_new_weierstrass(
    c: f64,
    b: f64,
    br: i32,
    out: *mut *mut LeSolution,
) -> LeStatus {
    guard(out, || {
        new_handle(branch(br).and_then(|br| SolutionParams::weierstrass(c, b, br)))
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `sol` must come from `le_solution_new*` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn le_solution_free(sol: *mut LeSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be NULL or a live handle.
unsafe fn solution<'a>(sol: *const LeSolution) -> Result<&'a Solution, Error> {
    sol.as_ref()
        .map(|s| &s.0)
        .ok_or_else(|| Error::Domain("solution handle is null".into()))
}

/// # Safety
/// `sol` must be NULL or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn le_solution_eval(
    sol: *const LeSolution,
    xi: f64,
    out: *mut LeSample,
) -> LeStatus {
    guard(out, || {
        let s = solution(sol)?.eval(xi)?;
        Ok(LeSample {
            xi: s.xi,
            theta: s.theta,
            dtheta: s.dtheta,
        })
    })
}

/// Evaluates at `n` radii. Stops at the first failure; `done` (may be NULL)
/// receives the number of samples written.
///
/// # Safety
/// `sol` must be NULL or a live handle; `xi` must point to `n` readable and
/// `out` to `n` writable elements.
#[no_mangle]
pub unsafe extern "C" fn le_solution_eval_many(
    sol: *const LeSolution,
    xi: *const f64,
    n: usize,
    out: *mut LeSample,
    done: *mut usize,
) -> LeStatus {
    if !done.is_null() {
        done.write(0);
    }
    if n == 0 {
        return LeStatus::Ok;
    }
    if xi.is_null() || out.is_null() {
        set_error("input or output array is null".into());
        return LeStatus::NullPointer;
    }
    let xs = std::slice::from_raw_parts(xi, n);
    for (i, &x) in xs.iter().enumerate() {
        let status = le_solution_eval(sol, x, out.add(i));
        if status != LeStatus::Ok {
            return status;
        }
        if !done.is_null() {
            done.write(i + 1);
        }
    }
    LeStatus::Ok
}

/// # Safety
/// `sol` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_solution_regime(
    sol: *const LeSolution,
    out: *mut LeRegime,
) -> LeStatus {
    guard(out, || Ok(solution(sol)?.params().family.into()))
}

/// Shift in `ln ξ` mapping the solution onto `±` itself; `OutOfRegime` for
/// the singular and Schuster solutions, which have none.
///
/// # Safety
/// `sol` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn le_solution_log_period(sol: *const LeSolution, out: *mut f64) -> LeStatus {
    guard(out, || {
        let s = solution(sol)?;
        s.log_period().ok_or(Error::OutOfRegime {
            c: s.params().c,
            expected: "-2 < C < 0 or C > 0",
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn null_output_is_reported() {
        assert_eq!(
            unsafe { le_classify(1.0, ptr::null_mut()) },
            LeStatus::NullPointer
        );
        let msg = unsafe { CStr::from_ptr(le_last_error()) };
        assert!(msg.to_str().unwrap().contains("null"));
    }

    #[test]
    fn status_names_are_terminated() {
        let s = unsafe { CStr::from_ptr(le_status_name(LeStatus::OutOfRegime as i32)) };
        assert_eq!(s.to_str().unwrap(), "out of regime");
    }
}

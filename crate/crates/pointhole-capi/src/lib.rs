//! C ABI for the pointhole library: opaque handles, status codes, and a
//! thread-local last-error message. The header is generated by cbindgen into
//! `include/pointhole.h`.

use pointhole::green::DefectFunction;
use pointhole::limitop::{
    limit_eigenvalues_disc, BaseDomain, PointInteractionOperator,
};
use pointhole::perturbed::{radial_defect_solve, RadialBenchmark, RadialGaussian};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    GeometryError = 4,
    IoError = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(clean).unwrap_or_else(|_| CString::new("error").unwrap());
    });
}

fn status_of(err: &pointhole::Error) -> PhStatus {
    use pointhole::Error::*;
    set_error(&err.to_string());
    match err {
        Domain(_) => PhStatus::InvalidArgument,
        Geometry(_) => PhStatus::GeometryError,
        Numerical(_) => PhStatus::NumericalFailure,
        Config(_) => PhStatus::InvalidArgument,
        Io(_) => PhStatus::IoError,
    }
}

fn guarded<F: FnOnce() -> PhStatus>(f: F) -> PhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            PhStatus::Panic
        }
    }
}

/// Last error message for this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn ph_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version string (static storage).
#[no_mangle]
pub extern "C" fn ph_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque defect-function handle.
pub struct PhDefect {
    inner: DefectFunction,
}

/// Opaque limit-operator handle.
pub struct PhLimitOp {
    inner: PointInteractionOperator,
}

/// One labelled eigenvalue of the limit operator on the disc.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PhEigenvalue {
    pub m: u32,
    pub index: u32,
    pub lambda: f64,
}

/// Create the whole-plane defect function G(r) = -K0(sqrt(c1) r).
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ph_defect_plane_new(c1: f64, out: *mut *mut PhDefect) -> PhStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return PhStatus::NullPointer;
    }
    guarded(|| match pointhole::green::defect_plane(c1) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(PhDefect { inner: g }));
            PhStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Create the Dirichlet-disc defect function.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ph_defect_disc_new(
    c1: f64,
    radius: f64,
    out: *mut *mut PhDefect,
) -> PhStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return PhStatus::NullPointer;
    }
    guarded(|| match pointhole::green::defect_disc(c1, radius) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(PhDefect { inner: g }));
            PhStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// The constant term a of the defect function at the interaction point.
///
/// # Safety
/// `d` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_defect_constant(d: *const PhDefect, out: *mut f64) -> PhStatus {
    if d.is_null() || out.is_null() {
        set_error("null pointer");
        return PhStatus::NullPointer;
    }
    *out = (*d).inner.a;
    PhStatus::Ok
}

/// ||G||^2 over the working domain.
///
/// # Safety
/// `d` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_defect_norm_sq(d: *const PhDefect, out: *mut f64) -> PhStatus {
    if d.is_null() || out.is_null() {
        set_error("null pointer");
        return PhStatus::NullPointer;
    }
    *out = (*d).inner.norm_g2;
    PhStatus::Ok
}

/// Evaluate the radial profile G(r).
///
/// # Safety
/// `d` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_defect_eval_radial(
    d: *const PhDefect,
    r: f64,
    out: *mut f64,
) -> PhStatus {
    if d.is_null() || out.is_null() {
        set_error("null pointer");
        return PhStatus::NullPointer;
    }
    if !(r > 0.0) {
        set_error("r must be > 0");
        return PhStatus::InvalidArgument;
    }
    guarded(|| {
        *out = (*d).inner.eval_radial(r);
        PhStatus::Ok
    })
}

/// Destroy a defect handle. Passing null is a no-op.
///
/// # Safety
/// `d` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_defect_free(d: *mut PhDefect) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Coupling constants of the disc-hole benchmark: K = 2 pi (ln b - b alpha1),
/// beta = b alpha1 - ln b, and the defect constant a for the given base.
///
/// # Safety
/// The out pointers must be writable or null (skipped when null).
#[no_mangle]
pub unsafe extern "C" fn ph_coupling_disc_hole(
    b: f64,
    alpha1: f64,
    c1: f64,
    out_k: *mut f64,
    out_beta: *mut f64,
    out_a: *mut f64,
) -> PhStatus {
    guarded(|| {
        if !(b > 0.0) {
            set_error("hole radius must be > 0");
            return PhStatus::InvalidArgument;
        }
        let g = match pointhole::green::defect_plane(c1) {
            Ok(g) => g,
            Err(e) => return status_of(&e),
        };
        let k = 2.0 * std::f64::consts::PI * (b.ln() - b * alpha1);
        let beta = b * alpha1 - b.ln();
        if !out_k.is_null() {
            *out_k = k;
        }
        if !out_beta.is_null() {
            *out_beta = beta;
        }
        if !out_a.is_null() {
            *out_a = g.a;
        }
        PhStatus::Ok
    })
}

/// Create the limit operator on the centered disc with explicit beta.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ph_limit_op_disc_new(
    radius: f64,
    c1: f64,
    beta: f64,
    out: *mut *mut PhLimitOp,
) -> PhStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return PhStatus::NullPointer;
    }
    guarded(
        || match PointInteractionOperator::new(BaseDomain::Disc { radius }, c1, beta) {
            Ok(op) => {
                *out = Box::into_raw(Box::new(PhLimitOp { inner: op }));
                PhStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Destroy a limit-operator handle. Passing null is a no-op.
///
/// # Safety
/// `op` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_limit_op_free(op: *mut PhLimitOp) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Eigenvalues of the limit operator in [lo, hi], written into the caller's
/// buffer; `out_len` receives the number found (truncated to `capacity`).
///
/// # Safety
/// `buf` must hold `capacity` entries; `op` live; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_limit_eigs_disc(
    op: *const PhLimitOp,
    lo: f64,
    hi: f64,
    buf: *mut PhEigenvalue,
    capacity: usize,
    out_len: *mut usize,
) -> PhStatus {
    if op.is_null() || buf.is_null() || out_len.is_null() {
        set_error("null pointer");
        return PhStatus::NullPointer;
    }
    guarded(|| match limit_eigenvalues_disc(&(*op).inner, lo, hi) {
        Ok(eigs) => {
            let n = eigs.len().min(capacity);
            for (i, e) in eigs.iter().take(n).enumerate() {
                *buf.add(i) = PhEigenvalue { m: e.m, index: e.index, lambda: e.lambda };
            }
            *out_len = n;
            PhStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// The explicit benchmark quotient h_eps/c_eps and its leading asymptotic
/// term at one eps.
///
/// # Safety
/// Out pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn ph_benchmark_quotient(
    b: f64,
    alpha1: f64,
    lambda: f64,
    v0_amp: f64,
    v0_width: f64,
    eps: f64,
    out_quotient: *mut f64,
    out_leading: *mut f64,
) -> PhStatus {
    guarded(|| {
        let bench = RadialBenchmark {
            b,
            alpha1,
            lambda,
            v0: RadialGaussian { amp: v0_amp, width: v0_width },
        };
        match radial_defect_solve(&bench, eps) {
            Ok(sol) => {
                if !out_quotient.is_null() {
                    *out_quotient = sol.quotient;
                }
                if !out_leading.is_null() {
                    *out_leading = sol.leading_term();
                }
                PhStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Run the resolvent-error sweep for the disc-hole benchmark over
/// eps = 10^{-start_exp} .. 10^{-end_exp} and write the CSV to `path`.
/// Returns the fitted exponents through the out pointers.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; out pointers writable or
/// null.
#[no_mangle]
pub unsafe extern "C" fn ph_resolvent_sweep_csv(
    b: f64,
    alpha1: f64,
    lambda: f64,
    v0_amp: f64,
    v0_width: f64,
    start_exp: u32,
    end_exp: u32,
    path: *const c_char,
    out_p_l2: *mut f64,
    out_p_grad: *mut f64,
) -> PhStatus {
    if path.is_null() {
        set_error("path is null");
        return PhStatus::NullPointer;
    }
    guarded(|| {
        let path = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("path is not valid UTF-8");
                return PhStatus::InvalidArgument;
            }
        };
        let bench = RadialBenchmark {
            b,
            alpha1,
            lambda,
            v0: RadialGaussian { amp: v0_amp, width: v0_width },
        };
        let grid = pointhole::harness::decade_grid(start_exp, end_exp);
        let sweep = match pointhole::harness::resolvent_error_sweep(&bench, &grid, 1) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        let mut buf = Vec::new();
        if let Err(e) = pointhole::harness::write_sweep_csv(&sweep, &mut buf) {
            set_error(&e.to_string());
            return PhStatus::IoError;
        }
        if let Err(e) = std::fs::write(path, &buf) {
            set_error(&e.to_string());
            return PhStatus::IoError;
        }
        for f in &sweep.fits {
            match f.quantity.as_str() {
                "resolvent_l2" if !out_p_l2.is_null() => *out_p_l2 = f.exponent,
                "resolvent_grad" if !out_p_grad.is_null() => *out_p_grad = f.exponent,
                _ => {}
            }
        }
        PhStatus::Ok
    })
}

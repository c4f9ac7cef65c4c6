//! C ABI over the case runner.
//!
//! Cases and results are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns an
//! [`EbfvmStatus`]; the text of the last failure on the calling thread is
//! available from [`ebfvm_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ebfvm::cli::{load_case, parse_case, run_case, write_fields, CaseConfig, Results};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbfvmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Case text or file rejected.
    Config = 3,
    /// The journal touches the bushing somewhere on the surface.
    Contact = 4,
    /// The outer loop stopped at its iteration limit. Results are still
    /// produced.
    NotConverged = 5,
    /// A caller buffer is too small.
    BufferTooSmall = 6,
    Io = 7,
    /// Any other solver failure.
    Failed = 8,
    /// A Rust panic was caught at the boundary.
    Panic = 9,
}

/// Nodal fields on the surface mesh.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbfvmField {
    Pressure = 0,
    FillFraction = 1,
    FilmThickness = 2,
    MidplaneTemperature = 3,
    X = 4,
    Y = 5,
}

/// Opaque case configuration.
pub struct EbfvmCase {
    cfg: CaseConfig,
}

/// Opaque solution of one run.
pub struct EbfvmResults {
    results: Results,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: EbfvmStatus, msg: impl Into<String>) -> EbfvmStatus {
    set_error(msg);
    status
}

/// Runs `f` with panics turned into [`EbfvmStatus::Panic`].
fn guard(f: impl FnOnce() -> EbfvmStatus) -> EbfvmStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(EbfvmStatus::Panic, msg)
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, EbfvmStatus> {
    if s.is_null() {
        return Err(fail(EbfvmStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(EbfvmStatus::InvalidUtf8, e.to_string()))
}

unsafe fn emit_case(cfg: CaseConfig, out: *mut *mut EbfvmCase) -> EbfvmStatus {
    *out = Box::into_raw(Box::new(EbfvmCase { cfg }));
    EbfvmStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ebfvm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ebfvm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Built-in reference bearing.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_case_reference(out: *mut *mut EbfvmCase) -> EbfvmStatus {
    guard(|| {
        if out.is_null() {
            return fail(EbfvmStatus::NullPointer, "null output handle");
        }
        emit_case(CaseConfig::reference(), out)
    })
}

/// Parses case text.
///
/// # Safety
/// `case_text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_case_parse(case_text: *const c_char, out: *mut *mut EbfvmCase) -> EbfvmStatus {
    guard(|| {
        if out.is_null() {
            return fail(EbfvmStatus::NullPointer, "null output handle");
        }
        let s = match text(case_text) {
            Ok(s) => s,
            Err(e) => return e,
        };
        match parse_case(s) {
            Ok(cfg) => emit_case(cfg, out),
            Err(e) => fail(EbfvmStatus::Config, e.to_string()),
        }
    })
}

/// Reads and parses a case file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_case_load(path: *const c_char, out: *mut *mut EbfvmCase) -> EbfvmStatus {
    guard(|| {
        if out.is_null() {
            return fail(EbfvmStatus::NullPointer, "null output handle");
        }
        let p = match text(path) {
            Ok(s) => s,
            Err(e) => return e,
        };
        match load_case(Path::new(p)) {
            Ok(cfg) => emit_case(cfg, out),
            Err(e) => fail(EbfvmStatus::Config, e.to_string()),
        }
    })
}

/// Overrides the coupling switches of a case.
///
/// # Safety
/// `case` must come from one of the `ebfvm_case_*` constructors.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_case_set_coupling(
    case: *mut EbfvmCase,
    isothermal: bool,
    equilibrium: bool,
) -> EbfvmStatus {
    guard(|| match case.as_mut() {
        None => fail(EbfvmStatus::NullPointer, "null case"),
        Some(c) => {
            c.cfg.coupling.isothermal = isothermal;
            c.cfg.coupling.equilibrium = equilibrium;
            EbfvmStatus::Ok
        }
    })
}

/// Sets the surface mesh resolution.
///
/// # Safety
/// `case` must come from one of the `ebfvm_case_*` constructors.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_case_set_mesh(
    case: *mut EbfvmCase,
    nx: usize,
    ny: usize,
    n_layers: usize,
) -> EbfvmStatus {
    guard(|| match case.as_mut() {
        None => fail(EbfvmStatus::NullPointer, "null case"),
        Some(_) if nx < 2 || ny < 2 || n_layers < 2 => fail(
            EbfvmStatus::Config,
            format!("mesh {nx}×{ny}×{n_layers}: every count must be at least 2"),
        ),
        Some(c) => {
            c.cfg.mesh.nx = nx;
            c.cfg.mesh.ny = ny;
            c.cfg.mesh.n_layers = n_layers;
            EbfvmStatus::Ok
        }
    })
}

/// Releases a case; null is ignored.
///
/// # Safety
/// `case` must come from an `ebfvm_case_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_case_free(case: *mut EbfvmCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Runs a case. On [`EbfvmStatus::Ok`] and [`EbfvmStatus::NotConverged`]
/// `*out` receives a results handle; otherwise it is set to null.
///
/// # Safety
/// `case` must be a live case handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_run(case: *const EbfvmCase, out: *mut *mut EbfvmResults) -> EbfvmStatus {
    guard(|| {
        if out.is_null() {
            return fail(EbfvmStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let Some(c) = case.as_ref() else {
            return fail(EbfvmStatus::NullPointer, "null case");
        };
        match run_case(&c.cfg, None) {
            Ok(results) => {
                let converged = results.converged;
                *out = Box::into_raw(Box::new(EbfvmResults { results }));
                if converged {
                    EbfvmStatus::Ok
                } else {
                    fail(EbfvmStatus::NotConverged, "outer loop did not converge")
                }
            }
            Err(e) => {
                let status = match e.exit_code() {
                    3 => EbfvmStatus::Config,
                    4 => EbfvmStatus::Contact,
                    2 => EbfvmStatus::NotConverged,
                    _ => EbfvmStatus::Failed,
                };
                fail(status, e.to_string())
            }
        }
    })
}

/// Releases results; null is ignored.
///
/// # Safety
/// `results` must come from [`ebfvm_run`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_results_free(results: *mut EbfvmResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// Number of surface nodes, or zero for a null handle.
///
/// # Safety
/// `results` must be null or a live results handle.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_results_node_count(results: *const EbfvmResults) -> usize {
    results.as_ref().map_or(0, |r| r.results.surface.nodes.len())
}

/// Copies a nodal field into `buf`, which must hold at least
/// `ebfvm_results_node_count` values. Temperatures are in kelvin.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_results_field(
    results: *const EbfvmResults,
    field: EbfvmField,
    buf: *mut f64,
    len: usize,
) -> EbfvmStatus {
    guard(|| {
        let Some(r) = results.as_ref() else {
            return fail(EbfvmStatus::NullPointer, "null results");
        };
        if buf.is_null() {
            return fail(EbfvmStatus::NullPointer, "null buffer");
        }
        let r = &r.results;
        let n = r.surface.nodes.len();
        if len < n {
            return fail(
                EbfvmStatus::BufferTooSmall,
                format!("buffer holds {len} values, {n} needed"),
            );
        }
        let out = std::slice::from_raw_parts_mut(buf, n);
        match field {
            EbfvmField::Pressure => out.copy_from_slice(&r.p),
            EbfvmField::FillFraction => out.copy_from_slice(&r.theta),
            EbfvmField::FilmThickness => out.copy_from_slice(&r.h),
            EbfvmField::MidplaneTemperature => out.copy_from_slice(&r.t_mid),
            EbfvmField::X | EbfvmField::Y => {
                let d = if field == EbfvmField::X { 0 } else { 1 };
                for (o, p) in out.iter_mut().zip(&r.surface.nodes) {
                    *o = p[d];
                }
            }
        }
        EbfvmStatus::Ok
    })
}

/// Film reaction `[W_X, W_Y, M_X, M_Y]` and journal position `[X, Y, A, B]`;
/// either pointer may be null.
///
/// # Safety
/// Non-null pointers must each hold four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_results_equilibrium(
    results: *const EbfvmResults,
    loads: *mut f64,
    position: *mut f64,
) -> EbfvmStatus {
    guard(|| {
        let Some(r) = results.as_ref() else {
            return fail(EbfvmStatus::NullPointer, "null results");
        };
        if !loads.is_null() {
            ptr::copy_nonoverlapping(r.results.loads.as_ptr(), loads, 4);
        }
        if !position.is_null() {
            ptr::copy_nonoverlapping(r.results.q.as_ptr(), position, 4);
        }
        EbfvmStatus::Ok
    })
}

/// Whether the outer loop met its tolerance.
///
/// # Safety
/// `results` must be null or a live results handle.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_results_converged(results: *const EbfvmResults) -> bool {
    results.as_ref().is_some_and(|r| r.results.converged)
}

/// Writes the output files selected by the case into `dir`.
///
/// # Safety
/// Handles must be live; `dir` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ebfvm_results_write(
    results: *const EbfvmResults,
    case: *const EbfvmCase,
    dir: *const c_char,
) -> EbfvmStatus {
    guard(|| {
        let (Some(r), Some(c)) = (results.as_ref(), case.as_ref()) else {
            return fail(EbfvmStatus::NullPointer, "null handle");
        };
        let d = match text(dir) {
            Ok(s) => s,
            Err(e) => return e,
        };
        match write_fields(&r.results, Path::new(d), &c.cfg.output) {
            Ok(_) => EbfvmStatus::Ok,
            Err(e) => fail(EbfvmStatus::Io, format!("{d}: {e}")),
        }
    })
}

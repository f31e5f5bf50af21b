//! C ABI over the speclab core.
//!
//! Matrices and matrix sets are opaque heap handles owned by the caller and
//! released with their `_free` function. Every entry point returns a
//! [`SpeclabStatus`]; on failure the message is available from
//! [`speclab_last_error`] on the same thread until the next call.
//!
//! Entries are passed as separate row-major real and imaginary arrays of
//! length `n * n`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use speclab::closure::AlgebraKind;
use speclab::harness::{load_matrix_set, parse_matrix_set, MatrixSet};
use speclab::numat::{is_nilpotent, spectrum};
use speclab::reduce::{triangularize, verdict_engine, TriangularizeOutcome};
use speclab::speccond::{t_stable_exact, Verdict};
use speclab::{Error, Matrix, Tolerance, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpeclabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InvalidMatrixSet = 5,
    DimensionMismatch = 6,
    Numerical = 7,
    Precondition = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpeclabAlgebraKind {
    Lie = 0,
    Jordan = 1,
}

/// Opaque square complex matrix.
pub struct SpeclabMatrix(Matrix);

/// Opaque validated matrix set.
pub struct SpeclabMatrixSet(MatrixSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpeclabStatus {
    match e {
        Error::Io { .. } => SpeclabStatus::Io,
        Error::Parse { .. } => SpeclabStatus::Parse,
        Error::InvalidMatrixSet { .. } | Error::UnknownMatrix(_) => SpeclabStatus::InvalidMatrixSet,
        Error::DimensionMismatch { .. } => SpeclabStatus::DimensionMismatch,
        Error::NotSquare { .. }
        | Error::NonFinite { .. }
        | Error::EmptyMatrix
        | Error::EmptyFamily
        | Error::InvalidTolerance { .. }
        | Error::InvalidProbes(_)
        | Error::InvalidConfig(_) => SpeclabStatus::InvalidArgument,
        Error::Precondition(_) => SpeclabStatus::Precondition,
        _ => SpeclabStatus::Numerical,
    }
}

struct Failure(SpeclabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SpeclabStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any error and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpeclabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpeclabStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SpeclabStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SpeclabStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn tolerance(atol: f64, rtol: f64) -> Result<Tolerance, Failure> {
    Ok(Tolerance::new(atol, rtol)?)
}

fn kind_of(kind: u32) -> Result<AlgebraKind, Failure> {
    match kind {
        k if k == SpeclabAlgebraKind::Lie as u32 => Ok(AlgebraKind::Lie),
        k if k == SpeclabAlgebraKind::Jordan as u32 => Ok(AlgebraKind::Jordan),
        other => Err(Failure(
            SpeclabStatus::InvalidArgument,
            format!("unknown algebra kind {other}"),
        )),
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next speclab call on the same thread.
#[no_mangle]
pub extern "C" fn speclab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, nul-terminated library version.
#[no_mangle]
pub extern "C" fn speclab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an `n x n` matrix from row-major real and imaginary parts.
///
/// # Safety
/// `re` and `im` must point to `n * n` readable doubles; `out_matrix` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_new(
    n: usize,
    re: *const f64,
    im: *const f64,
    out_matrix: *mut *mut SpeclabMatrix,
) -> SpeclabStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        if re.is_null() || im.is_null() {
            return Err(null("entries"));
        }
        if n == 0 {
            return Err(Error::EmptyMatrix.into());
        }
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure(SpeclabStatus::InvalidArgument, "n overflows".into()))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let rows: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|j| C64::new(re[i * n + j], im[i * n + j])).collect())
            .collect();
        *slot = Box::into_raw(Box::new(SpeclabMatrix(Matrix::from_rows(&rows)?)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_free(m: *mut SpeclabMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 when `m` is null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_dim(m: *const SpeclabMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Copies the entries of `m` into caller buffers of length `n * n`.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must point to `capacity`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_entries(
    m: *const SpeclabMatrix,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
) -> SpeclabStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.0;
        if re.is_null() || im.is_null() {
            return Err(null("buffer"));
        }
        let n = m.dim();
        if capacity < n * n {
            return Err(Failure(
                SpeclabStatus::BufferTooSmall,
                format!("need {} entries", n * n),
            ));
        }
        for i in 0..n {
            for j in 0..n {
                let z = m.get(i, j);
                *re.add(i * n + j) = z.re;
                *im.add(i * n + j) = z.im;
            }
        }
        Ok(())
    })
}

/// Loads a matrix set from a JSON file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out_set` must be writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_set_load(
    path: *const c_char,
    out_set: *mut *mut SpeclabMatrixSet,
) -> SpeclabStatus {
    guard(|| {
        let slot = out(out_set, "out_set")?;
        let set = load_matrix_set(c_str(path, "path")?)?;
        *slot = Box::into_raw(Box::new(SpeclabMatrixSet(set)));
        Ok(())
    })
}

/// Parses a matrix set from JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out_set` must be writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_set_parse(
    json: *const c_char,
    out_set: *mut *mut SpeclabMatrixSet,
) -> SpeclabStatus {
    guard(|| {
        let slot = out(out_set, "out_set")?;
        let set = parse_matrix_set(c_str(json, "json")?, std::path::Path::new("<memory>"))?;
        *slot = Box::into_raw(Box::new(SpeclabMatrixSet(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_set_free(set: *mut SpeclabMatrixSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of matrices in `set`, or 0 when `set` is null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_set_len(set: *const SpeclabMatrixSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.matrices.len())
}

/// Copies the matrix named `name` out of `set` into a new handle.
///
/// # Safety
/// `set` must be a live handle, `name` a nul-terminated string and
/// `out_matrix` writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_matrix_set_get(
    set: *const SpeclabMatrixSet,
    name: *const c_char,
    out_matrix: *mut *mut SpeclabMatrix,
) -> SpeclabStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let slot = out(out_matrix, "out_matrix")?;
        let m = set.get(c_str(name, "name")?)?.clone();
        *slot = Box::into_raw(Box::new(SpeclabMatrix(m)));
        Ok(())
    })
}

/// Eigenvalues of `m` with multiple eigenvalues polished to cluster
/// centroids. Writes `n` values and stores `n` in `out_len`.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must point to `capacity`
/// writable doubles; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_spectrum(
    m: *const SpeclabMatrix,
    atol: f64,
    rtol: f64,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> SpeclabStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.0;
        let len = out(out_len, "out_len")?;
        if re.is_null() || im.is_null() {
            return Err(null("buffer"));
        }
        *len = m.dim();
        if capacity < m.dim() {
            return Err(Failure(
                SpeclabStatus::BufferTooSmall,
                format!("need {} values", m.dim()),
            ));
        }
        let s = spectrum(m, &tolerance(atol, rtol)?)?;
        for (k, z) in s.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    })
}

/// Stores whether `m` is nilpotent.
///
/// # Safety
/// `m` must be a live handle and `out_nilpotent` writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_is_nilpotent(
    m: *const SpeclabMatrix,
    atol: f64,
    rtol: f64,
    out_nilpotent: *mut bool,
) -> SpeclabStatus {
    guard(|| {
        let m = &deref(m, "matrix")?.0;
        let slot = out(out_nilpotent, "out_nilpotent")?;
        *slot = is_nilpotent(m, &tolerance(atol, rtol)?)?;
        Ok(())
    })
}

/// Exact T-stability test: stores whether `det(t - A - lambda T)` is
/// independent of `lambda`.
///
/// # Safety
/// `a` and `t` must be live handles and `out_holds` writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_t_stable(
    a: *const SpeclabMatrix,
    t: *const SpeclabMatrix,
    atol: f64,
    rtol: f64,
    out_holds: *mut bool,
) -> SpeclabStatus {
    guard(|| {
        let a = &deref(a, "a")?.0;
        let t = &deref(t, "t")?.0;
        let slot = out(out_holds, "out_holds")?;
        *slot = t_stable_exact(a, t, &tolerance(atol, rtol)?)?.verdict == Verdict::Holds;
        Ok(())
    })
}

/// Simultaneous unitary triangularization of every matrix in `set`. On
/// success `out_triangularized` tells whether a full chain was found and
/// `out_residual` receives the worst relative below-diagonal residual (or
/// NaN when no chain exists).
///
/// # Safety
/// `set` must be a live handle; both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_triangularize(
    set: *const SpeclabMatrixSet,
    atol: f64,
    rtol: f64,
    seed: u64,
    out_triangularized: *mut bool,
    out_residual: *mut f64,
) -> SpeclabStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let done = out(out_triangularized, "out_triangularized")?;
        let residual = out(out_residual, "out_residual")?;
        match triangularize(&set.matrices, &tolerance(atol, rtol)?, seed)? {
            TriangularizeOutcome::Triangularized(chain) => {
                *done = true;
                *residual = set
                    .matrices
                    .iter()
                    .map(|m| chain.relative_residual(m))
                    .fold(0.0, f64::max);
            }
            TriangularizeOutcome::Failed(_) => {
                *done = false;
                *residual = f64::NAN;
            }
        }
        Ok(())
    })
}

/// Runs the theorem-verdict engine on the closure of `set` and returns the
/// verdict as a JSON string to be released with [`speclab_string_free`].
/// `kind` is a [`SpeclabAlgebraKind`] value.
///
/// # Safety
/// `set` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn speclab_verdict_json(
    set: *const SpeclabMatrixSet,
    kind: u32,
    atol: f64,
    rtol: f64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> SpeclabStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let slot = out(out_json, "out_json")?;
        let v = verdict_engine(&set.matrices, kind_of(kind)?, &tolerance(atol, rtol)?, seed)?;
        let text = serde_json::to_string(&v).expect("verdicts serialize");
        *slot = CString::new(text).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn speclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

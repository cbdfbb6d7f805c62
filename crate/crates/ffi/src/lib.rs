//! C ABI for `rrpath`.
//!
//! Rough paths are passed around as opaque `RrpPath` handles. Every fallible call returns an
//! `RrpStatus`; on failure the message is available from `rrp_last_error` on the same thread.
//! Arrays are row-major `double` buffers whose capacity is given in elements.

use rrpath::config::{lift, parse_field, Lift};
use rrpath::controlled::{ControlledIntegrand, ControlledVector};
use rrpath::drivers::gen_fbm;
use rrpath::sewing::integrate_values;
use rrpath::solver::{solve_global, SolverConfig};
use rrpath::{Error, Grid, GridPath, PairBudget, ReducedRoughPath, Vector};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RrpStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad dimensions, indices, grids, field specs or configuration.
    InvalidArgument = 2,
    /// Hölder exponent or Hurst index outside (1/3, 1/2].
    InvalidExponent = 3,
    /// The numerical procedure failed (non-convergence, step underflow, non-finite values).
    Numerical = 4,
    Io = 5,
    /// Output buffer too small; the required length was written where the call allows it.
    BufferTooSmall = 6,
    Panic = 7,
}

/// Second-level enhancement built by `rrp_path_lift`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RrpLift {
    Geometric = 0,
    /// Geometric lift plus `φ_t = −(t/2) Id`.
    Ito = 1,
}

/// Which grid pairs seminorm scans visit.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RrpBudget {
    Auto = 0,
    AllPairs = 1,
    Dyadic = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RrpNorms {
    pub x_alpha: f64,
    pub s_2alpha: f64,
    pub total: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RrpSolveInfo {
    /// `sup_t |Y_t − ξ − ∫₀ᵗ F(Y) d𝕏|`.
    pub residual: f64,
    /// Working exponent of the solver.
    pub alpha: f64,
    /// Number of accepted windows.
    pub windows: usize,
}

/// Opaque reduced rough path.
pub struct RrpPath {
    inner: Arc<ReducedRoughPath>,
}

enum Failure {
    Status(RrpStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RrpStatus {
    match e {
        _ if e.is_numerical() => RrpStatus::Numerical,
        Error::InvalidExponent { .. } | Error::InvalidHurst(_) | Error::ExponentMismatch(..) => RrpStatus::InvalidExponent,
        Error::Segment { source, .. } => status_of(source),
        Error::Io(_) => RrpStatus::Io,
        _ => RrpStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> RrpStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return RrpStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => (s, msg),
        Ok(Err(Failure::Core(e))) => (status_of(&e), e.to_string()),
        Err(_) => (RrpStatus::Panic, "internal panic".to_string()),
    };
    set_last_error(msg);
    status
}

fn null() -> Failure {
    Failure::Status(RrpStatus::NullPointer, "null pointer argument".into())
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Status(RrpStatus::InvalidArgument, msg.into())
}

unsafe fn handle<'a>(h: *const RrpPath) -> FfiResult<&'a RrpPath> {
    h.as_ref().ok_or_else(null)
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> FfiResult<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn c_str<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not valid UTF-8"))
}

/// Copies `values` into `out`, or reports the shortfall.
unsafe fn write_out(values: &[f64], out: *mut f64, capacity: usize) -> FfiResult<()> {
    if capacity < values.len() {
        return Err(Failure::Status(
            RrpStatus::BufferTooSmall,
            format!("output needs {} elements, buffer holds {capacity}", values.len()),
        ));
    }
    if out.is_null() {
        return Err(null());
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn flatten(path: &GridPath<Vector>) -> Vec<f64> {
    path.values().iter().flat_map(|v| v.as_slice().iter().copied()).collect()
}

fn budget(b: RrpBudget) -> PairBudget {
    match b {
        RrpBudget::Auto => PairBudget::Auto,
        RrpBudget::AllPairs => PairBudget::AllPairs,
        RrpBudget::Dyadic => PairBudget::Dyadic,
    }
}

fn into_handle(r: ReducedRoughPath, out: *mut *mut RrpPath) -> FfiResult<()> {
    if out.is_null() {
        return Err(null());
    }
    unsafe { *out = Box::into_raw(Box::new(RrpPath { inner: Arc::new(r) })) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rrp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (truncated, always NUL-terminated
/// when `len > 0`). Returns the full message length including the terminator, 0 if none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn rrp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Lifts the sampled path (`points` rows of `dim` values on the increasing grid `times`).
///
/// # Safety
/// `times` holds `points` values, `values` holds `points * dim`, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_lift(
    times: *const f64,
    values: *const f64,
    points: usize,
    dim: usize,
    alpha: f64,
    kind: RrpLift,
    out: *mut *mut RrpPath,
) -> RrpStatus {
    guard(|| {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let times = slice(times, points)?.to_vec();
        let values = slice(values, points.checked_mul(dim).ok_or_else(|| invalid("size overflow"))?)?;
        let grid = Arc::new(Grid::new(times)?);
        let rows = values.chunks(dim).map(<[f64]>::to_vec).collect();
        let path = GridPath::from_rows(grid, rows)?;
        let kind = match kind {
            RrpLift::Geometric => Lift::Geometric,
            RrpLift::Ito => Lift::Ito,
        };
        into_handle(lift(path, alpha, kind)?, out)
    })
}

/// Loads a rough path saved by `rrp_path_save` or the `rrpath lift` command.
///
/// # Safety
/// `path` is a NUL-terminated string, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_load(path: *const c_char, out: *mut *mut RrpPath) -> RrpStatus {
    guard(|| into_handle(ReducedRoughPath::load(Path::new(c_str(path)?))?, out))
}

/// # Safety
/// `h` is a live handle, `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_save(h: *const RrpPath, path: *const c_char) -> RrpStatus {
    guard(|| Ok(handle(h)?.inner.save(Path::new(c_str(path)?))?))
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_free(h: *mut RrpPath) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Dimension of the driver; 0 for a null handle.
///
/// # Safety
/// `h` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_dim(h: *const RrpPath) -> usize {
    h.as_ref().map_or(0, |p| p.inner.dim())
}

/// Number of grid points; 0 for a null handle.
///
/// # Safety
/// `h` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_points(h: *const RrpPath) -> usize {
    h.as_ref().map_or(0, |p| p.inner.grid().points())
}

/// Hölder exponent; NaN for a null handle.
///
/// # Safety
/// `h` is a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_alpha(h: *const RrpPath) -> f64 {
    h.as_ref().map_or(f64::NAN, |p| p.inner.alpha())
}

/// # Safety
/// `h` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_norms(h: *const RrpPath, pairs: RrpBudget, out: *mut RrpNorms) -> RrpStatus {
    guard(|| {
        let n = handle(h)?.inner.norms(budget(pairs));
        let out = out.as_mut().ok_or_else(null)?;
        *out = RrpNorms { x_alpha: n.x_alpha, s_2alpha: n.s_2alpha, total: n.total };
        Ok(())
    })
}

/// Writes `S_{t_i, t_j}` as a `dim × dim` row-major matrix.
///
/// # Safety
/// `h` is a live handle, `out` holds `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_second_level(h: *const RrpPath, i: usize, j: usize, out: *mut f64, capacity: usize) -> RrpStatus {
    guard(|| {
        let r = &handle(h)?.inner;
        let s = r.second_level(i, j)?;
        let d = r.dim();
        let flat: Vec<f64> = (0..d * d).map(|k| s.get(k / d, k % d)).collect();
        write_out(&flat, out, capacity)
    })
}

/// Frobenius norm of `S_ik − S_ij − S_jk − Sym(X_ij ⊗ X_jk)`.
///
/// # Safety
/// `h` is a live handle, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn rrp_path_chen_defect(h: *const RrpPath, i: usize, j: usize, k: usize, out: *mut f64) -> RrpStatus {
    guard(|| {
        let d = handle(h)?.inner.chen_defect(i, j, k)?;
        *out.as_mut().ok_or_else(null)? = d;
        Ok(())
    })
}

/// Rough integral `t ↦ ∫₀ᵗ F(X) d𝕏` on every grid point. `field` is a field spec such as
/// `"sin"`, or `"driver"` for `∫ ⟨X, dX⟩`. Writes `points × out_dim` values and
/// sets `*out_dim`, also when the buffer is too small.
///
/// # Safety
/// `h` is a live handle, `field` a NUL-terminated string, `out` holds `capacity` doubles and
/// `out_dim` is writable.
#[no_mangle]
pub unsafe extern "C" fn rrp_integrate(
    h: *const RrpPath,
    field: *const c_char,
    out: *mut f64,
    capacity: usize,
    out_dim: *mut usize,
) -> RrpStatus {
    guard(|| {
        let r = handle(h)?.inner.clone();
        let spec = c_str(field)?;
        let c = match spec {
            "driver" => ControlledIntegrand::driver_identity(r.clone())?,
            _ => ControlledVector::driver(r.clone())?.compose_integrand(&parse_field(spec, r.dim(), r.dim())?)?,
        };
        let values = integrate_values(&c, &r)?;
        *out_dim.as_mut().ok_or_else(null)? = values.first().dim();
        write_out(&flatten(&values), out, capacity)
    })
}

/// Solves `dY = F(Y) d𝕏`, `Y_0 = ξ` with default solver settings, writing `points × n`
/// values. `field` is a field spec (`"linear:[[1]]"`, `"sin"`, ...); `info` may be null.
///
/// # Safety
/// `h` is a live handle, `field` a NUL-terminated string, `xi` holds `n` doubles, `out` holds
/// `capacity` doubles, `info` is writable or null.
#[no_mangle]
pub unsafe extern "C" fn rrp_solve(
    h: *const RrpPath,
    field: *const c_char,
    xi: *const f64,
    n: usize,
    out: *mut f64,
    capacity: usize,
    info: *mut RrpSolveInfo,
) -> RrpStatus {
    guard(|| {
        let r = handle(h)?.inner.clone();
        if n == 0 {
            return Err(invalid("state dimension must be positive"));
        }
        let xi = Vector::new(slice(xi, n)?.to_vec())?;
        let f = parse_field(c_str(field)?, n, r.dim())?;
        let rep = solve_global(&xi, &f, &r, &SolverConfig::default())?;
        write_out(&flatten(rep.solution.y()), out, capacity)?;
        if let Some(info) = info.as_mut() {
            *info = RrpSolveInfo { residual: rep.residual_norm, alpha: rep.alpha, windows: rep.steps.len() };
        }
        Ok(())
    })
}

/// Samples `dim` independent fBm components on the uniform grid of `steps` steps over
/// `[0, horizon]`, writing `(steps + 1) × dim` values.
///
/// # Safety
/// `out` holds `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn rrp_fbm_sample(
    hurst: f64,
    dim: usize,
    steps: usize,
    horizon: f64,
    seed: u64,
    out: *mut f64,
    capacity: usize,
) -> RrpStatus {
    guard(|| {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let grid = Arc::new(Grid::uniform(steps, horizon)?);
        let x = gen_fbm(hurst, dim, seed, grid)?;
        write_out(&flatten(&x), out, capacity)
    })
}

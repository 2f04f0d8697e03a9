//! C ABI over degenfrac. Every entry point returns an `int32_t` status (`DFRC_OK` on success);
//! on failure the message is kept per thread and read back with `dfrc_last_error_message`.
//! Models are opaque handles created with `dfrc_model_new` and released with `dfrc_model_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use degenfrac::contour_solver::admissible_nu_bound;
use degenfrac::degenerate_solver::solve_modewise;
use degenfrac::physics_models::{default_grid, named_model, NamedModel};
use degenfrac::spectral_calculus::{SpectralField, SpectralGrid, Space};
use degenfrac::special_functions::MittagLeffler;
use degenfrac::verify::{run_criterion, VerifyOptions};
use degenfrac::{Error, C64};

pub const DFRC_OK: i32 = 0;
/// A required pointer argument was null.
pub const DFRC_ERR_NULL: i32 = 1;
/// Buffer length does not match what the call needs.
pub const DFRC_ERR_LENGTH: i32 = 2;
/// String argument is not valid UTF-8.
pub const DFRC_ERR_UTF8: i32 = 3;
pub const DFRC_ERR_UNKNOWN_MODEL: i32 = 4;
pub const DFRC_ERR_BAD_PARAMS: i32 = 5;
pub const DFRC_ERR_DOMAIN: i32 = 6;
pub const DFRC_ERR_NONCONVERGENCE: i32 = 7;
pub const DFRC_ERR_SINGULAR: i32 = 8;
/// Any other numerical failure.
pub const DFRC_ERR_NUMERICAL: i32 = 9;
pub const DFRC_ERR_CONFIG: i32 = 10;
/// A Rust panic was caught at the boundary.
pub const DFRC_ERR_PANIC: i32 = 11;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn code_for(e: &Error) -> i32 {
    match e {
        Error::UnknownModel { .. } => DFRC_ERR_UNKNOWN_MODEL,
        Error::BadParams(_) | Error::BadExponents(_) => DFRC_ERR_BAD_PARAMS,
        Error::DomainError(_) | Error::BranchCut(_) => DFRC_ERR_DOMAIN,
        Error::NonConvergence { .. } => DFRC_ERR_NONCONVERGENCE,
        Error::SingularSymbol { .. } | Error::PencilSingular(_) => DFRC_ERR_SINGULAR,
        Error::Config(_) | Error::Io(_) | Error::Json(_) => DFRC_ERR_CONFIG,
        _ => DFRC_ERR_NUMERICAL,
    }
}

/// Runs `f`, records the error text, and converts errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DFRC_OK
        }
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DFRC_ERR_PANIC
        }
    }
}

fn lib(e: Error) -> (i32, String) {
    (code_for(&e), e.to_string())
}

fn null(name: &str) -> (i32, String) {
    (DFRC_ERR_NULL, format!("{name} is null"))
}

/// Copies the calling thread's last error message (NUL-terminated, truncated to `len`) into
/// `buf` and returns the full message length plus one. Pass a null `buf` to query the size.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dfrc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dfrc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// E_{β,γ}(z).
///
/// # Safety
/// `out_re` and `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dfrc_ml_eval(beta: f64, gamma: f64, z_re: f64, z_im: f64, out_re: *mut f64, out_im: *mut f64) -> i32 {
    guard(|| {
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output pointer"));
        }
        let v = MittagLeffler::with(beta, gamma).and_then(|ml| ml.eval(C64::new(z_re, z_im))).map_err(lib)?;
        *out_re = v.re;
        *out_im = v.im;
        Ok(())
    })
}

/// Admissible upper bound for ν′ given exponents q_0 = 0 < q_1 ≤ … ≤ q_n.
///
/// # Safety
/// `q` must point to `n` readable values and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dfrc_admissible_nu_bound(q: *const u32, n: usize, out: *mut f64) -> i32 {
    guard(|| {
        if q.is_null() || out.is_null() {
            return Err(null("q or out"));
        }
        *out = admissible_nu_bound(std::slice::from_raw_parts(q, n)).map_err(lib)?;
        Ok(())
    })
}

/// Opaque model handle: a registry model with its grid.
pub struct DfrcModel {
    model: NamedModel,
    grid: SpectralGrid,
}

/// Creates a registry model ("rossby", "sobolev", …) on its default grid.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dfrc_model_new(name: *const c_char, out: *mut *mut DfrcModel) -> i32 {
    guard(|| {
        if name.is_null() || out.is_null() {
            return Err(null("name or out"));
        }
        *out = ptr::null_mut();
        let name = CStr::from_ptr(name).to_str().map_err(|e| (DFRC_ERR_UTF8, e.to_string()))?;
        let model = named_model(name).map_err(lib)?;
        let grid = default_grid(name).map_err(lib)?;
        *out = Box::into_raw(Box::new(DfrcModel { model, grid }));
        Ok(())
    })
}

/// Releases a handle from `dfrc_model_new`; null is ignored.
///
/// # Safety
/// `model` must be null or a live handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dfrc_model_free(model: *mut DfrcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Replaces the grid with `sizes[0..n]` (powers of two ≥ 4, period 2π per axis).
///
/// # Safety
/// `model` must be a live handle and `sizes` must point to `n` readable values.
#[no_mangle]
pub unsafe extern "C" fn dfrc_model_set_grid(model: *mut DfrcModel, sizes: *const usize, n: usize) -> i32 {
    guard(|| {
        let model = model.as_mut().ok_or_else(|| null("model"))?;
        if sizes.is_null() {
            return Err(null("sizes"));
        }
        let sizes = std::slice::from_raw_parts(sizes, n).to_vec();
        if sizes.len() != model.model.spec.n() {
            return Err((
                DFRC_ERR_BAD_PARAMS,
                format!("grid has {} axes, model has {} variables", sizes.len(), model.model.spec.n()),
            ));
        }
        model.grid = SpectralGrid::new(sizes.clone(), vec![2.0 * std::f64::consts::PI; sizes.len()]).map_err(lib)?;
        Ok(())
    })
}

/// Component count m, spatial dimension n and grid point count.
///
/// # Safety
/// `model` must be a live handle; each output pointer must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dfrc_model_dims(model: *const DfrcModel, m: *mut usize, n: *mut usize, points: *mut usize) -> i32 {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if let Some(m) = m.as_mut() {
            *m = model.model.spec.m();
        }
        if let Some(n) = n.as_mut() {
            *n = model.grid.n;
        }
        if let Some(p) = points.as_mut() {
            *p = model.grid.total();
        }
        Ok(())
    })
}

/// Mode-wise solution at z = t_re + i·t_im. `data` and `out` hold physical-side fields as
/// interleaved (re, im) pairs, component-major, row-major grid order: `len` = 2·m·points doubles.
///
/// # Safety
/// `model` must be a live handle; `data` and `out` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dfrc_solve_modewise(
    model: *const DfrcModel,
    data: *const f64,
    t_re: f64,
    t_im: f64,
    out: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if data.is_null() || out.is_null() {
            return Err(null("data or out"));
        }
        let m = model.model.spec.m();
        let need = 2 * m * model.grid.total();
        if len != need {
            return Err((DFRC_ERR_LENGTH, format!("expected {need} doubles, got {len}")));
        }
        let raw = std::slice::from_raw_parts(data, len);
        let values = raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        let x = SpectralField::new(&model.grid, m, values, Space::Physical).map_err(lib)?;
        let bundle = solve_modewise(&model.model.spec, &x, &[C64::new(t_re, t_im)]).map_err(lib)?;
        let u = bundle.physical(0).map_err(lib)?;
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (d, v) in dst.chunks_exact_mut(2).zip(&u.data) {
            d[0] = v.re;
            d[1] = v.im;
        }
        Ok(())
    })
}

/// Runs one verification criterion (1..14) with the given seed over all registry models;
/// `passed` receives 1 or 0.
///
/// # Safety
/// `passed` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dfrc_verify_criterion(id: u32, seed: u64, passed: *mut i32) -> i32 {
    guard(|| {
        if passed.is_null() {
            return Err(null("passed"));
        }
        if !(1..=14).contains(&id) {
            return Err((DFRC_ERR_BAD_PARAMS, format!("unknown criterion {id} (valid: 1..14)")));
        }
        let opts = VerifyOptions { seed, criteria: vec![id], ..Default::default() };
        let outcome = run_criterion(id, &opts);
        *passed = outcome.pass() as i32;
        if let Some(r) = outcome.worst() {
            set_error(format!("{}: observed {:e}, tolerance {:e}", r.check, r.observed, r.tolerance));
        }
        Ok(())
    })
}

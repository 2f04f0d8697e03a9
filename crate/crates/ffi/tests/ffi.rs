use std::ffi::{CStr, CString};
use std::ptr;

use degenfrac::degenerate_solver::solve_modewise;
use degenfrac::physics_models::named_model;
use degenfrac::spectral_calculus::{Space, SpectralField, SpectralGrid};
use degenfrac::C64;
use degenfrac_ffi::*;

fn last_error() -> String {
    unsafe {
        let need = dfrc_last_error_message(ptr::null_mut(), 0);
        let mut buf = vec![0 as std::ffi::c_char; need];
        dfrc_last_error_message(buf.as_mut_ptr(), need);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn new_model(name: &str) -> *mut DfrcModel {
    let name = CString::new(name).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { dfrc_model_new(name.as_ptr(), &mut h) }, DFRC_OK, "{}", last_error());
    assert!(!h.is_null());
    h
}

#[test]
fn ml_exponential() {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { dfrc_ml_eval(1.0, 1.0, 1.0, 0.0, &mut re, &mut im) }, DFRC_OK);
    assert!((re - std::f64::consts::E).abs() < 1e-13 && im.abs() < 1e-13);
}

#[test]
fn ml_rejects_bad_order() {
    let (mut re, mut im) = (0.0, 0.0);
    let code = unsafe { dfrc_ml_eval(-1.0, 1.0, 1.0, 0.0, &mut re, &mut im) };
    assert_ne!(code, DFRC_OK);
    assert!(!last_error().is_empty());
}

#[test]
fn null_outputs_are_reported() {
    assert_eq!(unsafe { dfrc_ml_eval(1.0, 1.0, 0.0, 0.0, ptr::null_mut(), ptr::null_mut()) }, DFRC_ERR_NULL);
    assert_eq!(unsafe { dfrc_model_new(ptr::null(), ptr::null_mut()) }, DFRC_ERR_NULL);
    assert_eq!(unsafe { dfrc_model_dims(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) }, DFRC_ERR_NULL);
    unsafe { dfrc_model_free(ptr::null_mut()) };
}

#[test]
fn nu_bound_matches_core() {
    let q = [0u32, 2, 2];
    let mut out = 0.0;
    assert_eq!(unsafe { dfrc_admissible_nu_bound(q.as_ptr(), q.len(), &mut out) }, DFRC_OK);
    let expected = degenfrac::contour_solver::admissible_nu_bound(&q).unwrap();
    assert_eq!(out, expected);
}

#[test]
fn unknown_model_lists_valid_names() {
    let name = CString::new("rosby").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { dfrc_model_new(name.as_ptr(), &mut h) }, DFRC_ERR_UNKNOWN_MODEL);
    assert!(h.is_null());
    assert!(last_error().contains("rossby"));
}

#[test]
fn truncated_error_message_is_terminated() {
    let name = CString::new("nope").unwrap();
    let mut h = ptr::null_mut();
    unsafe { dfrc_model_new(name.as_ptr(), &mut h) };
    let mut buf = [1 as std::ffi::c_char; 4];
    let need = unsafe { dfrc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(need > buf.len());
    assert_eq!(buf[3], 0);
}

#[test]
fn solve_matches_core() {
    let h = new_model("rossby");
    let sizes = [8usize, 8];
    assert_eq!(unsafe { dfrc_model_set_grid(h, sizes.as_ptr(), sizes.len()) }, DFRC_OK, "{}", last_error());
    let (mut m, mut n, mut points) = (0, 0, 0);
    assert_eq!(unsafe { dfrc_model_dims(h, &mut m, &mut n, &mut points) }, DFRC_OK);
    assert_eq!((n, points), (2, 64));

    let len = 2 * m * points;
    let data: Vec<f64> = (0..len).map(|k| ((k * 37 % 11) as f64 - 5.0) / 7.0).collect();
    let mut out = vec![0.0; len];
    let code = unsafe { dfrc_solve_modewise(h, data.as_ptr(), 0.5, 0.0, out.as_mut_ptr(), len) };
    assert_eq!(code, DFRC_OK, "{}", last_error());

    let grid = SpectralGrid::cube(2, 8, 2.0 * std::f64::consts::PI).unwrap();
    let values = data.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
    let x = SpectralField::new(&grid, m, values, Space::Physical).unwrap();
    let spec = named_model("rossby").unwrap().spec;
    let u = solve_modewise(&spec, &x, &[C64::new(0.5, 0.0)]).unwrap().physical(0).unwrap();
    for (pair, v) in out.chunks_exact(2).zip(&u.data) {
        assert!((pair[0] - v.re).abs() < 1e-14 && (pair[1] - v.im).abs() < 1e-14);
    }
    unsafe { dfrc_model_free(h) };
}

#[test]
fn solve_rejects_wrong_length() {
    let h = new_model("sobolev");
    let data = vec![0.0; 10];
    let mut out = vec![0.0; 10];
    let code = unsafe { dfrc_solve_modewise(h, data.as_ptr(), 1.0, 0.0, out.as_mut_ptr(), 10) };
    assert_eq!(code, DFRC_ERR_LENGTH);
    assert!(last_error().contains("expected"));
    unsafe { dfrc_model_free(h) };
}

#[test]
fn grid_axis_mismatch() {
    let h = new_model("sobolev");
    let sizes = [8usize, 8];
    assert_eq!(unsafe { dfrc_model_set_grid(h, sizes.as_ptr(), 2) }, DFRC_ERR_BAD_PARAMS);
    let sizes = [8usize, 6, 8];
    assert_eq!(unsafe { dfrc_model_set_grid(h, sizes.as_ptr(), 3) }, DFRC_ERR_DOMAIN);
    unsafe { dfrc_model_free(h) };
}

#[test]
fn verify_criterion_runs() {
    let mut passed = -1;
    assert_eq!(unsafe { dfrc_verify_criterion(5, 7, &mut passed) }, DFRC_OK, "{}", last_error());
    assert_eq!(passed, 1);
    assert_eq!(unsafe { dfrc_verify_criterion(99, 7, &mut passed) }, DFRC_ERR_BAD_PARAMS);
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(dfrc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_exports() {
    let header = include_str!("../include/degenfrac.h");
    for f in [
        "dfrc_last_error_message",
        "dfrc_version",
        "dfrc_ml_eval",
        "dfrc_admissible_nu_bound",
        "dfrc_model_new",
        "dfrc_model_free",
        "dfrc_model_set_grid",
        "dfrc_model_dims",
        "dfrc_solve_modewise",
        "dfrc_verify_criterion",
        "typedef struct DfrcModel DfrcModel",
        "#define DFRC_ERR_PANIC 11",
    ] {
        assert!(header.contains(f), "header is missing {f}");
    }
}

/// Compiles the C example against the static library when a C compiler is on PATH.
#[test]
fn c_smoke_program() {
    let Ok(exe) = std::env::current_exe() else { return };
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libdegenfrac_ffi.a");
    if !lib.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let crate_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("dfrc_smoke");
    let status = std::process::Command::new("cc")
        .arg(crate_dir.join("examples/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&out).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}");
    assert!(stdout.contains("E_1(1) = 2.718281828459045"));
    assert!(stdout.contains("n=2 points=1024"));
}

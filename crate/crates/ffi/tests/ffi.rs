use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cavent_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cavent_last_error_message()) }.to_string_lossy().into_owned()
}

fn set(p: *mut CaventParams, key: &str, value: f64) -> CaventStatus {
    let k = CString::new(key).unwrap();
    unsafe { cavent_params_set(p, k.as_ptr(), value) }
}

#[test]
fn eigensystem_has_zero_mode_and_unit_vectors() {
    let p = cavent_params_new_dispersive(0.7);
    let mut e = [0.0; 3];
    let mut v = [0.0; 9];
    assert_eq!(unsafe { cavent_eigensystem(p, e.as_mut_ptr(), v.as_mut_ptr()) }, CaventStatus::Ok);
    assert_eq!(e[0], 0.0);
    assert!(e[1] < 0.0 && e[2] > 0.0);
    for k in 0..3 {
        let n: f64 = v[3 * k..3 * k + 3].iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
    unsafe { cavent_params_free(p) };
}

#[test]
fn params_set_validates() {
    let p = cavent_params_new_dispersive(1.0);
    assert_eq!(set(p, "g2_over_g1", 0.5), CaventStatus::Ok);
    assert_eq!(set(p, "no_such_key", 1.0), CaventStatus::InvalidArgument);
    assert!(last_error().contains("no_such_key"));
    assert_eq!(set(p, "n_max", 2.5), CaventStatus::InvalidArgument);
    assert_eq!(set(p, "kappa", -1.0), CaventStatus::InvalidArgument);
    assert_eq!(set(p, "eps2", 12.0), CaventStatus::Ok);
    let mut e = [0.0; 3];
    let mut v = [0.0; 9];
    assert_eq!(unsafe { cavent_eigensystem(p, e.as_mut_ptr(), v.as_mut_ptr()) }, CaventStatus::Numerical);
    assert!(!last_error().is_empty());
    unsafe { cavent_params_free(p) };
}

#[test]
fn null_pointers_are_reported() {
    let mut out = 0.0;
    assert_eq!(unsafe { cavent_closed_concurrence(ptr::null(), 1.0, &mut out) }, CaventStatus::NullPointer);
    assert!(last_error().contains("params"));
    assert_eq!(unsafe { cavent_concurrence(ptr::null(), &mut out) }, CaventStatus::NullPointer);
    let p = cavent_params_new_dispersive(1.0);
    assert_eq!(unsafe { cavent_mes_lapse(p, ptr::null_mut(), &mut out) }, CaventStatus::NullPointer);
    unsafe { cavent_params_free(p) };
    unsafe { cavent_params_free(ptr::null_mut()) };
}

#[test]
fn concurrence_of_bell_state_and_mixture() {
    // (|01> + |10>)/sqrt(2)
    let mut rho = [0.0; 32];
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        rho[2 * (4 * i + j)] = 0.5;
    }
    let mut c = 0.0;
    assert_eq!(unsafe { cavent_concurrence(rho.as_ptr(), &mut c) }, CaventStatus::Ok);
    assert!((c - 1.0).abs() < 1e-12);

    let mut mixed = [0.0; 32];
    for k in 0..4 {
        mixed[2 * (4 * k + k)] = 0.25;
    }
    assert_eq!(unsafe { cavent_concurrence(mixed.as_ptr(), &mut c) }, CaventStatus::Ok);
    assert!(c.abs() < 1e-12);

    mixed[0] = 2.0;
    assert_eq!(unsafe { cavent_concurrence(mixed.as_ptr(), &mut c) }, CaventStatus::InvalidArgument);
}

#[test]
fn closed_effective_and_lapse() {
    let p = cavent_params_new_dispersive(1.0);
    let t = std::f64::consts::PI * 10.0;
    let (mut exact, mut eff) = (0.0, 0.0);
    unsafe {
        assert_eq!(cavent_closed_concurrence(p, t, &mut exact), CaventStatus::Ok);
        assert_eq!(cavent_effective_concurrence(p, t, &mut eff), CaventStatus::Ok);
    }
    assert!((eff - 1.0).abs() < 1e-12);
    assert!((exact - eff).abs() < 0.02);

    let (mut lapse, mut period) = (0.0, 0.0);
    assert_eq!(unsafe { cavent_mes_lapse(p, &mut lapse, &mut period) }, CaventStatus::Ok);
    assert!((period - 2.0 * std::f64::consts::PI * 40.0 / 2.0).abs() < 1e-9);
    // g2 = g1 gives theta = pi/2, so the lapse is half the period
    assert!((lapse - period / 2.0).abs() < 1e-9);
    assert_eq!(set(p, "g2_over_g1", 0.3), CaventStatus::Ok);
    assert_eq!(unsafe { cavent_mes_lapse(p, &mut lapse, &mut period) }, CaventStatus::Ok);
    assert!(lapse.is_nan());
    unsafe { cavent_params_free(p) };
    assert!((cavent_mes_threshold_ratio() - (3.0 - 2.0 * 2f64.sqrt()).sqrt()).abs() < 1e-15);
}

#[test]
fn steady_state_concurrence_matches_core() {
    let p = cavent_params_new_open(1.0, 0.05);
    assert_eq!(set(p, "n_max", 3.0), CaventStatus::Ok);
    let mut e = 0.0;
    assert_eq!(unsafe { cavent_steady_state_concurrence(p, &mut e) }, CaventStatus::Ok);
    let core = cavent::open::steady_state_concurrence(&cavent::model::ModelParams {
        n_max: 3,
        ..cavent::model::ModelParams::open_resonant(1.0, 0.05)
    })
    .unwrap();
    assert_eq!(e, core);
    unsafe { cavent_params_free(p) };
}

#[test]
fn run_scenario_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let name = CString::new("eigvec-coeff-sweep").unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let ov = CString::new("r_step=0.5").unwrap();
    let ovs = [ov.as_ptr()];
    let status = unsafe { cavent_run_scenario(name.as_ptr(), out.as_ptr(), ovs.as_ptr(), 1, 1) };
    assert_eq!(status, CaventStatus::Ok, "{}", last_error());
    assert!(dir.path().join("eigvec-coeff-sweep.csv").exists());

    let bad = CString::new("nope").unwrap();
    let status = unsafe { cavent_run_scenario(bad.as_ptr(), out.as_ptr(), ptr::null(), 0, 0) };
    assert_eq!(status, CaventStatus::InvalidArgument);
    assert_eq!(unsafe { cavent_run_scenario(name.as_ptr(), out.as_ptr(), ptr::null(), 2, 0) }, CaventStatus::NullPointer);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(cavent_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cavent.h")).unwrap();
    for f in [
        "cavent_params_new_dispersive",
        "cavent_params_new_open",
        "cavent_params_free",
        "cavent_params_set",
        "cavent_eigensystem",
        "cavent_closed_concurrence",
        "cavent_effective_concurrence",
        "cavent_mes_lapse",
        "cavent_mes_threshold_ratio",
        "cavent_steady_state_concurrence",
        "cavent_concurrence",
        "cavent_run_scenario",
        "cavent_last_error_message",
        "cavent_version",
        "CAVENT_STATUS_PANIC = 5",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
}

/// Directory holding the static library built alongside this test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libcavent_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping C link test: no C compiler or static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "cavent.h"
int main(void) {
    CaventParams *p = cavent_params_new_dispersive(1.0);
    double e[3], v[9], c;
    if (cavent_eigensystem(p, e, v) != CAVENT_STATUS_OK || e[0] != 0.0) return 1;
    if (cavent_effective_concurrence(p, 31.41592653589793, &c) != CAVENT_STATUS_OK) return 2;
    if (fabs(c - 1.0) > 1e-9) return 3;
    if (cavent_params_set(p, "bogus", 1.0) != CAVENT_STATUS_INVALID_ARGUMENT) return 4;
    cavent_params_free(p);
    printf("%s\n", cavent_version());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use speclab_ffi::*;

fn data(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = speclab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(name: &str) -> *mut SpeclabMatrixSet {
    let mut set = ptr::null_mut();
    assert_eq!(
        unsafe { speclab_matrix_set_load(data(name).as_ptr(), &mut set) },
        SpeclabStatus::Ok
    );
    set
}

#[test]
fn matrix_round_trip_and_spectrum() {
    let re = [2.0, 1.0, 0.0, 3.0];
    let im = [0.0, 0.0, 0.0, -1.0];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(
            speclab_matrix_new(2, re.as_ptr(), im.as_ptr(), &mut m),
            SpeclabStatus::Ok
        );
        assert_eq!(speclab_matrix_dim(m), 2);
        let (mut r, mut i) = ([0.0; 4], [0.0; 4]);
        assert_eq!(
            speclab_matrix_entries(m, r.as_mut_ptr(), i.as_mut_ptr(), 4),
            SpeclabStatus::Ok
        );
        assert_eq!((r, i), (re, im));
        assert_eq!(
            speclab_matrix_entries(m, r.as_mut_ptr(), i.as_mut_ptr(), 3),
            SpeclabStatus::BufferTooSmall
        );

        let (mut sr, mut si, mut len) = ([0.0; 2], [0.0; 2], 0usize);
        assert_eq!(
            speclab_spectrum(m, 1e-12, 1e-9, sr.as_mut_ptr(), si.as_mut_ptr(), 2, &mut len),
            SpeclabStatus::Ok
        );
        assert_eq!(len, 2);
        let mut got: Vec<(f64, f64)> = sr.iter().copied().zip(si.iter().copied()).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((got[0].0 - 2.0).abs() < 1e-12 && got[0].1.abs() < 1e-12);
        assert!((got[1].0 - 3.0).abs() < 1e-12 && (got[1].1 + 1.0).abs() < 1e-12);

        let mut nil = true;
        assert_eq!(speclab_is_nilpotent(m, 1e-12, 1e-9, &mut nil), SpeclabStatus::Ok);
        assert!(!nil);
        speclab_matrix_free(m);
    }
}

#[test]
fn sets_and_analyses() {
    unsafe {
        let set = load("t_stable.json");
        assert_eq!(speclab_matrix_set_len(set), 2);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        let name_a = CString::new("A").unwrap();
        let name_b = CString::new("B").unwrap();
        assert_eq!(speclab_matrix_set_get(set, name_a.as_ptr(), &mut a), SpeclabStatus::Ok);
        assert_eq!(speclab_matrix_set_get(set, name_b.as_ptr(), &mut b), SpeclabStatus::Ok);
        let mut holds = false;
        assert_eq!(speclab_t_stable(a, b, 1e-12, 1e-9, &mut holds), SpeclabStatus::Ok);
        assert!(holds);
        assert_eq!(speclab_t_stable(b, a, 1e-12, 1e-9, &mut holds), SpeclabStatus::Ok);
        assert!(!holds);
        let missing = CString::new("Z").unwrap();
        let mut z = ptr::null_mut();
        assert_eq!(
            speclab_matrix_set_get(set, missing.as_ptr(), &mut z),
            SpeclabStatus::InvalidMatrixSet
        );
        assert!(last_error().contains('Z'));
        speclab_matrix_free(a);
        speclab_matrix_free(b);
        speclab_matrix_set_free(set);

        let set = load("triangularizable.json");
        let (mut done, mut residual) = (false, 1.0);
        assert_eq!(
            speclab_triangularize(set, 1e-12, 1e-9, 0, &mut done, &mut residual),
            SpeclabStatus::Ok
        );
        assert!(done && residual < 1e-10);
        speclab_matrix_set_free(set);

        let set = load("nilpotent_span.json");
        assert_eq!(
            speclab_triangularize(set, 1e-12, 1e-9, 0, &mut done, &mut residual),
            SpeclabStatus::Ok
        );
        assert!(!done && residual.is_nan());
        let mut json = ptr::null_mut();
        assert_eq!(
            speclab_verdict_json(set, SpeclabAlgebraKind::Lie as u32, 1e-12, 1e-9, 0, &mut json),
            SpeclabStatus::Ok
        );
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["certificate_status"], "irreducible-certified");
        assert_eq!(v["hard_inconsistency"], false);
        speclab_string_free(json);
        assert_eq!(
            speclab_verdict_json(set, 9, 1e-12, 1e-9, 0, &mut json),
            SpeclabStatus::InvalidArgument
        );
        speclab_matrix_set_free(set);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(
            speclab_matrix_set_load(ptr::null(), &mut set),
            SpeclabStatus::NullPointer
        );
        let path = CString::new("/nonexistent/set.json").unwrap();
        assert_eq!(speclab_matrix_set_load(path.as_ptr(), &mut set), SpeclabStatus::Io);
        assert!(last_error().contains("/nonexistent/set.json"));
        let text = CString::new("{\"version\": 1,").unwrap();
        assert_eq!(speclab_matrix_set_parse(text.as_ptr(), &mut set), SpeclabStatus::Parse);
        let text = CString::new(r#"{"version": 1, "dim": 2, "matrices": []}"#).unwrap();
        assert_eq!(
            speclab_matrix_set_parse(text.as_ptr(), &mut set),
            SpeclabStatus::InvalidMatrixSet
        );

        let nan = [f64::NAN];
        let mut m = ptr::null_mut();
        assert_eq!(
            speclab_matrix_new(1, nan.as_ptr(), nan.as_ptr(), &mut m),
            SpeclabStatus::InvalidArgument
        );
        assert_eq!(
            speclab_matrix_new(0, nan.as_ptr(), nan.as_ptr(), &mut m),
            SpeclabStatus::InvalidArgument
        );
        let one = [1.0];
        assert_eq!(
            speclab_matrix_new(1, one.as_ptr(), one.as_ptr(), &mut m),
            SpeclabStatus::Ok
        );
        assert!(speclab_last_error().is_null());
        let mut nil = false;
        assert_eq!(
            speclab_is_nilpotent(m, -1.0, 1e-9, &mut nil),
            SpeclabStatus::InvalidArgument
        );
        assert_eq!(
            speclab_is_nilpotent(m, 1e-12, 1e-9, ptr::null_mut()),
            SpeclabStatus::NullPointer
        );
        speclab_matrix_free(m);
        speclab_matrix_free(ptr::null_mut());
        speclab_matrix_set_free(ptr::null_mut());
        speclab_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(speclab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "speclab.h"

int main(int argc, char **argv) {
    SpeclabMatrixSet *set = NULL;
    if (speclab_matrix_set_load(argv[1], &set) != SPECLAB_STATUS_OK) return 10;
    SpeclabMatrix *a = NULL, *b = NULL;
    if (speclab_matrix_set_get(set, "A", &a) != SPECLAB_STATUS_OK) return 11;
    if (speclab_matrix_set_get(set, "B", &b) != SPECLAB_STATUS_OK) return 12;
    bool holds = false;
    if (speclab_t_stable(a, b, 1e-12, 1e-9, &holds) != SPECLAB_STATUS_OK || !holds) return 13;
    if (speclab_matrix_set_load("/nonexistent", &set) != SPECLAB_STATUS_IO) return 14;
    printf("%s\n", speclab_last_error() ? "error reported" : "no error");
    speclab_matrix_free(a);
    speclab_matrix_free(b);
    speclab_matrix_set_free(set);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(header_dir.join("speclab.h").exists());
    let lib = target_dir().join("libspeclab_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!(
            "skipping C link test: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "cc failed");
    let out = Command::new(&exe)
        .arg(data("t_stable.json").to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "error reported");
}

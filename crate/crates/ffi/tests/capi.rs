use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use divisorial_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { dv_string_free(p) };
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dv_last_error_message()) }
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn bundled_run_and_json() {
    let name = CString::new("p2_toric").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dv_scenario_bundled(name.as_ptr(), &mut s) }, DvStatus::Ok);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dv_run(s, 11, true, &mut r) }, DvStatus::Ok);

    let (mut ab, mut sub, mut k) = (false, false, 0);
    assert_eq!(
        unsafe { dv_report_verdicts(r, &mut ab, &mut sub, &mut k) },
        DvStatus::Ok
    );
    assert!(ab && sub && k == 1);
    let mut deg = 0;
    assert_eq!(unsafe { dv_report_divisor_degree(r, &mut deg) }, DvStatus::Ok);
    assert_eq!(deg, 3);

    let mut js = ptr::null_mut();
    assert_eq!(unsafe { dv_report_json(r, &mut js) }, DvStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(js)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["divisor"]["section"], "z0*z1*z2");

    unsafe {
        dv_report_free(r);
        dv_scenario_free(s);
    }
}

#[test]
fn error_codes() {
    let mut s = ptr::null_mut();
    let bad = CString::new("ambient C2\nfield a = d1 +\nfield b = d2\n").unwrap();
    assert_eq!(unsafe { dv_scenario_parse(bad.as_ptr(), &mut s) }, DvStatus::Parse);
    assert!(s.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());

    let pencil = CString::new("p2_pencil").unwrap();
    assert_eq!(unsafe { dv_scenario_bundled(pencil.as_ptr(), &mut s) }, DvStatus::Ok);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { dv_run(s, 0, false, &mut r) }, DvStatus::DegenerateBasis);
    assert!(r.is_null());
    unsafe { dv_scenario_free(s) };

    let missing = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { dv_scenario_bundled(missing.as_ptr(), &mut s) },
        DvStatus::NotFound
    );
    assert_eq!(unsafe { dv_scenario_parse(ptr::null(), &mut s) }, DvStatus::NullPointer);
    assert_eq!(unsafe { dv_run(ptr::null(), 0, false, &mut r) }, DvStatus::NullPointer);

    // freeing NULL is harmless
    unsafe {
        dv_scenario_free(ptr::null_mut());
        dv_report_free(ptr::null_mut());
        dv_poly_free(ptr::null_mut());
        dv_string_free(ptr::null_mut());
    }
}

#[test]
fn metric_values() {
    let src = CString::new("ambient C2\nvars x, y\nfield a = dx\nfield b = x dx + dy\n").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dv_scenario_parse(src.as_ptr(), &mut s) }, DvStatus::Ok);
    let (re, im) = ([1.0, 0.0], [0.0, 0.0]);
    let (mut gr, mut gi) = ([0.0; 4], [0.0; 4]);
    assert_eq!(
        unsafe { dv_metric_at(s, re.as_ptr(), im.as_ptr(), 2, gr.as_mut_ptr(), gi.as_mut_ptr()) },
        DvStatus::Ok
    );
    assert_eq!(gr, [1.0, -1.0, -1.0, 2.0]);
    assert_eq!(gi, [0.0; 4]);

    let toric = CString::new("ambient C2\nfield a = z1 d1\nfield b = z2 d2\n").unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { dv_scenario_parse(toric.as_ptr(), &mut t) }, DvStatus::Ok);
    let re = [0.0, 1.0];
    assert_eq!(
        unsafe { dv_metric_at(t, re.as_ptr(), im.as_ptr(), 2, gr.as_mut_ptr(), gi.as_mut_ptr()) },
        DvStatus::OnDivisor
    );
    unsafe {
        dv_scenario_free(s);
        dv_scenario_free(t);
    }
}

#[test]
fn polynomials() {
    let vars = CString::new("x,y").unwrap();
    let parse = |src: &str| {
        let c = CString::new(src).unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(
            unsafe { dv_poly_parse(c.as_ptr(), vars.as_ptr(), &mut p) },
            DvStatus::Ok
        );
        p
    };
    let a = parse("x^2 - y^2");
    let b = parse("x^2 + 2*x*y + y^2");
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { dv_poly_gcd(a, b, &mut g) }, DvStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dv_poly_to_string(g, &mut out) }, DvStatus::Ok);
    assert_eq!(take_string(out), "x + y");
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { dv_poly_mul(g, g, &mut m) }, DvStatus::Ok);
    assert_eq!(unsafe { dv_poly_to_string(m, &mut out) }, DvStatus::Ok);
    assert_eq!(take_string(out), "x^2 + 2*x*y + y^2");
    unsafe {
        for p in [a, b, g, m] {
            dv_poly_free(p);
        }
    }
    let bad = CString::new("x +* y").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { dv_poly_parse(bad.as_ptr(), vars.as_ptr(), &mut p) },
        DvStatus::Parse
    );
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/divisorial.h")).unwrap();
    for sym in [
        "typedef struct DvScenario DvScenario;",
        "typedef struct DvReport DvReport;",
        "DV_STATUS_DEGENERATE_BASIS = 4",
        "dv_last_error_message",
        "dv_scenario_parse",
        "dv_run",
        "dv_report_json",
        "dv_metric_at",
        "dv_poly_gcd",
        "dv_string_free",
    ] {
        assert!(h.contains(sym), "header is missing {sym}");
    }
}

fn find_staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let deps = exe.parent()?;
    let profile = deps.parent()?;
    let direct = profile.join("libdivisorial_ffi.a");
    if direct.exists() {
        return Some(direct);
    }
    std::fs::read_dir(deps)
        .ok()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .find(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("libdivisorial_ffi") && n.ends_with(".a"))
        })
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "divisorial.h"

int main(void) {
    DvScenario *s = NULL;
    DvReport *r = NULL;
    char *json = NULL;
    if (dv_scenario_bundled("p2_nilpotent", &s) != DV_STATUS_OK) return 1;
    if (dv_run(s, 3, true, &r) != DV_STATUS_OK) return 2;
    uint32_t deg = 0;
    if (dv_report_divisor_degree(r, &deg) != DV_STATUS_OK || deg != 3) return 3;
    if (dv_report_json(r, &json) != DV_STATUS_OK) return 4;
    if (strstr(json, "\"section\": \"z2^3\"") == NULL) return 5;
    dv_string_free(json);
    dv_report_free(r);
    dv_scenario_free(s);
    if (dv_scenario_parse("ambient Q2\n", &s) != DV_STATUS_PARSE) return 6;
    if (strlen(dv_last_error_message()) == 0) return 7;
    printf("ok %s\n", dv_version());
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = find_staticlib() else {
        eprintln!("skipping: static library not found next to the test binary");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("capi_smoke");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    std::fs::write(&src, C_SMOKE).unwrap();
    let exe = dir.join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.1.0"));
}

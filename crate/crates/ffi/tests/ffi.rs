use std::ffi::{c_char, c_int, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use forkdelta_ffi::*;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    fd_string_free(p);
    s
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(fd_last_error_message())
            .to_str()
            .unwrap()
            .to_string()
    }
}

#[test]
fn verdict_lookup() {
    let mut v = FdVerdict::Red;
    unsafe {
        assert_eq!(
            fd_verdict(c"Identical".as_ptr(), c"Body-only".as_ptr(), &mut v),
            FdStatus::Ok
        );
        assert_eq!(v, FdVerdict::Green);
        assert_eq!(
            fd_verdict(c"Method Rename".as_ptr(), c"Method Rename".as_ptr(), &mut v),
            FdStatus::Ok
        );
        assert_eq!(v, FdVerdict::Yellow);
        assert_eq!(
            fd_verdict(c"Unmatched".as_ptr(), c"Method Move".as_ptr(), &mut v),
            FdStatus::Ok
        );
        assert_eq!(v, FdVerdict::Red);
        assert_eq!(
            fd_verdict(c"Body-only".as_ptr(), c"Identical".as_ptr(), &mut v),
            FdStatus::InvalidArgument
        );
        assert_eq!(
            fd_verdict(c"Sideways".as_ptr(), c"Body-only".as_ptr(), &mut v),
            FdStatus::InvalidArgument
        );
        assert!(last_error().contains("Sideways"));
        let bad = [0xffu8, 0];
        assert_eq!(
            fd_verdict(bad.as_ptr().cast(), c"Body-only".as_ptr(), &mut v),
            FdStatus::InvalidUtf8
        );
        assert_eq!(
            fd_verdict(
                c"Identical".as_ptr(),
                c"Body-only".as_ptr(),
                ptr::null_mut()
            ),
            FdStatus::NullArgument
        );
    }
}

#[test]
fn matrix_text_matches_fixture() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(fd_matrix_grid(&mut out), FdStatus::Ok);
        let grid = take_string(out);
        let fixture = std::fs::read_to_string(
            manifest_dir().join("../core/tests/fixtures/verdict_matrix.txt"),
        )
        .unwrap();
        assert_eq!(grid, fixture);
    }
}

#[test]
fn change_set_round_trip() {
    let ao_src =
        CString::new("package p; class A { void f() { a(); b(); c(); } void g() { d(); } }")
            .unwrap();
    let cm_src =
        CString::new("package p; class A { void h() { a(); b(); c(); } void g() { d(); e(); } }")
            .unwrap();
    let path = c"A.java";
    unsafe {
        let mut ao = ptr::null_mut();
        let mut cm = ptr::null_mut();
        assert_eq!(
            fd_inventory_from_source(
                path.as_ptr(),
                ao_src.as_ptr(),
                FdVersion::Ao as c_int,
                &mut ao
            ),
            FdStatus::Ok
        );
        assert_eq!(
            fd_inventory_from_source(
                path.as_ptr(),
                cm_src.as_ptr(),
                FdVersion::Cm as c_int,
                &mut cm
            ),
            FdStatus::Ok
        );
        assert_eq!(fd_inventory_len(ao), 2);
        assert_eq!(fd_inventory_skipped(cm), 0);
        let mut cs = ptr::null_mut();
        assert_eq!(
            fd_changeset_build(ao, cm, 7, 0.6, 0.5, &mut cs),
            FdStatus::InvalidArgument
        );
        assert_eq!(
            fd_changeset_build(ao, cm, FdDirection::AoToCm as c_int, 1.5, 0.5, &mut cs),
            FdStatus::InvalidArgument
        );
        assert!(last_error().contains("sim_threshold"));
        assert_eq!(
            fd_changeset_build(ao, cm, FdDirection::AoToCm as c_int, 0.6, 0.5, &mut cs),
            FdStatus::Ok
        );
        let mut counts = [0u64; 12];
        assert_eq!(
            fd_changeset_kind_counts(cs, counts.as_mut_ptr()),
            FdStatus::Ok
        );
        assert_eq!(counts[2], 1, "one rename");
        assert_eq!(counts[10], 1, "one body-only change");
        let mut json = ptr::null_mut();
        assert_eq!(fd_changeset_to_json(cs, &mut json), FdStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(doc["direction"], "AO_TO_CM");
        assert_eq!(doc["changes"]["p::A::f():void"]["kind"], "Method Rename");
        fd_changeset_free(cs);
        fd_inventory_free(ao);
        fd_inventory_free(cm);
        fd_inventory_free(ptr::null_mut());
        assert_eq!(
            fd_changeset_to_json(ptr::null(), &mut json),
            FdStatus::NullArgument
        );
    }
}

#[test]
fn demo_scenario_matches_golden() {
    let config = CString::new(
        manifest_dir()
            .join("../../demo/scenario.toml")
            .to_str()
            .unwrap(),
    )
    .unwrap();
    let golden =
        std::fs::read_to_string(manifest_dir().join("../core/tests/golden/demo.scenario.json"))
            .unwrap();
    unsafe {
        let mut sc = ptr::null_mut();
        assert_eq!(
            fd_scenario_analyze(config.as_ptr(), true, 4, &mut sc),
            FdStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(fd_scenario_is_partial(sc), 0);
        let mut doc = ptr::null_mut();
        assert_eq!(
            fd_scenario_render(sc, c"report".as_ptr(), &mut doc),
            FdStatus::Ok
        );
        assert_eq!(take_string(doc), golden);
        assert_eq!(
            fd_scenario_render(sc, c"pdf".as_ptr(), &mut doc),
            FdStatus::InvalidArgument
        );
        let out = tempfile::tempdir().unwrap();
        let dir = CString::new(out.path().to_str().unwrap()).unwrap();
        assert_eq!(fd_scenario_write(sc, dir.as_ptr()), FdStatus::Ok);
        assert!(out.path().join("demo/scenario.csv").is_file());
        fd_scenario_free(sc);
        assert_eq!(fd_scenario_is_partial(ptr::null()), -1);
    }
}

#[test]
fn missing_config_is_a_config_error() {
    let mut sc = ptr::null_mut();
    let s =
        unsafe { fd_scenario_analyze(c"/nonexistent/scenario.toml".as_ptr(), false, 1, &mut sc) };
    assert_eq!(s, FdStatus::Config);
    assert!(last_error().contains("/nonexistent/scenario.toml"));
    assert!(sc.is_null());
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(manifest_dir().join("include/forkdelta.h")).unwrap();
    let src = std::fs::read_to_string(manifest_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for f in exports {
        let declared = header.contains(&format!(" {f}(")) || header.contains(&format!("*{f}("));
        assert!(declared, "{f} missing from header");
    }
    for t in [
        "typedef struct FdInventory FdInventory;",
        "FD_STATUS_PANIC = 7",
        "FD_DIRECTION_AO_TO_CM = 1",
    ] {
        assert!(header.contains(t), "{t}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(out) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler found; header syntax check not run");
        return;
    };
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(
        &main,
        "#include \"forkdelta.h\"\nint main(void) { return fd_version() == 0; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(manifest_dir().join("include"))
        .arg(&main)
        .status()
        .unwrap();
    assert!(status.success());
}

use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use alg2d_ffi::*;
use serde_json::Value;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_json(p: *mut std::ffi::c_char) -> Value {
    let v = serde_json::from_str(CStr::from_ptr(p).to_str().unwrap()).unwrap();
    alg2d_string_free(p);
    v
}

unsafe fn field(spec: &str) -> *mut Alg2dField {
    let mut f = ptr::null_mut();
    assert_eq!(alg2d_field_new(c(spec).as_ptr(), &mut f), Alg2dStatus::Ok);
    f
}

unsafe fn msc(f: *const Alg2dField, text: &str) -> *mut Alg2dMsc {
    let mut m = ptr::null_mut();
    assert_eq!(alg2d_msc_parse(f, c(text).as_ptr(), &mut m), Alg2dStatus::Ok);
    m
}

#[test]
fn der_and_aut_through_handles() {
    unsafe {
        let f = field("q:7");
        assert_eq!(alg2d_field_order(f), 7);
        let m = msc(f, "0,0,0,0;1,0,0,0");
        let mut out = ptr::null_mut();
        assert_eq!(alg2d_der(m, &mut out), Alg2dStatus::Ok);
        let v = take_json(out);
        assert_eq!(v["dimension"], 2);
        assert_eq!(v["basis"], serde_json::json!([[[1, 0], [0, 2]], [[0, 0], [1, 0]]]));
        assert_eq!(alg2d_aut(m, &mut out), Alg2dStatus::Ok);
        let v = take_json(out);
        assert_eq!(v["order"], 42);
        assert_eq!(alg2d_msc_render(m, &mut out), Alg2dStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "0,0,0,0;1,0,0,0");
        alg2d_string_free(out);
        alg2d_msc_free(m);
        alg2d_field_free(f);
    }
}

#[test]
fn family_aut_both_agrees() {
    unsafe {
        let f = field("q:7");
        let mut out = ptr::null_mut();
        let st = alg2d_family_aut(f, c("A9").as_ptr(), Alg2dAutMethod::Both, 0, &mut out);
        assert_eq!(st, Alg2dStatus::Ok);
        let v = take_json(out);
        assert_eq!(v["order"], 7);
        assert_eq!(v["agree"], true);
        let st = alg2d_family_der(f, c("A13").as_ptr(), 0, &mut out);
        assert_eq!(st, Alg2dStatus::Ok);
        assert_eq!(take_json(out)["dimension"], 2);
        alg2d_field_free(f);
    }
}

#[test]
fn iso_and_classify() {
    unsafe {
        let f = field("q:7");
        let a = msc(f, "0,0,0,1;2,0,0,0");
        let b = msc(f, "0,0,0,1;3,0,0,0");
        let mut out = ptr::null_mut();
        assert_eq!(alg2d_iso(a, b, &mut out), Alg2dStatus::Ok);
        assert_eq!(take_json(out)["isomorphic"], true);
        assert_eq!(alg2d_classify(a, &mut out), Alg2dStatus::Ok);
        assert!(take_json(out)["class"].as_str().unwrap().starts_with("A11"));
        alg2d_msc_free(a);
        alg2d_msc_free(b);
        alg2d_field_free(f);
    }
}

#[test]
fn errors_report_codes_and_messages() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(alg2d_field_new(c("q:6").as_ptr(), &mut f), Alg2dStatus::Usage);
        assert!(f.is_null());
        let msg = CStr::from_ptr(alg2d_last_error()).to_str().unwrap();
        assert!(msg.contains("q:6"), "{msg}");
        assert_eq!(alg2d_field_new(ptr::null(), &mut f), Alg2dStatus::NullPointer);

        let f = field("q:7");
        let mut m = ptr::null_mut();
        assert_eq!(alg2d_msc_parse(f, c("1,2;3,4").as_ptr(), &mut m), Alg2dStatus::Usage);
        let bad = [0xffu8, 0];
        assert_eq!(
            alg2d_msc_parse(f, bad.as_ptr() as *const _, &mut m),
            Alg2dStatus::InvalidUtf8
        );

        let q = field("rational");
        assert_eq!(alg2d_field_order(q), 0);
        let a = msc(q, "0,0,0,0;1,0,0,0");
        let mut out = ptr::null_mut();
        assert_eq!(alg2d_classify(a, &mut out), Alg2dStatus::Compute);
        let a7 = msc(f, "0,0,0,0;1,0,0,0");
        assert_eq!(alg2d_iso(a, a7, &mut out), Alg2dStatus::Usage);
        alg2d_msc_free(a);
        alg2d_msc_free(a7);
        alg2d_field_free(q);
        alg2d_field_free(f);
        alg2d_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_table_small() {
    unsafe {
        let mut out = ptr::null_mut();
        let st = alg2d_verify_table(c("char2").as_ptr(), c("q:2").as_ptr(), 2, &mut out);
        assert_eq!(st, Alg2dStatus::Ok);
        let v = take_json(out);
        assert_eq!(v["summary"]["mismatch"], 0);
        assert!(v["summary"]["match"].as_u64().unwrap() > 0);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let src = std::env::temp_dir().join("alg2d_header_check.c");
    std::fs::write(
        &src,
        "#include \"alg2d.h\"\nint main(void) { Alg2dField *f = 0; return alg2d_field_new(\"q:7\", &f) == ALG2D_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&src)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
}

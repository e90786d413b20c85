use std::ffi::{CStr, CString};
use std::ptr;

use cubicjac_ffi::*;

fn parse(text: &str) -> *mut CjMap {
    let t = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { cj_map_parse(t.as_ptr(), ptr::null(), &mut m) },
        CjStatus::Ok
    );
    m
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { cj_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cj_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn rank_and_keller() {
    let m = parse("H1 = x2^3\nH2 = 0");
    let mut rank = 99usize;
    let mut keller = false;
    unsafe {
        assert_eq!(cj_jacobian_rank(m, &mut rank), CjStatus::Ok);
        assert_eq!(cj_is_keller(m, &mut keller), CjStatus::Ok);
        cj_map_free(m);
    }
    assert_eq!(rank, 1);
    assert!(keller);
}

#[test]
fn inverse_composes_to_identity() {
    let f = parse("H1 = x2^3 + x3^3\nH2 = x3^3\nH3 = 0");
    let mut g = ptr::null_mut();
    let mut fg = ptr::null_mut();
    let mut text = ptr::null_mut();
    unsafe {
        assert_eq!(cj_invert(f, 0, &mut g), CjStatus::Ok);
        assert_eq!(cj_compose(f, g, &mut fg), CjStatus::Ok);
        assert_eq!(cj_map_to_text(fg, &mut text), CjStatus::Ok);
        cj_map_free(f);
        cj_map_free(g);
        cj_map_free(fg);
    }
    assert_eq!(
        take(text),
        "field: Q\nvars: 3\nF1 = 1*x1^1\nF2 = 1*x2^1\nF3 = 1*x3^1\n"
    );
}

#[test]
fn json_reports() {
    let m = parse("H1 = x1^3 + x2*x3^2\nH2 = x2^3 + x1*x3^2\nH3 = 0");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(cj_classify(m, &mut s), CjStatus::Ok);
    }
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["result"]["case_tag"], "CASE1_ZERO_TAIL");
    unsafe { cj_map_free(m) };

    let k = parse("H1 = x2^3\nH2 = 0");
    unsafe {
        assert_eq!(cj_keller_normal_form(k, &mut s), CjStatus::Ok);
    }
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["result"]["variant"], "FORM_I_RANK1");
    unsafe {
        assert_eq!(cj_tame_decompose(k, false, &mut s), CjStatus::Ok);
        cj_map_free(k);
    }
    let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(v["result"]["step_count"], 1);
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("H1 = x1^^3").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { cj_map_parse(bad.as_ptr(), ptr::null(), &mut m) },
        CjStatus::Parse
    );
    assert!(m.is_null());
    assert!(last_error().contains("parse error"));

    assert_eq!(
        unsafe { cj_jacobian_rank(ptr::null(), ptr::null_mut()) },
        CjStatus::NullPointer
    );

    let not_keller = parse("H1 = x1^3\nH2 = 0");
    let mut g = ptr::null_mut();
    let status = unsafe { cj_invert(not_keller, 0, &mut g) };
    assert_eq!(status, CjStatus::Hypothesis, "{}", last_error());
    unsafe { cj_map_free(not_keller) };
}

#[test]
fn field_override_and_version() {
    let t = CString::new("H1 = 6*x2^3\nH2 = 0").unwrap();
    let f = CString::new("F5").unwrap();
    let mut m = ptr::null_mut();
    let mut text = ptr::null_mut();
    unsafe {
        assert_eq!(cj_map_parse(t.as_ptr(), f.as_ptr(), &mut m), CjStatus::Ok);
        assert_eq!(cj_map_to_text(m, &mut text), CjStatus::Ok);
        cj_map_free(m);
    }
    assert!(take(text).starts_with("field: F5\n"));
    let v = unsafe { CStr::from_ptr(cj_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

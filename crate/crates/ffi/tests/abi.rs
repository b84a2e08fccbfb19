use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use lame_mt_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lmt_last_error()) }.to_string_lossy().into_owned()
}

fn weight(spec: &str) -> *mut LmtWeight {
    let s = CString::new(spec).unwrap();
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { lmt_weight_parse(s.as_ptr(), &mut w) }, LmtStatus::Ok);
    w
}

#[test]
fn bessel_values_match_the_library() {
    let mut v = 0.0;
    assert_eq!(unsafe { lmt_bessel_j(0.0, 1.0, &mut v) }, LmtStatus::Ok);
    assert!((v - 0.765_197_686_557_966_6).abs() < 1e-14);
    assert_eq!(unsafe { lmt_bessel_y(0.5, 2.0, &mut v) }, LmtStatus::Ok);
    let want = -(2.0 / (std::f64::consts::PI * 2.0)).sqrt() * 2.0f64.cos();
    assert!((v - want).abs() < 1e-14);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { lmt_hankel1(3.0, 4.0, &mut re, &mut im) }, LmtStatus::Ok);
    assert_eq!(re, lame_mt::specfun::bessel_j(lame_mt::specfun::Order::int(3), 4.0).unwrap());
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut v = 0.0;
    assert_eq!(unsafe { lmt_bessel_j(0.3, 1.0, &mut v) }, LmtStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { lmt_bessel_j(0.0, 1.0, ptr::null_mut()) }, LmtStatus::NullPointer);
    assert_eq!(last_error(), "null pointer argument");
    assert_eq!(unsafe { lmt_bessel_j(0.0, 1.0, &mut v) }, LmtStatus::Ok);
    assert_eq!(last_error(), "");

    let bad = CString::new("gauss:sigma=-1").unwrap();
    let mut w = ptr::null_mut();
    let st = unsafe { lmt_weight_parse(bad.as_ptr(), &mut w) };
    assert!(st == LmtStatus::InvalidParams || st == LmtStatus::Parse, "{st:?}");
    assert!(w.is_null());
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { lmt_weight_parse(invalid.as_ptr().cast(), &mut w) },
        LmtStatus::InvalidUtf8
    );
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { lmt_params_new(-3.0, 1.0, 1.0, &mut p) }, LmtStatus::InvalidParams);
    let name = unsafe { CStr::from_ptr(lmt_status_name(LmtStatus::InvalidParams)) };
    assert_eq!(name.to_str().unwrap(), "invalid parameters");
}

#[test]
fn weight_handles() {
    let w = weight("gauss:sigma=1");
    let mut n = 0.0;
    assert_eq!(unsafe { lmt_weight_mt_norm(w, &mut n) }, LmtStatus::Ok);
    assert!((n - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { lmt_weight_scale(w, 4.0, &mut s) }, LmtStatus::Ok);
    let mut ns = 0.0;
    assert_eq!(unsafe { lmt_weight_mt_norm(s, &mut ns) }, LmtStatus::Ok);
    assert!((ns / (4.0 * n) - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { lmt_weight_scale(w, 0.0, &mut s) }, LmtStatus::InvalidParams);
    let mut v = 0.0;
    assert_eq!(unsafe { lmt_weight_eval(w, 0.0, &mut v) }, LmtStatus::Ok);
    assert_eq!(v, 1.0);
    unsafe {
        lmt_weight_free(s);
        lmt_weight_free(w);
        lmt_weight_free(ptr::null_mut());
    }
}

#[test]
fn ratios_match_the_library() {
    let w = weight("gauss:sigma=1");
    let mut p = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(lmt_params_new(1.0, 1.0, 1.0, &mut p), LmtStatus::Ok);
        assert_eq!(lmt_bump_new(0, 1.0, 0.25, &mut b), LmtStatus::Ok);
        let (mut kp, mut ks) = (0.0, 0.0);
        assert_eq!(lmt_params_wavenumbers(p, &mut kp, &mut ks), LmtStatus::Ok);
        assert!((kp - 1.0 / 3f64.sqrt()).abs() < 1e-15 && ks == 1.0);
        let mut r = LmtRatio::default();
        assert_eq!(lmt_thm1_ratio(b, p, w, &mut r), LmtStatus::Ok);
        assert!((r.ratio / lame_mt::estimates::frozen::THM1_REGRESSION - 1.0).abs() <= 1e-6);
        assert!(!r.flagged);
        assert_eq!(lmt_thm2_ratio(b, p, w, &mut r), LmtStatus::Ok);
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert_eq!(lmt_thm1_ratio(ptr::null(), p, w, &mut r), LmtStatus::NullPointer);

        let spec = CString::new("bump:n=1,r0=1,w=0.3").unwrap();
        let mut b2 = ptr::null_mut();
        assert_eq!(lmt_bump_parse(spec.as_ptr(), &mut b2), LmtStatus::Ok);
        lmt_bump_free(b2);
        lmt_bump_free(b);
        lmt_params_free(p);
        lmt_weight_free(w);
    }
}

#[test]
fn lemma_rows_report_their_size() {
    let w = weight("gauss:sigma=1");
    let id = CString::new("L4_5").unwrap();
    let mut n = 0usize;
    unsafe {
        let st = lmt_lemma_rows(id.as_ptr(), 40.0, std::f64::consts::SQRT_2, w, ptr::null_mut(), 0, &mut n);
        assert_eq!(st, LmtStatus::BufferTooSmall);
        assert!(n >= 1);
        let mut rows = vec![std::mem::zeroed::<LmtLemmaRow>(); n];
        let st = lmt_lemma_rows(id.as_ptr(), 40.0, std::f64::consts::SQRT_2, w, rows.as_mut_ptr(), n, &mut n);
        assert_eq!(st, LmtStatus::Ok);
        let stair = rows
            .iter()
            .find(|r| CStr::from_ptr(r.region.as_ptr()).to_str().unwrap() == "staircase")
            .unwrap();
        assert!((stair.ratio / lame_mt::estimates::frozen::L4_5_STAIRCASE_MU40 - 1.0).abs() <= 1e-6);
        let bad = CString::new("L9").unwrap();
        assert_eq!(
            lmt_lemma_rows(bad.as_ptr(), 40.0, 1.4, w, ptr::null_mut(), 0, &mut n),
            LmtStatus::Parse
        );
        lmt_weight_free(w);
    }
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(lmt_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_compiles_as_c_and_cpp() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/lame_mt.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["lmt_weight_parse", "lmt_thm1_ratio", "lmt_lemma_rows", "LMT_STATUS_PANIC", "typedef struct LmtWeight LmtWeight"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let out = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .output();
        match out {
            Ok(o) => assert!(o.status.success(), "{compiler}: {}", String::from_utf8_lossy(&o.stderr)),
            Err(e) => eprintln!("skipping {compiler} check: {e}"),
        }
    }
}

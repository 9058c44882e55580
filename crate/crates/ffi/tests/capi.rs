use ginoe::*;
use std::ffi::{c_char, CStr};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

struct Ctx(*mut GinoeContext);

impl Ctx {
    fn new(bits: u32) -> Self {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { ginoe_context_new(bits, &mut p) }, GinoeStatus::Ok);
        Ctx(p)
    }
}

impl Drop for Ctx {
    fn drop(&mut self) {
        unsafe { ginoe_context_free(self.0) }
    }
}

fn take(status: GinoeStatus, v: *mut GinoeValue) -> (f64, f64, f64, String) {
    assert_eq!(status, GinoeStatus::Ok, "{}", last_error());
    let mut buf = [0 as c_char; 96];
    unsafe {
        let n = ginoe_value_decimal(v, GinoePart::Real, buf.as_mut_ptr(), buf.len());
        let s = CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned();
        assert_eq!(n, s.len());
        let out = (ginoe_value_mid(v, GinoePart::Real), ginoe_value_mid(v, GinoePart::Imag), ginoe_value_err(v), s);
        ginoe_value_free(v);
        out
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ginoe_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn m0_with_exact_form() {
    let ctx = Ctx::new(128);
    let mut v = ptr::null_mut();
    let st = unsafe { ginoe_m0(ctx.0, 6, &mut v) };
    let mut buf = [0 as c_char; 64];
    let n = unsafe { ginoe_value_exact(v, buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    let exact = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned();
    let (re, im, err, s) = take(st, v);
    assert_eq!(exact, "0 + 211/128*sqrt(2)");
    assert!((re - 211.0 / 128.0 * 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(im, 0.0);
    assert!(err < 1e-35);
    assert!(s.starts_with("2.3312"));
}

#[test]
fn moment_half_integer_and_complex() {
    let ctx = Ctx::new(96);
    let mut v = ptr::null_mut();
    let (a, _, _, _) = take(unsafe { ginoe_moment(ctx.0, 4, 1.0, 0.0, &mut v) }, v);
    let (b, _, _, _) = take(unsafe { ginoe_moment(ctx.0, 4, 1.5, 0.0, &mut v) }, v);
    let (c, _, _, _) = take(unsafe { ginoe_moment(ctx.0, 4, 2.0, 0.0, &mut v) }, v);
    assert!(a < b && b < c);
    let (_, im, err, _) = take(unsafe { ginoe_moment(ctx.0, 4, 1.0, 0.5, &mut v) }, v);
    assert!(im != 0.0);
    assert!(err < 1e-20);
}

#[test]
fn density_mgf_stieltjes() {
    let ctx = Ctx::new(80);
    let mut v = ptr::null_mut();
    let (r, _, _, _) = take(unsafe { ginoe_density(ctx.0, 3, 0.7, &mut v) }, v);
    let (r2, _, _, _) = take(unsafe { ginoe_density(ctx.0, 3, -0.7, &mut v) }, v);
    assert!(r > 0.0 && (r - r2).abs() < 1e-15);
    let (u, _, _, _) = take(unsafe { ginoe_mgf(ctx.0, 3, 0.0, &mut v) }, v);
    assert!((u - (1.0 + 2f64.sqrt() / 2.0)).abs() < 1e-15);
    let (_, w_im, _, _) = take(unsafe { ginoe_stieltjes(ctx.0, 3, 0.2, 1.0, &mut v) }, v);
    assert!(w_im < 0.0);
}

#[test]
fn error_codes() {
    let ctx = Ctx::new(64);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { ginoe_stieltjes(ctx.0, 2, 1.0, 0.0, &mut v) }, GinoeStatus::Domain);
    assert!(last_error().contains("Im t"));
    assert_eq!(unsafe { ginoe_m0(ptr::null(), 2, &mut v) }, GinoeStatus::InvalidArgument);
    assert_eq!(unsafe { ginoe_m0(ctx.0, 2, ptr::null_mut()) }, GinoeStatus::InvalidArgument);
    assert_eq!(unsafe { ginoe_density(ctx.0, 3, f64::NAN, &mut v) }, GinoeStatus::InvalidArgument);
    assert_eq!(unsafe { ginoe_m0(ctx.0, 0, &mut v) }, GinoeStatus::Domain);
    let mut p = ptr::null_mut();
    assert_ne!(unsafe { ginoe_context_new(0, &mut p) }, GinoeStatus::Ok);
    assert!(v.is_null() && p.is_null());
    unsafe {
        ginoe_value_free(ptr::null_mut());
        ginoe_context_free(ptr::null_mut());
        assert!(ginoe_value_err(ptr::null()).is_nan());
    }
}

#[test]
fn truncating_buffer() {
    let ctx = Ctx::new(128);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { ginoe_m0(ctx.0, 2, &mut v) }, GinoeStatus::Ok);
    let mut buf = [1 as c_char; 5];
    let n = unsafe { ginoe_value_decimal(v, GinoePart::Real, buf.as_mut_ptr(), buf.len()) };
    assert!(n > 30);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "1.41");
    assert_eq!(unsafe { ginoe_value_decimal(v, GinoePart::Real, ptr::null_mut(), 0) }, n);
    unsafe { ginoe_value_free(v) };
}

#[test]
fn monte_carlo() {
    let (mut m, mut se) = (0.0, 0.0);
    assert_eq!(unsafe { ginoe_mc_moment(2, 0, 20_000, 3, 2, &mut m, &mut se) }, GinoeStatus::Ok);
    assert!(((m - 2f64.sqrt()) / se).abs() < 4.0);
    assert_eq!(unsafe { ginoe_mc_moment(2, 0, 0, 3, 2, &mut m, &mut se) }, GinoeStatus::Domain);
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/capi-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_is_current() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/ginoe.h")).unwrap();
    for name in [
        "ginoe_context_new",
        "ginoe_context_free",
        "ginoe_value_free",
        "ginoe_m0",
        "ginoe_moment",
        "ginoe_density",
        "ginoe_mgf",
        "ginoe_stieltjes",
        "ginoe_mc_moment",
        "ginoe_value_decimal",
        "ginoe_value_exact",
        "ginoe_last_error",
        "typedef struct GinoeContext GinoeContext;",
        "GINOE_STATUS_DOMAIN = 3",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libginoe.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let tmp = std::env::temp_dir().join(format!("ginoe-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&tmp)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&tmp).output().unwrap();
    let _ = std::fs::remove_file(&tmp);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

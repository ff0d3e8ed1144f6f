use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use empathy_gate_ffi::*;

fn cli(args: &[&str]) {
    let mut argv = vec!["empathy-gate".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    assert_eq!(empathy_gate::cli::run(argv), 0, "cli {args:?}");
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(eg_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn trained(dir: &Path) -> PathBuf {
    let d = dir.to_str().unwrap();
    cli(&[
        "corpus", "synth", "--n-pos", "30", "--n-neg", "30", "--seed", "3", "--images", "false",
        "--out", d,
    ]);
    let corpus = dir.join("corpus.jsonl");
    let t = dir.join("train");
    cli(&[
        "train",
        "--corpus",
        corpus.to_str().unwrap(),
        "--mask",
        "BF,LF",
        "--trees",
        "10",
        "--out",
        t.to_str().unwrap(),
    ]);
    t.join("bundle.json")
}

#[test]
fn bundle_round_trip_matches_cli() {
    let dir = tempfile::tempdir().unwrap();
    let bundle_path = trained(dir.path());
    let text = "nobody listens, i feel so alone :(";

    let mut b = ptr::null_mut();
    let p = c(bundle_path.to_str().unwrap());
    let st = unsafe { eg_bundle_load(p.as_ptr(), ptr::null(), ptr::null(), ptr::null(), &mut b) };
    assert_eq!(st, EgStatus::Ok, "{}", last_error());
    assert!(!b.is_null());

    let mut warnings = usize::MAX;
    assert_eq!(
        unsafe { eg_bundle_warning_count(b, &mut warnings) },
        EgStatus::Ok
    );
    assert_eq!(warnings, 0);
    let mut width = 0;
    assert_eq!(unsafe { eg_bundle_width(b, &mut width) }, EgStatus::Ok);
    assert!(width > 10);

    let (mut prob, mut lr, mut rf) = (f64::NAN, f64::NAN, f64::NAN);
    let t = c(text);
    let st =
        unsafe { eg_bundle_predict_text(b, t.as_ptr(), ptr::null(), &mut prob, &mut lr, &mut rf) };
    assert_eq!(st, EgStatus::Ok, "{}", last_error());
    for v in [prob, lr, rf] {
        assert!((0.0..=1.0).contains(&v));
    }
    let mut prob2 = f64::NAN;
    let st = unsafe {
        eg_bundle_predict_text(
            b,
            t.as_ptr(),
            ptr::null(),
            &mut prob2,
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(st, EgStatus::Ok);
    assert_eq!(prob.to_bits(), prob2.to_bits());
    unsafe { eg_bundle_free(b) };

    let out = dir.path().join("pred");
    cli(&[
        "predict",
        "--bundle",
        bundle_path.to_str().unwrap(),
        "--text",
        text,
        "--out",
        out.to_str().unwrap(),
    ]);
    let mut rdr = csv::Reader::from_path(out.join("predictions.csv")).unwrap();
    let rec = rdr.records().next().unwrap().unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| -> f64 {
        let i = headers.iter().position(|h| h == name).unwrap();
        rec[i].parse().unwrap()
    };
    assert!((col("probability") - prob).abs() < 1e-6);
    assert!((col("p_lr") - lr).abs() < 1e-6);
    assert!((col("p_rf") - rf).abs() < 1e-6);
}

#[test]
fn corrupt_and_missing_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = ptr::null_mut();
    let missing = c(dir.path().join("none.json").to_str().unwrap());
    let st = unsafe {
        eg_bundle_load(
            missing.as_ptr(),
            ptr::null(),
            ptr::null(),
            ptr::null(),
            &mut b,
        )
    };
    assert_eq!(st, EgStatus::Io);
    assert!(b.is_null());
    assert!(!last_error().is_empty());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{\"x\":1}\nsha256:00\n").unwrap();
    let p = c(bad.to_str().unwrap());
    let st = unsafe { eg_bundle_load(p.as_ptr(), ptr::null(), ptr::null(), ptr::null(), &mut b) };
    assert_eq!(st, EgStatus::InvalidBundle);
    assert!(b.is_null());
}

#[test]
fn null_and_utf8_arguments() {
    let mut b = ptr::null_mut();
    let st = unsafe { eg_bundle_load(ptr::null(), ptr::null(), ptr::null(), ptr::null(), &mut b) };
    assert_eq!(st, EgStatus::NullPointer);
    assert!(last_error().contains("bundle_path"));

    let bad = [0xffu8, 0xfe, 0];
    let mut out = ptr::null_mut();
    let st = unsafe { eg_anonymize(bad.as_ptr().cast(), &mut out) };
    assert_eq!(st, EgStatus::InvalidUtf8);
    assert!(out.is_null());

    let mut prob = 0.0;
    let t = c("x");
    let st = unsafe {
        eg_bundle_predict_text(
            ptr::null(),
            t.as_ptr(),
            ptr::null(),
            &mut prob,
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(st, EgStatus::NullPointer);
    unsafe {
        eg_bundle_free(ptr::null_mut());
        eg_string_free(ptr::null_mut());
    }
}

#[test]
fn anonymize_matches_core() {
    let text = "@alice see https://example.com or mail bob@example.org";
    let t = c(text);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { eg_anonymize(t.as_ptr(), &mut out) }, EgStatus::Ok);
    let got = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
    unsafe { eg_string_free(out) };
    assert_eq!(got, empathy_gate::corpus::anonymize_text(text));
    assert!(!got.contains("alice"));
    assert!(last_error().is_empty());
}

#[test]
fn fleiss_kappa_values() {
    // Perfect agreement across two categories.
    let labels = [0u32, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1];
    let mut k = f64::NAN;
    assert_eq!(
        unsafe { eg_fleiss_kappa(labels.as_ptr(), 4, 3, 2, &mut k) },
        EgStatus::Ok
    );
    assert!((k - 1.0).abs() < 1e-12);

    // One item split 2-1, rest unanimous: P_bar = (1/3 + 3)/4, Pe from marginals 7/12, 5/12.
    let labels = [0u32, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 1];
    assert_eq!(
        unsafe { eg_fleiss_kappa(labels.as_ptr(), 4, 3, 2, &mut k) },
        EgStatus::Ok
    );
    let p_bar = (1.0 / 3.0 + 3.0) / 4.0;
    let (a, b) = (5.0f64 / 12.0, 7.0f64 / 12.0);
    let pe = a * a + b * b;
    assert!((k - (p_bar - pe) / (1.0 - pe)).abs() < 1e-12);

    let same = [0u32; 6];
    assert_eq!(
        unsafe { eg_fleiss_kappa(same.as_ptr(), 2, 3, 2, &mut k) },
        EgStatus::Undefined
    );
    let out_of_range = [0u32, 5, 0, 1, 1, 1];
    assert_eq!(
        unsafe { eg_fleiss_kappa(out_of_range.as_ptr(), 2, 3, 2, &mut k) },
        EgStatus::InvalidArgument
    );
}

#[test]
fn hsv_conversions() {
    let (mut h, mut s, mut v) = (0.0, 0.0, 0.0);
    assert_eq!(
        unsafe { eg_rgb_to_hsv(0, 0, 255, &mut h, &mut s, &mut v) },
        EgStatus::Ok
    );
    assert!((h - 240.0).abs() < 1e-9 && (s - 1.0).abs() < 1e-12 && (v - 1.0).abs() < 1e-12);

    let rgb = [255u8, 0, 0, 255, 0, 0, 0, 0, 0, 255, 0, 0];
    let mut out = [f64::NAN; EG_HSV_WIDTH];
    assert_eq!(
        unsafe { eg_hsv_features(rgb.as_ptr(), 2, 2, out.as_mut_ptr()) },
        EgStatus::Ok
    );
    let raster = empathy_gate::visual::Raster::new(
        2,
        2,
        rgb.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
    )
    .unwrap();
    assert_eq!(
        out.to_vec(),
        empathy_gate::visual::hsv_features(&raster).to_vec()
    );
    assert!((out[5] - 0.75).abs() < 1e-12);

    assert_eq!(
        unsafe { eg_hsv_features(rgb.as_ptr(), 0, 2, out.as_mut_ptr()) },
        EgStatus::InvalidArgument
    );
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(eg_version()) }.to_str().unwrap();
    assert_eq!(v, empathy_gate::VERSION);
}

#[test]
fn header_is_valid_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = include.join("empathy_gate.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for f in [
        "eg_bundle_load",
        "eg_bundle_predict_text",
        "eg_fleiss_kappa",
        "eg_hsv_features",
        "EG_STATUS_OK",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("t.c");
    std::fs::write(
        &src,
        "#include \"empathy_gate.h\"\nint main(void) { return EG_STATUS_OK; }\n",
    )
    .unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .status()
    {
        Ok(st) => assert!(st.success(), "header does not compile"),
        Err(e) => eprintln!("skipping C syntax check: {e}"),
    }
}

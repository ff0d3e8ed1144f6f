//! C ABI over `empathy_gate`.
//!
//! Conventions:
//!
//! - Every fallible function returns an [`EgStatus`]; on failure a message
//!   is available from [`eg_last_error_message`] on the same thread.
//! - Outputs are written through caller-provided pointers only on success.
//! - Strings returned by the library are owned by the caller and released
//!   with [`eg_string_free`]. Bundles are released with [`eg_bundle_free`].
//! - Panics never cross the boundary; they surface as `EG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use empathy_gate::corpus::{anonymize_text, fleiss_kappa, LabelMatrix};
use empathy_gate::pipeline::{load_bundle, ItemInput, ResourcePaths, Resources, TrainedBundle};
use empathy_gate::visual::{hsv_features, rgb_to_hsv, Raster};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    InvalidBundle = 5,
    Resource = 6,
    Pipeline = 7,
    Undefined = 8,
    Panic = 9,
}

/// Number of values written by [`eg_hsv_features`].
pub const EG_HSV_WIDTH: usize = 6;

/// A loaded bundle plus the resources it predicts with. Opaque to C.
pub struct EgBundle {
    bundle: TrainedBundle,
    resources: Resources,
    warnings: Vec<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

type FfiResult<T> = Result<T, (EgStatus, String)>;

fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> EgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EgStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EgStatus::Panic
        }
    }
}

fn null(what: &str) -> (EgStatus, String) {
    (EgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (EgStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn opt_path(p: *const c_char, what: &str) -> FfiResult<Option<PathBuf>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(|s| Some(PathBuf::from(s)))
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior NULs removed")
        .into_raw()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn eg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Loads a bundle file. The lexicon, dictionary and imagery paths may be
/// null to use the bundled resources.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eg_bundle_load(
    bundle_path: *const c_char,
    lexicon_path: *const c_char,
    dictionary_path: *const c_char,
    imagery_path: *const c_char,
    out: *mut *mut EgBundle,
) -> EgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = PathBuf::from(str_arg(bundle_path, "bundle_path")?);
        let paths = ResourcePaths {
            lexicon: opt_path(lexicon_path, "lexicon_path")?,
            dictionary: opt_path(dictionary_path, "dictionary_path")?,
            imagery: opt_path(imagery_path, "imagery_path")?,
            ..ResourcePaths::default()
        };
        let resources =
            Resources::load(&paths, 42).map_err(|e| (EgStatus::Resource, e.to_string()))?;
        let (bundle, warnings) = load_bundle(&path, Some(&resources)).map_err(|e| {
            let status = match e {
                empathy_gate::pipeline::BundleError::Io { .. } => EgStatus::Io,
                _ => EgStatus::InvalidBundle,
            };
            (status, e.to_string())
        })?;
        let resources = bundle.effective_resources(&resources);
        *out = Box::into_raw(Box::new(EgBundle {
            bundle,
            resources,
            warnings,
        }));
        Ok(())
    })
}

/// Releases a bundle. Null is ignored.
///
/// # Safety
/// `bundle` must come from [`eg_bundle_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn eg_bundle_free(bundle: *mut EgBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// Number of resource-fingerprint warnings raised while loading.
///
/// # Safety
/// `bundle` must be a live bundle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eg_bundle_warning_count(
    bundle: *const EgBundle,
    out: *mut usize,
) -> EgStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| null("bundle"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = b.warnings.len();
        Ok(())
    })
}

/// Feature-space width of the bundle.
///
/// # Safety
/// `bundle` must be a live bundle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eg_bundle_width(bundle: *const EgBundle, out: *mut usize) -> EgStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| null("bundle"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = b.bundle.feature_space.width();
        Ok(())
    })
}

/// Scores one text (and optional image path). Writes the ensemble
/// probability and the two base-model probabilities; `p_lr` and `p_rf` may
/// be null.
///
/// # Safety
/// `bundle` must be a live bundle; strings NUL-terminated; `probability`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn eg_bundle_predict_text(
    bundle: *const EgBundle,
    text: *const c_char,
    image_path: *const c_char,
    probability: *mut f64,
    p_lr: *mut f64,
    p_rf: *mut f64,
) -> EgStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| null("bundle"))?;
        let text = str_arg(text, "text")?;
        let image = opt_path(image_path, "image_path")?;
        if probability.is_null() {
            return Err(null("probability"));
        }
        let preds = b
            .bundle
            .predict_inputs(vec![ItemInput::new("ffi", text, image)], &b.resources)
            .map_err(|e| (EgStatus::Pipeline, e.to_string()))?;
        let p = &preds[0];
        *probability = p.probability;
        if !p_lr.is_null() {
            *p_lr = p.p_lr;
        }
        if !p_rf.is_null() {
            *p_rf = p.p_rf;
        }
        Ok(())
    })
}

/// Replaces handles, URLs and e-mail addresses with placeholders. The
/// result is freed with [`eg_string_free`].
///
/// # Safety
/// `text` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eg_anonymize(text: *const c_char, out: *mut *mut c_char) -> EgStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(anonymize_text(text));
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn eg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Fleiss' kappa over a row-major `n_items × n_raters` matrix of category
/// indices in `0..n_categories`. Returns `EG_STATUS_UNDEFINED` when every
/// rating uses one category.
///
/// # Safety
/// `labels` must point to `n_items * n_raters` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eg_fleiss_kappa(
    labels: *const u32,
    n_items: usize,
    n_raters: usize,
    n_categories: usize,
    out: *mut f64,
) -> EgStatus {
    guard(|| {
        if labels.is_null() {
            return Err(null("labels"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let len = n_items.checked_mul(n_raters).ok_or((
            EgStatus::InvalidArgument,
            "matrix size overflows".to_string(),
        ))?;
        let flat = std::slice::from_raw_parts(labels, len);
        let rows: Vec<Vec<usize>> = flat
            .chunks(n_raters.max(1))
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect();
        let m = LabelMatrix::new(rows, n_categories)
            .map_err(|e| (EgStatus::InvalidArgument, e.to_string()))?;
        *out = fleiss_kappa(&m).map_err(|e| {
            let status = match e {
                empathy_gate::corpus::AgreementError::Undefined => EgStatus::Undefined,
                _ => EgStatus::InvalidArgument,
            };
            (status, e.to_string())
        })?;
        Ok(())
    })
}

/// Hexcone RGB to HSV: hue in degrees, saturation and value in `[0, 1]`.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn eg_rgb_to_hsv(
    r: u8,
    g: u8,
    b: u8,
    h: *mut f64,
    s: *mut f64,
    v: *mut f64,
) -> EgStatus {
    guard(|| {
        if h.is_null() || s.is_null() || v.is_null() {
            return Err(null("output"));
        }
        let (hh, ss, vv) = rgb_to_hsv(r, g, b);
        *h = hh;
        *s = ss;
        *v = vv;
        Ok(())
    })
}

/// HSV statistics of a packed RGB8 image (`width * height * 3` bytes).
/// Writes [`EG_HSV_WIDTH`] values: hue cos mean, hue sin mean, hue mean in
/// degrees, hue resultant, saturation mean, value mean.
///
/// # Safety
/// `rgb` must hold `width * height * 3` bytes; `out` must hold
/// [`EG_HSV_WIDTH`] doubles.
#[no_mangle]
pub unsafe extern "C" fn eg_hsv_features(
    rgb: *const u8,
    width: usize,
    height: usize,
    out: *mut f64,
) -> EgStatus {
    guard(|| {
        if rgb.is_null() {
            return Err(null("rgb"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let n = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or((
                EgStatus::InvalidArgument,
                "image size overflows".to_string(),
            ))?;
        let bytes = std::slice::from_raw_parts(rgb, n);
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        let raster = Raster::new(width, height, pixels)
            .map_err(|e| (EgStatus::InvalidArgument, e.to_string()))?;
        let stats = hsv_features(&raster).to_vec();
        ptr::copy_nonoverlapping(stats.as_ptr(), out, EG_HSV_WIDTH);
        Ok(())
    })
}

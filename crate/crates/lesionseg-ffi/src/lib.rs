//! C ABI for the lesionseg library.
//!
//! Conventions:
//! - Handles (`LesionsegImage`, `LesionsegResult`) are opaque; create them
//!   with the constructors and release them with the matching `_free`.
//! - Functions returning a pointer return null on failure; functions
//!   returning `LesionsegStatus` report the failure class directly. In both
//!   cases `lesionseg_last_error_message()` returns a thread-local,
//!   NUL-terminated description valid until the next failing call on the
//!   same thread.
//! - Buffers are caller-allocated; `len` is the element capacity and must be
//!   at least `width * height` (or the cluster count for centroids).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lesionseg::pipeline::{segment_lesions, PipelineConfig, SegmentationResult};
use lesionseg::{Error, Image2D};

/// Error classes, aligned with the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LesionsegStatus {
    /// Success.
    Ok = 0,
    /// Invalid parameter or malformed configuration.
    InvalidArgument = 1,
    /// Missing, unreadable, or malformed input data.
    InputError = 2,
    /// The pipeline could not produce a segmentation (e.g. empty mask).
    PipelineError = 3,
    /// A required pointer was null or a buffer too small.
    NullPointer = 4,
    /// Unexpected internal failure.
    InternalError = 5,
}

/// Opaque grayscale image handle.
pub struct LesionsegImage {
    inner: Image2D,
}

/// Opaque segmentation-result handle.
pub struct LesionsegResult {
    inner: SegmentationResult,
    width: usize,
    height: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn status_of(err: &Error) -> LesionsegStatus {
    match err {
        Error::InvalidParameter(_) => LesionsegStatus::InvalidArgument,
        Error::FileNotFound(_)
        | Error::Io(_)
        | Error::UnsupportedFormat(_)
        | Error::Malformed(_)
        | Error::DimensionMismatch { .. } => LesionsegStatus::InputError,
        Error::EmptyMask | Error::MaskTooSmall { .. } | Error::DegenerateCluster(_) => {
            LesionsegStatus::PipelineError
        }
    }
}

/// Most recent error message for this thread (empty string if none).
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lesionseg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Create an image from a row-major `width * height` buffer of doubles.
/// Returns null if the pointer is null, a dimension is zero, or any value is
/// not finite.
/// # Safety
/// `pixels` must be null or point to at least `width * height` readable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_image_create(
    width: usize,
    height: usize,
    pixels: *const f64,
) -> *mut LesionsegImage {
    if pixels.is_null() {
        set_error("pixels pointer is null");
        return std::ptr::null_mut();
    }
    let Some(count) = width.checked_mul(height) else {
        set_error("width * height overflows");
        return std::ptr::null_mut();
    };
    let data = std::slice::from_raw_parts(pixels, count).to_vec();
    match Image2D::new(width, height, data) {
        Ok(inner) => Box::into_raw(Box::new(LesionsegImage { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Load a PGM (P2/P5) or 8-bit grayscale PNG image from `path` (UTF-8).
/// # Safety
/// `path` must be null or a valid NUL-terminated C string.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_image_load(path: *const c_char) -> *mut LesionsegImage {
    if path.is_null() {
        set_error("path pointer is null");
        return std::ptr::null_mut();
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        set_error("path is not valid UTF-8");
        return std::ptr::null_mut();
    };
    match lesionseg::io::load_image(std::path::Path::new(path)) {
        Ok(inner) => Box::into_raw(Box::new(LesionsegImage { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Image width in pixels (0 for a null handle).
/// # Safety
/// `image` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_image_width(image: *const LesionsegImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.width())
}

/// Image height in pixels (0 for a null handle).
/// # Safety
/// `image` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_image_height(image: *const LesionsegImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.height())
}

/// Release an image handle (null is a no-op).
/// # Safety
/// `image` must be null or a handle from this library not freed before;
/// it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_image_free(image: *mut LesionsegImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Run the full segmentation pipeline. `config_json` may be null (defaults)
/// or a JSON document with any subset of the pipeline configuration keys;
/// unset keys take their defaults. Returns null on failure.
/// # Safety
/// `image` must be null or a live handle; `config_json` must be null or a
/// valid NUL-terminated C string.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_segment(
    image: *const LesionsegImage,
    config_json: *const c_char,
) -> *mut LesionsegResult {
    let Some(image) = image.as_ref() else {
        set_error("image handle is null");
        return std::ptr::null_mut();
    };
    let config: PipelineConfig = if config_json.is_null() {
        PipelineConfig::standard()
    } else {
        let Ok(text) = CStr::from_ptr(config_json).to_str() else {
            set_error("config JSON is not valid UTF-8");
            return std::ptr::null_mut();
        };
        match serde_json::from_str(text) {
            Ok(cfg) => cfg,
            Err(e) => {
                set_error(&format!("config JSON: {e}"));
                return std::ptr::null_mut();
            }
        }
    };
    let run = catch_unwind(AssertUnwindSafe(|| segment_lesions(&image.inner, &config, None)));
    match run {
        Ok(Ok(inner)) => {
            let (width, height) = (image.inner.width(), image.inner.height());
            Box::into_raw(Box::new(LesionsegResult { inner, width, height }))
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic during segmentation");
            std::ptr::null_mut()
        }
    }
}

/// Grid width of a result (0 for a null handle).
/// # Safety
/// `result` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_width(result: *const LesionsegResult) -> usize {
    result.as_ref().map_or(0, |r| r.width)
}

/// Grid height of a result (0 for a null handle).
/// # Safety
/// `result` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_height(result: *const LesionsegResult) -> usize {
    result.as_ref().map_or(0, |r| r.height)
}

/// Number of clusters used (0 for a null handle).
/// # Safety
/// `result` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_num_clusters(result: *const LesionsegResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.centroids.len())
}

/// Iterations the clustering ran (0 for a null handle).
/// # Safety
/// `result` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_iterations(result: *const LesionsegResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.iterations)
}

unsafe fn copy_u8(
    result: *const LesionsegResult,
    out: *mut u8,
    len: usize,
    pick: impl Fn(&LesionsegResult) -> &[u8],
) -> LesionsegStatus {
    let Some(r) = result.as_ref() else {
        set_error("result handle is null");
        return LesionsegStatus::NullPointer;
    };
    if out.is_null() {
        set_error("output buffer is null");
        return LesionsegStatus::NullPointer;
    }
    let src = pick(r);
    if len < src.len() {
        set_error("output buffer too small");
        return LesionsegStatus::NullPointer;
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    LesionsegStatus::Ok
}

/// Copy the binary lesion mask (0/1 per pixel, row-major) into `out`.
/// # Safety
/// `result` must be null or a live handle; `out` must be null or point
/// to at least `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_lesion_mask(
    result: *const LesionsegResult,
    out: *mut u8,
    len: usize,
) -> LesionsegStatus {
    copy_u8(result, out, len, |r| r.inner.lesion_mask.values())
}

/// Copy the binary brain mask (0/1 per pixel, row-major) into `out`.
/// # Safety
/// `result` must be null or a live handle; `out` must be null or point
/// to at least `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_brain_mask(
    result: *const LesionsegResult,
    out: *mut u8,
    len: usize,
) -> LesionsegStatus {
    copy_u8(result, out, len, |r| r.inner.brain_mask.values())
}

/// Copy the label map (0 = outside brain, 1..=c = cluster) into `out`.
/// # Safety
/// `result` must be null or a live handle; `out` must be null or point
/// to at least `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_label_map(
    result: *const LesionsegResult,
    out: *mut u8,
    len: usize,
) -> LesionsegStatus {
    copy_u8(result, out, len, |r| &r.inner.label_map)
}

/// Copy the estimated bias field (0 outside the brain) into `out`.
/// # Safety
/// `result` must be null or a live handle; `out` must be null or point
/// to at least `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_bias_field(
    result: *const LesionsegResult,
    out: *mut f64,
    len: usize,
) -> LesionsegStatus {
    let Some(r) = result.as_ref() else {
        set_error("result handle is null");
        return LesionsegStatus::NullPointer;
    };
    if out.is_null() {
        set_error("output buffer is null");
        return LesionsegStatus::NullPointer;
    }
    let src = r.inner.bias_field.pixels();
    if len < src.len() {
        set_error("output buffer too small");
        return LesionsegStatus::NullPointer;
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    LesionsegStatus::Ok
}

/// Copy the ascending cluster centroids into `out` (capacity `len`).
/// # Safety
/// `result` must be null or a live handle; `out` must be null or point
/// to at least `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_centroids(
    result: *const LesionsegResult,
    out: *mut f64,
    len: usize,
) -> LesionsegStatus {
    let Some(r) = result.as_ref() else {
        set_error("result handle is null");
        return LesionsegStatus::NullPointer;
    };
    if out.is_null() {
        set_error("output buffer is null");
        return LesionsegStatus::NullPointer;
    }
    let src = &r.inner.centroids;
    if len < src.len() {
        set_error("output buffer too small");
        return LesionsegStatus::NullPointer;
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    LesionsegStatus::Ok
}

/// Release a result handle (null is a no-op).
/// # Safety
/// `result` must be null or a handle from this library not freed before;
/// it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lesionseg_result_free(result: *mut LesionsegResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Map a library error to the status it would produce; exposed so bindings
/// can share the convention. Never fails.
#[no_mangle]
pub extern "C" fn lesionseg_status_name(status: LesionsegStatus) -> *const c_char {
    let name: &'static CStr = match status {
        LesionsegStatus::Ok => c"ok",
        LesionsegStatus::InvalidArgument => c"invalid-argument",
        LesionsegStatus::InputError => c"input-error",
        LesionsegStatus::PipelineError => c"pipeline-error",
        LesionsegStatus::NullPointer => c"null-pointer",
        LesionsegStatus::InternalError => c"internal-error",
    };
    name.as_ptr()
}

// keep the error-code mapping in one place for the crate's own use
#[doc(hidden)]
pub fn __status_of_error(err: &Error) -> LesionsegStatus {
    status_of(err)
}

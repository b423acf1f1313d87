//! Exercise the C ABI through the exported functions.

use std::ffi::{CStr, CString};

use lesionseg::eval::{dice, make_phantom, LesionSpec, PhantomSpec};
use lesionseg::BinaryMask;
use lesionseg_ffi::*;

fn small_spec() -> PhantomSpec {
    PhantomSpec {
        width: 64,
        height: 64,
        lesions: vec![LesionSpec { cx: 40.0, cy: 40.0, a: 8.0, b: 6.0, angle: 0.4, intensity: 0.85 }],
        bias_amp: 0.05,
        noise_sigma: 0.02,
        seed: 9,
        ..PhantomSpec::default()
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(lesionseg_last_error_message()).to_str().unwrap().to_string() }
}

#[test]
fn segment_roundtrip_through_c_abi() {
    let (img, truth, _) = make_phantom(&small_spec()).unwrap();
    unsafe {
        let handle = lesionseg_image_create(64, 64, img.pixels().as_ptr());
        assert!(!handle.is_null(), "{}", last_error());
        assert_eq!(lesionseg_image_width(handle), 64);
        assert_eq!(lesionseg_image_height(handle), 64);

        let config = CString::new(
            r#"{"brain": {"threshold": 0.01}, "edge_gate": "off", "min_lesion_px": 0}"#,
        )
        .unwrap();
        let result = lesionseg_segment(handle, config.as_ptr());
        assert!(!result.is_null(), "{}", last_error());
        assert_eq!(lesionseg_result_width(result), 64);
        assert_eq!(lesionseg_result_height(result), 64);
        assert_eq!(lesionseg_result_num_clusters(result), 3);
        assert!(lesionseg_result_iterations(result) >= 1);

        let mut mask = vec![0u8; 64 * 64];
        assert_eq!(
            lesionseg_result_lesion_mask(result, mask.as_mut_ptr(), mask.len()),
            LesionsegStatus::Ok
        );
        let pred = BinaryMask::new(64, 64, mask).unwrap();
        let d = dice(&pred, &truth).unwrap();
        assert!(d > 0.8, "dice through FFI {d}");

        let mut brain = vec![0u8; 64 * 64];
        assert_eq!(
            lesionseg_result_brain_mask(result, brain.as_mut_ptr(), brain.len()),
            LesionsegStatus::Ok
        );
        assert!(brain.contains(&1));

        let mut labels = vec![0u8; 64 * 64];
        assert_eq!(
            lesionseg_result_label_map(result, labels.as_mut_ptr(), labels.len()),
            LesionsegStatus::Ok
        );
        assert!(labels.iter().all(|&l| l <= 3));

        let mut centroids = vec![0.0f64; 3];
        assert_eq!(
            lesionseg_result_centroids(result, centroids.as_mut_ptr(), centroids.len()),
            LesionsegStatus::Ok
        );
        assert!(centroids.windows(2).all(|w| w[0] <= w[1]));

        let mut bias = vec![0.0f64; 64 * 64];
        assert_eq!(
            lesionseg_result_bias_field(result, bias.as_mut_ptr(), bias.len()),
            LesionsegStatus::Ok
        );

        lesionseg_result_free(result);
        lesionseg_image_free(handle);
    }
}

#[test]
fn error_paths_set_status_and_message() {
    unsafe {
        // null pixels
        assert!(lesionseg_image_create(4, 4, std::ptr::null()).is_null());
        assert!(last_error().contains("null"));

        // non-finite pixel
        let bad = [f64::NAN; 4];
        assert!(lesionseg_image_create(2, 2, bad.as_ptr()).is_null());

        // segmenting a constant image is an invalid-argument failure
        let flat = [0.5f64; 16];
        let img = lesionseg_image_create(4, 4, flat.as_ptr());
        assert!(!img.is_null());
        assert!(lesionseg_segment(img, std::ptr::null()).is_null());
        assert!(!last_error().is_empty());

        // malformed config JSON
        let (phantom, _, _) = make_phantom(&small_spec()).unwrap();
        let good = lesionseg_image_create(64, 64, phantom.pixels().as_ptr());
        let broken = CString::new("{not json").unwrap();
        assert!(lesionseg_segment(good, broken.as_ptr()).is_null());
        assert!(last_error().contains("config JSON"));

        // missing file
        let path = CString::new("/nonexistent/file.pgm").unwrap();
        assert!(lesionseg_image_load(path.as_ptr()).is_null());

        // buffer too small
        let cfg = CString::new(r#"{"brain": {"threshold": 0.01}}"#).unwrap();
        let res = lesionseg_segment(good, cfg.as_ptr());
        assert!(!res.is_null(), "{}", last_error());
        let mut tiny = vec![0u8; 8];
        assert_eq!(
            lesionseg_result_lesion_mask(res, tiny.as_mut_ptr(), tiny.len()),
            LesionsegStatus::NullPointer
        );
        assert!(last_error().contains("too small"));

        // null handles are inert
        assert_eq!(lesionseg_image_width(std::ptr::null()), 0);
        assert_eq!(lesionseg_result_iterations(std::ptr::null()), 0);
        lesionseg_image_free(std::ptr::null_mut());
        lesionseg_result_free(std::ptr::null_mut());

        lesionseg_result_free(res);
        lesionseg_image_free(good);
        lesionseg_image_free(img);
    }
}

#[test]
fn status_names() {
    unsafe {
        let name = CStr::from_ptr(lesionseg_status_name(LesionsegStatus::PipelineError));
        assert_eq!(name.to_str().unwrap(), "pipeline-error");
    }
}

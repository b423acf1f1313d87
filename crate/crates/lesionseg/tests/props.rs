//! Property-based invariants complementing the deterministic suites.

use proptest::prelude::*;

use lesionseg::edge::gaussian_kernel;
use lesionseg::eval::{dice, jaccard};
use lesionseg::fcm::membership_update;
use lesionseg::image::{convolve2d, normalize_intensities, BinaryMask, Border, Image2D};
use lesionseg::morphology::{closing, dilate, erode};
use lesionseg::preprocess::binarize;

fn image_strategy(max_dim: usize) -> impl Strategy<Value = Image2D> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(w, h)| {
        proptest::collection::vec(0.0..1.0f64, w * h)
            .prop_map(move |px| Image2D::new(w, h, px).unwrap())
    })
}

fn mask_strategy(max_dim: usize) -> impl Strategy<Value = BinaryMask> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(w, h)| {
        proptest::collection::vec(0..=1u8, w * h)
            .prop_map(move |v| BinaryMask::new(w, h, v).unwrap())
    })
}

fn image_pair_strategy(max_dim: usize) -> impl Strategy<Value = (Image2D, Image2D)> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(w, h)| {
        (
            proptest::collection::vec(0.0..1.0f64, w * h),
            proptest::collection::vec(0.0..1.0f64, w * h),
        )
            .prop_map(move |(a, b)| {
                (Image2D::new(w, h, a).unwrap(), Image2D::new(w, h, b).unwrap())
            })
    })
}

fn mask_pair_strategy(max_dim: usize) -> impl Strategy<Value = (BinaryMask, BinaryMask)> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(w, h)| {
        (
            proptest::collection::vec(0..=1u8, w * h),
            proptest::collection::vec(0..=1u8, w * h),
        )
            .prop_map(move |(a, b)| {
                (BinaryMask::new(w, h, a).unwrap(), BinaryMask::new(w, h, b).unwrap())
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Convolution is linear: K*(a·f + b·g) = a·(K*f) + b·(K*g).
    #[test]
    fn convolution_is_linear(
        (img, offset_img) in image_pair_strategy(12),
        scale in -2.0..2.0f64,
    ) {
        let k = gaussian_kernel(1.0, 1);
        let combo = Image2D::new(
            img.width(),
            img.height(),
            img.pixels().iter().zip(offset_img.pixels())
                .map(|(&a, &b)| scale * a + b).collect(),
        ).unwrap();
        let lhs = convolve2d(&combo, &k, Border::Zero);
        let ca = convolve2d(&img, &k, Border::Zero);
        let cb = convolve2d(&offset_img, &k, Border::Zero);
        for j in 0..img.pixels().len() {
            let rhs = scale * ca.pixels()[j] + cb.pixels()[j];
            prop_assert!((lhs.pixels()[j] - rhs).abs() < 1e-9);
        }
    }

    /// Normalization lands in [0,1] and is idempotent.
    #[test]
    fn normalize_range_and_idempotence(img in image_strategy(10)) {
        let n1 = normalize_intensities(&img);
        prop_assert!(n1.pixels().iter().all(|&v| (0.0..=1.0).contains(&v)));
        let n2 = normalize_intensities(&n1);
        for (a, b) in n1.pixels().iter().zip(n2.pixels()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    /// Binarizing a mask's own image representation reproduces the mask.
    #[test]
    fn binarize_idempotent_on_masks(mask in mask_strategy(10)) {
        let as_img = mask.to_image();
        let again = binarize(&as_img, 0.5).unwrap();
        prop_assert_eq!(again, mask);
    }

    /// Jaccard never exceeds Dice, and both are symmetric.
    #[test]
    fn jaccard_le_dice((a, b) in mask_pair_strategy(10)) {
        let d = dice(&a, &b).unwrap();
        let j = jaccard(&a, &b).unwrap();
        prop_assert!(j <= d + 1e-12);
        prop_assert!((d - dice(&b, &a).unwrap()).abs() < 1e-15);
        prop_assert!((j - d / (2.0 - d)).abs() < 1e-12);
    }

    /// Morphology: dilation grows, erosion shrinks, closing is extensive.
    #[test]
    fn morphology_ordering(mask in mask_strategy(10), radius in 1..3usize) {
        let d = dilate(&mask, radius);
        let e = erode(&mask, radius);
        let c = closing(&mask, radius);
        for j in 0..mask.values().len() {
            prop_assert!(e.values()[j] <= mask.values()[j]);
            prop_assert!(mask.values()[j] <= d.values()[j]);
            prop_assert!(mask.values()[j] <= c.values()[j], "closing must be extensive");
        }
    }

    /// Membership laws hold for arbitrary data and centroids.
    #[test]
    fn membership_laws(
        data in proptest::collection::vec(-1.0..1.0f64, 1..12),
        v in proptest::collection::vec(-1.0..1.0f64, 2..4),
        m in 1.1..4.0f64,
    ) {
        let u = membership_update(&data, &v, m);
        let (c, n) = (v.len(), data.len());
        for j in 0..n {
            let mut sum = 0.0;
            for i in 0..c {
                prop_assert!((0.0..=1.0).contains(&u[i * n + j]));
                sum += u[i * n + j];
            }
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}

//! Preprocessing: intensity binarization and a brain-mask stage (threshold +
//! largest component + closing + hole fill) standing in for a full brain
//! extraction tool. Externally computed masks are accepted via `load_mask`
//! in the io module.

use crate::error::{Error, Result};
use crate::image::{check_same_dims, BinaryMask, Image2D};
use crate::morphology;

/// Parameters of the brain-mask stand-in.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct BrainMaskParams {
    /// Intensity cutoff in [0,1]; pixels strictly above it are foreground.
    pub threshold: f64,
    /// Disk radius (pixels) for morphological closing.
    pub closing_radius: usize,
    /// Fill interior holes after closing.
    pub fill_holes: bool,
}

impl Default for BrainMaskParams {
    fn default() -> Self {
        Self { threshold: 0.05, closing_radius: 2, fill_holes: true }
    }
}

impl BrainMaskParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!(
                "brain-mask threshold {} outside [0,1]",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Threshold binarization: output = 1 iff f(x,y) > th (strict).
pub fn binarize(image: &Image2D, th: f64) -> Result<BinaryMask> {
    if !th.is_finite() {
        return Err(Error::InvalidParameter("binarize threshold must be finite".into()));
    }
    let values = image.pixels().iter().map(|&v| u8::from(v > th)).collect();
    BinaryMask::new(image.width(), image.height(), values)
}

/// Brain/non-brain partition: binarize at the threshold, keep the largest
/// 8-connected component, close with a disk, optionally fill holes.
pub fn extract_brain_mask(image: &Image2D, params: &BrainMaskParams) -> Result<BinaryMask> {
    params.validate()?;
    let bin = binarize(image, params.threshold)?;
    if bin.count_ones() == 0 {
        return Err(Error::EmptyMask);
    }
    let mut mask = morphology::largest_component(&bin);
    mask = morphology::closing(&mask, params.closing_radius);
    if params.fill_holes {
        mask = morphology::fill_holes(&mask);
    }
    // closing can merge nearby debris back in; re-take the largest component
    // so the single-component invariant holds
    mask = morphology::largest_component(&mask);
    Ok(mask)
}

/// Keep pixels where mask = 1, zero elsewhere.
pub fn apply_mask(image: &Image2D, mask: &BinaryMask) -> Result<Image2D> {
    check_same_dims((image.width(), image.height()), (mask.width(), mask.height()))?;
    let pixels = image
        .pixels()
        .iter()
        .zip(mask.values())
        .map(|(&v, &m)| if m == 1 { v } else { 0.0 })
        .collect();
    Image2D::new(image.width(), image.height(), pixels)
}

//! Core grid types and the 2-D convolution shared by every stage.
//!
//! Intensities are stored as `f64` in `[0, 1]`; integer inputs are scaled on
//! load so thresholds stay portable across bit depths.

use crate::error::{Error, Result};

/// Rectangular grid of real-valued intensities, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image2D {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image2D {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("image dimensions must be >= 1".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "pixel count {} != {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite intensity".into()));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        debug_assert!(value.is_finite());
        self.pixels[y * self.width + x] = value;
    }

    pub fn same_dims(&self, other_width: usize, other_height: usize) -> bool {
        self.width == other_width && self.height == other_height
    }
}

/// {0,1}-valued grid: brain masks, edge maps, lesion masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("mask dimensions must be >= 1".into()));
        }
        if values.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "value count {} != {}x{}",
                values.len(),
                width,
                height
            )));
        }
        if values.iter().any(|&v| v > 1) {
            return Err(Error::InvalidParameter("mask values must be 0 or 1".into()));
        }
        Ok(Self { width, height, values })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; width * height])
    }

    pub fn ones(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![1; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        debug_assert!(value <= 1);
        self.values[y * self.width + x] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1).count()
    }

    /// View the mask as an image with intensities 0.0 / 1.0.
    pub fn to_image(&self) -> Image2D {
        Image2D {
            width: self.width,
            height: self.height,
            pixels: self.values.iter().map(|&v| v as f64).collect(),
        }
    }
}

/// Square odd-sized convolution kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel2D {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::InvalidParameter("kernel size must be odd".into()));
        }
        if weights.len() != size * size {
            return Err(Error::InvalidParameter("kernel weight count mismatch".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("non-finite kernel weight".into()));
        }
        Ok(Self { size, weights })
    }

    pub fn identity() -> Self {
        Self { size: 1, weights: vec![1.0] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, kx: usize, ky: usize) -> f64 {
        self.weights[ky * self.size + kx]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// How out-of-range reads are resolved during convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Border {
    /// Clamp to the nearest edge pixel. Avoids dark halos at the skull
    /// boundary that zero padding would inject into gradients.
    #[default]
    Replicate,
    /// Mirror across the edge (-1 -> 0, -2 -> 1, ...).
    Reflect,
    /// Treat out-of-range pixels as 0.
    Zero,
}

#[inline]
fn resolve(idx: isize, len: usize, border: Border) -> Option<usize> {
    if idx >= 0 && (idx as usize) < len {
        return Some(idx as usize);
    }
    match border {
        Border::Zero => None,
        Border::Replicate => Some(idx.clamp(0, len as isize - 1) as usize),
        Border::Reflect => {
            let n = len as isize;
            let mut i = idx;
            // symmetric reflection, repeated for kernels wider than the image
            loop {
                if i < 0 {
                    i = -i - 1;
                } else if i >= n {
                    i = 2 * n - 1 - i;
                } else {
                    return Some(i as usize);
                }
            }
        }
    }
}

/// True 2-D convolution (kernel flipped): out(x,y) = sum_s K(s) f((x,y) - s).
/// Output dimensions equal input dimensions.
pub fn convolve2d(image: &Image2D, kernel: &Kernel2D, border: Border) -> Image2D {
    let (w, h) = (image.width(), image.height());
    let r = kernel.radius() as isize;
    let k = kernel.size() as isize;
    let mut out = vec![0.0f64; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for ky in 0..k {
                let sy = ky - r; // kernel row offset
                let Some(iy) = resolve(y - sy, h, border) else { continue };
                for kx in 0..k {
                    let sx = kx - r;
                    let Some(ix) = resolve(x - sx, w, border) else { continue };
                    acc += kernel.get(kx as usize, ky as usize) * image.get(ix, iy);
                }
            }
            out[(y as usize) * w + x as usize] = acc;
        }
    }
    Image2D { width: w, height: h, pixels: out }
}

/// Min-max rescale to [0,1]; a constant image maps to all zeros so degenerate
/// inputs still flow through the pipeline.
pub fn normalize_intensities(image: &Image2D) -> Image2D {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in image.pixels() {
        min = min.min(v);
        max = max.max(v);
    }
    let range = max - min;
    let pixels = if range == 0.0 {
        vec![0.0; image.pixels().len()]
    } else {
        image.pixels().iter().map(|&v| (v - min) / range).collect()
    };
    Image2D { width: image.width(), height: image.height(), pixels }
}

pub(crate) fn check_same_dims(
    (lw, lh): (usize, usize),
    (rw, rh): (usize, usize),
) -> Result<()> {
    if lw != rw || lh != rh {
        return Err(Error::DimensionMismatch {
            left_width: lw,
            left_height: lh,
            right_width: rw,
            right_height: rh,
        });
    }
    Ok(())
}

//! Edge detection: Gaussian smoothing, Laplacian-of-Gaussian with
//! zero-crossing (Marr-Hildreth), Sobel, Prewitt, and Canny.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::{convolve2d, Border, BinaryMask, Image2D, Kernel2D};

/// Per-pixel gradient estimates.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub gx: Image2D,
    pub gy: Image2D,
    /// √(gx² + gy²), ≥ 0 everywhere.
    pub magnitude: Image2D,
    /// atan2(gy, gx) in radians, normalized to (−π, π].
    pub direction: Image2D,
}

/// Edge-detector configuration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct EdgeParams {
    /// Gaussian σ used for smoothing (Canny) and the LoG (Marr-Hildreth).
    pub sigma: f64,
    /// Kernel side length = 2·kernel_radius + 1.
    pub kernel_radius: usize,
    /// Hysteresis low threshold as a fraction of the max gradient magnitude.
    pub low: f64,
    /// Hysteresis high threshold as a fraction of the max gradient magnitude.
    pub high: f64,
    /// Minimum LoG response swing across a zero crossing.
    pub zc_threshold: f64,
}

impl Default for EdgeParams {
    fn default() -> Self {
        Self { sigma: 1.0, kernel_radius: 3, low: 0.1, high: 0.3, zc_threshold: 1e-4 }
    }
}

impl EdgeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma {} must be > 0", self.sigma)));
        }
        if self.kernel_radius == 0 {
            return Err(Error::InvalidParameter("kernel_radius must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.low)
            || !(0.0..=1.0).contains(&self.high)
            || self.low > self.high
        {
            return Err(Error::InvalidParameter(format!(
                "thresholds must satisfy 0 <= low ({}) <= high ({}) <= 1",
                self.low, self.high
            )));
        }
        if self.zc_threshold < 0.0 {
            return Err(Error::InvalidParameter("zc_threshold must be >= 0".into()));
        }
        Ok(())
    }
}

/// Isotropic Gaussian kernel, renormalized to sum exactly 1.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Kernel2D {
    assert!(sigma > 0.0, "sigma must be positive");
    let size = 2 * radius + 1;
    let mut weights = Vec::with_capacity(size * size);
    let inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for dy in -(radius as isize)..=radius as isize {
        for dx in -(radius as isize)..=radius as isize {
            let r2 = (dx * dx + dy * dy) as f64;
            weights.push((-r2 * inv2s2).exp());
        }
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Kernel2D::new(size, weights).unwrap()
}

/// Raw LoG response at squared radius r², before the zero-sum shift:
/// (−1/(4πσ²)) · [1 − r²/(2σ²)] · exp(−r²/(2σ²)).
pub fn log_raw(r2: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let q = r2 / (2.0 * s2);
    (-1.0 / (4.0 * PI * s2)) * (1.0 - q) * (-q).exp()
}

/// Laplacian-of-Gaussian kernel sampled at integer offsets, shifted by a
/// constant so the weights sum exactly to 0.
pub fn log_kernel(sigma: f64, radius: usize) -> Kernel2D {
    assert!(sigma > 0.0, "sigma must be positive");
    let size = 2 * radius + 1;
    let mut weights = Vec::with_capacity(size * size);
    for dy in -(radius as isize)..=radius as isize {
        for dx in -(radius as isize)..=radius as isize {
            weights.push(log_raw((dx * dx + dy * dy) as f64, sigma));
        }
    }
    let mean: f64 = weights.iter().sum::<f64>() / (size * size) as f64;
    for w in &mut weights {
        *w -= mean;
    }
    Kernel2D::new(size, weights).unwrap()
}

/// Anchor intensities at 0 by subtracting the minimum. Detectors are
/// mathematically shift-invariant; doing the shift up front keeps them
/// bit-identical under constant offsets instead of merely close, so
/// plateau ties in non-maximum suppression cannot flip.
fn subtract_min(image: &Image2D) -> Image2D {
    let min = image.pixels().iter().cloned().fold(f64::INFINITY, f64::min);
    let pixels = image.pixels().iter().map(|&v| v - min).collect();
    Image2D::new(image.width(), image.height(), pixels).unwrap()
}

fn gradient_from(gx: Image2D, gy: Image2D) -> GradientField {
    let n = gx.pixels().len();
    let mut mag = Vec::with_capacity(n);
    let mut dir = Vec::with_capacity(n);
    for j in 0..n {
        let (a, b) = (gx.pixels()[j], gy.pixels()[j]);
        mag.push(a.hypot(b));
        let mut th = b.atan2(a);
        if th == -PI {
            th = PI; // normalize to (−π, π]
        }
        dir.push(th);
    }
    let magnitude = Image2D::new(gx.width(), gx.height(), mag).unwrap();
    let direction = Image2D::new(gx.width(), gx.height(), dir).unwrap();
    GradientField { gx, gy, magnitude, direction }
}

/// Correlation with the separable derivative kernels smooth ⊗ [−1, 0, 1]
/// (gx) and [−1, 0, 1] ⊗ smooth (gy), replicate border. Computing each tap
/// as a pairwise difference makes constant images cancel exactly.
fn derivative_field(image: &Image2D, smooth: [f64; 3]) -> (Image2D, Image2D) {
    let (w, h) = (image.width() as isize, image.height() as isize);
    let read = |x: isize, y: isize| -> f64 {
        image.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize)
    };
    let mut gx = Image2D::filled(image.width(), image.height(), 0.0).unwrap();
    let mut gy = Image2D::filled(image.width(), image.height(), 0.0).unwrap();
    for y in 0..h {
        for x in 0..w {
            let mut ax = 0.0;
            let mut ay = 0.0;
            for (k, &s) in (-1isize..=1).zip(smooth.iter()) {
                ax += s * (read(x + 1, y + k) - read(x - 1, y + k));
                ay += s * (read(x + k, y + 1) - read(x + k, y - 1));
            }
            gx.set(x as usize, y as usize, ax);
            gy.set(x as usize, y as usize, ay);
        }
    }
    (gx, gy)
}

/// Sobel gradient (gy points down: y increases downward); equivalent to
/// correlation with [[−1,0,1],[−2,0,2],[−1,0,1]] and its transpose.
pub fn sobel(image: &Image2D) -> GradientField {
    let (gx, gy) = derivative_field(image, [1.0, 2.0, 1.0]);
    gradient_from(gx, gy)
}

/// Prewitt gradient: correlation with [[−1,0,1]×3] and its transpose.
pub fn prewitt(image: &Image2D) -> GradientField {
    let (gx, gy) = derivative_field(image, [1.0, 1.0, 1.0]);
    gradient_from(gx, gy)
}

/// Marr-Hildreth: LoG filtering followed by thresholded zero-crossing
/// detection. A pixel is an edge iff some pair of opposite neighbors
/// (horizontal, vertical, or diagonal) straddles zero with a swing above
/// zc_threshold.
pub fn marr_hildreth(image: &Image2D, params: &EdgeParams) -> Result<BinaryMask> {
    params.validate()?;
    let anchored = subtract_min(image);
    let g =
        convolve2d(&anchored, &log_kernel(params.sigma, params.kernel_radius), Border::Replicate);
    let (w, h) = (g.width() as isize, g.height() as isize);
    let mut out = BinaryMask::zeros(g.width(), g.height())?;
    let pairs: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
    for y in 0..h {
        for x in 0..w {
            let mut edge = false;
            for &(dx, dy) in &pairs {
                let (ax, ay) = (x - dx, y - dy);
                let (bx, by) = (x + dx, y + dy);
                if ax < 0 || ay < 0 || ax >= w || ay >= h || bx < 0 || by < 0 || bx >= w || by >= h
                {
                    continue;
                }
                let a = g.get(ax as usize, ay as usize);
                let b = g.get(bx as usize, by as usize);
                if a * b < 0.0 && (a - b).abs() > params.zc_threshold {
                    edge = true;
                    break;
                }
            }
            if edge {
                out.set(x as usize, y as usize, 1);
            }
        }
    }
    Ok(out)
}

/// Non-maximum suppression with gradient direction quantized to
/// {0°, 45°, 90°, 135°}. A pixel survives iff its magnitude is ≥ both
/// neighbors along the quantized direction (out-of-range neighbors read 0).
fn non_maximum_suppression(grad: &GradientField) -> Image2D {
    let (w, h) = (grad.magnitude.width() as isize, grad.magnitude.height() as isize);
    let mut out = Image2D::filled(grad.magnitude.width(), grad.magnitude.height(), 0.0).unwrap();
    let read = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            grad.magnitude.get(x as usize, y as usize)
        }
    };
    for y in 0..h {
        for x in 0..w {
            let m = grad.magnitude.get(x as usize, y as usize);
            if m == 0.0 {
                continue;
            }
            // fold direction into [0, π) and pick one of 4 bins
            let mut th = grad.direction.get(x as usize, y as usize);
            if th < 0.0 {
                th += PI;
            }
            let bin = ((th / (PI / 4.0)) + 0.5).floor() as i32 % 4;
            let (dx, dy) = match bin {
                0 => (1, 0),   // gradient ~horizontal
                1 => (1, 1),   // ~45° (y down)
                2 => (0, 1),   // ~vertical
                _ => (-1, 1),  // ~135°
            };
            if m >= read(x + dx, y + dy) && m >= read(x - dx, y - dy) {
                out.set(x as usize, y as usize, m);
            }
        }
    }
    out
}

/// Canny: Gaussian smoothing → Sobel gradient → NMS → double threshold at
/// fractions of the max magnitude → 8-connected hysteresis.
pub fn canny(image: &Image2D, params: &EdgeParams) -> Result<BinaryMask> {
    params.validate()?;
    let anchored = subtract_min(image);
    let smoothed = convolve2d(
        &anchored,
        &gaussian_kernel(params.sigma, params.kernel_radius),
        Border::Replicate,
    );
    let grad = sobel(&smoothed);
    let nms = non_maximum_suppression(&grad);
    let max_mag = grad.magnitude.pixels().iter().cloned().fold(0.0_f64, f64::max);
    let (w, h) = (image.width(), image.height());
    let mut out = BinaryMask::zeros(w, h)?;
    if max_mag == 0.0 {
        return Ok(out);
    }
    let (lo, hi) = (params.low * max_mag, params.high * max_mag);
    // 0 = below low, 1 = weak, 2 = strong
    let class: Vec<u8> = nms
        .pixels()
        .iter()
        .map(|&m| {
            if m > 0.0 && m >= hi {
                2
            } else if m > 0.0 && m >= lo {
                1
            } else {
                0
            }
        })
        .collect();
    let mut keep = vec![false; w * h];
    let mut stack: Vec<usize> =
        (0..w * h).filter(|&j| class[j] == 2).inspect(|&j| keep[j] = true).collect();
    while let Some(idx) = stack.pop() {
        let (x, y) = ((idx % w) as isize, (idx / w) as isize);
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if class[nidx] >= 1 && !keep[nidx] {
                    keep[nidx] = true;
                    stack.push(nidx);
                }
            }
        }
    }
    for (j, &k) in keep.iter().enumerate() {
        if k {
            out.set(j % w, j / w, 1);
        }
    }
    Ok(out)
}

/// Gradient-magnitude thresholding at a fraction of the max magnitude; the
/// baseline the CLI uses for Sobel/Prewitt edge maps.
pub fn threshold_magnitude(grad: &GradientField, fraction: f64) -> BinaryMask {
    let max_mag = grad.magnitude.pixels().iter().cloned().fold(0.0_f64, f64::max);
    let cut = fraction * max_mag;
    let values = grad
        .magnitude
        .pixels()
        .iter()
        .map(|&m| u8::from(max_mag > 0.0 && m >= cut && m > 0.0))
        .collect();
    BinaryMask::new(grad.magnitude.width(), grad.magnitude.height(), values).unwrap()
}

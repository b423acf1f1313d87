//! Synthetic phantoms with known ground truth, plus segmentation and
//! edge-quality metrics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::image::{check_same_dims, BinaryMask, Image2D};

/// One elliptical lesion: center, semi-axes, rotation (radians), intensity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LesionSpec {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub angle: f64,
    pub intensity: f64,
}

/// Synthetic slice description: nested-ellipse tissue background, elliptical
/// hyperintense lesions, a smooth additive polynomial bias field, and
/// additive Gaussian noise.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    /// Background tissue intensities; level 0 fills the image, each further
    /// level fills a smaller centered ellipse.
    pub tissue_levels: Vec<f64>,
    pub lesions: Vec<LesionSpec>,
    /// Coefficients (c0, cu, cv, cuu, cuv, cvv) of a degree-2 polynomial in
    /// the normalized coordinates u, v ∈ [−1, 1].
    pub bias_poly: [f64; 6],
    /// The polynomial is rescaled so max |bias| = bias_amp.
    pub bias_amp: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            tissue_levels: vec![0.2, 0.55],
            lesions: vec![
                LesionSpec { cx: 150.0, cy: 150.0, a: 18.0, b: 13.0, angle: 0.3, intensity: 0.85 },
                LesionSpec { cx: 180.0, cy: 80.0, a: 14.0, b: 18.0, angle: 1.0, intensity: 0.83 },
                LesionSpec { cx: 70.0, cy: 70.0, a: 20.0, b: 14.0, angle: -0.5, intensity: 0.8 },
            ],
            bias_poly: [0.0, 1.0, 0.8, 0.0, 0.0, 0.0],
            bias_amp: 0.1,
            noise_sigma: 0.03,
            seed: 1,
        }
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter("phantom dimensions must be >= 1".into()));
        }
        if self.tissue_levels.is_empty() {
            return Err(Error::InvalidParameter("at least one tissue level required".into()));
        }
        if self.tissue_levels.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidParameter("tissue levels must lie in [0,1]".into()));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::InvalidParameter("noise_sigma must be >= 0".into()));
        }
        let max_tissue = self.tissue_levels.iter().cloned().fold(0.0f64, f64::max);
        for (i, l) in self.lesions.iter().enumerate() {
            if l.intensity <= max_tissue {
                return Err(Error::InvalidParameter(format!(
                    "lesion {i} intensity {} must exceed max tissue level {max_tissue}",
                    l.intensity
                )));
            }
            if l.a <= 0.0 || l.b <= 0.0 {
                return Err(Error::InvalidParameter(format!("lesion {i} semi-axes must be > 0")));
            }
            let r = l.a.max(l.b);
            if l.cx - r < 0.0
                || l.cy - r < 0.0
                || l.cx + r >= self.width as f64
                || l.cy + r >= self.height as f64
            {
                return Err(Error::InvalidParameter(format!(
                    "lesion {i} extends outside image bounds"
                )));
            }
        }
        Ok(())
    }
}

/// Generate (image, lesion ground truth, injected bias field). Deterministic
/// for a given spec (noise is drawn from a seeded generator in raster order).
pub fn make_phantom(spec: &PhantomSpec) -> Result<(Image2D, BinaryMask, Image2D)> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let mut img = vec![spec.tissue_levels[0]; w * h];
    let levels = spec.tissue_levels.len();
    let k_total = (levels - 1).max(1) as f64;
    for (k, &level) in spec.tissue_levels.iter().enumerate().skip(1) {
        let scale = (k_total - (k as f64 - 1.0)) / k_total;
        let rx = 0.45 * w as f64 * scale;
        let ry = 0.45 * h as f64 * scale;
        for y in 0..h {
            for x in 0..w {
                let du = (x as f64 - cx) / rx;
                let dv = (y as f64 - cy) / ry;
                if du * du + dv * dv <= 1.0 {
                    img[y * w + x] = level;
                }
            }
        }
    }
    let mut truth = vec![0u8; w * h];
    for l in &spec.lesions {
        let (ca, sa) = (l.angle.cos(), l.angle.sin());
        for y in 0..h {
            for x in 0..w {
                let dx = x as f64 - l.cx;
                let dy = y as f64 - l.cy;
                let u = (dx * ca + dy * sa) / l.a;
                let v = (-dx * sa + dy * ca) / l.b;
                if u * u + v * v <= 1.0 {
                    img[y * w + x] = l.intensity;
                    truth[y * w + x] = 1;
                }
            }
        }
    }
    // bias: degree-2 polynomial over normalized coords, scaled to bias_amp
    let [c0, c1, c2, c3, c4, c5] = spec.bias_poly;
    let mut bias = vec![0.0f64; w * h];
    let mut max_abs = 0.0f64;
    for y in 0..h {
        for x in 0..w {
            let u = (x as f64 - cx) / (w as f64 / 2.0);
            let v = (y as f64 - cy) / (h as f64 / 2.0);
            let raw = c0 + c1 * u + c2 * v + c3 * u * u + c4 * u * v + c5 * v * v;
            bias[y * w + x] = raw;
            max_abs = max_abs.max(raw.abs());
        }
    }
    if max_abs > 0.0 {
        for b in &mut bias {
            *b = *b / max_abs * spec.bias_amp;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE)).unwrap();
    for j in 0..w * h {
        let n = if spec.noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
        img[j] = (img[j] + bias[j] + n).clamp(0.0, 1.0);
    }
    Ok((
        Image2D::new(w, h, img)?,
        BinaryMask::new(w, h, truth)?,
        Image2D::new(w, h, bias)?,
    ))
}

fn confusion(pred: &BinaryMask, truth: &BinaryMask) -> Result<(usize, usize, usize, usize)> {
    check_same_dims((pred.width(), pred.height()), (truth.width(), truth.height()))?;
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &t) in pred.values().iter().zip(truth.values()) {
        match (p, t) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 1) => fn_ += 1,
            _ => tn += 1,
        }
    }
    Ok((tp, fp, fn_, tn))
}

/// Dice overlap 2|A∩B| / (|A|+|B|); 1.0 when both masks are empty.
pub fn dice(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let (tp, fp, fn_, _) = confusion(a, b)?;
    let denom = 2 * tp + fp + fn_;
    Ok(if denom == 0 { 1.0 } else { 2.0 * tp as f64 / denom as f64 })
}

/// Jaccard index |A∩B| / |A∪B|; 1.0 when both masks are empty.
pub fn jaccard(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    let (tp, fp, fn_, _) = confusion(a, b)?;
    let denom = tp + fp + fn_;
    Ok(if denom == 0 { 1.0 } else { tp as f64 / denom as f64 })
}

/// TP / (TP + FN); 1.0 when the truth is empty (vacuous).
pub fn sensitivity(pred: &BinaryMask, truth: &BinaryMask) -> Result<f64> {
    let (tp, _, fn_, _) = confusion(pred, truth)?;
    Ok(if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 })
}

/// TN / (TN + FP); 1.0 when there are no true negatives to protect.
pub fn specificity(pred: &BinaryMask, truth: &BinaryMask) -> Result<f64> {
    let (_, fp, _, tn) = confusion(pred, truth)?;
    Ok(if tn + fp == 0 { 1.0 } else { tn as f64 / (tn + fp) as f64 })
}

/// Chebyshev dilation by `tol` pixels (square structuring element).
fn chebyshev_dilate(mask: &BinaryMask, tol: usize) -> BinaryMask {
    if tol == 0 {
        return mask.clone();
    }
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let t = tol as isize;
    let mut out = BinaryMask::zeros(mask.width(), mask.height()).unwrap();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x as usize, y as usize) == 0 {
                continue;
            }
            for dy in -t..=t {
                for dx in -t..=t {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && nx < w && ny < h {
                        out.set(nx as usize, ny as usize, 1);
                    }
                }
            }
        }
    }
    out
}

/// Boundary F1 with tolerance: a predicted pixel matches if a truth pixel
/// lies within Chebyshev distance tol_px, and symmetrically for recall.
/// 1.0 when both masks are empty.
pub fn edge_f1(pred: &BinaryMask, truth: &BinaryMask, tol_px: usize) -> Result<f64> {
    check_same_dims((pred.width(), pred.height()), (truth.width(), truth.height()))?;
    let np = pred.count_ones();
    let nt = truth.count_ones();
    if np == 0 && nt == 0 {
        return Ok(1.0);
    }
    if np == 0 || nt == 0 {
        return Ok(0.0);
    }
    let truth_zone = chebyshev_dilate(truth, tol_px);
    let pred_zone = chebyshev_dilate(pred, tol_px);
    let matched_pred = pred
        .values()
        .iter()
        .zip(truth_zone.values())
        .filter(|(&p, &z)| p == 1 && z == 1)
        .count();
    let matched_truth = truth
        .values()
        .iter()
        .zip(pred_zone.values())
        .filter(|(&t, &z)| t == 1 && z == 1)
        .count();
    let precision = matched_pred as f64 / np as f64;
    let recall = matched_truth as f64 / nt as f64;
    Ok(if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let values = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| u8::from(c == '1')))
            .collect();
        BinaryMask::new(w, h, values).unwrap()
    }

    #[test]
    fn overlap_metrics() {
        let a = from_rows(&["110", "110", "000"]);
        let b = from_rows(&["011", "011", "000"]);
        // |A|=|B|=4, |A∩B|=2
        assert_eq!(dice(&a, &b).unwrap(), 0.5);
        assert!((jaccard(&a, &b).unwrap() - 2.0 / 6.0).abs() < 1e-12);
        assert_eq!(dice(&a, &a).unwrap(), 1.0);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        let empty = BinaryMask::zeros(3, 3).unwrap();
        assert_eq!(dice(&empty, &empty).unwrap(), 1.0);
        assert_eq!(dice(&a, &empty).unwrap(), 0.0);
        // symmetry
        assert_eq!(dice(&a, &b).unwrap(), dice(&b, &a).unwrap());
        // J = D/(2−D)
        let d = dice(&a, &b).unwrap();
        assert!((jaccard(&a, &b).unwrap() - d / (2.0 - d)).abs() < 1e-12);
    }

    #[test]
    fn sensitivity_specificity() {
        let pred = from_rows(&["10", "00"]);
        let truth = from_rows(&["11", "00"]);
        assert_eq!(sensitivity(&pred, &truth).unwrap(), 0.5);
        assert_eq!(specificity(&pred, &truth).unwrap(), 1.0);
        let empty = BinaryMask::zeros(2, 2).unwrap();
        assert_eq!(sensitivity(&pred, &empty).unwrap(), 1.0);
        let full = BinaryMask::ones(2, 2).unwrap();
        assert_eq!(specificity(&full, &full).unwrap(), 1.0);
    }

    #[test]
    fn edge_f1_tolerance() {
        let truth = from_rows(&["00100", "00100", "00100"]);
        assert_eq!(edge_f1(&truth, &truth, 1).unwrap(), 1.0);
        let shifted = from_rows(&["01000", "01000", "01000"]);
        assert_eq!(edge_f1(&shifted, &truth, 1).unwrap(), 1.0);
        assert_eq!(edge_f1(&shifted, &truth, 0).unwrap(), 0.0);
        let empty = BinaryMask::zeros(5, 3).unwrap();
        assert_eq!(edge_f1(&empty, &truth, 1).unwrap(), 0.0);
        assert_eq!(edge_f1(&empty, &empty, 1).unwrap(), 1.0);
    }

    #[test]
    fn phantom_degenerate_and_deterministic() {
        let spec = PhantomSpec {
            tissue_levels: vec![0.4],
            lesions: vec![],
            bias_poly: [0.0; 6],
            bias_amp: 0.0,
            noise_sigma: 0.0,
            width: 16,
            height: 16,
            seed: 3,
        };
        let (img, truth, bias) = make_phantom(&spec).unwrap();
        assert!(img.pixels().iter().all(|&v| v == 0.4));
        assert_eq!(truth.count_ones(), 0);
        assert!(bias.pixels().iter().all(|&v| v == 0.0));

        let spec2 = PhantomSpec::default();
        let a = make_phantom(&spec2).unwrap();
        let b = make_phantom(&spec2).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.2, b.2);
    }

    #[test]
    fn phantom_single_ellipse_no_noise() {
        let spec = PhantomSpec {
            width: 64,
            height: 64,
            tissue_levels: vec![0.2],
            lesions: vec![LesionSpec {
                cx: 32.0,
                cy: 32.0,
                a: 8.0,
                b: 5.0,
                angle: 0.0,
                intensity: 0.9,
            }],
            bias_poly: [0.0; 6],
            bias_amp: 0.0,
            noise_sigma: 0.0,
            seed: 0,
        };
        let (img, truth, _) = make_phantom(&spec).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                let u = (x as f64 - 32.0) / 8.0;
                let v = (y as f64 - 32.0) / 5.0;
                let inside = u * u + v * v <= 1.0;
                assert_eq!(truth.get(x, y) == 1, inside);
                assert_eq!(img.get(x, y), if inside { 0.9 } else { 0.2 });
            }
        }
    }

    #[test]
    fn truth_invariant_to_noise_and_bias() {
        let mut spec = PhantomSpec::default();
        let (_, t1, _) = make_phantom(&spec).unwrap();
        spec.noise_sigma = 0.1;
        spec.bias_poly = [0.3, -0.5, 0.2, 0.4, 0.0, 0.1];
        let (_, t2, _) = make_phantom(&spec).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = PhantomSpec::default();
        spec.lesions[0].intensity = 0.5; // below max tissue level 0.55
        assert!(make_phantom(&spec).is_err());
        let mut spec = PhantomSpec::default();
        spec.lesions[0].cx = 250.0; // extends past the right edge
        assert!(make_phantom(&spec).is_err());
        let spec = PhantomSpec { noise_sigma: -0.1, ..PhantomSpec::default() };
        assert!(make_phantom(&spec).is_err());
    }

    #[test]
    fn bias_amp_respected() {
        let spec = PhantomSpec::default();
        let (_, _, bias) = make_phantom(&spec).unwrap();
        let max_abs = bias.pixels().iter().map(|b| b.abs()).fold(0.0f64, f64::max);
        assert!((max_abs - spec.bias_amp).abs() < 1e-9);
    }
}

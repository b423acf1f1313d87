//! End-to-end lesion segmentation: brain mask → Canny edges → modified FCM →
//! brightest-centroid lesion extraction → edge gating and size filtering.

use crate::edge::{canny, EdgeParams};
use crate::error::{Error, Result};
use crate::fcm::{defuzzify, fcm_modified, FcmParams};
use crate::image::{check_same_dims, normalize_intensities, BinaryMask, Image2D};
use crate::morphology;
use crate::preprocess::{apply_mask, extract_brain_mask, BrainMaskParams};

/// How Canny edges gate the FCM lesion components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeGate {
    Off,
    /// Keep a lesion component only if at least `overlap_ratio` of its
    /// boundary pixels fall on the (1-px-dilated) edge map.
    #[default]
    BoundaryOverlap,
}

/// Full pipeline configuration.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub brain: BrainMaskParams,
    pub edge: EdgeParams,
    pub fcm: FcmParams,
    pub edge_gate: EdgeGate,
    pub overlap_ratio: f64,
    pub min_lesion_px: usize,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.brain.validate()?;
        self.edge.validate()?;
        self.fcm.validate()?;
        if !(0.0..=1.0).contains(&self.overlap_ratio) {
            return Err(Error::InvalidParameter(format!(
                "overlap_ratio {} outside [0,1]",
                self.overlap_ratio
            )));
        }
        Ok(())
    }
}

// Keep the serde default and Rust Default in sync with the documented
// pipeline defaults.
impl PipelineConfig {
    pub fn standard() -> Self {
        Self {
            brain: BrainMaskParams::default(),
            edge: EdgeParams::default(),
            fcm: FcmParams::default(),
            edge_gate: EdgeGate::BoundaryOverlap,
            overlap_ratio: 0.5,
            min_lesion_px: 10,
        }
    }
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone)]
pub struct SegmentationResult {
    pub lesion_mask: BinaryMask,
    pub brain_mask: BinaryMask,
    /// Grid-sized labels: 0 = outside brain, 1..=c = cluster index + 1
    /// (clusters ordered by ascending centroid).
    pub label_map: Vec<u8>,
    /// Ascending centroids.
    pub centroids: Vec<f64>,
    /// One membership image per cluster (0 outside the brain).
    pub membership_maps: Vec<Image2D>,
    /// Estimated bias field γ (0 outside the brain).
    pub bias_field: Image2D,
    pub edge_map: BinaryMask,
    pub config_echo: PipelineConfig,
    pub iterations: usize,
    pub final_objective: f64,
}

/// Run the full pipeline. If `external_mask` is given it replaces the
/// computed brain mask.
pub fn segment_lesions(
    image: &Image2D,
    config: &PipelineConfig,
    external_mask: Option<&BinaryMask>,
) -> Result<SegmentationResult> {
    config.validate()?;
    let normalized = normalize_intensities(image);
    if normalized.pixels().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidParameter(
            "input image is constant; nothing to segment".into(),
        ));
    }
    let brain_mask = match external_mask {
        Some(m) => {
            check_same_dims((image.width(), image.height()), (m.width(), m.height()))?;
            if m.count_ones() == 0 {
                return Err(Error::EmptyMask);
            }
            m.clone()
        }
        None => extract_brain_mask(&normalized, &config.brain)?,
    };
    let masked = apply_mask(&normalized, &brain_mask)?;
    let edge_map = canny(&masked, &config.edge)?;
    let state = fcm_modified(&normalized, &brain_mask, &config.fcm)?;

    let (w, h) = (image.width(), image.height());
    let c = config.fcm.c;
    let active: Vec<usize> = (0..w * h).filter(|&j| brain_mask.values()[j] == 1).collect();
    let n = active.len();
    let labels = defuzzify(&state.u, c);

    let mut label_map = vec![0u8; w * h];
    let mut membership_maps: Vec<Image2D> = Vec::with_capacity(c);
    let mut membership_bufs = vec![vec![0.0f64; w * h]; c];
    let mut bias_buf = vec![0.0f64; w * h];
    let mut lesion = BinaryMask::zeros(w, h)?;
    let lesion_cluster = c - 1; // centroids are canonically ascending
    for (j, &grid) in active.iter().enumerate() {
        label_map[grid] = labels[j] as u8 + 1;
        bias_buf[grid] = state.gamma[j];
        for (i, buf) in membership_bufs.iter_mut().enumerate() {
            buf[grid] = state.u[i * n + j];
        }
        if labels[j] == lesion_cluster {
            lesion.set(grid % w, grid / w, 1);
        }
    }
    for buf in membership_bufs {
        membership_maps.push(Image2D::new(w, h, buf)?);
    }
    let bias_field = Image2D::new(w, h, bias_buf)?;

    let lesion_mask = filter_components(&lesion, &edge_map, config)?;

    Ok(SegmentationResult {
        lesion_mask,
        brain_mask,
        label_map,
        centroids: state.v.clone(),
        membership_maps,
        bias_field,
        edge_map,
        config_echo: config.clone(),
        iterations: state.iterations_run,
        final_objective: state.j_history.last().copied().unwrap_or(0.0),
    })
}

/// Apply the edge gate and minimum-size filter per 8-connected component.
fn filter_components(
    lesion: &BinaryMask,
    edge_map: &BinaryMask,
    config: &PipelineConfig,
) -> Result<BinaryMask> {
    let (w, h) = (lesion.width(), lesion.height());
    let (labels, count) = morphology::connected_components(lesion);
    if count == 0 {
        return Ok(lesion.clone());
    }
    let mut keep = vec![true; count + 1];
    let mut sizes = vec![0usize; count + 1];
    for &l in &labels {
        sizes[l as usize] += 1;
    }
    for (comp, keep_flag) in keep.iter_mut().enumerate().skip(1) {
        if sizes[comp] < config.min_lesion_px {
            *keep_flag = false;
        }
    }
    if config.edge_gate == EdgeGate::BoundaryOverlap {
        let dilated_edges = morphology::dilate(edge_map, 1);
        let boundary = morphology::boundary(lesion);
        let mut boundary_px = vec![0usize; count + 1];
        let mut boundary_hit = vec![0usize; count + 1];
        for ((&b, &l), &e) in
            boundary.values().iter().zip(&labels).zip(dilated_edges.values())
        {
            if b == 1 {
                let comp = l as usize;
                boundary_px[comp] += 1;
                if e == 1 {
                    boundary_hit[comp] += 1;
                }
            }
        }
        for comp in 1..=count {
            if boundary_px[comp] > 0 {
                let frac = boundary_hit[comp] as f64 / boundary_px[comp] as f64;
                if frac < config.overlap_ratio {
                    keep[comp] = false;
                }
            }
        }
    }
    let values = labels.iter().map(|&l| u8::from(l != 0 && keep[l as usize])).collect();
    BinaryMask::new(w, h, values)
}

/// Visualization helper: masked pixels set to full intensity.
pub fn overlay(image: &Image2D, mask: &BinaryMask) -> Result<Image2D> {
    check_same_dims((image.width(), image.height()), (mask.width(), mask.height()))?;
    let pixels = image
        .pixels()
        .iter()
        .zip(mask.values())
        .map(|(&v, &m)| if m == 1 { 1.0 } else { v })
        .collect();
    Image2D::new(image.width(), image.height(), pixels)
}

//! Fuzzy C-Means: the standard alternating scheme and the modified variant
//! with a neighborhood regularizer S and a bias-field term γ.
//!
//! The modified objective minimized here is
//!
//!   J' = Σ_i Σ_j u_ij^m [ (x_j − v_i)² + α · avg_{n∈N_j} (x_n − v_i)² ]
//!        + β · Σ_j γ_j²,        with x_j = y_j − γ_j.
//!
//! Every sweep performs exact block-coordinate descent: memberships are the
//! exact constrained minimizer given (V, γ); centroids the exact minimizer
//! given (U, γ); and the γ step moves along the direction of a smoothed
//! per-pixel minimizer with an exact line search, so J' never increases.
//! Smoothing the raw per-pixel γ minimizer is what keeps the bias field a
//! low-frequency field instead of a per-pixel residual that would absorb
//! lesions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::{BinaryMask, Image2D};

/// Initialization strategy for the centroids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMethod {
    /// v_i = the (i+0.5)/c quantile of the active intensities
    /// (deterministic, seed-independent).
    #[default]
    Quantile,
    /// c distinct active pixels drawn with the seeded generator.
    RandomPixels,
}

/// Clustering configuration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct FcmParams {
    /// Cluster count c ≥ 2.
    pub c: usize,
    /// Fuzziness exponent m > 1.
    pub m: f64,
    /// Neighborhood regularizer weight α ≥ 0.
    pub alpha: f64,
    /// Bias-field regularizer weight β ≥ 0.
    pub beta: f64,
    /// N_ε is the (2r+1)² window minus center, intersected with the mask.
    pub neighborhood_radius: usize,
    /// Gaussian σ (pixels) used to smooth the per-pixel γ minimizer before
    /// the line search; 0 disables smoothing.
    pub bias_smooth_sigma: f64,
    pub max_iter: usize,
    /// Convergence threshold on max_i |Δv_i|.
    pub tol: f64,
    /// Seed for random-pixels initialization.
    pub seed: u64,
    pub init: InitMethod,
}

impl Default for FcmParams {
    fn default() -> Self {
        Self {
            c: 3,
            m: 2.0,
            alpha: 1.0,
            beta: 1.0,
            neighborhood_radius: 1,
            bias_smooth_sigma: 16.0,
            max_iter: 200,
            tol: 1e-5,
            seed: 0,
            init: InitMethod::Quantile,
        }
    }
}

impl FcmParams {
    // `!(x > t)` is deliberate: it rejects NaN along with out-of-range values
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.c < 2 {
            return Err(Error::InvalidParameter(format!("c = {} must be >= 2", self.c)));
        }
        if !(self.m > 1.0) {
            return Err(Error::InvalidParameter(format!("m = {} must be > 1", self.m)));
        }
        if self.alpha < 0.0 || self.beta < 0.0 {
            return Err(Error::InvalidParameter("alpha and beta must be >= 0".into()));
        }
        if self.neighborhood_radius == 0 {
            return Err(Error::InvalidParameter("neighborhood_radius must be >= 1".into()));
        }
        if self.bias_smooth_sigma < 0.0 {
            return Err(Error::InvalidParameter("bias_smooth_sigma must be >= 0".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be > 0".into()));
        }
        Ok(())
    }
}

/// Result of a clustering run. `u` is c×N row-major (cluster-major), sorted
/// so that `v` is ascending; `gamma` is all-zeros for the standard variant.
#[derive(Debug, Clone)]
pub struct FcmState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub gamma: Vec<f64>,
    pub iterations_run: usize,
    pub j_history: Vec<f64>,
}

impl FcmState {
    pub fn n_pixels(&self) -> usize {
        self.gamma.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.v.len()
    }
}

/// u^m with a fast path for the ubiquitous default m = 2.
#[inline]
fn upow(u: f64, m: f64) -> f64 {
    if m == 2.0 {
        u * u
    } else {
        u.powf(m)
    }
}

/// Linear-interpolation quantile of unsorted data, q ∈ [0,1].
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn initial_centroids(data: &[f64], params: &FcmParams) -> Vec<f64> {
    match params.init {
        InitMethod::Quantile => {
            let mut sorted = data.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (0..params.c)
                .map(|i| quantile(&sorted, (i as f64 + 0.5) / params.c as f64))
                .collect()
        }
        InitMethod::RandomPixels => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            // partial Fisher-Yates over pixel indices: c distinct pixels
            let n = data.len();
            let mut idx: Vec<usize> = (0..n).collect();
            let mut picked = Vec::with_capacity(params.c);
            for i in 0..params.c.min(n) {
                let j = i + (rand::Rng::random_range(&mut rng, 0..(n - i) as u64)) as usize;
                idx.swap(i, j);
                picked.push(data[idx[i]]);
            }
            picked
        }
    }
}

/// Membership minimizer for per-pixel distance terms `d` (c×N row-major):
/// u_ij ∝ d_ij^(−1/(m−1)), with membership split equally among clusters
/// whose distance term is exactly zero (coincident-centroid rule).
fn memberships_from_distances(d: &[f64], c: usize, n: usize, m: f64) -> Vec<f64> {
    let expo = -1.0 / (m - 1.0);
    let mut u = vec![0.0f64; c * n];
    for j in 0..n {
        let mut zeros = 0usize;
        for i in 0..c {
            if d[i * n + j] <= 0.0 {
                zeros += 1;
            }
        }
        if zeros > 0 {
            let share = 1.0 / zeros as f64;
            for i in 0..c {
                u[i * n + j] = if d[i * n + j] <= 0.0 { share } else { 0.0 };
            }
        } else {
            let mut sum = 0.0;
            for i in 0..c {
                // expo = −1 for the default m = 2
                let p = if expo == -1.0 { 1.0 / d[i * n + j] } else { d[i * n + j].powf(expo) };
                u[i * n + j] = p;
                sum += p;
            }
            for i in 0..c {
                u[i * n + j] /= sum;
            }
        }
    }
    u
}

/// Standard FCM membership update (per-cluster squared distances).
pub fn membership_update(data: &[f64], v: &[f64], m: f64) -> Vec<f64> {
    let (c, n) = (v.len(), data.len());
    let mut d = vec![0.0f64; c * n];
    for i in 0..c {
        for j in 0..n {
            let diff = data[j] - v[i];
            d[i * n + j] = diff * diff;
        }
    }
    memberships_from_distances(&d, c, n, m)
}

/// Standard FCM centroid update: v_i = Σ_j u_ij^m x_j / Σ_j u_ij^m.
pub fn centroid_update(data: &[f64], u: &[f64], c: usize, m: f64) -> Result<Vec<f64>> {
    let n = data.len();
    let mut v = Vec::with_capacity(c);
    for i in 0..c {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let w = upow(u[i * n + j], m);
            num += w * data[j];
            den += w;
        }
        if den == 0.0 {
            return Err(Error::DegenerateCluster(i));
        }
        v.push(num / den);
    }
    Ok(v)
}

/// Standard FCM objective J = Σ_i Σ_j u_ij^m (x_j − v_i)².
pub fn objective_standard(data: &[f64], u: &[f64], v: &[f64], m: f64) -> f64 {
    let (c, n) = (v.len(), data.len());
    let mut j_val = 0.0;
    for i in 0..c {
        for j in 0..n {
            let diff = data[j] - v[i];
            j_val += upow(u[i * n + j], m) * diff * diff;
        }
    }
    j_val
}

/// Hard labels via per-pixel argmax; ties go to the lowest cluster index.
pub fn defuzzify(u: &[f64], c: usize) -> Vec<usize> {
    let n = u.len() / c;
    (0..n)
        .map(|j| {
            let mut best = 0usize;
            for i in 1..c {
                if u[i * n + j] > u[best * n + j] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// Sort centroids ascending and permute membership rows (and any per-cluster
/// payload) to match, so cluster indices are canonical across runs.
fn canonicalize(u: &mut Vec<f64>, v: &mut [f64], n: usize) {
    let c = v.len();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap().then(a.cmp(&b)));
    let old_u = std::mem::replace(u, vec![0.0; c * n]);
    let old_v = v.to_vec();
    for (new_i, &old_i) in order.iter().enumerate() {
        v[new_i] = old_v[old_i];
        u[new_i * n..(new_i + 1) * n].copy_from_slice(&old_u[old_i * n..(old_i + 1) * n]);
    }
}

/// Standard FCM (Eqs. of the classic alternating scheme) on scalar data.
pub fn fcm_standard(data: &[f64], params: &FcmParams) -> Result<FcmState> {
    params.validate()?;
    let n = data.len();
    if n < params.c {
        return Err(Error::MaskTooSmall { active: n, clusters: params.c });
    }
    let c = params.c;
    let m = params.m;
    let mut v = initial_centroids(data, params);
    let mut u = Vec::new();
    let mut j_history = Vec::new();
    for _ in 0..params.max_iter {
        u = membership_update(data, &v, m);
        let v_new = centroid_update(data, &u, c, m)?;
        j_history.push(objective_standard(data, &u, &v_new, m));
        let dv = v
            .iter()
            .zip(&v_new)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        v = v_new;
        if dv < params.tol {
            break;
        }
    }
    canonicalize(&mut u, &mut v, n);
    Ok(FcmState { u, v, gamma: vec![0.0; n], iterations_run: j_history.len(), j_history })
}

/// Active-pixel bookkeeping shared by the modified objective and solver.
struct ActiveSet {
    width: usize,
    height: usize,
    /// Grid index of each active pixel, raster order.
    grid_idx: Vec<usize>,
    /// Neighbor lists in active-index space; an isolated pixel is treated
    /// as its own neighbor so every list is non-empty.
    neighbors: Vec<Vec<u32>>,
}

impl ActiveSet {
    fn build(mask: &BinaryMask, radius: usize) -> Self {
        let (w, h) = (mask.width(), mask.height());
        let mut grid_idx = Vec::new();
        let mut active_of = vec![u32::MAX; w * h];
        for (idx, slot) in active_of.iter_mut().enumerate() {
            if mask.values()[idx] == 1 {
                *slot = grid_idx.len() as u32;
                grid_idx.push(idx);
            }
        }
        let r = radius as isize;
        let neighbors = grid_idx
            .iter()
            .enumerate()
            .map(|(j, &idx)| {
                let (x, y) = ((idx % w) as isize, (idx / w) as isize);
                let mut list = Vec::new();
                for dy in -r..=r {
                    for dx in -r..=r {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let a = active_of[ny as usize * w + nx as usize];
                        if a != u32::MAX {
                            list.push(a);
                        }
                    }
                }
                if list.is_empty() {
                    list.push(j as u32);
                }
                list
            })
            .collect();
        Self { width: w, height: h, grid_idx, neighbors }
    }

    fn len(&self) -> usize {
        self.grid_idx.len()
    }

    /// Per-pixel neighbor sums of x and x² over N_j.
    fn neighbor_sums(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.len();
        let mut s1 = vec![0.0; n];
        let mut s2 = vec![0.0; n];
        for j in 0..n {
            for &k in &self.neighbors[j] {
                let xv = x[k as usize];
                s1[j] += xv;
                s2[j] += xv * xv;
            }
        }
        (s1, s2)
    }
}

/// Modified objective J' (see module docs), evaluated for explicit state.
/// The bias regularizer is Σ_j γ_j² — the printed per-membership weighting
/// collapses to this because memberships sum to 1 over clusters.
pub fn objective_modified(
    y: &Image2D,
    mask: &BinaryMask,
    u: &[f64],
    v: &[f64],
    gamma: &[f64],
    params: &FcmParams,
) -> f64 {
    let act = ActiveSet::build(mask, params.neighborhood_radius);
    let yv: Vec<f64> = act.grid_idx.iter().map(|&i| y.pixels()[i]).collect();
    objective_modified_inner(&act, &yv, u, v, gamma, params)
}

fn objective_modified_inner(
    act: &ActiveSet,
    y: &[f64],
    u: &[f64],
    v: &[f64],
    gamma: &[f64],
    params: &FcmParams,
) -> f64 {
    let n = act.len();
    let c = v.len();
    let m = params.m;
    let x: Vec<f64> = (0..n).map(|j| y[j] - gamma[j]).collect();
    let (s1, s2) = act.neighbor_sums(&x);
    let mut dm = 0.0;
    let mut st = 0.0;
    for i in 0..c {
        let vi = v[i];
        for j in 0..n {
            let um = upow(u[i * n + j], m);
            let diff = x[j] - vi;
            dm += um * diff * diff;
            let cnt = act.neighbors[j].len() as f64;
            st += um * ((s2[j] - 2.0 * vi * s1[j]) / cnt + vi * vi);
        }
    }
    let rt: f64 = gamma.iter().map(|g| g * g).sum();
    dm + params.alpha * st + params.beta * rt
}

/// Gaussian taps at integer offsets −r..=r with r = ceil(3σ).
fn smooth_taps(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    (-r..=r).map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp()).collect()
}

/// Separable (row then column) convolution with zero padding.
fn separable_conv(buf: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    let r = (kernel.len() / 2) as isize;
    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        let row = &buf[y * w..(y + 1) * w];
        let out = &mut tmp[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (ki, &kw) in kernel.iter().enumerate() {
                let sx = x as isize + ki as isize - r;
                if sx >= 0 && (sx as usize) < w {
                    acc += kw * row[sx as usize];
                }
            }
            *o = acc;
        }
    }
    // column pass: accumulate whole shifted rows so accesses stay sequential
    let mut out = vec![0.0f64; w * h];
    for y in 0..h {
        for (ki, &kw) in kernel.iter().enumerate() {
            let sy = y as isize + ki as isize - r;
            if sy >= 0 && (sy as usize) < h {
                let src = &tmp[sy as usize * w..(sy as usize + 1) * w];
                let dst = &mut out[y * w..(y + 1) * w];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += kw * s;
                }
            }
        }
    }
    out
}

/// Mask-weight normalization image for `masked_gaussian_smooth`; constant
/// for a fixed mask, so callers may compute it once and reuse it.
fn smooth_denominator(act: &ActiveSet, sigma: f64) -> Vec<f64> {
    let (w, h) = (act.width, act.height);
    let mut den = vec![0.0f64; w * h];
    for &idx in &act.grid_idx {
        den[idx] = 1.0;
    }
    separable_conv(&den, w, h, &smooth_taps(sigma))
}

/// Separable Gaussian smoothing of a field defined on the active set,
/// normalized by the mask so support boundaries do not bleed to zero.
fn masked_gaussian_smooth(act: &ActiveSet, field: &[f64], sigma: f64, den: &[f64]) -> Vec<f64> {
    let (w, h) = (act.width, act.height);
    let mut num = vec![0.0f64; w * h];
    for (j, &idx) in act.grid_idx.iter().enumerate() {
        num[idx] = field[j];
    }
    let num = separable_conv(&num, w, h, &smooth_taps(sigma));
    act.grid_idx
        .iter()
        .map(|&idx| if den[idx] > 0.0 { num[idx] / den[idx] } else { 0.0 })
        .collect()
}

/// Modified FCM on the mask's active pixels. Returns state indexed by the
/// active set in raster order, centroids canonically ascending.
pub fn fcm_modified(y: &Image2D, mask: &BinaryMask, params: &FcmParams) -> Result<FcmState> {
    params.validate()?;
    crate::image::check_same_dims(
        (y.width(), y.height()),
        (mask.width(), mask.height()),
    )?;
    let act = ActiveSet::build(mask, params.neighborhood_radius);
    let n = act.len();
    if n < params.c {
        return Err(Error::MaskTooSmall { active: n, clusters: params.c });
    }
    let c = params.c;
    let m = params.m;
    let alpha = params.alpha;
    let beta = params.beta;
    let standard_mode = alpha == 0.0 && beta == 0.0;
    let yv: Vec<f64> = act.grid_idx.iter().map(|&i| y.pixels()[i]).collect();
    let mut v = initial_centroids(&yv, params);
    let mut gamma = vec![0.0f64; n];
    let mut u = Vec::new();
    let mut j_history = Vec::new();
    let smooth_den = if !standard_mode && params.bias_smooth_sigma > 0.0 {
        smooth_denominator(&act, params.bias_smooth_sigma)
    } else {
        Vec::new()
    };

    for _ in 0..params.max_iter {
        let x: Vec<f64> = (0..n).map(|j| yv[j] - gamma[j]).collect();
        let (s1, s2) = act.neighbor_sums(&x);
        // memberships from d_i = (x−v_i)² + α·avg_{N_j}(x_n − v_i)²
        let mut d = vec![0.0f64; c * n];
        for i in 0..c {
            let vi = v[i];
            for j in 0..n {
                let diff = x[j] - vi;
                let cnt = act.neighbors[j].len() as f64;
                d[i * n + j] =
                    diff * diff + alpha * ((s2[j] - 2.0 * vi * s1[j]) / cnt + vi * vi);
            }
        }
        u = memberships_from_distances(&d, c, n, m);
        // centroids: exact minimizer v_i = Σ u^m (x_j + α x̄_j) / ((1+α) Σ u^m)
        let mut v_new = Vec::with_capacity(c);
        let mut a_col = vec![0.0f64; n]; // A_j = Σ_i u_ij^m
        for i in 0..c {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..n {
                let w = upow(u[i * n + j], m);
                let cnt = act.neighbors[j].len() as f64;
                num += w * (x[j] + alpha * s1[j] / cnt);
                den += w;
                a_col[j] += w;
            }
            if den == 0.0 {
                return Err(Error::DegenerateCluster(i));
            }
            v_new.push(num / ((1.0 + alpha) * den));
        }
        // bias field: per-pixel exact minimizer, smoothed, with a line search
        // that keeps J' non-increasing. Frozen at 0 when α = β = 0 so the
        // algorithm reduces exactly to standard FCM.
        if !standard_mode {
            let mut b_col = vec![0.0f64; n]; // B_j = Σ_i u_ij^m v_i
            for i in 0..c {
                let vi = v_new[i];
                for j in 0..n {
                    b_col[j] += upow(u[i * n + j], m) * vi;
                }
            }
            // C_j = α Σ_{k∈N_j} A_k/|N_k|, D_j likewise with B (the window is
            // symmetric, so k ∈ N_j iff j ∈ N_k)
            let mut c_col = vec![0.0f64; n];
            let mut d_col = vec![0.0f64; n];
            for j in 0..n {
                for &k in &act.neighbors[j] {
                    let cnt_k = act.neighbors[k as usize].len() as f64;
                    c_col[j] += alpha * a_col[k as usize] / cnt_k;
                    d_col[j] += alpha * b_col[k as usize] / cnt_k;
                }
            }
            let gstar: Vec<f64> = (0..n)
                .map(|j| {
                    ((a_col[j] + c_col[j]) * yv[j] - (b_col[j] + d_col[j]))
                        / (a_col[j] + c_col[j] + beta)
                })
                .collect();
            let gsm = if params.bias_smooth_sigma > 0.0 {
                masked_gaussian_smooth(&act, &gstar, params.bias_smooth_sigma, &smooth_den)
            } else {
                gstar.clone()
            };
            let mut t_num = 0.0;
            let mut t_den = 0.0;
            for j in 0..n {
                let w = a_col[j] + c_col[j] + beta; // curvature of J' in γ_j
                let delta = gsm[j] - gamma[j];
                t_num += w * delta * (gstar[j] - gamma[j]);
                t_den += w * delta * delta;
            }
            let t = if t_den > 0.0 { (t_num / t_den).clamp(0.0, 1.0) } else { 0.0 };
            for j in 0..n {
                gamma[j] += t * (gsm[j] - gamma[j]);
            }
        }
        j_history.push(objective_modified_inner(&act, &yv, &u, &v_new, &gamma, params));
        let dv = v
            .iter()
            .zip(&v_new)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        v = v_new;
        if dv < params.tol {
            break;
        }
    }
    canonicalize(&mut u, &mut v, n);
    Ok(FcmState { u, v, gamma, iterations_run: j_history.len(), j_history })
}

//! Independent brute-force fuzzy c-means oracle used by the acceptance
//! suite. Written directly from the textbook update equations, with no code
//! shared with the library implementation: memberships via the pairwise
//! distance-ratio form, centroids via the weighted-mean form, quantile
//! initialization re-derived from its definition.

#![allow(dead_code)]

/// Linear-interpolation quantile, computed from scratch on a copy.
pub fn oracle_quantile(data: &[f64], q: f64) -> f64 {
    let mut s = data.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if s.len() == 1 {
        return s[0];
    }
    let pos = q * (s.len() as f64 - 1.0);
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    s[below] + (s[above] - s[below]) * (pos - below as f64)
}

/// Quantile initialization at probabilities (i + 0.5)/c.
pub fn oracle_init(data: &[f64], c: usize) -> Vec<f64> {
    (0..c).map(|i| oracle_quantile(data, (i as f64 + 0.5) / c as f64)).collect()
}

/// Membership update via the distance-ratio form:
/// u_ij = 1 / Σ_k (|x_j − v_i| / |x_j − v_k|)^(2/(m−1)),
/// with membership split equally among clusters at distance zero.
/// Returned as per-pixel rows: u[j][i].
pub fn oracle_memberships(data: &[f64], v: &[f64], m: f64) -> Vec<Vec<f64>> {
    let c = v.len();
    data.iter()
        .map(|&x| {
            let dist: Vec<f64> = v.iter().map(|&vi| (x - vi).abs()).collect();
            let zero_count = dist.iter().filter(|&&d| d == 0.0).count();
            if zero_count > 0 {
                return dist
                    .iter()
                    .map(|&d| if d == 0.0 { 1.0 / zero_count as f64 } else { 0.0 })
                    .collect();
            }
            let p = 2.0 / (m - 1.0);
            (0..c)
                .map(|i| {
                    let denom: f64 = (0..c).map(|k| (dist[i] / dist[k]).powf(p)).sum();
                    1.0 / denom
                })
                .collect()
        })
        .collect()
}

/// Centroid update v_i = Σ_j u_ij^m x_j / Σ_j u_ij^m.
pub fn oracle_centroids(data: &[f64], u: &[Vec<f64>], c: usize, m: f64) -> Vec<f64> {
    (0..c)
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (j, &x) in data.iter().enumerate() {
                let w = u[j][i].powf(m);
                num += w * x;
                den += w;
            }
            num / den
        })
        .collect()
}

/// Objective J = Σ_i Σ_j u_ij^m (x_j − v_i)².
pub fn oracle_objective(data: &[f64], u: &[Vec<f64>], v: &[f64], m: f64) -> f64 {
    let mut total = 0.0;
    for (j, &x) in data.iter().enumerate() {
        for (i, &vi) in v.iter().enumerate() {
            total += u[j][i].powf(m) * (x - vi) * (x - vi);
        }
    }
    total
}

/// State after exactly `sweeps` alternating updates (memberships first, then
/// centroids), starting from quantile initialization. Clusters are returned
/// sorted by ascending centroid so they can be compared against canonical
/// library output.
pub fn oracle_run(data: &[f64], c: usize, m: f64, sweeps: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut v = oracle_init(data, c);
    let mut u = Vec::new();
    for _ in 0..sweeps {
        u = oracle_memberships(data, &v, m);
        v = oracle_centroids(data, &u, c, m);
    }
    // canonical ordering: ascending centroids, membership columns permuted
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap().then(a.cmp(&b)));
    let v_sorted: Vec<f64> = order.iter().map(|&i| v[i]).collect();
    let u_sorted: Vec<Vec<f64>> =
        u.iter().map(|row| order.iter().map(|&i| row[i]).collect()).collect();
    (u_sorted, v_sorted)
}

/// Pearson correlation of two equal-length samples.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

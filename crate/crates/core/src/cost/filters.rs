use super::ScalarImage;
use crate::error::{Error, Result};

/// Hessian eigenvalues per pixel, `|λ1| ≤ |λ2|`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianEigs {
    pub width: usize,
    pub height: usize,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
}

/// Sampled Gaussian of standard deviation `sigma` and its first two derivatives, radius `⌈4σ⌉`.
fn kernels(sigma: f64) -> [Vec<f64>; 3] {
    let r = (4.0 * sigma).ceil() as i64;
    let g: Vec<f64> = (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = g.iter().sum();
    let s2 = sigma * sigma;
    let g0: Vec<f64> = g.iter().map(|v| v / norm).collect();
    let g1 = (-r..=r).zip(&g0).map(|(k, v)| -(k as f64) / s2 * v).collect();
    let g2: Vec<f64> = (-r..=r).zip(&g0).map(|(k, v)| ((k * k) as f64 / (s2 * s2) - 1.0 / s2) * v).collect();
    // Zero sum, so constants have no curvature.
    let bias: f64 = g2.iter().sum();
    let g2 = g2.iter().zip(&g0).map(|(a, b)| a - bias * b).collect();
    [g0, g1, g2]
}

/// Half-sample symmetric reflection into `0..n`.
#[inline]
fn reflect(i: i64, n: i64) -> usize {
    let p = 2 * n;
    let m = i.rem_euclid(p);
    (if m < n { m } else { p - 1 - m }) as usize
}

/// Convolve along columns (`axis = 0`) or rows (`axis = 1`).
fn convolve(values: &[f64], w: usize, h: usize, kernel: &[f64], axis: usize) -> Vec<f64> {
    let r = (kernel.len() / 2) as i64;
    let mut out = vec![0.0; values.len()];
    for row in 0..h {
        for col in 0..w {
            let mut acc = 0.0;
            for (t, kv) in kernel.iter().enumerate() {
                // Correlation with the flipped kernel is convolution.
                let off = r - t as i64;
                acc += kv * if axis == 0 {
                    values[reflect(col as i64 - off, w as i64) + w * row]
                } else {
                    values[col + w * reflect(row as i64 - off, h as i64)]
                };
            }
            out[col + w * row] = acc;
        }
    }
    out
}

/// Eigenvalues of the Hessian of `G_s * F`, with `s = σ²/2` in pixels.
pub fn gaussian_hessian_eigs(image: &ScalarImage, s: f64) -> Result<HessianEigs> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Config(format!("scale must be positive, got {s}")));
    }
    let sigma = (2.0 * s).sqrt();
    let [g0, g1, g2] = kernels(sigma);
    let (w, h, f) = (image.width, image.height, &image.values);
    let fxx = convolve(&convolve(f, w, h, &g2, 0), w, h, &g0, 1);
    let fyy = convolve(&convolve(f, w, h, &g0, 0), w, h, &g2, 1);
    let fxy = convolve(&convolve(f, w, h, &g1, 0), w, h, &g1, 1);
    let mut lambda1 = Vec::with_capacity(f.len());
    let mut lambda2 = Vec::with_capacity(f.len());
    for n in 0..f.len() {
        let mean = 0.5 * (fxx[n] + fyy[n]);
        let rad = (0.5 * (fxx[n] - fyy[n])).hypot(fxy[n]);
        let (a, b) = (mean - rad, mean + rad);
        let (l1, l2) = if a.abs() <= b.abs() { (a, b) } else { (b, a) };
        lambda1.push(l1);
        lambda2.push(l2);
    }
    Ok(HessianEigs { width: w, height: h, lambda1, lambda2 })
}

/// Multiscale vesselness, maximum over scales. Only `λ2 ≥ 0` (dark lines on a
/// bright background) respond.
pub fn vesselness(image: &ScalarImage, scales: &[f64], beta: f64, c: f64) -> Result<ScalarImage> {
    if scales.is_empty() {
        return Err(Error::Config("at least one scale is needed".into()));
    }
    if !(beta > 0.0 && c > 0.0) {
        return Err(Error::Config(format!("β and c must be positive (got {beta}, {c})")));
    }
    let mut vf = vec![0.0f64; image.values.len()];
    for &s in scales {
        let e = gaussian_hessian_eigs(image, s)?;
        for (n, v) in vf.iter_mut().enumerate() {
            let (l1, l2) = (e.lambda1[n], e.lambda2[n]);
            if !(l2 > 0.0) {
                continue;
            }
            let blob = (-(l1 * l1) / (2.0 * beta * beta * l2 * l2)).exp();
            let structure = 1.0 - (-(l1 * l1 + l2 * l2) / (2.0 * c * c)).exp();
            *v = v.max(blob * structure);
        }
    }
    Ok(ScalarImage { values: vf, ..image.clone() })
}

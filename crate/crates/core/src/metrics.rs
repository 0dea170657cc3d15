//! Image quality metrics: MSE, PSNR, SSIM and NCC.

use crate::error::{Error, Result};
use crate::image::GrayImage;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    /// `f64::INFINITY` when the images are identical.
    pub psnr: f64,
    pub ssim: f64,
    pub ncc: f64,
}

impl MetricsReport {
    pub fn compute(a: &GrayImage, b: &GrayImage) -> Result<Self> {
        Ok(Self {
            mse: mse(a, b)?,
            psnr: psnr(a, b)?,
            ssim: ssim(a, b)?,
            ncc: ncc(a, b)?,
        })
    }
}

fn same_size(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.side_exp() != b.side_exp() {
        return Err(Error::Structural(format!(
            "metric inputs differ in size ({} vs {})",
            a.side(),
            b.side()
        )));
    }
    Ok(())
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    same_size(a, b)?;
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.len() as f64)
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let c = (SSIM_WINDOW / 2) as f64;
    let mut taps: [f64; SSIM_WINDOW] = std::array::from_fn(|i| {
        (-((i as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
    });
    let s: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= s);
    taps
}

/// Valid-mode separable filtering of an `n x n` field.
fn filter_valid(field: &[f64], n: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let m = n - k + 1;
    let mut rows = vec![0.0; n * m];
    for y in 0..n {
        let src = &field[y * n..(y + 1) * n];
        for x in 0..m {
            rows[y * m + x] = taps.iter().zip(&src[x..x + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; m * m];
    for y in 0..m {
        for x in 0..m {
            out[y * m + x] = (0..k).map(|i| taps[i] * rows[(y + i) * m + x]).sum();
        }
    }
    out
}

fn ssim_term(mu_a: f64, mu_b: f64, var_a: f64, var_b: f64, cov: f64) -> f64 {
    ((2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2))
        / ((mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2))
}

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5). Images
/// smaller than the window use one global, uniformly weighted window.
pub fn ssim(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    same_size(a, b)?;
    let n = a.side();
    let fa: Vec<f64> = a.pixels().iter().map(|&p| p as f64).collect();
    let fb: Vec<f64> = b.pixels().iter().map(|&p| p as f64).collect();

    if n < SSIM_WINDOW {
        let len = fa.len() as f64;
        let mu_a = fa.iter().sum::<f64>() / len;
        let mu_b = fb.iter().sum::<f64>() / len;
        let var_a = fa.iter().map(|v| (v - mu_a).powi(2)).sum::<f64>() / len;
        let var_b = fb.iter().map(|v| (v - mu_b).powi(2)).sum::<f64>() / len;
        let cov = fa
            .iter()
            .zip(&fb)
            .map(|(x, y)| (x - mu_a) * (y - mu_b))
            .sum::<f64>()
            / len;
        return Ok(ssim_term(mu_a, mu_b, var_a, var_b, cov));
    }

    let taps = gaussian_taps();
    let aa: Vec<f64> = fa.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = fb.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    let mu_a = filter_valid(&fa, n, &taps);
    let mu_b = filter_valid(&fb, n, &taps);
    let e_aa = filter_valid(&aa, n, &taps);
    let e_bb = filter_valid(&bb, n, &taps);
    let e_ab = filter_valid(&ab, n, &taps);

    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            ssim_term(
                ma,
                mb,
                e_aa[i] - ma * ma,
                e_bb[i] - mb * mb,
                e_ab[i] - ma * mb,
            )
        })
        .sum();
    Ok(total / mu_a.len() as f64)
}

/// `sum(a*b) / sqrt(sum(a^2) * sum(b^2))`; 1 when both are all-zero, 0 when
/// only one is.
pub fn ncc(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    same_size(a, b)?;
    let (mut ab, mut aa, mut bb) = (0u64, 0u64, 0u64);
    for (&x, &y) in a.pixels().iter().zip(b.pixels()) {
        let (x, y) = (x as u64, y as u64);
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    Ok(match (aa, bb) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ => ab as f64 / ((aa as f64) * (bb as f64)).sqrt(),
    })
}

/// PSNR in dB with two decimals, or `Inf`.
pub fn format_psnr(v: f64) -> String {
    if v.is_infinite() {
        "Inf".to_string()
    } else {
        format!("{v:.2}")
    }
}
